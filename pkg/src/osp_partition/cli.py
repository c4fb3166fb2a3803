"""Command-line front end.

Every subcommand prints a JSON run report. Exit codes: 0 pass or yes, 1 fail
or no, 2 bad input, unmet precondition or exhausted search budget.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from pathlib import Path
from typing import Any, Callable, Sequence

from .characterize import (
    certify,
    decide_osp_anonymous,
    decide_osp_strong,
    generate_quota_committee,
)
from .committee import (
    EXAMPLE1_COMMITTEE,
    dummies,
    extract_committee,
    is_anonymous_rel,
    is_sp,
    quota_committee,
    strong_anonymity_quota,
)
from .core import OrderedPartition, Partition, Verdict, all_partitions, from_mask
from .errors import GoldenMismatch, IncompatibleQuotas, NotEmvr, NotOsp, OspError
from .game import (
    binary_domains,
    build_quota_game,
    figure1_game,
    random_quota_instance,
    truth_telling_profile,
)
from .serialize import (
    arena_from_json,
    arena_to_json,
    committee_from_json,
    committee_to_json,
    digest,
    dumps,
    ordered_partition_from_json,
    partition_from_json,
    preference_to_json,
    read_json,
    rule_from_json,
    scf_from_json,
    write_json,
)
from .verify import (
    coarsening_check,
    default_cap,
    osp_implements,
    replay_witness,
)

EXIT_PASS, EXIT_FAIL, EXIT_ERROR = 0, 1, 2

EXAMPLE2_PARTITION = [[1, 2, 3], [4, 5, 6, 7, 8], [9, 10]]
EXAMPLE2_QUOTAS = (2, 5, 0)
EXAMPLE2_MINIMAL = [
    [1, 2, 3],
    [1, 2, 4, 5, 6, 7, 8, 9],
    [1, 2, 4, 5, 6, 7, 8, 10],
    [1, 3, 4, 5, 6, 7, 8, 9],
    [1, 3, 4, 5, 6, 7, 8, 10],
    [2, 3, 4, 5, 6, 7, 8, 9],
    [2, 3, 4, 5, 6, 7, 8, 10],
]
EXAMPLE1_PARTITION = [[1, 2], [3], [4, 5]]


class Run:
    """Collects the pieces of a run report."""

    def __init__(self, argv: Sequence[str]):
        self.argv = list(argv)
        self.inputs: dict[str, str] = {}
        self.start = time.perf_counter()

    def load(self, path: str) -> Any:
        data = read_json(path)
        self.inputs[path] = digest(path)
        return data

    def partition_arg(self, value: str, n: int | None = None) -> Partition:
        if value.lstrip().startswith("["):
            try:
                data = json.loads(value)
            except json.JSONDecodeError as exc:
                raise OspError(f"inline partition: {exc}") from None
            return partition_from_json(data, n)
        return partition_from_json(self.load(value), n)

    def report(self, result: dict, code: int, counts: dict | None = None) -> dict:
        return {
            "command": self.argv,
            "inputs": self.inputs,
            "result": result,
            "counts": counts or {},
            "timing": {"seconds": round(time.perf_counter() - self.start, 6)},
            "exit": code,
        }


def verdict_json(v: Verdict) -> dict:
    out: dict[str, Any] = {"pass": v.passed, "checked": v.checked}
    if v.witness is not None:
        w = v.witness
        out["witness"] = w.to_json() if hasattr(w, "to_json") else repr(w)
    return out


def _mask_list(mask: int) -> list[int]:
    return sorted(from_mask(mask))


# --------------------------------------------------------------------------
# subcommands; each returns (result, exit code, counts)


def cmd_check_sp(args, run: Run):
    f = scf_from_json(run.load(args.table))
    v = is_sp(f)
    result: dict[str, Any] = {"sp": v.passed}
    if not v:
        w = v.witness
        result["witness"] = {
            "agent": w.agent,
            "supporters": _mask_list(w.supporters),
            "misreport": preference_to_json(w.misreport),
            "truthful": w.truthful_outcome,
            "manipulated": w.manipulated_outcome,
        }
    try:
        c = extract_committee(f)
        result["emvr"] = True
        result["constant"] = c.constant_value
        result["committee"] = None if c.is_trivial else committee_to_json(c)
    except NotEmvr as exc:
        result["emvr"] = False
        result["reason"] = str(exc)
    result["agree"] = result["sp"] == result["emvr"]
    return result, EXIT_PASS if v else EXIT_FAIL, {"checked": v.checked}


def cmd_extract(args, run: Run):
    f = scf_from_json(run.load(args.table))
    try:
        c = extract_committee(f)
    except NotEmvr as exc:
        return {"emvr": False, "reason": str(exc)}, EXIT_FAIL, {}
    result = {"emvr": True, "constant": c.constant_value, "committee": committee_to_json(c)}
    if args.out:
        write_json(args.out, committee_to_json(c))
    return result, EXIT_PASS, {}


def cmd_anonymity(args, run: Run):
    c = committee_from_json(run.load(args.committee))
    s = run.partition_arg(args.partition, c.n)
    anon = is_anonymous_rel(c, s)
    result = {
        "anonymous": anon,
        "dummies": sorted(dummies(c)),
        "strongQuota": strong_anonymity_quota(c),
    }
    return result, EXIT_PASS if anon else EXIT_FAIL, {}


def cmd_decide(args, run: Run):
    c = committee_from_json(run.load(args.committee))
    s = run.partition_arg(args.partition, c.n)
    if args.strong:
        yes = decide_osp_strong(c, s)
        return {"osp": yes, "quota": strong_anonymity_quota(c)}, EXIT_PASS if yes else EXIT_FAIL, {}
    found = decide_osp_anonymous(c, s, jobs=args.jobs)
    if found is None:
        return {"osp": False}, EXIT_FAIL, {}
    s_o, q = found
    return {"osp": True, "ordering": s_o.as_lists(), "quotas": list(q)}, EXIT_PASS, {}


def _quotas(text: str) -> list[int]:
    try:
        return [int(v) for v in text.replace(" ", "").split(",") if v != ""]
    except ValueError:
        raise IncompatibleQuotas(f"quotas must be comma-separated integers, got {text!r}") from None


def cmd_build_game(args, run: Run):
    if args.ordering.lstrip().startswith("["):
        s_o = ordered_partition_from_json(json.loads(args.ordering))
    else:
        s_o = ordered_partition_from_json(run.load(args.ordering))
    arena = build_quota_game(s_o, _quotas(args.quotas))
    if args.out:
        write_json(args.out, arena_to_json(arena))
    counts = {
        "nodes": len(arena.nodes),
        "infoSets": len(arena.info_sets),
        "terminals": len(arena.terminals()),
    }
    return {"built": True, "out": args.out}, EXIT_PASS, counts


def cmd_verify(args, run: Run):
    arena = arena_from_json(run.load(args.arena))
    f = rule_from_json(run.load(args.rule))
    s = run.partition_arg(args.partition, arena.n)
    tsp = truth_telling_profile(arena, binary_domains(arena.n))
    v = osp_implements(arena, tsp, f, s, args.cap, jobs=args.jobs)
    result = verdict_json(v)
    if not v and hasattr(v.witness, "departure"):
        result["replays"] = replay_witness(arena, s, v.witness, args.cap)
    return result, EXIT_PASS if v else EXIT_FAIL, {"checked": v.checked}


def cmd_coarsen_test(args, run: Run):
    arena = arena_from_json(run.load(args.arena))
    f = rule_from_json(run.load(args.rule))
    s = run.partition_arg(args.partition, arena.n)
    tsp = truth_telling_profile(arena, binary_domains(arena.n))
    v = coarsening_check(arena, tsp, f, s, args.cap)
    result: dict[str, Any] = {"pass": v.passed, "coarsenings": v.checked}
    if not v:
        result["partition"] = v.witness.partition.as_lists()
        result["verdict"] = verdict_json(v.witness.verdict)
    return result, EXIT_PASS if v else EXIT_FAIL, {"coarsenings": v.checked}


def cmd_certify(args, run: Run):
    c = committee_from_json(run.load(args.committee))
    s = run.partition_arg(args.partition, c.n)
    try:
        cert = certify(c, s, args.cap, jobs=args.jobs)
    except NotOsp:
        return {"osp": False}, EXIT_FAIL, {}
    if args.out:
        write_json(args.out, arena_to_json(cert.arena))
    result = {
        "osp": True,
        "ordering": cert.ordering.as_lists(),
        "quotas": list(cert.quotas),
        "report": verdict_json(cert.report),
        "arena": args.out,
    }
    return result, EXIT_PASS if cert.report else EXIT_FAIL, {"nodes": len(cert.arena.nodes)}


# --------------------------------------------------------------------------
# golden scenarios


def _check(cond: bool, what: str, failures: list[str]) -> None:
    if not cond:
        failures.append(what)


def reproduce_example1(cap: int | None) -> dict:
    arena, tsp = figure1_game()
    failures: list[str] = []
    s_star = Partition(EXAMPLE1_PARTITION)
    finest = Partition.finest(5)
    v_star = osp_implements(arena, tsp, EXAMPLE1_COMMITTEE, s_star, cap)
    v_fine = osp_implements(arena, tsp, EXAMPLE1_COMMITTEE, finest, cap)
    replays = bool(v_fine.witness) and replay_witness(arena, finest, v_fine.witness, cap)
    _check(v_star.passed, "fixture is not OSP relative to {{1,2},{3},{4,5}}", failures)
    _check(not v_fine.passed, "fixture unexpectedly OSP relative to the finest partition", failures)
    _check(replays, "finest-partition witness does not replay", failures)
    return {
        "committee": committee_to_json(EXAMPLE1_COMMITTEE),
        "sStar": verdict_json(v_star),
        "finest": verdict_json(v_fine),
        "witnessReplays": replays,
        "failures": failures,
    }


def reproduce_example2(cap: int | None) -> dict:
    failures: list[str] = []
    s_o = OrderedPartition(EXAMPLE2_PARTITION)
    c = generate_quota_committee(s_o, EXAMPLE2_QUOTAS)
    got = [list(m) for m in c.coalitions()]
    missing = [m for m in EXAMPLE2_MINIMAL if m not in got]
    extra = [m for m in got if m not in EXAMPLE2_MINIMAL]
    _check(not missing and not extra, "generated committee differs from the listed one", failures)
    cert = certify(c, Partition(EXAMPLE2_PARTITION), cap)
    _check(list(cert.quotas) == list(EXAMPLE2_QUOTAS), f"decided quotas {cert.quotas}", failures)
    _check(cert.report.passed, "certificate report fails", failures)
    return {
        "committee": committee_to_json(c),
        "diff": {"missing": missing, "extra": extra},
        "ordering": cert.ordering.as_lists(),
        "quotas": list(cert.quotas),
        "report": verdict_json(cert.report),
        "failures": failures,
    }


def reproduce_prop1(cap: int | None, seed: int, samples: int) -> dict:
    failures: list[str] = []
    arena, tsp = figure1_game()
    v = coarsening_check(arena, tsp, EXAMPLE1_COMMITTEE, Partition(EXAMPLE1_PARTITION), cap)
    _check(v.passed and v.checked == 5, "fixture fails for a coarsening of {{1,2},{3},{4,5}}", failures)
    rng = random.Random(seed)
    games = []
    for _ in range(samples):
        s_o, q = random_quota_instance(rng)
        g = build_quota_game(s_o, q)
        c = generate_quota_committee(s_o, q)
        gv = coarsening_check(g, truth_telling_profile(g, binary_domains(s_o.n)), c, s_o.partition, cap)
        games.append({"ordering": s_o.as_lists(), "quotas": list(q), "pass": gv.passed, "coarsenings": gv.checked})
        _check(gv.passed, f"quota game {s_o.as_lists()} {list(q)} fails a coarsening", failures)
    return {"fixture": {"pass": v.passed, "coarsenings": v.checked}, "quotaGames": games, "failures": failures}


def reproduce_thm3(max_n: int) -> dict:
    failures: list[str] = []
    checked = 0
    yes = 0
    for n in range(1, max_n + 1):
        for q in range(1, n + 1):
            c = quota_committee(n, q)
            for s in all_partitions(n):
                checked += 1
                strong = decide_osp_strong(c, s)
                searched = decide_osp_anonymous(c, s) is not None
                yes += strong
                if strong != searched:
                    failures.append(f"n={n} q={q} s={s.as_lists()}: closed form {strong}, search {searched}")
    return {"maxN": max_n, "instances": checked, "osp": yes, "disagreements": len(failures), "failures": failures}


def cmd_reproduce(args, run: Run):
    cap = args.cap
    if args.example == "1":
        result = reproduce_example1(cap)
    elif args.example == "2":
        result = reproduce_example2(cap)
    elif args.example == "prop1":
        result = reproduce_prop1(cap, args.seed, args.samples)
    else:
        result = reproduce_thm3(args.max_n)
    if result["failures"]:
        result["error"] = str(GoldenMismatch("; ".join(result["failures"])))
    return result, EXIT_FAIL if result["failures"] else EXIT_PASS, {}


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="osp-partition", description=__doc__.splitlines()[0])
    p.add_argument("--seed", type=int, default=0, help="seed for randomized scenarios")
    p.add_argument("--cap", type=int, default=None, help="enumeration cap (default: OSP_CAP or 2^22)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for verification and search")
    p.add_argument("--report", help="also write the run report to this file")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name: str, fn: Callable, help_text: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, help=help_text)
        sp.set_defaults(func=fn)
        return sp

    sp = add("check-sp", cmd_check_sp, "strategy-proofness and committee extraction for a table")
    sp.add_argument("table")
    sp = add("extract", cmd_extract, "committee inducing a table")
    sp.add_argument("table")
    sp.add_argument("--out")
    sp = add("anonymity", cmd_anonymity, "anonymity of a committee relative to a partition")
    sp.add_argument("committee")
    sp.add_argument("partition", help="file or inline JSON")
    sp = add("decide", cmd_decide, "is a committee OSP relative to a partition")
    sp.add_argument("committee")
    sp.add_argument("partition", help="file or inline JSON")
    sp.add_argument("--strong", action="store_true", help="closed form for strongly anonymous committees")
    sp = add("build-game", cmd_build_game, "quota game for an ordered partition")
    sp.add_argument("ordering", help="file or inline JSON, blocks in play order")
    sp.add_argument("--quotas", required=True, help="comma-separated, e.g. 2,5,0")
    sp.add_argument("--out")
    sp = add("verify", cmd_verify, "OSP-implementation check of an arena")
    sp.add_argument("arena")
    sp.add_argument("rule", help="committee or table file")
    sp.add_argument("--partition", required=True, help="file or inline JSON")
    sp = add("coarsen-test", cmd_coarsen_test, "verify an arena for every coarsening of a partition")
    sp.add_argument("arena")
    sp.add_argument("rule")
    sp.add_argument("--partition", required=True)
    sp = add("certify", cmd_certify, "decide, build and verify in one go")
    sp.add_argument("committee")
    sp.add_argument("partition")
    sp.add_argument("--out", help="write the certificate arena here")
    sp = add("reproduce", cmd_reproduce, "golden scenarios")
    sp.add_argument("--example", required=True, choices=["1", "2", "prop1", "thm3-grid"])
    sp.add_argument("--samples", type=int, default=5, help="random quota games for prop1")
    sp.add_argument("--max-n", type=int, default=5, help="largest n for thm3-grid")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.cap is None:
        args.cap = default_cap()
    run = Run(argv)
    try:
        result, code, counts = args.func(args, run)
    except (OspError, ValueError) as exc:
        result, code, counts = {"error": type(exc).__name__, "message": str(exc)}, EXIT_ERROR, {}
    report = run.report(result, code, counts)
    text = dumps(report)
    print(text)
    if args.report:
        Path(args.report).write_text(text + "\n", encoding="utf-8")
    return code


if __name__ == "__main__":
    sys.exit(main())
