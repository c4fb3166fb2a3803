import json
import random

import pytest

from osp_partition.cli import main
from osp_partition.committee import EXAMPLE1_COMMITTEE, ScfTable, quota_committee
from osp_partition.core import OrderedPartition, Partition
from osp_partition.errors import ParseError
from osp_partition.game import binary_domains, build_quota_game, figure1_game, prune, random_arena, relabel
from osp_partition.serialize import (
    arena_from_json,
    arena_to_json,
    committee_from_json,
    committee_to_json,
    partition_from_json,
    partition_to_json,
    read_json,
    scf_from_json,
    scf_to_json,
    write_json,
)


def roundtrip(data):
    return json.loads(json.dumps(data))


def test_arena_round_trip():
    arena, tsp = figure1_game()
    assert arena_from_json(roundtrip(arena_to_json(arena))) == arena
    doms = binary_domains(5)
    relabeled = relabel(prune(arena, tsp, doms), tsp, doms)
    assert arena_from_json(roundtrip(arena_to_json(relabeled))) == relabeled
    g = build_quota_game(OrderedPartition([[1, 2], [3]]), (1, 0))
    assert arena_from_json(roundtrip(arena_to_json(g))) == g
    rng = random.Random(5)
    for _ in range(30):
        a = random_arena(rng, rng.randint(1, 4))
        assert arena_from_json(roundtrip(arena_to_json(a))) == a


def test_committee_partition_table_round_trip():
    for c in (EXAMPLE1_COMMITTEE, quota_committee(4, 3)):
        assert committee_from_json(roundtrip(committee_to_json(c))) == c
    s = Partition([[1, 2], [3], [4, 5]])
    assert partition_from_json(roundtrip(partition_to_json(s))) == s
    f = ScfTable.from_committee(EXAMPLE1_COMMITTEE)
    data = scf_to_json(f)
    # character i-1 is agent i's report, 1 meaning x
    assert data["11000"] == "x" and data["00011"] == "y"
    assert scf_from_json(roundtrip(data)) == f


def test_malformed_inputs(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    with pytest.raises(ParseError):
        read_json(bad)
    with pytest.raises(ParseError):
        committee_from_json({"n": 2, "minimal": [[3]]})
    with pytest.raises(ParseError):
        scf_from_json({"00": "x", "01": "y"})
    with pytest.raises(ParseError):
        arena_from_json({"n": 1})


@pytest.fixture
def files(tmp_path):
    arena, _ = figure1_game()
    paths = {
        "arena": tmp_path / "arena.json",
        "committee": tmp_path / "committee.json",
        "table": tmp_path / "table.json",
        "maj": tmp_path / "maj.json",
    }
    write_json(paths["arena"], arena_to_json(arena))
    write_json(paths["committee"], committee_to_json(EXAMPLE1_COMMITTEE))
    write_json(paths["table"], scf_to_json(ScfTable.from_committee(EXAMPLE1_COMMITTEE)))
    write_json(paths["maj"], committee_to_json(quota_committee(3, 2)))
    return {k: str(v) for k, v in paths.items()}


def run_cli(capsys, *argv):
    code = main(list(argv))
    report = json.loads(capsys.readouterr().out)
    assert report["exit"] == code
    return code, report


def test_cli_verify_fixture(capsys, files):
    code, rep = run_cli(capsys, "verify", files["arena"], files["committee"], "--partition", "[[1,2],[3],[4,5]]")
    assert code == 0 and rep["result"]["pass"]
    assert set(rep["inputs"]) == {files["arena"], files["committee"]}
    assert all(len(h) == 64 for h in rep["inputs"].values())
    code, rep = run_cli(capsys, "verify", files["arena"], files["table"], "--partition", "[[1],[2],[3],[4],[5]]")
    assert code == 1 and "witness" in rep["result"]
    code, rep = run_cli(capsys, "--cap", "1", "verify", files["arena"], files["committee"], "--partition", "[[1,2,3,4,5]]")
    assert code == 2 and rep["result"]["error"] == "SearchSpaceExceeded"


def test_cli_coarsen_and_certify(capsys, files, tmp_path):
    code, rep = run_cli(capsys, "coarsen-test", files["arena"], files["committee"], "--partition", "[[1,2],[3],[4,5]]")
    assert code == 0 and rep["counts"]["coarsenings"] == 5
    out = tmp_path / "cert.json"
    code, rep = run_cli(capsys, "certify", files["maj"], "[[1,2],[3]]", "--out", str(out))
    assert code == 0
    assert arena_from_json(read_json(out)).n == 3
    code, _ = run_cli(capsys, "certify", files["maj"], "[[1],[2],[3]]")
    assert code == 1


def test_cli_decide_and_anonymity(capsys, files):
    code, rep = run_cli(capsys, "decide", files["maj"], "[[1,2],[3]]")
    assert code == 0 and rep["result"]["quotas"] == [1, 0]
    code, _ = run_cli(capsys, "decide", files["maj"], "[[1],[2],[3]]")
    assert code == 1
    code, rep = run_cli(capsys, "decide", "--strong", files["maj"], "[[1,2,3]]")
    assert code == 0
    code, rep = run_cli(capsys, "decide", files["committee"], "[[1,2],[3],[4,5]]")
    assert code == 2 and rep["result"]["error"] == "PreconditionViolated"
    code, _ = run_cli(capsys, "anonymity", files["maj"], "[[1],[2],[3]]")
    assert code == 0
    code, _ = run_cli(capsys, "anonymity", files["committee"], "[[1,2],[3],[4,5]]")
    assert code == 1


def test_cli_tables(capsys, files, tmp_path):
    code, _ = run_cli(capsys, "check-sp", files["table"])
    assert code == 0
    out = tmp_path / "c.json"
    code, _ = run_cli(capsys, "extract", files["table"], "--out", str(out))
    assert code == 0
    assert committee_from_json(read_json(out)) == EXAMPLE1_COMMITTEE
    parity = tmp_path / "parity.json"
    write_json(parity, {"00": "y", "10": "x", "01": "x", "11": "y"})
    code, rep = run_cli(capsys, "check-sp", str(parity))
    assert code == 1 and "witness" in rep["result"]


def test_cli_build_game(capsys, tmp_path):
    out = tmp_path / "g.json"
    code, _ = run_cli(capsys, "build-game", "[[1,2],[3]]", "--quotas", "1,0", "--out", str(out))
    assert code == 0
    assert arena_from_json(read_json(out)) == build_quota_game(OrderedPartition([[1, 2], [3]]), (1, 0))
    code, rep = run_cli(capsys, "build-game", "[[1,2],[3]]", "--quotas", "1,1")
    assert code == 2 and rep["result"]["error"] == "IncompatibleQuotas"


def test_cli_errors(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("[1,", encoding="utf-8")
    code, rep = run_cli(capsys, "check-sp", str(bad))
    assert code == 2 and rep["result"]["error"] == "ParseError"
    code, rep = run_cli(capsys, "check-sp", str(tmp_path / "missing.json"))
    assert code == 2


def test_cli_report_file(capsys, files, tmp_path):
    rep_path = tmp_path / "report.json"
    code = main(["--report", str(rep_path), "decide", files["maj"], "[[1,2],[3]]"])
    printed = json.loads(capsys.readouterr().out)
    assert code == 0 and read_json(rep_path) == printed


@pytest.mark.parametrize("example", ["1", "2", "prop1", "thm3-grid"])
def test_cli_reproduce(capsys, example):
    extra = ["--max-n", "3"] if example == "thm3-grid" else []
    code, rep = run_cli(capsys, "reproduce", "--example", example, *extra)
    assert code == 0, rep
