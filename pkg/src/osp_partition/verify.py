"""Obvious dominance relative to a partition, and implementation verdicts.

Two routes compute obvious dominance. :func:`is_obviously_dominant_literal`
follows the definitions word for word: every strategy of the agent's block
mates, every deviation, every earliest point of departure, and option sets
obtained by enumerating outsiders' strategies. :func:`is_obviously_dominant`
gets the same answer much faster. Because no information set repeats along a
path, the union of the deviation option sets over all deviations departing at
``I`` is the set of outcomes reachable from the compatible nodes of ``I``
after any other choice, with the agent and outsiders free below and the mates
bound by their strategies. Mates only matter through the information sets
that lie above or below ``I``, so only those are enumerated.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import product
from math import prod
from typing import Callable, Mapping, Sequence, Union

from .committee import Committee, ScfTable, emvr_evaluate
from .core import Partition, Preference, Verdict, coarsenings, prefers
from .errors import HypothesisNotMet, IdenticalStrategies, IncompleteStrategy, SearchSpaceExceeded
from .game import (
    Arena,
    Domains,
    Label,
    Strategy,
    TypeStrategyProfile,
    enumerate_strategies,
    info_precedes,
    is_in_game_class,
    iter_strategies,
    iter_type_profiles,
    label_str,
    play_from,
    strategy_count,
    truth_telling_profile,
)

DEFAULT_CAP = 1 << 22

Rule = Union[ScfTable, Committee, Callable[[Sequence[Preference]], str]]


def default_cap() -> int:
    raw = os.environ.get("OSP_CAP")
    return int(raw) if raw else DEFAULT_CAP


def _rule(f: Rule) -> Callable[[Sequence[Preference]], str]:
    if isinstance(f, Committee):
        return lambda prefs: emvr_evaluate(f, prefs)
    return f


@dataclass(frozen=True)
class DeparturePoint:
    info_set: int
    nodes: tuple[int, ...]  # compatible members of the info set


@dataclass
class ObviousDominanceWitness:
    agent: int
    preference: Preference
    strategy: Strategy
    mates: dict[int, Strategy]
    deviation: Strategy
    departure: DeparturePoint
    x: str  # reachable when following the strategy
    y: str  # reachable after deviating, strictly preferred to x

    def to_json(self) -> dict:
        return {
            "agent": self.agent,
            "preference": [sorted(t) for t in self.preference.tiers],
            "strategy": _strategy_json(self.strategy),
            "mates": {str(j): _strategy_json(s) for j, s in sorted(self.mates.items())},
            "deviation": _strategy_json(self.deviation),
            "departure": {"infoSet": self.departure.info_set, "nodes": list(self.departure.nodes)},
            "x": self.x,
            "y": self.y,
        }


def _strategy_json(s: Strategy) -> dict:
    return {str(k): label_str(v) for k, v in sorted(s.items())}


@dataclass
class InducesWitness:
    profile: tuple[Preference, ...]
    expected: str
    got: str

    def to_json(self) -> dict:
        return {"profile": [str(p) for p in self.profile], "expected": self.expected, "got": self.got}


# --------------------------------------------------------------------------
# definitions, literally


def compatible(arena: Arena, node: int, partial: Mapping[int, Mapping[int, Label]]) -> bool:
    """Every move on the way to ``node`` by an agent in ``partial`` follows its strategy."""
    for w, lab in arena.history(node):
        owner = arena.owner[w]
        if owner in partial:
            try:
                if partial[owner][arena.info[w]] != lab:
                    return False
            except KeyError:
                raise IncompleteStrategy(f"agent {owner} has no choice at info set {arena.info[w]}") from None
    return True


def earliest_departures(
    arena: Arena,
    block: Mapping[int, Strategy],
    i: int,
    deviation: Strategy,
) -> list[DeparturePoint]:
    """Earliest points at which ``deviation`` departs from ``block[i]``.

    Each point is an info set of ``i`` where the two strategies differ and no
    earlier info set of ``i`` differs, restricted to the nodes compatible with
    ``block``; points with no compatible node are dropped.
    """
    sigma = block[i]
    diff = [I.id for I in arena.info_sets_of(i) if sigma[I.id] != deviation[I.id]]
    if not diff:
        raise IdenticalStrategies(f"deviation of agent {i} equals its strategy")
    out = []
    for iid in diff:
        if any(info_precedes(arena, other, iid) for other in diff if other != iid):
            continue
        nodes = tuple(z for z in arena.info_sets[iid].nodes if compatible(arena, z, block))
        if nodes:
            out.append(DeparturePoint(iid, nodes))
    return out


def _reach(arena: Arena, start: int, fixed: Mapping[int, Mapping[int, Label]]) -> set[str]:
    """Outcomes reachable from ``start``: agents in ``fixed`` follow their
    strategies, everyone else may take any choice."""
    out: set[str] = set()
    stack = [start]
    while stack:
        z = stack.pop()
        owner = arena.owner[z]
        if owner is None:
            out.add(arena.outcome[z])
        elif owner in fixed:
            stack.append(arena.children[z][fixed[owner][arena.info[z]]])
        else:
            stack.extend(c for _, c in arena.child_list[z])
    return out


def option_sets(
    arena: Arena,
    block: Mapping[int, Strategy],
    i: int,
    deviation: Strategy,
    dp: DeparturePoint,
) -> tuple[set[str], set[str]]:
    """``(o, o')``: outcomes from the departure nodes under the strategy and
    under the deviation, over every behaviour of agents outside the block."""
    o: set[str] = set()
    o_dev: set[str] = set()
    deviated = dict(block)
    deviated[i] = deviation
    for z in dp.nodes:
        o |= _reach(arena, z, block)
        o_dev |= _reach(arena, z, deviated)
    return o, o_dev


def option_sets_enumerated(
    arena: Arena,
    block: Mapping[int, Strategy],
    i: int,
    deviation: Strategy,
    dp: DeparturePoint,
    cap: int | None = None,
) -> tuple[set[str], set[str]]:
    """Same as :func:`option_sets`, by enumerating outsiders' strategy profiles."""
    cap = default_cap() if cap is None else cap
    outsiders = [j for j in range(1, arena.n + 1) if j not in block]
    need = prod(strategy_count(arena, j) for j in outsiders)
    if need * max(1, len(dp.nodes)) > cap:
        raise SearchSpaceExceeded(need * len(dp.nodes), cap, "outsider strategy profiles")
    spaces = [enumerate_strategies(arena, j, cap) for j in outsiders]
    deviated = dict(block)
    deviated[i] = deviation
    o: set[str] = set()
    o_dev: set[str] = set()
    for combo in product(*spaces):
        rest = dict(zip(outsiders, combo))
        for z in dp.nodes:
            o.add(arena.outcome[play_from(arena, z, {**rest, **block})])
            o_dev.add(arena.outcome[play_from(arena, z, {**rest, **deviated})])
    return o, o_dev


def _violation(pref: Preference, o: set[str], o_dev: set[str]) -> tuple[str, str] | None:
    for x in sorted(o):
        for y in sorted(o_dev):
            if not prefers(pref, x, y):
                return x, y
    return None


def is_obviously_dominant_literal(
    arena: Arena,
    s: Partition,
    i: int,
    pref: Preference,
    sigma: Strategy,
    cap: int | None = None,
) -> Verdict:
    """Obvious dominance by direct enumeration of every quantifier."""
    cap = default_cap() if cap is None else cap
    mates = sorted(s.block_of(i) - {i})
    mate_count = prod(strategy_count(arena, j) for j in mates)
    dev_count = strategy_count(arena, i) - 1
    if mate_count * max(dev_count, 0) > cap:
        raise SearchSpaceExceeded(mate_count * dev_count, cap)
    spaces = [enumerate_strategies(arena, j, cap) for j in mates]
    checked = 0
    for combo in product(*spaces):
        mate_strats = dict(zip(mates, combo))
        block = {**mate_strats, i: sigma}
        for dev in iter_strategies(arena, i):
            if dev == sigma:
                continue
            checked += 1
            for dp in earliest_departures(arena, block, i, dev):
                o, o_dev = option_sets_enumerated(arena, block, i, dev, dp, cap)
                bad = _violation(pref, o, o_dev)
                if bad:
                    w = ObviousDominanceWitness(i, pref, dict(sigma), mate_strats, dev, dp, *bad)
                    return Verdict(False, w, checked)
    return Verdict(True, None, checked)


# --------------------------------------------------------------------------
# fast exact route


def _relevant_mate_sets(arena: Arena, iid: int, mates: set[int]) -> list[int]:
    """Mate info sets holding an ancestor or a descendant of some node of ``iid``."""
    near: set[int] = set()
    for z in arena.info_sets[iid].nodes:
        w = arena.parent[z]
        while w is not None:
            near.add(w)
            w = arena.parent[w]
        near.update(arena.descendants(z))
    return sorted({arena.info[w] for w in near if arena.owner[w] in mates})


def _deviation_path(
    arena: Arena, start: int, fixed: Mapping[int, Mapping[int, Label]], target: str
) -> list[tuple[int, Label]] | None:
    """Edges from ``start`` to a terminal with outcome ``target``; ``fixed``
    agents follow their strategies, the rest choose freely."""
    stack = [(start, [])]
    while stack:
        z, path = stack.pop()
        owner = arena.owner[z]
        if owner is None:
            if arena.outcome[z] == target:
                return path
            continue
        if owner in fixed:
            lab = fixed[owner][arena.info[z]]
            stack.append((arena.children[z][lab], path + [(z, lab)]))
        else:
            for lab, c in reversed(arena.child_list[z]):
                stack.append((c, path + [(z, lab)]))
    return None


def _complete(arena: Arena, j: int, partial: Mapping[int, Label]) -> Strategy:
    return {I.id: partial.get(I.id, I.choices[0]) for I in arena.info_sets_of(j)}


def od_search_size(arena: Arena, s: Partition, i: int) -> int:
    mates = set(s.block_of(i) - {i})
    total = 0
    for I in arena.info_sets_of(i):
        rel = _relevant_mate_sets(arena, I.id, mates)
        total += prod(len(arena.info_sets[r].choices) for r in rel)
    return total


def is_obviously_dominant(
    arena: Arena,
    s: Partition,
    i: int,
    pref: Preference,
    sigma: Strategy,
    cap: int | None = None,
) -> Verdict:
    """Whether ``sigma`` is obviously dominant for agent ``i`` of type ``pref``
    relative to ``s``; a failing verdict carries a replayable witness."""
    cap = default_cap() if cap is None else cap
    mates = set(s.block_of(i) - {i})
    need = od_search_size(arena, s, i)
    if need > cap:
        raise SearchSpaceExceeded(need, cap, "mate strategy restrictions")
    checked = 0
    for I in arena.info_sets_of(i):
        alternatives_here = [a for a in I.choices if a != sigma[I.id]]
        if not alternatives_here:
            continue
        rel = _relevant_mate_sets(arena, I.id, mates)
        spaces = [arena.info_sets[r].choices for r in rel]
        for combo in product(*spaces):
            checked += 1
            mate_partial: dict[int, dict[int, Label]] = {j: {} for j in mates}
            for r, lab in zip(rel, combo):
                mate_partial[arena.info_sets[r].owner][r] = lab
            block = {**mate_partial, i: sigma}
            nodes = tuple(z for z in I.nodes if _compatible_partial(arena, z, block))
            if not nodes:
                continue
            o: set[str] = set()
            for z in nodes:
                o |= _reach(arena, z, block)
            free_i = dict(mate_partial)
            for a in alternatives_here:
                for z in nodes:
                    o_dev = _reach(arena, arena.children[z][a], free_i)
                    bad = _violation(pref, o, o_dev)
                    if bad is None:
                        continue
                    path = _deviation_path(arena, arena.children[z][a], free_i, bad[1])
                    dev = dict(sigma)
                    dev[I.id] = a
                    for w, lab in path:
                        if arena.owner[w] == i:
                            dev[arena.info[w]] = lab
                    full_mates = {j: _complete(arena, j, mate_partial[j]) for j in sorted(mates)}
                    dp = DeparturePoint(I.id, nodes)
                    w = ObviousDominanceWitness(i, pref, dict(sigma), full_mates, dev, dp, *bad)
                    return Verdict(False, w, checked)
    return Verdict(True, None, checked)


def _compatible_partial(arena: Arena, node: int, partial: Mapping[int, Mapping[int, Label]]) -> bool:
    for w, lab in arena.history(node):
        owner = arena.owner[w]
        if owner in partial and partial[owner][arena.info[w]] != lab:
            return False
    return True


def replay_witness(arena: Arena, s: Partition, w: ObviousDominanceWitness, cap: int | None = None) -> bool:
    """Re-derive the violation from the witness using the literal definitions."""
    block = {**w.mates, w.agent: w.strategy}
    if set(block) != set(s.block_of(w.agent)):
        return False
    if w.departure not in earliest_departures(arena, block, w.agent, w.deviation):
        return False
    o, o_dev = option_sets_enumerated(arena, block, w.agent, w.deviation, w.departure, cap)
    return w.x in o and w.y in o_dev and prefers(w.preference, w.y, w.x, strict=True)


# --------------------------------------------------------------------------
# implementation verdicts


def induces(arena: Arena, tsp: TypeStrategyProfile, f: Rule) -> Verdict:
    """Truthful play under ``tsp`` reproduces ``f`` on every type profile."""
    rule = _rule(f)
    domains = {i: tuple(per) for i, per in tsp.strategies.items()}
    checked = 0
    for prefs in iter_type_profiles(domains, arena.n):
        checked += 1
        got = arena.outcome[play_from(arena, arena.root, tsp.profile(prefs))]
        want = rule(prefs)
        if got != want:
            return Verdict(False, InducesWitness(tuple(prefs), want, got), checked)
    return Verdict(True, None, checked)


def _od_task(args):
    arena, s, i, pref, sigma, cap = args
    return is_obviously_dominant(arena, s, i, pref, sigma, cap)


def osp_implements(
    arena: Arena,
    tsp: TypeStrategyProfile,
    f: Rule,
    s: Partition,
    cap: int | None = None,
    jobs: int = 1,
) -> Verdict:
    """``tsp`` induces ``f`` and every type-strategy is obviously dominant
    relative to ``s``. The witness on failure is the first one in (agent,
    preference) order whatever ``jobs`` is."""
    cap = default_cap() if cap is None else cap
    ind = induces(arena, tsp, f)
    if not ind:
        return ind
    tasks = [
        (arena, s, i, pref, sigma, cap)
        for i in sorted(tsp.strategies)
        for pref, sigma in tsp.strategies[i].items()
    ]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_od_task, tasks))
    else:
        results = []
        for t in tasks:
            r = _od_task(t)
            results.append(r)
            if not r:
                break
    checked = ind.checked
    for r in results:
        checked += r.checked
        if not r:
            return Verdict(False, r.witness, checked)
    return Verdict(True, None, checked)


def is_weakly_dominant(
    arena: Arena, i: int, pref: Preference, sigma: Strategy, cap: int | None = None
) -> bool:
    """``sigma`` is at least as good as any deviation against every strategy
    profile of the other agents.

    Plays ``sigma`` and a deviation side by side and fixes the others' choices
    (and the deviation's) only at information sets one of the two plays
    reaches, so unreached information sets are never enumerated. ``cap``
    bounds the number of play pairs examined.
    """
    cap = default_cap() if cap is None else cap
    others: dict[int, Label] = {}
    dev: dict[int, Label] = {}
    seen = 0

    def branch(z: int, table: dict[int, Label], rest: Callable[[int], bool]) -> bool:
        iid = arena.info[z]
        for label in arena.info_sets[iid].choices:
            table[iid] = label
            ok = rest(arena.children[z][label])
            del table[iid]
            if not ok:
                return False
        return True

    def walk(a: int, b: int) -> bool:
        nonlocal seen
        if arena.owner[a] is not None:
            iid = arena.info[a]
            if arena.owner[a] == i:
                return walk(arena.children[a][sigma[iid]], b)
            if iid in others:
                return walk(arena.children[a][others[iid]], b)
            return branch(a, others, lambda c: walk(c, b))
        if arena.owner[b] is not None:
            iid = arena.info[b]
            table = dev if arena.owner[b] == i else others
            if iid in table:
                return walk(a, arena.children[b][table[iid]])
            return branch(b, table, lambda c: walk(a, c))
        seen += 1
        if seen > cap:
            raise SearchSpaceExceeded(seen, cap, "play pairs")
        return prefers(pref, arena.outcome[a], arena.outcome[b])

    return walk(arena.root, arena.root)


def is_weakly_dominant_brute(
    arena: Arena, i: int, pref: Preference, sigma: Strategy, cap: int | None = None
) -> bool:
    """Same as :func:`is_weakly_dominant` by enumerating every full strategy
    profile of the other agents and every deviation."""
    cap = default_cap() if cap is None else cap
    others = [j for j in range(1, arena.n + 1) if j != i]
    need = prod(strategy_count(arena, j) for j in others) * strategy_count(arena, i)
    if need > cap:
        raise SearchSpaceExceeded(need, cap)
    mine = enumerate_strategies(arena, i, cap)
    spaces = [enumerate_strategies(arena, j, cap) for j in others]
    for combo in product(*spaces):
        prof = dict(zip(others, combo))
        prof[i] = sigma
        x = arena.outcome[play_from(arena, arena.root, prof)]
        for dev in mine:
            prof[i] = dev
            y = arena.outcome[play_from(arena, arena.root, prof)]
            if not prefers(pref, x, y):
                return False
    return True


@dataclass
class CoarseningFailure:
    partition: Partition
    verdict: Verdict


def coarsening_check(
    arena: Arena, tsp: TypeStrategyProfile, f: Rule, s_star: Partition, cap: int | None = None
) -> Verdict:
    """Run :func:`osp_implements` for every partition coarser than ``s_star``."""
    checked = 0
    for s in coarsenings(s_star):
        v = osp_implements(arena, tsp, f, s, cap)
        checked += 1
        if not v:
            return Verdict(False, CoarseningFailure(s, v), checked)
    return Verdict(True, None, checked)


def theorem1_property(
    arena: Arena,
    s: Partition,
    tsp: TypeStrategyProfile,
    f: Rule,
    domains: Domains,
    cap: int | None = None,
) -> Verdict:
    """If ``arena`` is a staged game for ``s`` whose truth-telling profile
    implements ``f`` in weakly dominant strategies, check that it also
    implements ``f`` obviously relative to ``s``.

    Raises :class:`HypothesisNotMet` when any premise fails.
    """
    if not is_in_game_class(arena, s, domains):
        raise HypothesisNotMet("arena is not a staged game for the partition")
    if tsp.strategies != truth_telling_profile(arena, domains).strategies:
        raise HypothesisNotMet("type-strategy profile is not truth-telling")
    if not induces(arena, tsp, f):
        raise HypothesisNotMet("truth-telling does not induce the rule")
    for i in sorted(tsp.strategies):
        for pref, sigma in tsp.strategies[i].items():
            if not is_weakly_dominant(arena, i, pref, sigma, cap):
                raise HypothesisNotMet(f"truth-telling of agent {i} at {pref} is not weakly dominant")
    return osp_implements(arena, tsp, f, s, cap)
