"""Extensive game forms with imperfect information.

An :class:`Arena` is a finite rooted tree. Non-terminal nodes are owned by
agents and grouped into information sets; terminal nodes carry an outcome.
Choice labels are either opaque strings or, once relabeled into a round table
mechanism, non-empty frozensets of preferences.

Strategies are plain dicts ``info_set_id -> label``; keying by information
set makes them measurable by construction.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass
from itertools import product
from math import prod
from typing import Iterable, Iterator, Mapping, Sequence, Union

from .core import (
    BINARY_DOMAIN,
    PX,
    PY,
    OrderedPartition,
    Partition,
    Preference,
    check_quotas,
    compatible_quotas,
)
from .errors import EmptyChoiceLabel, IncompleteStrategy, SearchSpaceExceeded

Label = Union[str, frozenset]
Strategy = dict  # info-set id -> Label
Domains = Mapping[int, Sequence[Preference]]

PX_SET: frozenset = frozenset({PX})
PY_SET: frozenset = frozenset({PY})


def label_key(label: Label) -> tuple:
    if isinstance(label, str):
        return (0, label)
    return (1, tuple(sorted(p.sort_key() for p in label)))


def label_str(label: Label) -> str:
    if isinstance(label, str):
        return label
    return "{" + ", ".join(sorted(str(p) for p in label)) + "}"


def binary_domains(n: int) -> dict[int, tuple[Preference, ...]]:
    return {i: BINARY_DOMAIN for i in range(1, n + 1)}


@dataclass(frozen=True)
class Node:
    id: int
    owner: int | None  # None for terminal nodes
    parent: int | None
    choice: Label | None  # label of the edge from the parent
    info_set: int | None = None
    outcome: str | None = None

    @property
    def terminal(self) -> bool:
        return self.owner is None


@dataclass(frozen=True)
class InfoSet:
    id: int
    owner: int
    nodes: tuple[int, ...]
    choices: tuple[Label, ...]


class Arena:
    """Immutable game tree. Node ids must be ``0..len(nodes)-1``."""

    def __init__(
        self,
        n: int,
        alternatives: Sequence[str],
        nodes: Sequence[Node],
        info_sets: Iterable[InfoSet],
    ):
        self.n = n
        self.alternatives = tuple(alternatives)
        self.nodes = tuple(sorted(nodes, key=lambda z: z.id))
        if [z.id for z in self.nodes] != list(range(len(self.nodes))):
            raise ValueError("node ids must be 0..m-1")
        self.info_sets: dict[int, InfoSet] = {I.id: I for I in info_sets}
        m = len(self.nodes)
        self.parent = [z.parent for z in self.nodes]
        self.owner = [z.owner for z in self.nodes]
        self.info = [z.info_set for z in self.nodes]
        self.outcome = [z.outcome for z in self.nodes]
        self.child_list: list[list[tuple[Label, int]]] = [[] for _ in range(m)]
        for z in self.nodes:
            if z.parent is not None and 0 <= z.parent < m:
                self.child_list[z.parent].append((z.choice, z.id))
        self.children: list[dict[Label, int]] = [dict(cl) for cl in self.child_list]
        roots = [z.id for z in self.nodes if z.parent is None]
        self.root = roots[0] if roots else 0

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Arena):
            return NotImplemented
        return (
            self.n == other.n
            and self.alternatives == other.alternatives
            and self.nodes == other.nodes
            and self.info_sets == other.info_sets
        )

    def __repr__(self) -> str:
        return f"Arena(n={self.n}, nodes={len(self.nodes)}, info_sets={len(self.info_sets)})"

    def is_terminal(self, z: int) -> bool:
        return self.owner[z] is None

    def terminals(self) -> list[int]:
        return [z.id for z in self.nodes if z.terminal]

    def info_sets_of(self, i: int) -> list[InfoSet]:
        return [I for _, I in sorted(self.info_sets.items()) if I.owner == i]

    def history(self, z: int) -> list[tuple[int, Label]]:
        """Edges ``(node, label)`` from the root down to ``z``."""
        edges = []
        while self.parent[z] is not None:
            p = self.parent[z]
            edges.append((p, self.nodes[z].choice))
            z = p
        edges.reverse()
        return edges

    def precedes(self, a: int, b: int) -> bool:
        """Strict tree order ``a ≺ b``."""
        z = self.parent[b]
        while z is not None:
            if z == a:
                return True
            z = self.parent[z]
        return False

    def descendants(self, z: int) -> Iterator[int]:
        stack = [c for _, c in self.child_list[z]]
        while stack:
            w = stack.pop()
            yield w
            stack.extend(c for _, c in self.child_list[w])

    def depth(self) -> int:
        best = 0
        for z in self.terminals():
            best = max(best, len(self.history(z)))
        return best


class ArenaBuilder:
    """Assigns node ids in call order and pools nodes into info sets by key."""

    def __init__(self, n: int, alternatives: Sequence[str] = ("x", "y")):
        self.n = n
        self.alternatives = tuple(alternatives)
        self.rows: list[dict] = []
        self.info_key: dict[object, int] = {}
        self.info_rows: dict[int, dict] = {}

    def add(
        self,
        parent: int | None,
        choice: Label | None,
        owner: int | None = None,
        outcome: str | None = None,
        info_key: object = None,
        choices: Sequence[Label] = (),
        info_id: int | None = None,
    ) -> int:
        nid = len(self.rows)
        row = {"parent": parent, "choice": choice, "owner": owner, "outcome": outcome, "info": None}
        if owner is not None:
            key = info_key if info_key is not None else ("node", nid)
            if key not in self.info_key:
                iid = info_id if info_id is not None else len(self.info_key)
                self.info_key[key] = iid
                self.info_rows[iid] = {"owner": owner, "nodes": [], "choices": tuple(choices)}
            iid = self.info_key[key]
            row["info"] = iid
            self.info_rows[iid]["nodes"].append(nid)
        self.rows.append(row)
        return nid

    def set_terminal(self, nid: int, outcome: str) -> None:
        self.rows[nid].update(owner=None, outcome=outcome, info=None)

    def build(self) -> Arena:
        nodes = [
            Node(i, r["owner"], r["parent"], r["choice"], r["info"], r["outcome"])
            for i, r in enumerate(self.rows)
        ]
        infos = [
            InfoSet(iid, r["owner"], tuple(r["nodes"]), r["choices"])
            for iid, r in sorted(self.info_rows.items())
        ]
        return Arena(self.n, self.alternatives, nodes, infos)


# --------------------------------------------------------------------------
# structural validation


@dataclass(frozen=True)
class Diagnostic:
    code: str  # "a".."e" for the structural invariants, other codes per checker
    message: str

    def __str__(self) -> str:
        return f"({self.code}) {self.message}"


def validate(arena: Arena) -> list[Diagnostic]:
    """Structural problems of ``arena``; empty when it is a well-formed game form.

    (a) rooted tree, (b) info sets owned consistently, (c) equal choice sets
    within an info set, (d) children in bijection with choices, (e) no info
    set repeated along a path.
    """
    out: list[Diagnostic] = []
    m = len(arena.nodes)
    roots = [z.id for z in arena.nodes if z.parent is None]
    if len(roots) != 1:
        out.append(Diagnostic("a", f"expected one root, found {roots}"))
    for z in arena.nodes:
        if z.parent is not None and not 0 <= z.parent < m:
            out.append(Diagnostic("a", f"node {z.id} has unknown parent {z.parent}"))
    tree_ok = not out
    if tree_ok:
        for z in arena.nodes:
            seen = set()
            w: int | None = z.id
            while w is not None:
                if w in seen:
                    out.append(Diagnostic("a", f"cycle through node {z.id}"))
                    tree_ok = False
                    break
                seen.add(w)
                w = arena.parent[w]
    if arena.nodes and arena.is_terminal(arena.root) and len(arena.nodes) > 1:
        out.append(Diagnostic("a", "root is terminal"))

    members: dict[int, list[int]] = {}
    for z in arena.nodes:
        if z.terminal:
            if z.outcome not in arena.alternatives:
                out.append(Diagnostic("a", f"terminal {z.id} has outcome {z.outcome!r}"))
            if arena.child_list[z.id]:
                out.append(Diagnostic("d", f"terminal {z.id} has children"))
            if z.info_set is not None:
                out.append(Diagnostic("b", f"terminal {z.id} belongs to info set {z.info_set}"))
            continue
        if not 1 <= z.owner <= arena.n:
            out.append(Diagnostic("b", f"node {z.id} owned by unknown agent {z.owner}"))
        I = arena.info_sets.get(z.info_set)
        if I is None:
            out.append(Diagnostic("b", f"node {z.id} has no information set"))
            continue
        members.setdefault(I.id, []).append(z.id)
        if I.owner != z.owner:
            out.append(
                Diagnostic("b", f"info set {I.id} (owner {I.owner}) contains node {z.id} of agent {z.owner}")
            )
        labels = [lab for lab, _ in arena.child_list[z.id]]
        if len(set(labels)) != len(labels):
            out.append(Diagnostic("d", f"node {z.id} repeats a choice label"))
        if set(labels) != set(I.choices) or len(labels) != len(I.choices):
            out.append(
                Diagnostic("d", f"children of node {z.id} do not match choices of info set {I.id}")
            )
    for I in arena.info_sets.values():
        if sorted(I.nodes) != sorted(members.get(I.id, [])):
            out.append(Diagnostic("b", f"info set {I.id} node list disagrees with node records"))
        label_sets = {frozenset(lab for lab, _ in arena.child_list[z]) for z in I.nodes if 0 <= z < m}
        if len(label_sets) > 1:
            out.append(Diagnostic("c", f"nodes of info set {I.id} have different choice sets"))
        if len(set(I.choices)) != len(I.choices):
            out.append(Diagnostic("c", f"info set {I.id} repeats a choice label"))
    if tree_ok:
        for z in arena.terminals():
            seen_sets: set[int] = set()
            for node, _ in arena.history(z):
                iid = arena.info[node]
                if iid in seen_sets:
                    out.append(Diagnostic("e", f"info set {iid} occurs twice on the path to node {z}"))
                    break
                seen_sets.add(iid)
    return out


def info_precedes(arena: Arena, i_prime: int, i: int) -> bool:
    """``I' ≺ I``: every node of ``I'`` strictly precedes some node of ``I``."""
    a = arena.info_sets[i_prime]
    b = arena.info_sets[i]
    return all(any(arena.precedes(zp, z) for z in b.nodes) for zp in a.nodes)


# --------------------------------------------------------------------------
# play and strategies


def play_from(arena: Arena, start: int, profile: Mapping[int, Mapping[int, Label]]) -> int:
    """Terminal node reached when every owner follows ``profile`` from ``start``."""
    z = start
    while arena.owner[z] is not None:
        iid = arena.info[z]
        try:
            label = profile[arena.owner[z]][iid]
        except KeyError:
            raise IncompleteStrategy(f"agent {arena.owner[z]} has no choice at info set {iid}") from None
        z = arena.children[z][label]
    return z


def strategy_count(arena: Arena, i: int) -> int:
    return prod(len(I.choices) for I in arena.info_sets_of(i))


def iter_strategies(arena: Arena, i: int) -> Iterator[Strategy]:
    sets = arena.info_sets_of(i)
    ids = [I.id for I in sets]
    for combo in product(*(I.choices for I in sets)):
        yield dict(zip(ids, combo))


def enumerate_strategies(arena: Arena, i: int, cap: int) -> list[Strategy]:
    if cap <= 0:
        raise ValueError("cap must be positive")
    count = strategy_count(arena, i)
    if count > cap:
        raise SearchSpaceExceeded(count, cap, f"strategies of agent {i}")
    return list(iter_strategies(arena, i))


@dataclass
class TypeStrategyProfile:
    """For every agent and each preference in its domain, a strategy."""

    strategies: dict[int, dict[Preference, Strategy]]

    def strategy(self, i: int, pref: Preference) -> Strategy:
        return self.strategies[i][pref]

    def profile(self, prefs: Sequence[Preference]) -> dict[int, Strategy]:
        return {i: self.strategies[i][prefs[i - 1]] for i in self.strategies}


def truth_telling_profile(arena: Arena, domains: Domains) -> TypeStrategyProfile:
    """At each info set choose the label containing the true preference.

    String labels count as containing a preference when they name its top
    alternative. Where no label qualifies, the smallest label (by
    :func:`label_key`) is chosen.
    """
    out: dict[int, dict[Preference, Strategy]] = {}
    for i, domain in domains.items():
        sets = arena.info_sets_of(i)
        per: dict[Preference, Strategy] = {}
        for pref in domain:
            sigma: Strategy = {}
            for I in sets:
                sigma[I.id] = _truthful_label(I.choices, pref)
            per[pref] = sigma
        out[i] = per
    return TypeStrategyProfile(out)


def _truthful_label(choices: Sequence[Label], pref: Preference) -> Label:
    best = pref.tiers[0]
    for lab in choices:
        if isinstance(lab, str):
            if len(best) == 1 and lab in best:
                return lab
        elif pref in lab:
            return lab
    return min(choices, key=label_key)


def iter_type_profiles(domains: Domains, n: int) -> Iterator[tuple[Preference, ...]]:
    return product(*(domains[i] for i in range(1, n + 1)))


def play_path(arena: Arena, profile: Mapping[int, Mapping[int, Label]]) -> list[int]:
    z = arena.root
    path = [z]
    while arena.owner[z] is not None:
        z = arena.children[z][profile[arena.owner[z]][arena.info[z]]]
        path.append(z)
    return path


# --------------------------------------------------------------------------
# quota games


def build_quota_game(s_o: OrderedPartition, q: Sequence[int]) -> Arena:
    """Game form of the staged quota process for ``(s_o, q)``.

    At step ``k`` the members of block ``k`` vote once each in ascending index
    order; a member's info set pools every node of that step sharing the same
    public history, so same-step votes are unobserved. With ``c`` votes for
    ``{P^x}``: ``c > q_k`` ends in ``x``, ``c < q_k`` ends in ``y``, and ``c ==
    q_k`` moves to the next step (at the last step it ends in ``y``).
    """
    q = check_quotas(s_o, q)
    blocks = [sorted(b) for b in s_o.blocks]
    K = len(blocks)
    b = ArenaBuilder(s_o.n)
    choices = (PX_SET, PY_SET)
    # state: (step, position within block, x-votes this step, id of step start)
    state = {b.add(None, None, owner=blocks[0][0], info_key=(0, blocks[0][0]), choices=choices): (0, 0, 0, 0)}
    queue = deque([0])
    while queue:
        nid = queue.popleft()
        k, j, count, hist = state.pop(nid)
        for label in choices:
            c = count + (label is PX_SET)
            if j + 1 < len(blocks[k]):
                nxt = blocks[k][j + 1]
                cid = b.add(nid, label, owner=nxt, info_key=(hist, nxt), choices=choices)
                state[cid] = (k, j + 1, c, hist)
                queue.append(cid)
            elif c > q[k]:
                b.add(nid, label, outcome="x")
            elif c < q[k] or k == K - 1:
                b.add(nid, label, outcome="y")
            else:
                first = blocks[k + 1][0]
                cid = len(b.rows)
                b.add(nid, label, owner=first, info_key=(cid, first), choices=choices)
                state[cid] = (k + 1, 0, 0, cid)
                queue.append(cid)
    return b.build()


# --------------------------------------------------------------------------
# pruning and relabeling


def _visits(arena: Arena, tsp: TypeStrategyProfile, domains: Domains):
    """Yield ``(type profile, play path)`` for every profile in the domain product."""
    for prefs in iter_type_profiles(domains, arena.n):
        yield prefs, play_path(arena, tsp.profile(prefs))


def prune(arena: Arena, tsp: TypeStrategyProfile, domains: Domains) -> Arena:
    """Keep exactly the nodes on some equilibrium play path.

    Node ids are renumbered preserving order; info set ids are kept, so
    strategies of ``tsp`` stay meaningful on the pruned arena. An info set's
    choices shrink to the labels still present below its retained nodes.
    """
    keep: set[int] = set()
    for _, path in _visits(arena, tsp, domains):
        keep.update(path)
    order = sorted(keep)
    new_id = {old: k for k, old in enumerate(order)}
    nodes = []
    present: dict[int, set] = {}
    for old in order:
        z = arena.nodes[old]
        parent = new_id[z.parent] if z.parent is not None else None
        nodes.append(Node(new_id[old], z.owner, parent, z.choice, z.info_set, z.outcome))
        if z.parent is not None:
            present.setdefault(arena.info[z.parent], set()).add(z.choice)
    infos = []
    for iid, I in sorted(arena.info_sets.items()):
        kept = tuple(new_id[z] for z in I.nodes if z in keep)
        if kept:
            labels = tuple(lab for lab in I.choices if lab in present.get(iid, ()))
            infos.append(InfoSet(iid, I.owner, kept, labels))
    return Arena(arena.n, arena.alternatives, nodes, infos)


def relabel(arena: Arena, tsp: TypeStrategyProfile, domains: Domains) -> Arena:
    """Replace each choice by the set of preferences whose strategies take it
    at an info set they can reach."""
    taken: dict[tuple[int, Label], set[Preference]] = {}
    for prefs, path in _visits(arena, tsp, domains):
        for z, nxt in zip(path, path[1:]):
            i = arena.owner[z]
            taken.setdefault((arena.info[z], arena.nodes[nxt].choice), set()).add(prefs[i - 1])
    mapping: dict[tuple[int, Label], frozenset] = {}
    infos = []
    for iid, I in sorted(arena.info_sets.items()):
        labels = []
        for lab in I.choices:
            prefs = taken.get((iid, lab))
            if not prefs:
                raise EmptyChoiceLabel(f"choice {label_str(lab)} at info set {iid} is never taken")
            mapping[(iid, lab)] = frozenset(prefs)
            labels.append(frozenset(prefs))
        infos.append(InfoSet(iid, I.owner, I.nodes, tuple(labels)))
    nodes = []
    for z in arena.nodes:
        choice = z.choice
        if z.parent is not None:
            choice = mapping[(arena.info[z.parent], z.choice)]
        nodes.append(Node(z.id, z.owner, z.parent, choice, z.info_set, z.outcome))
    return Arena(arena.n, arena.alternatives, nodes, infos)


def round_table_diagnostics(arena: Arena, domains: Domains) -> list[Diagnostic]:
    """Check the round table properties on a relabeled arena.

    (a) choices at an info set are disjoint non-empty preference sets, (b) at a
    first move they partition the agent's domain, (c) later their union is the
    intersection of the agent's earlier choices along the path.
    """
    out: list[Diagnostic] = []
    for I in arena.info_sets.values():
        if any(isinstance(lab, str) or not lab for lab in I.choices):
            out.append(Diagnostic("rt-a", f"info set {I.id} has a label that is not a preference set"))
            continue
        total = sum(len(lab) for lab in I.choices)
        if len(frozenset().union(*I.choices)) != total:
            out.append(Diagnostic("rt-a", f"choices at info set {I.id} overlap"))
    if out:
        return out
    for I in arena.info_sets.values():
        union = frozenset().union(*I.choices)
        for z in I.nodes:
            allowed: frozenset | None = None
            for node, lab in arena.history(z):
                if arena.owner[node] == I.owner:
                    allowed = lab if allowed is None else allowed & lab
            if allowed is None:
                if union != frozenset(domains[I.owner]):
                    out.append(Diagnostic("rt-b", f"first move at info set {I.id} does not partition the domain"))
                    break
            elif union != allowed:
                out.append(Diagnostic("rt-c", f"choices at info set {I.id} do not cover earlier choices at node {z}"))
                break
    return out


# --------------------------------------------------------------------------
# membership in the staged class of game forms


def game_class_diagnostics(arena: Arena, s: Partition, domains: Domains) -> list[Diagnostic]:
    """Reasons ``arena`` fails to be a staged game for partition ``s``.

    From each commonly known history the members of one block each move
    exactly once, simultaneously (one info set per member, pooling exactly
    that step's nodes), with choices partitioning their domain or their
    previously chosen subset. A violation of the singleton-persistence clause
    is reported with its own code ``persist``.
    """
    diags = [Diagnostic("structure", str(d)) for d in validate(arena)]
    if diags:
        return diags
    out: list[Diagnostic] = []

    def step(h: int, chosen: dict[int, frozenset], sizes: dict[int, int]) -> None:
        owner = arena.owner[h]
        block = s.block_of(owner)
        width = len(block)
        region: dict[int, list[int]] = {}
        ends: list[tuple[int, dict[int, frozenset], dict[int, int]]] = []
        stack = [(h, 0, frozenset(), dict(chosen), dict(sizes))]
        while stack:
            z, depth, played, ch, sz = stack.pop()
            if depth == width:
                ends.append((z, ch, sz))
                continue
            i = arena.owner[z]
            if i is None:
                out.append(Diagnostic("step", f"path from node {h} ends at {z} before block {sorted(block)} has moved"))
                continue
            if i not in block or i in played:
                out.append(Diagnostic("step", f"node {z}: agent {i} out of turn in the step starting at {h}"))
                continue
            region.setdefault(i, []).append(z)
            I = arena.info_sets[arena.info[z]]
            if any(isinstance(lab, str) for lab in I.choices):
                out.append(Diagnostic("labels", f"info set {I.id} has non-preference labels"))
                continue
            union = frozenset().union(*I.choices)
            disjoint = sum(len(lab) for lab in I.choices) == len(union)
            expect = ch.get(i, frozenset(domains[i]))
            if not disjoint or union != expect or any(not lab for lab in I.choices):
                out.append(Diagnostic("partition", f"choices at info set {I.id} do not partition {sorted(map(str, expect))}"))
            if sz.get(i) == 1 and tuple(I.choices) != (ch[i],):
                out.append(Diagnostic("persist", f"agent {i} had a single choice before but not at info set {I.id}"))
            for lab, c in arena.child_list[z]:
                ch2 = dict(ch)
                ch2[i] = lab
                sz2 = dict(sz)
                sz2[i] = len(I.choices)
                stack.append((c, depth + 1, played | {i}, ch2, sz2))
        for i, zs in region.items():
            iids = {arena.info[z] for z in zs}
            if len(iids) != 1:
                out.append(Diagnostic("simultaneous", f"agent {i} observes same-step moves after node {h}"))
            elif set(arena.info_sets[iids.pop()].nodes) != set(zs):
                out.append(Diagnostic("simultaneous", f"an info set of agent {i} spans beyond the step at node {h}"))
        for z, ch, sz in ends:
            if not arena.is_terminal(z):
                step(z, ch, sz)

    if arena.is_terminal(arena.root):
        return out
    step(arena.root, {}, {})
    return out


def is_in_game_class(arena: Arena, s: Partition, domains: Domains) -> bool:
    return not game_class_diagnostics(arena, s, domains)


# --------------------------------------------------------------------------
# fixtures and generators

FIGURE1_NODES = {
    "z0": 0, "z1": 1, "z2": 2, "z4": 4, "z3": 5, "z5": 7, "z6": 8,
}  # fmt: skip
FIGURE1_INFO_SETS = {"I1": 0, "I2": 1, "I4": 2, "I3": 3, "I5": 4}


def figure1_game() -> tuple[Arena, TypeStrategyProfile]:
    """Five-agent game form of the worked example, with truth-telling.

    Agent 1 moves at z0; agent 2 at {z1, z2} without seeing 1's move; agent 3
    at z3 (after 1:x, 2:y); agent 4 at z4 (after 1:y, 2:x); agent 5 at
    {z5, z6} without seeing 4's move. Choices are ``"y"`` (left) and ``"x"``.
    """
    b = ArenaBuilder(5)
    ch = ("y", "x")
    z0 = b.add(None, None, owner=1, info_key="I1", choices=ch)
    z1 = b.add(z0, "y", owner=2, info_key="I2", choices=ch)
    z2 = b.add(z0, "x", owner=2, info_key="I2", choices=ch)
    b.add(z1, "y", outcome="y")
    z4 = b.add(z1, "x", owner=4, info_key="I4", choices=ch)
    z3 = b.add(z2, "y", owner=3, info_key="I3", choices=ch)
    b.add(z2, "x", outcome="x")
    z5 = b.add(z4, "y", owner=5, info_key="I5", choices=ch)
    z6 = b.add(z4, "x", owner=5, info_key="I5", choices=ch)
    b.add(z3, "y", outcome="y")
    b.add(z3, "x", outcome="x")
    b.add(z5, "y", outcome="y")
    b.add(z5, "x", outcome="y")
    b.add(z6, "y", outcome="y")
    b.add(z6, "x", outcome="x")
    arena = b.build()
    return arena, truth_telling_profile(arena, binary_domains(5))


def random_arena(
    rng: random.Random,
    n: int,
    max_nodes: int = 12,
    alternatives: Sequence[str] = ("x", "y"),
    max_choices: int = 3,
    pool: float = 0.5,
) -> Arena:
    """Random well-formed arena with at most ``max_nodes`` nodes.

    Info sets merge same-owner, same-arity nodes that never lie on a common
    path, so the result always passes :func:`validate`.
    """
    if max_nodes < 3:
        raise ValueError("need room for a root and two children")
    children: dict[int, int] = {}
    parent = {0: None}
    frontier = [0]
    count = 1
    while frontier:
        z = frontier.pop(rng.randrange(len(frontier)))
        room = max_nodes - count
        if room < 2 or (z != 0 and rng.random() < 0.35):
            continue
        k = rng.randint(2, min(max_choices, room))
        children[z] = k
        for _ in range(k):
            parent[count] = z
            frontier.append(count)
            count += 1
    kids: dict[int, list[int]] = {z: [] for z in parent}
    for z, p in parent.items():
        if p is not None:
            kids[p].append(z)

    def ancestors(z: int) -> set[int]:
        out = set()
        while parent[z] is not None:
            z = parent[z]
            out.add(z)
        return out

    owner = {z: rng.randint(1, n) for z in children}
    groups: list[list[int]] = []
    for z in sorted(children):
        anc = ancestors(z)
        fits = [
            g for g in groups
            if owner[g[0]] == owner[z] and children[g[0]] == children[z]
            and not any(w in anc or z in ancestors(w) for w in g)
        ]  # fmt: skip
        if fits and rng.random() < pool:
            rng.choice(fits).append(z)
        else:
            groups.append([z])
    group_of = {z: gi for gi, g in enumerate(groups) for z in g}
    labels = ["a", "b", "c", "d", "e"]

    # BFS emission
    b = ArenaBuilder(n, alternatives)
    queue = deque([(0, None, None)])
    while queue:
        old, new_parent, lab = queue.popleft()
        if old in children:
            ch = tuple(labels[: children[old]])
            nid = b.add(new_parent, lab, owner=owner[old], info_key=group_of[old], choices=ch)
            for c, l2 in zip(kids[old], ch):
                queue.append((c, nid, l2))
        else:
            b.add(new_parent, lab, outcome=rng.choice(list(alternatives)))
    return b.build()


def random_quota_instance(rng: random.Random, max_n: int = 6) -> tuple[OrderedPartition, tuple[int, ...]]:
    """Random ordered partition of ``1..n`` (``n <= max_n``) with compatible quotas."""
    n = rng.randint(1, max_n)
    agents = list(range(1, n + 1))
    rng.shuffle(agents)
    k = rng.randint(1, n)
    cuts = sorted(rng.sample(range(1, n), k - 1))
    blocks = [agents[a:b] for a, b in zip([0] + cuts, cuts + [n])]
    s_o = OrderedPartition(blocks, n)
    return s_o, rng.choice(list(compatible_quotas(s_o)))
