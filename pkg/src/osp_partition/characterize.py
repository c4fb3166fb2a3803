"""Which anonymous two-alternative committees admit staged quota games.

A committee anonymous relative to ``s`` is fully described by a boolean table
over count vectors ``(|T ∩ S_1|, ..., |T ∩ S_K|)``. The committee generated by
``(S^o, Q)`` wins exactly on the vectors that, read in the order ``S^o``, are
lexicographically greater than ``Q``. The decision search screens each
candidate against the count table and confirms hits with the generator.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, permutations, product
from typing import Iterator, Sequence

from .committee import (
    Committee,
    antichain,
    dummies,
    is_anonymous_rel,
    is_winning,
    strong_anonymity_quota,
)
from .core import (
    OrderedPartition,
    Partition,
    Verdict,
    check_quotas,
    compatible_quotas,
    popcount,
    subsets_of_size,
    to_mask,
)
from .errors import NotAntichain, NotOsp, PreconditionViolated, SearchSpaceExceeded
from .game import Arena, binary_domains, build_quota_game, truth_telling_profile
from .verify import osp_implements

MAX_BLOCKS = 10


def generate_quota_committee(s_o: OrderedPartition, q: Sequence[int]) -> Committee:
    """Minimal winning coalitions of the quota game for ``(s_o, q)``.

    Level ``k`` joins a ``q_t``-subset of every earlier block with a
    ``(q_k + 1)``-subset of block ``k``; it is empty when ``q_k = |S_k|``.
    """
    return _generate(s_o, check_quotas(s_o, q))


@lru_cache(maxsize=65536)
def _generate(s_o: OrderedPartition, q: tuple[int, ...]) -> Committee:
    masks: set[int] = set()
    prefixes = [0]
    for block, qk in zip(s_o.blocks, q):
        if qk < len(block):
            for head in subsets_of_size(block, qk + 1):
                masks.update(p | head for p in prefixes)
        prefixes = [p | t for p in prefixes for t in subsets_of_size(block, qk)]
    family = frozenset(masks)
    if antichain(family) != family:
        raise NotAntichain(f"generator output for {s_o.as_lists()}, {list(q)} is not an antichain")
    return Committee(s_o.n, family)


def _count_table(c: Committee, s: Partition) -> dict[tuple[int, ...], bool]:
    blocks = [sorted(b) for b in s.blocks]
    table = {}
    for v in product(*(range(len(b) + 1) for b in blocks)):
        rep = to_mask(m for b, k in zip(blocks, v) for m in b[:k])
        table[v] = is_winning(c, rep)
    return table


def _lex_matches(table: dict, order: Sequence[int], q: Sequence[int]) -> bool:
    q = tuple(q)
    for v, win in table.items():
        if (tuple(v[k] for k in order) > q) != win:
            return False
    return True


def _derived_quotas(c: Committee, s: Partition, order: Sequence[int]) -> list[tuple[int, ...]]:
    """Quotas read off minimal coalitions meeting the last block of the order."""
    masks = s.masks()
    last = masks[order[-1]]
    out = set()
    for m in c.minimal:
        if m & last:
            v = [popcount(m & masks[k]) for k in order]
            v[-1] -= 1
            out.add(tuple(v))
    return sorted(out)


def _compatible(sizes: Sequence[int], q: Sequence[int]) -> bool:
    last = len(sizes) - 1
    return all(0 <= qk <= m - (k == last) for k, (qk, m) in enumerate(zip(q, sizes)))


def _split(by_value: dict[int, set], size: int, last: bool) -> int | None:
    """Quota for the next block given the outcomes seen at each of its counts.

    Counts below the quota must always lose and counts above it always win;
    at the last block the quota count itself loses, elsewhere it is the one
    count left undecided.
    """
    kinds = [by_value[c] for c in range(size + 1)]
    if last:
        t = -1
        while t + 1 <= size and kinds[t + 1] == {False}:
            t += 1
        if t < 0 or t == size or any(k != {True} for k in kinds[t + 1:]):
            return None
        return t
    mixed = [c for c, k in enumerate(kinds) if len(k) == 2]
    if len(mixed) != 1:
        return None
    c = mixed[0]
    if any(k != {False} for k in kinds[:c]) or any(k != {True} for k in kinds[c + 1:]):
        return None
    return c


def _feasible_orders(table: dict, sizes: Sequence[int]) -> Iterator[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Orderings, in permutation order, whose count rule can reproduce ``table``,
    each with its forced quotas."""
    K = len(sizes)

    def rec(prefix: list[int], q: list[int], rows: list) -> Iterator:
        if len(prefix) == K:
            yield tuple(prefix), tuple(q)
            return
        for k in range(K):
            if k in prefix:
                continue
            by_value: dict[int, set] = {c: set() for c in range(sizes[k] + 1)}
            for v, win in rows:
                by_value[v[k]].add(win)
            qk = _split(by_value, sizes[k], len(prefix) == K - 1)
            if qk is not None:
                rest = [(v, win) for v, win in rows if v[k] == qk]
                yield from rec(prefix + [k], q + [qk], rest)

    yield from rec([], [], list(table.items()))


def _try_order(c: Committee, s: Partition, table: dict, order, candidates) -> tuple[int, ...] | None:
    sizes = [len(s.blocks[k]) for k in order]
    tried = set()
    for q in candidates:
        if q in tried or not _compatible(sizes, q):
            continue
        tried.add(q)
        if _lex_matches(table, order, q):
            s_o = OrderedPartition([s.blocks[k] for k in order], s.n)
            if generate_quota_committee(s_o, q).minimal != c.minimal:
                raise AssertionError("count-table screen disagrees with the generator")
            return q
    return None


def _search_full(args) -> tuple[int, ...] | None:
    c, s, table, order, use_derived = args
    s_o = OrderedPartition([s.blocks[k] for k in order], s.n)
    head = _derived_quotas(c, s, order) if use_derived else []
    return _try_order(c, s, table, order, head + list(compatible_quotas(s_o)))


def decide_osp_anonymous(
    c: Committee,
    s: Partition,
    use_derived: bool = True,
    grid: str = "pruned",
    jobs: int = 1,
) -> tuple[OrderedPartition, tuple[int, ...]] | None:
    """An ordering of ``s`` and compatible quotas generating ``c``, if any.

    The first success in permutation order of the canonical blocks is
    returned. For each ordering the quotas suggested by the minimal coalitions
    are tried before the grid of compatible quotas. ``grid="full"`` visits all
    ``K!`` orderings and the whole grid (fanned out over ``jobs`` processes);
    the default ``"pruned"`` abandons an ordering prefix as soon as the count
    table rules it out and then needs just one grid point. Both give the same
    answer. Raises :class:`PreconditionViolated` unless ``c`` is anonymous
    relative to ``s``.
    """
    if grid not in ("pruned", "full"):
        raise ValueError(f"unknown grid mode {grid!r}")
    if not is_anonymous_rel(c, s):
        raise PreconditionViolated("committee is not anonymous relative to the partition")
    if s.k > MAX_BLOCKS:
        raise SearchSpaceExceeded(s.k, MAX_BLOCKS, "blocks")
    table = _count_table(c, s)
    if grid == "pruned":
        sizes = [len(b) for b in s.blocks]
        for order, forced in _feasible_orders(table, sizes):
            head = _derived_quotas(c, s, order) if use_derived else []
            q = _try_order(c, s, table, order, head + [forced])
            if q is not None:
                return OrderedPartition([s.blocks[k] for k in order], s.n), q
        return None
    orders = list(permutations(range(s.k)))
    tasks = [(c, s, table, order, use_derived) for order in orders]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_search_full, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        results = []
        for t in tasks:
            results.append(_search_full(t))
            if results[-1] is not None:
                break
    for order, q in zip(orders, results):
        if q is not None:
            return OrderedPartition([s.blocks[k] for k in order], s.n), q
    return None


def decide_osp_strong(c: Committee, s: Partition) -> bool:
    """Closed-form answer for strongly anonymous committees with quota ``q``."""
    q = strong_anonymity_quota(c)
    if q is None:
        raise PreconditionViolated("committee is not strongly anonymous")
    n = c.n
    return q in (1, n) or s.k == 1 or (s.k == 2 and len(s.blocks[0]) in (1, n - 1))


def lemma2_conditions(c: Committee, prefix: Sequence[Sequence[int]]) -> tuple[bool, bool]:
    """Evaluate the two necessary conditions for the block prefix ``(S_1..S_k)``.

    (i) minimal coalitions whose trace on ``S_1 ∪ .. ∪ S_k`` loses all meet
    ``S_k`` in the same number of agents; (ii) adding any further member of
    ``S_k`` to such a trace makes it win.
    """
    if not prefix:
        raise ValueError("empty prefix")
    last = to_mask(prefix[-1])
    union = 0
    for b in prefix:
        union |= to_mask(b)
    losing = [m for m in sorted(c.minimal) if not is_winning(c, m & union)]
    cond_i = len({popcount(m & last) for m in losing}) <= 1
    cond_ii = True
    for m in losing:
        rest = last & ~m
        while rest:
            low = rest & -rest
            rest ^= low
            if not is_winning(c, (m & union) | low):
                cond_ii = False
    return cond_i, cond_ii


@dataclass
class Certificate:
    ordering: OrderedPartition
    quotas: tuple[int, ...]
    arena: Arena
    report: Verdict


def certify(c: Committee, s: Partition, cap: int | None = None, jobs: int = 1) -> Certificate:
    """Decide, build the quota game, and verify it against the committee's rule."""
    found = decide_osp_anonymous(c, s, jobs=jobs)
    if found is None:
        raise NotOsp("no ordering and quotas generate the committee")
    s_o, q = found
    arena = build_quota_game(s_o, q)
    tsp = truth_telling_profile(arena, binary_domains(c.n))
    report = osp_implements(arena, tsp, c, s, cap, jobs=jobs)
    return Certificate(s_o, q, arena, report)


# --------------------------------------------------------------------------
# enumeration of anonymous committees


def _upsets(sizes: Sequence[int]) -> Iterator[frozenset[tuple[int, ...]]]:
    """Every up-set of the product of chains ``[0..m_k]``."""
    vectors = sorted(product(*(range(m + 1) for m in sizes)), key=lambda v: -sum(v))
    K = len(sizes)

    def rec(idx: int, chosen: set) -> Iterator[frozenset]:
        if idx == len(vectors):
            yield frozenset(chosen)
            return
        v = vectors[idx]
        ups = [v[:k] + (v[k] + 1,) + v[k + 1:] for k in range(K) if v[k] < sizes[k]]
        if all(u in chosen for u in ups):
            chosen.add(v)
            yield from rec(idx + 1, chosen)
            chosen.discard(v)
        yield from rec(idx + 1, chosen)

    yield from rec(0, set())


def committee_from_counts(s: Partition, up: frozenset) -> Committee:
    """Committee winning on exactly the count vectors in the up-set ``up``."""
    blocks = [sorted(b) for b in s.blocks]
    K = len(blocks)
    minimal = [
        v for v in up
        if not any(v[k] > 0 and v[:k] + (v[k] - 1,) + v[k + 1:] in up for k in range(K))
    ]  # fmt: skip
    masks = set()
    for v in minimal:
        for parts in product(*(combinations(b, k) for b, k in zip(blocks, v))):
            masks.add(to_mask(a for part in parts for a in part))
    return Committee(s.n, frozenset(masks))


def anonymous_committees(s: Partition) -> Iterator[Committee]:
    """Every non-trivial, dummy-free committee anonymous relative to ``s``."""
    sizes = [len(b) for b in s.blocks]
    zero = tuple(0 for _ in sizes)
    for up in _upsets(sizes):
        if not up or zero in up:
            continue
        c = committee_from_counts(s, up)
        if not dummies(c):
            yield c
