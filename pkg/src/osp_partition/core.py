"""Agents, preferences, coalitions and partitions.

Agents are the integers ``1..n``. Coalitions are handled as frozensets at the
API boundary and as int bit masks (bit ``i - 1`` for agent ``i``) inside the
search loops; :func:`to_mask` and :func:`from_mask` convert between the two.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Iterable, Iterator, Sequence

from .errors import AmbiguousTop, IncompatibleQuotas, InvalidPartition, UnknownAlternative

MAX_AGENTS = 64

Alternative = str
Coalition = frozenset  # frozenset[int]


def to_mask(members: Iterable[int]) -> int:
    m = 0
    for i in members:
        if not 1 <= i <= MAX_AGENTS:
            raise ValueError(f"agent index {i} out of range")
        m |= 1 << (i - 1)
    return m


def from_mask(mask: int) -> frozenset[int]:
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return frozenset(out)


def full_mask(n: int) -> int:
    return (1 << n) - 1


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def subsets_of_size(members: Sequence[int], k: int) -> Iterator[int]:
    """Masks of all ``k``-element subsets of ``members``."""
    for combo in combinations(sorted(members), k):
        yield to_mask(combo)


@dataclass(frozen=True)
class Preference:
    """A weak order given as tiers, best first."""

    tiers: tuple[frozenset[str], ...]
    _rank: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        tiers = tuple(frozenset(t) for t in self.tiers)
        if not tiers or any(not t for t in tiers):
            raise ValueError("tiers must be non-empty")
        seen: set[str] = set()
        for t in tiers:
            if seen & t:
                raise ValueError("tiers overlap")
            seen |= t
        object.__setattr__(self, "tiers", tiers)
        # lower rank = better
        object.__setattr__(self, "_rank", {a: r for r, t in enumerate(tiers) for a in t})

    @classmethod
    def strict(cls, *order: str) -> Preference:
        return cls(tuple(frozenset([a]) for a in order))

    @property
    def alternatives(self) -> frozenset[str]:
        return frozenset(self._rank)

    @property
    def is_strict(self) -> bool:
        return all(len(t) == 1 for t in self.tiers)

    def rank(self, a: str) -> int:
        try:
            return self._rank[a]
        except KeyError:
            raise UnknownAlternative(a) from None

    def __str__(self) -> str:
        return " > ".join("~".join(sorted(t)) for t in self.tiers)

    def sort_key(self) -> tuple:
        return tuple(tuple(sorted(t)) for t in self.tiers)


PX = Preference.strict("x", "y")
PY = Preference.strict("y", "x")
BINARY_DOMAIN: tuple[Preference, ...] = (PX, PY)


def top(pref: Preference) -> str:
    first = pref.tiers[0]
    if len(first) != 1:
        raise AmbiguousTop(f"top tier of {pref} has {len(first)} alternatives")
    return next(iter(first))


def prefers(pref: Preference, a: str, b: str, strict: bool = False) -> bool:
    """``a R b`` (or ``a P b`` when ``strict``)."""
    ra, rb = pref.rank(a), pref.rank(b)
    return ra < rb if strict else ra <= rb


Profile = Sequence[Preference]


def x_supporters(profile: Profile) -> int:
    """Mask of agents whose top is ``x`` in a strict two-alternative profile."""
    m = 0
    for i, p in enumerate(profile):
        if top(p) == "x":
            m |= 1 << i
    return m


def profile_from_mask(n: int, mask: int) -> tuple[Preference, ...]:
    return tuple(PX if mask >> i & 1 else PY for i in range(n))


# --------------------------------------------------------------------------
# partitions


def _canonical_blocks(blocks: Iterable[Iterable[int]]) -> tuple[frozenset[int], ...]:
    bs = [frozenset(b) for b in blocks]
    return tuple(sorted(bs, key=lambda b: min(b) if b else 0))


@dataclass(frozen=True)
class Partition:
    """Unordered partition of ``{1..n}``; blocks sorted by their minimum member."""

    blocks: tuple[frozenset[int], ...]
    n: int

    def __init__(self, blocks: Iterable[Iterable[int]], n: int | None = None):
        bs = _canonical_blocks(blocks)
        if n is None:
            n = max((max(b) for b in bs if b), default=0)
        _check_cover(bs, n)
        object.__setattr__(self, "blocks", bs)
        object.__setattr__(self, "n", n)

    @classmethod
    def finest(cls, n: int) -> Partition:
        return cls([[i] for i in range(1, n + 1)], n)

    @classmethod
    def coarsest(cls, n: int) -> Partition:
        return cls([range(1, n + 1)], n)

    @property
    def k(self) -> int:
        return len(self.blocks)

    def block_of(self, i: int) -> frozenset[int]:
        for b in self.blocks:
            if i in b:
                return b
        raise KeyError(i)

    def masks(self) -> tuple[int, ...]:
        return tuple(to_mask(b) for b in self.blocks)

    def as_lists(self) -> list[list[int]]:
        return [sorted(b) for b in self.blocks]

    def __str__(self) -> str:
        return "{" + ", ".join("{" + ",".join(map(str, sorted(b))) + "}" for b in self.blocks) + "}"


def _check_cover(blocks: Sequence[frozenset[int]], n: int) -> None:
    if not 1 <= n <= MAX_AGENTS:
        raise InvalidPartition(f"agent count {n} outside 1..{MAX_AGENTS}")
    seen: set[int] = set()
    for b in blocks:
        if not b:
            raise InvalidPartition("empty block")
        if seen & b:
            raise InvalidPartition(f"blocks overlap on {sorted(seen & b)}")
        seen |= b
    if seen != set(range(1, n + 1)):
        raise InvalidPartition(f"blocks cover {sorted(seen)}, expected 1..{n}")


@dataclass(frozen=True)
class OrderedPartition:
    blocks: tuple[frozenset[int], ...]
    n: int

    def __init__(self, blocks: Iterable[Iterable[int]], n: int | None = None):
        bs = tuple(frozenset(b) for b in blocks)
        if n is None:
            n = max((max(b) for b in bs if b), default=0)
        _check_cover(bs, n)
        object.__setattr__(self, "blocks", bs)
        object.__setattr__(self, "n", n)

    @property
    def k(self) -> int:
        return len(self.blocks)

    @property
    def partition(self) -> Partition:
        return Partition(self.blocks, self.n)

    def as_lists(self) -> list[list[int]]:
        return [sorted(b) for b in self.blocks]


def check_quotas(s_o: OrderedPartition, q: Sequence[int]) -> tuple[int, ...]:
    """Validate compatibility of ``q`` with ``s_o`` and return it as a tuple."""
    q = tuple(int(v) for v in q)
    if len(q) != s_o.k:
        raise IncompatibleQuotas(f"{len(q)} quotas for {s_o.k} blocks")
    for idx, (qk, b) in enumerate(zip(q, s_o.blocks)):
        last = idx == s_o.k - 1
        if qk < 0 or qk > len(b) or (last and qk >= len(b)):
            bound = f"< {len(b)}" if last else f"<= {len(b)}"
            raise IncompatibleQuotas(f"q_{idx + 1}={qk} must be >= 0 and {bound}")
    return q


def compatible_quotas(s_o: OrderedPartition) -> Iterator[tuple[int, ...]]:
    """Every compatible quota vector, in lexicographic order."""
    sizes = [len(b) for b in s_o.blocks]

    def rec(idx: int, acc: tuple[int, ...]) -> Iterator[tuple[int, ...]]:
        if idx == len(sizes):
            yield acc
            return
        hi = sizes[idx] - 1 if idx == len(sizes) - 1 else sizes[idx]
        for v in range(hi + 1):
            yield from rec(idx + 1, acc + (v,))

    return rec(0, ())


def set_partitions(items: Sequence[Any]) -> Iterator[list[list[Any]]]:
    """All set partitions of ``items`` (each exactly once), as lists of lists."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for sub in set_partitions(rest):
        yield [[first]] + sub
        for j in range(len(sub)):
            yield sub[:j] + [[first] + sub[j]] + sub[j + 1:]


def all_partitions(n: int) -> Iterator[Partition]:
    for p in set_partitions(range(1, n + 1)):
        yield Partition(p, n)


def is_coarser(s: Partition, s_star: Partition) -> bool:
    """True iff every block of ``s_star`` lies inside some block of ``s``."""
    if s.n != s_star.n:
        raise InvalidPartition("partitions over different agent sets")
    return all(any(b <= c for c in s.blocks) for b in s_star.blocks)


def coarsenings(s_star: Partition) -> Iterator[Partition]:
    """Every partition coarser than ``s_star``, including itself and ``{N}``."""
    for grouping in set_partitions(list(s_star.blocks)):
        yield Partition([frozenset().union(*group) for group in grouping], s_star.n)


@dataclass
class Verdict:
    """Outcome of an exhaustive check: a pass, or a fail with a witness."""

    passed: bool
    witness: Any = None
    checked: int = 0

    def __bool__(self) -> bool:
        return self.passed
