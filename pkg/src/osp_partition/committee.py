"""Committees over two alternatives and the voting rules they induce.

A committee is kept only through its antichain of minimal winning coalitions
(bit masks); every closure query is a subset test against that antichain.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Callable, Iterable, Sequence

from .core import (
    PX,
    PY,
    Partition,
    Preference,
    Verdict,
    from_mask,
    full_mask,
    popcount,
    prefers,
    subsets_of_size,
    to_mask,
    x_supporters,
)
from .errors import ConstantRule, NotEmvr

def antichain(masks: Iterable[int]) -> frozenset[int]:
    ordered = sorted(set(masks), key=popcount)
    kept: list[int] = []
    for m in ordered:
        if not any(k & m == k for k in kept):
            kept.append(m)
    return frozenset(kept)


@dataclass(frozen=True)
class Committee:
    """Monotone family of winning coalitions for ``x``.

    ``minimal`` holds bit masks. A trivial committee (``minimal`` empty, or
    equal to ``{0}`` i.e. containing the empty coalition) describes a constant
    rule; such committees are representable but the characterization
    operations reject them.
    """

    n: int
    minimal: frozenset[int]

    @classmethod
    def from_sets(cls, n: int, coalitions: Iterable[Iterable[int]]) -> Committee:
        return minimalize(n, [to_mask(c) for c in coalitions])

    @property
    def is_trivial(self) -> bool:
        return not self.minimal or 0 in self.minimal

    @property
    def constant_value(self) -> str | None:
        if not self.minimal:
            return "y"
        if 0 in self.minimal:
            return "x"
        return None

    def coalitions(self) -> list[tuple[int, ...]]:
        """Minimal winning coalitions as sorted tuples, in canonical order."""
        return sorted(tuple(sorted(from_mask(m))) for m in self.minimal)

    def set_family(self) -> set[frozenset[int]]:
        return {from_mask(m) for m in self.minimal}

    def __str__(self) -> str:
        return "{" + ", ".join("{" + ",".join(map(str, c)) + "}" for c in self.coalitions()) + "}"


def minimalize(n: int, family: Iterable[int]) -> Committee:
    """Committee whose minimal coalitions are the ⊆-minimal members of ``family``."""
    family = list(family)
    if not family or 0 in family:
        raise ConstantRule("family is empty or contains the empty coalition")
    if any(m >> n for m in family):
        raise ValueError(f"coalition outside agents 1..{n}")
    return Committee(n, antichain(family))


def is_winning(c: Committee, t: int | Iterable[int]) -> bool:
    if not isinstance(t, int):
        t = to_mask(t)
    return any(m & t == m for m in c.minimal)


def dual(c: Committee) -> Committee:
    """Committee for ``y``: minimal transversals of the minimal coalitions for ``x``.

    Berge's incremental construction; exact, intended for ``n`` up to about 20.
    """
    if c.is_trivial:
        raise ConstantRule("dual of a trivial committee")
    transversals = {0}
    for edge in sorted(c.minimal):
        grown = set()
        for t in transversals:
            if t & edge:
                grown.add(t)
            else:
                e = edge
                while e:
                    low = e & -e
                    grown.add(t | low)
                    e ^= low
        transversals = set(antichain(grown))
    return Committee(c.n, frozenset(transversals))


def dummies(c: Committee) -> frozenset[int]:
    used = 0
    for m in c.minimal:
        used |= m
    return from_mask(full_mask(c.n) & ~used)


def emvr_outcome(c: Committee, supporters: int) -> str:
    """Outcome when exactly the agents in mask ``supporters`` report ``P^x``."""
    return "x" if is_winning(c, supporters) else "y"


def emvr_evaluate(c: Committee, profile: Sequence[Preference]) -> str:
    return emvr_outcome(c, x_supporters(profile))


def _count_vector(mask: int, block_masks: Sequence[int]) -> tuple[int, ...]:
    return tuple(popcount(mask & b) for b in block_masks)


def is_anonymous_rel(c: Committee, s: Partition) -> bool:
    """No dummies, and winning depends only on how many members each block contributes."""
    if s.n != c.n:
        raise ValueError("committee and partition over different agent sets")
    if c.is_trivial or dummies(c):
        return False
    blocks = s.masks()
    seen: dict[tuple[int, ...], bool] = {}
    for t in range(1 << c.n):
        key = _count_vector(t, blocks)
        w = is_winning(c, t)
        if seen.setdefault(key, w) != w:
            return False
    return True


def strong_anonymity_quota(c: Committee) -> int | None:
    if c.is_trivial:
        return None
    sizes = {popcount(m) for m in c.minimal}
    if len(sizes) != 1:
        return None
    q = sizes.pop()
    return q if len(c.minimal) == comb(c.n, q) else None


def quota_committee(n: int, q: int) -> Committee:
    """Strongly anonymous committee whose minimal coalitions are all ``q``-subsets."""
    return Committee(n, frozenset(subsets_of_size(range(1, n + 1), q)))


# --------------------------------------------------------------------------
# arbitrary two-alternative rules


@dataclass(frozen=True)
class ScfTable:
    """A rule on ``{P^x, P^y}^N``; ``outcomes[mask]`` is the choice when the
    agents in ``mask`` report ``P^x`` and everyone else ``P^y``."""

    n: int
    outcomes: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.outcomes) != 1 << self.n:
            raise ValueError(f"table has {len(self.outcomes)} rows, expected {1 << self.n}")
        if set(self.outcomes) - {"x", "y"}:
            raise ValueError("outcomes must be 'x' or 'y'")

    @classmethod
    def from_function(cls, n: int, fn: Callable[[int], str]) -> ScfTable:
        return cls(n, tuple(fn(m) for m in range(1 << n)))

    @classmethod
    def from_committee(cls, c: Committee) -> ScfTable:
        return cls.from_function(c.n, lambda m: emvr_outcome(c, m))

    def __call__(self, profile: Sequence[Preference]) -> str:
        return self.outcomes[x_supporters(profile)]


@dataclass(frozen=True)
class SpWitness:
    agent: int
    supporters: int  # true profile, as the mask of P^x reporters
    misreport: Preference
    truthful_outcome: str
    manipulated_outcome: str


def is_sp(f: ScfTable) -> Verdict:
    """Brute-force strategy-proofness over all profiles and unilateral misreports.

    Profiles are scanned from all-``P^x`` downwards, so the witness is the
    first manipulation in that order.
    """
    checked = 0
    for mask in reversed(range(1 << f.n)):
        for i in range(f.n):
            bit = 1 << i
            truth = PX if mask & bit else PY
            lie = PY if mask & bit else PX
            checked += 1
            a, b = f.outcomes[mask], f.outcomes[mask ^ bit]
            if prefers(truth, b, a, strict=True):
                return Verdict(False, SpWitness(i + 1, mask, lie, a, b), checked)
    return Verdict(True, None, checked)


def extract_committee(f: ScfTable) -> Committee:
    """Recover the committee inducing ``f``.

    Raises :class:`NotEmvr` when the family of coalitions electing ``x`` is not
    monotone. Constant tables yield a trivial committee (check ``is_trivial``).
    """
    winning = [m for m in range(1 << f.n) if f.outcomes[m] == "x"]
    wset = set(winning)
    for m in winning:
        for i in range(f.n):
            if not m >> i & 1 and (m | 1 << i) not in wset:
                raise NotEmvr(f"{sorted(from_mask(m))} elects x but adding agent {i + 1} does not")
    if not winning:
        return Committee(f.n, frozenset())
    if 0 in wset:
        return Committee(f.n, frozenset({0}))
    return minimalize(f.n, winning)


EXAMPLE1_COMMITTEE = Committee.from_sets(5, [{1, 2}, {1, 3}, {2, 4, 5}])
