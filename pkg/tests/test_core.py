from itertools import permutations, product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from osp_partition.core import (
    PX,
    PY,
    OrderedPartition,
    Partition,
    Preference,
    all_partitions,
    check_quotas,
    coarsenings,
    compatible_quotas,
    from_mask,
    is_coarser,
    prefers,
    set_partitions,
    to_mask,
    top,
)
from osp_partition.errors import AmbiguousTop, IncompatibleQuotas, InvalidPartition, UnknownAlternative

BELL = [1, 1, 2, 5, 15, 52, 203]


def test_top_of_strict_preferences():
    assert top(PX) == "x"
    assert top(PY) == "y"
    assert top(Preference.strict("x")) == "x"


def test_top_rejects_tied_top_tier():
    with pytest.raises(AmbiguousTop):
        top(Preference((frozenset({"x", "y"}),)))


def test_prefers_examples():
    assert prefers(PX, "x", "y")
    assert not prefers(PX, "y", "x", strict=True)
    assert not prefers(PX, "y", "x")
    assert prefers(PY, "x", "x")
    assert not prefers(PY, "x", "x", strict=True)
    with pytest.raises(UnknownAlternative):
        prefers(PX, "x", "z")


def _weak_orders(alts):
    """All weak orders over ``alts`` as tier tuples."""
    for blocks in set_partitions(alts):
        for order in permutations(blocks):
            yield Preference(tuple(frozenset(b) for b in order))


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_prefers_complete_and_transitive(k):
    alts = "abcd"[:k]
    for pref in _weak_orders(alts):
        for a, b in product(alts, repeat=2):
            assert prefers(pref, a, b) or prefers(pref, b, a)
        for a, b, c in product(alts, repeat=3):
            if prefers(pref, a, b) and prefers(pref, b, c):
                assert prefers(pref, a, c)


def test_weak_order_count_is_fubini():
    # ordered Bell numbers 1, 3, 13, 75
    assert [sum(1 for _ in _weak_orders("abcd"[:k])) for k in range(1, 5)] == [1, 3, 13, 75]


def test_masks_round_trip():
    assert to_mask([1, 3]) == 0b101
    assert from_mask(0b101) == frozenset({1, 3})
    with pytest.raises(ValueError):
        to_mask([0])


@given(st.frozensets(st.integers(1, 64)))
def test_mask_round_trip_property(members):
    assert from_mask(to_mask(members)) == members


def test_partition_validation():
    with pytest.raises(InvalidPartition):
        Partition([[1, 2], [2, 3]])
    with pytest.raises(InvalidPartition):
        Partition([[1], [3]])
    with pytest.raises(InvalidPartition):
        Partition([[1], []], 1)
    p = Partition([[3, 4], [1, 2]])
    assert p.as_lists() == [[1, 2], [3, 4]]
    assert p == Partition([[2, 1], [4, 3]])


def test_is_coarser_examples():
    fine = Partition([[1, 2], [3], [4, 5]])
    assert is_coarser(Partition([[1, 2, 3], [4, 5]]), fine)
    assert is_coarser(fine, fine)
    assert not is_coarser(Partition([[1], [2, 3]]), Partition([[1, 2], [3]]))


def test_is_coarser_is_a_partial_order():
    for n in range(1, 6):
        parts = list(all_partitions(n))
        assert len(parts) == BELL[n]
        for a in parts:
            assert is_coarser(a, a)
            for b in parts:
                if is_coarser(a, b) and is_coarser(b, a):
                    assert a == b
        if n <= 4:
            for a, b, c in product(parts, repeat=3):
                if is_coarser(a, b) and is_coarser(b, c):
                    assert is_coarser(a, c)


def test_coarsenings_examples():
    two = list(coarsenings(Partition.finest(2)))
    assert sorted(p.as_lists() for p in two) == [[[1], [2]], [[1, 2]]]
    assert len(list(coarsenings(Partition.finest(3)))) == 5
    assert list(coarsenings(Partition.coarsest(4))) == [Partition.coarsest(4)]


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
def test_coarsenings_count_is_bell(k):
    blocks = [[2 * i + 1, 2 * i + 2] for i in range(k)]
    s = Partition(blocks)
    out = list(coarsenings(s))
    assert len(out) == BELL[k] == len(set(out))
    # brute force: every partition of the agents coarser than s
    if 2 * k <= 8:
        brute = [p for p in all_partitions(2 * k) if is_coarser(p, s)]
        assert set(brute) == set(out)


def test_quota_compatibility():
    s_o = OrderedPartition([[1, 2, 3], [4, 5, 6, 7, 8], [9, 10]])
    assert check_quotas(s_o, [2, 5, 0]) == (2, 5, 0)
    with pytest.raises(IncompatibleQuotas):
        check_quotas(s_o, [2, 5, 2])
    with pytest.raises(IncompatibleQuotas):
        check_quotas(s_o, [4, 5, 0])
    with pytest.raises(IncompatibleQuotas):
        check_quotas(s_o, [2, 5])
    grid = list(compatible_quotas(OrderedPartition([[1, 2], [3]])))
    assert grid == [(0, 0), (1, 0), (2, 0)]
    assert len(list(compatible_quotas(s_o))) == 4 * 6 * 2
