"""Acceptance criteria, one test each, at their stated bounds."""

import random
from functools import lru_cache

from osp_partition.characterize import (
    anonymous_committees,
    certify,
    decide_osp_anonymous,
    decide_osp_strong,
    generate_quota_committee,
    lemma2_conditions,
)
from osp_partition.committee import EXAMPLE1_COMMITTEE, ScfTable, emvr_evaluate, extract_committee, is_sp, quota_committee
from osp_partition.core import PX, PY, OrderedPartition, Partition, Preference, all_partitions, profile_from_mask
from osp_partition.errors import NotEmvr
from osp_partition.game import (
    binary_domains,
    build_quota_game,
    figure1_game,
    iter_strategies,
    random_arena,
    random_quota_instance,
    truth_telling_profile,
)
from osp_partition.verify import (
    coarsening_check,
    induces,
    is_obviously_dominant,
    is_weakly_dominant_brute,
    osp_implements,
    replay_witness,
    theorem1_property,
)

S_STAR = Partition([[1, 2], [3], [4, 5]])
INDIFFERENT = Preference((frozenset({"x", "y"}),))


def quota_instances(seed, count, max_n=6):
    rng = random.Random(seed)
    for _ in range(count):
        s_o, q = random_quota_instance(rng, max_n)
        arena = build_quota_game(s_o, q)
        domains = binary_domains(s_o.n)
        yield s_o, q, arena, domains, truth_telling_profile(arena, domains)


@lru_cache(maxsize=None)
def decided_committees(max_n=5):
    """Every (committee, partition, decision) with an anonymous committee, n <= max_n."""
    out = []
    for n in range(1, max_n + 1):
        for s in all_partitions(n):
            for c in anonymous_committees(s):
                out.append((c, s, decide_osp_anonymous(c, s)))
    return out


def test_criterion_01_three_block_golden(criterion):
    with criterion(1, "Generator golden, three blocks (2,5,0)", limit=1.0) as note:
        s_o = OrderedPartition([[1, 2, 3], [4, 5, 6, 7, 8], [9, 10]])
        c = generate_quota_committee(s_o, (2, 5, 0))
        expected = {
            frozenset(m)
            for m in (
                {1, 2, 3},
                {1, 2, 4, 5, 6, 7, 8, 9},
                {1, 2, 4, 5, 6, 7, 8, 10},
                {1, 3, 4, 5, 6, 7, 8, 9},
                {1, 3, 4, 5, 6, 7, 8, 10},
                {2, 3, 4, 5, 6, 7, 8, 9},
                {2, 3, 4, 5, 6, 7, 8, 10},
            )
        }
        assert c.set_family() == expected
        note["detail"] = "7 minimal coalitions match"


def test_criterion_02_fixture_golden(criterion):
    with criterion(2, "Five-agent fixture golden", limit=5.0) as note:
        arena, tsp = figure1_game()
        v = induces(arena, tsp, EXAMPLE1_COMMITTEE)
        assert v and v.checked == 32
        assert osp_implements(arena, tsp, EXAMPLE1_COMMITTEE, S_STAR)
        finest = Partition.finest(5)
        v = osp_implements(arena, tsp, EXAMPLE1_COMMITTEE, finest)
        assert not v
        assert replay_witness(arena, finest, v.witness)
        note["detail"] = f"finest fails at agent {v.witness.agent}, witness replays"


def test_criterion_03_coarsenings(criterion):
    with criterion(3, "Coarsenings keep OSP (fixture + 50 quota games)", limit=120.0) as note:
        arena, tsp = figure1_game()
        v = coarsening_check(arena, tsp, EXAMPLE1_COMMITTEE, S_STAR)
        assert v, v.witness
        total = v.checked
        for s_o, q, g, _, g_tsp in quota_instances(303, 50):
            v = coarsening_check(g, g_tsp, generate_quota_committee(s_o, q), s_o.partition)
            assert v, (s_o.as_lists(), q, v.witness)
            total += v.checked
        note["detail"] = f"{total} partitions verified"


def test_criterion_04_soundness(criterion):
    with criterion(4, "Decided orderings certify (all partitions, n <= 5)", limit=600.0) as note:
        successes = 0
        for c, s, found in decided_committees():
            if found is None:
                continue
            cert = certify(c, s)
            assert cert.report, (c.coalitions(), s.as_lists(), cert.report.witness)
            assert (cert.ordering, cert.quotas) == found
            successes += 1
        note["detail"] = f"{successes} certificates of {len(decided_committees())} committees"


def test_criterion_05_strong_equals_general(criterion):
    with criterion(5, "Closed form for quota committees equals search (n <= 6)", limit=600.0) as note:
        cases = 0
        for n in range(1, 7):
            for q in range(1, n + 1):
                c = quota_committee(n, q)
                for s in all_partitions(n):
                    assert decide_osp_strong(c, s) == (decide_osp_anonymous(c, s) is not None), (n, q, s.as_lists())
                    cases += 1
        note["detail"] = f"{cases} cases agree"


def _sp_matches_extraction(f):
    sp = bool(is_sp(f))
    try:
        c = extract_committee(f)
    except NotEmvr:
        return not sp
    for m in range(1 << f.n):
        expected = c.constant_value if c.is_trivial else emvr_evaluate(c, profile_from_mask(f.n, m))
        assert expected == f.outcomes[m]
    return sp


def test_criterion_06_sp_iff_committee(criterion):
    with criterion(6, "Strategy-proof iff committee (n=3 all, n=4 sampled)") as note:
        sp = 0
        for bits in range(256):
            f = ScfTable(3, tuple("x" if bits >> m & 1 else "y" for m in range(8)))
            assert _sp_matches_extraction(f), f.outcomes
            sp += bool(is_sp(f))
        rng = random.Random(606)
        sp4 = 0
        for _ in range(10_000):
            f = ScfTable(4, tuple(rng.choice("xy") for _ in range(16)))
            assert _sp_matches_extraction(f), f.outcomes
            sp4 += bool(is_sp(f))
        note["detail"] = f"{sp} of 256 at n=3 and {sp4} of 10000 at n=4 strategy-proof"


def test_criterion_07_grand_coalition_is_weak_dominance(criterion):
    with criterion(7, "Obvious dominance for one block equals weak dominance") as note:
        rng = random.Random(707)
        checks = dominant = 0
        for _ in range(100):
            n = rng.randint(1, 4)
            arena = random_arena(rng, n, max_nodes=12)
            whole = Partition.coarsest(n)
            for i in range(1, n + 1):
                for sigma in iter_strategies(arena, i):
                    for pref in (PX, PY, INDIFFERENT):
                        od = bool(is_obviously_dominant(arena, whole, i, pref, sigma))
                        assert od == is_weakly_dominant_brute(arena, i, pref, sigma)
                        checks += 1
                        dominant += od
        note["detail"] = f"{checks} checks, {dominant} dominant"


def test_criterion_08_truth_telling_in_quota_games(criterion):
    with criterion(8, "Truth-telling obviously dominant in 100 quota games") as note:
        checks = 0
        for s_o, q, g, _, tsp in quota_instances(808, 100):
            for i in range(1, s_o.n + 1):
                for pref in (PX, PY):
                    v = is_obviously_dominant(g, s_o.partition, i, pref, tsp.strategy(i, pref))
                    assert v, (s_o.as_lists(), q, i, v.witness)
                    checks += 1
        note["detail"] = f"{checks} agent-preference checks"


def test_criterion_09_necessary_conditions(criterion):
    with criterion(9, "Necessary conditions hold along every found ordering") as note:
        prefixes = 0
        for c, _, found in decided_committees():
            if found is None:
                continue
            blocks = found[0].blocks
            for k in range(1, len(blocks) + 1):
                assert lemma2_conditions(c, blocks[:k]) == (True, True), (c.coalitions(), found, k)
                prefixes += 1
        note["detail"] = f"{prefixes} prefixes"


def test_criterion_10_weak_implies_obvious(criterion):
    with criterion(10, "Weak dominance implies obvious dominance in 50 quota games") as note:
        for s_o, q, g, domains, tsp in quota_instances(1010, 50):
            c = generate_quota_committee(s_o, q)
            v = theorem1_property(g, s_o.partition, tsp, c, domains)
            assert v, (s_o.as_lists(), q, v.witness)
        note["detail"] = "50 games pass"
