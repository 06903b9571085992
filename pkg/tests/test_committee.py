"""Exact committee engine: votes, replacement, potential, drift, monotone."""

import random
from fractions import Fraction

import pytest

from admitlab.committee import (
    Committee,
    drift_bound_check,
    shift_lemma_check,
)
from admitlab.adversaries import legal_intervals, sample_accepted_replacement
from admitlab.rng import Rng


def test_rejects_floats():
    with pytest.raises(TypeError):
        Committee([0.1, 0.5], ell=0)
    c = Committee([0, 1, 2], ell=0)
    with pytest.raises(TypeError):
        c.vote_count(1, 0.5)


def test_threshold_formula():
    assert Committee([0, 1, 2], ell=0).threshold == 1
    assert Committee([0, 1, 2], ell=1).threshold == 2
    assert Committee(list(range(11)), ell=3).threshold == 8
    assert Committee(list(range(4)), ell=1).threshold == 3  # even n: ceil(3/2)+1
    with pytest.raises(ValueError):
        Committee([0, 1, 2], ell=2)


def test_vote_count_examples():
    c = Committee([0, 1, 2], ell=0)
    assert c.vote_count(1, 3) == 1
    assert c.vote_count(1, 0) == 2  # y == x_i: everyone ties
    c2 = Committee([0, 10, 20], ell=0)
    assert c2.vote_count(2, Fraction(21, 2)) == 1
    with pytest.raises(IndexError):
        c.vote_count(4, 1)


def test_replace_attempt_examples():
    c = Committee([0, 1, 2], ell=0)
    ok, c2 = c.replace_attempt(1, 3)
    assert ok and c2.values == (1, 2, 3)
    assert c.values == (0, 1, 2)  # snapshot untouched

    c_strict = Committee([0, 1, 2], ell=1)
    ok, same = c_strict.replace_attempt(1, 3)
    assert not ok and same.values == (0, 1, 2)

    ok, c3 = c.replace_attempt(2, 1)  # re-election
    assert ok
    assert c3.values == (0, 1, 2)
    assert c3.ids != c.ids


def test_ids_track_replacements():
    c = Committee([0, 5, 10], ell=0)
    assert c.ids == (1, 2, 3)
    ok, c2 = c.replace_attempt(1, 6)
    assert ok
    assert c2.values == (5, 6, 10)
    assert c2.ids == (2, 4, 3)


def test_potential():
    assert Committee([0, 1, 2], ell=0).potential() == 2
    assert Committee([3, 3, 3], ell=0).potential() == 0
    assert Committee([0, 0, 0, 0, 4], ell=0).potential() == 4
    with pytest.raises(ValueError):
        Committee([0, 1, 2, 3], ell=0).potential()


def test_consensus_monotone_values():
    c = Committee([0, 1, 2], ell=1)
    assert c.consensus_monotone() == 3
    assert c.consensus_monotone_mirror() == -1
    with pytest.raises(ValueError):
        Committee([0, 1], ell=0).consensus_monotone()


def test_shift_lemma_median_unchanged_trivial():
    c = Committee([0, 2, 4, 6, 8], ell=1)
    ok, c2 = c.replace_attempt(1, 1)
    assert ok
    holds, dec, req = shift_lemma_check(c, c2)
    assert holds and req == 0


def test_shift_lemma_hand_fixture_new_median():
    # n=5, ell=1: y becomes the new median (case 1 of the proof)
    c = Committee([0, 4, 5, 6, 10], ell=1)  # median 5, potential 0+1+0+1+5*...
    # replace x_1 = 0 by y = 6 -> profile (4,5,6,6,10), median 6
    ok, c2 = c.replace_attempt(1, 6)
    assert ok
    assert c2.median() == 6
    holds, dec, req = shift_lemma_check(c, c2)
    # S = 5+1+0+1+5 = 12, S' = 2+1+0+0+4 = 7 -> decrease 5
    assert dec == 5
    # 2*sum_{j=k-l+2}^{k} d(x_j,x'_j) + d(x_{k+1},x'_{k+1}), k=2: j range empty
    assert req == 1
    assert holds


def test_shift_lemma_rejects_non_adjacent_states():
    a = Committee([0, 1, 2, 3, 4], ell=1)
    b = Committee([0, 1, 2, 3, 40], ell=1)
    with pytest.raises(ValueError):
        shift_lemma_check(a, b)


def test_drift_bound_initial_state():
    c = Committee([0, 1, 2, 3, 4], ell=1)
    holds, rs, ls = drift_bound_check(c, c)
    assert holds
    # n=5, k=2, ell=1: bound is x'_3 <= x_5 + 2D = 4 + 8 = 12
    assert rs == 12 - 2
    with pytest.raises(ValueError):
        drift_bound_check(Committee([0, 1, 2], ell=0), Committee([0, 1, 2], ell=0))


def test_vote_count_brute_force_agreement():
    rnd = random.Random(77)
    for _ in range(10 ** 4 // 10):
        n = rnd.choice([3, 5, 7, 9, 11])
        vals = sorted(rnd.sample(range(200), n))
        ell = rnd.randrange(0, (n - 1) // 2 + 1)
        c = Committee(vals, ell=ell)
        for _ in range(10):
            i = rnd.randrange(1, n + 1)
            y = rnd.randrange(-50, 260)
            xi = c.opinion(i)
            brute = sum(1 for j, xj in enumerate(c.values, start=1)
                        if j != i and abs(xj - y) <= abs(xj - xi))
            assert c.vote_count(i, y) == brute
            accepted, _ = c.replace_attempt(i, y)
            assert accepted == (brute >= c.threshold)


def test_json_profile_round_trip():
    c = Committee([Fraction(1, 3), Fraction(1, 2), 2], ell=1)
    prof = c.to_json_profile()
    assert prof == ["1/3", "1/2", "2/1"]
    back = Committee.from_json_profile(prof, ell=1)
    assert back.values == c.values


def test_legal_intervals_consensus_shape():
    # consensus: replacing the smallest allows y in [x_1, 2*x_2 - x_1]
    c = Committee.consensus([0, 4, 10])
    ivs = legal_intervals(c, 1)
    assert ivs == [(0, 8)]
    # interior member: only re-election
    ivs2 = legal_intervals(c, 2)
    assert ivs2 == [(4, 4)]


def test_sampled_replacements_always_accepted():
    # None is fine (degenerate legal region for an interior member of a
    # contracting committee); every returned pick must be accepted
    rng = Rng(321)
    c = Committee(sorted(random.Random(5).sample(range(1 << 20), 11)), ell=2)
    accepted = 0
    for _ in range(300):
        pick = sample_accepted_replacement(c, rng)
        if pick is None:
            continue
        i, y = pick
        ok, c = c.replace_attempt(i, y)
        assert ok
        accepted += 1
    assert accepted > 150


def test_consensus_fuzz_monotone_and_range_small():
    # smoke-size version of the exact consensus invariants
    rng = Rng(654)
    c = Committee.consensus([0, 3, 7, 15, 31])
    d = c.diameter
    lo, hi = c.initial_x1 - d, c.initial_xn + d
    m = c.consensus_monotone()
    mm = c.consensus_monotone_mirror()
    for _ in range(2000):
        pick = sample_accepted_replacement(c, rng, members=[1, c.n])
        if pick is None:
            continue
        i, y = pick
        ok, c = c.replace_attempt(i, y)
        assert ok
        assert lo <= y <= hi
        m2 = c.consensus_monotone()
        mm2 = c.consensus_monotone_mirror()
        assert m2 <= m
        assert mm2 >= mm
        m, mm = m2, mm2
