"""Statistical validators: ECDF/KS oracles, density monitors, MC probes."""

import math
import random

import numpy as np
import pytest

from admitlab.engine import Checkpoint, run
from admitlab.group import GroupState
from admitlab.oracles import f_majority, majority_context, triangle_cdf
from admitlab.rng import Rng
from admitlab.rules import RuleSpec
from admitlab.stats import (
    check_density_bounds,
    convergence_rate_fit,
    default_delta,
    density_profile,
    ecdf,
    estimate_interval_accept_prob,
    ks_distance,
    quantile_progress_test,
    smoothness_report,
)


# ------------------------------------------------------------------- ECDF

def test_ecdf_single_jump():
    f = ecdf([0.5])
    assert f(0.49) == 0.0
    assert f(0.5) == 1.0
    assert f(0.6) == 1.0


def test_ecdf_two_points():
    f = ecdf([0.2, 0.8])
    assert f(0.2) == 0.5
    assert f(0.79) == 0.5
    assert f(0.8) == 1.0
    with pytest.raises(ValueError):
        ecdf([])


def test_ecdf_matches_naive():
    rnd = random.Random(1)
    xs = [rnd.random() for _ in range(1000)]
    f = ecdf(xs)
    for t in [0.0, 0.1, 0.5, 0.77, 1.0]:
        naive = sum(x <= t for x in xs) / len(xs)
        assert f(t) == naive


# --------------------------------------------------------------------- KS

def test_ks_single_point_vs_triangle():
    assert ks_distance([0.5], triangle_cdf) == pytest.approx(0.5)


def test_ks_quantile_transform_construction():
    # samples placed exactly at triangle quantiles of ranks (i-0.5)/n
    n = 10 ** 4

    def tri_inverse(u):
        if u <= 0.5:
            return math.sqrt(u / 2.0)
        return 1.0 - math.sqrt((1.0 - u) / 2.0)

    xs = [tri_inverse((i - 0.5) / n) for i in range(1, n + 1)]
    assert ks_distance(xs, triangle_cdf) <= 1e-4 + 0.5 / n


def test_ks_uniform_vs_triangle():
    # sup |x - H(x)| = 0.125 at x = 1/4
    rng = Rng(100)
    xs = rng.uniform_block(10 ** 4)
    d = ks_distance(xs, triangle_cdf)
    assert abs(d - 0.125) < 0.02


def test_ks_matches_naive_two_sided():
    rnd = random.Random(2)
    for n in (1, 2, 17, 301, 1000):
        xs = [rnd.random() for _ in range(n)]
        d = ks_distance(xs, triangle_cdf)
        sx = sorted(xs)
        naive = 0.0
        for i, x in enumerate(sx):
            naive = max(naive,
                        abs((i + 1) / n - triangle_cdf(x)),
                        abs(i / n - triangle_cdf(x)))
        assert d == pytest.approx(naive, abs=1e-15)


# ---------------------------------------------------------------- density

def test_density_profile_counts_sum_to_k():
    rng = Rng(3)
    g = GroupState(rng.uniform_block(5000))
    prof = density_profile(g, 0.1)
    assert prof.counts.sum() == g.size == prof.k
    assert len(prof.counts) == 10
    with pytest.raises(ValueError):
        density_profile(g, 0.0)


def test_density_profile_uniform_concentration():
    # binomial concentration: each of 10 segments near 1000 of 10^4
    rng = Rng(4)
    g = GroupState(rng.uniform_block(10 ** 4))
    prof = density_profile(g, 0.1)
    assert all(abs(c - 1000) < 150 for c in prof.counts)


def test_density_profile_attached_verdicts():
    rng = Rng(41)
    g = GroupState(rng.uniform_block(10 ** 4))
    prof = density_profile(g, 0.1, c1_prime=0.5, c2_prime=2.0)
    # widths 0.1/0.2/0.4 aligned to the grid: 10 + 9 + 7 windows
    assert len(prof.verdicts) == 26
    assert prof.all_within_bounds
    tight = density_profile(g, 0.1, c1_prime=0.5, c2_prime=0.5)
    assert not tight.all_within_bounds


def test_density_profile_point_mass_flags_upper():
    g = GroupState([0.35] * 500)
    prof = density_profile(g, 0.1)
    assert prof.counts[3] == 500
    verdict = check_density_bounds(g, widths=[0.1], lower_per_len=0.0,
                                   upper_per_len=7 * g.size)
    # one window holds everything: upper bound 0.7*k < k flags it
    assert not verdict.passed
    assert any(c == 500 for _, _, c, _, _ in verdict.violations)


def test_default_delta():
    assert default_delta(10 ** 5) == pytest.approx(10 ** -0.5)


def test_check_density_bounds_window_membership():
    g = GroupState([0.05, 0.15, 0.25, 0.35, 0.45, 0.55, 0.65, 0.75, 0.85, 0.95])
    v = check_density_bounds(g, widths=[0.2], lower_per_len=5.0,
                             upper_per_len=15.0, align=0.1)
    # every 0.2 window holds exactly 2 members: bounds 1 <= 2 <= 3
    assert v.passed
    assert v.checked == 9


# -------------------------------------------- frozen-summary MC estimates

def test_interval_accept_prob_majority_symmetry():
    est, se = estimate_interval_accept_prob(
        RuleSpec("majority"), 0.5, (0.0, 0.5), 200000, Rng(5))
    assert abs(est - 0.5) < 3 * se + 1e-9


def test_interval_accept_prob_majority_edge_bounds():
    # last interval of length delta: between delta^2 and 2*delta
    delta = 0.05
    est, se = estimate_interval_accept_prob(
        RuleSpec("majority"), 0.5, (1 - delta, 1.0), 200000, Rng(6))
    assert delta ** 2 - 3 * se <= est <= 2 * delta + 3 * se


def test_interval_accept_prob_veto_edge_bounds():
    delta = 0.05
    est, se = estimate_interval_accept_prob(
        RuleSpec("veto", r=0.25), 0.75, (1 - delta, 1.0), 200000, Rng(7))
    assert delta ** 2 - 3 * se <= est <= 4 * delta + 3 * se


def test_interval_estimates_tie_to_oracle():
    # P(admitted < q) with median frozen at q equals f_majority(q)
    for q in (0.3, 0.5, 0.7):
        est, se = estimate_interval_accept_prob(
            RuleSpec("majority"), q, (0.0, q), 300000, Rng(8))
        assert abs(est - f_majority(q)) < 3 * se + 1e-9


def test_interval_accept_prob_validation():
    with pytest.raises(ValueError):
        estimate_interval_accept_prob(RuleSpec("majority"), 0.5, (0, 1), 0, Rng(9))


# ------------------------------------------------------------- smoothness

def test_smoothness_majority_small():
    rep = smoothness_report(RuleSpec("majority"), [0.3, 0.5, 0.7],
                            [0.05], 150000, Rng(10))
    assert rep.passed
    assert rep.f_increasing
    assert rep.c1 == 1.0 and rep.c2 == 2.0


def test_smoothness_veto_small():
    rep = smoothness_report(RuleSpec("veto", r=0.25), [0.65, 0.75, 0.85],
                            [0.05], 150000, Rng(11))
    assert rep.passed
    assert rep.c2 == 4.0


def test_smoothness_veto_flat_below_half():
    # non-smooth regime: f is constant 1/2 for q < 1/2
    rep = smoothness_report(RuleSpec("veto", r=0.75), [0.2, 0.3, 0.4],
                            [0.05], 100000, Rng(12))
    vals = [b for (_, b, _) in rep.f_hat]
    assert all(abs(v - 0.5) < 0.01 for v in vals)
    assert not all(b1 > b0 + 0.01 for b0, b1 in zip(vals, vals[1:]))


def test_smoothness_validation():
    with pytest.raises(ValueError):
        smoothness_report(RuleSpec("majority"), [], [0.1], 100, Rng(13))


# -------------------------------------------------------- progress test

def test_progress_preconditions_rejected():
    rule = RuleSpec("majority")
    ctx = majority_context()
    with pytest.raises(ValueError):
        quantile_progress_test(rule, ctx, 0.0, 0.001, 100, 5, Rng(14))
    # g_r(gap)/2 > c2*sigma fails: gap=0.1 gives g_r=0.02, need sigma < 0.005
    with pytest.raises(ValueError) as err:
        quantile_progress_test(rule, ctx, 0.1, 0.006, 100, 5, Rng(15))
    assert "c2*sigma" in str(err.value)
    # sigma >= gap
    with pytest.raises(ValueError):
        quantile_progress_test(rule, ctx, 0.1, 0.2, 100, 5, Rng(16))


def test_progress_precondition_hand_values():
    # hand-computed: g_r(0.1) = 0.02, g_r(0.098) = 0.019208 > 0.01 > 2*0.002
    ctx = majority_context()
    from admitlab.oracles import gap_functions
    assert gap_functions(ctx, 0.1).g_r == pytest.approx(0.02)
    assert gap_functions(ctx, 0.098).g_r == pytest.approx(0.019208)


def test_progress_smoke_right_and_left():
    # reduced-size smoke; the committed fixture runs at t=5000, 200 trials
    rule = RuleSpec("majority")
    ctx = majority_context()
    res = quantile_progress_test(rule, ctx, 0.1, 0.002, 3000, 20, Rng(17))
    assert res.pass_fraction >= 0.75
    res_l = quantile_progress_test(rule, ctx, 0.1, 0.002, 3000, 20, Rng(18),
                                   side="left")
    assert res_l.pass_fraction >= 0.75


# ------------------------------------------------------- convergence fit

def test_convergence_fit_round_trip():
    # integer step counts distort the smallest checkpoints slightly
    cks = [Checkpoint(k=0, steps=round(7.0 * math.exp(1.0 / g)), q_p=None,
                      gap=g, x1=0, xk=1)
           for g in np.linspace(0.05, 0.5, 15)]
    C, resid = convergence_rate_fit(cks)
    assert C == pytest.approx(7.0, abs=0.05)
    assert resid < 1e-2


def test_convergence_fit_exact_floats():
    # exact synthetic values (no rounding): C recovered to 1e-6
    class P:
        def __init__(self, steps, gap):
            self.steps = steps
            self.gap = gap

    pts = [P(7.0 * math.exp(1.0 / g), g) for g in np.linspace(0.07, 0.4, 12)]
    C, resid = convergence_rate_fit(pts)
    assert C == pytest.approx(7.0, abs=1e-6)
    assert resid < 1e-9


def test_convergence_fit_needs_enough_points():
    with pytest.raises(ValueError):
        convergence_rate_fit([Checkpoint(1, 1, None, 0.1, 0, 1)] * 5)


def test_convergence_fit_on_real_run():
    g = GroupState([0.25])
    traj = run(g, RuleSpec("majority"), Rng(19), accepted_target=30000, tau=0.5)
    C, resid = convergence_rate_fit(traj.checkpoints)
    assert math.isfinite(C) and C > 0
    assert math.isfinite(resid)
