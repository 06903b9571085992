"""Statistical validators tying simulations to the closed-form oracles.

Everything here is a measurement: empirical CDFs and KS distances against
limit laws, member-density monitors over the group, frozen-summary Monte
Carlo of single-step acceptance probabilities, empirical smoothness
certification, the quantile-progress experiment, and the convergence-rate
diagnostic.  Pass thresholds used by the acceptance suite are fixtures
committed with the repo.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .group import GroupState
from .oracles import OracleContext, gap_functions
from .rng import Rng
from .rules import RuleSpec


# ------------------------------------------------------------------- ECDF

class Ecdf:
    """Right-continuous empirical CDF of a sample."""

    def __init__(self, samples: Sequence[float]):
        if len(samples) == 0:
            raise ValueError("empty sample")
        self.xs = np.sort(np.asarray(samples, dtype=float))
        self.n = len(self.xs)

    def __call__(self, x) -> float:
        return np.searchsorted(self.xs, x, side="right") / self.n


def ecdf(samples: Sequence[float]) -> Ecdf:
    return Ecdf(samples)


def ks_distance(samples: Sequence[float], cdf: Callable[[float], float]) -> float:
    """Two-sided sup distance between the sample ECDF and a reference CDF.

    Evaluated at the sample points, taking both one-sided gaps into
    account (the sup of |F_n - F| is attained at a jump).
    """
    xs = np.sort(np.asarray(samples, dtype=float))
    n = len(xs)
    if n == 0:
        raise ValueError("empty sample")
    ref = np.array([cdf(x) for x in xs])
    upper = np.max(np.arange(1, n + 1) / n - ref)
    lower = np.max(ref - np.arange(0, n) / n)
    return float(max(upper, lower))


# ------------------------------------------------------- density profiling

@dataclass
class DensityProfile:
    """Per-segment member counts over a delta partition of [0, 1].

    When bound constants are configured, `verdicts` holds one entry per
    aligned window of width delta, 2*delta and 4*delta: (lo, hi, count,
    lower, upper, ok).
    """

    k: int
    delta: float
    counts: np.ndarray
    edges: np.ndarray
    bounds: Optional[tuple] = None      # (c1_prime, c2_prime)
    verdicts: list = field(default_factory=list)

    @property
    def all_within_bounds(self) -> bool:
        return all(ok for *_, ok in self.verdicts)


def default_delta(k: int) -> float:
    """The paper-scale partition width k^(-1/10)."""
    return k ** -0.1


def density_profile(group: GroupState, delta: float,
                    c1_prime: Optional[float] = None,
                    c2_prime: Optional[float] = None) -> DensityProfile:
    """Member counts per delta-segment; segments are [i*d, (i+1)*d), the
    last one closed at 1.

    With both bound constants given, every aligned window of width delta,
    2*delta and 4*delta is additionally checked against

        c1' * |I| * delta * k  <=  count  <=  c2' * |I| * k
    """
    if not 0.0 < delta <= 1.0:
        raise ValueError(f"delta={delta!r} outside (0, 1]")
    nseg = max(1, math.ceil(1.0 / delta - 1e-12))
    edges = np.minimum(np.arange(nseg + 1) * delta, 1.0)
    edges[-1] = 1.0
    counts = np.empty(nseg, dtype=int)
    for i in range(nseg):
        if i == nseg - 1:
            counts[i] = group.count_interval(edges[i], 1.0, "closed")
        else:
            counts[i] = group.count_interval(edges[i], edges[i + 1], "half_open")
    prof = DensityProfile(group.size, delta, counts, edges)
    if c1_prime is not None and c2_prime is not None:
        prof.bounds = (c1_prime, c2_prime)
        k = group.size
        for mult in (1, 2, 4):
            width = mult * delta
            for start in range(nseg - mult + 1):
                lo = float(edges[start])
                hi = min(lo + width, 1.0)
                cnt = int(counts[start:start + mult].sum())
                lower = c1_prime * width * delta * k
                upper = c2_prime * width * k
                prof.verdicts.append(
                    (lo, hi, cnt, lower, upper, lower <= cnt <= upper))
    return prof


@dataclass
class DensityVerdict:
    passed: bool
    violations: list  # (lo, hi, count, lower_bound, upper_bound)
    checked: int


def check_density_bounds(group: GroupState, widths: Sequence[float],
                         lower_per_len: float, upper_per_len: float,
                         region: tuple = (0.0, 1.0),
                         align: Optional[float] = None) -> DensityVerdict:
    """Check every aligned window against count bounds linear in |I|.

    Windows of each width slide through `region` on an `align` grid
    (half the smallest width by default).  A window [a, b] passes when
    lower_per_len * |I| <= count <= upper_per_len * |I|, counts taken
    half-open except at the right edge of [0, 1].
    """
    lo_r, hi_r = region
    if align is None:
        align = min(widths) / 2.0
    violations = []
    checked = 0
    for w in widths:
        a = lo_r
        while a + w <= hi_r + 1e-12:
            b = min(a + w, hi_r)
            if b >= 1.0:
                cnt = group.count_interval(a, 1.0, "closed")
            else:
                cnt = group.count_interval(a, b, "half_open")
            lower = lower_per_len * w
            upper = upper_per_len * w
            checked += 1
            if not (lower <= cnt <= upper):
                violations.append((a, b, int(cnt), lower, upper))
            a += align
    return DensityVerdict(not violations, violations, checked)


# --------------------------------------- frozen-summary single-step probes

def _frozen_step_values(rule: RuleSpec, summary: float, trials: int,
                        rng: Rng, block: int = 1 << 15) -> np.ndarray:
    """Admitted opinions from `trials` single steps with the rule summary
    (median or driving quantile) held fixed.  For rules with rejection the
    result is conditioned on acceptance, so fewer raw draws may be needed
    than trials requested; draws continue until `trials` admissions."""
    out = np.empty(trials)
    have = 0
    if rule.kind == "majority":
        while have < trials:
            m = min(block, trials - have)
            u = rng.uniform_block(2 * m)
            a, b = u[0::2], u[1::2]
            out[have:have + m] = np.where(
                np.abs(summary - a) <= np.abs(summary - b), a, b)
            have += m
        return out
    if rule.kind == "veto":
        while have < trials:
            u = rng.uniform_block(2 * block)
            a, b = u[0::2], u[1::2]
            acc = (a + b) * 0.5 < summary
            vals = np.maximum(a, b)[acc]
            take = min(len(vals), trials - have)
            out[have:have + take] = vals[:take]
            have += take
        return out
    raise ValueError(f"no frozen-summary sampler for rule {rule.kind!r}")


def estimate_interval_accept_prob(rule: RuleSpec, frozen_summary: float,
                                  interval: tuple, trials: int,
                                  rng: Rng) -> tuple[float, float]:
    """Monte Carlo estimate (and standard error) of the probability that a
    single step admits into `interval`, conditioning on acceptance for
    rules that can reject, with the rule summary held fixed."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    lo, hi = interval
    vals = _frozen_step_values(rule, frozen_summary, trials, rng)
    if hi >= 1.0:
        hits = np.count_nonzero((vals >= lo) & (vals <= 1.0))
    else:
        hits = np.count_nonzero((vals >= lo) & (vals < hi))
    est = hits / trials
    se = math.sqrt(max(est * (1.0 - est), 1e-300) / trials)
    return est, se


@dataclass
class IntervalEstimate:
    q: float
    lo: float
    hi: float
    estimate: float
    std_error: float
    lower_bound: float
    upper_bound: float
    passed: bool


@dataclass
class SmoothnessReport:
    rule_kind: str
    c1: float
    c2: float
    intervals: list  # IntervalEstimate rows
    f_hat: list      # (q, estimate, std_error) rows
    f_increasing: bool
    passed: bool


def smoothness_report(rule: RuleSpec, summary_grid: Sequence[float],
                      delta_grid: Sequence[float], trials: int,
                      rng: Rng) -> SmoothnessReport:
    """Empirical smoothness certificate for a quantile-driven rule.

    For every summary value q on the grid, `trials` frozen-summary
    admissions are binned into each delta partition of [0, 1]; every bin
    probability must lie within [c1*d^2 - 3se, c2*d + 3se].  The estimated
    f(q) values must also increase across the grid beyond noise.
    """
    if not summary_grid or not delta_grid:
        raise ValueError("summary and delta grids must be non-empty")
    rows: list[IntervalEstimate] = []
    f_hat = []
    passed = True
    for q in summary_grid:
        vals = _frozen_step_values(rule, q, trials, rng)
        below = np.count_nonzero(vals < q) / trials
        f_se = math.sqrt(max(below * (1 - below), 1e-300) / trials)
        f_hat.append((q, below, f_se))
        for d in delta_grid:
            nbins = round(1.0 / d)
            counts, _ = np.histogram(vals, bins=nbins, range=(0.0, 1.0))
            for i, c in enumerate(counts):
                est = c / trials
                se = math.sqrt(max(est * (1 - est), 1e-300) / trials)
                lo_b = rule.c1 * d * d
                hi_b = rule.c2 * d
                ok = (est >= lo_b - 3 * se) and (est <= hi_b + 3 * se)
                passed = passed and ok
                rows.append(IntervalEstimate(q, i * d, (i + 1) * d,
                                             est, se, lo_b, hi_b, ok))
    increasing = all(
        b1 + 3 * (s1 + s0) > b0
        for (_, b0, s0), (_, b1, s1) in zip(f_hat, f_hat[1:]))
    strictly = all(b1 > b0 for (_, b0, _), (_, b1, _) in zip(f_hat, f_hat[1:]))
    f_increasing = strictly or increasing
    return SmoothnessReport(rule.kind, rule.c1, rule.c2, rows, f_hat,
                            f_increasing, passed and f_increasing)


# -------------------------------------------------- quantile progress test

@dataclass
class ProgressResult:
    pass_fraction: float
    trials: int
    required_members: float
    details: list  # (gained_members, gap_before, gap_after) per trial


def _progress_start_group(q_target: float, sigma: float, t: int,
                          rng: Rng) -> GroupState:
    """Group with its driving quantile at q_target and at least t members
    inside each sigma-neighborhood, built from four uniform blocks."""
    g = GroupState()
    u = rng.uniform_block(4 * t)
    # t members well below, t in [q-sigma, q], t in [q, q+sigma], t above
    lo_end = max(q_target - sigma, 0.0)
    hi_end = min(q_target + sigma, 1.0)
    for i in range(t):
        g.insert(u[i] * lo_end * 0.98)
    for i in range(t):
        g.insert(lo_end + (u[t + i]) * (q_target - lo_end))
    for i in range(t):
        g.insert(q_target + u[2 * t + i] * (hi_end - q_target))
    for i in range(t):
        g.insert(hi_end + 1e-9 + u[3 * t + i] * (1.0 - hi_end - 2e-9))
    g.insert(q_target)
    return g


def quantile_progress_test(rule: RuleSpec, ctx: OracleContext,
                           start_gap: float, sigma: float, t: int,
                           trials: int, rng: Rng,
                           side: str = "right") -> ProgressResult:
    """Empirical check of the confined-quantile progress proposition.

    Builds start groups whose driving quantile sits `start_gap` from the
    fixed point on the chosen side, with both sigma-neighborhoods holding
    at least t members, verifies the hypotheses

        g(start_gap - sigma) > g(start_gap)/2 > c2 * sigma

    and then measures, over `trials` independent runs of t admissions, how
    often at least g(start_gap)/4 * t members separate the old and new
    quantile positions while the gap did not grow.
    """
    if side not in ("right", "left"):
        raise ValueError("side must be 'right' or 'left'")
    gaps = gap_functions(ctx, start_gap)
    g_val = gaps.g_r if side == "right" else gaps.g_l
    if g_val <= 0.0:
        raise ValueError(f"g({start_gap}) = {g_val} is not positive; "
                         "the proposition needs a positive starting gap")
    if sigma >= start_gap:
        raise ValueError(f"sigma={sigma} must be below the gap {start_gap}")
    shrunk = gap_functions(ctx, start_gap - sigma)
    s_val = shrunk.g_r if side == "right" else shrunk.g_l
    if not s_val > g_val / 2.0:
        raise ValueError(
            f"hypothesis g(gap - sigma) > g(gap)/2 fails: {s_val} <= {g_val / 2}")
    if not g_val / 2.0 > rule.c2 * sigma:
        raise ValueError(
            f"hypothesis g(gap)/2 > c2*sigma fails: {g_val / 2} <= {rule.c2 * sigma}")

    q_start = ctx.tau - start_gap if side == "right" else ctx.tau + start_gap
    required = g_val / 4.0 * t
    details = []
    passes = 0
    from .engine import run as engine_run

    for trial in range(trials):
        sub = rng.split(trial)
        group = _progress_start_group(q_start, sigma, t, sub)
        q0 = group.quantile(rule.p)
        gap0 = abs(q0 - ctx.tau)
        # neighborhood occupancy is part of the proposition's hypotheses
        assert group.count_interval(q0 - sigma, q0, "closed") >= t
        assert group.count_interval(q0, q0 + sigma, "closed") >= t
        engine_run(group, rule, sub, accepted_target=t)
        q1 = group.quantile(rule.p)
        gap1 = abs(q1 - ctx.tau)
        lo, hi = (q0, q1) if q0 <= q1 else (q1, q0)
        gained = group.count_interval(lo, hi, "closed")
        if gained >= required and gap1 <= gap0 + 1e-12:
            passes += 1
        details.append((gained, gap0, gap1))
    return ProgressResult(passes / trials, trials, required, details)


# -------------------------------------------------- convergence-rate fit

def convergence_rate_fit(checkpoints: Sequence) -> tuple[float, float]:
    """Fit log(steps) = log(C) + 1/gap over checkpoints with positive gap.

    Returns (C, rms residual); a diagnostic for the exponential-time
    convergence model, not a pass/fail criterion.
    """
    pts = [(c.steps, c.gap) for c in checkpoints
           if c.gap is not None and c.gap > 0 and c.steps > 0]
    if len(pts) < 10:
        raise ValueError(f"need at least 10 usable checkpoints, have {len(pts)}")
    x = np.array([1.0 / g for _, g in pts])
    y = np.array([math.log(t) for t, _ in pts])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return math.exp(intercept), float(np.sqrt(np.mean(resid ** 2)))
