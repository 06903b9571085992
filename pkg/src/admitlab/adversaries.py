"""Adversarial committee constructions and exact certificates.

Each construction emits a :class:`ReplacementSchedule` whose legality is
re-verified by replaying it through the committee engine, never assumed.
Candidates and profiles are exact rationals throughout; the geometric
tightness construction works on a dyadic grid so that all vote comparisons
stay integer-exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .committee import Committee
from .rng import Rng

# global dyadic scale used by the geometric construction: every gap is
# quantized to an integer multiple of 2^-96, which leaves at least 53
# significant bits even in the smallest gap the run keeps (>= 2^-40)
_GEOM_SCALE_BITS = 96
_GEOM_STOP_BITS = 40  # stop once the next gap falls below 2^-40


@dataclass
class ReplacementSchedule:
    """Ordered replacement steps, each (1-based position index, candidate)."""

    steps: list
    provenance: str


@dataclass
class ReplayResult:
    committee: Committee
    accepted_all: bool
    failed_at: Optional[int] = None
    vote_counts: list = field(default_factory=list)


def replay(committee: Committee, schedule: ReplacementSchedule,
           require_votes: Optional[int] = None) -> ReplayResult:
    """Replay a schedule, verifying every step is accepted by the engine.

    `require_votes` additionally asserts a minimum exact vote count at
    every step (used by constructions that promise more support than the
    bare threshold)."""
    counts = []
    for idx, (i, y) in enumerate(schedule.steps):
        votes = committee.vote_count(i, y)
        counts.append(votes)
        if require_votes is not None and votes < require_votes:
            return ReplayResult(committee, False, idx, counts)
        ok, committee = committee.replace_attempt(i, y)
        if not ok:
            return ReplayResult(committee, False, idx, counts)
    return ReplayResult(committee, True, None, counts)


# ------------------------------------------------- unbounded drift (ell=0)

def arithmetic_drift_schedule(initial: Committee,
                              target_displacement) -> ReplacementSchedule:
    """Majority-rule (ell=0) schedule moving the median arbitrarily far.

    Phase 1 compresses the profile into an arithmetic progression around
    the median; phase 2 marches the progression right by repeatedly
    replacing the smallest point with one step past the largest, moving
    the median one progression-step per replacement.
    """
    if initial.ell != 0:
        raise ValueError("unbounded drift construction requires ell = 0")
    n = initial.n
    if n % 2 == 0 or n < 3:
        raise ValueError("construction stated for odd n >= 3")
    vals = list(initial.values)
    if len(set(vals)) != n:
        raise ValueError("construction requires all opinions distinct")
    if target_displacement < 0:
        raise ValueError("target displacement must be non-negative")
    k = (n - 1) // 2
    M = vals[k]
    eps = Fraction(min(M - vals[k - 1], vals[k + 1] - M), 2 * k)
    steps = []
    if target_displacement > 0:
        # phase 1a: replace the current smallest with M - eps*i, i = 1..k
        for i in range(1, k + 1):
            steps.append((1, M - eps * i))
        # phase 1b: replace position k+1+i with M + eps*i, i = 1..k
        for i in range(1, k + 1):
            steps.append((k + 1 + i, M + eps * i))
        # phase 2: slide the progression right one eps per step
        n_slides = math.ceil(Fraction(target_displacement) / eps)
        top = M + eps * k
        for j in range(1, n_slides + 1):
            steps.append((1, top + eps * j))
    return ReplacementSchedule(steps, "arithmetic-drift")


# ------------------------------------- geometric tightness of the bound

def solve_geometric_delta(k: int, ell: int) -> float:
    """Shrink rate making x_{k-l+2} equidistant from x_1 and x_{2k+2} in the
    geometric profile with gaps (1-delta)^(i-1).

    Bisection on 1 - 2(1-d)^(k-l+1) + (1-d)^(2k+1) = 0 over d in (0, 1);
    residual of the gap-sum equation at the root is at most 1e-12.
    """
    if not 1 <= ell <= k:
        raise ValueError(f"need 1 <= ell <= k, got ell={ell}, k={k}")

    def h(d: float) -> float:
        return 1.0 - 2.0 * (1.0 - d) ** (k - ell + 1) + (1.0 - d) ** (2 * k + 1)

    lo, hi = 1e-15, 1.0 - 1e-15
    if not h(lo) < 0.0 < h(hi):
        raise ArithmeticError(f"no root bracket in (0, 1) for k={k}, ell={ell}")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if h(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    d = 0.5 * (lo + hi)
    left = sum((1.0 - d) ** i for i in range(0, k - ell + 1))
    right = sum((1.0 - d) ** i for i in range(k - ell + 1, 2 * k + 1))
    if abs(left - right) > 1e-12 * max(left, right):
        raise ArithmeticError(
            f"equidistance residual {abs(left - right):g} exceeds 1e-12")
    return d


@dataclass
class TightnessRun:
    delta: float
    schedule: ReplacementSchedule
    displacement: Fraction   # final x_{k-l+2} minus the initial maximum
    bound_ratio: Fraction    # displacement over D*k/(2*ell - 1)
    final: Committee
    min_margin: Fraction     # smallest nonzero vote-comparison margin seen


def geometric_tightness_run(k: int, ell: int) -> TightnessRun:
    """Run the geometric drift profile and measure how close the indexed
    position x_{k-l+2} comes to the D*k/(2l-1) drift bound.

    The ideal shrink rate is bumped up by a relative 2^-16 so the critical
    voter (exactly indifferent at the ideal rate) strictly prefers every
    candidate; gaps are then quantized to the 2^-96 dyadic grid, and the
    accumulated quantization is asserted to be far below the smallest vote
    margin, so no comparison can have flipped against the ideal profile.
    """
    d = solve_geometric_delta(k, ell) * (1.0 + 2.0 ** -16)
    scale = 1 << _GEOM_SCALE_BITS
    stop = 1 << (_GEOM_SCALE_BITS - _GEOM_STOP_BITS)
    n = 2 * k + 1

    # integer multiply-shift keeps the whole profile deterministic: the
    # effective shrink ratio is ratio/2^53 and each gap floors once, so the
    # accumulated error against exact ratio powers stays below 1/d units
    ratio = round((1.0 - d) * (1 << 53))
    gaps = [scale]
    while True:
        q = (gaps[-1] * ratio) >> 53
        if q < stop:
            break
        gaps.append(q)
    if len(gaps) < n:
        raise ArithmeticError("profile exhausted before n points; k too large")

    positions = [0]
    for q in gaps[: n - 1]:
        positions.append(positions[-1] + q)
    committee = Committee([Fraction(p, scale) for p in positions], ell)
    initial = committee

    steps = []
    top = positions[-1]
    for q in gaps[n - 1:]:
        top += q
        steps.append((1, Fraction(top, scale)))
    schedule = ReplacementSchedule(steps, f"geometric-tightness k={k} ell={ell}")

    # replay with margin tracking
    min_margin = None
    cur = committee
    for idx, (i, y) in enumerate(steps):
        xi = cur.opinion(i)
        votes = 0
        for j in range(1, cur.n + 1):
            if j == i:
                continue
            xj = cur.opinion(j)
            m = abs(xj - xi) - abs(xj - y)
            if m >= 0:
                votes += 1
            if m != 0 and (min_margin is None or abs(m) < min_margin):
                min_margin = abs(m)
        if votes < cur.threshold:
            raise ArithmeticError(
                f"geometric construction step {idx} illegal: "
                f"{votes} < {cur.threshold}")
        ok, cur = cur.replace_attempt(i, y)
        assert ok
    # each gap drifts at most 1/d grid units from the exact ratio power, so
    # any position (a gap sum) is within len(gaps)/d units of ideal; a vote
    # comparison combines four positions
    slack = Fraction(4 * len(gaps) * math.ceil(1.0 / d), scale)
    if min_margin is not None and min_margin <= slack:
        raise ArithmeticError(
            "quantization slack reaches the smallest vote margin; "
            "the dyadic profile may not represent the ideal construction")

    tracked = cur.values[k - ell + 2 - 1]
    displacement = tracked - initial.initial_xn
    bound = Fraction(initial.diameter * k, 2 * ell - 1)
    return TightnessRun(d, schedule, displacement, displacement / bound,
                        cur, min_margin)


# --------------------------------------------------- immunity construction

def immunity_config(k: int, ell: int, d, D) -> Committee:
    """Two-cluster committee of size 4k+3 whose median cannot be displaced
    when the required majority is 3k+2+ell.

    Left cluster: 2k+1 points spanning width d.  Right cluster: 2k+1 points
    spanning width D.  The median sits alone between them, farther than
    max(d, D)*k/(2*ell-1) from both clusters, which keeps each cluster's
    internal drift bound away from the median.
    """
    if not 1 <= ell <= k:
        raise ValueError(f"need 1 <= ell <= k, got ell={ell}, k={k}")
    d = Fraction(d)
    D = Fraction(D)
    if d <= 0 or D <= 0:
        raise ValueError("cluster widths must be positive")
    w = max(d, D)
    gap = Fraction(w * k, 2 * ell - 1) + w
    left = [Fraction(i) * d / (2 * k) for i in range(2 * k + 1)]
    median = left[-1] + gap
    right_start = median + gap
    right = [right_start + Fraction(i) * D / (2 * k) for i in range(2 * k + 1)]
    # required majority 3k+2+ell on n = 4k+3 means ceil((n-1)/2) = 2k+1
    # votes plus a surplus of k+1+ell
    return Committee(left + [median] + right, ell=k + 1 + ell)


def one_step_irreplaceable(committee: Committee, i: int):
    """Exact maximum, over every candidate, of the votes to replace member i.

    vote_count is piecewise constant in y with jumps exactly at the
    reflections {2*x_j - x_i} and at x_i itself, so evaluating at those
    points, between consecutive ones, and beyond both extremes covers all
    candidates.  A candidate at exactly x_i would re-elect the same opinion
    (gathering n-1 tie votes without displacing anything), so it is not
    counted against irreplaceability.

    Returns (irreplaceable, max_votes, witness_candidate).
    """
    xi = committee.opinion(i)
    points = {2 * xj - xi for j, xj in enumerate(committee.values, start=1)
              if j != i}
    points.add(xi)
    bps = sorted(points)
    candidates = [bps[0] - 1, bps[-1] + 1]
    candidates.extend(b for b in bps if b != xi)
    for a, b in zip(bps, bps[1:]):
        candidates.append(Fraction(a + b, 2))
    best, witness = -1, None
    for y in candidates:
        if y == xi:
            continue
        v = committee.vote_count(i, y)
        if v > best:
            best, witness = v, y
    return best < committee.threshold, best, witness


# ----------------------------------------------------- removal schedule

def removal_schedule(initial: Committee) -> ReplacementSchedule:
    """Schedule removing every original member when the threshold is low.

    Valid for committees of size n = 4k+3 requiring at most 3k+2 votes;
    works the left side up to and including the median in stages (stage j
    rebuilds the smallest j points as an arithmetic progression with step
    dividing the next gap, then walks it up to the next original point),
    and then mirrors the process from the right.
    """
    n = initial.n
    if n < 7 or n % 4 != 3:
        raise ValueError(f"construction stated for n = 4k+3, got n={n}")
    k = (n - 3) // 4
    if initial.threshold > 3 * k + 2:
        raise ValueError(
            f"threshold {initial.threshold} > {3 * k + 2}: this is the "
            "immunity phase, no removal schedule exists")
    if len(set(initial.values)) != n:
        raise ValueError("construction requires all opinions distinct")

    steps = []
    work = list(initial.values)

    def left_stages(values: list, n_stages: int, mirrored: bool):
        # stage j assumes the smallest j points form an arithmetic
        # progression (difference prev_delta) and ends with x_j replaced
        # and the smallest j+1 points in progression with step delta_j
        # dividing the next gap.  delta_j must shrink below prev_delta/j:
        # otherwise the compression sub-stage would move points leftward,
        # away from the voter mass, and lose the vote.
        prev_delta = None
        for j in range(1, n_stages + 1):
            c = values[j - 1]
            w = values[j]
            gap = w - c
            parts = j + 2
            if prev_delta is not None:
                parts = max(parts, (gap * j * prev_delta.denominator)
                            // (prev_delta.numerator) + 1)
            delta = Fraction(gap, parts)
            for m in range(1, j):               # compress below x_j
                _push(values, steps, c - m * delta, mirrored)
            for m in range(1, parts):           # march up to x_{j+1} - delta
                _push(values, steps, c + m * delta, mirrored)
            prev_delta = delta

    def _push(values: list, out: list, y, mirrored: bool):
        # replace the current smallest (position 1); mirrored runs operate
        # on the reflected profile, so map back to position n and negate
        del values[0]
        pos = 0
        while pos < len(values) and values[pos] <= y:
            pos += 1
        values.insert(pos, y)
        if mirrored:
            out.append((n, -y))
        else:
            out.append((1, y))

    left_stages(work, 2 * k + 2, mirrored=False)
    work = [-v for v in reversed(work)]      # reflect and clear the right
    left_stages(work, 2 * k + 1, mirrored=True)
    return ReplacementSchedule(steps, "no-immunity-removal")


# ------------------------------------------------ random legal replacements

def legal_intervals(committee: Committee, i: int) -> list:
    """Closed intervals of candidates y whose replacement vote meets the
    committee threshold, found by sweeping the reflection breakpoints."""
    xi = committee.opinion(i)
    events = []
    for j, xj in enumerate(committee.values, start=1):
        if j == i:
            continue
        r = 2 * xj - xi
        lo, hi = (r, xi) if r <= xi else (xi, r)
        events.append((lo, 0))
        events.append((hi, 1))
    events.sort()
    out = []
    active = 0
    open_at = None
    thr = committee.threshold
    for point, kind in events:
        if kind == 0:
            active += 1
            if active == thr and open_at is None:
                open_at = point
        else:
            # the closing endpoint itself still qualifies (closed interval)
            if active == thr and open_at is not None:
                out.append((open_at, point))
                open_at = None
            active -= 1
    merged = []
    for lo, hi in out:
        if merged and lo <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(hi, merged[-1][1]))
        else:
            merged.append((lo, hi))
    return merged


def sample_accepted_replacement(committee: Committee, rng: Rng,
                                grid_bits: int = 40,
                                members: Optional[list] = None,
                                max_grid_bits: Optional[int] = None):
    """Random (i, y) whose replacement is guaranteed to be accepted.

    Picks a member, sweeps its legal candidate region, and draws y from a
    dyadic grid inside a region interval (length-weighted).  The grid
    refines past `grid_bits` when the region is narrower than the base
    grid, up to `max_grid_bits` (unbounded when None); committees contract
    under ell >= 1, so long fuzz runs cap this and restart instead of
    letting denominators grow without bound.  Returns None when no legal
    candidate distinct from the incumbent is available at the allowed
    resolution (exact re-election would not displace anything).
    """
    n = committee.n
    pool = members if members is not None else list(range(1, n + 1))
    i = pool[int(rng.uniform() * len(pool)) % len(pool)]
    intervals = legal_intervals(committee, i)
    if not intervals:
        return None
    width = max(hi - lo for lo, hi in intervals)
    bits = grid_bits
    if width > 0:
        # ensure the widest interval holds at least ~2^10 grid points
        need = (width.denominator.bit_length()
                - width.numerator.bit_length()) + 11
        bits = max(grid_bits, need)
    if max_grid_bits is not None and bits > max_grid_bits:
        return None
    scale = 1 << bits
    usable = []
    for lo, hi in intervals:
        # ints and Fractions both expose numerator/denominator
        a = -((-lo.numerator * scale) // lo.denominator)   # ceil(lo * scale)
        b = (hi.numerator * scale) // hi.denominator       # floor(hi * scale)
        if b >= a:
            usable.append((a, b))
    if not usable:
        return None
    weights = [b - a + 1 for a, b in usable]
    total = sum(weights)
    pick = int(rng.uniform() * total) % total
    for (a, b), w in zip(usable, weights):
        if pick < w:
            y = Fraction(a + pick, scale)
            if y in committee.values:
                # exact re-election refreshes an id without displacing
                # anything, and value collisions freeze zero-width
                # clusters: neither is a move the fuzz adversary plays
                return None
            return i, y
        pick -= w
    raise AssertionError("unreachable")


@dataclass
class FuzzReport:
    accepted: int
    epochs: int
    median_moves: int
    drift_violations: int = 0
    shift_violations: int = 0
    monotone_violations: int = 0
    range_violations: int = 0

    @property
    def clean(self) -> bool:
        return (self.drift_violations == 0 and self.shift_violations == 0
                and self.monotone_violations == 0
                and self.range_violations == 0)


def _sample_int_replacement(committee: Committee, rng: Rng):
    """Integer-only variant of the legal-replacement sampler.

    Half the picks go to the two extreme positions: under large ell the
    interior members admit no legal move, and the extremes are where the
    drift and potential dynamics live.
    """
    n = committee.n
    u = rng.uniform()
    if u < 0.5:
        i = 1 if u < 0.25 else n
    else:
        i = int((u - 0.5) * 2 * n) % n + 1
    intervals = legal_intervals(committee, i)
    usable = [(-((-lo) // 1), hi // 1) for lo, hi in intervals]
    usable = [(a, b) for a, b in usable if b >= a]
    if not usable:
        return None
    weights = [b - a + 1 for a, b in usable]
    total = sum(weights)
    pick = int(rng.uniform() * total) % total
    for (a, b), w in zip(usable, weights):
        if pick < w:
            y = a + pick
            # candidates colliding with any member value are skipped: exact
            # re-election displaces nothing, and duplicate opinions would
            # freeze a zero-width cluster that no rescaling can reopen
            return None if y in committee.values else (i, y)
        pick -= w
    raise AssertionError("unreachable")


def _rescaled(c: Committee, mul: int) -> Committee:
    """Same committee with every value multiplied by `mul` (ids kept)."""
    return Committee((), 0, _internal=(
        tuple(v * mul for v in c.values), c.ids, c.n, c.ell, c.threshold,
        c.initial_x1 * mul, c.initial_xn * mul, c.diameter * mul, c._next_id))


def fuzz_on_committee(committee: Committee, accepted_target: int, rng: Rng,
                      max_scale_bits: int = 1 << 16):
    """Random accepted replacements on one fixed committee, ids preserved.

    Values are brought to a common integer scale first (vote comparisons
    are invariant under positive scaling), then rescaled by 2^24 whenever
    contraction pushes legal regions below integer resolution.  Returns
    (final committee, accepted count); stops early only if the scale
    budget runs out.
    """
    from math import lcm

    den = lcm(*[Fraction(v).denominator for v in committee.values])
    cur = Committee((), 0, _internal=(
        tuple(int(v * den) for v in committee.values), committee.ids,
        committee.n, committee.ell, committee.threshold,
        int(committee.initial_x1 * den), int(committee.initial_xn * den),
        int(committee.diameter * den), committee._next_id))
    accepted = 0
    misses = 0
    scale_bits = 0
    while accepted < accepted_target:
        pick = _sample_int_replacement(cur, rng)
        if pick is None:
            misses += 1
            if misses >= 4 * cur.n:
                scale_bits += 24
                if scale_bits > max_scale_bits:
                    break
                cur = _rescaled(cur, 1 << 24)
                misses = 0
            continue
        misses = 0
        i, y = pick
        ok, cur = cur.replace_attempt(i, y)
        assert ok, "sampled replacement must be accepted"
        accepted += 1
    return cur, accepted


def committee_fuzz(n: int, ell: int, accepted_target: int, rng: Rng,
                   consensus_checks: bool = False,
                   epoch_cap: int = 400,
                   max_scale_bits: int = 512,
                   value_bits: int = 24) -> FuzzReport:
    """Randomized accepted replacements with every exact invariant checked.

    Committees under ell >= 1 contract geometrically, so the fuzz runs in
    epochs: each starts from a fresh random integer profile, and whenever
    legal regions fall below integer resolution the entire epoch state is
    rescaled by 2^24 (every check is scale-invariant, and integer values
    keep the exact arithmetic fast).  An epoch ends after `epoch_cap`
    accepted steps or once the accumulated rescaling passes
    `max_scale_bits`; fresh epochs start until `accepted_target` accepted
    replacements have been checked in total.

    Checks per accepted step: the indexed drift bound against the epoch's
    initial configuration and the potential-drop lemma whenever the median
    moved (ell >= 1, odd n); or, with `consensus_checks`, the exact
    admitted-value range and both monotone quantities.
    """
    from .committee import drift_bound_check, shift_lemma_check

    report = FuzzReport(0, 0, 0)
    hull = 1 << value_bits
    rescale = 1 << 24
    while report.accepted < accepted_target:
        vals: set = set()
        while len(vals) < n:
            vals.add(int(rng.uniform() * hull))
        initial = Committee(sorted(vals), ell=ell)
        report.epochs += 1
        cur = initial
        scale_bits = 0
        mono = cur.consensus_monotone() if consensus_checks else None
        mono_m = cur.consensus_monotone_mirror() if consensus_checks else None
        lo_adm = initial.initial_x1 - initial.diameter
        hi_adm = initial.initial_xn + initial.diameter
        in_epoch = 0
        misses = 0
        while in_epoch < epoch_cap and report.accepted < accepted_target:
            pick = _sample_int_replacement(cur, rng)
            if pick is None:
                misses += 1
                if misses >= 4 * n:
                    scale_bits += 24
                    if scale_bits > max_scale_bits:
                        break
                    cur = _rescaled(cur, rescale)
                    initial = _rescaled(initial, rescale)
                    if consensus_checks:
                        mono *= rescale
                        mono_m *= rescale
                        lo_adm *= rescale
                        hi_adm *= rescale
                    misses = 0
                continue
            misses = 0
            i, y = pick
            prev = cur
            ok, cur = cur.replace_attempt(i, y)
            assert ok, "sampled replacement must be accepted"
            report.accepted += 1
            in_epoch += 1
            if consensus_checks:
                if not lo_adm <= y <= hi_adm:
                    report.range_violations += 1
                m2 = cur.consensus_monotone()
                mm2 = cur.consensus_monotone_mirror()
                if m2 > mono:
                    report.monotone_violations += 1
                if mm2 < mono_m:
                    report.monotone_violations += 1
                mono, mono_m = m2, mm2
            elif ell >= 1 and n % 2 == 1:
                holds, _, _ = drift_bound_check(initial, cur)
                if not holds:
                    report.drift_violations += 1
                if cur.values[(n - 1) // 2] != prev.values[(n - 1) // 2]:
                    report.median_moves += 1
                    s_holds, _, _ = shift_lemma_check(prev, cur)
                    if not s_holds:
                        report.shift_violations += 1
    return report
