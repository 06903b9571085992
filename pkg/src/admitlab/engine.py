"""Discrete-time growth engine: seeded draws, rule dispatch, checkpointing.

A run is fully determined by (initial group, rule, targets, seed).  Raw
steps and accepted members are counted separately because veto and
consensus rules reject candidates in many steps.

Two sampling modes are available for veto rules:

* ``steps`` (default): every raw step draws a candidate pair and applies the
  rule, exactly as the process is defined.
* ``jump``: the number of consecutive rejected steps is sampled from the
  geometric law implied by the total acceptance probability, and the
  admitted value is drawn from the exact conditional distribution of the
  accepted candidate.  Same process law, radically cheaper when the
  acceptance probability collapses (r > 1/2 runs need ~k^2 raw steps for k
  accepted members, which is unreachable step by step).  Trajectories from
  the two modes are different sample paths of the same distribution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .group import GroupState
from .rng import Rng
from .rules import CandidatePair, Decision, RuleSpec, decide


@dataclass(frozen=True)
class StepRecord:
    step_index: int
    decision: Decision
    admitted_value: Optional[float]


@dataclass
class Checkpoint:
    k: int                      # group size
    steps: int                  # raw steps so far
    q_p: Optional[float]        # driving quantile (None for consensus)
    gap: Optional[float]        # |q_p - tau_p| when tau_p is defined
    x1: float
    xk: float
    extra: dict = field(default_factory=dict)   # extra tracked quantiles


@dataclass
class Trajectory:
    checkpoints: list
    raw_steps: int
    accepted: int
    admitted: Optional[list] = None   # admitted opinions, when logged
    exhausted: bool = False           # raw budget ran out before target


def draw_pair(rng: Rng) -> CandidatePair:
    a = rng.uniform()
    b = rng.uniform()
    return CandidatePair(a, b) if a <= b else CandidatePair(b, a)


def step(group: GroupState, rule: RuleSpec, rng: Rng,
         step_index: int = 0) -> StepRecord:
    """One raw step: draw a pair, decide, insert the admitted value if any."""
    pair = draw_pair(rng)
    decision = decide(rule, group, pair)
    if decision is Decision.ADMIT_LEFT:
        group.insert(pair.y1)
        return StepRecord(step_index, decision, pair.y1)
    if decision is Decision.ADMIT_RIGHT:
        group.insert(pair.y2)
        return StepRecord(step_index, decision, pair.y2)
    return StepRecord(step_index, decision, None)


def _next_checkpoint(k: int) -> int:
    # geometric schedule: multiplicative 5% increments, at least +1
    return max(k + 1, -(-21 * k // 20))


def _accepted_veto_value(q: float, v: float) -> float:
    """Inverse CDF of the admitted opinion given acceptance at quantile q.

    From the geometry of the acceptance region {(y1, y2): (y1+y2)/2 < q}:
    the admitted candidate is the pair maximum m, with P(m <= x) equal to
    x^2 below q and x^2 - 2(x-q)^2 above, normalized by the total
    acceptance probability.
    """
    if q <= 0.5:
        p_acc = 2.0 * q * q
    else:
        p_acc = 1.0 - 2.0 * (1.0 - q) ** 2
    vp = v * p_acc
    if vp <= q * q:
        return math.sqrt(vp)
    return 2.0 * q - math.sqrt(max(0.0, 2.0 * q * q - vp))


def run(initial: GroupState, rule: RuleSpec, rng: Rng,
        accepted_target: Optional[int] = None,
        raw_budget: Optional[int] = None,
        log_admitted: bool = False,
        tau: Optional[float] = None,
        extra_quantiles: tuple = (),
        mode: str = "steps") -> Trajectory:
    """Run the admission process and record a checkpointed trajectory.

    Stops when `accepted_target` members have been admitted or `raw_budget`
    raw steps have elapsed, whichever comes first.  `tau` is the limit the
    gap column is measured against (left None when the rule has no
    closed-form fixed point).  `extra_quantiles` lists additional p values
    recorded at every checkpoint.
    """
    if initial.size == 0:
        raise ValueError("initial group must be non-empty")
    if accepted_target is None and raw_budget is None:
        raise ValueError("need an accepted target or a raw-step budget")
    if accepted_target is not None and accepted_target <= 0:
        raise ValueError("accepted target must be positive")
    if mode not in ("steps", "jump"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "jump" and rule.kind != "veto":
        raise ValueError("jump mode is defined for veto rules only")

    group = initial
    k0 = group.size
    goal = None if accepted_target is None else k0 + accepted_target
    checkpoints: list[Checkpoint] = []
    admitted: Optional[list] = [] if log_admitted else None
    raw = 0
    next_ck = group.size  # checkpoint the initial state too

    p = rule.p
    kind = rule.kind
    uniform = rng.uniform
    insert = group.insert
    quantile = group.quantile

    def record():
        q = None if p is None else quantile(p)
        gap = None if (q is None or tau is None) else abs(q - tau)
        extra = {ep: quantile(ep) for ep in extra_quantiles}
        checkpoints.append(Checkpoint(group.size, raw, q, gap,
                                      group.min(), group.max(), extra))

    record()
    next_ck = _next_checkpoint(group.size)

    if mode == "jump":
        while (goal is None or group.size < goal) and \
              (raw_budget is None or raw < raw_budget):
            q = quantile(p)
            if q <= 0.5:
                p_acc = 2.0 * q * q
            else:
                p_acc = 1.0 - 2.0 * (1.0 - q) ** 2
            if p_acc <= 0.0:
                break  # stuck process: report exhaustion below
            u = uniform()
            if p_acc < 1.0:
                # failures before the first success, then the success itself
                skipped = int(math.log(1.0 - u) / math.log(1.0 - p_acc)) if u < 1.0 else 0
                if raw_budget is not None and raw + skipped + 1 > raw_budget:
                    raw = raw_budget
                    break
                raw += skipped + 1
            else:
                raw += 1
            y = _accepted_veto_value(q, uniform())
            insert(y)
            if admitted is not None:
                admitted.append(y)
            if group.size >= next_ck:
                record()
                next_ck = _next_checkpoint(group.size)
    elif kind == "majority":
        median = group.median
        while (goal is None or group.size < goal) and \
              (raw_budget is None or raw < raw_budget):
            u1 = uniform()
            u2 = uniform()
            if u2 < u1:
                u1, u2 = u2, u1
            raw += 1
            m = median()
            y = u1 if abs(m - u1) <= abs(m - u2) else u2
            insert(y)
            if admitted is not None:
                admitted.append(y)
            if group.size >= next_ck:
                record()
                next_ck = _next_checkpoint(group.size)
    elif kind == "veto":
        q2 = 2.0 * quantile(p)  # threshold only moves when a member joins
        while (goal is None or group.size < goal) and \
              (raw_budget is None or raw < raw_budget):
            u1 = uniform()
            u2 = uniform()
            if u2 < u1:
                u1, u2 = u2, u1
            raw += 1
            if u1 + u2 < q2:
                insert(u2)
                q2 = 2.0 * quantile(p)
                if admitted is not None:
                    admitted.append(u2)
                if group.size >= next_ck:
                    record()
                    next_ck = _next_checkpoint(group.size)
    elif kind == "consensus":
        gmin, gmax = group.min, group.max
        while (goal is None or group.size < goal) and \
              (raw_budget is None or raw < raw_budget):
            u1 = uniform()
            u2 = uniform()
            if u2 < u1:
                u1, u2 = u2, u1
            raw += 1
            mid = 0.5 * (u1 + u2)
            lo, hi = gmin(), gmax()
            if mid >= hi:
                y = u1
            elif mid < lo:
                y = u2
            else:
                continue
            # unanimity only ever admits near the extremes; defensive check
            assert y <= 2.0 * lo or y >= 2.0 * hi - 1.0, \
                "consensus admitted a candidate outside the extreme intervals"
            insert(y)
            if admitted is not None:
                admitted.append(y)
            if group.size >= next_ck:
                record()
                next_ck = _next_checkpoint(group.size)
    else:  # custom quantile-driven rule: generic (slower) path
        while (goal is None or group.size < goal) and \
              (raw_budget is None or raw < raw_budget):
            rec = step(group, rule, rng, raw)
            raw += 1
            if rec.admitted_value is not None:
                if admitted is not None:
                    admitted.append(rec.admitted_value)
                if group.size >= next_ck:
                    record()
                    next_ck = _next_checkpoint(group.size)

    if checkpoints[-1].k != group.size:  # k strictly increasing per checkpoint
        record()
    exhausted = goal is not None and group.size < goal
    return Trajectory(checkpoints, raw, group.size - k0, admitted, exhausted)
