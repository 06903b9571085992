"""Admission rules: pure decisions from a group summary and a candidate pair.

Each rule looks only at the summary it is allowed to see (median for
majority, extremes for consensus, one quantile for veto and custom
quantile-driven rules).  Exact ties always resolve toward the left (smaller)
candidate so replays are deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

from .group import GroupState


class Decision(Enum):
    ADMIT_LEFT = "left"
    ADMIT_RIGHT = "right"
    ADMIT_NONE = "none"


@dataclass(frozen=True)
class CandidatePair:
    """Two candidate opinions, normalized so y1 <= y2."""

    y1: float
    y2: float

    def __post_init__(self):
        if self.y1 > self.y2:
            a, b = self.y2, self.y1
            object.__setattr__(self, "y1", a)
            object.__setattr__(self, "y2", b)


def majority_decide(median: float, pair: CandidatePair) -> Decision:
    """Admit the candidate closer to the median; exact tie admits the left."""
    if abs(median - pair.y1) <= abs(median - pair.y2):
        return Decision.ADMIT_LEFT
    return Decision.ADMIT_RIGHT


def consensus_decide(min_member: float, max_member: float,
                     pair: CandidatePair) -> Decision:
    """Admit only on a unanimous vote (ties vote left).

    All members vote left exactly when every member is at or below the
    candidate midpoint, and right exactly when every member is strictly
    above it.
    """
    mid = 0.5 * (pair.y1 + pair.y2)
    if mid >= max_member:
        return Decision.ADMIT_LEFT
    if mid < min_member:
        return Decision.ADMIT_RIGHT
    return Decision.ADMIT_NONE


def veto_decide(q_threshold: float, pair: CandidatePair) -> Decision:
    """Right candidate joins iff the pair midpoint is strictly below the
    (1-r)-quantile; the left candidate can never join."""
    if 0.5 * (pair.y1 + pair.y2) < q_threshold:
        return Decision.ADMIT_RIGHT
    return Decision.ADMIT_NONE


# Signature for custom quantile-driven rules: (q_p, pair) -> Decision.
QuantileDecisionFn = Callable[[float, CandidatePair], Decision]


@dataclass(frozen=True)
class RuleSpec:
    """Which admission rule drives a run, plus its smoothness constants.

    `p` is the driving quantile (1/2 for majority, 1-r for veto); consensus
    is not quantile-driven and carries p=None.  c1/c2 are the constants the
    smoothness certification tests the rule against.
    """

    kind: str  # "majority" | "consensus" | "veto" | "quantile"
    r: Optional[float] = None
    p: Optional[float] = field(default=None)
    decision_fn: Optional[QuantileDecisionFn] = None
    c1: float = 1.0
    c2: float = 2.0

    def __post_init__(self):
        kind = self.kind
        if kind == "majority":
            object.__setattr__(self, "p", 0.5)
        elif kind == "veto":
            if self.r is None or not 0.0 < self.r < 1.0:
                raise ValueError(f"veto rule needs r in (0, 1), got {self.r!r}")
            object.__setattr__(self, "p", 1.0 - self.r)
            if self.c2 == 2.0:
                object.__setattr__(self, "c2", 4.0)
        elif kind == "quantile":
            if self.p is None or not 0.0 <= self.p <= 1.0:
                raise ValueError(f"quantile rule needs p in [0, 1], got {self.p!r}")
            if self.decision_fn is None:
                raise ValueError("quantile rule needs a decision function")
        elif kind != "consensus":
            raise ValueError(f"unknown rule kind {kind!r}")
        if self.c1 <= 0 or self.c2 <= 0:
            raise ValueError("smoothness constants must be positive")

    def to_dict(self) -> dict:
        d = {"kind": self.kind}
        if self.kind == "veto":
            d["r"] = self.r
        elif self.kind == "quantile":
            d["p"] = self.p
        return d

    @staticmethod
    def from_dict(d: dict) -> "RuleSpec":
        kind = d.get("kind")
        if kind == "veto":
            return RuleSpec(kind="veto", r=d.get("r"))
        if kind in ("majority", "consensus"):
            return RuleSpec(kind=kind)
        raise ValueError(f"unknown or non-serializable rule kind {kind!r}")


def decide(rule: RuleSpec, group: GroupState, pair: CandidatePair) -> Decision:
    """Dispatch to the rule-specific decision on the summary it needs."""
    if group.size == 0:
        raise ValueError("cannot decide on an empty group")
    if rule.kind == "majority":
        return majority_decide(group.median(), pair)
    if rule.kind == "consensus":
        return consensus_decide(group.min(), group.max(), pair)
    if rule.kind == "veto":
        return veto_decide(group.quantile(rule.p), pair)
    return rule.decision_fn(group.quantile(rule.p), pair)
