"""Closed-form limit quantities the simulations are validated against.

Covers the acceptance-probability curves of the majority and veto rules,
their fixed points, the limiting (truncated) triangle distributions, the
gap functions used by the quantile-progress analysis, and the linear-gap
constant for veto rules.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional


def _check_unit(x: float, name: str = "x") -> None:
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"{name}={x!r} outside [0, 1]")


def f_majority(q: float) -> float:
    """Probability the next admitted member lies below q when the median
    sits at q: 2q - 2q^2 for q <= 1/2, 1 - 2q + 2q^2 above."""
    _check_unit(q, "q")
    if q <= 0.5:
        return 2.0 * q - 2.0 * q * q
    return 1.0 - 2.0 * q + 2.0 * q * q


def accept_any_veto(q: float) -> float:
    """Probability a veto step admits anyone, given the driving quantile q."""
    _check_unit(q, "q")
    if q <= 0.5:
        return 2.0 * q * q
    return 1.0 - 2.0 * (1.0 - q) ** 2


def f_veto(q: float) -> float:
    """Conditional probability the next admitted member lies below q for a
    veto rule, defined only for q > 1/2."""
    if not 0.5 < q <= 1.0:
        raise ValueError(f"f_veto defined on (1/2, 1], got q={q!r}")
    return q * q / (1.0 - 2.0 * (1.0 - q) ** 2)


def tau(p: float) -> float:
    """Fixed point of f_veto: (2p + sqrt(2p^2 - p)) / (1 + 2p), p > 1/2."""
    if not 0.5 < p <= 1.0:
        raise ValueError(f"tau defined on (1/2, 1], got p={p!r}")
    return (2.0 * p + math.sqrt(2.0 * p * p - p)) / (1.0 + 2.0 * p)


def triangle_pdf(x: float) -> float:
    """Limit density of the majority process: 4x then 4 - 4x."""
    _check_unit(x)
    return 4.0 * x if x <= 0.5 else 4.0 - 4.0 * x


def triangle_cdf(x: float) -> float:
    _check_unit(x)
    if x <= 0.5:
        return 2.0 * x * x
    return 1.0 - 2.0 * (1.0 - x) ** 2


def truncated_triangle_pdf(x: float, q: float) -> float:
    """Limit density of a veto process with quantile parameter q > 1/2."""
    _check_unit(x)
    if not 0.5 < q <= 1.0:
        raise ValueError(f"truncated triangle needs q in (1/2, 1], got {q!r}")
    norm = 1.0 - 2.0 * (1.0 - q) ** 2
    if x <= q:
        return 2.0 * x / norm
    return (4.0 * q - 2.0 * x) / norm


def truncated_triangle_cdf(x: float, q: float) -> float:
    _check_unit(x)
    if not 0.5 < q <= 1.0:
        raise ValueError(f"truncated triangle needs q in (1/2, 1], got {q!r}")
    norm = 1.0 - 2.0 * (1.0 - q) ** 2
    if x <= q:
        return x * x / norm
    return (4.0 * q * x - 2.0 * q * q - x * x) / norm


def phi1_bound(p: float) -> float:
    """A valid linear-gap constant for the veto rule at parameter p.

    Half the admissible ceiling sqrt(2p^2 - p) + 1/2 - p, so the inequality
    f_veto(tau_p - d) <= p - phi1 * d holds with margin for all
    d in (0, tau_p - 1/2).
    """
    if not 0.5 < p < 1.0:
        raise ValueError(f"phi1_bound defined on (1/2, 1), got p={p!r}")
    return 0.5 * (math.sqrt(2.0 * p * p - p) + 0.5 - p)


@dataclass(frozen=True)
class OracleContext:
    """Closed-form bundle for one quantile-driven rule."""

    p: float
    tau: float
    f: Callable[[float], float]
    domain: tuple   # closed domain of f, as (lo, hi); lo is open for veto
    phi1: Optional[float] = None
    phi2: Optional[float] = None

    def __post_init__(self):
        if abs(self.f(self.tau) - self.p) > 1e-12:
            raise ValueError("fixed-point identity f(tau) = p fails")


@dataclass(frozen=True)
class GapValues:
    g_r: float
    g_l: float
    clamped: bool = False


def majority_context() -> OracleContext:
    return OracleContext(p=0.5, tau=0.5, f=f_majority, domain=(0.0, 1.0))


def veto_context(p: float) -> OracleContext:
    """Context for a veto rule with driving quantile p = 1 - r > 1/2."""
    phi1 = phi1_bound(p)
    # the symmetric constant: f'(tau) exceeds phi1 on both sides, so the
    # same margin certifies the right-hand linear gap (grid-checked in tests)
    return OracleContext(p=p, tau=tau(p), f=f_veto, domain=(0.5, 1.0),
                         phi1=phi1, phi2=phi1)


def gap_functions(ctx: OracleContext, delta: float) -> GapValues:
    """g_r(d) = p - f(tau - d) and g_l(d) = f(tau + d) - p.

    Arguments falling outside f's domain are clamped to the boundary and
    flagged (for veto the left boundary value is the q -> 1/2 limit).
    """
    if delta < 0.0:
        raise ValueError(f"gap distance must be non-negative, got {delta!r}")
    lo, hi = ctx.domain
    clamped = False
    left_arg = ctx.tau - delta
    if left_arg <= lo:
        clamped = left_arg < lo or ctx.f is f_veto
        g_r = ctx.p - 0.5 if ctx.f is f_veto else ctx.p - ctx.f(lo)
    else:
        g_r = ctx.p - ctx.f(left_arg)
    right_arg = ctx.tau + delta
    if right_arg > hi:
        clamped = True
        g_l = ctx.f(hi) - ctx.p
    else:
        g_l = ctx.f(right_arg) - ctx.p
    # the fixed-point residual |f(tau) - p| <= 1e-12 can leave a negative
    # speck at delta ~ 0; the functions are non-negative by definition
    return GapValues(max(0.0, g_r), max(0.0, g_l), clamped)
