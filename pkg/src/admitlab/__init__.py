"""Simulation and verification lab for evolving-group admission dynamics."""

from .group import GroupState
from .rng import Rng
from .rules import CandidatePair, Decision, RuleSpec, decide
from .engine import Trajectory, draw_pair, run, step
from .oracles import (
    OracleContext,
    accept_any_veto,
    f_majority,
    f_veto,
    gap_functions,
    majority_context,
    phi1_bound,
    tau,
    triangle_cdf,
    triangle_pdf,
    truncated_triangle_cdf,
    truncated_triangle_pdf,
    veto_context,
)
from .committee import Committee
from .version import __version__

__all__ = [
    "CandidatePair",
    "Committee",
    "Decision",
    "GroupState",
    "OracleContext",
    "Rng",
    "RuleSpec",
    "Trajectory",
    "accept_any_veto",
    "decide",
    "draw_pair",
    "f_majority",
    "f_veto",
    "gap_functions",
    "majority_context",
    "phi1_bound",
    "run",
    "step",
    "tau",
    "triangle_cdf",
    "triangle_pdf",
    "truncated_triangle_cdf",
    "truncated_triangle_pdf",
    "veto_context",
    "__version__",
]
