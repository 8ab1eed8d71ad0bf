"""Convex roofs of the threetangle for rank-2 three-qubit mixtures."""

__version__ = "0.1.0"

from .invariant import Measure, sqrt_tau3, tau3, tau3_complex
from .qstate import DensityMatrix, PureState, RankTwoMixture, eigendecompose_rank2, partial_trace
from .roofengine import RoofResult, roof
from .oracle import brute_force_roof, gap_report

__all__ = [
    "DensityMatrix", "Measure", "PureState", "RankTwoMixture", "RoofResult",
    "brute_force_roof", "eigendecompose_rank2", "gap_report", "partial_trace",
    "roof", "sqrt_tau3", "tau3", "tau3_complex",
]
