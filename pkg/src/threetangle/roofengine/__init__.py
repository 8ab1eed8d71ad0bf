"""Characteristic curves, zero sets, convex envelopes and roof certification."""

from .curve import CharacteristicCurve, characteristic_curve
from .decompose import decomposition_weights, reconstruction_residual
from .envelope import Envelope, convexify
from .pairing import Pairing, paired_bound
from .polynomial import ZeroSet, span_polynomial, zero_polytope, zeros_from_coefficients
from .roof import CERT_TOL, EXACT, UPPER_BOUND, RoofResult, certify_optimal, roof, roof_with_curve

__all__ = [
    "CERT_TOL", "EXACT", "UPPER_BOUND",
    "CharacteristicCurve", "Envelope", "Pairing", "RoofResult", "ZeroSet",
    "certify_optimal", "characteristic_curve", "convexify", "decomposition_weights",
    "paired_bound", "reconstruction_residual", "roof", "roof_with_curve", "span_polynomial",
    "zero_polytope", "zeros_from_coefficients",
]
