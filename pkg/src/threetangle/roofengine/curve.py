"""Characteristic curves ``E(p, phi)`` of a rank-2 mixture and their minimum over the phase."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import kernels
from ..errors import BadGridError
from ..invariant import Measure, as_measure
from ..qstate import RankTwoMixture
from .polynomial import span_polynomial

N_P = 201
N_PHI = 256
PHASE_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class CharacteristicCurve:
    """Measure sampled on ``sqrt(p) psi1^ + sqrt(1-p) e^{i phi} psi2^``.

    ``values[i, j]`` is the measure at ``(p_grid[i], phi_grid[j])``.
    ``min_curve[i]`` is the minimum over the phase at ``p_grid[i]``, refined
    between grid phases, so it never exceeds the row minimum of ``values``;
    ``argmin_phi`` holds the refined phase.
    """

    measure: Measure
    coefficients: np.ndarray
    p_grid: np.ndarray
    phi_grid: np.ndarray
    values: np.ndarray
    min_curve: np.ndarray
    argmin_phi: np.ndarray

    def at(self, p, phi):
        """Measure at arbitrary ``(p, phi)`` (broadcasting)."""
        theta = 2.0 * np.arccos(np.sqrt(np.clip(np.asarray(p, dtype=np.float64), 0.0, 1.0)))
        return self.measure.from_modulus(kernels.sphere_modulus(self.coefficients, theta, phi))

    def min_at(self, p):
        """Phase-minimized measure and its argmin at a single ``p``."""
        vals, phis = _phase_minimum(self.coefficients, np.array([float(p)]), self.phi_grid)
        return float(self.measure.from_modulus(vals[0])), float(phis[0])


def _phase_minimum(coeffs, p_grid, phi_grid):
    grid = kernels.curve_grid(coeffs, p_grid, phi_grid)
    return kernels.min_over_phase(coeffs, p_grid, phi_grid, grid, PHASE_TOL)


def characteristic_curve(mix: RankTwoMixture, measure="tau3", n_p: int = N_P, n_phi: int = N_PHI,
                         extra_p=(), cww_prefactor: bool | None = None,
                         coefficients=None) -> CharacteristicCurve:
    """Sample the measure on a uniform ``n_p x n_phi`` grid (plus ``extra_p`` rows).

    The p grid always contains both poles; ``extra_p`` nodes are merged in so
    that special heights (the mixture's own ``p1``, heights of zero states)
    sit exactly on the grid.
    """
    if n_p < 3 or n_phi < 4:
        raise BadGridError(f"grid too small: n_p={n_p} (>= 3), n_phi={n_phi} (>= 4)")
    m = as_measure(measure, cww_prefactor)
    c = span_polynomial(mix) if coefficients is None else np.asarray(coefficients, dtype=np.complex128)
    p_grid = np.linspace(0.0, 1.0, n_p)
    extra = np.clip(np.asarray(list(extra_p), dtype=np.float64), 0.0, 1.0)
    if extra.size:
        p_grid = np.unique(np.concatenate([p_grid, extra]))
    phi_grid = 2.0 * np.pi * np.arange(n_phi) / n_phi
    modulus = kernels.curve_grid(c, p_grid, phi_grid)
    min_mod, argmin = kernels.min_over_phase(c, p_grid, phi_grid, modulus, PHASE_TOL)
    return CharacteristicCurve(m, c, p_grid, phi_grid, m.from_modulus(modulus),
                               m.from_modulus(min_mod), argmin)
