"""Weights that turn a set of Bloch-sphere states into a decomposition of ``rho(p1)``.

In the eigenbasis ``(psi1^, psi2^)`` the projector on ``Psi_z`` is
``p(z) [[1, z*], [z, |z|^2]]`` with ``p(z) = 1 / (1 + |z|^2)``, and the
mixture is ``diag(p1, 1 - p1)``.  Frobenius distances computed in this
2x2 picture equal those of the full 8x8 matrices because the eigenbasis is
orthonormal.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import nnls

from ..errors import InfeasibleError
from ..qstate import is_infinite, p_of_z

FEASIBILITY_TOL = 1e-10


def projector_entries(z):
    """``(p(z), p(z) * z)``: the diagonal weight and the lower off-diagonal entry."""
    if is_infinite(z):
        return 0.0, 0j
    z = complex(z)
    p = p_of_z(z)
    return p, p * z


def _system(points):
    cols = []
    for z in points:
        p, off = projector_entries(z)
        cols.append((p, off.real, off.imag, 1.0))
    return np.array(cols, dtype=np.float64).T


def reconstruction_residual(p1: float, points, weights) -> float:
    """Frobenius norm of ``sum_i w_i |Psi_zi><Psi_zi| - rho(p1)``."""
    d00 = -p1
    off = 0j
    for w, z in zip(weights, points):
        p, o = projector_entries(z)
        d00 += w * p
        off += w * o
    # trace mismatch enters the lower diagonal entry
    d11 = sum(weights) - 1.0 - d00
    return float(np.sqrt(d00 ** 2 + d11 ** 2 + 2.0 * abs(off) ** 2))


def decomposition_weights(p1: float, points) -> np.ndarray:
    """Nonnegative weights ``q_i`` with ``sum q_i |Psi_zi><Psi_zi| = rho(p1)`` and ``sum q_i = 1``.

    ``points`` may contain ``inf`` (the state ``psi2^``).  Raises
    :class:`InfeasibleError` when ``rho(p1)`` is not in the convex hull of
    the given states.
    """
    points = list(points)
    if not points:
        raise InfeasibleError("no points given")
    a = _system(points)
    b = np.array([p1, 0.0, 0.0, 1.0])
    q, _ = nnls(a, b)
    if reconstruction_residual(p1, points, q) > FEASIBILITY_TOL:
        raise InfeasibleError(f"rho(p1={p1:.6g}) is not a convex combination of the given states")
    return q
