"""Fixed decomposition families and the average measure they achieve along ``p1``.

* ``antipodal(phi)``: the two states at height ``p1`` with phases ``phi`` and ``phi + pi``.
* ``m_phase(m, phi0)``: ``m`` states at height ``p1`` with equally spaced phases.
* ``anchor(z0, phi)``: the state ``Psi_z0`` combined with the one state on the
  meridian ``phi`` that completes a decomposition of ``rho(p1)``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .. import kernels
from ..invariant import as_measure
from ..qstate import RankTwoMixture, is_infinite, p_of_z, z_of
from .decompose import decomposition_weights
from .polynomial import span_polynomial

ANTIPODAL = "antipodal"
ANCHOR = "anchor"
M_PHASE = "m_phase"


@dataclass(frozen=True)
class Pairing:
    kind: str
    phi: float = 0.0
    m: int = 2
    z0: complex | None = None

    @classmethod
    def antipodal(cls, phi: float) -> "Pairing":
        return cls(ANTIPODAL, phi, 2)

    @classmethod
    def m_phase(cls, m: int, phi0: float = 0.0) -> "Pairing":
        if m < 3:
            raise ValueError("m_phase needs m >= 3; use antipodal for two states")
        return cls(M_PHASE, phi0, m)

    @classmethod
    def anchor(cls, z0: complex, phi: float | None = None) -> "Pairing":
        """Anchor at ``Psi_z0``; the partner meridian defaults to the opposite phase."""
        if is_infinite(z0):
            raise ValueError("the anchor must be a finite z")
        if phi is None:
            phi = cmath.phase(z0) + math.pi
        return cls(ANCHOR, phi, 2, complex(z0))

    def points(self, p1: float):
        """Sphere states (as z values) of this family that should decompose ``rho(p1)``."""
        if self.kind in (ANTIPODAL, M_PHASE):
            return [z_of(p1, self.phi + 2.0 * math.pi * k / self.m) for k in range(self.m)]
        if self.kind == ANCHOR:
            return [self.z0, _anchor_partner(self.z0, self.phi, p1)]
        raise ValueError(f"unknown pairing kind {self.kind!r}")


def _anchor_partner(z0, phi, p1):
    """State on meridian ``phi`` on the chord from ``Psi_z0`` through the axis point of ``rho(p1)``."""
    q0 = p_of_z(z0)
    a = np.array([2.0 * q0 * z0.real, 2.0 * q0 * z0.imag, 2.0 * q0 - 1.0])
    d = np.array([0.0, 0.0, 2.0 * p1 - 1.0]) - a
    dd = d @ d
    if dd < 1e-24:
        return z0
    b = a - 2.0 * (a @ d) / dd * d
    # the partner's height fixes |z|; its phase is the requested meridian
    return z_of(0.5 * (1.0 + b[2]), phi)


def paired_bound(mix: RankTwoMixture, measure, pairing: Pairing, p_values,
                 cww_prefactor: bool | None = None) -> np.ndarray:
    """Average measure of the ``pairing`` decomposition of ``rho(p)`` for each ``p`` in ``p_values``.

    The mixture only provides the two eigenstates; ``p`` replaces its ``p1``.
    Raises :class:`~threetangle.errors.InfeasibleError` when the family does
    not decompose ``rho(p)``.
    """
    m = as_measure(measure, cww_prefactor)
    c = span_polynomial(mix)
    out = np.empty(len(p_values))
    for i, p in enumerate(p_values):
        zs = pairing.points(float(p))
        q = decomposition_weights(float(p), zs)
        theta = np.array([math.pi if is_infinite(z) else 2.0 * math.atan(abs(z)) for z in zs])
        phi = np.array([0.0 if is_infinite(z) else cmath.phase(z) for z in zs])
        out[i] = q @ m.from_modulus(kernels.sphere_modulus(c, theta, phi))
    return out
