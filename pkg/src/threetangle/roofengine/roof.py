"""Convex roof of the threetangle (or its square root) for a rank-2 mixture."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import nnls

from ..errors import DegenerateMeasureError
from ..invariant import Measure, as_measure
from ..qstate import RankTwoMixture, is_infinite
from .curve import N_P, N_PHI, CharacteristicCurve, characteristic_curve
from .decompose import _system, reconstruction_residual
from .envelope import convexify
from .hull import HullProblem, theta_of_p, z_of_angles
from .polynomial import ROOT_TOL, span_polynomial, zeros_from_coefficients

CERT_TOL = 1e-6
EXACT = "exact"
UPPER_BOUND = "upper_bound"


@dataclass(frozen=True, eq=False)
class RoofResult:
    """Roof value with a realizing decomposition ``((weight, z), ...)``.

    ``certificate`` names the optimality proof behind ``status == "exact"``:
    ``"vanishing"`` (measure is zero on the whole range), ``"curve"`` (the
    value meets the convexified minimal characteristic curve) or
    ``"minorant"`` (an affine function below the measure on the whole sphere
    matches the value).  ``lower_bound`` is the best lower bound found.
    """

    value: float
    decomposition: tuple
    status: str
    residual: float
    p1: float
    measure: Measure
    certificate: str | None = None
    lower_bound: float = 0.0
    envelope_value: float = float("nan")
    diagnostics: dict = field(default_factory=dict)

    @property
    def is_exact(self) -> bool:
        return self.status == EXACT

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for w, _ in self.decomposition])

    @property
    def points(self) -> list:
        return [z for _, z in self.decomposition]


def _angles_of_z(z):
    if is_infinite(z):
        return np.pi, 0.0
    z = complex(z)
    return 2.0 * np.arctan(abs(z)), float(np.angle(z))


def _chord_partner(theta, phi, p1):
    """Second point on the sphere on the line from ``(theta, phi)`` through the axis point of ``rho(p1)``."""
    a = np.array([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)])
    r = np.array([0.0, 0.0, 2.0 * p1 - 1.0])
    d = r - a
    dd = d @ d
    if dd < 1e-24:
        return None
    # |a + t d|^2 = 1 has roots t = 0 and t = -2 a.d / d.d
    t = -2.0 * (a @ d) / dd
    b = a + t * d
    return float(np.arccos(np.clip(b[2], -1.0, 1.0))), float(np.arctan2(b[1], b[0]))


def _realize(p1, zs):
    """Weights on the LP support recomputed to full precision; the simplex support is affinely independent."""
    q, _ = nnls(_system(zs), np.array([p1, 0.0, 0.0, 1.0]))
    return q, reconstruction_residual(p1, zs, q)


def eigen_average(curve: CharacteristicCurve, p1: float) -> float:
    top = float(curve.at(1.0, 0.0))
    bottom = float(curve.at(0.0, 0.0))
    return p1 * top + (1.0 - p1) * bottom


def _vanishing_result(mix, m):
    p1 = mix.p1
    decomp = ((p1, 0j), (1.0 - p1, complex(np.inf, 0.0)))
    return RoofResult(0.0, decomp, EXACT, 0.0, p1, m, "vanishing", 0.0, 0.0,
                      {"stage": "vanishing", "n_columns": 2, "iterations": 0, "gap": 0.0, "zero_set": None})


def roof(mix: RankTwoMixture, measure="tau3", *, cww_prefactor: bool | None = None,
         n_p: int = N_P, n_phi: int = N_PHI, cert_tol: float = CERT_TOL) -> RoofResult:
    """Convex roof of ``measure`` at ``mix``.

    The minimal characteristic curve is convexified to get a lower bound at
    ``p1``.  A small linear program over structured candidates (poles,
    zero states, phase-minimizing states at ``p1`` and at the envelope's
    contact points, their antipodes and chord partners through ``rho``) is
    tried first; if it does not meet the envelope, column generation over
    the whole sphere takes over.  The returned value is always realized by
    the returned decomposition.
    """
    return roof_with_curve(mix, measure, cww_prefactor=cww_prefactor, n_p=n_p, n_phi=n_phi,
                           cert_tol=cert_tol)[0]


def roof_with_curve(mix, measure="tau3", *, cww_prefactor=None, n_p=N_P, n_phi=N_PHI, cert_tol=CERT_TOL):
    m = as_measure(measure, cww_prefactor)
    p1 = float(mix.p1)
    coeffs = span_polynomial(mix)
    try:
        zeros = zeros_from_coefficients(coeffs)
    except DegenerateMeasureError:
        return _vanishing_result(mix, m), None

    root_ps = [1.0 / (1.0 + abs(z) ** 2) for z, _ in zeros.roots]
    curve = characteristic_curve(mix, m, n_p, n_phi, extra_p=[p1] + root_ps, coefficients=coeffs)
    env = convexify(curve.p_grid, curve.min_curve)
    env_val = float(env(p1))

    problem = HullProblem(coeffs, p1, m)
    problem.add(np.array([0.0, np.pi]), np.array([0.0, 0.0]))
    root_angles = [_angles_of_z(z) for z in zeros.points()]
    certified = [z for (z, _), r in zip(zeros.roots, zeros.residuals()) if r < ROOT_TOL]
    for z in certified:
        th, ph = _angles_of_z(z)
        problem.add(th, ph, 0.0)
    if zeros.includes_infinity:
        problem.add(np.pi, 0.0, 0.0)
    # structured candidates
    ps = np.concatenate([[p1], env.contact_points])
    mins = [curve.min_at(p) for p in ps]
    for p, (_, ph) in zip(ps, mins):
        th = theta_of_p(p)
        problem.add(np.array([th, th]), np.array([ph, ph + np.pi]))
    for th, ph in root_angles + [(theta_of_p(p), ph) for p, (_, ph) in zip(ps, mins)]:
        partner = _chord_partner(th, ph, p1)
        if partner is not None:
            problem.add(*partner)
        problem.add(th, ph + np.pi)

    sol = problem.candidates_only()
    diagnostics = {"stage": "candidates", "n_columns": sol.n_columns, "iterations": 0}
    lower = min(env_val, sol.value)
    certificate = "curve" if sol.value <= env_val + cert_tol else None
    if certificate is None:
        # column generation, seeded with the minimal curve and its antipodes
        th_curve = theta_of_p(curve.p_grid)
        problem.add(np.concatenate([th_curve, th_curve]),
                    np.concatenate([curve.argmin_phi, curve.argmin_phi + np.pi]))
        grid_t = np.repeat(th_curve, curve.phi_grid.size)
        grid_p = np.tile(curve.phi_grid, curve.p_grid.size)
        sol = problem.run(grid_t, grid_p, curve.values.ravel())
        diagnostics = {"stage": "column_generation", "n_columns": sol.n_columns, "iterations": sol.iterations}
        lower = max(min(env_val, sol.value), sol.lower)
        if sol.value <= env_val + cert_tol:
            certificate = "curve"
        elif sol.value <= sol.lower + cert_tol:
            certificate = "minorant"

    zs = [z_of_angles(t, f) for t, f in zip(sol.theta, sol.phi)]
    weights, residual = _realize(p1, zs)
    keep = weights > 0.0
    zs = [z for z, k in zip(zs, keep) if k]
    weights = weights[keep]
    value = float(weights @ sol.g[keep])

    eig = eigen_average(curve, p1)
    if value > eig or residual > 1e-9:
        # never report worse than the spectral decomposition
        zs = [0j, complex(np.inf, 0.0)]
        weights = np.array([p1, 1.0 - p1])
        residual = reconstruction_residual(p1, zs, weights)
        value = eig
    value = max(value, 0.0)
    if certificate == "curve" and value > env_val + cert_tol:
        certificate = None
    if certificate == "minorant" and value > sol.lower + cert_tol:
        certificate = None
    status = EXACT if certificate else UPPER_BOUND
    diagnostics.update({"gap": value - lower, "eigen_average": eig,
                        "zero_set": zeros, "convex_envelope": env})
    decomposition = tuple((float(w), z) for w, z in zip(weights, zs))
    result = RoofResult(value, decomposition, status, residual, p1, m, certificate,
                        min(lower, value), env_val, diagnostics)
    return result, curve


def certify_optimal(result: RoofResult, curve: CharacteristicCurve, cert_tol: float = CERT_TOL) -> bool:
    """True when the decomposition's average measure lies on the convexified minimal curve at ``p1``."""
    if result.residual >= 1e-8:
        raise ValueError("decomposition does not reconstruct the mixture")
    env = convexify(curve.p_grid, curve.min_curve)
    return bool(result.value <= float(env(result.p1)) + cert_tol)
