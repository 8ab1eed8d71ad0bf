"""Lower convex hull of the measure over the Bloch sphere, evaluated on the axis.

The roof at ``rho(p1)`` is the minimum of ``sum_i w_i g(x_i)`` over points
``x_i`` of the sphere with ``sum_i w_i x_i = (0, 0, 2 p1 - 1)`` and
``sum_i w_i = 1``.  It is solved by column generation: a linear program over
a finite set of sphere points, whose dual variables define an affine
function ``a(x)``; new points are priced by minimizing ``g - a`` on a dense
grid followed by simplex polishing.  Any affine ``a`` with ``g - a >= m``
everywhere gives the lower bound ``a(x_rho) + m``, so every iteration
brackets the roof between the LP value and ``LP + min(g - a)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .. import kernels
from ..invariant import Measure

GAP_TOL = 1e-10
MAX_ITER = 40
N_POLISH = 6
SEPARATION = 0.05          # radians between polished starting points
NEW_COLUMN_TOL = -1e-14
_LP_OPTIONS = {"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10}
_LP_ATTEMPTS = (("highs-ds", _LP_OPTIONS), ("highs-ds", {}), ("highs-ipm", {}))
DUPLICATE_DIGITS = 12


def canonical_angles(theta, phi):
    """Map arbitrary ``(theta, phi)`` to ``theta in [0, pi]``, ``phi in [0, 2pi)`` (same state up to phase)."""
    theta = np.mod(np.asarray(theta, dtype=np.float64), 2.0 * np.pi)
    phi = np.asarray(phi, dtype=np.float64)
    flip = theta > np.pi
    theta = np.where(flip, 2.0 * np.pi - theta, theta)
    phi = np.where(flip, phi + np.pi, phi)
    return theta, np.mod(phi, 2.0 * np.pi)


def bloch_vectors(theta, phi):
    st = np.sin(theta)
    return np.stack([st * np.cos(phi), st * np.sin(phi), np.cos(theta)])


def theta_of_p(p):
    return 2.0 * np.arccos(np.sqrt(np.clip(p, 0.0, 1.0)))


def z_of_angles(theta, phi):
    if theta >= np.pi - 1e-15:
        return complex(np.inf, 0.0)
    return complex(np.tan(0.5 * theta) * np.exp(1j * phi))


@dataclass(frozen=True, eq=False)
class HullSolution:
    value: float
    lower: float
    theta: np.ndarray
    phi: np.ndarray
    weights: np.ndarray
    g: np.ndarray
    iterations: int
    n_columns: int


def _solve_lp(g, vecs, target):
    a_eq = np.vstack([vecs, np.ones(g.size)])
    b_eq = np.append(target, 1.0)
    # tight tolerances first; HiGHS occasionally gives up on them, then relax
    for method, options in _LP_ATTEMPTS:
        res = linprog(g, A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method=method, options=options)
        if res.status == 0:
            return res.fun, res.x, res.eqlin.marginals
    raise ArithmeticError(f"hull linear program failed: {res.message}")


def _spread_starts(h, vecs, k):
    """Up to ``k`` grid points with the smallest ``h``, mutually separated on the sphere."""
    m = min(h.size, 64)
    idx = np.argpartition(h, m - 1)[:m]
    idx = idx[np.argsort(h[idx], kind="stable")]
    cos_sep = np.cos(SEPARATION)
    picked = []
    for i in idx:
        if all(vecs[:, i] @ vecs[:, j] < cos_sep for j in picked):
            picked.append(i)
            if len(picked) == k:
                break
    return picked


class HullProblem:
    """Column-generation state for one ``(coefficients, p1, measure)`` triple.

    Columns added with an explicit ``g`` (certified zero states get 0) keep
    that value instead of the rounded polynomial evaluation.
    """

    def __init__(self, coeffs, p1: float, measure: Measure):
        self.coeffs = np.ascontiguousarray(coeffs, dtype=np.complex128)
        self.p1 = float(p1)
        self.measure = measure
        self.target = np.array([0.0, 0.0, 2.0 * self.p1 - 1.0])
        self.theta = np.empty(0)
        self.phi = np.empty(0)
        self.g = np.empty(0)
        self._index = {}

    def measure_at(self, theta, phi):
        return self.measure.from_modulus(kernels.sphere_modulus(self.coeffs, theta, phi))

    def add(self, theta, phi, g=None):
        """Add columns; a point already present keeps the smaller of the two values."""
        theta, phi = canonical_angles(np.atleast_1d(theta), np.atleast_1d(phi))
        g = self.measure_at(theta, phi) if g is None else np.broadcast_to(np.asarray(g, dtype=np.float64), theta.shape)
        keys = map(tuple, np.round(bloch_vectors(theta, phi).T, DUPLICATE_DIGITS) + 0.0)
        new_t, new_p, new_g = [], [], []
        for key, t, f, v in zip(keys, theta, phi, g):
            i = self._index.get(key)
            if i is None:
                self._index[key] = self.g.size + len(new_g)
                new_t.append(t)
                new_p.append(f)
                new_g.append(v)
            elif i < self.g.size:
                self.g[i] = min(self.g[i], v)
            else:
                new_g[i - self.g.size] = min(new_g[i - self.g.size], v)
        self.theta = np.concatenate([self.theta, new_t])
        self.phi = np.concatenate([self.phi, new_p])
        self.g = np.concatenate([self.g, new_g])

    def solve(self):
        """LP over the current columns: ``(value, weights, duals)``."""
        return _solve_lp(self.g, bloch_vectors(self.theta, self.phi), self.target)

    def _support(self, w):
        keep = w > 1e-13
        return HullSolution(float(w[keep] @ self.g[keep]), -np.inf, self.theta[keep], self.phi[keep],
                            w[keep], self.g[keep], 0, self.g.size)

    def run(self, grid_theta, grid_phi, grid_g, gap_tol=GAP_TOL, max_iter=MAX_ITER) -> HullSolution:
        """Column generation priced on the given sphere grid; returns value, lower bound and support."""
        grid_vecs = bloch_vectors(grid_theta, grid_phi)
        sqrt_measure = self.measure.is_sqrt
        scale = self.measure.scale
        lower = -np.inf
        value, w, y = self.solve()
        it = 0
        for it in range(1, max_iter + 1):
            affine = y[:3] @ grid_vecs + y[3]
            h = grid_g - affine
            best = float(h.min())
            data = (self.coeffs, sqrt_measure, scale, np.ascontiguousarray(y, dtype=np.float64))
            new_t, new_p = [], []
            for i in _spread_starts(h, grid_vecs, N_POLISH):
                x0 = np.array([grid_theta[i], grid_phi[i]])
                x, fx, _ = kernels.nelder_mead(kernels.reduced_cost, x0, 0.02, 400, 1e-12, 1e-16, data)
                best = min(best, fx)
                if fx < NEW_COLUMN_TOL:
                    new_t.append(x[0])
                    new_p.append(x[1])
            lower = max(lower, value + min(0.0, best))
            if value - lower <= gap_tol or not new_t:
                break
            self.add(np.array(new_t), np.array(new_p))
            value, w, y = self.solve()
        sol = self._support(w)
        return HullSolution(sol.value, min(lower, sol.value), sol.theta, sol.phi, sol.weights, sol.g,
                            it, self.g.size)

    def candidates_only(self) -> HullSolution:
        value, w, _ = self.solve()
        return self._support(w)
