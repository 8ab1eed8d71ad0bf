"""Brute-force convex roof: direct search over m-state decompositions.

Every m-element ensemble of a rank-2 mixture comes from an ``m x 2``
isometry ``U``: ``v_i = U_i1 sqrt(p1) psi1^ + U_i2 sqrt(p2) psi2^`` with
weights ``|v_i|^2``.  The isometry is parametrized by Gram-Schmidt on a free
complex matrix and the average measure is minimized by Nelder-Mead.

For the square root the landscape has a cusp at every zero state, and each
choice of which ensemble members sit on a zero is its own local minimum, so
purely random starts rarely find the global one.  Restart 0 therefore starts
from the best ensemble over a fixed dictionary of states (a Fibonacci
sphere, the poles, and numerically located minima of the threetangle),
chosen by a linear program; restarts ``1..restarts-1`` start at random.
The threetangle is always evaluated from the amplitudes, so this path
shares nothing with the span polynomial used by :mod:`threetangle.roofengine`.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from . import kernels
from ._accel import max_threads
from .invariant import Measure, as_measure
from .qstate import RankTwoMixture

RESTARTS = 32
MAX_EVALS = 2000
DEFAULT_M = 4
RANDOM_STEP = 0.1
SEED_STEP = 0.01
UNDERCUT_TOL = 1e-6
N_DICTIONARY = 2000
SCAN_GRID = (24, 48)


@dataclass(frozen=True, eq=False)
class IsometryDecomposition:
    """Ensemble ``{(w_i, phi_i^)}`` generated by the isometry ``U`` from a mixture."""

    m: int
    U: np.ndarray
    mixture: RankTwoMixture

    def vectors(self) -> np.ndarray:
        """Unnormalized members ``v_i`` (rows), ``|v_i|^2 = w_i``."""
        mix = self.mixture
        base = np.stack([np.sqrt(mix.p1) * mix.psi1_hat.amplitudes,
                         np.sqrt(1.0 - mix.p1) * mix.psi2_hat.amplitudes])
        return self.U @ base

    @property
    def weights(self) -> np.ndarray:
        return np.sum(np.abs(self.vectors()) ** 2, axis=1)

    def states(self) -> np.ndarray:
        v = self.vectors()
        nrm = np.linalg.norm(v, axis=1, keepdims=True)
        return np.divide(v, nrm, out=np.zeros_like(v), where=nrm > 0)

    def reconstruction_residual(self) -> float:
        v = self.vectors()
        rho = self.mixture.density_matrix().matrix
        return float(np.linalg.norm(v.T @ v.conj() - rho))

    def isometry_defect(self) -> float:
        return float(np.max(np.abs(self.U.conj().T @ self.U - np.eye(2))))


@dataclass(frozen=True, eq=False)
class OracleResult:
    value: float
    decomposition: IsometryDecomposition
    restart: int
    evaluations: int
    dictionary_value: float


def _fibonacci_sphere(n):
    i = np.arange(n) + 0.5
    return np.arccos(1.0 - 2.0 * i / n), np.mod(np.pi * (1.0 + 5.0 ** 0.5) * i, 2.0 * np.pi)


def _span_states(u1, u2, theta, phi):
    a = np.cos(0.5 * theta)
    b = np.sin(0.5 * theta) * np.exp(1j * phi)
    return a[:, None] * u1[None, :] + b[:, None] * u2[None, :]


def low_tangle_states(mix: RankTwoMixture):
    """Local minima of ``|T|`` over the Bloch sphere of ``mix``, polished by Nelder-Mead.

    Returns angle pairs ``(theta, phi)``; zero states of the mixture show up
    here with ``|T|`` at rounding level.
    """
    u1 = mix.psi1_hat.amplitudes
    u2 = mix.psi2_hat.amplitudes
    n_t, n_f = SCAN_GRID
    th = (np.arange(n_t) + 0.5) * np.pi / n_t
    ph = np.arange(n_f) * 2.0 * np.pi / n_f
    tt, ff = np.meshgrid(th, ph, indexing="ij")
    grid = np.abs(kernels.tau3_complex_batch(_span_states(u1, u2, tt.ravel(), ff.ravel()))).reshape(n_t, n_f)
    padded = np.pad(grid, ((1, 1), (0, 0)), constant_values=np.inf)
    is_min = np.ones_like(grid, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di or dj:
                shifted = np.roll(padded, -dj, axis=1)[1 + di:1 + di + n_t]
                is_min &= grid <= shifted
    out = []
    for i, j in zip(*np.nonzero(is_min)):
        x, _, _ = kernels.nelder_mead(kernels.span_state_modulus, np.array([th[i], ph[j]]), 0.05, 400,
                                      1e-13, 1e-18, (u1, u2))
        out.append(x)
    return out


def dictionary_ensemble(mix: RankTwoMixture, meas: Measure, m: int):
    """Best ensemble over the state dictionary: ``(value, starting parameters)``."""
    th, ph = _fibonacci_sphere(N_DICTIONARY)
    extra = low_tangle_states(mix)
    th = np.concatenate([[0.0, np.pi], th, [x[0] for x in extra]])
    ph = np.concatenate([[0.0, 0.0], ph, [x[1] for x in extra]])
    states = _span_states(mix.psi1_hat.amplitudes, mix.psi2_hat.amplitudes, th, ph)
    g = meas.from_modulus(np.abs(kernels.tau3_complex_batch(states)))
    st = np.sin(th)
    a_eq = np.vstack([st * np.cos(ph), st * np.sin(ph), np.cos(th), np.ones_like(th)])
    res = linprog(g, A_eq=a_eq, b_eq=[0.0, 0.0, 2.0 * mix.p1 - 1.0, 1.0], bounds=(0, None), method="highs-ds")
    w = res.x
    order = np.argsort(-w, kind="stable")[:m]
    p1 = mix.p1
    rows = np.zeros((m, 2), dtype=np.complex128)
    for r, i in enumerate(order):
        if w[i] <= 0.0:
            continue
        rows[r, 0] = np.sqrt(w[i] / p1) * np.cos(0.5 * th[i])
        rows[r, 1] = np.sqrt(w[i] / (1.0 - p1)) * np.sin(0.5 * th[i]) * np.exp(1j * ph[i])
    params = np.column_stack([rows[:, 0].real, rows[:, 0].imag, rows[:, 1].real, rows[:, 1].imag]).ravel()
    return float(res.fun), params


def _search(args):
    k, x0, step, data, max_evals = args
    x, fx, n = kernels.nelder_mead(kernels.ensemble_average, x0, step, max_evals, 1e-12, 1e-15, data)
    return k, float(fx), x, int(n)


def brute_force_roof(mix: RankTwoMixture, measure="tau3", m: int = DEFAULT_M, restarts: int = RESTARTS,
                     seed: int = 0, max_evals: int = MAX_EVALS,
                     cww_prefactor: bool | None = None) -> OracleResult:
    """Best average measure over ``m``-state decompositions; always an upper bound on the roof.

    Restart ``k >= 1`` draws its start from ``numpy.random.default_rng([seed, k])``,
    so results do not depend on the number of worker threads.
    """
    if not 2 <= m <= 6:
        raise ValueError(f"m must be in 2..6, got {m}")
    if restarts < 1:
        raise ValueError("restarts must be positive")
    meas = as_measure(measure, cww_prefactor)
    if min(mix.p1, 1.0 - mix.p1) < 1e-12:
        # pure state: every decomposition is the state itself
        pure = mix.psi1_hat if mix.p1 >= 0.5 else mix.psi2_hat
        val = float(meas(pure))
        u = np.zeros((m, 2), dtype=np.complex128)
        u[0, 0] = u[1, 1] = 1.0
        return OracleResult(val, IsometryDecomposition(m, u, mix), 0, 0, val)
    base1 = np.ascontiguousarray(np.sqrt(mix.p1) * mix.psi1_hat.amplitudes)
    base2 = np.ascontiguousarray(np.sqrt(1.0 - mix.p1) * mix.psi2_hat.amplitudes)
    data = (base1, base2, m, meas.is_sqrt, meas.scale)
    dict_value, x0 = dictionary_ensemble(mix, meas, m)
    jobs = [(0, x0, SEED_STEP, data, max_evals)]
    for k in range(1, restarts):
        start = np.random.default_rng([seed, k]).normal(size=4 * m)
        jobs.append((k, start, RANDOM_STEP, data, max_evals))
    workers = min(max_threads(), restarts)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            runs = list(pool.map(_search, jobs))
    else:
        runs = [_search(j) for j in jobs]
    # deterministic reduction: smallest value, lowest restart index on ties
    k, fx, x, _ = min(runs, key=lambda r: (r[1], r[0]))
    u = kernels.isometry_columns(x, m)
    evals = sum(r[3] for r in runs)
    return OracleResult(max(fx, 0.0), IsometryDecomposition(m, u, mix), k, evals, dict_value)


@dataclass(frozen=True)
class GapRow:
    m: int
    oracle: float
    engine: float
    gap: float

    @property
    def inconsistent(self) -> bool:
        """The oracle found a decomposition below the engine value."""
        return self.gap < -UNDERCUT_TOL


def gap_report(mix: RankTwoMixture, measure="tau3", m_max: int = DEFAULT_M, restarts: int = RESTARTS,
               seed: int = 0, engine_value: float | None = None,
               cww_prefactor: bool | None = None) -> list[GapRow]:
    """Oracle value for ``m = 2..m_max`` against the engine roof; ``gap = oracle - engine``."""
    meas = as_measure(measure, cww_prefactor)
    if engine_value is None:
        from .roofengine import roof
        engine_value = roof(mix, meas).value
    rows = []
    for m in range(2, m_max + 1):
        val = brute_force_roof(mix, meas, m=m, restarts=restarts, seed=seed).value
        rows.append(GapRow(m, val, engine_value, val - engine_value))
    return rows
