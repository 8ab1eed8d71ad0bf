"""Hot numeric kernels.

Each vectorizable kernel exists twice: a loop version compiled with numba and
a pure-numpy version.  The public names are bound to the compiled version
unless acceleration is disabled (see :mod:`threetangle._accel`).  Sequential
kernels (hull scan, simplex search) are written once and only jitted when
numba is active.
"""

import numpy as np

from ._accel import USE_NUMBA, njit

# index pairs/quads of the three-qubit hyperdeterminant, basis index = q1q2q3
_D1 = ((0, 7), (1, 6), (2, 5), (4, 3))
_D2 = ((0, 7, 3, 4), (0, 7, 5, 2), (0, 7, 6, 1), (3, 4, 5, 2), (3, 4, 6, 1), (5, 2, 6, 1))
_D3 = ((0, 6, 5, 3), (7, 1, 2, 4))


# --------------------------------------------------------------------------
# threetangle polynomial on batches of 3-qubit amplitude vectors
# --------------------------------------------------------------------------

def tau3_terms(amps):
    """The three monomial sums ``(d1, d2, d3)``."""
    a = np.asarray(amps, dtype=np.complex128)
    d1 = sum(a[..., i] ** 2 * a[..., j] ** 2 for i, j in _D1)
    d2 = sum(a[..., i] * a[..., j] * a[..., k] * a[..., l] for i, j, k, l in _D2)
    d3 = sum(a[..., i] * a[..., j] * a[..., k] * a[..., l] for i, j, k, l in _D3)
    return d1, d2, d3


def tau3_complex_numpy(amps):
    d1, d2, d3 = tau3_terms(amps)
    return d1 - 2.0 * d2 + 4.0 * d3


@njit
def _tau3_one(p):
    d1 = p[0] * p[0] * p[7] * p[7] + p[1] * p[1] * p[6] * p[6] \
        + p[2] * p[2] * p[5] * p[5] + p[4] * p[4] * p[3] * p[3]
    x07 = p[0] * p[7]
    x34 = p[3] * p[4]
    x25 = p[5] * p[2]
    x16 = p[6] * p[1]
    d2 = x07 * x34 + x07 * x25 + x07 * x16 + x34 * x25 + x34 * x16 + x25 * x16
    d3 = p[0] * p[6] * p[5] * p[3] + p[7] * p[1] * p[2] * p[4]
    return d1 - 2.0 * d2 + 4.0 * d3


@njit
def _tau3_batch_loop(amps):
    n = amps.shape[0]
    out = np.empty(n, dtype=np.complex128)
    for i in range(n):
        out[i] = _tau3_one(amps[i])
    return out


def tau3_complex_numba(amps):
    a = np.ascontiguousarray(amps, dtype=np.complex128)
    shape = a.shape[:-1]
    return _tau3_batch_loop(a.reshape(-1, 8)).reshape(shape)


# --------------------------------------------------------------------------
# measure on the Bloch sphere of a rank-2 mixture from the quartic coefficients
#   T(alpha psi1 + beta psi2) = sum_k c_k alpha^(4-k) beta^k
#   alpha = cos(theta/2), beta = sin(theta/2) e^{i phi}
# --------------------------------------------------------------------------

def sphere_modulus_numpy(coeffs, theta, phi):
    c = np.asarray(coeffs, dtype=np.complex128)
    al = np.cos(0.5 * np.asarray(theta))
    be = np.sin(0.5 * np.asarray(theta)) * np.exp(1j * np.asarray(phi))
    t = c[0] * al ** 4 + c[1] * al ** 3 * be + c[2] * al ** 2 * be ** 2 + c[3] * al * be ** 3 + c[4] * be ** 4
    return np.abs(t)


@njit
def _sphere_point(c, th, ph):
    al = np.cos(0.5 * th)
    s = np.sin(0.5 * th)
    be = s * complex(np.cos(ph), np.sin(ph))
    # Horner in beta/alpha-homogeneous form
    t = (((c[4] * be + c[3] * al) * be + c[2] * al * al) * be + c[1] * al * al * al) * be \
        + c[0] * al * al * al * al
    return abs(t)


@njit
def _sphere_loop(c, theta, phi):
    n = theta.size
    out = np.empty(n)
    for i in range(n):
        out[i] = _sphere_point(c, theta[i], phi[i])
    return out


def sphere_modulus_numba(coeffs, theta, phi):
    c = np.ascontiguousarray(coeffs, dtype=np.complex128)
    th, ph = np.broadcast_arrays(np.asarray(theta, dtype=np.float64), np.asarray(phi, dtype=np.float64))
    shape = th.shape
    return _sphere_loop(c, np.ascontiguousarray(th).reshape(-1), np.ascontiguousarray(ph).reshape(-1)).reshape(shape)


def curve_grid_numpy(coeffs, p_grid, phi_grid):
    """|T| at sqrt(p) psi1 + sqrt(1-p) e^{i phi} psi2 on the (p, phi) grid."""
    theta = 2.0 * np.arccos(np.sqrt(np.clip(np.asarray(p_grid), 0.0, 1.0)))
    th, ph = np.meshgrid(theta, np.asarray(phi_grid), indexing="ij")
    return sphere_modulus_numpy(coeffs, th, ph)


@njit
def _curve_grid_loop(c, p_grid, phi_grid):
    n_p = p_grid.size
    n_phi = phi_grid.size
    out = np.empty((n_p, n_phi))
    for i in range(n_p):
        p = min(max(p_grid[i], 0.0), 1.0)
        th = 2.0 * np.arccos(np.sqrt(p))
        for j in range(n_phi):
            out[i, j] = _sphere_point(c, th, phi_grid[j])
    return out


def curve_grid_numba(coeffs, p_grid, phi_grid):
    return _curve_grid_loop(np.ascontiguousarray(coeffs, dtype=np.complex128),
                            np.ascontiguousarray(p_grid, dtype=np.float64),
                            np.ascontiguousarray(phi_grid, dtype=np.float64))


# --------------------------------------------------------------------------
# minimum over the phase at each p: grid local minima refined by golden section
# --------------------------------------------------------------------------

_GOLD = 0.3819660112501051
MAX_BRACKETS = 4


def _bracket_starts(vals):
    """Grid indices of the local minima worth refining in one row of the (p, phi) grid."""
    n = vals.size
    lo = vals.min()
    if vals.max() - lo <= 1e-15 * max(abs(lo), 1.0):
        return np.array([int(np.argmin(vals))])
    left = np.roll(vals, 1)
    right = np.roll(vals, -1)
    idx = np.nonzero((vals <= left) & (vals <= right))[0]
    if idx.size > MAX_BRACKETS:
        idx = idx[np.argsort(vals[idx], kind="stable")[:MAX_BRACKETS]]
    return idx if idx.size else np.array([int(np.argmin(vals))], dtype=np.int64)


def min_over_phase_numpy(coeffs, p_grid, phi_grid, grid_vals, tol):
    c = np.asarray(coeffs, dtype=np.complex128)
    h = phi_grid[1] - phi_grid[0]
    rows, starts = [], []
    for i in range(p_grid.size):
        for j in _bracket_starts(grid_vals[i]):
            rows.append(i)
            starts.append(phi_grid[j])
    rows = np.asarray(rows)
    th = 2.0 * np.arccos(np.sqrt(np.clip(p_grid[rows], 0.0, 1.0)))
    a = np.asarray(starts) - h
    b = np.asarray(starts) + h
    x1 = a + _GOLD * (b - a)
    x2 = b - _GOLD * (b - a)
    f1 = sphere_modulus_numpy(c, th, x1)
    f2 = sphere_modulus_numpy(c, th, x2)
    while np.max(b - a) > tol:
        left = f1 < f2
        b = np.where(left, x2, b)
        a = np.where(left, a, x1)
        nx1 = np.where(left, a + _GOLD * (b - a), x2)
        nx2 = np.where(left, x1, b - _GOLD * (b - a))
        fn = sphere_modulus_numpy(c, th, np.where(left, nx1, nx2))
        f1, f2 = np.where(left, fn, f2), np.where(left, f1, fn)
        x1, x2 = nx1, nx2
    x = 0.5 * (a + b)
    fx = sphere_modulus_numpy(c, th, x)
    best_val = grid_vals.min(axis=1).copy()
    best_phi = phi_grid[np.argmin(grid_vals, axis=1)].copy()
    for k in range(rows.size):
        i = rows[k]
        if fx[k] < best_val[i]:
            best_val[i] = fx[k]
            best_phi[i] = x[k]
    return best_val, np.mod(best_phi, 2.0 * np.pi)


@njit
def _golden_phase(c, th, lo, hi, tol):
    a = lo
    b = hi
    x1 = a + _GOLD * (b - a)
    x2 = b - _GOLD * (b - a)
    f1 = _sphere_point(c, th, x1)
    f2 = _sphere_point(c, th, x2)
    while b - a > tol:
        if f1 < f2:
            b = x2
            x2 = x1
            f2 = f1
            x1 = a + _GOLD * (b - a)
            f1 = _sphere_point(c, th, x1)
        else:
            a = x1
            x1 = x2
            f1 = f2
            x2 = b - _GOLD * (b - a)
            f2 = _sphere_point(c, th, x2)
    x = 0.5 * (a + b)
    return x, _sphere_point(c, th, x)


@njit
def _min_over_phase_loop(c, p_grid, phi_grid, grid_vals, tol):
    n_p, n_phi = grid_vals.shape
    h = phi_grid[1] - phi_grid[0]
    best_val = np.empty(n_p)
    best_phi = np.empty(n_p)
    cand = np.empty(n_phi, dtype=np.int64)
    for i in range(n_p):
        row = grid_vals[i]
        jmin = np.argmin(row)
        best_val[i] = row[jmin]
        best_phi[i] = phi_grid[jmin]
        lo = row[jmin]
        if row.max() - lo <= 1e-15 * max(abs(lo), 1.0):
            cand[0] = jmin
            n_c = 1
        else:
            n_c = 0
            for j in range(n_phi):
                if row[j] <= row[j - 1] and row[j] <= row[(j + 1) % n_phi]:
                    cand[n_c] = j
                    n_c += 1
            if n_c > MAX_BRACKETS:
                order = np.argsort(row[cand[:n_c]], kind="mergesort")
                sel = cand[:n_c][order[:MAX_BRACKETS]].copy()
                n_c = MAX_BRACKETS
                cand[:n_c] = sel
        th = 2.0 * np.arccos(np.sqrt(min(max(p_grid[i], 0.0), 1.0)))
        for k in range(n_c):
            ph0 = phi_grid[cand[k]]
            x, fx = _golden_phase(c, th, ph0 - h, ph0 + h, tol)
            if fx < best_val[i]:
                best_val[i] = fx
                best_phi[i] = x
        best_phi[i] = best_phi[i] % (2.0 * np.pi)
    return best_val, best_phi


def min_over_phase_numba(coeffs, p_grid, phi_grid, grid_vals, tol):
    return _min_over_phase_loop(np.ascontiguousarray(coeffs, dtype=np.complex128),
                                np.ascontiguousarray(p_grid, dtype=np.float64),
                                np.ascontiguousarray(phi_grid, dtype=np.float64),
                                np.ascontiguousarray(grid_vals, dtype=np.float64), tol)


# --------------------------------------------------------------------------
# lower convex hull of a polyline (monotone chain, O(n) for sorted input)
# --------------------------------------------------------------------------

@njit
def lower_hull_indices(xs, ys):
    n = xs.size
    hull = np.empty(n, dtype=np.int64)
    k = 0
    for i in range(n):
        while k >= 2:
            i0 = hull[k - 2]
            i1 = hull[k - 1]
            cross = (xs[i1] - xs[i0]) * (ys[i] - ys[i0]) - (ys[i1] - ys[i0]) * (xs[i] - xs[i0])
            if cross <= 0.0:
                k -= 1
            else:
                break
        hull[k] = i
        k += 1
    return hull[:k]


# --------------------------------------------------------------------------
# Nelder-Mead simplex search with a fixed evaluation budget
# --------------------------------------------------------------------------

@njit
def nelder_mead(f, x0, step, max_evals, xatol, fatol, data):
    """Adaptive Nelder-Mead (dimension-dependent coefficients).

    ``f(x, data)`` is minimized from ``x0`` with an initial simplex of edge
    ``step``.  Stops after ``max_evals`` evaluations or when both the simplex
    diameter and the spread of values fall below ``xatol``/``fatol``.
    Returns ``(x_best, f_best, n_evals)``.
    """
    n = x0.size
    alpha = 1.0
    beta = 1.0 + 2.0 / n
    gamma = 0.75 - 1.0 / (2.0 * n)
    delta = 1.0 - 1.0 / n
    sim = np.empty((n + 1, n))
    fs = np.empty(n + 1)
    for i in range(n + 1):
        for j in range(n):
            sim[i, j] = x0[j]
        if i > 0:
            sim[i, i - 1] += step
        fs[i] = f(sim[i], data)
    evals = n + 1
    xbar = np.empty(n)
    xr = np.empty(n)
    xe = np.empty(n)
    xc = np.empty(n)
    while evals < max_evals:
        order = np.argsort(fs)
        sim = sim[order]
        fs = fs[order]
        diam = 0.0
        for i in range(1, n + 1):
            for j in range(n):
                d = abs(sim[i, j] - sim[0, j])
                if d > diam:
                    diam = d
        if diam <= xatol and fs[n] - fs[0] <= fatol:
            break
        for j in range(n):
            s = 0.0
            for i in range(n):
                s += sim[i, j]
            xbar[j] = s / n
        for j in range(n):
            xr[j] = xbar[j] + alpha * (xbar[j] - sim[n, j])
        fr = f(xr, data)
        evals += 1
        if fr < fs[0]:
            for j in range(n):
                xe[j] = xbar[j] + beta * (xr[j] - xbar[j])
            fe = f(xe, data)
            evals += 1
            if fe < fr:
                sim[n] = xe
                fs[n] = fe
            else:
                sim[n] = xr
                fs[n] = fr
        elif fr < fs[n - 1]:
            sim[n] = xr
            fs[n] = fr
        else:
            if fr < fs[n]:
                for j in range(n):
                    xc[j] = xbar[j] + gamma * (xr[j] - xbar[j])
            else:
                for j in range(n):
                    xc[j] = xbar[j] - gamma * (xbar[j] - sim[n, j])
            fc = f(xc, data)
            evals += 1
            if fc < min(fr, fs[n]):
                sim[n] = xc
                fs[n] = fc
            else:
                for i in range(1, n + 1):
                    for j in range(n):
                        sim[i, j] = sim[0, j] + delta * (sim[i, j] - sim[0, j])
                    fs[i] = f(sim[i], data)
                evals += n
    k = int(np.argmin(fs))
    return sim[k].copy(), fs[k], evals


# --------------------------------------------------------------------------
# objectives
# --------------------------------------------------------------------------

@njit
def measure_from_modulus(m, sqrt_measure, scale):
    v = scale * m
    if sqrt_measure:
        return np.sqrt(v)
    return v


@njit
def reduced_cost(x, data):
    """Measure minus an affine function of the Bloch vector, at angles ``x``."""
    c, sqrt_measure, scale, y = data
    th = x[0]
    ph = x[1]
    g = measure_from_modulus(_sphere_point(c, th, ph), sqrt_measure, scale)
    st = np.sin(th)
    return g - (y[0] * st * np.cos(ph) + y[1] * st * np.sin(ph) + y[2] * np.cos(th) + y[3])


@njit
def isometry_columns(params, m):
    """``m x 2`` isometry: Gram-Schmidt orthonormalization of a free complex ``m x 2`` matrix.

    ``params`` holds ``4m`` reals, row by row ``(Re a_i1, Im a_i1, Re a_i2, Im a_i2)``.
    Any isometry is its own preimage, so explicit ensembles serve as starting points.
    """
    u = np.empty((m, 2), dtype=np.complex128)
    for i in range(m):
        u[i, 0] = complex(params[4 * i], params[4 * i + 1])
        u[i, 1] = complex(params[4 * i + 2], params[4 * i + 3])
    n0 = 0.0
    for i in range(m):
        n0 += u[i, 0].real ** 2 + u[i, 0].imag ** 2
    n0 = np.sqrt(n0)
    ov = 0j
    for i in range(m):
        u[i, 0] /= n0
        ov += u[i, 0].conjugate() * u[i, 1]
    n1 = 0.0
    for i in range(m):
        u[i, 1] -= ov * u[i, 0]
        n1 += u[i, 1].real ** 2 + u[i, 1].imag ** 2
    n1 = np.sqrt(n1)
    for i in range(m):
        u[i, 1] /= n1
    return u


@njit
def span_state_modulus(x, data):
    """``|T|`` at ``cos(x0/2) psi1^ + sin(x0/2) e^{i x1} psi2^`` from the 8 amplitudes."""
    u1, u2 = data
    a = np.cos(0.5 * x[0])
    b = np.sin(0.5 * x[0]) * complex(np.cos(x[1]), np.sin(x[1]))
    v = np.empty(8, dtype=np.complex128)
    for k in range(8):
        v[k] = a * u1[k] + b * u2[k]
    return abs(_tau3_one(v))


@njit
def ensemble_average(params, data):
    """Average measure of the ensemble generated by an isometry (oracle objective).

    The states ``v_i = U_i1 sqrt(p1) psi1 + U_i2 sqrt(p2) psi2`` carry weights
    ``|v_i|^2``; the threetangle is evaluated monomial by monomial on the
    amplitudes, independently of any span-polynomial machinery.
    """
    base1, base2, m, sqrt_measure, scale = data
    u = isometry_columns(params, m)
    total = 0.0
    v = np.empty(8, dtype=np.complex128)
    for i in range(m):
        nrm2 = 0.0
        for k in range(8):
            v[k] = u[i, 0] * base1[k] + u[i, 1] * base2[k]
            nrm2 += v[k].real ** 2 + v[k].imag ** 2
        if nrm2 < 1e-300:
            continue
        t = scale * abs(_tau3_one(v))
        if sqrt_measure:
            total += np.sqrt(t)
        else:
            total += t / nrm2
    return total


if USE_NUMBA:
    tau3_complex_batch = tau3_complex_numba
    sphere_modulus = sphere_modulus_numba
    curve_grid = curve_grid_numba
    min_over_phase = min_over_phase_numba
else:
    tau3_complex_batch = tau3_complex_numpy
    sphere_modulus = sphere_modulus_numpy
    curve_grid = curve_grid_numpy
    min_over_phase = min_over_phase_numpy
