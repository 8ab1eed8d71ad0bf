"""The quartic ``q(z) = T(psi1^ + z psi2^)`` on the span of a rank-2 mixture and its roots."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateMeasureError
from ..invariant import tau3_complex
from ..qstate import RankTwoMixture

DEGREE = 4
VANISHING_TOL = 1e-12      # max |c_k| below which q is treated as identically zero
LEADING_TOL = 1e-13        # relative size under which a leading coefficient is a root at infinity
CLUSTER_RADIUS = 1e-3      # loose grouping radius (relative), confirmed by the derivative test
CLUSTER_TOL = 1e-6         # fallback clustering when the derivative test rejects a group
DERIVATIVE_ETA = 1e-12     # rounding level used by the derivative test
ROOT_TOL = 1e-8

# probes on the unit circle make the interpolation matrix a scaled DFT (perfectly conditioned)
_PROBES = np.exp(2j * np.pi * np.arange(DEGREE + 1) / (DEGREE + 1))
_CHECK_PROBE = 0.37 - 0.61j


def span_polynomial(mix: RankTwoMixture) -> np.ndarray:
    """Coefficients ``c[0..4]`` (ascending powers) of ``q(z) = T(psi1^ + z psi2^)``.

    The same numbers are the coefficients of the binary quartic
    ``T(alpha psi1^ + beta psi2^) = sum_k c_k alpha^(4-k) beta^k``.
    """
    u = mix.psi1_hat.amplitudes
    v = mix.psi2_hat.amplitudes
    samples = tau3_complex(u[None, :] + _PROBES[:, None] * v[None, :])
    vander = np.vander(_PROBES, DEGREE + 1, increasing=True)
    coeffs = np.linalg.solve(vander, samples)
    check = tau3_complex(u + _CHECK_PROBE * v)
    scale = np.max(np.abs(coeffs))
    if abs(np.polyval(coeffs[::-1], _CHECK_PROBE) - check) > 1e-9 * scale + 1e-14:
        raise ArithmeticError("span polynomial interpolation failed its degree check")
    return coeffs


def poly_derivative_values(coeffs, z, order):
    """``[q(z), q'(z), ..., q^(order)(z) / order!]`` (Taylor coefficients at z)."""
    c = np.asarray(coeffs, dtype=np.complex128)
    n = c.size
    out = np.empty(order + 1, dtype=np.complex128)
    for j in range(order + 1):
        out[j] = sum(math.comb(k, j) * c[k] * z ** (k - j) for k in range(j, n))
    return out


@dataclass(frozen=True)
class ZeroSet:
    """Roots of ``q`` with multiplicities; ``infinity_multiplicity`` counts the degree deficit.

    Root ``z`` stands for the state ``Psi_z`` on the Bloch sphere of the mixture,
    ``z = inf`` for the second eigenstate.
    """

    roots: tuple
    infinity_multiplicity: int
    coefficients: np.ndarray | None = None

    @property
    def includes_infinity(self) -> bool:
        return self.infinity_multiplicity > 0

    @property
    def total_multiplicity(self) -> int:
        return sum(m for _, m in self.roots) + self.infinity_multiplicity

    def points(self):
        """Distinct zero states as z values, ``inf`` last when present."""
        pts = [z for z, _ in self.roots]
        if self.includes_infinity:
            pts.append(complex(math.inf, 0.0))
        return pts

    def residuals(self):
        """``|q(r)| / (max|c| * max(1, |r|)^4)`` for each finite root."""
        scale = np.max(np.abs(self.coefficients))
        return [abs(np.polyval(self.coefficients[::-1], z)) / (scale * max(1.0, abs(z)) ** DEGREE)
                for z, _ in self.roots]


def _group(roots, radius):
    groups = []
    for r in roots:
        for g in groups:
            if any(abs(r - s) <= radius * max(1.0, abs(s)) for s in g):
                g.append(r)
                break
        else:
            groups.append([r])
    # merge groups that became connected through later members
    merged = True
    while merged:
        merged = False
        for i in range(len(groups)):
            for j in range(i + 1, len(groups)):
                if any(abs(r - s) <= radius * max(1.0, abs(s)) for r in groups[i] for s in groups[j]):
                    groups[i] += groups.pop(j)
                    merged = True
                    break
            if merged:
                break
    return groups


def _polish_multiple(coeffs, z, k):
    """Newton on ``q^(k-1)``, whose simple root is a k-fold root of q."""
    for _ in range(3):
        t = poly_derivative_values(coeffs, z, k)
        if t[k] == 0:
            break
        # d/dz q^(k-1)/(k-1)! = k * q^(k)/k!
        step = t[k - 1] / (k * t[k])
        z = z - step
        if abs(step) <= 1e-16 * max(1.0, abs(z)):
            break
    return z


def _is_multiple(coeffs, z, k, scale):
    """Taylor coefficients below order k vanish to within coefficient rounding (noise ~ scale)."""
    t = poly_derivative_values(coeffs, z, k)
    top = abs(t[k])
    for j in range(k):
        noise = DERIVATIVE_ETA * scale * sum(math.comb(m, j) * abs(z) ** (m - j) for m in range(j, len(coeffs)))
        if abs(t[j]) > max(CLUSTER_TOL ** (k - j) * top, noise):
            return False
    return True


def _resolve(coeffs, group, scale):
    """Multiplicity of one cluster of approximate roots: ``[(z, k), ...]``."""
    k = len(group)
    if k == 1:
        return [(complex(group[0]), 1)]
    z = _polish_multiple(coeffs, complex(np.mean(group)), k)
    if _is_multiple(coeffs, z, k, scale):
        return [(complex(z), k)]
    return [(complex(np.mean(sub)), len(sub)) for sub in _group(group, CLUSTER_TOL)]


def zeros_from_coefficients(coeffs) -> ZeroSet:
    """Roots with multiplicities.  Clusters centred outside the unit circle are
    resolved as roots ``w = 1/z`` of the reversed polynomial, so that clusters
    near the second eigenstate are as well conditioned as clusters near the
    first.  Clustering happens before that split, so a multiple root on the
    unit circle is not torn apart."""
    c = np.asarray(coeffs, dtype=np.complex128)
    scale = np.max(np.abs(c))
    if scale < VANISHING_TOL:
        raise DegenerateMeasureError("the threetangle vanishes on the whole range of the mixture")
    deg = DEGREE
    while deg > 0 and abs(c[deg]) <= LEADING_TOL * scale:
        deg -= 1
    n_inf = DEGREE - deg
    trimmed = c[:deg + 1]
    raw = np.roots(trimmed[::-1]) if deg > 0 else np.array([], dtype=np.complex128)
    reversed_c = np.concatenate([np.zeros(n_inf, dtype=np.complex128), trimmed[::-1]])
    roots = []
    for group in _group([complex(r) for r in raw], CLUSTER_RADIUS):
        if abs(np.mean(group)) <= 1.0:
            roots += _resolve(trimmed, group, scale)
        else:
            roots += [(1.0 / w, k) for w, k in _resolve(reversed_c, [1.0 / r for r in group], scale)]
    roots.sort(key=lambda t: (abs(t[0]), np.angle(t[0])))
    return ZeroSet(tuple(roots), n_inf, c)


def zero_polytope(mix: RankTwoMixture) -> ZeroSet:
    """Zero states of the threetangle in the range of ``mix``.

    Raises :class:`DegenerateMeasureError` when the threetangle vanishes on
    the whole span (the roof is then zero).
    """
    return zeros_from_coefficients(span_polynomial(mix))
