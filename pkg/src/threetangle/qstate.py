"""State vectors, density matrices and rank-two mixtures.

Basis convention: the computational basis index is the bit string
``q1 q2 ... qn`` read with qubit 1 as the most significant bit, so the
amplitude of ``|q1,q2,q3,q4>`` sits at ``int("q1q2q3q4", 2)``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import IndexOutOfRangeError, RankExceededError, ZeroStateError

ZERO_NORM = 1e-14
HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
RANK_TOL = 1e-10
ORTHO_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class PureState:
    """Complex amplitude vector over ``n_qubits`` qubits; not necessarily normalized."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        n = amps.size.bit_length() - 1
        if amps.size < 2 or (1 << n) != amps.size:
            raise ValueError(f"amplitude vector length {amps.size} is not a power of two")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n_qubits(self) -> int:
        return self.amplitudes.size.bit_length() - 1

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    @classmethod
    def from_terms(cls, terms, n_qubits: int) -> "PureState":
        """Build a state from ``(coefficient, "0101")`` pairs; repeated kets add up."""
        amps = np.zeros(1 << n_qubits, dtype=np.complex128)
        for coeff, bits in terms:
            if len(bits) != n_qubits:
                raise ValueError(f"ket {bits!r} does not have {n_qubits} qubits")
            amps[int(bits, 2)] += coeff
        return cls(amps)

    def conj(self) -> "PureState":
        return PureState(self.amplitudes.conj())

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.amplitudes, dtype=dtype)

    def __repr__(self):
        return f"PureState(n_qubits={self.n_qubits}, norm={self.norm:.6g})"


def normalize(psi: PureState) -> PureState:
    """Return ``psi / |psi|``; raises :class:`ZeroStateError` for null vectors."""
    nrm = psi.norm
    if nrm < ZERO_NORM:
        raise ZeroStateError(f"cannot normalize a state with norm {nrm:.3g}")
    return PureState(psi.amplitudes / nrm)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite matrix (checked on construction)."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("density matrix must be square")
        herm = np.max(np.abs(m - m.conj().T))
        if herm > HERMITIAN_TOL:
            raise ValueError(f"matrix is not Hermitian (max deviation {herm:.3g})")
        tr = np.trace(m).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"trace {tr!r} differs from 1")
        m = 0.5 * (m + m.conj().T)
        if np.linalg.eigvalsh(m)[0] < -PSD_TOL:
            raise ValueError("matrix has a negative eigenvalue")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues in descending order."""
        return np.linalg.eigvalsh(self.matrix)[::-1]


@dataclass(frozen=True, eq=False)
class RankTwoMixture:
    """``p1 |psi1^><psi1^| + (1 - p1) |psi2^><psi2^|`` with orthogonal eigenstates.

    The stored states may be unnormalized; hats denote normalization.
    ``rank`` is 1 when the source matrix was pure, in which case ``psi2`` is an
    arbitrary deterministic completion and ``p1 == 1``.
    """

    psi1: PureState
    psi2: PureState
    p1: float
    rank: int = field(default=2)

    def __post_init__(self):
        if not 0.0 <= self.p1 <= 1.0:
            raise ValueError(f"p1={self.p1!r} outside [0, 1]")
        if self.psi1.n_qubits != self.psi2.n_qubits:
            raise ValueError("eigenstates live on different numbers of qubits")
        overlap = abs(np.vdot(self.psi1_hat.amplitudes, self.psi2_hat.amplitudes))
        if overlap > ORTHO_TOL:
            raise ValueError(f"eigenstates are not orthogonal (|<psi1|psi2>| = {overlap:.3g})")

    @property
    def psi1_hat(self) -> PureState:
        return normalize(self.psi1)

    @property
    def psi2_hat(self) -> PureState:
        return normalize(self.psi2)

    @property
    def n_qubits(self) -> int:
        return self.psi1.n_qubits

    def density_matrix(self) -> DensityMatrix:
        u = self.psi1_hat.amplitudes
        v = self.psi2_hat.amplitudes
        rho = self.p1 * np.outer(u, u.conj()) + (1.0 - self.p1) * np.outer(v, v.conj())
        return DensityMatrix(rho)

    def swapped(self) -> "RankTwoMixture":
        """Same density matrix with the roles of the two eigenstates exchanged."""
        return RankTwoMixture(self.psi2, self.psi1, 1.0 - self.p1, self.rank)


def partial_trace(psi: PureState, traced_qubit: int) -> DensityMatrix:
    """Reduced density matrix of a normalized 4-qubit state after tracing out one qubit."""
    if psi.n_qubits != 4:
        raise ValueError(f"partial_trace expects a 4-qubit state, got {psi.n_qubits}")
    if traced_qubit not in (1, 2, 3, 4):
        raise IndexOutOfRangeError(f"traced_qubit must be in 1..4, got {traced_qubit!r}")
    t = np.moveaxis(psi.amplitudes.reshape(2, 2, 2, 2), traced_qubit - 1, -1).reshape(8, 2)
    return DensityMatrix(t @ t.conj().T)


def _fix_phase(v: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude component real and positive (first one on ties)."""
    mags = np.round(np.abs(v), 12)
    k = int(np.argmax(mags))
    return v * np.exp(-1j * np.angle(v[k]))


def eigendecompose_rank2(rho: DensityMatrix) -> RankTwoMixture:
    """Spectral decomposition of a rank <= 2 density matrix, larger eigenvalue first."""
    w, v = np.linalg.eigh(rho.matrix)
    w = w[::-1]
    v = v[:, ::-1]
    if w.size > 2 and w[2] > RANK_TOL:
        raise RankExceededError(f"third eigenvalue {w[2]:.3g} exceeds rank tolerance {RANK_TOL}")
    lam1 = max(w[0], 0.0)
    lam2 = max(w[1], 0.0) if w.size > 1 else 0.0
    if lam2 <= RANK_TOL:
        psi1 = _fix_phase(v[:, 0])
        # deterministic completion: first basis vector with the smallest overlap
        k = int(np.argmin(np.abs(psi1)))
        e = np.zeros_like(psi1)
        e[k] = 1.0
        psi2 = e - np.vdot(psi1, e) * psi1
        return RankTwoMixture(PureState(psi1), PureState(_fix_phase(psi2 / np.linalg.norm(psi2))), 1.0, rank=1)
    p1 = lam1 / (lam1 + lam2)
    return RankTwoMixture(PureState(_fix_phase(v[:, 0])), PureState(_fix_phase(v[:, 1])), float(p1))


def is_infinite(z) -> bool:
    return z is None or cmath.isinf(complex(z))


def p_of_z(z) -> float:
    """Weight of the first eigenstate in ``Psi_z``: ``1 / (1 + |z|^2)``; 0 at infinity."""
    if is_infinite(z):
        return 0.0
    return 1.0 / (1.0 + abs(complex(z)) ** 2)


def z_of(p: float, phi: float) -> complex:
    """Inverse of :func:`p_of_z` on the ray of phase ``phi``; ``p = 0`` maps to infinity."""
    if p <= 0.0:
        return complex(math.inf, 0.0)
    return math.sqrt(max(1.0 - p, 0.0) / p) * cmath.exp(1j * phi)


def bloch_superpose(psi1: PureState, psi2: PureState, z) -> PureState:
    """``sqrt(p1(z)) * (psi1^ + z psi2^)``; ``z = inf`` returns ``psi2^``."""
    u = normalize(psi1).amplitudes
    v = normalize(psi2).amplitudes
    if is_infinite(z):
        return PureState(v.copy())
    z = complex(z)
    return PureState(math.sqrt(p_of_z(z)) * (u + z * v))
