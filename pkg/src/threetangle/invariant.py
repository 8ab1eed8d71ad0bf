"""The threetangle polynomial and the two measures built from it.

``tau3_complex`` implements the hyperdeterminant form ``d1 - 2 d2 + 4 d3``
verbatim, without the conventional overall factor 4.  Every measure accepts
``cww_prefactor=True`` to multiply the threetangle by 4, which gives
``tau3(GHZ) = 1`` and is the normalization used by the class atlas' closed
forms (see :mod:`threetangle.atlas`).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import WrongArityError
from .qstate import PureState

TAU3 = "tau3"
SQRT_TAU3 = "sqrt_tau3"
_ALIASES = {"tau3": TAU3, "sqrt_tau3": SQRT_TAU3, "sqrt-tau3": SQRT_TAU3}


def _amplitudes(psi) -> np.ndarray:
    if isinstance(psi, PureState):
        if psi.n_qubits != 3:
            raise WrongArityError(f"threetangle needs a 3-qubit state, got {psi.n_qubits} qubits")
        return psi.amplitudes
    amps = np.asarray(psi, dtype=np.complex128)
    if amps.shape[-1:] != (8,):
        raise WrongArityError(f"threetangle needs 8 amplitudes, got shape {amps.shape}")
    return amps


def tau3_complex(psi) -> complex:
    """``T = d1 - 2 d2 + 4 d3``; accepts a :class:`PureState` or an ``(..., 8)`` array."""
    amps = _amplitudes(psi)
    if amps.ndim == 1:
        return complex(kernels.tau3_complex_batch(amps[None, :])[0])
    return kernels.tau3_complex_batch(amps)


def tau3_terms(psi):
    """``(d1, d2, d3)`` separately, so that ``T = d1 - 2 d2 + 4 d3``."""
    return kernels.tau3_terms(_amplitudes(psi))


def tau3(psi, cww_prefactor: bool = False):
    t = np.abs(tau3_complex(psi))
    return 4.0 * t if cww_prefactor else t


def sqrt_tau3(psi, cww_prefactor: bool = False):
    return np.sqrt(tau3(psi, cww_prefactor))


@dataclass(frozen=True)
class Measure:
    """Entanglement measure ``tau3`` or ``sqrt_tau3`` together with its normalization."""

    name: str = TAU3
    cww_prefactor: bool = False

    def __post_init__(self):
        try:
            object.__setattr__(self, "name", _ALIASES[self.name])
        except KeyError:
            raise ValueError(f"unknown measure {self.name!r}; expected 'tau3' or 'sqrt_tau3'") from None

    @property
    def is_sqrt(self) -> bool:
        return self.name == SQRT_TAU3

    @property
    def scale(self) -> float:
        return 4.0 if self.cww_prefactor else 1.0

    @property
    def degree(self) -> int:
        """Homogeneous degree in the amplitudes."""
        return 2 if self.is_sqrt else 4

    def from_modulus(self, modulus):
        """Measure value from ``|T|`` of a normalized state."""
        v = self.scale * np.asarray(modulus, dtype=np.float64)
        return np.sqrt(v) if self.is_sqrt else v

    def to_tau_scale(self, value):
        """Map a roof value of this measure onto the threetangle scale (square for sqrt)."""
        return value * value if self.is_sqrt else value

    def __call__(self, psi):
        return self.from_modulus(np.abs(tau3_complex(psi)))


def as_measure(measure, cww_prefactor: bool | None = None) -> Measure:
    if isinstance(measure, Measure):
        if cww_prefactor is None or cww_prefactor == measure.cww_prefactor:
            return measure
        return Measure(measure.name, cww_prefactor)
    return Measure(measure, bool(cww_prefactor))
