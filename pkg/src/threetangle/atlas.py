"""Four-qubit class representants 1-6, their reduced eigen-systems and closed-form roofs.

Each reduction (one qubit traced out) is described by a :class:`ReductionCase`.
Printed eigenstates are stored verbatim: unnormalized, with conjugated
parameters.  Numerically they are eigenvectors of the complex conjugate of
the reduced density matrix, so :meth:`ReductionCase.mixture` conjugates them
before building the mixture.  The threetangle is invariant under that
conjugation, so roofs and zero moduli are unaffected.

Closed forms are written in the normalization ``tau3(GHZ) = 1``, the one
selected by ``cww_prefactor=True``; that is the default here.  Formulas come
in two variants: ``"published"`` is the printed expression, ``"corrected"``
is the expression that agrees with the engine where the printed one does
not (see :data:`CORRECTIONS`).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import ArityError, NoPrintedDataError
from .invariant import as_measure
from .qstate import PureState, RankTwoMixture, eigendecompose_rank2, normalize, partial_trace
from .roofengine import ZeroSet

ARITY = {1: ("a", "b", "c", "d"), 2: ("a", "b", "c"), 3: ("a", "b"), 4: ("a", "b"), 5: ("a",), 6: ("a",)}

PUBLISHED = "published"
CORRECTED = "corrected"
VARIANTS = (PUBLISHED, CORRECTED)

PRINTED = "printed"
EQUIVALENT = "equivalent"
VANISHING = "vanishing"

EXACT = "exact"
UPPER_BOUND = "upper_bound"

CLASS6_THRESHOLD = 2.0 ** (2.0 / 3.0)

CORRECTIONS = {
    (2, "zeros"): "z0^2 = -(a^2-c^2)(b^2-c^2)(2+|a|^2+|b|^2+2|c|^2) / (c (a^2-b^2)(|a|^2+|b|^2+2|c|^2)), conjugated root",
    (2, "sqrt_tau3"): "value at p=0 is 4 sqrt|(a^2-b^2) c| / (2+|a|^2+|b|^2+2|c|^2)",
    (4, "zeros"): "quadruple root at -(s-/s+) |psi2|/|psi1|",
    (4, "roof"): "denominator squared: 2|a^2-b^2| / (2+3|a|^2+|b|^2)^2",
    (5, "zeros"): "case B simple root at -1/z0 in the (psi1, psi2) orientation",
    (5, "bound"): "case B bound 4 / ((3+4|a|^2)^2 (1+64|a|^4))",
    (6, "zeros"): "roots +-(i/2) sqrt(a*(3+|a|^2))",
    (6, "roof"): "vanishes for |a| >= 2^(2/3)",
}

# (class, traced qubit) -> (kind, qubit whose printed states apply, class-5 case)
_LAYOUT = {
    **{(1, k): (VANISHING, None, None) for k in (1, 2, 3, 4)},
    (2, 4): (PRINTED, 4, None), (2, 1): (EQUIVALENT, 4, None),
    (2, 2): (EQUIVALENT, 4, None), (2, 3): (EQUIVALENT, 4, None),
    (3, 1): (PRINTED, 1, None), (3, 3): (EQUIVALENT, 1, None),
    (3, 2): (VANISHING, None, None), (3, 4): (VANISHING, None, None),
    (4, 1): (PRINTED, 1, None), (4, 2): (EQUIVALENT, 1, None),
    (4, 3): (EQUIVALENT, 1, None), (4, 4): (EQUIVALENT, 1, None),
    (5, 4): (PRINTED, 4, "A"), (5, 2): (EQUIVALENT, 4, "A"),
    (5, 3): (PRINTED, 3, "B"), (5, 1): (EQUIVALENT, 3, "B"),
    (6, 1): (PRINTED, 1, None),
    (6, 2): (VANISHING, None, None), (6, 3): (VANISHING, None, None), (6, 4): (VANISHING, None, None),
}


@dataclass(frozen=True)
class ClassSpec:
    """A class representant: ``class_id`` and its parameters in arity order."""

    class_id: int
    params: tuple

    def __post_init__(self):
        if self.class_id not in ARITY:
            raise ArityError(f"class_id must be in 1..6, got {self.class_id!r}")
        params = tuple(complex(p) for p in self.params)
        names = ARITY[self.class_id]
        if len(params) != len(names):
            raise ArityError(f"class {self.class_id} takes parameters {names}, got {len(params)} values")
        object.__setattr__(self, "params", params)

    @classmethod
    def create(cls, class_id: int, **params) -> "ClassSpec":
        """``ClassSpec.create(2, a=0.65, b=0.35, c=0.5)``; names must match the class exactly."""
        names = ARITY.get(class_id)
        if names is None:
            raise ArityError(f"class_id must be in 1..6, got {class_id!r}")
        if set(params) != set(names):
            raise ArityError(f"class {class_id} takes parameters {names}, got {tuple(sorted(params))}")
        return cls(class_id, tuple(params[n] for n in names))

    def __getattr__(self, name):
        if name in ("a", "b", "c", "d"):
            names = ARITY[self.class_id]
            if name not in names:
                raise ArityError(f"class {self.class_id} has no parameter {name!r}")
            return self.params[names.index(name)]
        raise AttributeError(name)

    def as_dict(self) -> dict:
        return dict(zip(ARITY[self.class_id], self.params))


def _state(terms, n):
    return PureState.from_terms(terms, n)


def _raw_class_state(spec: ClassSpec) -> PureState:
    cid = spec.class_id
    if cid == 1:
        a, b, c, d = spec.params
        return _state([((a + d) / 2, "0000"), ((a + d) / 2, "1111"), ((a - d) / 2, "0011"),
                       ((a - d) / 2, "1100"), ((b + c) / 2, "0101"), ((b + c) / 2, "1010"),
                       ((b - c) / 2, "0110"), ((b - c) / 2, "1001")], 4)
    if cid == 2:
        a, b, c = spec.params
        return _state([((a + b) / 2, "0000"), ((a + b) / 2, "1111"), ((a - b) / 2, "0011"),
                       ((a - b) / 2, "1100"), (c, "0101"), (c, "1010"), (1, "0110")], 4)
    if cid == 3:
        a, b = spec.params
        return _state([(a, "0000"), (a, "1111"), (b, "0101"), (b, "1010"), (1, "0110"), (1, "0011")], 4)
    if cid == 4:
        a, b = spec.params
        h = 1j / math.sqrt(2.0)
        return _state([(a, "0000"), (a, "1111"), ((a + b) / 2, "0101"), ((a + b) / 2, "1010"),
                       ((a - b) / 2, "0110"), ((a - b) / 2, "1001"),
                       (h, "0001"), (h, "0010"), (h, "0111"), (h, "1011")], 4)
    if cid == 5:
        (a,) = spec.params
        return _state([(a, "0000"), (a, "1111"), (a, "0101"), (a, "1010"),
                       (1j, "0001"), (-1j, "1011"), (1, "0110")], 4)
    (a,) = spec.params
    return _state([(a, "0000"), (a, "1111"), (1, "0011"), (1, "0101"), (1, "0110")], 4)


def class_state(spec: ClassSpec, normalized: bool = True) -> PureState:
    """The class representant; ``normalized=False`` keeps the printed amplitudes."""
    psi = _raw_class_state(spec)
    return normalize(psi) if normalized else psi


def _class4_s(a):
    root = math.sqrt(1.0 + 8.0 * abs(a) ** 2)
    return root - 1.0, root + 1.0


def _printed_states(spec: ClassSpec, source: int):
    cid = spec.class_id
    conj = [p.conjugate() for p in spec.params]
    if cid == 2:
        A, B, C = conj
        return (_state([(A - B, "001"), (A + B, "111"), (2 * C, "010")], 3),
                _state([(A + B, "000"), (A - B, "110"), (2 * C, "101"), (2, "011")], 3))
    if cid == 3:
        A, B = conj
        return (_state([(B, "010"), (A, "111")], 3),
                _state([(A, "000"), (B, "101"), (1, "011"), (1, "110")], 3))
    if cid == 4:
        a = spec.params[0]
        A, B = conj
        r2 = math.sqrt(2.0)
        sm, sp = _class4_s(a)
        aa = abs(a) ** 2
        return (_state([(1j * r2 * A * sm, "000"), (sm - 2 * a * (A - B), "001"), (sm - 2 * a * (A + B), "010"),
                        (2j * r2 * a, "011"), (1j / r2 * sm * (A + B), "101"), (1j / r2 * sm * (A - B), "110"),
                        (sm - 4 * aa, "111")], 3),
                _state([(1j * r2 * A * sp, "000"), (sp + 2 * a * (A - B), "001"), (sp + 2 * a * (A + B), "010"),
                        (-2j * r2 * a, "011"), (1j / r2 * sp * (A + B), "101"), (1j / r2 * sp * (A - B), "110"),
                        (sp + 4 * aa, "111")], 3))
    if cid == 5 and source == 4:
        (A,) = conj
        return (_state([(-1j, "000"), (A, "010"), (1j, "101"), (A, "111")], 3),
                _state([(A, "000"), (1, "011"), (A, "101")], 3))
    if cid == 5:
        (A,) = conj
        return (_state([(1, "010"), (A, "100"), (1j, "101"), (A, "111")], 3),
                _state([(A, "000"), (-1j, "001"), (A, "011")], 3))
    (A,) = conj
    return (_state([(1, "111")], 3), _state([(A, "000"), (1, "011"), (1, "101"), (1, "110")], 3))


def printed_p1(spec: ClassSpec) -> float:
    """Printed weight of the first printed eigenstate; every reduction of a class shares the spectrum."""
    cid = spec.class_id
    if cid == 2:
        m = sum(abs(x) ** 2 for x in spec.params[:2]) + 2 * abs(spec.params[2]) ** 2
        return m / (2.0 * (1.0 + m))
    if cid == 3:
        m = abs(spec.a) ** 2 + abs(spec.b) ** 2
        return m / (2.0 * (1.0 + m))
    if cid == 4:
        aa, bb = abs(spec.a) ** 2, abs(spec.b) ** 2
        return (2 + 3 * aa + bb - math.sqrt(1 + 8 * aa)) / (4 + 6 * aa + 2 * bb)
    if cid == 5:
        aa = abs(spec.a) ** 2
        return 2 * (1 + aa) / (3 + 4 * aa)
    if cid == 6:
        aa = abs(spec.a) ** 2
        return aa / (3 + 2 * aa)
    raise NoPrintedDataError("class 1 has no printed eigen-system")


@dataclass(frozen=True, eq=False)
class ReductionCase:
    """One reduction of a class state.

    ``kind`` is ``"printed"`` when eigenstates are printed for this traced
    qubit, ``"equivalent"`` when they are printed for ``source_qubit`` of
    the same class (same spectrum and roofs), and ``"vanishing"`` for the
    reductions whose roof is zero.  ``case`` is ``"A"`` or ``"B"`` for
    class 5.  ``reversed_orientation`` marks the cases whose printed zero
    locations refer to ``z psi1 + psi2`` instead of ``psi1 + z psi2``.
    """

    spec: ClassSpec
    traced_qubit: int
    kind: str
    source_qubit: int | None
    case: str | None = None

    @property
    def zero_roof(self) -> bool:
        return self.kind == VANISHING

    @property
    def reversed_orientation(self) -> bool:
        return self.spec.class_id == 5

    @property
    def p1(self) -> float:
        if self.zero_roof:
            raise NoPrintedDataError(f"no printed weight for class {self.spec.class_id}, qubit {self.traced_qubit}")
        return printed_p1(self.spec)

    def printed_states(self):
        """``(psi1, psi2)`` exactly as printed; only for ``kind == "printed"``."""
        if self.kind != PRINTED:
            raise NoPrintedDataError(
                f"no eigenstates printed for class {self.spec.class_id} with qubit {self.traced_qubit} traced out")
        return _printed_states(self.spec, self.source_qubit)

    def printed_mixture(self) -> RankTwoMixture:
        """Mixture spanned by the printed states in printed order (the frame of the printed zeros)."""
        psi1, psi2 = self.printed_states()
        return RankTwoMixture(psi1, psi2, self.p1)

    def mixture(self) -> RankTwoMixture:
        """The reduced density matrix, built from the conjugated printed eigenstates."""
        psi1, psi2 = self.printed_states()
        return RankTwoMixture(psi1.conj(), psi2.conj(), self.p1)


def reduction(spec: ClassSpec, traced_qubit: int) -> ReductionCase:
    if traced_qubit not in (1, 2, 3, 4):
        raise ValueError(f"traced_qubit must be in 1..4, got {traced_qubit!r}")
    kind, source, case = _LAYOUT[(spec.class_id, traced_qubit)]
    return ReductionCase(spec, traced_qubit, kind, source, case)


def reduced_mixture(spec: ClassSpec, traced_qubit: int) -> RankTwoMixture:
    """Numerical eigendecomposition of the reduced state.

    When eigenstates are printed for this reduction, the first eigenstate is
    the one matching the printed ``psi1`` (which need not carry the larger
    weight).
    """
    mix = eigendecompose_rank2(partial_trace(class_state(spec), traced_qubit))
    case = reduction(spec, traced_qubit)
    if case.zero_roof or mix.rank != 2:
        return mix
    psi1 = case.printed_states()[0] if case.kind == PRINTED else None
    if psi1 is not None and psi1.norm > 0:
        u = normalize(psi1.conj()).amplitudes
        swap = abs(np.vdot(u, mix.psi2_hat.amplitudes)) > abs(np.vdot(u, mix.psi1_hat.amplitudes))
    else:
        # printed state degenerates (class 4 at a = 0) or lives on another qubit: match the weight
        target = case.p1
        swap = abs(1.0 - mix.p1 - target) < abs(mix.p1 - target)
    return mix.swapped() if swap else mix


def _phase_aligned_error(u, v):
    """``max |u - e^{i chi} v|`` for the best global phase (both normalized)."""
    ov = np.vdot(v, u)
    if abs(ov) == 0.0:
        return float(np.max(np.abs(u)) + np.max(np.abs(v)))
    return float(np.max(np.abs(u - ov / abs(ov) * v)))


def eigen_consistency(case: ReductionCase):
    """``(state_error, p1_error)`` between the printed eigen-system and the numerical one."""
    mix = reduced_mixture(case.spec, case.traced_qubit)
    printed = case.mixture()
    err = max(_phase_aligned_error(printed.psi1_hat.amplitudes, mix.psi1_hat.amplitudes),
              _phase_aligned_error(printed.psi2_hat.amplitudes, mix.psi2_hat.amplitudes))
    return err, abs(printed.p1 - mix.p1)


def _zero_set(finite, n_inf=0):
    """Merge coincident roots; non-finite entries count as roots at infinity."""
    roots = []
    for z in finite:
        z = complex(z)
        if not cmath.isfinite(z):
            n_inf += 1
            continue
        for i, (r, m) in enumerate(roots):
            if abs(r - z) <= 1e-12 * max(1.0, abs(z)):
                roots[i] = (r, m + 1)
                break
        else:
            roots.append((z, 1))
    roots.sort(key=lambda t: (abs(t[0]), cmath.phase(t[0])))
    return ZeroSet(tuple(roots), n_inf)


def _class2_z0(spec, variant):
    a, b, c = (np.complex128(x) for x in spec.params)
    m = abs(a) ** 2 + abs(b) ** 2 + 2 * abs(c) ** 2
    with np.errstate(all="ignore"):
        if variant == PUBLISHED:
            pre = 0.5 * np.sqrt((2 + abs(a - b) ** 2 + 2 * abs(c) ** 2) / m)
            inner = b * b / c * (1 + c * c / (b * b) * (a * (a - b) + c * c) / (a - b) ** 2)
            return complex(pre * np.conj(np.sqrt(complex(inner))))
        sq = -(a * a - c * c) * (b * b - c * c) * (2 + m) / (c * (a * a - b * b) * m)
        return complex(np.conj(np.sqrt(complex(sq))))


def _check_variant(variant):
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")


def zero_locations(spec: ClassSpec, traced_qubit: int, variant: str = PUBLISHED) -> ZeroSet:
    """Closed-form zeros of ``T(psi1^ + z psi2^)`` for the printed states, in that orientation.

    Printed class-5 zeros refer to the reversed orientation and are mapped by
    ``z -> 1/z`` here.
    """
    _check_variant(variant)
    case = reduction(spec, traced_qubit)
    case.printed_states()
    cid = spec.class_id
    if cid == 2:
        z0 = _class2_z0(spec, variant)
        return _zero_set([0, 0, z0, -z0])
    if cid == 3:
        a, b = spec.params
        with np.errstate(all="ignore"):
            m = abs(a) ** 2 + abs(b) ** 2
            z0 = complex(1j * np.conj((a * a - b * b) / (2 * np.sqrt(complex(a * b)))) * math.sqrt((2 + m) / m))
        return _zero_set([0, 0, z0, -z0])
    if cid == 4:
        psi1, psi2 = case.printed_states()
        if psi1.norm == 0.0:
            # a = 0: the printed psi1 is null; the corrected root tends to 0
            z0 = 0.0 if variant == CORRECTED else -math.inf
        else:
            z0 = -psi2.norm / psi1.norm
            if variant == CORRECTED:
                sm, sp = _class4_s(spec.a)
                z0 *= sm / sp
        return _zero_set([z0] * 4)
    if cid == 5:
        if case.case == "A":
            return _zero_set([], 4)
        a = spec.a
        aa = abs(a) ** 2
        z0 = 8 * math.sqrt(2.0) * 1j * a.conjugate() ** 2 * math.sqrt((1 + aa) / (1 + 2 * aa))
        w = complex(math.inf) if z0 == 0 else 1.0 / z0
        if variant == CORRECTED:
            w = -w
        return _zero_set([w], 3)
    a = spec.a
    z0 = 0.5 * cmath.sqrt(a.conjugate() * (3 + abs(a) ** 2))
    if variant == CORRECTED:
        z0 *= 1j
    return _zero_set([0, 0, z0, -z0])


def class5_p0(spec: ClassSpec) -> float:
    """Weight of ``psi1`` in the case-B zero state ``Psi_z0``."""
    aa = abs(spec.a) ** 2
    t = 128 * aa ** 2 * (1 + aa)
    return t / (1 + 2 * aa + t)


@dataclass(frozen=True)
class ClosedForm:
    value: float
    status: str
    formula: str


def _to_measure(tau_value, meas):
    """Convert a threetangle-scale value in the ``tau3(GHZ)=1`` normalization."""
    v = max(float(tau_value), 0.0)
    if meas.is_sqrt:
        v = math.sqrt(v)
        return v if meas.cww_prefactor else 0.5 * v
    return v if meas.cww_prefactor else 0.25 * v


def _sqrt_to_measure(sqrt_value, meas):
    return _to_measure(max(float(sqrt_value), 0.0) ** 2, meas)


def class5_bounds(spec: ClassSpec, variant: str = PUBLISHED):
    """Case-B upper bounds on the squared root roof: ``(anchor bound, older bound)``."""
    _check_variant(variant)
    aa = abs(spec.a) ** 2
    old = 4.0 / (3 + 4 * aa) ** 2
    if variant == PUBLISHED:
        new = 4 * (1 + 64 * aa) / ((3 + 4 * aa) * (1 + 64 * aa ** 2)) ** 2
    else:
        new = 4.0 / ((3 + 4 * aa) ** 2 * (1 + 64 * aa ** 2))
    return new, old


def class2_comparison_bound(spec: ClassSpec, cww_prefactor: bool = True) -> float:
    """Class-2 comparison bound ``4|(a^2-b^2) c| / (1+|a|^2+|b|^2+2|c|^2)^2`` on the squared root roof."""
    if spec.class_id != 2:
        raise ValueError("the comparison bound is defined for class 2 only")
    a, b, c = spec.params
    v = 4 * abs((a * a - b * b) * c) / (1 + abs(a) ** 2 + abs(b) ** 2 + 2 * abs(c) ** 2) ** 2
    return v if cww_prefactor else 0.25 * v


def closed_form_roof(spec: ClassSpec, traced_qubit: int, measure="tau3", variant: str = PUBLISHED,
                     cww_prefactor: bool = True) -> ClosedForm:
    """Printed roof (or bound) of ``measure``, converted to that measure's units.

    Raises :class:`NoPrintedDataError` where only an implicit form exists
    (the threetangle roofs of classes 2, 3, 5B and 6).
    """
    _check_variant(variant)
    meas = as_measure(measure, cww_prefactor)
    case = reduction(spec, traced_qubit)
    cid = spec.class_id
    if case.zero_roof:
        return ClosedForm(0.0, EXACT, "zero")
    implicit = NoPrintedDataError(f"class {cid} has no explicit {meas.name} roof")
    if cid == 2:
        if not meas.is_sqrt:
            raise implicit
        a, b, c = spec.params
        m = abs(a) ** 2 + abs(b) ** 2 + 2 * abs(c) ** 2
        z0 = _class2_z0(spec, variant)
        p0 = 1.0 / (1.0 + abs(z0) ** 2) if cmath.isfinite(z0) else 0.0
        p1 = m / (2.0 * (1.0 + m))
        if variant == PUBLISHED:
            top = 2 * math.sqrt(abs((a * a - b * b) * c) / (1 + m))
        else:
            top = 4 * math.sqrt(abs((a * a - b * b) * c)) / (2 + m)
        value = top * (1 - p1 / p0) if p0 > 0 else 0.0
        return ClosedForm(_sqrt_to_measure(max(value, 0.0), meas), EXACT, "class2_sqrt_roof")
    if cid == 3:
        if not meas.is_sqrt:
            raise implicit
        a, b = spec.params
        ab = abs(a * b)
        value = 0.0 if ab == 0 else (4 * ab - abs(a * a - b * b) ** 2) / (2 * math.sqrt(ab) * (1 + abs(a) ** 2 + abs(b) ** 2))
        return ClosedForm(_sqrt_to_measure(max(value, 0.0), meas), EXACT, "class3_sqrt_roof")
    if cid == 4:
        a, b = spec.params
        den = 2 + 3 * abs(a) ** 2 + abs(b) ** 2
        if variant == CORRECTED:
            den = den ** 2
        return ClosedForm(_to_measure(2 * abs(a * a - b * b) / den, meas), EXACT, "class4_roof")
    if cid == 5:
        if case.case == "A":
            aa = abs(spec.a) ** 2
            return ClosedForm(_to_measure(16 * aa / (3 + 4 * aa) ** 2, meas), EXACT, "class5A_roof")
        if not meas.is_sqrt:
            raise implicit
        return ClosedForm(_to_measure(class5_bounds(spec, variant)[0], meas), UPPER_BOUND, "class5B_anchor_bound")
    if not meas.is_sqrt:
        raise implicit
    r = abs(spec.a)
    value = r * (r ** 3 - 4) ** 2 / (2 * r ** 2 + 3) ** 2
    if variant == CORRECTED and r >= CLASS6_THRESHOLD:
        value = 0.0
    return ClosedForm(_to_measure(value, meas), EXACT, "class6_sqrt_roof")
