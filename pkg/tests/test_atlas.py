import math

import numpy as np
import pytest

from threetangle import atlas
from threetangle.errors import ArityError, NoPrintedDataError
from threetangle.invariant import Measure
from threetangle.roofengine import roof, zero_polytope

TAU = Measure("tau3", cww_prefactor=True)
SQRT = Measure("sqrt_tau3", cww_prefactor=True)


def test_class_spec_arity():
    spec = atlas.ClassSpec.create(2, a=0.65, b=0.35, c=0.5)
    assert spec.c == 0.5 and spec.as_dict() == {"a": 0.65, "b": 0.35, "c": 0.5}
    with pytest.raises(ArityError):
        atlas.ClassSpec(3, (1.0,))
    with pytest.raises(ArityError):
        atlas.ClassSpec.create(5, a=1.0, b=2.0)


def test_class_states_are_normalized():
    for cid, pars in ((1, (0.3, 0.7, 1.1, 0.2)), (2, (0.65, 0.35, 0.5)), (3, (2, 1)), (4, (0.4, 1.9)), (5, (1,)), (6, (1.2,))):
        assert atlas.class_state(atlas.ClassSpec(cid, pars)).norm == pytest.approx(1.0)


def test_layout():
    spec = atlas.ClassSpec(5, (1.0,))
    assert atlas.reduction(spec, 4).case == "A"
    assert atlas.reduction(spec, 3).case == "B"
    assert atlas.reduction(spec, 3).reversed_orientation
    assert atlas.reduction(atlas.ClassSpec(3, (2, 1)), 2).zero_roof
    with pytest.raises(NoPrintedDataError):
        atlas.reduction(atlas.ClassSpec(2, (0.65, 0.35, 0.5)), 1).printed_states()


@pytest.mark.parametrize("cid,k,pars", [(2, 4, (0.65, 0.35, 0.5)), (3, 1, (2.0, 1.0)), (4, 1, (0.4, 1.9)),
                                        (5, 4, (0.7,)), (5, 3, (0.7,)), (6, 1, (1.3,))])
def test_eigen_consistency(cid, k, pars):
    state_err, p1_err = atlas.eigen_consistency(atlas.reduction(atlas.ClassSpec(cid, pars), k))
    assert state_err < 1e-9 and p1_err < 1e-10


@pytest.mark.parametrize("cid,k,pars", [(2, 4, (0.65, 0.35, 0.5)), (3, 1, (2.0, 1.0)), (4, 1, (0.4, 1.9)),
                                        (5, 3, (0.7,)), (6, 1, (1.3,))])
def test_corrected_zeros_match_engine(cid, k, pars):
    case = atlas.reduction(atlas.ClassSpec(cid, pars), k)
    closed = atlas.zero_locations(case.spec, k, atlas.CORRECTED)
    found = zero_polytope(case.printed_mixture())
    assert closed.infinity_multiplicity == found.infinity_multiplicity
    assert sorted(m for _, m in closed.roots) == sorted(m for _, m in found.roots)
    for z, _ in closed.roots:
        assert min(abs(z - w) for w, _ in found.roots) < 1e-8 * max(1, abs(z))


@pytest.mark.parametrize("cid,k,pars,meas", [(4, 1, (0.4, 1.9), TAU), (4, 1, (1.5, 0.5), SQRT),
                                             (5, 4, (1.0,), TAU), (2, 4, (0.65, 0.35, 0.5), SQRT),
                                             (6, 1, (1.0,), SQRT), (3, 1, (2.0, 1.0), SQRT)])
def test_corrected_closed_forms_match_engine(cid, k, pars, meas):
    spec = atlas.ClassSpec(cid, pars)
    closed = atlas.closed_form_roof(spec, k, meas, atlas.CORRECTED)
    res = roof(atlas.reduced_mixture(spec, k), meas)
    if closed.status == atlas.EXACT:
        assert res.value == pytest.approx(closed.value, abs=1e-6)
    else:
        assert res.value <= closed.value + 1e-9


def test_class4_published_roof_lacks_square():
    spec = atlas.ClassSpec(4, (0.4, 1.9))
    pub = atlas.closed_form_roof(spec, 1, TAU, atlas.PUBLISHED).value
    cor = atlas.closed_form_roof(spec, 1, TAU, atlas.CORRECTED).value
    den = 2 + 3 * 0.16 + 1.9 ** 2
    assert pub == pytest.approx(2 * abs(0.16 - 3.61) / den)
    assert cor == pytest.approx(pub / den)


def test_implicit_tau3_roofs_are_not_printed():
    with pytest.raises(NoPrintedDataError):
        atlas.closed_form_roof(atlas.ClassSpec(2, (0.65, 0.35, 0.5)), 4, TAU)


def test_class5_bounds():
    new, old = atlas.class5_bounds(atlas.ClassSpec(5, (0.0,)))
    assert new == pytest.approx(4 / 9, abs=1e-12) and old == pytest.approx(4 / 9, abs=1e-12)
    new_c, old_c = atlas.class5_bounds(atlas.ClassSpec(5, (0.5,)), atlas.CORRECTED)
    assert new_c == pytest.approx(4 / ((3 + 1) ** 2 * (1 + 4)))
    assert new_c < old_c


def test_class2_comparison_bound_scales():
    spec = atlas.ClassSpec(2, (0.65, 0.35, 0.35))
    assert atlas.class2_comparison_bound(spec, False) == pytest.approx(atlas.class2_comparison_bound(spec) / 4)


def test_class6_threshold_and_vanishing():
    assert atlas.CLASS6_THRESHOLD == pytest.approx(2 ** (2 / 3))
    mix = atlas.reduced_mixture(atlas.ClassSpec(6, (2.0,)), 1)
    assert roof(mix, SQRT).value < 1e-10
    for k in (2, 3, 4):
        assert roof(atlas.reduced_mixture(atlas.ClassSpec(6, (1.0,)), k), TAU).value < 1e-10


def test_class4_null_printed_state_at_a_zero():
    spec = atlas.ClassSpec(4, (0.0, 1.0))
    mix = atlas.reduced_mixture(spec, 1)
    assert mix.rank == 2
    zs = atlas.zero_locations(spec, 1, atlas.CORRECTED)
    assert zs.roots[0][0] == 0 and zs.roots[0][1] == 4
    assert not math.isnan(roof(mix, TAU).value)


def test_printed_and_numeric_frames_differ_by_conjugation():
    case = atlas.reduction(atlas.ClassSpec(6, (1.3,)), 1)
    a = case.printed_mixture()
    b = case.mixture()
    assert np.allclose(a.psi1_hat.amplitudes.conj(), b.psi1_hat.amplitudes)
