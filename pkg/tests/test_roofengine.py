import math

import numpy as np
import pytest

from threetangle import atlas
from threetangle.errors import BadGridError, DegenerateMeasureError, InfeasibleError
from threetangle.qstate import PureState, RankTwoMixture, bloch_superpose
from threetangle.invariant import Measure, tau3_complex
from threetangle.roofengine import (EXACT, Pairing, certify_optimal, characteristic_curve, convexify,
                                    decomposition_weights, paired_bound, reconstruction_residual, roof,
                                    roof_with_curve, span_polynomial, zero_polytope, zeros_from_coefficients)
from threetangle.roofengine.roof import eigen_average


def ghz_span(p):
    e0 = np.zeros(8, complex)
    e7 = np.zeros(8, complex)
    e0[0] = e7[7] = 1
    return RankTwoMixture(PureState(e0), PureState(e7), p)


def random_mixture(rng, p=None):
    q, _ = np.linalg.qr(rng.normal(size=(8, 2)) + 1j * rng.normal(size=(8, 2)))
    return RankTwoMixture(PureState(q[:, 0]), PureState(q[:, 1]), rng.uniform(0.5, 1) if p is None else p)


def test_ghz_span_curve_is_p_times_one_minus_p():
    curve = characteristic_curve(ghz_span(0.5), "tau3", 21, 8)
    want = curve.p_grid * (1 - curve.p_grid)
    np.testing.assert_allclose(curve.values, np.repeat(want[:, None], 8, axis=1), atol=1e-15)
    np.testing.assert_allclose(curve.min_curve, want, atol=1e-15)


def test_curve_poles_and_minimum():
    rng = np.random.default_rng(0)
    mix = random_mixture(rng)
    curve = characteristic_curve(mix, "sqrt_tau3", 11, 16)
    assert np.ptp(curve.values[0]) < 1e-14 and np.ptp(curve.values[-1]) < 1e-14
    assert curve.values[-1, 0] == pytest.approx(Measure("sqrt_tau3")(mix.psi1_hat))
    assert np.all(curve.min_curve <= curve.values.min(axis=1) + 1e-15)
    with pytest.raises(BadGridError):
        characteristic_curve(mix, "tau3", 2, 16)


def test_class4_curve_shape():
    mix = atlas.reduced_mixture(atlas.ClassSpec(4, (0.4, 1.9)), 1)
    curve = characteristic_curve(mix, "tau3", 11, 8)
    row = curve.values[5]
    assert np.argmax(row) == 0 and np.argmin(row) == 4
    assert row[2] == pytest.approx(row[6], rel=1e-12)


def test_span_polynomial_reproduces_tau3():
    rng = np.random.default_rng(1)
    mix = random_mixture(rng)
    c = span_polynomial(mix)
    z = 0.3 + 1.7j
    direct = tau3_complex(mix.psi1_hat.amplitudes + z * mix.psi2_hat.amplitudes)
    assert np.polyval(c[::-1], z) == pytest.approx(direct, rel=1e-12)


def test_zero_multiplicities_and_infinity():
    zs = zeros_from_coefficients(np.poly([0.5, 0.5, 0.5])[::-1].tolist() + [0.0])
    assert zs.roots == ((pytest.approx(0.5), 3),) or (len(zs.roots) == 1 and zs.roots[0][1] == 3)
    assert zs.infinity_multiplicity == 1
    assert zs.includes_infinity and zs.total_multiplicity == 4
    zs = zeros_from_coefficients(np.poly([-1, -1, -1, -1])[::-1] * (0.3 + 0.1j))
    assert len(zs.roots) == 1 and zs.roots[0][1] == 4
    assert abs(zs.roots[0][0] + 1) < 1e-10
    with pytest.raises(DegenerateMeasureError):
        zeros_from_coefficients(np.zeros(5))


def test_zero_polytope_of_ghz_span():
    zs = zero_polytope(ghz_span(0.5))
    assert len(zs.roots) == 1 and abs(zs.roots[0][0]) < 1e-12 and zs.roots[0][1] == 2
    assert zs.infinity_multiplicity == 2
    assert max(zs.residuals()) < 1e-12


def test_convexify():
    env = convexify([0, 0.25, 0.5, 0.75, 1], [1, 0, 0.5, 0, 1])
    np.testing.assert_array_equal(env.contact_points, [0, 0.25, 0.75, 1])
    assert env(0.5) == 0.0
    assert env.segment(0.5) == (1, 2)
    with pytest.raises(BadGridError):
        convexify([0, 0.5, 0.4, 1], [0, 0, 0, 0])
    with pytest.raises(BadGridError):
        convexify([0.1, 1], [0, 0])


def test_decomposition_weights():
    q = decomposition_weights(0.5, [1.0, -1.0])
    np.testing.assert_allclose(q, [0.5, 0.5])
    q = decomposition_weights(0.7, [0, complex(math.inf)])
    np.testing.assert_allclose(q, [0.7, 0.3])
    assert reconstruction_residual(0.7, [0, complex(math.inf)], q) < 1e-15
    with pytest.raises(InfeasibleError):
        decomposition_weights(0.7, [1.0, 1.0j])


def test_pairings_bound_the_roof():
    mix = atlas.reduced_mixture(atlas.ClassSpec(4, (0.4, 1.9)), 1)
    r = roof(mix, "tau3").value
    for pairing in (Pairing.antipodal(math.pi), Pairing.m_phase(3, 0.2), Pairing.anchor(-0.5)):
        assert paired_bound(mix, "tau3", pairing, [mix.p1])[0] >= r - 1e-12
    with pytest.raises(ValueError):
        Pairing.m_phase(2)
    with pytest.raises(ValueError):
        Pairing.anchor(complex(math.inf))


def test_roof_result_structure():
    rng = np.random.default_rng(2)
    mix = random_mixture(rng)
    for meas in ("tau3", "sqrt_tau3"):
        res, curve = roof_with_curve(mix, meas)
        assert res.weights.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.all(res.weights >= 0)
        assert res.residual < 1e-8
        assert res.value <= eigen_average(curve, mix.p1) + 1e-10
        assert res.lower_bound <= res.value + 1e-12
        if res.certificate == "curve":
            assert certify_optimal(res, curve)
        # the value is realized by the decomposition; zero states count as exact zeros, and
        # sqrt(tau3) of their float representation sits at sqrt(rounding) ~ 1e-8
        m = Measure(meas)
        avg = sum(w * m(bloch_superpose(mix.psi1, mix.psi2, z)) for w, z in res.decomposition)
        assert avg == pytest.approx(res.value, abs=1e-7 if m.is_sqrt else 1e-12)


def test_vanishing_span():
    w = np.zeros(8, complex)
    w[[1, 2, 4]] = 1
    e = np.zeros(8, complex)
    e[0] = 1
    res = roof(RankTwoMixture(PureState(w), PureState(e), 0.6), "sqrt_tau3")
    assert res.value == 0 and res.status == EXACT and res.certificate == "vanishing"


def test_pure_limit():
    mix = ghz_span(1.0)
    assert roof(mix, "tau3").value == pytest.approx(0.0, abs=1e-15)


def test_cww_prefactor_scales():
    rng = np.random.default_rng(5)
    mix = random_mixture(rng)
    a = roof(mix, "tau3").value
    b = roof(mix, "tau3", cww_prefactor=True).value
    assert b == pytest.approx(4 * a, rel=1e-9, abs=1e-12)
    s = roof(mix, "sqrt_tau3").value
    t = roof(mix, "sqrt_tau3", cww_prefactor=True).value
    assert t == pytest.approx(2 * s, rel=1e-9, abs=1e-12)
