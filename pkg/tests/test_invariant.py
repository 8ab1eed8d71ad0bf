import numpy as np
import pytest

from threetangle.errors import WrongArityError
from threetangle.invariant import Measure, as_measure, sqrt_tau3, tau3, tau3_complex, tau3_terms
from threetangle.qstate import PureState


def basis(*indices, n=8):
    v = np.zeros(n, complex)
    v[list(indices)] = 1
    return v


def test_unnormalized_ghz():
    assert tau3_complex(basis(0, 7)) == pytest.approx(1.0)
    d1, d2, d3 = tau3_terms(basis(0, 7))
    assert (d1, d2, d3) == (1, 0, 0)


def test_w_and_product_vanish():
    assert tau3(basis(1, 2, 4)) == 0
    prod = np.kron([1, 0], np.kron([0.6, 0.8], [1j, 1]))
    assert tau3(prod) == pytest.approx(0.0, abs=1e-15)


def test_normalized_ghz_values():
    ghz = PureState(basis(0, 7) / np.sqrt(2))
    assert tau3(ghz) == pytest.approx(0.25)
    assert sqrt_tau3(ghz) == pytest.approx(0.5)
    assert tau3(ghz, cww_prefactor=True) == pytest.approx(1.0)
    assert Measure("sqrt-tau3", True)(ghz) == pytest.approx(1.0)


def test_batch_matches_single():
    rng = np.random.default_rng(0)
    psi = rng.normal(size=(5, 8)) + 1j * rng.normal(size=(5, 8))
    batch = tau3_complex(psi)
    assert np.allclose(batch, [tau3_complex(p) for p in psi])
    d1, d2, d3 = tau3_terms(psi)
    assert np.allclose(d1 - 2 * d2 + 4 * d3, batch)


def test_wrong_arity():
    with pytest.raises(WrongArityError):
        tau3(np.ones(4))
    with pytest.raises(WrongArityError):
        tau3(PureState(np.ones(16, complex)))


def test_measure_conversions():
    m = as_measure("sqrt_tau3")
    assert m.is_sqrt and m.degree == 2 and m.scale == 1.0
    assert m.to_tau_scale(0.3) == pytest.approx(0.09)
    assert as_measure(m, True).cww_prefactor
    assert as_measure(m) is m
    with pytest.raises(ValueError):
        Measure("concurrence")
