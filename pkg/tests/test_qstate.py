import numpy as np
import pytest

from threetangle.errors import IndexOutOfRangeError, RankExceededError, ZeroStateError
from threetangle.qstate import (DensityMatrix, PureState, RankTwoMixture, bloch_superpose, eigendecompose_rank2,
                                is_infinite, normalize, p_of_z, partial_trace, z_of)


def test_from_terms_uses_qubit_one_as_most_significant():
    psi = PureState.from_terms([(1.0, "0001"), (2.0, "1000"), (0.5, "1000")], 4)
    assert psi.n_qubits == 4
    assert psi.amplitudes[1] == 1.0
    assert psi.amplitudes[8] == 2.5
    with pytest.raises(ValueError):
        PureState.from_terms([(1.0, "01")], 3)


def test_normalize_and_zero_state():
    psi = normalize(PureState(np.array([3, 4, 0, 0, 0, 0, 0, 0], complex)))
    assert psi.norm == pytest.approx(1.0)
    with pytest.raises(ZeroStateError):
        normalize(PureState(np.zeros(8, complex)))


def test_partial_trace_of_product_state():
    a = np.array([1, 1j]) / np.sqrt(2)
    rest = np.zeros(8, complex)
    rest[5] = 1
    psi = PureState(np.kron(a, rest))
    rho = partial_trace(psi, 1)
    assert rho.dim == 8
    assert np.allclose(rho.matrix, np.outer(rest, rest))
    with pytest.raises(IndexOutOfRangeError):
        partial_trace(psi, 5)


def test_partial_trace_keeps_remaining_order():
    rng = np.random.default_rng(0)
    psi = rng.normal(size=16) + 1j * rng.normal(size=16)
    psi /= np.linalg.norm(psi)
    t = psi.reshape(2, 2, 2, 2)
    want = np.einsum("abcd,aefg->bcdefg", t, t.conj()).reshape(8, 8)
    assert np.allclose(partial_trace(PureState(psi), 1).matrix, want)
    want = np.einsum("aibc,dief->abcdef", t, t.conj()).reshape(8, 8)
    assert np.allclose(partial_trace(PureState(psi), 2).matrix, want)
    assert np.trace(want).real == pytest.approx(1.0)


def test_eigendecompose_orders_and_fixes_phase():
    rng = np.random.default_rng(1)
    psi = rng.normal(size=16) + 1j * rng.normal(size=16)
    psi /= np.linalg.norm(psi)
    rho = partial_trace(PureState(psi), 4)
    mix = eigendecompose_rank2(rho)
    assert mix.rank == 2
    assert mix.p1 >= 0.5
    assert np.allclose(mix.density_matrix().matrix, rho.matrix, atol=1e-12)
    for v in (mix.psi1.amplitudes, mix.psi2.amplitudes):
        k = np.argmax(np.round(np.abs(v), 12))
        assert abs(v[k].imag) < 1e-15 and v[k].real > 0


def test_eigendecompose_pure_and_rank3():
    e = np.zeros(8, complex)
    e[3] = 1
    mix = eigendecompose_rank2(DensityMatrix(np.outer(e, e)))
    assert mix.rank == 1 and mix.p1 == 1.0
    with pytest.raises(RankExceededError):
        eigendecompose_rank2(DensityMatrix(np.eye(8) / 8))


def test_mixture_rejects_non_orthogonal_states():
    a = np.zeros(8, complex)
    a[0] = 1
    b = np.zeros(8, complex)
    b[[0, 1]] = 1
    with pytest.raises(ValueError):
        RankTwoMixture(PureState(a), PureState(b), 0.5)


def test_swapped_is_the_same_matrix():
    rng = np.random.default_rng(2)
    q, _ = np.linalg.qr(rng.normal(size=(8, 2)) + 1j * rng.normal(size=(8, 2)))
    mix = RankTwoMixture(PureState(q[:, 0]), PureState(q[:, 1]), 0.3)
    assert np.allclose(mix.swapped().density_matrix().matrix, mix.density_matrix().matrix)


def test_bloch_coordinates_round_trip():
    for p in (0.1, 0.5, 0.9):
        z = z_of(p, 1.2)
        assert p_of_z(z) == pytest.approx(p)
    assert is_infinite(z_of(0.0, 0.3))
    assert p_of_z(complex(np.inf)) == 0.0
    assert p_of_z(0) == 1.0


def test_bloch_superpose_is_normalized():
    rng = np.random.default_rng(4)
    q, _ = np.linalg.qr(rng.normal(size=(8, 2)) + 1j * rng.normal(size=(8, 2)))
    u, v = PureState(2 * q[:, 0]), PureState(q[:, 1])
    s = bloch_superpose(u, v, 0.4 - 0.7j)
    assert s.norm == pytest.approx(1.0)
    assert np.allclose(bloch_superpose(u, v, complex(np.inf)).amplitudes, q[:, 1])
