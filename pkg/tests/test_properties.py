"""Property-based checks of the invariant and the engine."""

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from threetangle import PureState, RankTwoMixture, roof
from threetangle.invariant import tau3, tau3_complex
from threetangle.roofengine import span_polynomial, zero_polytope
from threetangle.validation import apply_local, permute_qubits, random_sl2

finite = st.floats(-2, 2, allow_nan=False, allow_infinity=False)
amplitudes = st.lists(st.tuples(finite, finite), min_size=8, max_size=8).map(
    lambda xs: np.array([complex(a, b) for a, b in xs]))
seeds = st.integers(0, 2**32 - 1)


@given(amplitudes, finite, finite)
def test_homogeneous_of_degree_four(psi, re, im):
    lam = complex(re, im)
    assert np.isclose(tau3(lam * psi), abs(lam) ** 4 * tau3(psi), rtol=1e-9, atol=1e-12)


@given(amplitudes, st.permutations([0, 1, 2]))
def test_permutation_invariant(psi, perm):
    assert np.isclose(tau3(permute_qubits(psi, tuple(perm))), tau3(psi), rtol=1e-12, atol=1e-12)


@given(amplitudes, seeds)
def test_sl_invariant(psi, seed):
    rng = np.random.default_rng(seed)
    moved = apply_local(psi, random_sl2(rng), random_sl2(rng), random_sl2(rng))
    scale = np.linalg.norm(psi) ** 4 * max(1.0, np.linalg.norm(moved) ** 4)
    assert abs(tau3_complex(moved) - tau3_complex(psi)) <= 1e-9 * scale + 1e-14


@settings(max_examples=15, deadline=None)
@given(seeds, st.floats(0.5, 1.0))
def test_roof_structure(seed, p):
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.normal(size=(8, 2)) + 1j * rng.normal(size=(8, 2)))
    mix = RankTwoMixture(PureState(q[:, 0]), PureState(q[:, 1]), p)
    t = roof(mix, "tau3")
    s = roof(mix, "sqrt_tau3")
    assert s.value ** 2 <= t.value + 1e-8
    eig = p * tau3(mix.psi1_hat) + (1 - p) * tau3(mix.psi2_hat)
    assert t.value <= eig + 1e-10
    assert max(t.residual, s.residual) < 1e-8
    c = span_polynomial(mix)
    for z, _ in zero_polytope(mix).roots:
        assert abs(np.polyval(c[::-1], z)) < 1e-8 * np.max(np.abs(c))
