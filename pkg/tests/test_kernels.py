import os
import subprocess
import sys

import numpy as np
import pytest

from threetangle import kernels
from threetangle._accel import USE_NUMBA, max_threads


@pytest.fixture
def data():
    rng = np.random.default_rng(0)
    coeffs = rng.normal(size=5) + 1j * rng.normal(size=5)
    return rng, coeffs, np.linspace(0, 1, 31), 2 * np.pi * np.arange(16) / 16


def test_tau3_variants_agree(data):
    rng = data[0]
    amps = rng.normal(size=(50, 8)) + 1j * rng.normal(size=(50, 8))
    np.testing.assert_allclose(kernels.tau3_complex_numba(amps), kernels.tau3_complex_numpy(amps), rtol=1e-13)


def test_curve_variants_agree(data):
    _, c, p, phi = data
    a = kernels.curve_grid_numba(c, p, phi)
    b = kernels.curve_grid_numpy(c, p, phi)
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-15)
    th = np.linspace(0, np.pi, 7)
    np.testing.assert_allclose(kernels.sphere_modulus_numba(c, th, th), kernels.sphere_modulus_numpy(c, th, th),
                               rtol=1e-12, atol=1e-15)


def test_min_over_phase_variants_agree(data):
    _, c, p, phi = data
    grid = kernels.curve_grid_numpy(c, p, phi)
    m1, a1 = kernels.min_over_phase_numba(c, p, phi, grid, 1e-12)
    m2, a2 = kernels.min_over_phase_numpy(c, p, phi, grid, 1e-12)
    np.testing.assert_allclose(m1, m2, atol=1e-10)
    assert np.all(m1 <= grid.min(axis=1) + 1e-15)


def test_lower_hull_indices():
    xs = np.linspace(0, 1, 5)
    ys = np.array([0.0, 1.0, -0.2, 1.0, 0.0])
    assert list(kernels.lower_hull_indices(xs, ys)) == [0, 2, 4]


def test_thread_cap(monkeypatch):
    monkeypatch.setenv("THREETANGLE_THREADS", "3")
    assert max_threads() == 3
    monkeypatch.setenv("THREETANGLE_THREADS", "nonsense")
    assert max_threads() == 1


def test_fallback_flag_gives_same_roof():
    code = ("from threetangle import atlas, roof; from threetangle._accel import USE_NUMBA;"
            "m = atlas.reduced_mixture(atlas.ClassSpec.create(2, a=0.65, b=0.35, c=0.5), 4);"
            "print(USE_NUMBA, repr(roof(m, 'sqrt_tau3').value))")
    out = {}
    for flag in ("1", "0"):
        env = dict(os.environ, THREETANGLE_DISABLE_NUMBA=flag)
        out[flag] = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True,
                                   check=True).stdout.split()
    assert out["1"][0] == "False"
    assert out["0"][0] == str(USE_NUMBA)
    assert float(out["1"][1]) == pytest.approx(float(out["0"][1]), abs=1e-10)
