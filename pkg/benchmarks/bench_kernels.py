"""Compare the numba kernels with their numpy fallbacks.

    python benchmarks/bench_kernels.py [--repeat 5]

The kernel table times both variants in one process.  The end-to-end row
runs a class-2 roof in a subprocess per backend, toggled by
``THREETANGLE_DISABLE_NUMBA``.
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from threetangle import kernels
from threetangle._accel import USE_NUMBA

ROOF_SNIPPET = """
import time
from threetangle import atlas
from threetangle.roofengine import roof
spec = atlas.ClassSpec.create(2, a=0.65, b=0.35, c=0.5)
mix = atlas.reduced_mixture(spec, 4)
roof(mix, "tau3")  # warm up (jit compile / cache load)
t = time.perf_counter()
for _ in range(5):
    roof(mix, "sqrt_tau3")
print((time.perf_counter() - t) / 5)
"""


def _best(fn, repeat):
    fn()
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def kernel_rows(repeat):
    rng = np.random.default_rng(0)
    amps = rng.normal(size=(200_000, 8)) + 1j * rng.normal(size=(200_000, 8))
    coeffs = rng.normal(size=5) + 1j * rng.normal(size=5)
    p_grid = np.linspace(0.0, 1.0, 201)
    phi_grid = np.linspace(0.0, 2 * np.pi, 256, endpoint=False)
    grid = kernels.curve_grid_numpy(coeffs, p_grid, phi_grid)
    cases = [
        ("tau3_batch 2e5", lambda: kernels.tau3_complex_numba(amps), lambda: kernels.tau3_complex_numpy(amps)),
        ("curve_grid 201x256", lambda: kernels.curve_grid_numba(coeffs, p_grid, phi_grid),
         lambda: kernels.curve_grid_numpy(coeffs, p_grid, phi_grid)),
        ("min_over_phase 201", lambda: kernels.min_over_phase_numba(coeffs, p_grid, phi_grid, grid, 1e-12),
         lambda: kernels.min_over_phase_numpy(coeffs, p_grid, phi_grid, grid, 1e-12)),
    ]
    for name, fast, slow in cases:
        yield name, _best(fast, repeat), _best(slow, repeat)


def roof_seconds(disable):
    env = dict(os.environ, THREETANGLE_DISABLE_NUMBA="1" if disable else "0")
    out = subprocess.run([sys.executable, "-c", ROOF_SNIPPET], env=env, check=True,
                         capture_output=True, text=True)
    return float(out.stdout.strip())


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not USE_NUMBA:
        sys.exit("numba is disabled in this process; unset THREETANGLE_DISABLE_NUMBA")
    print(f"{'kernel':<22}{'numba [s]':>12}{'numpy [s]':>12}{'speedup':>10}")
    for name, t_fast, t_slow in kernel_rows(args.repeat):
        print(f"{name:<22}{t_fast:>12.4g}{t_slow:>12.4g}{t_slow / t_fast:>10.1f}")
    t_fast, t_slow = roof_seconds(False), roof_seconds(True)
    print(f"{'roof (class 2)':<22}{t_fast:>12.4g}{t_slow:>12.4g}{t_slow / t_fast:>10.1f}")


if __name__ == "__main__":
    main()
