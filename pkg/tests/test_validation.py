import numpy as np

from threetangle import validation
from threetangle.validation import FAIL, PASS, WARN, Check


def test_invariance_checks_pass():
    rng = np.random.default_rng(0)
    for check in (validation.check_homogeneity(rng), validation.check_sl_invariance(rng),
                  validation.check_permutation_invariance(rng), validation.check_lu_invariance(rng)):
        assert check.status == PASS, check.line()


def test_negative_control_breaks_invariance():
    rng = np.random.default_rng(0)
    bad = (1.0, -2.0, 3.9)
    assert validation.check_sl_invariance(rng, weights=bad).status == FAIL
    assert validation.check_lu_invariance(rng, weights=bad).status == FAIL


def test_permutation_helper():
    psi = np.zeros(8, complex)
    psi[1] = 1  # |001>
    assert validation.permute_qubits(psi, (2, 1, 0))[4] == 1


def test_random_sl2_has_unit_determinant():
    g = validation.random_sl2(np.random.default_rng(1))
    assert abs(np.linalg.det(g) - 1) < 1e-12


def test_zero_consistency_distinguishes_variants():
    checks = {c.name: c for c in validation.check_zero_consistency()}
    assert checks["zero_consistency"].status == PASS
    assert checks["zero_consistency_printed"].status == WARN


def test_find_vanishing_edge():
    edge = validation.find_vanishing_edge(lambda x: max(0.0, x - 0.3), 0.0, 1.0, tol=1e-8)
    assert abs(edge - 0.3) < 1e-7


def test_exit_status_and_line():
    ok = Check("a", PASS, 0.0, 1.0)
    warn = Check("b", WARN, 0.0, 1.0, "documented")
    bad = Check("c", FAIL, 2.0, 1.0)
    assert validation.exit_status([ok, warn]) == 0
    assert validation.exit_status([ok, bad]) == 1
    assert warn.line().startswith("WARN") and warn.line().endswith("documented")
