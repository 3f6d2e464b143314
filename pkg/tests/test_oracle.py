import math

import numpy as np
import pytest

from bifront import DomainError, FrontProblem, ShootingError, fisher_burgers, lower_bound
from bifront.oracle import (brute_max, brute_scan_roots, compare_with_profile, pure_convection_exact,
                            shoot_phase_plane, w_from_y, y_from_w)
from bifront.verify import run_checks

from conftest import solve


def test_frozen_certification_still_holds(cert_records):
    checks = run_checks(list(cert_records.values()))
    assert len(checks) == len(cert_records)
    bad = [c.quantity_id for c in checks if not c.passed]
    assert not bad


def test_pure_convection_closed_form():
    h = lambda v: v * v * (1 - v)
    assert pure_convection_exact(0.01, 0.0, h, 0.5) == pytest.approx(math.sqrt(1e-4 + 0.125 ** 2) - 0.01)
    assert pure_convection_exact(0.01, 0.0, h, 0.0) == 0.0
    assert pure_convection_exact(0.01, 0.0, h, 1.0) == 0.0
    assert pure_convection_exact(1e-9, 0.0, h, 0.3) == pytest.approx(h(0.3), abs=1e-8)


def test_pure_convection_domain():
    with pytest.raises(DomainError):
        pure_convection_exact(0.01, -0.5, lambda v: v * v * (1 - v), 0.5)


def test_root_scan():
    assert brute_scan_roots(lambda v: v - 0.5) == pytest.approx([0.5], abs=1e-12)
    s_prime = lambda v: 0.45 - 2 * v / 3
    assert brute_scan_roots(s_prime, 2000) == pytest.approx([0.675], abs=1e-12)
    assert brute_scan_roots(lambda v: 1 - 2 * v / 3, 2000) == []
    with pytest.raises(ValueError):
        brute_scan_roots(lambda v: v, 10)


def test_brute_max():
    val, arg = brute_max(lambda v: v / 2 - v * v / 3, 0.0, 1.0)
    assert val == pytest.approx(3 / 16, abs=1e-14) and arg == pytest.approx(0.75, abs=1e-7)


def test_w_y_round_trip():
    y = np.logspace(-10, 1, 12)
    assert np.allclose(y_from_w(w_from_y(y, 1e-2), 1e-2), y, rtol=1e-9)


@pytest.mark.parametrize("name", ["fb_a1", "fb_a0.05", "fb_a-0.5", "fig3_left"])
def test_shooting_reproduces_profile(name):
    res, problem, prof = solve(name)
    shot = shoot_phase_plane(problem)
    assert shot.success
    assert compare_with_profile(shot, prof.z_grid, prof.v_values) < 1e-6
    w_ref = float(w_from_y(res.trajectory_at_c_star.y_at(0.5), problem.epsilon))
    assert shot.w_half == pytest.approx(w_ref, rel=1e-5)


def test_shooting_fails_below_lower_bound():
    m = fisher_burgers(1.0, -0.5)
    p = FrontProblem(m, 2e-3, lower_bound(m) - 0.05)
    assert not shoot_phase_plane(p).success
    with pytest.raises(ShootingError):
        shoot_phase_plane(p, strict=True)
