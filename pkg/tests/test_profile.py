import csv
import io
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bifront import (ConstraintViolationError, FrontProblem, InvalidTrajectoryError, fisher_burgers,
                     integrate_backward, reconstruct, residual_second_order)
from bifront.profile import FrontProfile, slope_from_y, y_from_slope

from conftest import solve


def test_half_maps_to_origin():
    _, _, prof = solve("fb_a0.05")
    i = int(np.argmin(np.abs(prof.v_values - 0.5)))
    assert prof.v_values[i] == 0.5 and prof.z_grid[i] == 0.0


def test_case3_profile_is_nearly_sharp():
    _, _, prof = solve("fb_a-0.5")
    assert prof.dv_values.max() >= 0.95


def test_rejects_inadmissible_trajectory():
    p = FrontProblem(fisher_burgers(1.0, -0.5), 2e-3, 0.6)
    traj = integrate_backward(p)
    with pytest.raises(InvalidTrajectoryError):
        reconstruct(traj, p)


def test_rejects_window_outside_trajectory():
    res, problem, _ = solve("fb_a1")
    with pytest.raises(InvalidTrajectoryError):
        reconstruct(res.trajectory_at_c_star, problem, v_window=(1e-7, 0.9))


def test_constant_profile_is_not_a_solution():
    m = fisher_burgers(1.0, 0.0)
    n = 801
    prof = FrontProfile(np.linspace(-1, 1, n), np.full(n, 0.5), np.zeros(n), np.zeros(n), 1e-2, 0.1)
    assert residual_second_order(prof, m) == pytest.approx(0.25)


def test_gradient_bound_enforced():
    n = 801
    dv = np.full(n, 0.5)
    dv[10] = 1.0
    prof = FrontProfile(np.linspace(-1, 1, n), np.linspace(0.1, 0.9, n), dv, np.zeros(n), 1e-2, 0.1)
    with pytest.raises(ConstraintViolationError):
        residual_second_order(prof, fisher_burgers(1.0, 0.0))


def test_z_diverges_logarithmically_near_one():
    res, problem, _ = solve("fb_a1")
    traj = res.trajectory_at_c_star
    tops = []
    for k in (2, 3, 4, 5):
        prof = reconstruct(traj, problem, v_window=(1e-3, 1 - 10.0 ** -k), n_points=801)
        tops.append(prof.z_grid[-1])
    steps = np.diff(tops)
    # equal increments per decade of 1 - v
    assert np.all(steps > 0)
    assert np.ptp(steps) / steps.mean() < 0.05


@given(st.floats(1e-6, 100.0), st.floats(1e-4, 1.0))
@settings(max_examples=50, deadline=None)
def test_slope_y_round_trip(ratio, eps):
    # the inversion loses digits like (y/eps)**2 as v' -> 1, so keep y <= 100 eps
    y = ratio * eps
    dv = slope_from_y(y, eps)
    assert 0 < dv < 1
    assert y_from_slope(dv, eps) == pytest.approx(y, rel=1e-7)


def test_csv_and_json_round_trip():
    _, problem, prof = solve("fig3_left")
    rows = list(csv.DictReader(io.StringIO(prof.to_csv())))
    assert [*rows[0]] == ["z", "v", "dv"]
    z = np.array([float(r["z"]) for r in rows])
    assert np.allclose(z, prof.z_grid, rtol=1e-11, atol=1e-14)
    meta = json.loads(prof.to_json(residual=1.0))
    assert meta["n_points"] == prof.z_grid.size and meta["residual"] == 1.0
    assert np.allclose(meta["v"], prof.v_values)
