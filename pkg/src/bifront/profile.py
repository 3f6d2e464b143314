"""Front profile ``v(z)`` recovered from an admissible ``y(v)``.

Inverting ``v' = sqrt(y (2 eps + y)) / (eps + y)`` gives

    z(v) = int_{1/2}^{v} (eps + y(s)) / sqrt(y(s) (2 eps + y(s))) ds,

normalised so that ``v(0) = 1/2``. The integrand behaves like ``1/(1 - s)``
near 1 and like ``1/s`` near 0, so each half is integrated after a
logarithmic change of variables.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

import numpy as np

from .errors import ConstraintViolationError, InvalidTrajectoryError
from .model import ModelSpec
from .quadrature import cumulative_unit
from .reduction import FrontProblem, Tolerances, Verdict, YTrajectory, integrate_backward


@dataclass
class FrontProfile:
    z_grid: np.ndarray
    v_values: np.ndarray
    dv_values: np.ndarray
    y_values: np.ndarray
    epsilon: float
    speed_c: float
    model_digest: str = ""

    def v_at(self, z):
        return np.interp(z, self.z_grid, self.v_values)

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["z", "v", "dv"])
        for row in zip(self.z_grid, self.v_values, self.dv_values):
            writer.writerow([f"{x:.12g}" for x in row])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(text)
        return text

    def metadata(self, residual: float | None = None) -> dict:
        out = {
            "epsilon": self.epsilon,
            "speed_c": self.speed_c,
            "model_digest": self.model_digest,
            "n_points": int(self.z_grid.size),
            "z_range": [float(self.z_grid[0]), float(self.z_grid[-1])],
            "max_dv": float(np.max(self.dv_values)),
        }
        if residual is not None:
            out["residual"] = residual
        return out

    def to_json(self, residual: float | None = None) -> str:
        data = self.metadata(residual)
        data["z"] = self.z_grid.tolist()
        data["v"] = self.v_values.tolist()
        data["dv"] = self.dv_values.tolist()
        return json.dumps(data)


def slope_from_y(y, epsilon):
    y = np.asarray(y, dtype=float)
    return np.sqrt(y * (2.0 * epsilon + y)) / (epsilon + y)


def y_from_slope(dv, epsilon):
    dv = np.asarray(dv, dtype=float)
    return epsilon * (1.0 / np.sqrt(1.0 - dv * dv) - 1.0)


def _z_of_v(traj: YTrajectory, eps: float, v: np.ndarray) -> np.ndarray:
    """Cumulative ``z`` at each point of the increasing grid ``v`` (containing 1/2)."""
    def inv_slope(s):
        y = np.maximum(traj.y_at(s), 1e-300)
        return (eps + y) / np.sqrt(y * (2.0 * eps + y))

    return cumulative_unit(inv_slope, v, 0.5)


def _densified(trajectory: YTrajectory, problem: FrontProblem, spacing: float,
               tolerances: Tolerances | None) -> YTrajectory:
    """Re-integrate with the step capped at ``spacing`` if the recorded steps are coarser.

    Cubic Hermite interpolation across long steps leaves an error that finite
    differences on the output grid would amplify.
    """
    if np.max(np.abs(np.diff(trajectory.v_grid))) <= spacing:
        return trajectory
    dense = integrate_backward(problem, v_min=trajectory.v_min_reached,
                               tolerances=tolerances, h_max=spacing)
    return dense if dense.verdict is Verdict.ADMISSIBLE else trajectory


def reconstruct(trajectory: YTrajectory, problem: FrontProblem,
                v_window: tuple[float, float] = (1e-4, 1.0 - 1e-4),
                n_points: int = 2001, tolerances: Tolerances | None = None) -> FrontProfile:
    """Sample the profile on ``n_points`` values uniform in ``v`` (plus ``v = 1/2``).

    ``tolerances`` should match those used to produce ``trajectory``; they are
    reused if the trajectory has to be re-integrated on a finer step.
    """
    if trajectory.verdict is not Verdict.ADMISSIBLE:
        raise InvalidTrajectoryError(f"trajectory verdict is {trajectory.verdict.value}, not Admissible")
    v_lo, v_hi = v_window
    v_top = float(trajectory.v_grid[0])
    v_bot = float(trajectory.v_grid[-1])
    if not (v_bot <= v_lo < 0.5 < v_hi <= v_top):
        raise InvalidTrajectoryError(
            f"window ({v_lo:g}, {v_hi:g}) is not inside the trajectory range [{v_bot:g}, {v_top:g}]"
        )
    v = np.linspace(v_lo, v_hi, n_points)
    j = int(np.argmin(np.abs(v - 0.5)))
    if abs(v[j] - 0.5) <= 1e-9 * (v_hi - v_lo):
        v[j] = 0.5
    else:
        v = np.sort(np.append(v, 0.5))
    eps = problem.epsilon
    trajectory = _densified(trajectory, problem, (v_hi - v_lo) / (n_points - 1), tolerances)
    y = np.asarray(trajectory.y_at(v), dtype=float)
    sampled = trajectory.y_values[(trajectory.v_grid >= v_lo) & (trajectory.v_grid <= v_hi)]
    if np.any(y <= 0.0) or np.any(sampled <= 0.0):
        bad = float(v[np.argmax(y <= 0.0)]) if np.any(y <= 0.0) else float("nan")
        raise InvalidTrajectoryError(f"y is not positive inside the window (first at v={bad:.6g})")
    z = _z_of_v(trajectory, eps, v)
    dv = slope_from_y(y, eps)
    return FrontProfile(z, v, dv, y, eps, problem.speed_c, problem.model.digest)


def residual_second_order(profile: FrontProfile, model: ModelSpec, middle: float = 0.8) -> float:
    """Max of ``|eps (v'/sqrt(1 - v'^2))' - (c + h'(v)) v' + f(v)|`` over the middle of the z-range.

    The outer derivative is taken as ``v' d/dv`` with second-order differences
    on the profile's grid, which is uniform in ``v``; differencing directly in
    ``z`` would lose accuracy in the tails where the z-spacing grows fast.
    Profiles that are not strictly increasing are differenced in ``z``.
    """
    dv = np.asarray(profile.dv_values, dtype=float)
    if np.any(dv >= 1.0):
        i = int(np.argmax(dv >= 1.0))
        raise ConstraintViolationError(f"|v'| >= 1 at z={profile.z_grid[i]:.6g}")
    z, v = profile.z_grid, profile.v_values
    if z.size < 400:
        raise ValueError("residual needs at least 400 grid points")
    flux = profile.epsilon * dv / np.sqrt(1.0 - dv * dv)
    if np.all(np.diff(v) > 0):
        dflux = dv * np.gradient(flux, v)
    else:  # not a front (e.g. a synthetic constant state); difference in z
        dflux = np.gradient(flux, z)
    res = dflux - (profile.speed_c + model.h_prime(v)) * dv + model.f(v)
    span = z[-1] - z[0]
    trim = 0.5 * (1.0 - middle) * span
    keep = (z >= z[0] + trim) & (z <= z[-1] - trim)
    keep[[0, -1]] = False
    return float(np.max(np.abs(res[keep])))
