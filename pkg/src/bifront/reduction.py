"""First-order reduction of the front problem and its backward integration.

With ``y(v) = eps * (1 / sqrt(1 - v'^2) - 1)`` the wave profile equation
becomes the scalar problem

    y' = (c + h'(v)) * sqrt(y (2 eps + y)) / (eps + y) - f(v),
    y(0) = y(1) = 0,  y > 0 on (0, 1).

The solution attaching at ``v = 1`` is unique, so it is integrated backward
from a local series start and then judged at ``v_min``.
"""
from __future__ import annotations

import csv
import enum
import io
import json
import logging
import math
import os
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from . import kernel
from .errors import DegenerateEndpointError, DomainError, StiffnessError
from .model import ModelSpec

log = logging.getLogger(__name__)

TOL_ENV = "BIFRONT_TOL_OVERRIDE"


class Verdict(str, enum.Enum):
    ADMISSIBLE = "Admissible"
    INTERIOR_CROSSING = "InteriorCrossing"
    TERMINAL_POSITIVE = "TerminalPositive"


@dataclass(frozen=True)
class FrontProblem:
    model: ModelSpec
    epsilon: float
    speed_c: float

    def __post_init__(self):
        if not (math.isfinite(self.epsilon) and self.epsilon > 0):
            raise DomainError("epsilon must be positive")
        if not math.isfinite(self.speed_c):
            raise DomainError("speed must be finite")

    def with_speed(self, c: float) -> FrontProblem:
        return replace(self, speed_c=float(c))


@dataclass(frozen=True)
class Tolerances:
    """Integration settings.

    ``atol`` is far below the default one might expect because ``y`` starts
    at ``O(delta**2)`` and ends near ``O(v_min**2)``; the error control must be
    relative there.
    """

    rtol: float = 1e-9
    atol: float = 1e-20
    delta: float = 1e-6
    v_min: float = 1e-4
    max_steps: int = 2_000_000

    def scaled(self, factor: float) -> Tolerances:
        return replace(self, rtol=self.rtol * factor, atol=self.atol * factor)

    @classmethod
    def from_env(cls, **overrides) -> Tolerances:
        tol = cls(**overrides)
        raw = os.environ.get(TOL_ENV)
        if raw:
            tol = tol.scaled(float(raw))
        return tol


@dataclass(frozen=True)
class SeriesStart:
    v_start: float
    y_start: float
    coefficient: float
    shallow: bool


@dataclass
class YTrajectory:
    """Sampled backward solution with its admissibility verdict.

    Samples are stored in integration order (``v`` decreasing).
    """

    v_grid: np.ndarray
    y_values: np.ndarray
    dy_values: np.ndarray
    verdict: Verdict
    v_min_reached: float
    y_end: float
    threshold: float
    epsilon: float
    speed_c: float
    v_cross: float | None = None
    n_steps: int = 0
    n_rejected: int = 0
    shallow_start: bool = False
    _spline: CubicHermiteSpline | None = field(default=None, repr=False, compare=False)

    @property
    def admissible(self) -> bool:
        return self.verdict is Verdict.ADMISSIBLE

    def y_at(self, v):
        """Cubic Hermite interpolation through the accepted steps."""
        if self.v_grid.size < 2:
            raise DomainError("trajectory was integrated without recording samples")
        if self._spline is None:
            x = self.v_grid[::-1]
            keep = np.concatenate([[True], np.diff(x) > 0])
            self._spline = CubicHermiteSpline(
                x[keep], self.y_values[::-1][keep], self.dy_values[::-1][keep]
            )
        return self._spline(v)

    def verdict_record(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "v_cross": self.v_cross,
            "y_end": self.y_end,
            "v_min_reached": self.v_min_reached,
            "threshold": self.threshold,
            "epsilon": self.epsilon,
            "speed_c": self.speed_c,
            "n_steps": self.n_steps,
            "shallow_start": self.shallow_start,
        }

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["v", "y"])
        for v, y in zip(self.v_grid, self.y_values):
            writer.writerow([f"{v:.12g}", f"{y:.12g}"])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(text)
        return text

    def verdict_json(self) -> str:
        return json.dumps(self.verdict_record(), sort_keys=True)


def rhs_y(problem: FrontProblem, v: float, y: float) -> float:
    """Right-hand side of the reduced equation."""
    if y < 0:
        raise DomainError("y must be nonnegative")
    if not 0.0 <= v <= 1.0:
        raise DomainError("v must lie in [0, 1]")
    m, eps = problem.model, problem.epsilon
    g = problem.speed_c + float(m.h_prime(v))
    return g * math.sqrt(y * (2.0 * eps + y)) / (eps + y) - float(m.f(v))


def series_start_at_one(problem: FrontProblem, delta: float = 1e-6) -> SeriesStart:
    """Seed ``y(1 - delta)`` from the local expansion ``y ~ B**2 delta**2``.

    ``B`` is the positive root of ``2 B^2 + gamma B - m = 0`` with
    ``gamma = (c + h'(1)) sqrt(2 / eps)`` and ``m = -f'(1)``. When ``m == 0``
    and ``gamma > 0`` the quadratic term vanishes and the quasi-static balance
    ``(c + h'(1)) sqrt(2 y / eps) = f`` is used instead (a shallow start).
    """
    if not 0 < delta <= 1e-3:
        raise DomainError("delta must lie in (0, 1e-3]")
    m_, eps = problem.model, problem.epsilon
    g1 = problem.speed_c + float(m_.h_prime(1.0))
    gamma = g1 * math.sqrt(2.0 / eps)
    slope = m_.slope_at_one()
    root = (-gamma + math.sqrt(gamma * gamma + 8.0 * max(slope, 0.0))) / 4.0
    v0 = 1.0 - delta
    if root > 0:
        return SeriesStart(v0, root * root * delta * delta, root, False)
    if g1 <= 0:
        raise DegenerateEndpointError(
            f"no positive solution attaches at v=1 (c + h'(1) = {g1:.6g}, -f'(1) = {slope:.6g})"
        )
    y0 = 0.5 * eps * (float(m_.f(v0)) / g1) ** 2
    if y0 <= 0:
        raise DegenerateEndpointError("f vanishes identically near v=1; the backward solution is y == 0")
    return SeriesStart(v0, y0, 0.0, True)


def admissibility_threshold(epsilon: float, c: float, v_min: float) -> float:
    return max(2.0 * (max(c, 0.01) * v_min) ** 2 / epsilon, 1e-12)


def integrate_backward(problem: FrontProblem, v_min: float | None = None,
                       tolerances: Tolerances | None = None, record: bool = True,
                       backend: str | None = None, h_max: float = 0.0) -> YTrajectory:
    """Integrate from the series start at ``1 - delta`` down to ``v_min``.

    The verdict is ``InteriorCrossing`` if ``y`` reaches zero above ``v_min``,
    ``Admissible`` if ``y(v_min)`` is below :func:`admissibility_threshold`, and
    ``TerminalPositive`` otherwise. ``h_max > 0`` caps the step so the
    recorded samples are dense enough for accurate interpolation.
    """
    tol = tolerances or Tolerances()
    if v_min is None:
        v_min = tol.v_min
    start = series_start_at_one(problem, tol.delta)
    if not 0.0 < v_min < start.v_start:
        raise DomainError("v_min must lie in (0, 1 - delta)")
    eps, c = problem.epsilon, problem.speed_c
    status, v_end, y_end, n_steps, n_rej, vs, ys, dys = kernel.integrate(
        problem.model, eps, c, start.v_start, start.y_start, v_min,
        tol.rtol, tol.atol, h_max=h_max, max_steps=tol.max_steps, record=record, backend=backend,
    )
    if status == kernel.UNDERFLOW:
        raise StiffnessError(
            f"step size underflow at v={v_end:.6g}, y={y_end:.3g} (eps={eps:g}, c={c:.8g})"
        )
    if status == kernel.BUDGET:
        raise StiffnessError(
            f"step budget of {tol.max_steps} exhausted at v={v_end:.6g} (eps={eps:g}, c={c:.8g})"
        )
    threshold = admissibility_threshold(eps, c, v_min)
    v_cross = None
    if status == kernel.CROSSED:
        verdict = Verdict.INTERIOR_CROSSING
        v_cross = float(v_end)
    elif y_end <= threshold:
        verdict = Verdict.ADMISSIBLE
    else:
        verdict = Verdict.TERMINAL_POSITIVE
    return YTrajectory(
        v_grid=vs, y_values=ys, dy_values=dys, verdict=verdict,
        v_min_reached=float(v_end), y_end=float(y_end), threshold=threshold,
        epsilon=eps, speed_c=c, v_cross=v_cross, n_steps=int(n_steps),
        n_rejected=int(n_rej), shallow_start=start.shallow,
    )


def y_upper_bound(problem: FrontProblem, v: float) -> float | None:
    """Bound ``sqrt(eps^2 + (c v + h(v) - F(v))^2) - eps`` on admissible solutions.

    Returns ``None`` when ``c v + h(v) - F(v) <= 0`` at ``v > 0``: no solution
    with ``y(0) = 0`` exists for this speed.
    """
    m, eps, c = problem.model, problem.epsilon, problem.speed_c
    if v == 0:
        return 0.0
    arg = c * v + float(m.h(v)) - float(m.F(v))
    if arg <= 0:
        return None
    return math.sqrt(eps * eps + arg * arg) - eps


def inadmissibility_witness(problem: FrontProblem, n: int | None = None) -> float | None:
    """Point ``v`` where ``c v + h(v) - F(v) <= 0``, or ``None`` if there is none on the grid."""
    m, c = problem.model, problem.speed_c
    v = m.grid(n)[1:]
    arg = c * v + m.h(v) - m.F(v)
    if np.all(arg > 0):
        return None
    return float(v[int(np.argmin(arg))])


def uniform_upper_bound(model: ModelSpec, v):
    """Backward solution of ``y' = -max|h'| - f`` with ``y(1) = 0``, valid for every eps."""
    hp_max = float(np.max(np.abs(model.h_prime(model.grid()))))
    v = np.asarray(v, dtype=float)
    return hp_max * (1.0 - v) + float(model.F(1.0)) - model.F(v)
