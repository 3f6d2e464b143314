"""Speed bounds and the critical speed by bisection on admissibility."""
from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import DegenerateEndpointError, InconsistencyError
from .model import ModelSpec
from .reduction import (FrontProblem, Tolerances, Verdict, YTrajectory,
                        integrate_backward)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SpeedBounds:
    lower: float
    upper: float
    sup_S: float
    sup_S_arg: float

    def to_dict(self) -> dict:
        return {"lower": self.lower, "upper": self.upper, "sup_S": self.sup_S, "sup_S_arg": self.sup_S_arg}


def sup_S(model: ModelSpec, n: int | None = None) -> tuple[float, float]:
    """``(sup S, argmax)`` over ``(0, 1]``: grid maximum refined by bounded golden-section search."""
    v = model.grid(n)
    s = np.asarray(model.S(v))
    s[0] = -np.inf  # S(0) is a limit value, not part of the supremum's domain
    i = int(np.argmax(s))
    best_v, best_s = float(v[i]), float(s[i])
    lo = float(v[max(i - 1, 1)]) if i > 1 else float(v[1]) * 1e-3
    hi = float(v[min(i + 1, v.size - 1)])
    if hi > lo:
        res = minimize_scalar(lambda x: -float(model.S(x)), bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-10})
        if -res.fun > best_s:
            best_v, best_s = float(res.x), float(-res.fun)
    # The supremum may be approached as v -> 0; S(v) -> 0 there.
    if best_s < 0.0:
        return 0.0, 0.0
    return best_s, best_v


def lower_bound(model: ModelSpec) -> float:
    """``max(0, sup S)``: no admissible speed lies below it."""
    return max(0.0, sup_S(model)[0])


def sup_f_over_v(model: ModelSpec) -> float:
    v = np.concatenate([np.logspace(-8, -2, 200), model.grid()[1:]])
    return float(np.max(model.f(v) / v))


def upper_bound(model: ModelSpec, epsilon: float) -> float:
    """``max f - min h' + 2 sqrt(eps * sup f(v)/v)``: every speed above is admissible."""
    v = model.grid()
    return (float(np.max(model.f(v))) - float(np.min(model.h_prime(v)))
            + 2.0 * math.sqrt(epsilon * sup_f_over_v(model)))


def speed_bounds(model: ModelSpec, epsilon: float) -> SpeedBounds:
    s, arg = sup_S(model)
    return SpeedBounds(max(0.0, s), upper_bound(model, epsilon), s, arg)


@dataclass
class CriticalSpeedResult:
    c_star: float
    bracket: tuple[float, float]
    iterations: int
    final_bracket_width: float
    trajectory_at_c_star: YTrajectory
    bounds: SpeedBounds
    epsilon: float
    model_digest: str
    log: list[tuple[float, str]] = field(default_factory=list)

    def to_record(self) -> dict:
        return {
            "c_star": self.c_star,
            "lower_bound": self.bounds.lower,
            "upper_bound": self.bounds.upper,
            "iterations": self.iterations,
            "epsilon": self.epsilon,
            "model_digest": self.model_digest,
            "bracket": list(self.bracket),
            "final_bracket_width": self.final_bracket_width,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_record(), sort_keys=True)


def _classify(problem: FrontProblem, tol: Tolerances) -> tuple[Verdict | None, YTrajectory | None]:
    try:
        traj = integrate_backward(problem, tolerances=tol)
    except DegenerateEndpointError:
        return None, None
    return traj.verdict, traj


def critical_speed(model: ModelSpec, epsilon: float, tol_c: float = 1e-6, max_iter: int = 60,
                   tolerances: Tolerances | None = None) -> CriticalSpeedResult:
    """Smallest admissible speed, bracketed to within ``tol_c``.

    The bracket starts at ``[lower_bound, upper_bound]``. If the lower bound
    is itself admissible it is returned directly with a zero-width bracket.
    """
    tol = tolerances or Tolerances()
    bounds = speed_bounds(model, epsilon)
    base = FrontProblem(model, epsilon, bounds.upper)
    history: list[tuple[float, str]] = []

    def verdict(c):
        v, traj = _classify(base.with_speed(c), tol)
        history.append((c, v.value if v else "Degenerate"))
        if v is Verdict.TERMINAL_POSITIVE and c > bounds.lower:
            log.debug("TerminalPositive at c=%.10g (eps=%g)", c, epsilon)
        return v is Verdict.ADMISSIBLE, traj

    ok, traj_lo = verdict(bounds.lower)
    if ok:
        return CriticalSpeedResult(bounds.lower, (bounds.lower, bounds.lower), 0, 0.0, traj_lo,
                                   bounds, epsilon, model.digest, history)
    ok, traj_hi = verdict(bounds.upper)
    if not ok:
        raise InconsistencyError(
            f"upper bound c={bounds.upper:.8g} is not admissible at eps={epsilon:g}; "
            "check integration tolerances"
        )
    c_lo, c_hi = bounds.lower, bounds.upper
    it = 0
    while c_hi - c_lo > tol_c and it < max_iter:
        mid = 0.5 * (c_lo + c_hi)
        ok, traj = verdict(mid)
        if ok:
            c_hi, traj_hi = mid, traj
        else:
            c_lo = mid
        it += 1
    width = c_hi - c_lo
    if width > tol_c:
        raise InconsistencyError(f"bisection did not reach width {tol_c:g} in {max_iter} steps")
    return CriticalSpeedResult(0.5 * (c_lo + c_hi), (c_lo, c_hi), it, width, traj_hi,
                               bounds, epsilon, model.digest, history)


@dataclass
class MonotonicityReport:
    rows: list[tuple[float, float]]
    monotone: bool
    violations: list[tuple[float, float]]


def speed_monotonicity_check(model: ModelSpec, eps_list, tol_c: float = 1e-6,
                             tolerances: Tolerances | None = None) -> MonotonicityReport:
    """Critical speeds along a decreasing ``eps_list`` and whether they are nonincreasing.

    Violations are reported, not raised.
    """
    eps_list = [float(e) for e in eps_list]
    if any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise ValueError("eps_list must be strictly decreasing")
    rows = [(e, critical_speed(model, e, tol_c, tolerances=tolerances).c_star) for e in eps_list]
    bad = [(e2, c2) for (e1, c1), (e2, c2) in zip(rows, rows[1:]) if c2 > c1 + 2.0 * tol_c]
    return MonotonicityReport(rows, not bad, bad)
