"""Library-side values for every certified quantity, and their comparison."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .limits import analyze, find_v_plus, inviscid_profile, limit_speed, sharpness_at_zero
from .model import (ConvectionSpec, ModelSpec, ReactionSpec, fisher_burgers, power_model,
                    pure_convection)
from .reduction import (FrontProblem, integrate_backward, rhs_y, series_start_at_one,
                        y_upper_bound)
from .speed import lower_bound, sup_S, upper_bound


def _fb_tag(tag: str) -> float:
    raw = tag.split("_a", 1)[1]
    return -1.0 / 6.0 if raw == "-1/6" else float(raw)


def library_value(qid: str) -> float:
    """Recompute quantity ``qid`` through the public library API."""
    kind, _, rest = qid.partition(".")
    if kind == "rhs_y":
        m = ModelSpec(ReactionSpec.logistic(1.0), ConvectionSpec.zero())
        return rhs_y(FrontProblem(m, 1.0, 1.0), 0.5, 2.0)
    if kind == "series":
        start = series_start_at_one(FrontProblem(fisher_burgers(1.0, 0.0), 1.0, 1.0), 1e-6)
        return start.coefficient if rest.endswith(".B") else start.coefficient ** 2
    if kind == "lower_bound":
        return lower_bound(fisher_burgers(1.0, _fb_tag(rest)))
    if kind == "upper_bound":
        tag, _, eps = rest.rpartition(".eps")
        return upper_bound(fisher_burgers(1.0, _fb_tag(tag)), float(eps))
    if kind == "v_plus":
        return find_v_plus(fisher_burgers(1.0, _fb_tag(rest)))
    if kind == "c_bar":
        return limit_speed(fisher_burgers(1.0, _fb_tag(rest))).c_bar
    if kind == "sup_S":
        return sup_S(fisher_burgers(1.0, _fb_tag(rest)))[0]
    if kind == "kink":
        return analyze(fisher_burgers(1.0, _fb_tag(rest))).kink_points[-1]
    if kind == "upper_y":
        return y_upper_bound(FrontProblem(fisher_burgers(1.0, -0.5), 2e-3, 0.7), 0.5)
    if kind == "pure_convection":
        traj = integrate_backward(FrontProblem(pure_convection(), 0.01, 0.0))
        return float(traj.y_at(0.5))
    if kind == "inviscid":
        return float(inviscid_profile(power_model(2.0, 2.0), 0.0).value(2.0))
    if kind == "z0":
        m = fisher_burgers(1.0, 1.0) if rest == "fb_a1" else power_model(1.0, 1.5)
        return inviscid_profile(m, 0.0).z0
    if kind == "ell":
        return sharpness_at_zero(fisher_burgers(1.0, _fb_tag(rest))).ell
    raise KeyError(qid)


@dataclass(frozen=True)
class Check:
    quantity_id: str
    reference: float
    computed: float
    tolerance: float

    @property
    def error(self) -> float:
        return abs(self.computed - self.reference)

    @property
    def passed(self) -> bool:
        return math.isfinite(self.computed) and self.error <= self.tolerance


def run_checks(records) -> list[Check]:
    rows = []
    for rec in records:
        try:
            value = float(library_value(rec["quantity_id"]))
        except KeyError:
            continue
        rows.append(Check(rec["quantity_id"], rec["value"], value, rec["tolerance"]))
    return rows
