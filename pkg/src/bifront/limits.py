"""Vanishing-diffusion limit: regimes, limit speed and limit profile.

The sign structure of ``S(v) = (F(v) - h(v)) / v`` selects one of three
regimes:

* Case1, ``S' < 0`` on ``(0, 1]``: ``c_bar = 0`` and the limit is the inviscid
  profile through ``(0, 1/2)``, cut off at 0 where it leaves ``[0, 1]``.
* Case2, ``0 < sup S != S(1)``: ``c_bar = f(v+) - h'(v+)`` with ``v+`` the
  largest zero of ``S'``; a slope-1 ramp glued to an inviscid piece.
* Case3, ``S' > 0`` on ``(0, 1)``: ``c_bar = F(1) - h(1)`` and the limit is
  the slope-1 ramp through ``(0, 1/2)``.

Anything else is reported as Unclassified.
"""
from __future__ import annotations

import csv
import enum
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

from .errors import DomainError, InconsistencyError, RegimeError
from .model import ModelSpec
from .quadrature import cumulative_unit
from .speed import critical_speed, lower_bound, sup_S

CLASSIFICATION_TOL = 1e-9
ENDPOINT_REFINEMENT = 1e-8


class Regime(str, enum.Enum):
    CASE1 = "Case1"
    CASE2 = "Case2"
    CASE3 = "Case3"
    UNCLASSIFIED = "Unclassified"


def _regime_grid(model: ModelSpec) -> np.ndarray:
    """Validation grid on ``(0, 1]`` with log-spaced refinement towards both ends."""
    ends = np.logspace(math.log10(ENDPOINT_REFINEMENT), -3, 60)
    return np.unique(np.concatenate([model.grid()[1:], ends, 1.0 - ends]))


def _count_local_maxima(g: np.ndarray, tol: float) -> int:
    """Number of strict local maxima (plateaus count once), endpoints included."""
    d = np.diff(g)
    d[np.abs(d) <= tol] = 0.0
    signs = np.sign(d[d != 0.0])
    if signs.size == 0:
        return 1
    count = int(np.sum((signs[:-1] > 0) & (signs[1:] < 0)))
    count += int(signs[0] < 0)  # decreasing from the left end
    count += int(signs[-1] > 0)  # increasing into the right end
    return count


@dataclass(frozen=True)
class RegimeReport:
    regime: Regime
    sup_S: float
    sup_S_arg: float
    S_at_1: float
    S_prime_min: float
    S_prime_max: float
    unique_max_fminus_hprime: bool
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "regime": self.regime.value,
            "sup_S": self.sup_S,
            "sup_S_arg": self.sup_S_arg,
            "S_at_1": self.S_at_1,
            "S_prime_sign_summary": [self.S_prime_min, self.S_prime_max],
            "unique_max_fminus_hprime": self.unique_max_fminus_hprime,
            "note": self.note,
        }


def classify_regime(model: ModelSpec, tol: float = CLASSIFICATION_TOL) -> RegimeReport:
    v = _regime_grid(model)
    sp = np.asarray(model.S_prime(v))
    interior = v < 1.0
    s_sup, s_arg = sup_S(model)
    s1 = float(model.S(1.0))
    g = np.asarray(model.f(v) - model.h_prime(v))
    unique = _count_local_maxima(np.concatenate([[float(model.f(0.0) - model.h_prime(0.0))], g]), tol) == 1
    sp_min, sp_max = float(np.min(sp)), float(np.max(sp))
    common = dict(sup_S=s_sup, sup_S_arg=s_arg, S_at_1=s1, S_prime_min=sp_min,
                  S_prime_max=sp_max, unique_max_fminus_hprime=unique)
    if sp_max < -tol:
        return RegimeReport(Regime.CASE1, **common)
    if np.min(sp[interior]) > tol:
        return RegimeReport(Regime.CASE3, **common)
    if s_sup > tol and abs(s_sup - s1) > tol:
        if unique:
            return RegimeReport(Regime.CASE2, **common)
        return RegimeReport(Regime.UNCLASSIFIED, note="f - h' has more than one maximum point", **common)
    return RegimeReport(Regime.UNCLASSIFIED, note="theorem hypotheses not satisfied", **common)


def find_v_plus(model: ModelSpec) -> float:
    """Largest zero of ``S'`` in ``(0, 1)``, i.e. the largest root of ``F - h = v (f - h')``."""
    v = _regime_grid(model)
    v = v[v < 1.0]
    sp = np.asarray(model.S_prime(v))
    change = np.flatnonzero(np.sign(sp[:-1]) * np.sign(sp[1:]) <= 0)
    if change.size == 0:
        raise InconsistencyError("S' has no sign change in (0, 1)")
    i = int(change[-1])
    a, b = float(v[i]), float(v[i + 1])
    if sp[i + 1] == 0.0:
        return b
    return float(brentq(lambda x: float(model.S_prime(x)), a, b, xtol=1e-14, rtol=4 * np.finfo(float).eps))


@dataclass(frozen=True)
class LimitSpeed:
    c_bar: float
    regime: Regime
    theorem_value: bool
    v_plus: float | None = None


def limit_speed(model: ModelSpec, report: RegimeReport | None = None) -> LimitSpeed:
    """``c_bar`` by the regime formula; Unclassified models get the lower bound, flagged."""
    report = report or classify_regime(model)
    if report.regime is Regime.CASE1:
        return LimitSpeed(0.0, report.regime, True)
    if report.regime is Regime.CASE3:
        return LimitSpeed(float(model.F(1.0) - model.h(1.0)), report.regime, True)
    if report.regime is Regime.CASE2:
        vp = find_v_plus(model)
        return LimitSpeed(float(model.f(vp) - model.h_prime(vp)), report.regime, True, vp)
    return LimitSpeed(lower_bound(model), report.regime, False)


# -- inviscid profile ---------------------------------------------------------

def _inviscid_grid(v_lo: float, v_hi: float, n: int = 2000) -> np.ndarray:
    core = np.linspace(max(v_lo, 1e-3), min(v_hi, 1.0 - 1e-3), n)
    lo = np.logspace(-12, -3, 120)
    hi = 1.0 - lo
    v = np.unique(np.concatenate([core, lo, hi]))
    return v[(v >= v_lo) & (v <= v_hi)]


def _local_exponent(fun, s0: float = 1e-7, s1: float = 1e-9) -> float:
    """Exponent ``p`` with ``fun(s) ~ C s**p`` as ``s -> 0+``."""
    a, b = abs(float(fun(s0))), abs(float(fun(s1)))
    if a == 0.0 or b == 0.0:
        return math.inf
    return math.log(a / b) / math.log(s0 / s1)


@dataclass
class InviscidProfile:
    """Sampled solution of ``(c_bar + h'(v)) v' = f(v)`` through ``anchor``.

    ``z0`` is where the profile reaches 0 (``-inf`` if only asymptotically).
    ``degenerate_at`` records a ``v`` where ``c_bar + h'`` vanishes inside
    the sampled range; the profile is truncated there.
    """

    z: np.ndarray
    v: np.ndarray
    c_bar: float
    anchor: tuple[float, float]
    z0: float
    degenerate_at: float | None = None
    _interp: PchipInterpolator | None = field(default=None, repr=False)

    @property
    def z0_finite(self) -> bool:
        return math.isfinite(self.z0)

    def value(self, z):
        z = np.asarray(z, dtype=float)
        if self._interp is None:
            self._interp = PchipInterpolator(self.z, self.v, extrapolate=False)
        out = self._interp(np.clip(z, self.z[0], self.z[-1]))
        if self.z0_finite:
            # between z0 and the first sample the profile is linear to O(v_min)
            gap = (z < self.z[0]) & (z > self.z0)
            out = np.where(gap, self.v[0] * (z - self.z0) / (self.z[0] - self.z0), out)
            out = np.where(z <= self.z0, 0.0, out)
        return out if out.ndim else float(out)

    def slope(self, z, model: ModelSpec):
        """``f / (c_bar + h')``; at the end points the nearest sample stands in for the limit."""
        v = np.clip(np.asarray(self.value(z), dtype=float), self.v[0], self.v[-1])
        return model.f(v) / (self.c_bar + model.h_prime(v))


def inviscid_profile(model: ModelSpec, c_bar: float, anchor: tuple[float, float] = (0.0, 0.5),
                     v_range: tuple[float, float] = (0.0, 1.0)) -> InviscidProfile:
    """Solve the inviscid problem by quadrature of ``z(v) = z_a + int (c_bar + h') / f``."""
    z_a, v_a = anchor
    if not 0.0 < v_a < 1.0:
        raise DomainError("anchor value must lie in (0, 1)")
    if not c_bar + float(model.h_prime(v_a)) > 0:
        raise DomainError("c_bar + h'(anchor) must be positive")
    v = _inviscid_grid(max(v_range[0], 0.0), min(v_range[1], 1.0))
    v = np.unique(np.append(v, v_a))
    g = c_bar + np.asarray(model.h_prime(v))
    degenerate = None
    bad = np.flatnonzero(g <= 0.0)
    if bad.size:
        below, above = bad[v[bad] < v_a], bad[v[bad] > v_a]
        lo = int(below[-1]) + 1 if below.size else 0
        hi = int(above[0]) if above.size else v.size
        degenerate = float(v[below[-1]] if below.size else v[above[0]])
        v = v[lo:hi]

    def integrand(s):
        return (c_bar + model.h_prime(s)) / model.f(s)

    z = z_a + cumulative_unit(integrand, v, v_a)
    z0 = -math.inf
    if degenerate is None and v_range[0] <= 0.0:
        p = _local_exponent(integrand)
        if p > -1.0 + 0.05:
            tail, _ = quad(integrand, 0.0, float(v[0]), limit=200)
            z0 = float(z[0] - tail)
    return InviscidProfile(z, v, c_bar, (z_a, v_a), z0, degenerate)


@dataclass(frozen=True)
class SharpnessReport:
    ell: float | None
    sharp: bool
    z0_finite: bool
    exponent: float
    inconclusive: bool = False


def sharpness_at_zero(model: ModelSpec) -> SharpnessReport:
    """``ell = lim f/h'`` at ``0+`` and whether ``int_0 h'/f`` converges."""
    s = 10.0 ** -np.arange(3, 11, dtype=float)
    hp = np.asarray(model.h_prime(s))
    p = _local_exponent(lambda x: model.h_prime(x) / model.f(x))
    z0_finite = p > -1.0 + 0.05
    if np.all(hp == 0.0):
        return SharpnessReport(math.inf, True, False, p)
    if np.any(hp == 0.0):
        return SharpnessReport(None, False, z0_finite, p, inconclusive=True)
    r = np.asarray(model.f(s)) / hp
    d1 = np.diff(r)
    d2 = np.diff(d1)
    est = []
    for j in range(d2.size):
        if abs(d2[j]) > 1e-14 * max(1.0, abs(r[j + 2])):
            est.append(r[j + 2] - d1[j + 1] ** 2 / d2[j])
        else:
            est.append(r[j + 2])
    est = np.asarray(est)
    ell = float(est[-1])
    spread = float(np.max(np.abs(est[-3:] - ell)))
    inconclusive = spread > 1e-6 * max(1.0, abs(ell)) or np.any(np.sign(d1[1:]) * np.sign(d1[:-1]) < 0)
    if abs(ell) < 1e-9:
        ell = 0.0
    return SharpnessReport(ell, ell > 0.0, bool(z0_finite), p, bool(inconclusive))


# -- piecewise limit profile --------------------------------------------------

@dataclass
class Segment:
    kind: str  # "constant", "linear" or "inviscid"
    z_start: float
    z_end: float
    level: float = 0.0
    anchor: tuple[float, float] = (0.0, 0.0)
    inviscid: InviscidProfile | None = None

    def value(self, z):
        z = np.asarray(z, dtype=float)
        if self.kind == "constant":
            return np.full(z.shape, self.level)
        if self.kind == "linear":
            return self.anchor[1] + (z - self.anchor[0])
        return np.asarray(self.inviscid.value(z))

    def slope(self, z, model: ModelSpec):
        z = np.asarray(z, dtype=float)
        if self.kind == "constant":
            return np.zeros(z.shape)
        if self.kind == "linear":
            return np.ones(z.shape)
        return np.asarray(self.inviscid.slope(z, model))


@dataclass
class PiecewiseProfile:
    segments: list[Segment]

    @property
    def joints(self) -> list[float]:
        return [s.z_end for s in self.segments[:-1]]

    def value(self, z):
        z = np.asarray(z, dtype=float)
        out = np.empty(z.shape)
        tags = self.tags(z)
        for k, seg in enumerate(self.segments):
            m = tags == k
            if np.any(m):
                out[m] = seg.value(z[m])
        return out if out.ndim else float(out)

    def tags(self, z):
        z = np.asarray(z, dtype=float)
        return np.searchsorted(np.asarray(self.joints), z, side="left")

    def joint_report(self, model: ModelSpec) -> list[dict]:
        rows = []
        for left, right in zip(self.segments, self.segments[1:]):
            zj = left.z_end
            rows.append({
                "z": zj,
                "value_jump": float(abs(left.value(zj) - right.value(zj))),
                "slope_jump": float(abs(left.slope(zj, model) - right.slope(zj, model))),
            })
        return rows

    def to_csv(self, z, path=None) -> str:
        z = np.asarray(z, dtype=float)
        v = self.value(z)
        tags = self.tags(z)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["z", "v", "segment_tag"])
        for zi, vi, t in zip(z, np.atleast_1d(v), tags):
            writer.writerow([f"{zi:.12g}", f"{vi:.12g}", self.segments[int(t)].kind])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(text)
        return text


def _case1_profile(model: ModelSpec) -> tuple[PiecewiseProfile, InviscidProfile]:
    inv = inviscid_profile(model, 0.0, (0.0, 0.5))
    segs = []
    if inv.z0_finite:
        segs.append(Segment("constant", -math.inf, inv.z0, level=0.0))
    segs.append(Segment("inviscid", inv.z0, math.inf, inviscid=inv))
    return PiecewiseProfile(segs), inv


def limit_profile(model: ModelSpec, report: RegimeReport | None = None,
                  speed: LimitSpeed | None = None) -> PiecewiseProfile:
    report = report or classify_regime(model)
    if report.regime is Regime.UNCLASSIFIED:
        raise RegimeError(f"no limit profile for an unclassified model ({report.note})")
    speed = speed or limit_speed(model, report)
    return _assemble(model, report, speed)[0]


def _assemble(model, report, speed):
    """Return ``(profile, z_plus, inviscid_piece)``."""
    if report.regime is Regime.CASE3:
        segs = [
            Segment("constant", -math.inf, -0.5, level=0.0),
            Segment("linear", -0.5, 0.5, anchor=(0.0, 0.5)),
            Segment("constant", 0.5, math.inf, level=1.0),
        ]
        return PiecewiseProfile(segs), None, None
    if report.regime is Regime.CASE1:
        prof, inv = _case1_profile(model)
        return prof, None, inv
    vp, c_bar = speed.v_plus, speed.c_bar
    if vp >= 0.5:
        zj = vp - 0.5
        inv = inviscid_profile(model, c_bar, (zj, vp), v_range=(vp, 1.0))
        segs = [
            Segment("constant", -math.inf, -0.5, level=0.0),
            Segment("linear", -0.5, zj, anchor=(0.0, 0.5)),
            Segment("inviscid", zj, math.inf, inviscid=inv),
        ]
        return PiecewiseProfile(segs), zj, inv
    inv = inviscid_profile(model, c_bar, (0.0, 0.5), v_range=(vp, 1.0))
    z_plus = float(inv.z[0])
    segs = [
        Segment("constant", -math.inf, z_plus - vp, level=0.0),
        Segment("linear", z_plus - vp, z_plus, anchor=(z_plus, vp)),
        Segment("inviscid", z_plus, math.inf, inviscid=inv),
    ]
    return PiecewiseProfile(segs), z_plus, inv


@dataclass
class LimitAnalysis:
    regime: RegimeReport
    c_bar: float
    theorem_value: bool
    v_plus: float | None
    z_plus: float | None
    kink_points: list[float]
    non_c1_points: list[float]
    sharp_at_zero: bool | None
    ell: float | None
    z0: float | None
    limit_profile: PiecewiseProfile | None

    def to_record(self) -> dict:
        z0 = self.z0
        return {
            "regime": self.regime.to_dict(),
            "c_bar": self.c_bar,
            "theorem_hypotheses_satisfied": self.theorem_value,
            "v_plus": self.v_plus,
            "z_plus": self.z_plus,
            "kink_points": self.kink_points,
            "non_c1_points": self.non_c1_points,
            "sharp_at_zero": self.sharp_at_zero,
            "ell": self.ell,
            "z0": z0 if z0 is not None and math.isfinite(z0) else None,
            "z0_is_minus_infinity": z0 is not None and z0 == -math.inf,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_record(), sort_keys=True)


def analyze(model: ModelSpec) -> LimitAnalysis:
    """Regime, limit speed and limit profile in one record.

    ``kink_points`` lists every segment junction of the limit profile;
    ``non_c1_points`` is the subset where the slope jumps.
    """
    report = classify_regime(model)
    speed = limit_speed(model, report)
    if report.regime is Regime.UNCLASSIFIED:
        return LimitAnalysis(report, speed.c_bar, False, None, None, [], [], None, None, None, None)
    profile, z_plus, inv = _assemble(model, report, speed)
    joints = profile.joint_report(model)
    kinks = [j["z"] for j in joints]
    non_c1 = [j["z"] for j in joints if j["slope_jump"] > 1e-6]
    ell = None
    z0 = None
    if report.regime is Regime.CASE1:
        sharp = sharpness_at_zero(model)
        ell, sharp_flag = sharp.ell, sharp.sharp
        z0 = inv.z0
    else:
        sharp_flag = True  # the slope-1 ramp meets the constant 0 state
    return LimitAnalysis(report, speed.c_bar, speed.theorem_value, speed.v_plus, z_plus,
                         kinks, non_c1, sharp_flag, ell, z0, profile)


# -- linear-piece identity ------------------------------------------------------

def richardson(eps, values) -> tuple[float, float | None]:
    """Extrapolate ``q(eps) = q0 + A eps**p`` to ``eps = 0`` from the last three samples.

    Returns ``(q0, p)``; ``p`` is ``None`` when the samples do not support a
    power-law fit, in which case the smallest-eps value is returned.
    """
    e1, e2, e3 = (float(x) for x in eps[-3:])
    q1, q2, q3 = (float(x) for x in values[-3:])
    d12, d23 = q1 - q2, q2 - q3
    if d23 == 0.0 or d12 == 0.0 or d12 * d23 < 0:
        return q3, None
    target = d12 / d23

    def mismatch(p):
        return (e1 ** p - e2 ** p) / (e2 ** p - e3 ** p) - target

    try:
        p = brentq(mismatch, 0.05, 4.0, xtol=1e-12)
    except ValueError:
        return q3, None
    a = d23 / (e2 ** p - e3 ** p)
    return q3 - a * e3 ** p, p


@dataclass
class IdentityReport:
    v0: float
    v1: float
    identity_value: float
    c_bar_extrapolated: float
    c_bar_theory: float
    residual: float
    passed: bool
    orders: dict
    rows: list[dict]


def check_linear_piece_identity(model: ModelSpec, eps_list, v0: float = 0.0, v1: float = 1.0,
                                threshold: float = 1e-3, tol_c: float = 1e-7) -> IdentityReport:
    """Check ``c_bar = [F - h]_{v0}^{v1} / (v1 - v0) + [y_bar]_{v0}^{v1} / (v1 - v0)``.

    ``y_bar`` and ``c_bar`` are extrapolated from the critical solutions at
    each ``eps`` in ``eps_list``.
    """
    if not v0 < v1:
        raise ValueError("need v0 < v1")
    if not (0.0 <= v0 and v1 <= 1.0):
        raise DomainError("v0, v1 must lie in [0, 1]")
    report = classify_regime(model)
    if report.regime is not Regime.CASE3:
        raise RegimeError(f"identity applies to Case3 models, got {report.regime.value}")
    eps_list = [float(e) for e in eps_list]
    if len(eps_list) < 3:
        raise ValueError("need at least three eps values")

    rows = []
    for eps in eps_list:
        res = critical_speed(model, eps, tol_c=tol_c)
        traj = res.trajectory_at_c_star
        ends = []
        for v in (v0, v1):
            if v <= traj.v_min_reached or v >= traj.v_grid[0]:
                ends.append(0.0)  # boundary conditions y(0) = y(1) = 0
            else:
                ends.append(float(traj.y_at(v)))
        rows.append({"epsilon": eps, "c_star": res.c_star, "y_v0": ends[0], "y_v1": ends[1]})

    c_ex, pc = richardson(eps_list, [r["c_star"] for r in rows])
    y0_ex, p0 = richardson(eps_list, [r["y_v0"] for r in rows])
    y1_ex, p1 = richardson(eps_list, [r["y_v1"] for r in rows])
    dv = v1 - v0
    jump = float(model.F(v1) - model.F(v0) - model.h(v1) + model.h(v0))
    identity = jump / dv + (y1_ex - y0_ex) / dv
    resid = abs(identity - c_ex)
    c_theory = float(model.F(1.0) - model.h(1.0))
    return IdentityReport(v0, v1, identity, c_ex, c_theory, resid, resid <= threshold,
                          {"c_star": pc, "y_v0": p0, "y_v1": p1}, rows)
