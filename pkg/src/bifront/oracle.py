"""Independent verification paths.

Nothing here calls the reduction integrator or the profile reconstruction:
the phase-plane shooter integrates the second-order system with scipy's
stiff solvers, the scans use plain bisection, and the quadratures use
``scipy.integrate.quad``. The certification file produced by :func:`certify`
freezes the reference values that the test suite checks the library against.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad, solve_ivp

from .errors import DomainError, ShootingError
from .model import ModelSpec, fisher_burgers, power_model
from .reduction import FrontProblem, admissibility_threshold


@dataclass(frozen=True)
class PhasePlaneState:
    """``w = v' / sqrt(1 - v'^2)``, so the slope ``w / sqrt(1 + w^2)`` stays in (-1, 1)."""

    v: float
    w: float

    @property
    def slope(self) -> float:
        return self.w / math.sqrt(1.0 + self.w * self.w)


def y_from_w(w, eps):
    return eps * (np.sqrt(1.0 + np.asarray(w) ** 2) - 1.0)


def w_from_y(y, eps):
    y = np.asarray(y, dtype=float)
    return np.sqrt(y * (2.0 * eps + y)) / eps


@dataclass
class ShootingResult:
    z: np.ndarray
    v: np.ndarray
    w: np.ndarray
    success: bool
    reason: str
    z_half: float | None
    w_half: float | None
    sol: object = field(default=None, repr=False)

    @property
    def v_terminal(self) -> float:
        """``v`` at the largest ``z`` (the end attached to the equilibrium 1)."""
        return float(self.v[-1])

    def v_at(self, z):
        """Dense-output ``v`` with ``z`` measured from the point where ``v = 1/2``."""
        return self.sol(np.asarray(z, dtype=float))[0]


def _saddle_seed(model: ModelSpec, eps: float, c: float, delta: float) -> float:
    """``w`` on the stable eigendirection of ``(1, 0)`` at ``v = 1 - delta``."""
    g1 = c + float(model.h_prime(1.0))
    m = model.slope_at_one()
    if m > 0:
        # lambda^2 - (g1/eps) lambda - m/eps = 0, stable root is negative
        lam = (g1 / eps - math.sqrt((g1 / eps) ** 2 + 4.0 * m / eps)) / 2.0
        return -lam * delta
    if g1 <= 0:
        raise ShootingError("no stable direction at v = 1")
    # quasi-static balance when f vanishes to second order at 1
    return float(model.f(1.0 - delta)) / g1


def shoot_phase_plane(problem: FrontProblem, z_span: float = 400.0, delta: float = 1e-7,
                      v_stop: float = 1e-4, strict: bool = False, rtol: float = 1e-10,
                      atol: float = 1e-13) -> ShootingResult:
    """Integrate ``v' = w/sqrt(1+w^2)``, ``eps w' = (c+h'(v)) w/sqrt(1+w^2) - f(v)``.

    The orbit is followed backward in ``z`` from the stable manifold of the
    saddle ``(1, 0)`` until ``v = v_stop``. Forward shooting from ``(0, 0)``
    amplifies seed errors like ``exp((c + h') z / eps)`` and is unusable at
    small ``eps``. Success means the orbit reaches ``v_stop`` with ``w > 0``
    and ``y = eps (sqrt(1 + w^2) - 1)`` below the admissibility threshold.
    """
    model, eps, c = problem.model, problem.epsilon, problem.speed_c

    def rhs(z, s):
        v, w = s
        q = w / math.sqrt(1.0 + w * w)
        vv = min(max(v, 0.0), 1.0)
        return [q, ((c + float(model.h_prime(vv))) * q - float(model.f(vv))) / eps]

    def hit_bottom(z, s):
        return s[0] - v_stop
    hit_bottom.terminal = True

    def lost_monotone(z, s):
        return s[1]
    lost_monotone.terminal = True

    def half(z, s):
        return s[0] - 0.5

    w0 = _saddle_seed(model, eps, c, delta)
    sol = solve_ivp(rhs, (0.0, -z_span), [1.0 - delta, w0], method="Radau", rtol=rtol,
                    atol=atol, dense_output=True, events=[hit_bottom, lost_monotone, half])
    z = sol.t[::-1]
    v = sol.y[0][::-1]
    w = sol.y[1][::-1]
    z_half = float(sol.t_events[2][0]) if len(sol.t_events[2]) else None
    w_half = float(sol.y_events[2][0][1]) if z_half is not None else None
    if len(sol.t_events[1]):
        ok, reason = False, f"w vanished at v={sol.y_events[1][0][0]:.6g}"
    elif len(sol.t_events[0]):
        y_end = float(y_from_w(sol.y_events[0][0][1], eps))
        thr = admissibility_threshold(eps, c, v_stop)
        ok = y_end <= thr
        reason = "reached v_stop" if ok else f"reached v_stop with y={y_end:.3g} above {thr:.3g}"
    else:
        ok, reason = False, f"did not reach v={v_stop:g} within z-span {z_span:g} ({sol.message})"
    if not np.all(np.isfinite(w)):
        ok, reason = False, "w diverged"
    if strict and not ok:
        raise ShootingError(reason)
    return ShootingResult(z - (z_half or 0.0), v, w, ok, reason, 0.0 if z_half is not None else None,
                          w_half, _Shifted(sol.sol, z_half or 0.0))


class _Shifted:
    """Dense output re-expressed in the aligned ``z`` (``v = 1/2`` at ``z = 0``)."""

    def __init__(self, sol, shift):
        self._sol, self._shift = sol, shift

    def __call__(self, z):
        return self._sol(np.asarray(z) + self._shift)


def compare_with_profile(shot: ShootingResult, z, v) -> float:
    """Sup-norm distance after both are aligned at ``v = 1/2``, over the overlap in ``z``."""
    z = np.asarray(z, dtype=float)
    v = np.asarray(v, dtype=float)
    keep = (z >= shot.z[0]) & (z <= shot.z[-1])
    if not np.any(keep):
        raise ShootingError("no overlap between shot and profile")
    return float(np.max(np.abs(shot.sol(z[keep])[0] - v[keep])))


def pure_convection_exact(epsilon: float, c: float, h, v):
    """``sqrt(eps^2 + (c v + h(v))^2) - eps``, the exact solution when ``f == 0``."""
    v_arr = np.asarray(v, dtype=float)
    arg = c * v_arr + np.asarray(h(v_arr), dtype=float)
    interior = (v_arr > 0.0) & (v_arr < 1.0)
    if np.any(interior & (arg <= 0.0)):
        raise DomainError("c v + h(v) must be positive on (0, 1)")
    out = np.sqrt(epsilon * epsilon + arg * arg) - epsilon
    return out if out.ndim else float(out)


def bisect(g, a: float, b: float, tol: float = 1e-12) -> float:
    ga = g(a)
    if ga == 0.0:
        return a
    while b - a > tol:
        mid = 0.5 * (a + b)
        gm = g(mid)
        if gm == 0.0:
            return mid
        if (gm > 0) == (ga > 0):
            a, ga = mid, gm
        else:
            b = mid
    return 0.5 * (a + b)


def brute_scan_roots(g, grid_n: int = 10_000, lo: float = 0.0, hi: float = 1.0,
                     tol: float = 1e-12) -> list[float]:
    """Every sign change of ``g`` on a uniform grid, refined by bisection."""
    if grid_n < 1000:
        raise ValueError("grid_n must be at least 1000")
    x = np.linspace(lo, hi, grid_n + 1)
    gx = np.array([float(g(t)) for t in x])
    roots = []
    for i in range(grid_n):
        if gx[i] == 0.0:
            roots.append(float(x[i]))
        elif gx[i] * gx[i + 1] < 0.0:
            roots.append(bisect(g, float(x[i]), float(x[i + 1]), tol))
    if gx[-1] == 0.0:
        roots.append(float(x[-1]))
    return roots


def brute_max(fun, lo: float, hi: float, n: int = 200_001) -> tuple[float, float]:
    """``(max, argmax)`` on a dense grid, polished by golden-section on the bracketing cells."""
    x = np.linspace(lo, hi, n)
    fx = fun(x)
    i = int(np.argmax(fx))
    a, b = x[max(i - 1, 0)], x[min(i + 1, n - 1)]
    phi = (math.sqrt(5.0) - 1.0) / 2.0
    while b - a > 1e-12:
        c1, c2 = b - phi * (b - a), a + phi * (b - a)
        if float(fun(np.array(c1))) >= float(fun(np.array(c2))):
            b = c2
        else:
            a = c1
    xm = 0.5 * (a + b)
    return max(float(fun(np.array(xm))), float(fx[i])), xm


# -- certification --------------------------------------------------------------

def _fb_S(alpha, k=1.0):
    return lambda v: (k / 2.0 - alpha) * v - k * v * v / 3.0


def _fb_defining(alpha, k=1.0):
    # F - h - v (f - h') for f = k v (1 - v), h = alpha v^2
    def g(v):
        F = k * (v * v / 2.0 - v ** 3 / 3.0)
        return F - alpha * v * v - v * (k * v * (1.0 - v) - 2.0 * alpha * v)
    return g


def _largest_interior_root(g) -> float:
    roots = [r for r in brute_scan_roots(g, 20_000, 1e-6, 1.0 - 1e-9) if r > 1e-6]
    return max(roots)


def certify(path=None) -> list[dict]:
    """Compute the reference values and optionally write them as JSON."""
    out: list[dict] = []

    def add(qid, value, method, tol):
        out.append({"quantity_id": qid, "value": float(value), "method": method, "tolerance": tol})

    add("rhs_y.eps1_c1_h0_logistic_v0.5_y2", math.sqrt(2.0 * (2.0 + 2.0)) / (1.0 + 2.0) - 0.25,
        "direct arithmetic", 1e-12)

    gamma = math.sqrt(2.0)
    b = float(max(np.roots([2.0, gamma, -1.0]).real))
    add("series.fb_k1_a0_c1_eps1.B", b, "numpy polynomial roots", 1e-12)
    add("series.fb_k1_a0_c1_eps1.A", b * b, "numpy polynomial roots", 1e-12)

    for alpha, tag in ((-0.5, "fb_a-0.5"), (1.0, "fb_a1"), (0.05, "fb_a0.05"), (-0.05, "fb_a-0.05"),
                       (0.2, "fb_a0.2"), (-1.0 / 6.0, "fb_a-1/6"), (0.0, "fb_a0")):
        smax, sarg = brute_max(_fb_S(alpha), 1e-9, 1.0)
        add(f"lower_bound.{tag}", max(smax, 0.0), "dense-grid maximisation of S", 1e-9)

    for alpha, eps, tag in ((-0.5, 2e-3, "fb_a-0.5"), (1.0, 2e-3, "fb_a1")):
        v = np.linspace(0.0, 1.0, 1_000_001)
        max_f = float(np.max(v * (1 - v)))
        min_hp = float(np.min(2 * alpha * v))
        sup_ratio = 1.0  # f(v)/v = 1 - v, supremum is the limit at 0
        add(f"upper_bound.{tag}.eps{eps:g}", max_f - min_hp + 2.0 * math.sqrt(eps * sup_ratio),
            "dense-grid arithmetic with the exact limit of f/v", 1e-7)

    for alpha, tag in ((0.05, "fb_a0.05"), (0.0, "fb_a0"), (-0.05, "fb_a-0.05"), (0.2, "fb_a0.2")):
        vp = _largest_interior_root(_fb_defining(alpha))
        add(f"v_plus.{tag}", vp, "root scan of F-h = v(f-h') with bisection", 1e-10)
        add(f"c_bar.{tag}", vp * (1.0 - vp) - 2.0 * alpha * vp, "f(v+) - h'(v+) at scanned root", 1e-9)
        smax, _ = brute_max(_fb_S(alpha), 1e-9, 1.0)
        add(f"sup_S.{tag}", smax, "dense-grid maximisation of S", 1e-9)
    add("kink.fb_a0.05", _largest_interior_root(_fb_defining(0.05)) - 0.5, "v+ - 1/2", 1e-10)

    add("upper_y.fb_a-0.5_c0.7_eps2e-3_v0.5",
        math.sqrt(4e-6 + (0.35 - 0.125 - (0.125 - 0.125 / 3.0)) ** 2) - 2e-3,
        "direct arithmetic with F(1/2) = 1/12", 1e-12)
    add("pure_convection.eps0.01_c0_v0.5",
        pure_convection_exact(0.01, 0.0, lambda v: v * v * (1 - v), 0.5), "closed form", 1e-8)
    add("inviscid.f4.V_I(2)", 1.0 / (1.0 + math.exp(-1.0)), "logistic closed form", 1e-7)

    tail, _ = quad(lambda s: 2.0 / (1.0 - s), 0.0, 0.5)
    add("z0.fb_a1", -tail, "scipy quad of h'/f", 1e-8)
    tail, _ = quad(lambda s: 1.5 * math.sqrt(s) / (s * (1.0 - s)), 0.0, 0.5, limit=200)
    add("z0.f3", -tail, "scipy quad of h'/f", 1e-7)
    add("ell.fb_a1", 1.0 / 2.0, "limit of (1-s)/(2 alpha) at 0", 1e-9)
    add("ell.fb_a0.5", 1.0, "limit of (1-s)/(2 alpha) at 0", 1e-9)
    add("c_bar.fb_a-1/6", 0.5 - 1.0 / 3.0 + 1.0 / 6.0, "F(1) - h(1)", 1e-12)
    add("c_bar.fb_a-0.5", 0.5 - 1.0 / 3.0 + 0.5, "F(1) - h(1)", 1e-12)

    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(out, fh, indent=2)
            fh.write("\n")
    return out


def load_certification(path) -> dict[str, dict]:
    with open(path, encoding="utf-8") as fh:
        return {row["quantity_id"]: row for row in json.load(fh)}


__all__ = [
    "PhasePlaneState", "ShootingResult", "shoot_phase_plane", "compare_with_profile",
    "pure_convection_exact", "brute_scan_roots", "brute_max", "certify", "load_certification",
    "y_from_w", "w_from_y",
]
