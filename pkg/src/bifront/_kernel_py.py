"""Pure-Python Dormand-Prince 5(4) integrator for the reduced front equation.

This mirrors ``_kernel.pyx`` operation for operation; the two are expected to
agree to rounding. It is used whenever the compiled module is unavailable.
"""
import math

import numpy as np

# Status codes shared with the compiled kernel.
REACHED = 0
CROSSED = 1
UNDERFLOW = 2
BUDGET = 3

A21 = 1.0 / 5.0
A31, A32 = 3.0 / 40.0, 9.0 / 40.0
A41, A42, A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
A51, A52, A53, A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
A61, A62, A63, A64, A65 = (
    9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0,
)
B1, B3, B4, B5, B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
E1, E3, E4, E5, E6, E7 = (
    -71.0 / 57600.0, 71.0 / 16695.0, -71.0 / 1920.0, 17253.0 / 339200.0, -22.0 / 525.0, 1.0 / 40.0,
)
C2, C3, C4, C5 = 0.2, 0.3, 0.8, 8.0 / 9.0

# Dense output coefficients (Shampine's 4th-order interpolant).
P = (
    (1.0, -8048581381.0 / 2820520608.0, 8663915743.0 / 2820520608.0, -12715105075.0 / 11282082432.0),
    (0.0, 0.0, 0.0, 0.0),
    (0.0, 131558114200.0 / 32700410799.0, -68118460800.0 / 10900136933.0, 87487479700.0 / 32700410799.0),
    (0.0, -1754552775.0 / 470086768.0, 14199869525.0 / 1410260304.0, -10690763975.0 / 1880347072.0),
    (0.0, 127303824393.0 / 49829197408.0, -318862633887.0 / 49829197408.0, 701980252875.0 / 199316789632.0),
    (0.0, -282668133.0 / 205662961.0, 2019193451.0 / 616988883.0, -1453857185.0 / 822651844.0),
    (0.0, 40617522.0 / 29380423.0, -110615467.0 / 29380423.0, 69997945.0 / 29380423.0),
)

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 10.0
CROSS_TOL = 1e-10


def _pp_eval(x, c, n, v):
    lo, hi = 0, n - 1
    if v <= x[0]:
        i = 0
    elif v >= x[n]:
        i = n - 1
    else:
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if x[mid] <= v:
                lo = mid
            else:
                hi = mid
        i = lo
    d = v - x[i]
    return ((c[i] * d + c[n + i]) * d + c[2 * n + i]) * d + c[3 * n + i]


def _make_f(code, par, x, c):
    n = len(x) - 1
    k, p = float(par[0]), float(par[1])
    if code == 1:
        return lambda v: k * v * (1.0 - v)
    if code == 2:
        return lambda v: k * math.pow(v, p) * (1.0 - v)
    if code == 3:
        xs, cs = x.tolist(), c.ravel().tolist()
        return lambda v: _pp_eval(xs, cs, n, v)
    return lambda v: 0.0


def _make_hp(code, par, x, c):
    n = len(x) - 1
    if code == 1:
        two_alpha = 2.0 * float(par[0])
        return lambda v: two_alpha * v
    if code == 2:
        q, a = float(par[0]), float(par[1])
        return lambda v: a * q * math.pow(v, q - 1.0)
    if code == 3:
        coeffs = [float(a) for a in x][::-1]

        def horner(v):
            acc = 0.0
            for a in coeffs:
                acc = acc * v + a
            return acc

        return horner
    if code == 4:
        xs, cs = x.tolist(), c.ravel().tolist()
        return lambda v: _pp_eval(xs, cs, n, v)
    return lambda v: 0.0


def integrate(spec, eps, c, v0, y0, v_min, rtol, atol, h_init, h_max, max_steps, record):
    """Integrate ``y' = (c + h'(v)) sqrt(y(2e+y))/(e+y) - f(v)`` from ``v0`` down to ``v_min``.

    Returns ``(status, v_end, y_end, n_steps, n_rejected, v_arr, y_arr, dy_arr)``.
    On a zero crossing ``v_end`` is the located crossing and ``y_end == 0``.
    """
    fcode, fpar, fx, fc, hcode, hpar, hx, hc = spec
    eps, c, v0, y0 = float(eps), float(c), float(v0), float(y0)
    f = _make_f(fcode, fpar, fx, fc)
    hp = _make_hp(hcode, hpar, hx, hc)
    two_eps = 2.0 * eps

    def rhs(v, y):
        yy = y if y > 0.0 else 0.0
        return (c + hp(v)) * math.sqrt(yy * (two_eps + yy)) / (eps + yy) - f(v)

    vs, ys, dys = [], [], []
    v, y = v0, y0
    k1 = rhs(v, y)
    if record:
        vs.append(v)
        ys.append(y)
        dys.append(k1)

    span = v - v_min
    if h_init > 0.0:
        h = h_init
    else:
        sc = atol + rtol * abs(y)
        d0 = abs(y) / sc
        d1 = abs(k1) / sc
        h0 = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
        h0 = min(h0, span)
        y1 = y - h0 * k1
        d2 = abs(rhs(v - h0, y1) - k1) / sc / h0
        if max(d1, d2) <= 1e-15:
            h1 = max(1e-6, h0 * 1e-3)
        else:
            h1 = (0.01 / max(d1, d2)) ** 0.2
        h = min(100.0 * h0, h1)
    h = min(h, span)
    if h_max <= 0.0:
        h_max = span

    status = BUDGET
    n_steps = 0
    n_rej = 0
    rejected = False
    while n_steps < max_steps:
        if h > h_max:
            h = h_max
        if v - v_min <= 16.0 * 2.220446049250313e-16 * abs(v):
            status = REACHED
            break
        if v - h <= v_min:
            h = v - v_min
        if h <= 16.0 * 2.220446049250313e-16 * abs(v):
            status = UNDERFLOW
            break
        s = -h
        k2 = rhs(v + C2 * s, y + s * (A21 * k1))
        k3 = rhs(v + C3 * s, y + s * (A31 * k1 + A32 * k2))
        k4 = rhs(v + C4 * s, y + s * (A41 * k1 + A42 * k2 + A43 * k3))
        k5 = rhs(v + C5 * s, y + s * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4))
        v_new = v - h if h < v - v_min else v_min
        k6 = rhs(v_new, y + s * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5))
        y_new = y + s * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6)
        k7 = rhs(v_new, y_new)
        err = s * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7)
        scale = atol + rtol * max(abs(y), abs(y_new))
        en = abs(err) / scale
        if en != en or y_new != y_new:
            en = 1e10
        if en <= 1.0:
            n_steps += 1
            if y_new <= 0.0 and v_new > v_min:
                ks = (k1, 0.0, k3, k4, k5, k6, k7)
                q = [sum(ks[j] * P[j][m] for j in range(7)) for m in range(4)]
                lo_t, hi_t = 0.0, 1.0
                while (hi_t - lo_t) * h > CROSS_TOL:
                    t = 0.5 * (lo_t + hi_t)
                    yt = y + s * t * (q[0] + t * (q[1] + t * (q[2] + t * q[3])))
                    if yt > 0.0:
                        lo_t = t
                    else:
                        hi_t = t
                v = v - hi_t * h
                y = 0.0
                if record:
                    vs.append(v)
                    ys.append(0.0)
                    dys.append(rhs(v, 0.0))
                status = CROSSED
                break
            v, y, k1 = v_new, y_new, k7
            if record:
                vs.append(v)
                ys.append(y)
                dys.append(k1)
            if v <= v_min:
                status = REACHED
                break
            factor = MAX_FACTOR if en == 0.0 else min(MAX_FACTOR, SAFETY * en ** -0.2)
            if rejected:
                factor = min(1.0, factor)
            h *= factor
            rejected = False
        else:
            n_rej += 1
            h *= max(MIN_FACTOR, SAFETY * en ** -0.2)
            rejected = True
    return (
        status, v, y, n_steps, n_rej,
        np.asarray(vs, dtype=float), np.asarray(ys, dtype=float), np.asarray(dys, dtype=float),
    )
