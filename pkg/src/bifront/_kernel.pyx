# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled Dormand-Prince 5(4) integrator for the reduced front equation.

Arithmetic follows ``_kernel_py.py`` statement for statement so that both
backends produce the same trajectories up to rounding.
"""
from libc.math cimport sqrt, pow, fabs
import numpy as np

cdef enum:
    REACHED = 0
    CROSSED = 1
    UNDERFLOW = 2
    BUDGET = 3

cdef double SAFETY = 0.9
cdef double MIN_FACTOR = 0.2
cdef double MAX_FACTOR = 10.0
cdef double CROSS_TOL = 1e-10
cdef double MACHEPS = 2.220446049250313e-16

cdef double A21 = 1.0 / 5.0
cdef double A31 = 3.0 / 40.0, A32 = 9.0 / 40.0
cdef double A41 = 44.0 / 45.0, A42 = -56.0 / 15.0, A43 = 32.0 / 9.0
cdef double A51 = 19372.0 / 6561.0, A52 = -25360.0 / 2187.0, A53 = 64448.0 / 6561.0, A54 = -212.0 / 729.0
cdef double A61 = 9017.0 / 3168.0, A62 = -355.0 / 33.0, A63 = 46732.0 / 5247.0, A64 = 49.0 / 176.0, A65 = -5103.0 / 18656.0
cdef double B1 = 35.0 / 384.0, B3 = 500.0 / 1113.0, B4 = 125.0 / 192.0, B5 = -2187.0 / 6784.0, B6 = 11.0 / 84.0
cdef double E1 = -71.0 / 57600.0, E3 = 71.0 / 16695.0, E4 = -71.0 / 1920.0, E5 = 17253.0 / 339200.0, E6 = -22.0 / 525.0, E7 = 1.0 / 40.0
cdef double C2 = 0.2, C3 = 0.3, C4 = 0.8, C5 = 8.0 / 9.0

cdef double[7][4] P
P[0][:] = [1.0, -8048581381.0 / 2820520608.0, 8663915743.0 / 2820520608.0, -12715105075.0 / 11282082432.0]
P[1][:] = [0.0, 0.0, 0.0, 0.0]
P[2][:] = [0.0, 131558114200.0 / 32700410799.0, -68118460800.0 / 10900136933.0, 87487479700.0 / 32700410799.0]
P[3][:] = [0.0, -1754552775.0 / 470086768.0, 14199869525.0 / 1410260304.0, -10690763975.0 / 1880347072.0]
P[4][:] = [0.0, 127303824393.0 / 49829197408.0, -318862633887.0 / 49829197408.0, 701980252875.0 / 199316789632.0]
P[5][:] = [0.0, -282668133.0 / 205662961.0, 2019193451.0 / 616988883.0, -1453857185.0 / 822651844.0]
P[6][:] = [0.0, 40617522.0 / 29380423.0, -110615467.0 / 29380423.0, 69997945.0 / 29380423.0]


cdef struct Model:
    int fcode
    double k
    double p
    const double* fx
    const double* fc
    int fn
    int hcode
    double h0
    double h1
    const double* hx
    const double* hc
    int hn
    double eps
    double c


cdef inline double pp_eval(const double* x, const double* c, int n, double v) noexcept nogil:
    cdef int lo = 0, hi = n - 1, mid, i
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
    cdef double d = v - x[i]
    return ((c[i] * d + c[n + i]) * d + c[2 * n + i]) * d + c[3 * n + i]


cdef inline double eval_f(Model* m, double v) noexcept nogil:
    if m.fcode == 1:
        return m.k * v * (1.0 - v)
    if m.fcode == 2:
        return m.k * pow(v, m.p) * (1.0 - v)
    if m.fcode == 3:
        return pp_eval(m.fx, m.fc, m.fn, v)
    return 0.0


cdef inline double eval_hp(Model* m, double v) noexcept nogil:
    cdef double acc
    cdef int j
    if m.hcode == 1:
        return (2.0 * m.h0) * v
    if m.hcode == 2:
        return m.h1 * m.h0 * pow(v, m.h0 - 1.0)
    if m.hcode == 3:
        acc = 0.0
        for j in range(m.hn - 1, -1, -1):
            acc = acc * v + m.hx[j]
        return acc
    if m.hcode == 4:
        return pp_eval(m.hx, m.hc, m.hn, v)
    return 0.0


cdef inline double rhs(Model* m, double v, double y) noexcept nogil:
    cdef double yy = y if y > 0.0 else 0.0
    return (m.c + eval_hp(m, v)) * sqrt(yy * (2.0 * m.eps + yy)) / (m.eps + yy) - eval_f(m, v)


cdef class _Recorder:
    cdef double[::1] v
    cdef double[::1] y
    cdef double[::1] dy
    cdef Py_ssize_t n
    cdef object _va, _ya, _da

    def __init__(self, Py_ssize_t cap):
        self._va = np.empty(cap)
        self._ya = np.empty(cap)
        self._da = np.empty(cap)
        self.v = self._va
        self.y = self._ya
        self.dy = self._da
        self.n = 0

    cdef void push(self, double v, double y, double dy):
        if self.n == self.v.shape[0]:
            cap = 2 * self.n
            self._va = np.resize(self._va, cap)
            self._ya = np.resize(self._ya, cap)
            self._da = np.resize(self._da, cap)
            self.v = self._va
            self.y = self._ya
            self.dy = self._da
        self.v[self.n] = v
        self.y[self.n] = y
        self.dy[self.n] = dy
        self.n += 1

    def arrays(self):
        return self._va[:self.n].copy(), self._ya[:self.n].copy(), self._da[:self.n].copy()


def integrate(spec, double eps, double c, double v0, double y0, double v_min,
              double rtol, double atol, double h_init, double h_max, long max_steps, bint record):
    """Integrate the reduced equation from ``v0`` down to ``v_min``.

    Same contract as ``bifront._kernel_py.integrate``.
    """
    fcode, fpar, fx, fc, hcode, hpar, hx, hc = spec
    cdef double[::1] fpar_v = np.ascontiguousarray(fpar, dtype=float)
    cdef double[::1] fx_v = np.ascontiguousarray(fx, dtype=float)
    cdef double[::1] fc_v = np.ascontiguousarray(fc, dtype=float).ravel()
    cdef double[::1] hpar_v = np.ascontiguousarray(hpar, dtype=float)
    cdef double[::1] hx_v = np.ascontiguousarray(hx, dtype=float)
    cdef double[::1] hc_v = np.ascontiguousarray(hc, dtype=float).ravel()

    cdef Model m
    m.fcode = fcode
    m.k = fpar_v[0]
    m.p = fpar_v[1]
    m.fx = &fx_v[0]
    m.fc = &fc_v[0]
    m.fn = fx_v.shape[0] - 1
    m.hcode = hcode
    m.h0 = hpar_v[0]
    m.h1 = hpar_v[1]
    m.hx = &hx_v[0]
    m.hc = &hc_v[0]
    m.hn = hx_v.shape[0] if hcode == 3 else hx_v.shape[0] - 1
    m.eps = eps
    m.c = c

    rec = _Recorder(1024 if record else 1)
    cdef _Recorder r = rec

    cdef double v = v0, y = y0, h, s, v_new, y_new, err, scale, en, factor
    cdef double k1, k2, k3, k4, k5, k6, k7
    cdef double sc, d0, d1, d2, h0, h1, y1, span
    cdef double lo_t, hi_t, t, yt
    cdef double q[4]
    cdef double ks[7]
    cdef int status = BUDGET, jj, mm
    cdef long n_steps = 0, n_rej = 0
    cdef bint rejected = False

    k1 = rhs(&m, v, y)
    if record:
        r.push(v, y, k1)

    span = v - v_min
    if h_init > 0.0:
        h = h_init
    else:
        sc = atol + rtol * fabs(y)
        d0 = fabs(y) / sc
        d1 = fabs(k1) / sc
        if d0 < 1e-5 or d1 < 1e-5:
            h0 = 1e-6
        else:
            h0 = 0.01 * d0 / d1
        h0 = min(h0, span)
        y1 = y - h0 * k1
        d2 = fabs(rhs(&m, v - h0, y1) - k1) / sc / h0
        if max(d1, d2) <= 1e-15:
            h1 = max(1e-6, h0 * 1e-3)
        else:
            h1 = pow(0.01 / max(d1, d2), 0.2)
        h = min(100.0 * h0, h1)
    h = min(h, span)
    if h_max <= 0.0:
        h_max = span

    while n_steps < max_steps:
        if h > h_max:
            h = h_max
        if v - v_min <= 16.0 * MACHEPS * fabs(v):
            status = REACHED
            break
        if v - h <= v_min:
            h = v - v_min
        if h <= 16.0 * MACHEPS * fabs(v):
            status = UNDERFLOW
            break
        s = -h
        k2 = rhs(&m, v + C2 * s, y + s * (A21 * k1))
        k3 = rhs(&m, v + C3 * s, y + s * (A31 * k1 + A32 * k2))
        k4 = rhs(&m, v + C4 * s, y + s * (A41 * k1 + A42 * k2 + A43 * k3))
        k5 = rhs(&m, v + C5 * s, y + s * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4))
        if h < v - v_min:
            v_new = v - h
        else:
            v_new = v_min
        k6 = rhs(&m, v_new, y + s * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5))
        y_new = y + s * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6)
        k7 = rhs(&m, v_new, y_new)
        err = s * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7)
        scale = atol + rtol * max(fabs(y), fabs(y_new))
        en = fabs(err) / scale
        if en != en or y_new != y_new:
            en = 1e10
        if en <= 1.0:
            n_steps += 1
            if y_new <= 0.0 and v_new > v_min:
                ks[0] = k1; ks[1] = 0.0; ks[2] = k3; ks[3] = k4
                ks[4] = k5; ks[5] = k6; ks[6] = k7
                for mm in range(4):
                    q[mm] = 0.0
                    for jj in range(7):
                        q[mm] = q[mm] + ks[jj] * P[jj][mm]
                lo_t = 0.0
                hi_t = 1.0
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
                    r.push(v, 0.0, rhs(&m, v, 0.0))
                status = CROSSED
                break
            v = v_new
            y = y_new
            k1 = k7
            if record:
                r.push(v, y, k1)
            if v <= v_min:
                status = REACHED
                break
            if en == 0.0:
                factor = MAX_FACTOR
            else:
                factor = min(MAX_FACTOR, SAFETY * pow(en, -0.2))
            if rejected:
                factor = min(1.0, factor)
            h *= factor
            rejected = False
        else:
            n_rej += 1
            h *= max(MIN_FACTOR, SAFETY * pow(en, -0.2))
            rejected = True

    va, ya, da = rec.arrays()
    return status, v, y, n_steps, n_rej, va, ya, da
