"""Backend selection for the reduced-equation integrator.

The compiled ``_kernel`` extension is used when importable; otherwise the
pure-Python ``_kernel_py`` module takes over. Both expose the same
``integrate`` function. ``BACKEND`` names the active one.
"""
from __future__ import annotations

import os

import numpy as np

from . import _kernel_py
from .model import ModelSpec

try:
    from . import _kernel as _compiled
except ImportError:  # pragma: no cover - depends on the build
    _compiled = None

REACHED = _kernel_py.REACHED
CROSSED = _kernel_py.CROSSED
UNDERFLOW = _kernel_py.UNDERFLOW
BUDGET = _kernel_py.BUDGET

_BACKENDS = {"python": _kernel_py}
if _compiled is not None:
    _BACKENDS["cython"] = _compiled

_requested = os.environ.get("BIFRONT_BACKEND", "").strip().lower()
if _requested and _requested not in _BACKENDS:
    raise ImportError(f"BIFRONT_BACKEND={_requested!r} is not available; have {sorted(_BACKENDS)}")
BACKEND = _requested or ("cython" if _compiled is not None else "python")


def available_backends() -> list[str]:
    return sorted(_BACKENDS)


def get_backend(name: str | None = None):
    return _BACKENDS[name or BACKEND]


_EMPTY = np.zeros(1)


def encode(model: ModelSpec) -> tuple:
    """Flatten a model into the plain arrays the kernels understand."""
    r, cv = model.reaction, model.convection
    fx, fc = _EMPTY, _EMPTY
    if r.family == "logistic":
        fcode, fpar = 1, [r.k, 1.0]
    elif r.family == "power_logistic":
        fcode, fpar = 2, [r.k, r.p]
    elif r.family == "tabulated":
        fcode, fpar = 3, [0.0, 0.0]
        fx, fc = r._interp.x, r._interp.c
    else:
        fcode, fpar = 0, [0.0, 0.0]

    hx, hc = _EMPTY, _EMPTY
    if cv.family == "quadratic":
        hcode, hpar = 1, [cv.alpha, 0.0]
    elif cv.family == "power":
        hcode, hpar = 2, [cv.q, cv.coef]
    elif cv.family == "polynomial":
        hcode, hpar = 3, [0.0, 0.0]
        hx = np.asarray(cv.derivative_coeffs, dtype=float)
    elif cv.family == "tabulated":
        hcode, hpar = 4, [0.0, 0.0]
        interp = cv._interps[1]
        hx, hc = interp.x, interp.c
    else:
        hcode, hpar = 0, [0.0, 0.0]
    return (
        fcode, np.asarray(fpar, dtype=float), np.ascontiguousarray(fx, dtype=float),
        np.ascontiguousarray(fc, dtype=float),
        hcode, np.asarray(hpar, dtype=float), np.ascontiguousarray(hx, dtype=float),
        np.ascontiguousarray(hc, dtype=float),
    )


def integrate(model: ModelSpec, eps, c, v0, y0, v_min, rtol, atol, h_init=0.0, h_max=0.0,
              max_steps=2_000_000, record=True, backend: str | None = None):
    """Run the selected backend. ``h_init``/``h_max`` of 0 mean automatic/unbounded."""
    return get_backend(backend).integrate(
        encode(model), float(eps), float(c), float(v0), float(y0), float(v_min),
        float(rtol), float(atol), float(h_init), float(h_max), int(max_steps), bool(record),
    )
