"""Reaction and convection terms, their antiderivatives, and assumption checks.

A model is the pair ``(f, h)`` of a monostable reaction ``f`` and a convective
flux ``h``. Builtin families are evaluated in closed form; tabulated families
use monotone cubic (PCHIP) interpolation of user-supplied samples.

All evaluation methods accept scalars or numpy arrays.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import DomainError, MalformedModelError

MIN_TABULATED_SAMPLES = 16
ASSUMPTION_TOL = 1e-12

REACTION_FAMILIES = ("logistic", "power_logistic", "tabulated", "zero")
CONVECTION_FAMILIES = ("zero", "quadratic", "power", "polynomial", "tabulated")


def _as_samples(values, name: str) -> tuple[float, ...]:
    try:
        arr = np.asarray(values, dtype=float).ravel()
    except (TypeError, ValueError) as exc:
        raise MalformedModelError(f"{name}: samples must be numeric") from exc
    if not np.all(np.isfinite(arr)):
        raise MalformedModelError(f"{name}: samples must be finite")
    return tuple(float(x) for x in arr)


def _check_abscissae(s: tuple[float, ...], name: str) -> None:
    if len(s) < MIN_TABULATED_SAMPLES:
        raise MalformedModelError(
            f"{name}: tabulated form needs at least {MIN_TABULATED_SAMPLES} samples, got {len(s)}"
        )
    arr = np.asarray(s)
    if np.any(np.diff(arr) <= 0):
        raise MalformedModelError(f"{name}: abscissae must be strictly increasing")
    if abs(arr[0]) > 1e-14 or abs(arr[-1] - 1.0) > 1e-14:
        raise MalformedModelError(f"{name}: abscissae must span [0, 1]")


@dataclass(frozen=True)
class ReactionSpec:
    """Reaction term ``f``.

    ``logistic``: ``k s (1 - s)``; ``power_logistic``: ``k s**p (1 - s)`` with
    ``p >= 1``; ``tabulated``: PCHIP through ``(s, f)`` samples; ``zero``:
    ``f == 0`` (pure convection, exempt from assumption (F) only in test mode).
    """

    family: str
    k: float = 1.0
    p: float = 1.0
    s: tuple[float, ...] | None = None
    values: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.family not in REACTION_FAMILIES:
            raise MalformedModelError(f"unknown reaction family {self.family!r}")
        if self.family in ("logistic", "power_logistic"):
            if not (math.isfinite(self.k) and self.k > 0):
                raise MalformedModelError("reaction rate k must be positive")
        if self.family == "power_logistic" and not self.p >= 1.0:
            raise MalformedModelError("power_logistic needs p >= 1")
        if self.family == "tabulated":
            if self.s is None or self.values is None:
                raise MalformedModelError("tabulated reaction needs 's' and 'f' samples")
            object.__setattr__(self, "s", _as_samples(self.s, "reaction"))
            object.__setattr__(self, "values", _as_samples(self.values, "reaction"))
            _check_abscissae(self.s, "reaction")
            if len(self.values) != len(self.s):
                raise MalformedModelError("reaction: 's' and 'f' lengths differ")

    @classmethod
    def logistic(cls, k: float = 1.0) -> ReactionSpec:
        return cls("logistic", k=k)

    @classmethod
    def power_logistic(cls, p: float, k: float = 1.0) -> ReactionSpec:
        return cls("power_logistic", k=k, p=p)

    @classmethod
    def tabulated(cls, s, f) -> ReactionSpec:
        return cls("tabulated", s=s, values=f)

    @cached_property
    def _interp(self) -> PchipInterpolator:
        return PchipInterpolator(np.asarray(self.s), np.asarray(self.values))

    @cached_property
    def _antiderivative(self):
        return self._interp.antiderivative()

    def f(self, v):
        v = np.asarray(v, dtype=float)
        if self.family == "logistic":
            out = self.k * v * (1.0 - v)
        elif self.family == "power_logistic":
            out = self.k * v**self.p * (1.0 - v)
        elif self.family == "tabulated":
            out = self._interp(v)
        else:
            out = np.zeros_like(v)
        return out if out.ndim else float(out)

    def F(self, v):
        """Antiderivative ``F(v) = int_0^v f``."""
        v = np.asarray(v, dtype=float)
        if self.family == "logistic":
            out = self.k * (v**2 / 2.0 - v**3 / 3.0)
        elif self.family == "power_logistic":
            p = self.p
            out = self.k * (v ** (p + 1) / (p + 1) - v ** (p + 2) / (p + 2))
        elif self.family == "tabulated":
            out = self._antiderivative(v)
        else:
            out = np.zeros_like(v)
        return out if out.ndim else float(out)

    def slope_at_one(self) -> float:
        """``m = -f'(1)``, or a secant estimate for tabulated data."""
        if self.family in ("logistic", "power_logistic"):
            return self.k
        if self.family == "tabulated":
            d = 1e-6
            return float((self.f(1.0 - d) - self.f(1.0)) / d)
        return 0.0

    def to_dict(self) -> dict[str, Any]:
        if self.family == "logistic":
            return {"family": "logistic", "k": self.k}
        if self.family == "power_logistic":
            return {"family": "power_logistic", "p": self.p, "k": self.k}
        if self.family == "tabulated":
            return {"family": "tabulated", "s": list(self.s), "f": list(self.values)}
        return {"family": "zero"}


@dataclass(frozen=True)
class ConvectionSpec:
    """Convective flux ``h``.

    ``quadratic``: ``alpha s**2``; ``power``: ``coef s**q`` with ``q > 1``;
    ``polynomial``: ``sum coeffs[i] s**i``; ``tabulated``: PCHIP through
    samples of ``h``, ``h'`` and ``h''``.
    """

    family: str
    alpha: float = 0.0
    q: float = 2.0
    coef: float = 1.0
    coeffs: tuple[float, ...] | None = None
    s: tuple[float, ...] | None = None
    h_values: tuple[float, ...] | None = None
    hp_values: tuple[float, ...] | None = None
    hpp_values: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.family not in CONVECTION_FAMILIES:
            raise MalformedModelError(f"unknown convection family {self.family!r}")
        if self.family == "power" and not self.q > 1.0:
            raise MalformedModelError("power convection needs q > 1")
        if self.family == "polynomial":
            if not self.coeffs:
                raise MalformedModelError("polynomial convection needs 'coeffs'")
            object.__setattr__(self, "coeffs", _as_samples(self.coeffs, "convection"))
        if self.family == "tabulated":
            parts = (self.s, self.h_values, self.hp_values, self.hpp_values)
            if any(p is None for p in parts):
                raise MalformedModelError(
                    "tabulated convection needs 's', 'h', 'h_prime' and 'h_second' samples"
                )
            for name in ("s", "h_values", "hp_values", "hpp_values"):
                object.__setattr__(self, name, _as_samples(getattr(self, name), "convection"))
            _check_abscissae(self.s, "convection")
            if not len(self.s) == len(self.h_values) == len(self.hp_values) == len(self.hpp_values):
                raise MalformedModelError("convection: sample arrays differ in length")

    @classmethod
    def zero(cls) -> ConvectionSpec:
        return cls("zero")

    @classmethod
    def quadratic(cls, alpha: float) -> ConvectionSpec:
        return cls("quadratic", alpha=alpha)

    @classmethod
    def power(cls, q: float, coef: float = 1.0) -> ConvectionSpec:
        return cls("power", q=q, coef=coef)

    @classmethod
    def polynomial(cls, coeffs) -> ConvectionSpec:
        return cls("polynomial", coeffs=coeffs)

    @classmethod
    def tabulated(cls, s, h, h_prime, h_second) -> ConvectionSpec:
        return cls("tabulated", s=s, h_values=h, hp_values=h_prime, hpp_values=h_second)

    @cached_property
    def _interps(self):
        s = np.asarray(self.s)
        return tuple(
            PchipInterpolator(s, np.asarray(vals))
            for vals in (self.h_values, self.hp_values, self.hpp_values)
        )

    @cached_property
    def derivative_coeffs(self) -> tuple[float, ...]:
        c = self.coeffs
        return tuple(i * c[i] for i in range(1, len(c))) or (0.0,)

    def _poly(self, coeffs, v):
        out = np.zeros_like(v)
        for a in reversed(coeffs):
            out = out * v + a
        return out

    def _eval(self, v, order: int):
        v = np.asarray(v, dtype=float)
        fam = self.family
        if fam == "zero":
            out = np.zeros_like(v)
        elif fam == "quadratic":
            out = (self.alpha * v**2, 2.0 * self.alpha * v, 2.0 * self.alpha + 0.0 * v)[order]
        elif fam == "power":
            q, a = self.q, self.coef
            if order == 0:
                out = a * v**q
            elif order == 1:
                out = a * q * v ** (q - 1)
            else:
                with np.errstate(divide="ignore"):
                    out = a * q * (q - 1) * v ** (q - 2)
        elif fam == "polynomial":
            c = self.coeffs
            if order == 1:
                c = self.derivative_coeffs
            elif order == 2:
                d = self.derivative_coeffs
                c = tuple(i * d[i] for i in range(1, len(d))) or (0.0,)
            out = self._poly(c, v)
        else:
            out = self._interps[order](v)
        return out if np.ndim(out) else float(out)

    def h(self, v):
        return self._eval(v, 0)

    def h_prime(self, v):
        return self._eval(v, 1)

    def h_second(self, v):
        return self._eval(v, 2)

    def to_dict(self) -> dict[str, Any]:
        fam = self.family
        if fam == "quadratic":
            return {"family": fam, "alpha": self.alpha}
        if fam == "power":
            return {"family": fam, "q": self.q, "coef": self.coef}
        if fam == "polynomial":
            return {"family": fam, "coeffs": list(self.coeffs)}
        if fam == "tabulated":
            return {
                "family": fam,
                "s": list(self.s),
                "h": list(self.h_values),
                "h_prime": list(self.hp_values),
                "h_second": list(self.hpp_values),
            }
        return {"family": "zero"}


@dataclass(frozen=True)
class Violation:
    assumption: str
    message: str
    v: float | None = None

    def to_dict(self) -> dict[str, Any]:
        return {"assumption": self.assumption, "message": self.message, "v": self.v}


@dataclass(frozen=True)
class ModelSpec:
    """The pair ``(f, h)`` plus numerical settings.

    ``lipschitz_k`` defaults to the family rate for ``logistic`` and to
    ``max f(s) / min(s, 1 - s)`` on the validation grid otherwise.
    ``test_mode`` permits ``f == 0`` (pure convection) for verification runs.
    """

    reaction: ReactionSpec
    convection: ConvectionSpec
    lipschitz_k: float | None = None
    quadrature_grid_size: int = 4096
    test_mode: bool = False

    def __post_init__(self):
        if self.quadrature_grid_size < 16:
            raise MalformedModelError("quadrature_grid_size must be at least 16")
        if self.lipschitz_k is None:
            object.__setattr__(self, "lipschitz_k", self._default_lipschitz())
        elif not self.lipschitz_k > 0:
            raise MalformedModelError("lipschitz_k must be positive")

    def _default_lipschitz(self) -> float:
        if self.reaction.family == "logistic":
            return self.reaction.k
        s = self.grid()[1:-1]
        ratio = self.reaction.f(s) / np.minimum(s, 1.0 - s)
        k = float(np.max(ratio)) if ratio.size else 0.0
        return k if k > 0 else 1.0

    # -- evaluation -------------------------------------------------------
    def grid(self, n: int | None = None) -> np.ndarray:
        return np.linspace(0.0, 1.0, n or self.quadrature_grid_size)

    def f(self, v):
        return self.reaction.f(v)

    def F(self, v):
        return self.reaction.F(v)

    def h(self, v):
        return self.convection.h(v)

    def h_prime(self, v):
        return self.convection.h_prime(v)

    def h_second(self, v):
        return self.convection.h_second(v)

    def S(self, v):
        """Regime function ``(F(v) - h(v)) / v`` with ``S(0) = 0``."""
        v = np.asarray(v, dtype=float)
        _check_unit(v)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(v > 0, (self.F(v) - self.h(v)) / np.where(v > 0, v, 1.0), 0.0)
        return out if out.ndim else float(out)

    def S_prime(self, v):
        """``S'(v) = (f(v) - h'(v) - S(v)) / v`` for ``v`` in ``(0, 1]``."""
        v = np.asarray(v, dtype=float)
        _check_unit(v)
        if np.any(v <= 0):
            raise DomainError("S' is evaluated on (0, 1] only")
        out = (self.f(v) - self.h_prime(v) - self.S(v)) / v
        return out if np.ndim(out) else float(out)

    def evaluate(self, v: float) -> dict[str, float]:
        v = float(v)
        _check_unit(np.asarray(v))
        f = float(self.f(v))
        return {
            "v": v,
            "f": f,
            "f_at_bounds_clamped": 0.0 if v in (0.0, 1.0) else f,
            "h": float(self.h(v)),
            "h_prime": float(self.h_prime(v)),
            "F": float(self.F(v)),
        }

    def slope_at_one(self) -> float:
        return self.reaction.slope_at_one()

    # -- serialisation ----------------------------------------------------
    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"f": self.reaction.to_dict(), "h": self.convection.to_dict()}
        out["lipschitz_k"] = self.lipschitz_k
        if self.quadrature_grid_size != 4096:
            out["quadrature_grid_size"] = self.quadrature_grid_size
        if self.test_mode:
            out["test_mode"] = True
        return out

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> ModelSpec:
        try:
            f_data = dict(data["f"])
            h_data = dict(data["h"])
        except (KeyError, TypeError) as exc:
            raise MalformedModelError("model needs 'f' and 'h' objects") from exc
        return cls(
            reaction=_reaction_from_dict(f_data),
            convection=_convection_from_dict(h_data),
            lipschitz_k=data.get("lipschitz_k"),
            quadrature_grid_size=int(data.get("quadrature_grid_size", 4096)),
            test_mode=bool(data.get("test_mode", False)),
        )

    @cached_property
    def digest(self) -> str:
        payload = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(payload).hexdigest()[:16]

    def describe(self) -> str:
        return json.dumps({"f": self.reaction.to_dict(), "h": self.convection.to_dict()})


def _reaction_from_dict(d: dict[str, Any]) -> ReactionSpec:
    fam = d.pop("family", None)
    if fam == "tabulated":
        return ReactionSpec.tabulated(d.get("s"), d.get("f"))
    if fam == "logistic":
        return ReactionSpec.logistic(float(d.get("k", 1.0)))
    if fam == "power_logistic":
        return ReactionSpec.power_logistic(float(d["p"]), float(d.get("k", 1.0)))
    if fam == "zero":
        return ReactionSpec("zero")
    raise MalformedModelError(f"unknown reaction family {fam!r}")


def _convection_from_dict(d: dict[str, Any]) -> ConvectionSpec:
    fam = d.pop("family", None)
    try:
        if fam == "zero":
            return ConvectionSpec.zero()
        if fam == "quadratic":
            return ConvectionSpec.quadratic(float(d["alpha"]))
        if fam == "power":
            return ConvectionSpec.power(float(d["q"]), float(d.get("coef", 1.0)))
        if fam == "polynomial":
            return ConvectionSpec.polynomial(d["coeffs"])
        if fam == "tabulated":
            return ConvectionSpec.tabulated(d.get("s"), d.get("h"), d.get("h_prime"), d.get("h_second"))
    except KeyError as exc:
        raise MalformedModelError(f"convection family {fam!r} is missing {exc}") from exc
    raise MalformedModelError(f"unknown convection family {fam!r}")


def _check_unit(v: np.ndarray) -> None:
    if np.any(~np.isfinite(v)) or np.any(v < 0.0) or np.any(v > 1.0):
        raise DomainError("v must lie in [0, 1]")


def fisher_burgers(k: float = 1.0, alpha: float = 0.0, **kwargs) -> ModelSpec:
    """``f(s) = k s (1 - s)`` with ``h(s) = alpha s**2``."""
    return ModelSpec(ReactionSpec.logistic(k), ConvectionSpec.quadratic(alpha), **kwargs)


def power_model(p: float = 1.0, q: float = 2.0, k: float = 1.0, coef: float = 1.0, **kwargs) -> ModelSpec:
    """``f(s) = k s**p (1 - s)`` with ``h(s) = coef s**q``."""
    reaction = ReactionSpec.logistic(k) if p == 1.0 else ReactionSpec.power_logistic(p, k)
    return ModelSpec(reaction, ConvectionSpec.power(q, coef), **kwargs)


def pure_convection(coeffs=(0.0, 0.0, 1.0, -1.0)) -> ModelSpec:
    """``f == 0`` with polynomial ``h``; only meaningful in test mode."""
    return ModelSpec(ReactionSpec("zero"), ConvectionSpec.polynomial(coeffs), test_mode=True)


def validate(model: ModelSpec) -> list[Violation]:
    """Check assumptions (F) and (H) on the model's validation grid.

    Returns an empty list when both hold. Each violation carries the witnessing
    point ``v`` where one exists.
    """
    for spec in (model.reaction, model.convection):
        s = getattr(spec, "s", None)
        if spec.family == "tabulated" and (s is None or len(s) < MIN_TABULATED_SAMPLES):
            raise MalformedModelError("tabulated input with fewer than 16 samples")

    out: list[Violation] = []
    grid = model.grid()
    interior = grid[1:-1]
    f = np.asarray(model.f(grid))
    k = model.lipschitz_k

    if not np.all(np.isfinite(f)):
        i = int(np.argmax(~np.isfinite(f)))
        out.append(Violation("F", "f is not finite", float(grid[i])))
    for end in (0, -1):
        if abs(f[end]) > ASSUMPTION_TOL:
            out.append(Violation("F", f"f({grid[end]:g}) = {f[end]:.6g} != 0", float(grid[end])))
    bad = np.flatnonzero(f[1:-1] <= 0.0)
    if bad.size:
        v = float(interior[bad[0]])
        out.append(Violation("F", f"f({v:.6g}) = {f[1:-1][bad[0]]:.6g} is not positive", v))
    slack = ASSUMPTION_TOL * max(1.0, k)
    over = np.flatnonzero((f > k * grid + slack) | (f > k * (1.0 - grid) + slack))
    if over.size:
        v = float(grid[over[0]])
        out.append(Violation("F", f"f exceeds k*min(s, 1-s) with k={k:g} at v={v:.6g}", v))

    h0 = float(model.h(0.0))
    hp0 = float(model.h_prime(0.0))
    if abs(h0) > ASSUMPTION_TOL:
        out.append(Violation("H", f"h(0) = {h0:.6g} != 0", 0.0))
    if abs(hp0) > ASSUMPTION_TOL:
        out.append(Violation("H", f"h'(0) = {hp0:.6g} != 0", 0.0))
    for name, fn in (("h", model.h), ("h'", model.h_prime), ("h''", model.h_second)):
        vals = np.asarray(fn(grid[1:]))
        if not np.all(np.isfinite(vals)):
            i = int(np.argmax(~np.isfinite(vals)))
            out.append(Violation("H", f"{name} is not finite", float(grid[1 + i])))
    return out
