"""Plane curves in the complex 2-plane carrying the spine.

Two kinds of curve are supported:

* :class:`CurveFamily` -- the five constant-curvature families, each an orbit
  ``delta(s) = exp(s * lam * Y) p`` of a one-parameter group, evaluated with the
  closed-form exponential of ``Y``;
* :class:`GeneralCurve` -- any caller-supplied curve with its first two
  derivatives.

Both expose ``cfg`` and ``evaluate_many(s) -> (delta, delta_s, delta_ss)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .ambient import CH2_EXTERIOR, CH2_INTERIOR, CP2, AmbientConfig, horizontal_part, inner


class FamilyKind(str, enum.Enum):
    CP2_CIRCLE = "cp2-circle"
    CH2_EQUIDISTANT = "ch2-equidistant"
    CH2_CIRCLE = "ch2-circle"
    CH2_HOROCYCLE = "ch2-horocycle"
    CH2_EXTERIOR_CIRCLE = "ch2-exterior-circle"

    @classmethod
    def parse(cls, name) -> "FamilyKind":
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower().replace("_", "-")
        aliases = {
            "cp2circle": cls.CP2_CIRCLE,
            "ch2equidistant": cls.CH2_EQUIDISTANT,
            "ch2circle": cls.CH2_CIRCLE,
            "ch2horocycle": cls.CH2_HOROCYCLE,
            "ch2exteriorcircle": cls.CH2_EXTERIOR_CIRCLE,
        }
        for member in cls:
            if key == member.value:
                return member
        try:
            return aliases[key.replace("-", "")]
        except KeyError:
            raise ValueError(f"unknown curve family {name!r}") from None


class ParameterRangeError(ValueError):
    """Family parameter ``a`` outside its legal range."""


class DegenerateCurveError(ValueError):
    """The projected curve is not immersed at the requested parameter."""


_SIGNS = {
    FamilyKind.CP2_CIRCLE: (1, 1),
    FamilyKind.CH2_EQUIDISTANT: (-1, 1),
    FamilyKind.CH2_CIRCLE: (-1, 1),
    FamilyKind.CH2_HOROCYCLE: (-1, 1),
    FamilyKind.CH2_EXTERIOR_CIRCLE: (-1, -1),
}

# Open intervals; None means unbounded.
PARAMETER_RANGES = {
    FamilyKind.CP2_CIRCLE: (0.0, math.pi / 2),
    FamilyKind.CH2_EQUIDISTANT: (None, None),
    FamilyKind.CH2_CIRCLE: (0.0, None),
    FamilyKind.CH2_HOROCYCLE: (None, None),
    FamilyKind.CH2_EXTERIOR_CIRCLE: (-math.pi / 4, math.pi / 4),
}

# Human-readable catalogue used by the CLI ``families`` command.
CATALOG = {
    FamilyKind.CP2_CIRCLE: dict(
        space="CP2", range="0 < a < pi/2", speed="(1/r) csc 2a",
        alpha="-(2/(r sigma)) cot 2a", beta="|w|/r", spine="(2/r)|cot 2a|",
        extended_rulings_through="pi(e2)",
    ),
    FamilyKind.CH2_EQUIDISTANT: dict(
        space="CH2", range="a real (a = 0: bisector)", speed="(1/r) sech 2a",
        alpha="-(2/(r sigma)) tanh 2a", beta="|w|/r", spine="(2/r)|tanh 2a|",
        extended_rulings_through="pi(e2)",
    ),
    FamilyKind.CH2_CIRCLE: dict(
        space="CH2", range="a > 0", speed="(1/r) csch 2a",
        alpha="-(2/(r sigma)) coth 2a", beta="|w|/r", spine="(2/r) coth 2a",
        extended_rulings_through="pi(e2)",
    ),
    FamilyKind.CH2_HOROCYCLE: dict(
        space="CH2", range="a real", speed="1/r",
        alpha="-2/(r sigma)", beta="|w|/r", spine="2/r",
        extended_rulings_through="pi(e2)",
    ),
    FamilyKind.CH2_EXTERIOR_CIRCLE: dict(
        space="CH2 (spine circle outside CH2)", range="-pi/4 < a < pi/4",
        speed="(1/r) sec 2a", alpha="-(2/(r sigma)) tan 2a", beta="|w|/r",
        spine="(2/r)|tan 2a|", extended_rulings_through="pi(e0)",
    ),
}


def ambient_for(kind: FamilyKind, r: float = 1.0) -> AmbientConfig:
    eps, eps_t = _SIGNS[FamilyKind.parse(kind)]
    return AmbientConfig(eps, eps_t, r)


def check_range(kind: FamilyKind, a: float) -> None:
    lo, hi = PARAMETER_RANGES[kind]
    if not np.isfinite(a):
        raise ParameterRangeError(f"{kind.value}: parameter a must be finite")
    if (lo is not None and a <= lo) or (hi is not None and a >= hi):
        lo_s = "-inf" if lo is None else f"{lo:g}"
        hi_s = "inf" if hi is None else f"{hi:g}"
        raise ParameterRangeError(
            f"{kind.value}: parameter a = {a!r} outside the open interval ({lo_s}, {hi_s})"
        )


def family_generator(kind, a: float, cfg: AmbientConfig | None = None):
    """Return ``(Y, lam, p)`` for a family.

    ``Y`` is a 3x3 complex matrix supported on the curve plane (so that
    ``exp(tY)`` is the identity on the orthogonal axis), ``lam`` the speed
    making the projected spine unit speed, and ``p`` the base point.
    """
    kind = FamilyKind.parse(kind)
    check_range(kind, a)
    if cfg is None:
        cfg = ambient_for(kind)
    elif (cfg.epsilon, cfg.epsilon_tilde) != _SIGNS[kind]:
        raise ValueError(f"{kind.value} needs (epsilon, epsilon_tilde) = {_SIGNS[kind]}")
    r = cfg.r
    Y = np.zeros((3, 3), dtype=complex)
    p = np.zeros(3, dtype=complex)
    if kind is FamilyKind.CP2_CIRCLE:
        Y[0, 0], Y[1, 1] = 1j, -1j
        p[:] = r * math.cos(a), r * math.sin(a), 0
        lam = 1.0 / (r * math.sin(2 * a))
    elif kind is FamilyKind.CH2_EQUIDISTANT:
        Y[0, 1] = Y[1, 0] = 1
        p[:] = r * math.cosh(a), 1j * r * math.sinh(a), 0
        lam = 1.0 / (r * math.cosh(2 * a))
    elif kind is FamilyKind.CH2_CIRCLE:
        Y[0, 0], Y[1, 1] = 1j, -1j
        p[:] = r * math.cosh(a), r * math.sinh(a), 0
        lam = 1.0 / (r * math.sinh(2 * a))
    elif kind is FamilyKind.CH2_HOROCYCLE:
        Y[:2, :2] = [[1j, -1j], [1j, -1j]]
        p[:] = r * math.cosh(a), r * math.sinh(a), 0
        lam = 1.0 / r
    else:
        Y[1, 2] = Y[2, 1] = 1j
        p[:] = 0, r * math.cos(a), r * math.sin(a)
        lam = 1.0 / (r * math.cos(2 * a))
    return Y, lam, p


def group_exp(kind, t) -> np.ndarray:
    """exp(t Y) in closed form, batched over ``t`` -> shape (..., 3, 3)."""
    kind = FamilyKind.parse(kind)
    t = np.asarray(t, dtype=float)
    g = np.zeros(t.shape + (3, 3), dtype=complex)
    if kind in (FamilyKind.CP2_CIRCLE, FamilyKind.CH2_CIRCLE):
        g[..., 0, 0] = np.exp(1j * t)
        g[..., 1, 1] = np.exp(-1j * t)
        g[..., 2, 2] = 1
    elif kind is FamilyKind.CH2_EQUIDISTANT:
        g[..., 0, 0] = g[..., 1, 1] = np.cosh(t)
        g[..., 0, 1] = g[..., 1, 0] = np.sinh(t)
        g[..., 2, 2] = 1
    elif kind is FamilyKind.CH2_HOROCYCLE:
        g[..., 0, 0] = 1 + 1j * t
        g[..., 0, 1] = -1j * t
        g[..., 1, 0] = 1j * t
        g[..., 1, 1] = 1 - 1j * t
        g[..., 2, 2] = 1
    else:
        g[..., 0, 0] = 1
        g[..., 1, 1] = g[..., 2, 2] = np.cos(t)
        g[..., 1, 2] = g[..., 2, 1] = 1j * np.sin(t)
    return g


@dataclass(frozen=True)
class CurveEval:
    s: float
    delta: np.ndarray
    delta_s: np.ndarray
    delta_ss: np.ndarray
    b: float
    rho_sq_factor: float


def curve_invariants(delta, delta_s, cfg: AmbientConfig):
    """``b = <delta_s, i delta>/r^2`` and ``<delta_s, delta_s> - eps_t eps b^2 r^2``."""
    r2 = cfg.r**2
    b = inner(delta_s, 1j * np.asarray(delta), cfg) / r2
    factor = inner(delta_s, delta_s, cfg) - cfg.epsilon_tilde * cfg.epsilon * b**2 * r2
    return b, factor


class _CurveBase:
    cfg: AmbientConfig

    def evaluate_many(self, s):  # pragma: no cover - interface
        raise NotImplementedError

    def evaluate(self, s: float) -> CurveEval:
        d, ds, dss = (x[0] for x in self.evaluate_many(np.array([float(s)])))
        b, factor = curve_invariants(d, ds, self.cfg)
        return CurveEval(float(s), d, ds, dss, float(b), float(factor))


@dataclass(frozen=True)
class CurveFamily(_CurveBase):
    """One of the five constant-curvature families with parameter ``a``."""

    kind: FamilyKind
    a: float
    r: float = 1.0
    cfg: AmbientConfig = field(init=False, repr=False)
    Y: np.ndarray = field(init=False, repr=False, compare=False)
    lam: float = field(init=False, repr=False, compare=False)
    p: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        kind = FamilyKind.parse(self.kind)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "a", float(self.a))
        cfg = ambient_for(kind, self.r)
        object.__setattr__(self, "cfg", cfg)
        Y, lam, p = family_generator(kind, self.a, cfg)
        object.__setattr__(self, "Y", Y)
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "p", p)

    @classmethod
    def from_json(cls, obj: dict, r: float = 1.0) -> "CurveFamily":
        return cls(FamilyKind.parse(obj["kind"]), float(obj["a"]), r)

    def to_json(self) -> dict:
        return {"kind": self.kind.value, "a": self.a}

    def evaluate_many(self, s):
        s = np.asarray(s, dtype=float)
        g = group_exp(self.kind, s * self.lam)
        delta = g @ self.p
        Yp = self.Y @ self.p
        delta_s = self.lam * (g @ Yp)
        delta_ss = self.lam**2 * (g @ (self.Y @ Yp))
        return delta, delta_s, delta_ss

    @property
    def period(self) -> float | None:
        if self.kind in (FamilyKind.CP2_CIRCLE, FamilyKind.CH2_CIRCLE,
                         FamilyKind.CH2_EXTERIOR_CIRCLE):
            return 2 * math.pi / self.lam
        return None

    def default_interval(self) -> tuple[float, float]:
        T = self.period
        return (0.0, T) if T is not None else (-10 * self.r, 10 * self.r)


@dataclass(frozen=True)
class GeneralCurve(_CurveBase):
    """Caller-supplied curve ``s -> (delta, delta_s, delta_ss)`` in the curve plane.

    The evaluator must be stateless. Its values must satisfy
    ``<delta, delta> = eps * eps_t * r^2``; :meth:`check_level` reports the
    worst violation over a set of parameters.
    """

    cfg: AmbientConfig
    func: Callable[[float], tuple]
    interval: tuple[float, float] = (-math.inf, math.inf)

    def evaluate_many(self, s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        out = np.empty((3,) + s.shape + (3,), dtype=complex)
        for idx in np.ndindex(s.shape):
            vals = self.func(float(s[idx]))
            for k in range(3):
                out[(k,) + idx] = np.asarray(vals[k], dtype=complex)
        return out[0], out[1], out[2]

    def check_level(self, s) -> float:
        d, _, _ = self.evaluate_many(s)
        target = self.cfg.epsilon * self.cfg.epsilon_tilde * self.cfg.r**2
        return float(np.max(np.abs(inner(d, d, self.cfg) - target)))


def delta(curve, s: float) -> CurveEval:
    """Evaluate a curve and its scalar invariants at ``s``."""
    return curve.evaluate(s)


def spine_curvature_closed(family: CurveFamily, cfg: AmbientConfig | None = None) -> float:
    """Geodesic curvature of the projected spine, |alpha| at sigma = 1."""
    r = family.r if cfg is None else cfg.r
    a2 = 2 * family.a
    kind = family.kind
    if kind is FamilyKind.CP2_CIRCLE:
        return 2 / r * abs(math.cos(a2) / math.sin(a2))
    if kind is FamilyKind.CH2_EQUIDISTANT:
        return 2 / r * abs(math.tanh(a2))
    if kind is FamilyKind.CH2_CIRCLE:
        return 2 / r / math.tanh(a2)
    if kind is FamilyKind.CH2_HOROCYCLE:
        return 2 / r
    return 2 / r * abs(math.tan(a2))


def _phase_increment(curve, s: float, k: float) -> float:
    """-eps*eps_t * integral_s^{s+k} b, by Simpson's rule (exact for constant b)."""
    cfg = curve.cfg
    pts = np.array([s, s + k / 2, s + k])
    d, ds, _ = curve.evaluate_many(pts)
    b, _ = curve_invariants(d, ds, cfg)
    integral = k / 6 * (b[0] + 4 * b[1] + b[2])
    return -cfg.epsilon * cfg.epsilon_tilde * integral


def _unit_horizontal_tangent(curve, t: float):
    cfg = curve.cfg
    d, ds, _ = (x[0] for x in curve.evaluate_many(np.array([t])))
    h = horizontal_part(d, ds, cfg)
    speed2 = inner(h, h, cfg)
    if speed2 <= 0:
        raise DegenerateCurveError("not an immersed curve")
    return d, h / math.sqrt(speed2), math.sqrt(speed2)


def _central_curvature(curve, s: float, step: float) -> float:
    cfg = curve.cfg
    d0, T0, speed = _unit_horizontal_tangent(curve, s)
    _, Tp, _ = _unit_horizontal_tangent(curve, s + step)
    _, Tm, _ = _unit_horizontal_tangent(curve, s - step)
    # rotate the neighbouring lifts onto the horizontal lift through d0
    Tp = Tp * np.exp(1j * _phase_increment(curve, s, step))
    Tm = Tm * np.exp(1j * _phase_increment(curve, s, -step))
    dT = (Tp - Tm) / (2 * step)
    acc = horizontal_part(d0, dT, cfg)
    acc = acc - inner(acc, T0, cfg) * T0
    return acc / speed


def spine_curvature_numeric(curve, s: float, step: float | None = None,
                            cfg: AmbientConfig | None = None,
                            scheme: str = "central-2") -> float:
    """Geodesic curvature of ``pi o delta`` at ``s`` by finite differences.

    The unit tangent is lifted horizontally along the curve, differenced, and
    projected back onto the horizontal space; the result is divided by the
    speed of the projected curve. ``scheme="richardson-4"`` combines steps
    ``h`` and ``h/2``.
    """
    cfg = curve.cfg if cfg is None else cfg
    ev = curve.evaluate(s)
    if ev.rho_sq_factor <= 0:
        raise DegenerateCurveError("not an immersed curve")
    if step is None:
        step = 1e-5 * cfg.r
    if step <= 0:
        raise ValueError("step must be positive")
    if scheme == "central-2":
        k = _central_curvature(curve, s, step)
    elif scheme == "richardson-4":
        k = (4 * _central_curvature(curve, s, step / 2) - _central_curvature(curve, s, step)) / 3
    else:
        raise ValueError(f"unknown finite-difference scheme {scheme!r}")
    return float(math.sqrt(max(inner(k, k, cfg), 0.0)))


def family_configs() -> dict:
    return {k: ambient_for(k) for k in FamilyKind}


__all__ = [
    "CATALOG", "CP2", "CH2_INTERIOR", "CH2_EXTERIOR", "CurveEval", "CurveFamily",
    "DegenerateCurveError", "FamilyKind", "GeneralCurve", "ParameterRangeError",
    "ambient_for", "curve_invariants", "delta", "family_generator", "group_exp",
    "spine_curvature_closed", "spine_curvature_numeric",
]
