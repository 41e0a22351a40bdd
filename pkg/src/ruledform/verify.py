"""Numerical oracles for the closed-form geometry of ruled hypersurfaces.

Each check recomputes a closed-form claim by an independent route (finite
differences of a null-space normal, SVD ranks, orbit evaluation) and reports
a residual against a tolerance. :func:`run_suite` runs everything for a list
of families and collects a :class:`VerifyReport`.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.stats import qmc

from .ambient import AmbientConfig, ProjPoint, coincide_residual, inner
from .curves import (CurveFamily, FamilyKind, GeneralCurve, spine_curvature_closed,
                     spine_curvature_numeric)
from .groups import (equivariance_residuals, form_residual, omega,
                     orbit_invariant_variation, theta as theta_rot,
                     transversality_component, transversality_margin)
from .ruled import (HyperPoint, _as_point, evaluate_batch, polar_from_w, shape_matrices, sigma,
                    w_from_polar)

SCHEMES = ("central-2", "richardson-4")


class FdStepError(ValueError):
    """Finite-difference step too small to resolve or too large for the chart."""


class DegenerateRatioError(ValueError):
    pass


class DichotomyError(ValueError):
    pass


@dataclass(frozen=True)
class FdConfig:
    step: float = 1e-5
    scheme: str = "central-2"
    samples: int = 100
    seed: int = 0
    # The shape-operator oracle differences a unit normal whose roundoff grows
    # with |z|^2, so it runs at a larger step with a fourth-order scheme.
    shape_step_factor: float = 100.0
    shape_scheme: str = "richardson-4"

    def __post_init__(self):
        if not (self.step > 0 and math.isfinite(self.step)):
            raise ValueError("finite-difference step must be positive")
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown finite-difference scheme {self.scheme!r}")
        if self.samples < 1:
            raise ValueError("samples must be positive")
        if self.shape_scheme not in SCHEMES:
            raise ValueError(f"unknown finite-difference scheme {self.shape_scheme!r}")
        if not self.shape_step_factor > 0:
            raise ValueError("shape_step_factor must be positive")

    def for_shape(self) -> "FdConfig":
        """Settings used by :func:`numeric_shape_prime` inside the suite."""
        return replace(self, step=self.step * self.shape_step_factor,
                       scheme=self.shape_scheme, shape_step_factor=1.0)


@dataclass(frozen=True)
class Tolerances:
    fd: float = 1e-6
    alg: float = 1e-9
    proj: float = 1e-8
    frame: float = 1e-10
    group: float = 1e-12
    # finite-difference derivatives of alpha, beta and of the spine tangent
    deriv: float | None = None
    # projective constancy of the frame-built fixed point
    fixed_frame: float = 1e-6

    @property
    def derivative(self) -> float:
        return 10 * self.fd if self.deriv is None else self.deriv

    @classmethod
    def from_dict(cls, d: dict | None) -> "Tolerances":
        d = dict(d or {})
        unknown = set(d) - {"fd", "alg", "proj", "frame", "group", "deriv", "fixed_frame"}
        if unknown:
            raise ValueError(f"unknown tolerance keys: {sorted(unknown)}")
        for k, v in d.items():
            if v is not None and not (float(v) >= 0):
                raise ValueError(f"tolerance {k} must be non-negative")
        return cls(**{k: (None if v is None else float(v)) for k, v in d.items()})


# A residual that could not be computed is stored as the largest double so the
# JSON stays valid and the record fails.
_UNCOMPUTED = float(np.finfo(float).max)


@dataclass(frozen=True)
class CheckRecord:
    id: str
    anchor: str
    residual: float
    tolerance: float
    samples: int
    note: str = ""

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.tolerance)

    def to_dict(self) -> dict:
        return {"id": self.id, "anchor": self.anchor, "residual": float(self.residual),
                "tolerance": float(self.tolerance), "pass": self.passed,
                "samples": int(self.samples)}


@dataclass
class VerifyReport:
    suite: str
    seed: int
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> int:
        return sum(c.passed for c in self.checks)

    @property
    def failed(self) -> int:
        return len(self.checks) - self.passed

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def to_dict(self) -> dict:
        return {"suite": self.suite, "seed": int(self.seed),
                "checks": [c.to_dict() for c in self.checks],
                "passed": self.passed, "failed": self.failed}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, allow_nan=False) + "\n"

    def to_table(self) -> str:
        width = max([len(c.id) for c in self.checks] + [5])
        lines = [f"{'check':<{width}}  {'residual':>12}  {'tolerance':>10}  result"]
        for c in self.checks:
            res = "PASS" if c.passed else "FAIL"
            extra = f"  ({c.note})" if c.note and not c.passed else ""
            lines.append(f"{c.id:<{width}}  {c.residual:12.3e}  {c.tolerance:10.1e}  {res}{extra}")
        lines.append(f"{self.passed} passed, {self.failed} failed")
        return "\n".join(lines)


# --- sampling --------------------------------------------------------------

def default_w_box(cfg: AmbientConfig) -> tuple[float, float]:
    if cfg.epsilon == 1:
        return 0.05, 4.0
    if cfg.epsilon_tilde == 1:
        return 0.05, 0.95
    return 1.05, 4.0


def default_s_box(curve) -> tuple[float, float]:
    period = getattr(curve, "period", None)
    if period is not None:
        return 0.0, period
    return -2.0 * curve.cfg.r, 2.0 * curve.cfg.r


@dataclass(frozen=True)
class SampleBox:
    theta: tuple = (0.0, 2 * math.pi)
    s: tuple | None = None
    w_abs: tuple | None = None


def sample_points(curve, n: int, seed: int, box: SampleBox | None = None):
    """Scrambled-Halton points ``(theta, s, w)`` inside the family's box."""
    box = box or SampleBox()
    s_lo, s_hi = box.s or default_s_box(curve)
    w_lo, w_hi = box.w_abs or default_w_box(curve.cfg)
    x = qmc.Halton(d=4, scramble=True, seed=np.random.default_rng(seed)).random(n)
    th = box.theta[0] + (box.theta[1] - box.theta[0]) * x[:, 0]
    s = s_lo + (s_hi - s_lo) * x[:, 1]
    mod = w_lo + (w_hi - w_lo) * x[:, 2]
    w = mod * np.exp(2j * math.pi * x[:, 3])
    return th, s, w


# --- finite-difference shape operator ---------------------------------------

def _re_inner(a, b, metric):
    return np.sum(metric * a * np.conj(b), axis=-1).real


def _lstsq(A, b):
    """Minimum-norm solutions of ``A x = b`` for a stack of 5x6 systems."""
    return np.einsum("nji,nj->ni", A, np.linalg.solve(A @ np.swapaxes(A, 1, 2), b[..., None])[..., 0])


def _normal_field(curve, theta, s, w):
    """Unit normal of the lifted hypersurface inside the level set, by SVD.

    The tangent space plus ``z`` is spanned over the reals by
    ``z, iz, z_s, e^{i theta} v, i e^{i theta} v``; the normal is its
    ``<,>``-orthogonal complement, oriented so that ``<xi, i z_s> > 0``.
    """
    cfg = curve.cfg
    metric = cfg.metric_diag
    data = evaluate_batch(curve, theta, s, w)
    z = data["z"]
    _, ds, _ = curve.evaluate_many(np.asarray(s, float).reshape(-1))
    ph = np.exp(1j * np.asarray(theta, float)).reshape(-1)
    zs = (ph * data["sigma"].reshape(-1))[:, None] * ds
    z = z.reshape(-1, 3)
    vv = ph[:, None] * cfg.v
    span = np.stack([z, 1j * z, zs, vv, 1j * vv], axis=1)
    span = span / np.linalg.norm(span, axis=-1, keepdims=True)
    g = span * metric
    rows = np.concatenate([g.real, g.imag], axis=-1)
    _, _, vt = np.linalg.svd(rows)
    null = vt[:, -1, :]
    # one least-squares correction sweeps out the residual tangent part
    resid = np.einsum("nij,nj->ni", rows, null)
    null = null - _lstsq(rows, resid)
    xi = null[:, :3] + 1j * null[:, 3:]
    norm2 = _re_inner(xi, xi, metric)
    xi = xi / np.sqrt(norm2)[:, None]
    orient = np.sign(_re_inner(xi, 1j * zs, metric))
    return xi * orient[:, None], z


def _chart_params(curve, theta, s, w):
    theta = np.atleast_1d(np.asarray(theta, float))
    s = np.atleast_1d(np.asarray(s, float))
    w = np.atleast_1d(np.asarray(w, complex))
    if np.any(w == 0):
        raise ValueError("polar chart undefined on the spine")
    ut = np.array([polar_from_w(complex(x), curve.cfg) for x in w])
    return np.stack([theta, s, ut[:, 0], ut[:, 1]], axis=1)


def _check_step(curve, x, h):
    """Reject steps that vanish in floating point or leave the polar chart."""
    scale = np.max(np.abs(x), axis=0)
    if np.any((x + h == x) & (x != 0)) or h < 1e-13 * max(1.0, float(np.max(scale))):
        raise FdStepError(f"finite-difference step {h!r} underflows the coordinates")
    u = x[:, 2]
    upper = math.pi / 2 if curve.cfg.epsilon == 1 else math.inf
    if h > 0.1 or np.any(u - 2 * h <= 0) or np.any(u + 2 * h >= upper):
        raise FdStepError(f"finite-difference step {h!r} leaves the polar chart")


def _fields_at(curve, x):
    w = w_from_polar(x[:, 2], x[:, 3], curve.cfg)
    return _normal_field(curve, x[:, 0], x[:, 1], w)


def _central(curve, x, h):
    """Central differences of (xi, z) along the four chart coordinates."""
    n = x.shape[0]
    dxi = np.empty((n, 4, 3), dtype=complex)
    dz = np.empty((n, 4, 3), dtype=complex)
    for j in range(4):
        xp = x.copy()
        xm = x.copy()
        xp[:, j] += h
        xm[:, j] -= h
        xi_p, z_p = _fields_at(curve, xp)
        xi_m, z_m = _fields_at(curve, xm)
        dxi[:, j] = (xi_p - xi_m) / (2 * h)
        dz[:, j] = (z_p - z_m) / (2 * h)
    return dxi, dz


def numeric_shape_prime_batch(curve, theta, s, w, fd: FdConfig | None = None) -> np.ndarray:
    """Finite-difference ``A'`` at many points, shape (n, 4, 4).

    Basis ``(iz/r, U, E1', E2')`` as in :func:`ruledform.ruled.shape_closed`.
    ``fd`` is used as given; the default is ``FdConfig().for_shape()``.
    """
    fd = fd or FdConfig().for_shape()
    cfg = curve.cfg
    metric = cfg.metric_diag
    x = _chart_params(curve, theta, s, w)
    h = fd.step
    _check_step(curve, x, h)
    if fd.scheme == "central-2":
        dxi, dz = _central(curve, x, h)
    else:
        a_xi, a_z = _central(curve, x, h)
        b_xi, b_z = _central(curve, x, h / 2)
        dxi = (4 * b_xi - a_xi) / 3
        dz = (4 * b_z - a_z) / 3

    wb = w_from_polar(x[:, 2], x[:, 3], cfg)
    data = evaluate_batch(curve, x[:, 0], x[:, 1], wb)
    rho = data["rho"]
    if np.any(~(rho > 0)):
        raise ValueError("not an immersion here")
    z, R = data["z"], data["R"]
    xi, _ = _normal_field(curve, x[:, 0], x[:, 1], wb)
    normR = np.sqrt(_re_inner(R, R, metric))[:, None]
    basis = np.stack([1j * z / cfg.r, data["e"] / rho[:, None], 1j * R / normR, R / normR],
                     axis=1)
    bnorm = _re_inner(basis, basis, metric)

    def coords(V):
        # drop the z and xi components, then expand in the orthogonal basis
        V = V - (_re_inner(V, xi[:, None], metric) / _re_inner(xi, xi, metric)[:, None])[..., None] * xi[:, None]
        V = V - (_re_inner(V, z[:, None], metric) / _re_inner(z, z, metric)[:, None])[..., None] * z[:, None]
        c = _re_inner(V[:, :, None, :], basis[:, None, :, :], metric) / bnorm[:, None, :]
        return np.swapaxes(c, 1, 2)  # (n, basis k, coordinate j)

    D = coords(-dxi)
    Z = coords(dz)
    return D @ np.linalg.inv(Z)


def numeric_shape_prime(curve, pt, fd: FdConfig | None = None) -> np.ndarray:
    """Finite-difference matrix of ``A'`` at one point (requires ``w != 0``)."""
    pt = _as_point(pt)
    if pt.w == 0:
        raise ValueError("polar chart undefined on the spine")
    return numeric_shape_prime_batch(curve, [pt.theta], [pt.s], [pt.w], fd)[0]


def shape_prime_residual(numeric, closed, floor: float = 1e-3) -> float:
    """max over entries of ``|num - closed| / max(|closed|, floor)``.

    With a tolerance of 1e-6 this is "relative 1e-6, absolute floor 1e-9".
    """
    numeric = np.asarray(numeric)
    closed = np.asarray(closed)
    return float(np.max(np.abs(numeric - closed) / np.maximum(np.abs(closed), floor)))


def ruled_residual(A, basisinfo: str | None = None) -> float:
    """Largest entry of ``A`` on the holomorphic distribution block.

    ``basisinfo`` is ``"lift"`` for 4x4 ``A'`` (block rows/cols 2, 3) or
    ``"proj"`` for 3x3 ``A`` (block rows/cols 1, 2); inferred from the shape
    when omitted.
    """
    A = np.asarray(A, dtype=float)
    if basisinfo is None:
        basisinfo = "lift" if A.shape == (4, 4) else "proj"
    start = {"lift": 2, "proj": 1}[basisinfo]
    block = A[start:start + 2, start:start + 2]
    return float(np.max(np.abs(block)))


def numeric_principal_curvatures(A_prime) -> np.ndarray:
    """Sorted eigenvalues of the ``(U, E1', E2')`` block of ``A'``."""
    return np.sort(np.linalg.eigvals(np.asarray(A_prime)[1:, 1:]).real)


# --- closed-form checks over samples -----------------------------------------

def _alpha_beta_arrays(curve, s, w):
    data = evaluate_batch(curve, np.zeros(np.shape(s)), s, w)
    return data["alpha"], data["beta"]


def hopf_violation(curve, sample) -> float:
    """min over the sample of ``|A W - alpha W| = |beta|``."""
    s, w = _sw(sample)
    if s.size == 0:
        raise ValueError("empty sample")
    _, beta = _alpha_beta_arrays(curve, s, w)
    return float(np.min(np.abs(beta)))


def _sw(sample):
    """Accept ``(s, w)`` arrays or a sequence of points."""
    if isinstance(sample, tuple) and len(sample) == 2:
        return np.atleast_1d(np.asarray(sample[0], float)), np.atleast_1d(np.asarray(sample[1], complex))
    pts = [_as_point(p) for p in sample]
    return np.array([p.s for p in pts], float), np.array([p.w for p in pts], complex)


def _ratio_terms(curve, sample):
    s, w = _sw(sample)
    if s.size == 0:
        raise ValueError("empty sample")
    alpha, beta = _alpha_beta_arrays(curve, s, w)
    return alpha, beta ** 2 + curve.cfg.c


def ratio_constancy(curve, sample) -> float:
    """Spread ``max |alpha^2/(beta^2+c) - mean|`` over the sample."""
    alpha, denom = _ratio_terms(curve, sample)
    if np.any(np.abs(denom) < 1e-12):
        raise DegenerateRatioError("degenerate ratio")
    ratio = alpha ** 2 / denom
    return float(np.max(np.abs(ratio - ratio.mean())))


def ratio_value(curve, sample) -> float:
    alpha, denom = _ratio_terms(curve, sample)
    if np.any(np.abs(denom) < 1e-12):
        raise DegenerateRatioError("degenerate ratio")
    return float(np.mean(alpha ** 2 / denom))


def sign_dichotomy(curve, sample) -> int:
    """Common sign of ``beta^2 + c`` over an off-spine sample."""
    _, denom = _ratio_terms(curve, sample)
    signs = set(np.sign(denom).astype(int).tolist())
    if signs == {1}:
        return 1
    if signs == {-1}:
        return -1
    raise DichotomyError("dichotomy violated")


def gamma_curvature_check(curve, sample) -> float:
    """max ``| |alpha| / (r sqrt|beta^2+c|) - kappa_spine |`` over the sample."""
    alpha, denom = _ratio_terms(curve, sample)
    if np.any(np.abs(denom) < 1e-12):
        raise DegenerateRatioError("degenerate ratio")
    vals = np.abs(alpha) / (curve.cfg.r * np.sqrt(np.abs(denom)))
    return float(np.max(np.abs(vals - spine_curvature_closed(curve))))


def known_fixed_point(curve) -> ProjPoint:
    """pi(v): pi(e2) for eps_t = 1, pi(e0) for the exterior family."""
    return ProjPoint(curve.cfg.v.copy(), cfg=curve.cfg)


def fixed_point_vectors(curve, theta, s, w) -> np.ndarray:
    """``E1^ - i r beta^ E0^`` with ``E0^ = z/r`` and ``E1^ = iR/|R|``."""
    cfg = curve.cfg
    data = evaluate_batch(curve, theta, s, w)
    z, R, beta = data["z"].reshape(-1, 3), data["R"].reshape(-1, 3), data["beta"].reshape(-1)
    normR = np.sqrt(_re_inner(R, R, cfg.metric_diag))[:, None]
    return 1j * R / normR - 1j * beta[:, None] * z


def fixed_point_check(curve, sample) -> tuple[ProjPoint, float]:
    """Projective point from the first sample and the worst deviation from it."""
    th, s, w = (np.atleast_1d(np.asarray(a)) for a in sample)
    if np.any(w == 0):
        raise ValueError("fixed point needs an off-spine sample")
    vecs = fixed_point_vectors(curve, th, s, w)
    point = ProjPoint(vecs[0], cfg=curve.cfg)
    res = max(coincide_residual(point, v) for v in vecs)
    return point, float(res)


def ruling_contains_residual(curve, s, point: ProjPoint) -> float:
    """How far ``point`` is from the complex line ``span(delta(s), v)``.

    Smallest singular value of the unit-column matrix ``[delta, v, point]``.
    """
    d, _, _ = curve.evaluate_many(np.atleast_1d(np.asarray(s, float)))
    p = point.representative / np.linalg.norm(point.representative)
    worst = 0.0
    for dk in d:
        M = np.stack([dk / np.linalg.norm(dk), curve.cfg.v, p], axis=1)
        worst = max(worst, float(np.linalg.svd(M, compute_uv=False)[-1]))
    return worst


# --- moving-frame derivatives --------------------------------------------------

def _frame_derivative_raw(curve, pt, fd: FdConfig):
    """(alpha, beta, d alpha/du, d beta/du) at ``pt`` in the polar chart."""
    pt = _as_point(pt)
    cfg = curve.cfg
    u, t = polar_from_w(pt.w, cfg)
    h = fd.step
    if u - 2 * h <= 0 or (cfg.epsilon == 1 and u + 2 * h >= math.pi / 2):
        raise FdStepError(f"finite-difference step {h!r} leaves the polar chart")

    def at(us):
        w = w_from_polar(np.asarray(us), t, cfg)
        return _alpha_beta_arrays(curve, np.full(len(us), pt.s), w)

    def diff(hh):
        a, b = at([u + hh, u - hh])
        return (a[0] - a[1]) / (2 * hh), (b[0] - b[1]) / (2 * hh)

    if fd.scheme == "central-2":
        da, db = diff(h)
    else:
        (a1, b1), (a2, b2) = diff(h), diff(h / 2)
        da, db = (4 * a2 - a1) / 3, (4 * b2 - b1) / 3
    a0, b0 = at([u])
    return float(a0[0]), float(b0[0]), float(da), float(db)


_ORIENTATION_SEPARATION = 1e-3


def orientation_residuals(curve, pt, fd: FdConfig | None = None) -> dict:
    """Residual pairs for both orientations ``e2 = +-(1/r) d/du``."""
    fd = fd or FdConfig()
    a, b, da, db = _frame_derivative_raw(curve, pt, fd)
    c = curve.cfg.c
    r = curve.cfg.r
    out = {}
    for o in (1, -1):
        Da, Db = o * da / r, o * db / r
        out[o] = (abs(Da - a * b), abs(Db - (b * b + c)))
    return out


def resolve_orientation(curve, probe, fd: FdConfig | None = None) -> int:
    res = orientation_residuals(curve, probe, fd)
    return min(res, key=lambda o: max(res[o]))


def frame_derivative_check(curve, pt, fd: FdConfig | None = None,
                           orientation: int | None = None) -> tuple[float, float]:
    """``(|e2(alpha) - alpha beta|, |e2(beta) - (beta^2 + c)|)``.

    ``beta`` is the signed coefficient of the closed-form ``A'``. The
    orientation of ``e2`` along ``d/du`` is resolved at ``pt`` unless given.
    """
    res = orientation_residuals(curve, pt, fd)
    if orientation is None:
        orientation = min(res, key=lambda o: max(res[o]))
    return res[orientation]


# --- immersion rank ------------------------------------------------------------

def immersion_rank_check(curve, pt, fd: FdConfig | None = None) -> tuple[int, float]:
    """Rank of the 6x4 real Jacobian of ``f`` in ``(theta, s, w1, w2)`` and rho."""
    fd = fd or FdConfig()
    pt = _as_point(pt)
    sigma(pt.w, curve.cfg)  # raises outside the model domain
    h = fd.step
    base = np.array([pt.theta, pt.s, pt.w.real, pt.w.imag])
    offsets = np.concatenate([np.eye(4) * h, -np.eye(4) * h])
    P = base + offsets
    data = evaluate_batch(curve, P[:, 0], P[:, 1], P[:, 2] + 1j * P[:, 3])
    z = data["z"]
    J = (z[:4] - z[4:]) / (2 * h)
    Jr = np.concatenate([J.real, J.imag], axis=1).T
    sv = np.linalg.svd(Jr, compute_uv=False)
    rank = int(np.sum(sv > 1e-7 * sv[0]))
    rho = float(evaluate_batch(curve, [pt.theta], [pt.s], [pt.w])["rho"][0])
    return rank, rho


def rigged_curve(cfg: AmbientConfig, s0: float = 0.0, a: float = 0.3) -> GeneralCurve:
    """Curve with ``delta_s = eps_t eps b i delta`` at ``s0``, so ``e = 0`` there.

    ``delta = e^{is} r (C(xi) p + S(xi) q)`` with ``xi = a + (s - s0)^2``,
    where ``(C, S)`` is (cos, sin) when ``<p, p> = <q, q>`` and (cosh, sinh)
    when ``p`` is the negative axis.
    """
    r = cfg.r
    hyperbolic = cfg.epsilon == -1 and cfg.epsilon_tilde == 1
    if cfg.epsilon_tilde == 1:
        p, q = np.array([1, 0, 0], complex), np.array([0, 1, 0], complex)
    else:
        p, q = np.array([0, 1, 0], complex), np.array([0, 0, 1], complex)
    if hyperbolic:
        C, S, dC, dS = math.cosh, math.sinh, math.sinh, math.cosh
        ddC, ddS = math.cosh, math.sinh
    else:
        C, S, dC, dS = math.cos, math.sin, (lambda x: -math.sin(x)), math.cos
        ddC, ddS = (lambda x: -math.cos(x)), (lambda x: -math.sin(x))

    def func(s):
        x = a + (s - s0) ** 2
        x1 = 2 * (s - s0)
        ph = np.exp(1j * s)
        m = C(x) * p + S(x) * q
        m1 = x1 * (dC(x) * p + dS(x) * q)
        m2 = x1 * x1 * (ddC(x) * p + ddS(x) * q) + 2 * (dC(x) * p + dS(x) * q)
        d = r * ph * m
        ds = r * ph * (1j * m + m1)
        dss = r * ph * (-m + 2j * m1 + m2)
        return d, ds, dss

    return GeneralCurve(cfg, func)


# --- identities checked at sample points -------------------------------------

def frame_identity_residuals(curve, theta, s, w) -> dict:
    """Algebraic identities of the construction at each sample point.

    Keys: ``sigma`` (defining equation), ``orthogonality`` (pairwise
    ``<,>`` of ``iz, U, iR, R, iU, z`` scaled to unit vectors), ``R_norm``
    (``<R,R> = sigma^4 |w|^2 r^2``, relative) and ``z_norm``
    (``<z,z> = eps r^2``, relative).
    """
    cfg = curve.cfg
    metric = cfg.metric_diag
    data = evaluate_batch(curve, theta, s, w)
    w = np.asarray(w, complex).reshape(-1)
    sig = data["sigma"].reshape(-1)
    z, R, e = (data[k].reshape(-1, 3) for k in ("z", "R", "e"))
    rho = data["rho"].reshape(-1)
    r = cfg.r
    w2 = np.abs(w) ** 2
    res = {"sigma": float(np.max(np.abs(cfg.epsilon_tilde * sig ** 2 * (1 + cfg.epsilon * w2) - 1)))}
    zz = _re_inner(z, z, metric)
    res["z_norm"] = float(np.max(np.abs(zz - cfg.epsilon * r * r))) / (r * r)
    RR = _re_inner(R, R, metric)
    res["R_norm"] = float(np.max(np.abs(RR - sig ** 4 * w2 * r * r) / np.maximum(sig ** 4 * r * r, 1e-300)))
    U = e / rho[:, None]
    vecs = [z / r, 1j * z / r, U, 1j * U]
    off = np.abs(w) > 0
    if np.any(off):
        nR = np.sqrt(np.where(off, RR, 1.0))[:, None]
        vecs += [np.where(off[:, None], R / nR, 0), np.where(off[:, None], 1j * R / nR, 0)]
    worst = 0.0
    for i in range(len(vecs)):
        for j in range(i + 1, len(vecs)):
            worst = max(worst, float(np.max(np.abs(_re_inner(vecs[i], vecs[j], metric)))))
    res["orthogonality"] = worst
    return res


def group_algebra_residual(kind, params, cfg: AmbientConfig) -> tuple[float, float]:
    """(commutation, form preservation) maxima over ``(u, v)`` pairs."""
    comm = form = 0.0
    for u, v in params:
        O, T = omega(kind, u), theta_rot(kind, v)
        comm = max(comm, float(np.max(np.abs(O @ T - T @ O))))
        form = max(form, form_residual(O, cfg), form_residual(T, cfg), form_residual(O @ T, cfg))
    return comm, form


# --- suite -------------------------------------------------------------------

ANCHORS = {
    "shape_prime": "A' = [[0, eps/r, 0, 0], [1/r, alpha, beta, 0], [0, beta, 0, 0], [0, 0, 0, 0]] in (iz/r, U, E1', E2')",
    "shape_beta_entry": "A' E1' = -(eps_t eps / r) |w| U",
    "shape_null_entry": "A' E2' = 0",
    "ruled": "A W-perp contained in span W",
    "spectrum": "principal curvatures {0, (alpha +- sqrt(alpha^2 + 4 beta^2))/2}",
    "hopf": "A W = alpha W + beta U with |beta| = |w|/r",
    "sigma": "eps_t sigma^2 (1 + eps |w|^2) = 1",
    "orthogonality": "{z, iz, U, iU, R, iR} pairwise orthogonal",
    "R_norm": "<R, R> = sigma^4 |w|^2 r^2",
    "z_norm": "<z, z> = eps r^2",
    "equivariance": "(Omega_u Theta_v) f(theta, s, w) = f(theta, s + u/lam, e^{iv} w)",
    "group_commute": "Omega_u Theta_v = Theta_v Omega_u",
    "group_form": "Omega_u, Theta_v preserve the Hermitian form",
    "orbit_invariants": "alpha, beta constant on group orbits",
    "transversality": "<pi_* T, W> = rho / lam for the orbit tangent T",
    "transversality_margin": "orbit tangent transverse to the ruling (margin > 0)",
    "frame_derivative_alpha": "e2(alpha) = alpha beta",
    "frame_derivative_beta": "e2(beta) = beta^2 + c",
    "orientation_unique": "exactly one orientation of e2 satisfies both derivative identities",
    "ratio": "alpha^2 / (beta^2 + c) constant",
    "sign": "sign(beta^2 + c) = eps eps_t",
    "fixed_point_known": "extended rulings pass through pi(v)",
    "fixed_point_frame": "E1^ - i r beta^ E0^ fixed up to a complex multiple",
    "gamma_curvature": "|alpha| / (r sqrt|beta^2 + c|) = spine geodesic curvature",
    "spine_curvature": "spine geodesic curvature by horizontal-lift finite differences",
    "immersion_rank": "immersion iff rho != 0 (rank 4 Jacobian)",
    "immersion_rigged": "rank <= 3 where e = 0",
}


def _threads() -> int:
    raw = os.environ.get("RULEDFORM_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"RULEDFORM_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise ValueError("RULEDFORM_THREADS must be non-negative")
    return n or min(8, os.cpu_count() or 1)


def _family_checks(curve: CurveFamily, fd: FdConfig, tol: Tolerances, seed: int,
                   box: SampleBox | None) -> list[CheckRecord]:
    """All checks for one family, in a fixed order."""
    name = curve.kind.value
    cfg = curve.cfg
    out: list[CheckRecord] = []

    def rec(key, residual, tolerance, samples, note=""):
        residual = float(residual)
        if not math.isfinite(residual):
            residual, note = _UNCOMPUTED, note or "non-finite residual"
        out.append(CheckRecord(f"{name}/{key}", ANCHORS[key.split(":")[0]], residual,
                               float(tolerance), int(samples), note))

    def guarded(keys, tolerances, samples, fn):
        try:
            values = fn()
        except Exception as exc:  # recorded, not raised
            for k, t in zip(keys, tolerances):
                rec(k, _UNCOMPUTED, t, samples, f"{type(exc).__name__}: {exc}")
            return
        for k, t, v in zip(keys, tolerances, values):
            rec(k, v, t, samples)

    spine_in_domain = cfg.epsilon_tilde == 1
    rng_seed = [seed, list(FamilyKind).index(curve.kind)]
    n = fd.samples
    th, s, w = sample_points(curve, n, rng_seed + [0], box)

    def shape():
        num = numeric_shape_prime_batch(curve, th, s, w, fd.for_shape())
        alpha, beta = _alpha_beta_arrays(curve, s, w)
        worst = ruled = spectrum = 0.0
        for k in range(n):
            Ap, _ = shape_matrices(float(alpha[k]), float(beta[k]), cfg)
            worst = max(worst, shape_prime_residual(num[k], Ap))
            ruled = max(ruled, ruled_residual(num[k]))
            root = math.sqrt(alpha[k] ** 2 + 4 * beta[k] ** 2)
            closed = np.sort([0.0, 0.5 * (alpha[k] + root), 0.5 * (alpha[k] - root)])
            err = np.abs(numeric_principal_curvatures(num[k]) - closed)
            spectrum = max(spectrum, float(np.max(err / np.maximum(np.abs(closed), 1e-3))))
        b_entry = float(np.max(np.abs(num[:, 1, 2] - beta)))
        null_entry = float(np.max(np.abs(np.concatenate([num[:, 3, :], num[:, :, 3]], axis=1))))
        return worst, b_entry, null_entry, ruled, spectrum

    guarded(["shape_prime", "shape_beta_entry", "shape_null_entry", "ruled", "spectrum"],
            [tol.fd] * 5, n, shape)

    def hopf():
        expected = float(np.min(np.abs(w))) / cfg.r
        return (abs(hopf_violation(curve, (s, w)) - expected),)

    guarded(["hopf"], [tol.alg], n, hopf)

    # algebraic frame identities at 10x the sample count, some on the spine
    n_id = 10 * n
    th2, s2, w2 = sample_points(curve, n_id, rng_seed + [1], box)
    w2 = w2.copy()
    if spine_in_domain:
        w2[:: max(1, n_id // 10)] = 0
    guarded(["sigma", "orthogonality", "R_norm", "z_norm"], [tol.frame] * 4, n_id,
            lambda: tuple(frame_identity_residuals(curve, th2, s2, w2)[k]
                          for k in ("sigma", "orthogonality", "R_norm", "z_norm")))

    # equivariance over a 20 x 20 x 20 product of points and group parameters
    def equivariance():
        m = 20
        thp, sp, wp = sample_points(curve, m, rng_seed + [2], box)
        grid = np.linspace(-1.0, 1.0, m)
        U, V, K = np.meshgrid(grid, math.pi * grid, np.arange(m), indexing="ij")
        K = K.astype(int)
        res = equivariance_residuals(curve, thp[K], sp[K], wp[K], U, V)
        params = list(zip(grid, math.pi * grid[::-1]))
        comm, form = group_algebra_residual(curve.kind, params, cfg)
        return float(np.max(res)) / cfg.r, comm, form

    guarded(["equivariance", "group_commute", "group_form"],
            [tol.frame, tol.group, tol.group], 8000, equivariance)

    def orbits():
        grid = [(u, v) for u in (-0.7, 0.0, 0.9) for v in (-2.0, 0.0, 1.3)]
        var = max(orbit_invariant_variation(curve, HyperPoint(th[k], s[k], w[k]), grid)
                  for k in range(min(n, 20)))
        tv = 0.0
        margin = math.inf
        for k in range(n):
            pt = HyperPoint(th[k], s[k], w[k])
            rho = float(evaluate_batch(curve, [pt.theta], [pt.s], [pt.w])["rho"][0])
            tv = max(tv, abs(transversality_component(curve, pt) - rho / curve.lam))
            margin = min(margin, transversality_margin(curve, pt))
        return var, tv, -margin

    guarded(["orbit_invariants", "transversality", "transversality_margin"],
            [tol.alg, tol.alg, 0.0], n, orbits)

    # moving-frame derivative identities, orientation fixed at a probe point
    def frame_derivs():
        m = min(n, 50)
        thd, sd, wd = sample_points(curve, m, rng_seed + [3], box)
        probe = HyperPoint(thd[0], sd[0], wd[0])
        orient = resolve_orientation(curve, probe, fd)
        ra = rb = 0.0
        unique = 0.0
        for k in range(m):
            pt = HyperPoint(thd[k], sd[k], wd[k])
            res = orientation_residuals(curve, pt, fd)
            a_, b_ = res[orient]
            ra, rb = max(ra, a_), max(rb, b_)
            # the wrong orientation misses e2(beta) by 2|beta^2 + c|, far above this
            good = [o for o in res if max(res[o]) <= _ORIENTATION_SEPARATION]
            if good != [orient]:
                unique = 1.0
        return ra, rb, unique

    guarded(["frame_derivative_alpha", "frame_derivative_beta", "orientation_unique"],
            [tol.derivative, tol.derivative, 0.0], min(n, 50), frame_derivs)

    # ratio, sign and spine-curvature formula; degenerate points dropped
    def ratio_sign_gamma():
        m = 2 * n
        _, sr, wr = sample_points(curve, m, rng_seed + [4], box)
        _, denom = _ratio_terms(curve, (sr, wr))
        keep = np.abs(denom) >= 1e-12
        sample = (sr[keep], wr[keep])
        spread = ratio_constancy(curve, sample)
        sgn = sign_dichotomy(curve, sample)
        gamma = gamma_curvature_check(curve, sample)
        return spread, float(sgn != cfg.epsilon * cfg.epsilon_tilde), gamma

    guarded(["ratio", "sign", "gamma_curvature"], [tol.alg, 0.0, tol.alg], 2 * n,
            ratio_sign_gamma)

    def fixed_points():
        point, spread = fixed_point_check(curve, (th, s, w))
        known = known_fixed_point(curve)
        vecs = fixed_point_vectors(curve, th, s, w)
        to_known = max(coincide_residual(known, v) for v in vecs)
        to_known = max(to_known, ruling_contains_residual(curve, s, known))
        return to_known, spread

    guarded(["fixed_point_known", "fixed_point_frame"], [tol.proj, tol.fixed_frame], n,
            fixed_points)

    def spine():
        lo, hi = default_s_box(curve)
        ss = np.linspace(lo, hi, 9)[:-1]
        kappa = spine_curvature_closed(curve)
        worst = max(abs(spine_curvature_numeric(curve, float(x), step=fd.step * cfg.r,
                                                scheme=fd.scheme) - kappa) for x in ss)
        return (worst / max(kappa, 1e-3),)

    guarded(["spine_curvature"], [tol.derivative], 8, spine)

    def ranks():
        m = min(n, 20)
        ranks_ = []
        for k in range(m):
            ranks_.append(immersion_rank_check(curve, HyperPoint(th[k], s[k], w[k]), fd)[0])
            if spine_in_domain:
                ranks_.append(immersion_rank_check(curve, HyperPoint(th[k], s[k], 0j), fd)[0])
        rig = rigged_curve(cfg)
        mod = sum(default_w_box(cfg)) / 2
        rig_rank, _ = immersion_rank_check(rig, HyperPoint(0.2, 0.0, mod * w[0] / abs(w[0])), fd)
        return float(4 - min(ranks_)), float(max(0, rig_rank - 3))

    guarded(["immersion_rank", "immersion_rigged"], [0.0, 0.0], 2 * min(n, 20), ranks)
    return out


def run_suite(families, fd: FdConfig | None = None, tolerances: Tolerances | None = None,
              suite: str = "ruledform", box: SampleBox | None = None,
              threads: int | None = None) -> VerifyReport:
    """Run every check for each family and collect the results.

    Families run concurrently (``RULEDFORM_THREADS`` caps the pool, 0 picks
    a default); records are assembled in the input order, so the report is
    identical for a fixed seed.
    """
    fd = fd or FdConfig()
    tol = tolerances or Tolerances()
    families = list(families)
    nthreads = _threads() if threads is None else max(1, threads)
    if nthreads > 1 and len(families) > 1:
        with ThreadPoolExecutor(max_workers=min(nthreads, len(families))) as pool:
            results = list(pool.map(lambda c: _family_checks(c, fd, tol, fd.seed, box), families))
    else:
        results = [_family_checks(c, fd, tol, fd.seed, box) for c in families]
    report = VerifyReport(suite=suite, seed=fd.seed)
    for r in results:
        report.checks.extend(r)
    return report


def default_families(r: float = 1.0) -> list[CurveFamily]:
    """The five families at the reference parameters (bisector and horocycle at a = 0)."""
    return [
        CurveFamily(FamilyKind.CP2_CIRCLE, 0.3, r),
        CurveFamily(FamilyKind.CH2_EQUIDISTANT, 0.0, r),
        CurveFamily(FamilyKind.CH2_CIRCLE, 0.3, r),
        CurveFamily(FamilyKind.CH2_HOROCYCLE, 0.0, r),
        CurveFamily(FamilyKind.CH2_EXTERIOR_CIRCLE, 0.3, r),
    ]
