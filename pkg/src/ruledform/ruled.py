"""Ruled hypersurface over a plane curve: embedding, adapted frame, shape operator.

A point of the hypersurface is parametrised by ``(theta, s, w)``::

    z = f(theta, s, w) = exp(i theta) * sigma(w) * (delta(s) + w r v)

with ``sigma > 0`` fixed by ``eps_t sigma^2 (1 + eps |w|^2) = 1``. Every
function takes the curve first; the ambient configuration is ``curve.cfg``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ambient import AmbientConfig, inner
from .kernels import frame_batch


class ModelDomainError(ValueError):
    """No positive sigma exists for the requested ``w``."""


class NotImmersedError(ValueError):
    """rho = 0: the parametrisation is not an immersion at this point."""


@dataclass(frozen=True)
class HyperPoint:
    theta: float
    s: float
    w: complex

    @property
    def w_abs(self) -> float:
        return abs(self.w)


@dataclass(frozen=True)
class FrameAtPoint:
    """Embedding value and orthogonal frame ``{iz, U, E1', E2'}`` at one point.

    ``E1p`` and ``E2p`` are ``None`` on the spine (``w = 0``), where ``R``
    vanishes.
    """

    z: np.ndarray
    sigma: float
    R: np.ndarray
    e: np.ndarray
    rho: float
    b: float
    U: np.ndarray
    xi_prime: np.ndarray
    E1p: np.ndarray | None
    E2p: np.ndarray | None
    on_spine: bool


@dataclass(frozen=True)
class ShapeData:
    alpha: float
    beta_signed: float
    A_prime: np.ndarray
    A: np.ndarray
    principal_curvatures: tuple
    on_spine: bool = False

    @property
    def beta(self) -> float:
        return abs(self.beta_signed)

    @property
    def mean_curvature(self) -> float:
        return float(np.trace(self.A))


def sigma(w, cfg: AmbientConfig) -> float:
    """Positive root of ``eps_t sigma^2 (1 + eps |w|^2) = 1``."""
    denom = 1.0 + cfg.epsilon * abs(w) ** 2
    s2 = cfg.epsilon_tilde / denom if denom != 0 else -1.0
    if not s2 > 0:
        raise ModelDomainError(
            f"outside model domain: |w| = {abs(w)!r} for (eps, eps_t) = "
            f"({cfg.epsilon}, {cfg.epsilon_tilde})"
        )
    return math.sqrt(s2)


def _as_point(pt) -> HyperPoint:
    if isinstance(pt, HyperPoint):
        return pt
    theta, s, w = pt
    return HyperPoint(float(theta), float(s), complex(w))


def evaluate_batch(curve, theta, s, w) -> dict:
    """Frame data for arrays of parameters (broadcast together).

    Returns a dict of arrays with keys ``z, R, e, sigma, rho, b, alpha,
    beta``. Points outside the model domain carry NaN.
    """
    theta, s, w = np.broadcast_arrays(
        np.asarray(theta, dtype=float), np.asarray(s, dtype=float), np.asarray(w, dtype=complex)
    )
    shape = theta.shape
    d, ds, dss = curve.evaluate_many(s.reshape(-1))
    cfg = curve.cfg
    out = frame_batch(d, ds, dss, theta.reshape(-1), w.reshape(-1),
                      cfg.epsilon, cfg.epsilon_tilde, cfg.r)
    keys = ("z", "R", "e", "sigma", "rho", "b", "alpha", "beta")
    res = {}
    for k, arr in zip(keys, out):
        arr = np.asarray(arr)
        res[k] = arr.reshape(shape + arr.shape[1:])
    return res


def _single(curve, pt: HyperPoint) -> dict:
    sigma(pt.w, curve.cfg)  # raises outside the model domain
    data = evaluate_batch(curve, [pt.theta], [pt.s], [pt.w])
    return {k: v[0] for k, v in data.items()}


def embed(curve, pt) -> np.ndarray:
    """The point ``z`` of the lifted hypersurface, with ``<z, z> = eps r^2``."""
    return _single(curve, _as_point(pt))["z"]


def frame(curve, pt) -> FrameAtPoint:
    """Adapted orthogonal frame at ``pt``; raises where rho = 0."""
    pt = _as_point(pt)
    d = _single(curve, pt)
    rho = float(d["rho"])
    if not rho > 0:
        raise NotImmersedError("not an immersion here")
    z, R, e = d["z"], d["R"], d["e"]
    U = e / rho
    on_spine = pt.w == 0
    if on_spine:
        E1p = E2p = None
    else:
        # rescale first: |R| ~ |w| underflows for subnormal w
        Rs = R / np.max(np.abs(R))
        E2p = Rs / math.sqrt(inner(Rs, Rs, curve.cfg))
        E1p = 1j * E2p
    return FrameAtPoint(z=z, sigma=float(d["sigma"]), R=R, e=e, rho=rho, b=float(d["b"]),
                        U=U, xi_prime=1j * U, E1p=E1p, E2p=E2p, on_spine=on_spine)


def alpha_beta(curve, s: float, w) -> tuple[float, float]:
    """``(alpha, beta_signed)`` at parameter ``(s, w)``; both are theta-independent."""
    d = _single(curve, HyperPoint(0.0, float(s), complex(w)))
    if not d["rho"] > 0:
        raise NotImmersedError("not an immersion here")
    return float(d["alpha"]), float(d["beta"])


def principal_curvatures(alpha: float, beta: float) -> tuple[float, float, float]:
    """Roots of ``-t (t^2 - alpha t - beta^2)``: ``(0, k_plus, k_minus)``."""
    root = math.sqrt(alpha * alpha + 4 * beta * beta)
    return 0.0, 0.5 * (alpha + root), 0.5 * (alpha - root)


def shape_matrices(alpha: float, beta: float, cfg: AmbientConfig):
    r = cfg.r
    A_prime = np.array([
        [0.0, cfg.epsilon / r, 0.0, 0.0],
        [1.0 / r, alpha, beta, 0.0],
        [0.0, beta, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0],
    ])
    A = np.array([[alpha, beta, 0.0], [beta, 0.0, 0.0], [0.0, 0.0, 0.0]])
    return A_prime, A


def shape_closed(curve, pt) -> ShapeData:
    """Closed-form shape operators.

    ``A_prime`` is the shape operator of the lifted hypersurface in the basis
    ``(iz/r, U, E1', E2')``; ``A`` the projected one in ``(W, E1, E2)``. On
    the spine the result has ``beta = 0`` and ``on_spine=True``.
    """
    pt = _as_point(pt)
    alpha, beta = alpha_beta(curve, pt.s, pt.w)
    A_prime, A = shape_matrices(alpha, beta, curve.cfg)
    return ShapeData(alpha, beta, A_prime, A, principal_curvatures(alpha, beta),
                     on_spine=pt.w == 0)


def ruling_plane(curve, s: float) -> tuple[np.ndarray, np.ndarray]:
    """Spanning pair ``(delta(s), v)`` of the lift of the extended ruling at ``s``."""
    ev = curve.evaluate(s)
    return ev.delta, curve.cfg.v


def w_from_polar(u, t, cfg: AmbientConfig):
    """``w`` from the polar chart ``(u, t)`` adapted to each case.

    CP^2: ``w = e^{it} tan u``; CH^2 with eps_t = 1: ``tanh u``; with
    eps_t = -1: ``coth u``.
    """
    u = np.asarray(u, dtype=float)
    if cfg.epsilon == 1:
        mod = np.tan(u)
    elif cfg.epsilon_tilde == 1:
        mod = np.tanh(u)
    else:
        mod = 1.0 / np.tanh(u)
    return mod * np.exp(1j * np.asarray(t, dtype=float))


def polar_from_w(w, cfg: AmbientConfig) -> tuple[float, float]:
    m = abs(w)
    if m == 0:
        raise ValueError("polar chart undefined on the spine")
    t = math.atan2(w.imag, w.real)
    if cfg.epsilon == 1:
        u = math.atan(m)
    elif cfg.epsilon_tilde == 1:
        u = math.atanh(m)
    else:
        u = math.atanh(1.0 / m)
    return u, t
