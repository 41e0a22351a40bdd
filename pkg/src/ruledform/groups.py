"""Two-parameter isometry groups preserving the constant-curvature examples.

``omega(kind, u)`` moves points along the spine family and ``theta(kind, v)``
rotates each ruling about the curve plane. The matrices are written out from
their action on the basis ``e0, e1, e2`` (column j is the image of e_j), and
deliberately do not reuse :func:`ruledform.curves.group_exp`, so that the
equivariance check compares two independent constructions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ambient import AmbientConfig, ProjPoint, horizontal_part, inner
from .curves import CurveFamily, FamilyKind
from .ruled import HyperPoint, _as_point, embed, evaluate_batch, frame


def _columns(img0, img1, img2) -> np.ndarray:
    return np.array([img0, img1, img2], dtype=complex).T


def omega(kind, u: float) -> np.ndarray:
    """Spine-direction isometry for family ``kind``."""
    kind = FamilyKind.parse(kind)
    if kind in (FamilyKind.CP2_CIRCLE, FamilyKind.CH2_CIRCLE):
        return _columns([np.exp(1j * u), 0, 0], [0, np.exp(-1j * u), 0], [0, 0, 1])
    if kind is FamilyKind.CH2_EQUIDISTANT:
        ch, sh = math.cosh(u), math.sinh(u)
        return _columns([ch, sh, 0], [sh, ch, 0], [0, 0, 1])
    if kind is FamilyKind.CH2_HOROCYCLE:
        return _columns([1 + 1j * u, 1j * u, 0], [-1j * u, 1 - 1j * u, 0], [0, 0, 1])
    c, s = math.cos(u), math.sin(u)
    return _columns([1, 0, 0], [0, c, 1j * s], [0, 1j * s, c])


def omega_generator(kind) -> np.ndarray:
    """d/du omega(kind, u) at u = 0."""
    kind = FamilyKind.parse(kind)
    if kind in (FamilyKind.CP2_CIRCLE, FamilyKind.CH2_CIRCLE):
        return _columns([1j, 0, 0], [0, -1j, 0], [0, 0, 0])
    if kind is FamilyKind.CH2_EQUIDISTANT:
        return _columns([0, 1, 0], [1, 0, 0], [0, 0, 0])
    if kind is FamilyKind.CH2_HOROCYCLE:
        return _columns([1j, 1j, 0], [-1j, -1j, 0], [0, 0, 0])
    return _columns([0, 0, 0], [0, 0, 1j], [0, 1j, 0])


def theta(kind, v: float) -> np.ndarray:
    """Rotation by phase ``e^{iv}`` on the axis orthogonal to the curve plane."""
    kind = FamilyKind.parse(kind)
    g = np.eye(3, dtype=complex)
    axis = 0 if kind is FamilyKind.CH2_EXTERIOR_CIRCLE else 2
    g[axis, axis] = np.exp(1j * v)
    return g


@dataclass(frozen=True)
class IsometryPair:
    kind: FamilyKind
    u: float
    v: float
    matrix: np.ndarray


def isometry_pair(kind, u: float, v: float) -> IsometryPair:
    kind = FamilyKind.parse(kind)
    return IsometryPair(kind, float(u), float(v), omega(kind, u) @ theta(kind, v))


def equivariance_residual(curve: CurveFamily, pt, u: float, v: float) -> float:
    """Euclidean norm of ``(Omega_u Theta_v) f(theta, s, w) - f(theta, s + u/lam, e^{iv} w)``."""
    pt = _as_point(pt)
    g = omega(curve.kind, u) @ theta(curve.kind, v)
    lhs = g @ embed(curve, pt)
    rhs = embed(curve, HyperPoint(pt.theta, pt.s + u / curve.lam, np.exp(1j * v) * pt.w))
    return float(np.linalg.norm(lhs - rhs))


def equivariance_residuals(curve: CurveFamily, theta_, s, w, u, v) -> np.ndarray:
    """Vectorised :func:`equivariance_residual` over broadcast arrays."""
    theta_, s, w, u, v = np.broadcast_arrays(
        np.asarray(theta_, float), np.asarray(s, float), np.asarray(w, complex),
        np.asarray(u, float), np.asarray(v, float))
    z = evaluate_batch(curve, theta_, s, w)["z"]
    moved = evaluate_batch(curve, theta_, s + u / curve.lam, np.exp(1j * v) * w)["z"]
    G = np.array([omega(curve.kind, uu) @ theta(curve.kind, vv)
                  for uu, vv in zip(u.reshape(-1), v.reshape(-1))]).reshape(u.shape + (3, 3))
    lhs = np.einsum("...ij,...j->...i", G, z)
    return np.linalg.norm(lhs - moved, axis=-1)


def orbit_tangent(curve: CurveFamily, pt) -> np.ndarray:
    """Initial velocity ``d/du (Omega_u z)`` at u = 0."""
    return omega_generator(curve.kind) @ embed(curve, pt)


def transversality_component(curve: CurveFamily, pt) -> float:
    """``<pi_* T, W>`` for the orbit tangent ``T``; equals rho / lam."""
    pt = _as_point(pt)
    fr = frame(curve, pt)
    T = horizontal_part(fr.z, orbit_tangent(curve, pt), curve.cfg)
    return float(inner(T, fr.U, curve.cfg))


def transversality_margin(curve: CurveFamily, pt) -> float:
    """Cosine of the angle between the projected orbit tangent and ``W``.

    Strictly positive exactly when the orbit is transverse to the ruling.
    """
    pt = _as_point(pt)
    cfg = curve.cfg
    fr = frame(curve, pt)
    T = horizontal_part(fr.z, orbit_tangent(curve, pt), cfg)
    nT = math.sqrt(inner(T, T, cfg))
    nW = math.sqrt(inner(fr.U, fr.U, cfg))
    return min(1.0, abs(float(inner(T, fr.U, cfg))) / (nT * nW))


def orbit_sample(curve: CurveFamily, pt, grid) -> list[ProjPoint]:
    """Projective points ``pi((Omega_u Theta_v) z)`` for each ``(u, v)`` in ``grid``.

    Output order matches ``grid``; duplicates are kept.
    """
    z = embed(curve, pt)
    out = []
    for u, v in grid:
        g = omega(curve.kind, u) @ theta(curve.kind, v)
        out.append(ProjPoint(g @ z, cfg=curve.cfg))
    return out


def orbit_parameters(curve: CurveFamily, pt, u: float, v: float) -> HyperPoint:
    """Parameters of the image of ``pt`` under ``Omega_u Theta_v``."""
    pt = _as_point(pt)
    return HyperPoint(pt.theta, pt.s + u / curve.lam, complex(np.exp(1j * v) * pt.w))


def orbit_invariant_variation(curve: CurveFamily, pt, grid) -> float:
    """Largest change of ``(alpha, beta)`` across the orbit nodes of ``grid``.

    Each node's parameters come from inverting the equivariance identity;
    nodes are also checked to coincide with the embedding there.
    """
    pt = _as_point(pt)
    grid = list(grid)
    if not grid:
        raise ValueError("empty grid")
    nodes = [orbit_parameters(curve, pt, u, v) for u, v in grid]
    data = evaluate_batch(curve, [n.theta for n in nodes], [n.s for n in nodes],
                          [n.w for n in nodes])
    base = evaluate_batch(curve, [pt.theta], [pt.s], [pt.w])
    da = np.max(np.abs(data["alpha"] - base["alpha"][0]))
    db = np.max(np.abs(data["beta"] - base["beta"][0]))
    return float(max(da, db))


def form_residual(g: np.ndarray, cfg: AmbientConfig) -> float:
    from .ambient import form_preservation_residual

    return form_preservation_residual(g, cfg)
