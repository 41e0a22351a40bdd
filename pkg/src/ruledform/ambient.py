"""Linear algebra on C^3 carrying a (possibly indefinite) Hermitian form.

Vectors are plain ``numpy`` complex arrays of shape ``(3,)`` (or ``(..., 3)``
for batches), read against the standard basis ``e0, e1, e2``. The form is

    h(z, w) = eps * z0 * conj(w0) + z1 * conj(w1) + z2 * conj(w2)

and the real inner product is ``<z, w> = Re h(z, w)``. Multiplication by
``1j`` is the complex structure.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

CVec = np.ndarray  # complex, shape (3,)

E0 = np.array([1.0, 0.0, 0.0], dtype=complex)
E1 = np.array([0.0, 1.0, 0.0], dtype=complex)
E2 = np.array([0.0, 0.0, 1.0], dtype=complex)
BASIS = (E0, E1, E2)


class NullBasepointError(ValueError):
    """Raised when a construction needs <z, z> != 0 but got a null vector."""


@dataclass(frozen=True)
class AmbientConfig:
    """Sign data and scale fixing the space form.

    ``epsilon = +1`` gives CP^2, ``epsilon = -1`` gives CH^2.
    ``epsilon_tilde`` is <v, v> for the unit vector v orthogonal to the
    plane carrying the base curve.
    """

    epsilon: int
    epsilon_tilde: int
    r: float = 1.0
    c: float = field(init=False)

    def __post_init__(self):
        if self.epsilon not in (1, -1) or self.epsilon_tilde not in (1, -1):
            raise ValueError("epsilon and epsilon_tilde must be +1 or -1")
        if self.epsilon == 1 and self.epsilon_tilde != 1:
            raise ValueError("epsilon = +1 requires epsilon_tilde = +1")
        if not (self.r > 0 and np.isfinite(self.r)):
            raise ValueError(f"scale r must be positive, got {self.r!r}")
        object.__setattr__(self, "r", float(self.r))
        object.__setattr__(self, "c", self.epsilon / self.r**2)

    @property
    def metric_diag(self) -> np.ndarray:
        return np.array([self.epsilon, 1.0, 1.0])

    @property
    def v(self) -> CVec:
        """Unit vector orthogonal to the curve plane (e2 or e0)."""
        return (E2 if self.epsilon_tilde == 1 else E0).copy()

    @property
    def v_index(self) -> int:
        return 2 if self.epsilon_tilde == 1 else 0


CP2 = AmbientConfig(1, 1)
CH2_INTERIOR = AmbientConfig(-1, 1)
CH2_EXTERIOR = AmbientConfig(-1, -1)


def hermitian(z, w, cfg: AmbientConfig):
    """h(z, w), vectorised over leading axes."""
    z = np.asarray(z)
    w = np.asarray(w)
    return np.sum(cfg.metric_diag * z * np.conj(w), axis=-1)


def inner(z, w, cfg: AmbientConfig):
    """Real inner product Re h(z, w)."""
    return hermitian(z, w, cfg).real


def sqnorm(z, cfg: AmbientConfig):
    return inner(z, z, cfg)


def horizontal_part(z, X, cfg: AmbientConfig) -> CVec:
    """Remove from ``X`` its components along ``z`` and ``iz``.

    The result is orthogonal to the fibre direction of the projectivization
    at ``z``.
    """
    z = np.asarray(z, dtype=complex)
    X = np.asarray(X, dtype=complex)
    zz = inner(z, z, cfg)
    if np.any(np.abs(zz) <= 1e-300):
        raise NullBasepointError("null basepoint")
    a = np.asarray(inner(X, z, cfg) / zz)[..., None]
    b = np.asarray(inner(X, 1j * z, cfg) / zz)[..., None]
    return X - a * z - b * (1j * z)


@dataclass(frozen=True)
class ProjPoint:
    """A point of CP^2 given by a nonzero representative."""

    representative: np.ndarray
    level: float = field(init=False)
    cfg: AmbientConfig = CP2

    def __post_init__(self):
        rep = np.asarray(self.representative, dtype=complex).reshape(3)
        if not np.any(rep):
            raise ValueError("zero representative")
        object.__setattr__(self, "representative", rep)
        object.__setattr__(self, "level", float(inner(rep, rep, self.cfg)))


def proj(z, cfg: AmbientConfig = CP2) -> ProjPoint:
    return ProjPoint(np.asarray(z, dtype=complex), cfg=cfg)


def _rep(p) -> np.ndarray:
    rep = p.representative if isinstance(p, ProjPoint) else np.asarray(p, dtype=complex)
    norm = np.linalg.norm(rep)
    if norm == 0:
        raise ValueError("zero representative")
    return rep / norm


def coincide_residual(p, q) -> float:
    """Largest modulus of the 2x2 minors of [p | q] with unit columns.

    Zero exactly when ``p`` and ``q`` are the same projective point. Uses the
    Euclidean norm for scaling so null representatives are fine.
    """
    a = _rep(p)
    b = _rep(q)
    minors = (
        a[0] * b[1] - a[1] * b[0],
        a[0] * b[2] - a[2] * b[0],
        a[1] * b[2] - a[2] * b[1],
    )
    return float(max(abs(m) for m in minors))


def as_real(z) -> np.ndarray:
    """(..., 3) complex -> (..., 6) real, ordered (Re z0, Im z0, Re z1, ...)."""
    z = np.asarray(z, dtype=complex)
    out = np.empty(z.shape[:-1] + (6,))
    out[..., 0::2] = z.real
    out[..., 1::2] = z.imag
    return out


def real_metric(cfg: AmbientConfig) -> np.ndarray:
    """Gram matrix of <,> in the real coordinates of :func:`as_real`."""
    return np.diag(np.repeat(cfg.metric_diag, 2))


def form_preservation_residual(g: np.ndarray, cfg: AmbientConfig) -> float:
    """max |g^H H g - H| for the Hermitian Gram matrix H = diag(eps, 1, 1)."""
    H = np.diag(cfg.metric_diag).astype(complex)
    return float(np.max(np.abs(g.conj().T @ H @ g - H)))
