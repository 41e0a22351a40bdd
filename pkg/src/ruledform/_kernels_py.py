"""Pure NumPy batch evaluation of the ruled-hypersurface frame.

Fallback for the compiled ``_kernels`` extension; both return the same tuple
for the same inputs.
"""

import numpy as np


def frame_batch(delta, delta_s, delta_ss, theta, w, eps, eps_t, r):
    """Embedding, frame vectors and shape scalars at ``n`` parameter points.

    Parameters
    ----------
    delta, delta_s, delta_ss : (n, 3) complex
        Curve value and derivatives at each point's ``s``.
    theta : (n,) float
    w : (n,) complex
    eps, eps_t : int
        Signs of the space form and of the normal axis ``v``.
    r : float

    Returns
    -------
    z, R, e : (n, 3) complex
        Embedded point, the radial field ``w1 z_w1 + w2 z_w2`` and the
        component of ``z_s`` orthogonal to ``iz, R, iR``.
    sigma, rho, b, alpha, beta : (n,) float
        ``sigma`` is NaN outside the model domain; ``alpha`` is NaN where
        ``rho = 0``.
    """
    delta = np.asarray(delta, dtype=complex)
    delta_s = np.asarray(delta_s, dtype=complex)
    delta_ss = np.asarray(delta_ss, dtype=complex)
    theta = np.asarray(theta, dtype=float)
    w = np.asarray(w, dtype=complex)
    metric = np.array([eps, 1.0, 1.0])
    ee = eps * eps_t
    vi = 2 if eps_t == 1 else 0

    def re_h(a, b):
        return np.sum(metric * a * np.conj(b), axis=-1).real

    w2 = w.real**2 + w.imag**2
    s2 = eps_t / (1.0 + eps * w2)
    with np.errstate(invalid="ignore"):
        sigma = np.where(s2 > 0, np.sqrt(np.where(s2 > 0, s2, 0.0)), np.nan)
    ph = np.exp(1j * theta)[:, None]
    lifted = delta.copy()
    lifted[:, vi] += w * r
    z = ph * sigma[:, None] * lifted
    R = (eps_t * (s2 - eps_t))[:, None] * z
    R[:, vi] += ph[:, 0] * r * sigma * w
    b = re_h(delta_s, 1j * delta) / r**2
    e = ph * sigma[:, None] * (delta_s - (ee * b)[:, None] * 1j * delta)
    dsds = re_h(delta_s, delta_s)
    fac = dsds - ee * b**2 * r**2
    rho = np.where(fac > 0, sigma * np.sqrt(np.maximum(fac, 0.0)), 0.0)
    num = re_h(delta_ss, 1j * delta_s) - ee * b * dsds
    with np.errstate(divide="ignore", invalid="ignore"):
        alpha = np.where(rho > 0, (num / fac - 2 * ee * b) / rho, np.nan)
    beta = -ee * np.abs(w) / r
    return z, R, e, sigma, rho, b, alpha, beta
