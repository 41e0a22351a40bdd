# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled batch evaluation of the ruled-hypersurface frame.

Mirrors :mod:`ruledform._kernels_py` exactly; see that module for the
meaning of each output array.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, cos, sin, NAN

cnp.import_array()


cdef inline double re_h(double complex a0, double complex a1, double complex a2,
                        double complex b0, double complex b1, double complex b2,
                        double eps) nogil:
    return (eps * (a0 * b0.conjugate()) + a1 * b1.conjugate() + a2 * b2.conjugate()).real


def frame_batch(double complex[:, ::1] delta,
                double complex[:, ::1] delta_s,
                double complex[:, ::1] delta_ss,
                double[::1] theta,
                double complex[::1] w,
                int eps, int eps_t, double r):
    cdef Py_ssize_t n = delta.shape[0]
    cdef Py_ssize_t i, k
    cdef int vi = 2 if eps_t == 1 else 0
    cdef double e_ = eps, et = eps_t, ee = eps * eps_t, r2 = r * r

    z_arr = np.empty((n, 3), dtype=np.complex128)
    R_arr = np.empty((n, 3), dtype=np.complex128)
    e_arr = np.empty((n, 3), dtype=np.complex128)
    sig_arr = np.empty(n)
    rho_arr = np.empty(n)
    b_arr = np.empty(n)
    al_arr = np.empty(n)
    be_arr = np.empty(n)
    cdef double complex[:, ::1] z = z_arr
    cdef double complex[:, ::1] R = R_arr
    cdef double complex[:, ::1] e = e_arr
    cdef double[::1] sig = sig_arr
    cdef double[::1] rho = rho_arr
    cdef double[::1] bb = b_arr
    cdef double[::1] al = al_arr
    cdef double[::1] be = be_arr

    cdef double w2, s2, s, b, dsds, fac, num, rh, absw
    cdef double complex ph, d0, d1, d2, p0, p1, p2, q0, q1, q2, c0, c1, c2, wv
    cdef double complex I = 1j

    with nogil:
        for i in range(n):
            w2 = w[i].real * w[i].real + w[i].imag * w[i].imag
            absw = sqrt(w2)
            s2 = et / (1.0 + e_ * w2)
            if not (s2 > 0.0):
                s = NAN
            else:
                s = sqrt(s2)
            sig[i] = s
            ph = cos(theta[i]) + I * sin(theta[i])
            d0 = delta[i, 0]; d1 = delta[i, 1]; d2 = delta[i, 2]
            p0 = delta_s[i, 0]; p1 = delta_s[i, 1]; p2 = delta_s[i, 2]
            q0 = delta_ss[i, 0]; q1 = delta_ss[i, 1]; q2 = delta_ss[i, 2]
            wv = w[i] * r
            if vi == 0:
                d0 = d0 + wv
            else:
                d2 = d2 + wv
            z[i, 0] = ph * s * d0
            z[i, 1] = ph * s * d1
            z[i, 2] = ph * s * d2
            c0 = et * (s2 - et)
            R[i, 0] = c0 * z[i, 0]
            R[i, 1] = c0 * z[i, 1]
            R[i, 2] = c0 * z[i, 2]
            R[i, vi] = R[i, vi] + ph * r * s * w[i]
            d0 = delta[i, 0]; d2 = delta[i, 2]
            # b = <delta_s, i delta>/r^2
            b = re_h(p0, p1, p2, I * d0, I * d1, I * d2, e_) / r2
            bb[i] = b
            e[i, 0] = ph * s * (p0 - ee * b * I * d0)
            e[i, 1] = ph * s * (p1 - ee * b * I * d1)
            e[i, 2] = ph * s * (p2 - ee * b * I * d2)
            dsds = re_h(p0, p1, p2, p0, p1, p2, e_)
            fac = dsds - ee * b * b * r2
            if fac > 0.0:
                rh = s * sqrt(fac)
            else:
                rh = 0.0
            rho[i] = rh
            num = re_h(q0, q1, q2, I * p0, I * p1, I * p2, e_) - ee * b * dsds
            if rh > 0.0:
                al[i] = (num / fac - 2.0 * ee * b) / rh
            else:
                al[i] = NAN
            be[i] = -ee * absw / r
    return z_arr, R_arr, e_arr, sig_arr, rho_arr, b_arr, al_arr, be_arr
