# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled pairwise Kelvin kernels; mirrors ``_kernels_py``."""

import numpy as np

from libc.math cimport log, M_PI


cdef inline void _consts(double lam, double mu, double* a, double* b) noexcept nogil:
    a[0] = 0.5 * (1.0 / mu + 1.0 / (2.0 * mu + lam)) / (2.0 * M_PI)
    b[0] = 0.5 * (1.0 / mu - 1.0 / (2.0 * mu + lam)) / (2.0 * M_PI)


def single_layer_matrix(double lam, double mu, const double[:, ::1] tgt,
                        const double[:, ::1] src, const double[::1] w):
    cdef Py_ssize_t m = tgt.shape[0], n = src.shape[0], i, j
    cdef double a, b, r0, r1, r2, lg, s
    _consts(lam, mu, &a, &b)
    out_arr = np.zeros((2 * m, 2 * n))
    cdef double[:, ::1] out = out_arr
    with nogil:
        for i in range(m):
            for j in range(n):
                r0 = tgt[i, 0] - src[j, 0]
                r1 = tgt[i, 1] - src[j, 1]
                r2 = r0 * r0 + r1 * r1
                if r2 == 0.0:
                    continue
                lg = a * 0.5 * log(r2) * w[j]
                s = b * w[j] / r2
                out[2 * i, 2 * j] = lg - s * r0 * r0
                out[2 * i, 2 * j + 1] = -s * r0 * r1
                out[2 * i + 1, 2 * j] = -s * r0 * r1
                out[2 * i + 1, 2 * j + 1] = lg - s * r1 * r1
    return out_arr


cdef inline void _traction(double c0, double c1, double r0, double r1, double r2,
                           double n0, double n1, double* t) noexcept nogil:
    cdef double rn = (r0 * n0 + r1 * n1) / r2
    cdef double cr = (r0 * n1 - r1 * n0) / r2
    cdef double q = c1 * rn / r2
    t[0] = c0 * rn + q * r0 * r0
    t[1] = c0 * cr + q * r0 * r1
    t[2] = -c0 * cr + q * r0 * r1
    t[3] = c0 * rn + q * r1 * r1


def traction_matrix(double lam, double mu, const double[:, ::1] tgt,
                    const double[:, ::1] tnrm, const double[:, ::1] src,
                    const double[::1] w):
    cdef Py_ssize_t m = tgt.shape[0], n = src.shape[0], i, j
    cdef double c0 = mu / (2.0 * M_PI * (2.0 * mu + lam))
    cdef double c1 = (mu + lam) / (M_PI * (2.0 * mu + lam))
    cdef double r0, r1, r2
    cdef double t[4]
    out_arr = np.zeros((2 * m, 2 * n))
    cdef double[:, ::1] out = out_arr
    with nogil:
        for i in range(m):
            for j in range(n):
                r0 = tgt[i, 0] - src[j, 0]
                r1 = tgt[i, 1] - src[j, 1]
                r2 = r0 * r0 + r1 * r1
                if r2 == 0.0:
                    continue
                _traction(c0, c1, r0, r1, r2, tnrm[i, 0], tnrm[i, 1], t)
                out[2 * i, 2 * j] = t[0] * w[j]
                out[2 * i, 2 * j + 1] = t[1] * w[j]
                out[2 * i + 1, 2 * j] = t[2] * w[j]
                out[2 * i + 1, 2 * j + 1] = t[3] * w[j]
    return out_arr


def double_layer_matrix(double lam, double mu, const double[:, ::1] tgt,
                        const double[:, ::1] src, const double[:, ::1] snrm,
                        const double[::1] w):
    cdef Py_ssize_t m = tgt.shape[0], n = src.shape[0], i, j
    cdef double c0 = mu / (2.0 * M_PI * (2.0 * mu + lam))
    cdef double c1 = (mu + lam) / (M_PI * (2.0 * mu + lam))
    cdef double r0, r1, r2
    cdef double t[4]
    out_arr = np.zeros((2 * m, 2 * n))
    cdef double[:, ::1] out = out_arr
    with nogil:
        for i in range(m):
            for j in range(n):
                r0 = src[j, 0] - tgt[i, 0]
                r1 = src[j, 1] - tgt[i, 1]
                r2 = r0 * r0 + r1 * r1
                if r2 == 0.0:
                    continue
                _traction(c0, c1, r0, r1, r2, snrm[j, 0], snrm[j, 1], t)
                out[2 * i, 2 * j] = t[0] * w[j]
                out[2 * i, 2 * j + 1] = t[2] * w[j]
                out[2 * i + 1, 2 * j] = t[1] * w[j]
                out[2 * i + 1, 2 * j + 1] = t[3] * w[j]
    return out_arr


def single_layer_apply(double lam, double mu, const double[:, ::1] tgt,
                       const double[:, ::1] src, const double[:, ::1] wphi,
                       bint with_grad):
    cdef Py_ssize_t m = tgt.shape[0], n = src.shape[0], i, j
    cdef double a, b, r0, r1, r2, inv, lg, f0, f1, rf
    cdef double v0, v1, g00, g01, g10, g11
    _consts(lam, mu, &a, &b)
    vals_arr = np.zeros((m, 2))
    cdef double[:, ::1] vals = vals_arr
    grads_arr = np.zeros((m, 2, 2)) if with_grad else None
    cdef double[:, :, ::1] grads
    if with_grad:
        grads = grads_arr
    with nogil:
        for i in range(m):
            v0 = 0.0
            v1 = 0.0
            g00 = 0.0
            g01 = 0.0
            g10 = 0.0
            g11 = 0.0
            for j in range(n):
                r0 = tgt[i, 0] - src[j, 0]
                r1 = tgt[i, 1] - src[j, 1]
                r2 = r0 * r0 + r1 * r1
                if r2 == 0.0:
                    continue
                inv = 1.0 / r2
                f0 = wphi[j, 0]
                f1 = wphi[j, 1]
                lg = a * 0.5 * log(r2)
                rf = (r0 * f0 + r1 * f1) * inv
                v0 += lg * f0 - b * r0 * rf
                v1 += lg * f1 - b * r1 * rf
                if with_grad:
                    g00 += a * f0 * r0 * inv - b * (rf + r0 * f0 * inv - 2.0 * r0 * rf * r0 * inv)
                    g01 += a * f0 * r1 * inv - b * (r0 * f1 * inv - 2.0 * r0 * rf * r1 * inv)
                    g10 += a * f1 * r0 * inv - b * (r1 * f0 * inv - 2.0 * r1 * rf * r0 * inv)
                    g11 += a * f1 * r1 * inv - b * (rf + r1 * f1 * inv - 2.0 * r1 * rf * r1 * inv)
            vals[i, 0] = v0
            vals[i, 1] = v1
            if with_grad:
                grads[i, 0, 0] = g00
                grads[i, 0, 1] = g01
                grads[i, 1, 0] = g10
                grads[i, 1, 1] = g11
    return vals_arr, grads_arr
