# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled elementwise objective kernels.

Mirrors kernels._reference exactly; fuses the elementwise passes into single
C loops so per-call overhead stays flat for the small matrices (K <= 64)
this package targets.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()

BACKEND_NAME = "cython"


def reg_value(const double[:, ::1] X, double rho, double eps):
    cdef Py_ssize_t K = X.shape[0]
    cdef Py_ssize_t i, j
    cdef double diag_pen = 0.0, l1 = 0.0, d, v
    cdef double e2 = eps * eps
    for i in range(K):
        d = X[i, i] - 1.0
        diag_pen += d * d
        for j in range(K):
            v = X[i, j]
            l1 += sqrt(v * v + e2)
    return 0.5 * diag_pen + rho * l1


def reg_gmat(const double[:, ::1] X, double rho, double eps):
    cdef Py_ssize_t K = X.shape[0]
    G_arr = np.empty((K, K), dtype=np.float64)
    cdef double[:, ::1] G = G_arr
    cdef Py_ssize_t i, j
    cdef double v
    cdef double e2 = eps * eps
    for i in range(K):
        for j in range(K):
            v = X[i, j]
            G[i, j] = rho * v / sqrt(v * v + e2)
        G[i, i] += X[i, i] - 1.0
    return G_arr


def reg_gdot(const double[:, ::1] X, const double[:, ::1] Xdot, double rho, double eps):
    cdef Py_ssize_t K = X.shape[0]
    G_arr = np.empty((K, K), dtype=np.float64)
    cdef double[:, ::1] G = G_arr
    cdef Py_ssize_t i, j
    cdef double v, t
    cdef double e2 = eps * eps
    for i in range(K):
        for j in range(K):
            v = X[i, j]
            t = v * v + e2
            G[i, j] = rho * e2 * Xdot[i, j] / (t * sqrt(t))
        G[i, i] += Xdot[i, i]
    return G_arr


def ref_value(const double[:, ::1] X, const double[:, ::1] zero_mask):
    cdef Py_ssize_t K = X.shape[0]
    cdef Py_ssize_t i, j
    cdef double diag_pen = 0.0, comp = 0.0, d, v
    for i in range(K):
        d = X[i, i] - 1.0
        diag_pen += d * d
        for j in range(K):
            v = zero_mask[i, j] * X[i, j]
            comp += v * v
    return 0.5 * diag_pen + 0.5 * comp


def ref_gmat(const double[:, ::1] X, const double[:, ::1] zero_mask):
    cdef Py_ssize_t K = X.shape[0]
    G_arr = np.empty((K, K), dtype=np.float64)
    cdef double[:, ::1] G = G_arr
    cdef Py_ssize_t i, j
    for i in range(K):
        for j in range(K):
            G[i, j] = zero_mask[i, j] * X[i, j]
        G[i, i] += X[i, i] - 1.0
    return G_arr


def ref_gdot(const double[:, ::1] Xdot, const double[:, ::1] zero_mask):
    cdef Py_ssize_t K = Xdot.shape[0]
    G_arr = np.empty((K, K), dtype=np.float64)
    cdef double[:, ::1] G = G_arr
    cdef Py_ssize_t i, j
    for i in range(K):
        for j in range(K):
            G[i, j] = zero_mask[i, j] * Xdot[i, j]
        G[i, i] += Xdot[i, i]
    return G_arr
