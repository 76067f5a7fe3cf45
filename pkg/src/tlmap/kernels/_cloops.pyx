# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled simulation kernels (hot per-sample recursions)."""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def ss_simulate(double[:, ::1] A, double[::1] B, double[::1] C, double D,
                double[::1] u, double[::1] x0):
    """Run the discrete state recursion x+ = A x + B u, y = C x + D u."""
    cdef Py_ssize_t n_samples = u.shape[0]
    cdef Py_ssize_t n = x0.shape[0]
    cdef cnp.ndarray[double, ndim=1] y_arr = np.empty(n_samples)
    cdef double[::1] y = y_arr
    cdef double[::1] x = np.array(x0, dtype=np.float64)
    cdef double[::1] xn = np.empty(n)
    cdef double acc, uk
    cdef Py_ssize_t k, i, j
    for k in range(n_samples):
        uk = u[k]
        acc = D * uk
        for i in range(n):
            acc += C[i] * x[i]
        y[k] = acc
        for i in range(n):
            acc = B[i] * uk
            for j in range(n):
                acc += A[i, j] * x[j]
            xn[i] = acc
        x[:] = xn
    return y_arr


def arx_free_run(double[::1] a, double[::1] b, Py_ssize_t reldeg,
                 double[::1] u, double[::1] y_init):
    """Free-run ARX recursion: y(k) = sum a_i y(k-i) + sum b_j u(k-reldeg-j)."""
    cdef Py_ssize_t n = u.shape[0]
    cdef Py_ssize_t na = a.shape[0]
    cdef Py_ssize_t nb = b.shape[0]
    cdef Py_ssize_t k0 = y_init.shape[0]
    if k0 < max(na, reldeg + nb - 1):
        raise ValueError("y_init shorter than the maximum lag")
    cdef cnp.ndarray[double, ndim=1] y_arr = np.empty(n)
    cdef double[::1] y = y_arr
    cdef double acc
    cdef Py_ssize_t k, i, j
    for k in range(k0):
        y[k] = y_init[k]
    for k in range(k0, n):
        acc = 0.0
        for i in range(na):
            acc += a[i] * y[k - 1 - i]
        for j in range(nb):
            acc += b[j] * u[k - reldeg - j]
        y[k] = acc
    return y_arr


def allpole_filter(double[::1] a, double[::1] x):
    """Filter x through 1/A(z), zero prehistory."""
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t na = a.shape[0]
    cdef cnp.ndarray[double, ndim=1] v_arr = np.empty(n)
    cdef double[::1] v = v_arr
    cdef double acc
    cdef Py_ssize_t k, i, m
    for k in range(n):
        acc = x[k]
        m = na if na < k else k
        for i in range(m):
            acc += a[i] * v[k - 1 - i]
        v[k] = acc
    return v_arr
