# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner-loop kernels.

Mirrors the API of ``_numpy.py``.  The tridiagonal solve is a plain Thomas
sweep (no pivoting), valid for the diagonally dominant SPD operators
assembled by this package.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, pow

cnp.import_array()

BACKEND = "compiled"


def tridiag_solve(double[::1] dl, double[::1] d, double[::1] du, double[::1] b):
    cdef Py_ssize_t n = d.shape[0]
    cdef cnp.ndarray[double, ndim=1] x_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] x = x_arr
    cdef cnp.ndarray[double, ndim=1] cp_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] cp = cp_arr
    cdef Py_ssize_t i
    cdef double m, denom

    denom = d[0]
    cp[0] = du[0] / denom if n > 1 else 0.0
    x[0] = b[0] / denom
    for i in range(1, n):
        m = dl[i - 1]
        denom = d[i] - m * cp[i - 1]
        if i < n - 1:
            cp[i] = du[i] / denom
        x[i] = (b[i] - m * x[i - 1]) / denom
    for i in range(n - 2, -1, -1):
        x[i] -= cp[i] * x[i + 1]
    return x_arr


def tridiag_mv(double[::1] dl, double[::1] d, double[::1] du, double[::1] x):
    cdef Py_ssize_t n = d.shape[0]
    cdef cnp.ndarray[double, ndim=1] y_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] y = y_arr
    cdef Py_ssize_t i
    for i in range(n):
        y[i] = d[i] * x[i]
        if i > 0:
            y[i] += dl[i - 1] * x[i - 1]
        if i < n - 1:
            y[i] += du[i] * x[i + 1]
    return y_arr


def cell_energy(double[::1] u, double[::1] g):
    cdef Py_ssize_t i, n = g.shape[0]
    cdef double acc = 0.0, du
    for i in range(n):
        du = u[i + 1] - u[i]
        acc += g[i] * du * du
    return acc


def cell_inner(double[::1] u, double[::1] v, double[::1] g):
    cdef Py_ssize_t i, n = g.shape[0]
    cdef double acc = 0.0
    # parenthesized for exact symmetry under u <-> v
    for i in range(n):
        acc += g[i] * ((u[i + 1] - u[i]) * (v[i + 1] - v[i]))
    return acc


def wsum2(double[::1] u, double[::1] w):
    cdef Py_ssize_t i, n = u.shape[0]
    cdef double acc = 0.0
    for i in range(n):
        acc += w[i] * u[i] * u[i]
    return acc


def winner(double[::1] u, double[::1] v, double[::1] w):
    cdef Py_ssize_t i, n = u.shape[0]
    cdef double acc = 0.0
    # parenthesized for exact symmetry under u <-> v
    for i in range(n):
        acc += w[i] * (u[i] * v[i])
    return acc


def wabspow(double[::1] u, double[::1] w, double q):
    cdef Py_ssize_t i, n = u.shape[0]
    cdef double acc = 0.0
    for i in range(n):
        if w[i] != 0.0:
            acc += w[i] * pow(fabs(u[i]), q)
    return acc


def wpospow(double[::1] u, double[::1] w, double q):
    cdef Py_ssize_t i, n = u.shape[0]
    cdef double acc = 0.0
    for i in range(n):
        if u[i] > 0.0 and w[i] != 0.0:
            acc += w[i] * pow(u[i], q)
    return acc


def minpow_f(double[::1] u, double q1, double q2):
    cdef Py_ssize_t i, n = u.shape[0]
    cdef cnp.ndarray[double, ndim=1] out_arr = np.zeros(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double t, a, b
    for i in range(n):
        t = u[i]
        if t > 0.0:
            a = pow(t, q1 - 1.0)
            b = pow(t, q2 - 1.0)
            out[i] = a if a < b else b
    return out_arr


def minpow_F(double[::1] u, double[::1] w, double q1, double q2):
    cdef double qm = q1 if q1 <= q2 else q2
    cdef double qM = q2 if q1 <= q2 else q1
    cdef Py_ssize_t i, n = u.shape[0]
    cdef double acc = 0.0, t
    for i in range(n):
        t = u[i]
        if t <= 0.0 or w[i] == 0.0:
            continue
        if t <= 1.0:
            acc += w[i] * pow(t, qM) / qM
        else:
            acc += w[i] * (1.0 / qM + (pow(t, qm) - 1.0) / qm)
    return acc


def minpow_fu(double[::1] u, double[::1] w, double lam, double q1, double q2):
    cdef Py_ssize_t i, n = u.shape[0]
    cdef double acc = 0.0, t, a, b
    for i in range(n):
        if u[i] > 0.0 and w[i] != 0.0:
            t = lam * u[i]
            a = pow(t, q1 - 1.0)
            b = pow(t, q2 - 1.0)
            acc += w[i] * (a if a < b else b) * u[i]
    return acc
