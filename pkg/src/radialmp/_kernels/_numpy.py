"""Pure-numpy implementations of the hot inner-loop kernels.

Same call signatures as the compiled backend in ``_core.pyx``.  All reductions
assume float64 1-D arrays; the tridiagonal solve assumes a diagonally
dominant (in practice SPD) matrix, which the discrete energy operator is.
"""

import numpy as np
from scipy.linalg import solve_banded

BACKEND = "numpy"


def tridiag_solve(dl, d, du, b):
    """Solve T x = b for tridiagonal T (dl: sub, d: main, du: super)."""
    n = d.shape[0]
    ab = np.zeros((3, n))
    ab[0, 1:] = du
    ab[1, :] = d
    ab[2, :-1] = dl
    return solve_banded((1, 1), ab, b)


def tridiag_mv(dl, d, du, x):
    """y = T x for tridiagonal T."""
    y = d * x
    y[:-1] += du * x[1:]
    y[1:] += dl * x[:-1]
    return y


def cell_energy(u, g):
    """sum_i g_i (u_{i+1} - u_i)^2 over cells."""
    du = np.diff(u)
    return float(np.dot(g, du * du))


def cell_inner(u, v, g):
    """sum_i g_i (u_{i+1} - u_i) (v_{i+1} - v_i)."""
    return float(np.dot(g, np.diff(u) * np.diff(v)))


def wsum2(u, w):
    """sum_j w_j u_j^2."""
    return float(np.dot(w, u * u))


def winner(u, v, w):
    """sum_j w_j u_j v_j."""
    return float(np.dot(w, u * v))


def wabspow(u, w, q):
    """sum_j w_j |u_j|^q."""
    return float(np.dot(w, np.abs(u) ** q))


def wpospow(u, w, q):
    """sum_j w_j max(u_j, 0)^q."""
    return float(np.dot(w, np.maximum(u, 0.0) ** q))


def minpow_f(u, q1, q2):
    """Elementwise f(t) = min{t^(q1-1), t^(q2-1)} for t >= 0, zero for t < 0."""
    t = np.maximum(u, 0.0)
    return np.minimum(t ** (q1 - 1.0), t ** (q2 - 1.0))


def minpow_F(u, w, q1, q2):
    """sum_j w_j F(u_j) for the exact min-power primitive (zero extension).

    With qm = min(q1,q2), qM = max(q1,q2) and crossover at t = 1:
        F(t) = t^qM / qM                     for 0 <= t <= 1
        F(t) = 1/qM + (t^qm - 1)/qm          for t > 1
    """
    qm, qM = (q1, q2) if q1 <= q2 else (q2, q1)
    t = np.maximum(u, 0.0)
    F = np.where(t <= 1.0, t ** qM / qM, 1.0 / qM + (t ** qm - 1.0) / qm)
    return float(np.dot(w, F))


def minpow_fu(u, w, lam, q1, q2):
    """sum_j w_j f(lam * u_j) u_j with the zero-extended min-power f."""
    t = lam * np.maximum(u, 0.0)
    fu = np.minimum(t ** (q1 - 1.0), t ** (q2 - 1.0))
    return float(np.dot(w, fu * np.maximum(u, 0.0)))
