# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled numeric core.

Mirror of ``rkstab._core_py``. Both cores keep every floating-point
expression in the same order so their results agree bit for bit on one
platform (the build disables FP contraction for the same reason); edit the
two files together.
"""

import numpy as np

from libc.math cimport acos, asin, sqrt, M_PI

from rkstab.base import DomainError

KIND_ERF, KIND_SIGN, KIND_RELU = 0, 1, 2

cdef double _TWO_PI = 2.0 * M_PI


cdef inline double _clamp1(double v) nogil:
    if v > 1.0:
        return 1.0
    if v < -1.0:
        return -1.0
    return v


cdef inline (double, double) _twin_step_erf(double g_eq, double g_neq,
                                            double sr2, double si2) nogil:
    cdef double s = sr2 * g_eq + si2
    cdef double c = sr2 * g_neq + si2
    cdef double den = 1.0 + 2.0 * s
    cdef double ge = (2.0 * asin(_clamp1((2.0 * s) / den))) / M_PI
    cdef double gn = (2.0 * asin(_clamp1((2.0 * c) / den))) / M_PI
    if gn > ge:
        gn = ge
    return ge, gn


cdef inline (double, double) _twin_step_sign(double g_eq, double g_neq,
                                             double sr2, double si2) nogil:
    cdef double den = sr2 + si2
    cdef double c = sr2 * g_neq + si2
    cdef double ge = 1.0
    cdef double gn = (2.0 * asin(_clamp1(c / den))) / M_PI
    if gn > ge:
        gn = ge
    return ge, gn


cdef inline (double, double) _twin_step_relu(double g_eq, double g_neq,
                                             double sr2, double si2) nogil:
    cdef double s = sr2 * g_eq + si2
    cdef double c, t, ge, gn
    if s == 0.0:
        return 0.0, 0.0
    c = sr2 * g_neq + si2
    ge = 0.5 * s
    t = _clamp1(-(c / s))
    gn = c * (acos(t) / _TWO_PI) + sqrt(max(s * s - c * c, 0.0)) / _TWO_PI
    if gn > ge:
        gn = ge
    return ge, gn


cdef inline (double, double) _twin_step_c(int kind, double g_eq, double g_neq,
                                          double sr2, double si2) nogil:
    if kind == 0:
        return _twin_step_erf(g_eq, g_neq, sr2, si2)
    elif kind == 1:
        return _twin_step_sign(g_eq, g_neq, sr2, si2)
    return _twin_step_relu(g_eq, g_neq, sr2, si2)


def twin_step(int kind, double g_eq, double g_neq, double sr2, double si2):
    """One update of the twin scalars (common norm, cross term)."""
    if kind == 1 and sr2 + si2 == 0.0:
        raise DomainError("sign update undefined for sigma_r = sigma_i = 0")
    return _twin_step_c(kind, g_eq, g_neq, sr2, si2)


def general_step(int kind, double sr2, double si2,
                 double g_xx, double g_xy, double g_yy, double overlap):
    """One update of the full 2x2 Gram, with the supplied input overlap."""
    cdef double uu = sr2 * g_xx + si2
    cdef double vv = sr2 * g_yy + si2
    cdef double uv = sr2 * g_xy + si2 * overlap
    cdef double nxx, nxy, nyy, den, t
    if kind == 0:
        nxx = (2.0 * asin(_clamp1((2.0 * uu) / (1.0 + 2.0 * uu)))) / M_PI
        nyy = (2.0 * asin(_clamp1((2.0 * vv) / (1.0 + 2.0 * vv)))) / M_PI
        den = (1.0 + 2.0 * uu) if uu == vv else sqrt((1.0 + 2.0 * uu) * (1.0 + 2.0 * vv))
        nxy = (2.0 * asin(_clamp1((2.0 * uv) / den))) / M_PI
    elif kind == 1:
        if uu == 0.0 or vv == 0.0:
            raise DomainError("sign kernel undefined on zero-norm arguments")
        nxx = 1.0
        nyy = 1.0
        den = uu if uu == vv else sqrt(uu * vv)
        if den == 0.0:
            raise DomainError("sign kernel norm product underflows")
        nxy = (2.0 * asin(_clamp1(uv / den))) / M_PI
    else:
        if uu == 0.0 or vv == 0.0:
            raise DomainError("relu kernel undefined on zero-norm arguments")
        nxx = 0.5 * uu
        nyy = 0.5 * vv
        den = uu if uu == vv else sqrt(uu * vv)
        if den == 0.0:
            raise DomainError("relu kernel norm product underflows")
        t = _clamp1(-(uv / den))
        nxy = uv * (acos(t) / _TWO_PI) + sqrt(max(uu * vv - uv * uv, 0.0)) / _TWO_PI
    return nxx, nxy, nyy


def twin_trace(int kind, double sigma_r, double sigma_i, int t_max, double guard):
    """Iterate the twin scalars from (1, 0).

    Returns ``(metric, g_eq, g_neq, diverged)`` where the arrays hold the
    values for t = 0..k with k <= t_max; on divergence they stop at the last
    in-guard step and ``diverged`` is True.
    """
    cdef double sr2 = sigma_r * sigma_r
    cdef double si2 = sigma_i * sigma_i
    if kind == 1 and sr2 + si2 == 0.0:
        raise DomainError("sign update undefined for sigma_r = sigma_i = 0")
    metric_arr = np.empty(t_max + 1)
    geq_arr = np.empty(t_max + 1)
    gneq_arr = np.empty(t_max + 1)
    cdef double[::1] metric = metric_arr
    cdef double[::1] geq = geq_arr
    cdef double[::1] gneq = gneq_arr
    cdef double g_eq = 1.0, g_neq = 0.0
    metric[0] = 2.0
    geq[0] = 1.0
    gneq[0] = 0.0
    cdef Py_ssize_t m = 1
    cdef bint diverged = False
    cdef int t
    for t in range(t_max):
        g_eq, g_neq = _twin_step_c(kind, g_eq, g_neq, sr2, si2)
        if not (g_eq <= guard):  # also catches NaN
            diverged = True
            break
        metric[m] = 2.0 * (g_eq - g_neq)
        geq[m] = g_eq
        gneq[m] = g_neq
        m += 1
    return metric_arr[:m].copy(), geq_arr[:m].copy(), gneq_arr[:m].copy(), diverged


def phase_grid(int kind, sr_values, si_values, int t_max, double guard):
    """Final twin metric over a parameter grid.

    Returns ``(final, flags)`` with flags 0 = converged value, 1 = diverged,
    2 = domain error; ``final`` is NaN wherever the flag is nonzero.
    """
    cdef double[::1] sr = np.ascontiguousarray(sr_values, dtype=float)
    cdef double[::1] si = np.ascontiguousarray(si_values, dtype=float)
    final_arr = np.empty((sr.shape[0], si.shape[0]))
    flags_arr = np.zeros((sr.shape[0], si.shape[0]), dtype=np.uint8)
    cdef double[:, ::1] final = final_arr
    cdef unsigned char[:, ::1] flags = flags_arr
    cdef double sr2, si2, g_eq, g_neq
    cdef bint diverged
    cdef Py_ssize_t i, j
    cdef int t
    cdef double nan = float("nan")
    for i in range(sr.shape[0]):
        sr2 = sr[i] * sr[i]
        for j in range(si.shape[0]):
            si2 = si[j] * si[j]
            if kind == 1 and sr2 + si2 == 0.0:
                final[i, j] = nan
                flags[i, j] = 2
                continue
            g_eq = 1.0
            g_neq = 0.0
            diverged = False
            for t in range(t_max):
                g_eq, g_neq = _twin_step_c(kind, g_eq, g_neq, sr2, si2)
                if not (g_eq <= guard):
                    diverged = True
                    break
            if diverged:
                final[i, j] = nan
                flags[i, j] = 1
            else:
                final[i, j] = 2.0 * (g_eq - g_neq)
    return final_arr, flags_arr


def gram_sequence(int kind, double sigma_r, double sigma_i, overlaps,
                  double g_xx, double g_xy, double g_yy, double guard):
    """Iterate the general Gram update through a sequence of input overlaps.

    Returns ``(g_xx, g_xy, g_yy, steps, diverged)``; on divergence the Gram
    of the last in-guard step is returned.
    """
    cdef double sr2 = sigma_r * sigma_r
    cdef double si2 = sigma_i * sigma_i
    cdef double[::1] ov = np.ascontiguousarray(overlaps, dtype=float)
    cdef Py_ssize_t steps = 0, t
    cdef double nxx, nxy, nyy
    for t in range(ov.shape[0]):
        nxx, nxy, nyy = general_step(kind, sr2, si2, g_xx, g_xy, g_yy, ov[t])
        if not (nxx <= guard) or not (nyy <= guard):
            return g_xx, g_xy, g_yy, steps, True
        g_xx, g_xy, g_yy = nxx, nxy, nyy
        steps = t + 1
    return g_xx, g_xy, g_yy, steps, False


def solve_erf_a(double sigma_r, double sigma_i, double tol, long max_iter):
    """Iterate the erf norm map from 1; returns (value, iterations, residual, converged)."""
    cdef double sr2 = sigma_r * sigma_r
    cdef double si2 = sigma_i * sigma_i
    cdef double x = 1.0
    cdef double s, xn, delta, residual
    cdef long it = 0
    cdef bint converged = False
    while it < max_iter:
        it += 1
        s = sr2 * x + si2
        xn = (2.0 * asin(_clamp1((2.0 * s) / (1.0 + 2.0 * s)))) / M_PI
        delta = xn - x
        x = xn
        if -tol < delta < tol:
            converged = True
            break
    s = sr2 * x + si2
    residual = abs((2.0 * asin(_clamp1((2.0 * s) / (1.0 + 2.0 * s)))) / M_PI - x)
    return x, it, residual, converged


def solve_erf_b(double sigma_r, double sigma_i, double a, double tol, long max_iter):
    """Iterate the erf cross map (frozen norm ``a``) from 0."""
    cdef double sr2 = sigma_r * sigma_r
    cdef double si2 = sigma_i * sigma_i
    cdef double den = 1.0 + 2.0 * (sr2 * a + si2)
    cdef double x = 0.0
    cdef double c, xn, delta, residual
    cdef long it = 0
    cdef bint converged = False
    while it < max_iter:
        it += 1
        c = sr2 * x + si2
        xn = (2.0 * asin(_clamp1((2.0 * c) / den))) / M_PI
        delta = xn - x
        x = xn
        if -tol < delta < tol:
            converged = True
            break
    c = sr2 * x + si2
    residual = abs((2.0 * asin(_clamp1((2.0 * c) / den))) / M_PI - x)
    return x, it, residual, converged


def solve_sign_b(double sigma_r, double sigma_i, double tol, long max_iter):
    """Iterate the sign cross map from 0."""
    cdef double sr2 = sigma_r * sigma_r
    cdef double si2 = sigma_i * sigma_i
    cdef double den = sr2 + si2
    if den == 0.0:
        raise DomainError("sign update undefined for sigma_r = sigma_i = 0")
    cdef double x = 0.0
    cdef double c, xn, delta, residual
    cdef long it = 0
    cdef bint converged = False
    while it < max_iter:
        it += 1
        c = sr2 * x + si2
        xn = (2.0 * asin(_clamp1(c / den))) / M_PI
        delta = xn - x
        x = xn
        if -tol < delta < tol:
            converged = True
            break
    c = sr2 * x + si2
    residual = abs((2.0 * asin(_clamp1(c / den))) / M_PI - x)
    return x, it, residual, converged
