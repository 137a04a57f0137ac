"""Pure-Python numeric core.

Mirror of the compiled extension ``rkstab._core``. Both cores keep every
floating-point expression in the same order so their results agree bit for
bit on one platform; edit the two files together.
"""

from __future__ import annotations

import math

import numpy as np

from .base import DomainError

KIND_ERF, KIND_SIGN, KIND_RELU = 0, 1, 2

_PI = math.pi
_TWO_PI = 2.0 * math.pi


def _clamp1(v):
    # asin/acos arguments live in [-1, 1] exactly; rounding can overshoot
    if v > 1.0:
        return 1.0
    if v < -1.0:
        return -1.0
    return v


def twin_step(kind, g_eq, g_neq, sr2, si2):
    """One update of the twin scalars (common norm, cross term)."""
    if kind == KIND_ERF:
        s = sr2 * g_eq + si2
        c = sr2 * g_neq + si2
        den = 1.0 + 2.0 * s
        ge = (2.0 * math.asin(_clamp1((2.0 * s) / den))) / _PI
        gn = (2.0 * math.asin(_clamp1((2.0 * c) / den))) / _PI
    elif kind == KIND_SIGN:
        den = sr2 + si2
        if den == 0.0:
            raise DomainError("sign update undefined for sigma_r = sigma_i = 0")
        c = sr2 * g_neq + si2
        ge = 1.0
        gn = (2.0 * math.asin(_clamp1(c / den))) / _PI
    else:
        s = sr2 * g_eq + si2
        if s == 0.0:
            # zero pre-activation scale: the state is identically zero from here on
            return 0.0, 0.0
        c = sr2 * g_neq + si2
        ge = 0.5 * s
        t = _clamp1(-(c / s))
        gn = c * (math.acos(t) / _TWO_PI) + math.sqrt(max(s * s - c * c, 0.0)) / _TWO_PI
    if gn > ge:  # rounding guard; the exact update preserves g_neq <= g_eq
        gn = ge
    return ge, gn


def general_step(kind, sr2, si2, g_xx, g_xy, g_yy, overlap):
    """One update of the full 2x2 Gram, with the supplied input overlap."""
    uu = sr2 * g_xx + si2
    vv = sr2 * g_yy + si2
    uv = sr2 * g_xy + si2 * overlap
    if kind == KIND_ERF:
        nxx = (2.0 * math.asin(_clamp1((2.0 * uu) / (1.0 + 2.0 * uu)))) / _PI
        nyy = (2.0 * math.asin(_clamp1((2.0 * vv) / (1.0 + 2.0 * vv)))) / _PI
        den = (1.0 + 2.0 * uu) if uu == vv else math.sqrt((1.0 + 2.0 * uu) * (1.0 + 2.0 * vv))
        nxy = (2.0 * math.asin(_clamp1((2.0 * uv) / den))) / _PI
    elif kind == KIND_SIGN:
        if uu == 0.0 or vv == 0.0:
            raise DomainError("sign kernel undefined on zero-norm arguments")
        nxx = 1.0
        nyy = 1.0
        den = uu if uu == vv else math.sqrt(uu * vv)
        if den == 0.0:
            raise DomainError("sign kernel norm product underflows")
        nxy = (2.0 * math.asin(_clamp1(uv / den))) / _PI
    else:
        if uu == 0.0 or vv == 0.0:
            raise DomainError("relu kernel undefined on zero-norm arguments")
        nxx = 0.5 * uu
        nyy = 0.5 * vv
        den = uu if uu == vv else math.sqrt(uu * vv)
        if den == 0.0:
            raise DomainError("relu kernel norm product underflows")
        t = _clamp1(-(uv / den))
        nxy = uv * (math.acos(t) / _TWO_PI) + math.sqrt(max(uu * vv - uv * uv, 0.0)) / _TWO_PI
    return nxx, nxy, nyy


def twin_trace(kind, sigma_r, sigma_i, t_max, guard):
    """Iterate the twin scalars from (1, 0).

    Returns ``(metric, g_eq, g_neq, diverged)`` where the arrays hold the
    values for t = 0..k with k <= t_max; on divergence they stop at the last
    in-guard step and ``diverged`` is True.
    """
    sr2 = sigma_r * sigma_r
    si2 = sigma_i * sigma_i
    if kind == KIND_SIGN and sr2 + si2 == 0.0:
        raise DomainError("sign update undefined for sigma_r = sigma_i = 0")
    metric = np.empty(t_max + 1)
    geq = np.empty(t_max + 1)
    gneq = np.empty(t_max + 1)
    g_eq, g_neq = 1.0, 0.0
    metric[0], geq[0], gneq[0] = 2.0, 1.0, 0.0
    m = 1
    diverged = False
    for _ in range(t_max):
        g_eq, g_neq = twin_step(kind, g_eq, g_neq, sr2, si2)
        if not (g_eq <= guard):  # also catches NaN
            diverged = True
            break
        metric[m] = 2.0 * (g_eq - g_neq)
        geq[m] = g_eq
        gneq[m] = g_neq
        m += 1
    return metric[:m].copy(), geq[:m].copy(), gneq[:m].copy(), diverged


def phase_grid(kind, sr_values, si_values, t_max, guard):
    """Final twin metric over a parameter grid.

    Returns ``(final, flags)`` with flags 0 = converged value, 1 = diverged,
    2 = domain error; ``final`` is NaN wherever the flag is nonzero.
    """
    sr_values = np.ascontiguousarray(sr_values, dtype=float)
    si_values = np.ascontiguousarray(si_values, dtype=float)
    final = np.empty((sr_values.size, si_values.size))
    flags = np.zeros((sr_values.size, si_values.size), dtype=np.uint8)
    for i in range(sr_values.size):
        sr2 = sr_values[i] * sr_values[i]
        for j in range(si_values.size):
            si2 = si_values[j] * si_values[j]
            if kind == KIND_SIGN and sr2 + si2 == 0.0:
                final[i, j] = math.nan
                flags[i, j] = 2
                continue
            g_eq, g_neq = 1.0, 0.0
            diverged = False
            for _ in range(t_max):
                g_eq, g_neq = twin_step(kind, g_eq, g_neq, sr2, si2)
                if not (g_eq <= guard):
                    diverged = True
                    break
            if diverged:
                final[i, j] = math.nan
                flags[i, j] = 1
            else:
                final[i, j] = 2.0 * (g_eq - g_neq)
    return final, flags


def gram_sequence(kind, sigma_r, sigma_i, overlaps, g_xx, g_xy, g_yy, guard):
    """Iterate the general Gram update through a sequence of input overlaps.

    Returns ``(g_xx, g_xy, g_yy, steps, diverged)``; on divergence the Gram
    of the last in-guard step is returned.
    """
    sr2 = sigma_r * sigma_r
    si2 = sigma_i * sigma_i
    overlaps = np.ascontiguousarray(overlaps, dtype=float)
    steps = 0
    for t in range(overlaps.size):
        nxx, nxy, nyy = general_step(kind, sr2, si2, g_xx, g_xy, g_yy, overlaps[t])
        if not (nxx <= guard) or not (nyy <= guard):
            return g_xx, g_xy, g_yy, steps, True
        g_xx, g_xy, g_yy = nxx, nxy, nyy
        steps = t + 1
    return g_xx, g_xy, g_yy, steps, False


def solve_erf_a(sigma_r, sigma_i, tol, max_iter):
    """Iterate the erf norm map from 1; returns (value, iterations, residual, converged)."""
    sr2 = sigma_r * sigma_r
    si2 = sigma_i * sigma_i
    x = 1.0
    it = 0
    converged = False
    while it < max_iter:
        it += 1
        s = sr2 * x + si2
        xn = (2.0 * math.asin(_clamp1((2.0 * s) / (1.0 + 2.0 * s)))) / _PI
        delta = xn - x
        x = xn
        if -tol < delta < tol:
            converged = True
            break
    s = sr2 * x + si2
    residual = abs((2.0 * math.asin(_clamp1((2.0 * s) / (1.0 + 2.0 * s)))) / _PI - x)
    return x, it, residual, converged


def solve_erf_b(sigma_r, sigma_i, a, tol, max_iter):
    """Iterate the erf cross map (frozen norm ``a``) from 0."""
    sr2 = sigma_r * sigma_r
    si2 = sigma_i * sigma_i
    den = 1.0 + 2.0 * (sr2 * a + si2)
    x = 0.0
    it = 0
    converged = False
    while it < max_iter:
        it += 1
        c = sr2 * x + si2
        xn = (2.0 * math.asin(_clamp1((2.0 * c) / den))) / _PI
        delta = xn - x
        x = xn
        if -tol < delta < tol:
            converged = True
            break
    c = sr2 * x + si2
    residual = abs((2.0 * math.asin(_clamp1((2.0 * c) / den))) / _PI - x)
    return x, it, residual, converged


def solve_sign_b(sigma_r, sigma_i, tol, max_iter):
    """Iterate the sign cross map from 0."""
    sr2 = sigma_r * sigma_r
    si2 = sigma_i * sigma_i
    den = sr2 + si2
    if den == 0.0:
        raise DomainError("sign update undefined for sigma_r = sigma_i = 0")
    x = 0.0
    it = 0
    converged = False
    while it < max_iter:
        it += 1
        c = sr2 * x + si2
        xn = (2.0 * math.asin(_clamp1(c / den))) / _PI
        delta = xn - x
        x = xn
        if -tol < delta < tol:
            converged = True
            break
    c = sr2 * x + si2
    residual = abs((2.0 * math.asin(_clamp1(c / den))) / _PI - x)
    return x, it, residual, converged
