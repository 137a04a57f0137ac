"""Asymptotic regime analysis: fixed points, the erf frontier, phase sweeps.

The wide-limit recurrences reduce stability questions to fixed-point
structure of scalar maps: the common-norm map has a unique attracting fixed
point ``a``; the cross-term map (with the norm frozen at ``a``) is convex
and increasing, and its smallest fixed point ``b`` determines the limiting
metric ``2 (a - b)``. Stability means ``b = a``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from ._backend import impl
from .base import (
    DIVERGENCE_GUARD,
    KIND_CODE,
    Activation,
    DomainError,
    HyperParams,
    NoConvergenceError,
)

__all__ = [
    "FixedPointResult",
    "MAX_FIXED_POINT_ITERATIONS",
    "PhaseCell",
    "PhaseDiagram",
    "Regime",
    "RegimeLabel",
    "SQRT_PI_OVER_2",
    "erf_fixed_point_a",
    "erf_fixed_point_b",
    "erf_frontier_sigma_i",
    "erf_frontier_sigma_r",
    "erf_h1_map",
    "erf_h2_map",
    "phase_diagram",
    "relu_g_eq_closed_form",
    "rk_limit",
    "sign_h2_map",
    "sign_limit_asymptotic",
]

MAX_FIXED_POINT_ITERATIONS = 10**6

#: Zero-input stability edge of the erf activation.
SQRT_PI_OVER_2 = math.sqrt(math.pi) / 2.0

_PI = math.pi
_SOLVER_TOL = 1e-12  # fixed-point tolerance used internally by rk_limit
_RELU_BOUNDARY_STEPS = 200_000  # guarded iteration length for sigma_r^2 == 2 exactly
_MAX_BRACKET_GROWTH = 200


class Regime(enum.Enum):
    STABLE = "stable"
    CHAOTIC = "chaotic"
    DIVERGENT = "divergent"


@dataclass(frozen=True)
class RegimeLabel:
    """Classification of the asymptotic twin metric; +inf encodes divergence."""

    label: Regime
    limit_value: float


@dataclass(frozen=True)
class FixedPointResult:
    value: float
    iterations: int
    residual: float


def _clamp1(v: float) -> float:
    if v > 1.0:
        return 1.0
    if v < -1.0:
        return -1.0
    return v


def erf_h1_map(x: float, params: HyperParams) -> float:
    """Erf common-norm map; its fixed point is the norm limit ``a``."""
    sr2 = params.sigma_r * params.sigma_r
    si2 = params.sigma_i * params.sigma_i
    s = sr2 * x + si2
    return (2.0 * math.asin(_clamp1((2.0 * s) / (1.0 + 2.0 * s)))) / _PI


def erf_h2_map(x: float, a: float, params: HyperParams) -> float:
    """Erf cross-term map with the norm frozen at ``a``."""
    sr2 = params.sigma_r * params.sigma_r
    si2 = params.sigma_i * params.sigma_i
    den = 1.0 + 2.0 * (sr2 * a + si2)
    c = sr2 * x + si2
    return (2.0 * math.asin(_clamp1((2.0 * c) / den))) / _PI


def sign_h2_map(x: float, params: HyperParams) -> float:
    """Sign cross-term map (the norm is pinned at 1)."""
    sr2 = params.sigma_r * params.sigma_r
    si2 = params.sigma_i * params.sigma_i
    den = sr2 + si2
    if den == 0.0:
        raise DomainError("sign update undefined for sigma_r = sigma_i = 0")
    c = sr2 * x + si2
    return (2.0 * math.asin(_clamp1(c / den))) / _PI


def _require_activation(params: HyperParams, expected: Activation, op: str) -> None:
    if params.activation is not expected:
        raise DomainError(f"{op} requires the {expected.value} activation")


def _check_tol(tol: float) -> float:
    tol = float(tol)
    if not (tol > 0.0 and math.isfinite(tol)):
        raise ValueError("tol must be a positive real")
    return tol


def erf_fixed_point_a(params: HyperParams, tol: float = 1e-12) -> FixedPointResult:
    """Limit ``a`` of the erf norm sequence, by monotone iteration from 1.

    The norm map is concave with a unique attracting fixed point on [0, 1];
    iteration from 1 decreases onto it. Stops when successive iterates move
    by less than ``tol``.
    """
    _require_activation(params, Activation.ERF, "erf_fixed_point_a")
    tol = _check_tol(tol)
    value, iterations, residual, converged = impl.solve_erf_a(
        params.sigma_r, params.sigma_i, tol, MAX_FIXED_POINT_ITERATIONS
    )
    if not converged:
        raise NoConvergenceError(
            f"norm fixed point did not converge within {MAX_FIXED_POINT_ITERATIONS} "
            f"iterations at tol={tol:g} (params={params})"
        )
    return FixedPointResult(value, iterations, residual)


def erf_fixed_point_b(params: HyperParams, a: float, tol: float = 1e-12) -> FixedPointResult:
    """Smallest fixed point ``b`` of the erf cross-term map on [0, a].

    The map is increasing, so iteration from 0 climbs monotonically onto the
    smallest fixed point.
    """
    _require_activation(params, Activation.ERF, "erf_fixed_point_b")
    tol = _check_tol(tol)
    a = float(a)
    if not (0.0 <= a <= 1.0):
        raise ValueError(f"a must lie in [0, 1], got {a!r}")
    value, iterations, residual, converged = impl.solve_erf_b(
        params.sigma_r, params.sigma_i, a, tol, MAX_FIXED_POINT_ITERATIONS
    )
    if not converged:
        raise NoConvergenceError(
            f"cross-term fixed point did not converge within {MAX_FIXED_POINT_ITERATIONS} "
            f"iterations at tol={tol:g} (params={params}, a={a:g})"
        )
    return FixedPointResult(value, iterations, residual)


def _sign_fixed_point_b(params: HyperParams, tol: float) -> FixedPointResult:
    value, iterations, residual, converged = impl.solve_sign_b(
        params.sigma_r, params.sigma_i, tol, MAX_FIXED_POINT_ITERATIONS
    )
    if not converged:
        raise NoConvergenceError(
            f"sign cross-term fixed point did not converge within "
            f"{MAX_FIXED_POINT_ITERATIONS} iterations at tol={tol:g} (params={params})"
        )
    return FixedPointResult(value, iterations, residual)


def rk_limit(params: HyperParams, tol: float = 1e-6) -> RegimeLabel:
    """Asymptotic value of the twin metric with a stable/chaotic/divergent label.

    Stable means the limit does not exceed ``tol``. Erf: limit ``2 (a - b)``
    from the two fixed-point solvers. Sign: limit ``2 (1 - b)``. Relu: stable
    with limit 0 for sigma_r^2 < 2, divergent above; the razor-edge equality
    case is resolved empirically by guarded iteration.
    """
    tol = _check_tol(tol)
    kind = params.activation
    if kind is Activation.ERF:
        a = erf_fixed_point_a(params, _SOLVER_TOL)
        b = erf_fixed_point_b(params, a.value, _SOLVER_TOL)
        limit = 2.0 * (a.value - b.value)
    elif kind is Activation.SIGN:
        if params.sigma_r == 0.0 and params.sigma_i == 0.0:
            raise DomainError("sign update undefined for sigma_r = sigma_i = 0")
        b = _sign_fixed_point_b(params, _SOLVER_TOL)
        limit = 2.0 * (1.0 - b.value)
    else:
        sr2 = params.sigma_r * params.sigma_r
        if sr2 < 2.0:
            return RegimeLabel(Regime.STABLE, 0.0)
        if sr2 > 2.0:
            return RegimeLabel(Regime.DIVERGENT, math.inf)
        metric, _, _, diverged = impl.twin_trace(
            KIND_CODE[kind], params.sigma_r, params.sigma_i, _RELU_BOUNDARY_STEPS, DIVERGENCE_GUARD
        )
        if diverged:
            return RegimeLabel(Regime.DIVERGENT, math.inf)
        limit = float(metric[-1])
    if limit < 0.0:  # rounding only; the exact limit is nonnegative
        limit = 0.0
    return RegimeLabel(Regime.STABLE if limit <= tol else Regime.CHAOTIC, limit)


def _asin_minus_identity(m: float) -> float:
    """asin(m) - m, series-evaluated for small m where direct subtraction cancels."""
    if m < 1e-4:
        m2 = m * m
        return m * m2 * (1.0 / 6.0 + m2 * (3.0 / 40.0 + m2 * (15.0 / 336.0)))
    return math.asin(m) - m


def erf_frontier_sigma_i(sigma_r: float) -> float:
    """Input scale on the erf stability frontier at internal scale ``sigma_r``.

    Solves the tangency condition of the cross-term map together with the
    norm fixed-point equation, eliminating the fixed point analytically. The
    squared frontier value equals

        4 sigma_r^4 / pi^2 - 1/4 - (2 sigma_r^2 / pi) * asin(m),
        m = (16 sigma_r^4 - pi^2) / (16 sigma_r^4 + pi^2),

    evaluated here in an algebraically equivalent arrangement that avoids
    catastrophic cancellation, so the value vanishes cleanly at the lower
    domain edge sqrt(pi)/2.
    """
    sigma_r = float(sigma_r)
    if not (sigma_r >= SQRT_PI_OVER_2):
        raise DomainError(f"frontier defined for sigma_r >= sqrt(pi)/2, got {sigma_r!r}")
    e = 4.0 * sigma_r * sigma_r - _PI
    if e < 0.0:  # sigma_r within rounding of the domain edge
        e = 0.0
    sr2 = sigma_r * sigma_r
    q = 16.0 * sr2 * sr2 + _PI * _PI
    m = e * (4.0 * sr2 + _PI) / q
    value = m * e * e / (4.0 * _PI * _PI) - (2.0 * sr2 / _PI) * _asin_minus_identity(m)
    return math.sqrt(value) if value > 0.0 else 0.0


def erf_frontier_sigma_r(sigma_i: float, tol: float = 1e-9) -> float:
    """Internal scale at which the erf frontier reaches input scale ``sigma_i``.

    Inverts the strictly increasing frontier by bisection on
    [sqrt(pi)/2, hi], growing ``hi`` geometrically until it brackets.
    """
    sigma_i = float(sigma_i)
    tol = _check_tol(tol)
    if not (sigma_i >= 0.0 and math.isfinite(sigma_i)):
        raise DomainError(f"sigma_i must be a finite nonnegative real, got {sigma_i!r}")
    lo = SQRT_PI_OVER_2
    if sigma_i == 0.0:
        return lo
    hi = 2.0 * lo
    for _ in range(_MAX_BRACKET_GROWTH):
        if erf_frontier_sigma_i(hi) >= sigma_i:
            break
        hi *= 2.0
    else:
        raise NoConvergenceError(f"could not bracket the frontier for sigma_i={sigma_i:g}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if erf_frontier_sigma_i(mid) < sigma_i:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def sign_limit_asymptotic(sigma_r: float, sigma_i: float) -> float:
    """Large-input approximation of the sign limit: 16 sigma_r^2 / (pi^2 sigma_i^2)."""
    sigma_r = float(sigma_r)
    sigma_i = float(sigma_i)
    if sigma_i <= 0.0:
        raise DomainError("the large-input approximation requires sigma_i > 0")
    return 16.0 * sigma_r * sigma_r / (_PI * _PI * sigma_i * sigma_i)


def relu_g_eq_closed_form(params: HyperParams, t: int) -> float:
    """Closed form of the relu norm sequence: (sr^2/2)^t (1 - a) + a, a = si^2/(2 - sr^2).

    The norm recurrence is affine, so this holds exactly at every step for
    sigma_r^2 != 2.
    """
    _require_activation(params, Activation.RELU, "relu_g_eq_closed_form")
    if t < 0:
        raise ValueError("t must be >= 0")
    sr2 = params.sigma_r * params.sigma_r
    si2 = params.sigma_i * params.sigma_i
    if sr2 == 2.0:
        raise DomainError("closed form undefined at sigma_r^2 = 2")
    a = si2 / (2.0 - sr2)
    return (sr2 / 2.0) ** t * (1.0 - a) + a


@dataclass(frozen=True)
class PhaseCell:
    """One grid cell of a phase diagram; ``error`` is set when evaluation failed."""

    sigma_r: float
    sigma_i: float
    limit_value: float
    label: Regime | None
    error: str | None = None


@dataclass
class PhaseDiagram:
    """Row-major sweep of the final twin metric over a (sigma_r, sigma_i) grid."""

    sigma_r_values: np.ndarray
    sigma_i_values: np.ndarray
    t_max: int
    tol: float
    cells: list[PhaseCell]

    def cell(self, i: int, j: int) -> PhaseCell:
        """Cell at the i-th sigma_r and j-th sigma_i grid value."""
        return self.cells[i * self.sigma_i_values.size + j]


def _check_grid_axis(values, name: str) -> np.ndarray:
    axis = np.asarray(values, dtype=float)
    if axis.ndim != 1 or axis.size < 1:
        raise ValueError(f"{name} must be a nonempty 1-D sequence")
    if not np.all(np.isfinite(axis)) or np.any(axis < 0.0):
        raise ValueError(f"{name} must contain finite nonnegative reals")
    if axis.size > 1 and not np.all(np.diff(axis) > 0.0):
        raise ValueError(f"{name} must be strictly increasing")
    return axis


def phase_diagram(
    kind: Activation,
    sigma_r_values,
    sigma_i_values,
    t_max: int = 200,
    tol: float = 1e-6,
    guard: float = DIVERGENCE_GUARD,
) -> PhaseDiagram:
    """Classify every grid cell by the twin metric after ``t_max`` steps.

    Stable means the final metric does not exceed ``tol``; cells whose norm
    scalar escapes ``guard`` are labeled divergent. Per-cell failures (the
    sign update at the origin) are recorded in the cell, never aborting the
    sweep. Results are independent of evaluation order.
    """
    kind = Activation(kind)
    sr_axis = _check_grid_axis(sigma_r_values, "sigma_r_values")
    si_axis = _check_grid_axis(sigma_i_values, "sigma_i_values")
    if t_max < 1:
        raise ValueError("t_max must be >= 1")
    tol = _check_tol(tol)
    final, flags = impl.phase_grid(KIND_CODE[kind], sr_axis, si_axis, int(t_max), float(guard))
    cells: list[PhaseCell] = []
    for i, sr in enumerate(sr_axis):
        for j, si in enumerate(si_axis):
            flag = int(flags[i, j])
            if flag == 2:
                cells.append(
                    PhaseCell(
                        float(sr),
                        float(si),
                        math.nan,
                        None,
                        "sign update undefined for sigma_r = sigma_i = 0",
                    )
                )
            elif flag == 1:
                cells.append(PhaseCell(float(sr), float(si), math.inf, Regime.DIVERGENT))
            else:
                value = float(final[i, j])
                label = Regime.STABLE if value <= tol else Regime.CHAOTIC
                cells.append(PhaseCell(float(sr), float(si), value, label))
    return PhaseDiagram(sr_axis, si_axis, int(t_max), tol, cells)
