"""Infinite-width limit of the reservoir: activation kernels and Gram recurrences.

In the wide-reservoir limit the random network update concentrates, and the
joint evolution of two reservoir states reduces to a deterministic recurrence
on their 2x2 Gram matrix. Identically driven twins need only the scalar pair
``(g_eq, g_neq)``; distinct input streams need the full Gram plus the running
input overlap.
"""

from __future__ import annotations

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
    Trace,
)

__all__ = [
    "GramPairWithInputs",
    "KernelArgs",
    "TwinGram",
    "identity_gram",
    "iterate_gram",
    "kernel_eval",
    "rk_gram_trajectory",
    "rk_step_general",
    "rk_step_twin",
    "rk_trace",
]

_CS_SLACK = 1e-12
_PI = math.pi
_TWO_PI = 2.0 * math.pi


def _clamp1(v: float) -> float:
    if v > 1.0:
        return 1.0
    if v < -1.0:
        return -1.0
    return v


@dataclass(frozen=True)
class KernelArgs:
    """Inner products ``(|u|^2, |v|^2, <u,v>)`` describing a pair of vectors."""

    uu: float
    vv: float
    uv: float

    def __post_init__(self):
        for name in ("uu", "vv", "uv"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not all(math.isfinite(getattr(self, n)) for n in ("uu", "vv", "uv")):
            raise ValueError("kernel arguments must be finite")
        if self.uu < 0.0 or self.vv < 0.0:
            raise ValueError("squared norms must be nonnegative")
        if self.uv * self.uv > self.uu * self.vv + _CS_SLACK:
            raise ValueError("kernel arguments violate Cauchy-Schwarz")


@dataclass(frozen=True)
class TwinGram:
    """Common squared norm and cross inner product of two identically driven twins."""

    g_eq: float
    g_neq: float

    def __post_init__(self):
        object.__setattr__(self, "g_eq", float(self.g_eq))
        object.__setattr__(self, "g_neq", float(self.g_neq))
        if not (math.isfinite(self.g_eq) and math.isfinite(self.g_neq)):
            raise ValueError("twin Gram entries must be finite")
        if not 0.0 <= self.g_neq <= self.g_eq:
            raise ValueError(f"twin Gram requires 0 <= g_neq <= g_eq, got {self}")


#: Wide-limit Gram of two independently initialized unit-scale states.
IDENTITY_TWIN = TwinGram(1.0, 0.0)


@dataclass(frozen=True)
class GramPairWithInputs:
    """2x2 Gram of two differently driven states plus the current input overlap."""

    g_xx: float
    g_xy: float
    g_yy: float
    input_overlap: float = 1.0

    def __post_init__(self):
        for name in ("g_xx", "g_xy", "g_yy", "input_overlap"):
            object.__setattr__(self, name, float(getattr(self, name)))
        values = (self.g_xx, self.g_xy, self.g_yy, self.input_overlap)
        if not all(math.isfinite(v) for v in values):
            raise ValueError("Gram entries must be finite")
        if self.g_xx < 0.0 or self.g_yy < 0.0:
            raise ValueError("diagonal Gram entries must be nonnegative")
        if self.g_xy * self.g_xy > self.g_xx * self.g_yy + _CS_SLACK:
            raise ValueError("Gram entries violate Cauchy-Schwarz")
        if abs(self.input_overlap) > 1.0 + _CS_SLACK:
            raise ValueError("input overlap of unit inputs must lie in [-1, 1]")


def identity_gram(input_overlap: float = 1.0) -> GramPairWithInputs:
    """Identity Gram, the wide limit for independent unit-scale initializations."""
    return GramPairWithInputs(1.0, 0.0, 1.0, input_overlap)


def _kind(params: HyperParams) -> int:
    return KIND_CODE[params.activation]


def kernel_eval(kind: Activation, args: KernelArgs) -> float:
    """Expectation ``E[f(w.u) f(w.v)]`` over a standard Gaussian vector ``w``.

    Closed forms: arcsine-type kernels for erf and sign, the order-one
    arc-cosine kernel for relu. Arguments of asin/acos are clamped to
    ``[-1, 1]``; the exact values lie there by Cauchy-Schwarz but rounding
    can overshoot at the boundary.

    Raises :class:`DomainError` for the sign and relu kernels on zero-norm
    arguments, where the angle between the vectors is undefined.
    """
    kind = Activation(kind)
    uu, vv, uv = args.uu, args.vv, args.uv
    if kind is Activation.ERF:
        den = (1.0 + 2.0 * uu) if uu == vv else math.sqrt((1.0 + 2.0 * uu) * (1.0 + 2.0 * vv))
        return (2.0 * math.asin(_clamp1((2.0 * uv) / den))) / _PI
    if uu == 0.0 or vv == 0.0:
        raise DomainError(f"{kind.value} kernel undefined on zero-norm arguments")
    den = uu if uu == vv else math.sqrt(uu * vv)
    if den == 0.0:
        raise DomainError(f"{kind.value} kernel norm product underflows")
    if kind is Activation.SIGN:
        return (2.0 * math.asin(_clamp1(uv / den))) / _PI
    t = _clamp1(-(uv / den))
    return uv * (math.acos(t) / _TWO_PI) + math.sqrt(max(uu * vv - uv * uv, 0.0)) / _TWO_PI


def rk_step_twin(state: TwinGram, params: HyperParams) -> TwinGram:
    """One step of the twin Gram recurrence for the configured activation.

    Per step, each entry is the activation kernel evaluated on the lifted
    vectors of squared norm ``sigma_r^2 * g + sigma_i^2``; for identically
    driven twins this collapses to a scalar pair update.
    """
    ge, gn = impl.twin_step(
        _kind(params),
        state.g_eq,
        state.g_neq,
        params.sigma_r * params.sigma_r,
        params.sigma_i * params.sigma_i,
    )
    return TwinGram(ge, gn)


def rk_gram_trajectory(
    params: HyperParams, t_max: int, guard: float = DIVERGENCE_GUARD
) -> tuple[np.ndarray, np.ndarray, bool]:
    """Paths of ``(g_eq, g_neq)`` from the identity start for t = 0..t_max.

    Returns ``(g_eq, g_neq, diverged)``; on divergence the arrays stop at the
    last step where g_eq stayed within ``guard``.
    """
    if t_max < 1:
        raise ValueError("t_max must be >= 1")
    _, geq, gneq, diverged = impl.twin_trace(
        _kind(params), params.sigma_r, params.sigma_i, int(t_max), float(guard)
    )
    return geq, gneq, diverged


def rk_trace(params: HyperParams, t_max: int, guard: float = DIVERGENCE_GUARD) -> Trace:
    """Asymptotic stability metric ``2 (g_eq - g_neq)`` for t = 0..t_max.

    Starts from the identity Gram, so the metric begins at exactly 2 and
    tends to 0 precisely when the twins forget their initializations.
    """
    if t_max < 1:
        raise ValueError("t_max must be >= 1")
    metric, _, _, diverged = impl.twin_trace(
        _kind(params), params.sigma_r, params.sigma_i, int(t_max), float(guard)
    )
    return Trace(metric, label="L_rk", diverged=diverged)


def rk_step_general(
    state: GramPairWithInputs, params: HyperParams, next_overlap: float | None = None
) -> GramPairWithInputs:
    """One step of the full 2x2 Gram recurrence with distinct input streams.

    Diagonal entries use input overlap 1 (each stream against itself), the
    off-diagonal uses ``state.input_overlap``. Inputs are assumed unit-norm.
    The caller supplies ``next_overlap``, the inner product of the next pair
    of inputs; by default the current overlap is carried forward.
    """
    nxx, nxy, nyy = impl.general_step(
        _kind(params),
        params.sigma_r * params.sigma_r,
        params.sigma_i * params.sigma_i,
        state.g_xx,
        state.g_xy,
        state.g_yy,
        state.input_overlap,
    )
    overlap = state.input_overlap if next_overlap is None else float(next_overlap)
    return GramPairWithInputs(nxx, nxy, nyy, overlap)


def iterate_gram(
    params: HyperParams,
    overlaps,
    initial: GramPairWithInputs | None = None,
    guard: float = DIVERGENCE_GUARD,
) -> tuple[GramPairWithInputs, int, bool]:
    """Run the general Gram recurrence through a realized overlap sequence.

    ``overlaps[t]`` is the inner product of the two (unit) inputs applied at
    step ``t``; it overrides any overlap stored in ``initial``. Returns
    ``(gram, steps, diverged)`` where ``steps`` counts completed updates; on
    divergence the Gram of the last in-guard step is returned.
    """
    overlaps = np.ascontiguousarray(overlaps, dtype=float)
    if overlaps.ndim != 1 or overlaps.size < 1:
        raise ValueError("overlaps must be a nonempty 1-D sequence")
    if np.any(np.abs(overlaps) > 1.0 + _CS_SLACK):
        raise ValueError("input overlaps of unit inputs must lie in [-1, 1]")
    start = identity_gram(float(overlaps[0])) if initial is None else initial
    g_xx, g_xy, g_yy, steps, diverged = impl.gram_sequence(
        _kind(params),
        params.sigma_r,
        params.sigma_i,
        overlaps,
        start.g_xx,
        start.g_xy,
        start.g_yy,
        float(guard),
    )
    last = float(overlaps[max(steps - 1, 0)])
    return GramPairWithInputs(g_xx, g_xy, g_yy, last), steps, diverged
