"""Finite-size echo-state simulation: weights, inputs, state updates, twin runs."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erf as _erf

from .base import (
    DIVERGENCE_GUARD,
    Activation,
    GramPair,
    HyperParams,
    SimConfig,
    Trace,
    mix_seed,
)

__all__ = [
    "InputSequence",
    "ReservoirState",
    "WeightSet",
    "generate_weights",
    "gram_of",
    "initial_state",
    "run_twin_experiment",
    "sample_input_sequence",
    "step",
]

_UNIT_NORM_TOL = 1e-12

# sub-stream indices for deriving independent generators from one master seed
_STREAM_WEIGHTS, _STREAM_INPUTS, _STREAM_INIT_1, _STREAM_INIT_2 = 0, 1, 2, 3


@dataclass(frozen=True)
class WeightSet:
    """Fixed random internal (n x n) and input (n x d) weight matrices."""

    w_r: np.ndarray
    w_i: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "w_r", np.asarray(self.w_r, dtype=float))
        object.__setattr__(self, "w_i", np.asarray(self.w_i, dtype=float))
        if self.w_r.ndim != 2 or self.w_r.shape[0] != self.w_r.shape[1]:
            raise ValueError("w_r must be a square matrix")
        if self.w_i.ndim != 2 or self.w_i.shape[0] != self.w_r.shape[0]:
            raise ValueError("w_i must have one row per reservoir unit")
        if not (np.isfinite(self.w_r).all() and np.isfinite(self.w_i).all()):
            raise ValueError("weight entries must be finite")

    @property
    def n(self) -> int:
        return self.w_r.shape[0]

    @property
    def d(self) -> int:
        return self.w_i.shape[1]


@dataclass(frozen=True)
class ReservoirState:
    """State vector of one reservoir.

    Entries are finite in any non-divergent run; divergence detection is the
    caller's job (see :func:`run_twin_experiment`), so no finiteness check
    is enforced here.
    """

    x: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float))
        if self.x.ndim != 1 or self.x.size < 1:
            raise ValueError("state must be a nonempty vector")

    @property
    def n(self) -> int:
        return self.x.size


@dataclass(frozen=True)
class InputSequence:
    """Sequence of unit-norm input vectors, one row per time step."""

    steps: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "steps", np.asarray(self.steps, dtype=float))
        if self.steps.ndim != 2 or self.steps.shape[0] < 1:
            raise ValueError("steps must be a (t_max, d) array")
        norms = np.linalg.norm(self.steps, axis=1)
        if not np.all(np.abs(norms - 1.0) <= _UNIT_NORM_TOL):
            raise ValueError("every input vector must have unit Euclidean norm")

    @property
    def t_max(self) -> int:
        return self.steps.shape[0]

    @property
    def d(self) -> int:
        return self.steps.shape[1]


def generate_weights(config: SimConfig, params: HyperParams, seed: int | None = None) -> WeightSet:
    """Draw i.i.d. Gaussian weights: w_r ~ N(0, sigma_r^2), w_i ~ N(0, sigma_i^2).

    Deterministic for a given seed (``config.seed`` when ``seed`` is None).
    Zero standard deviations yield zero matrices.
    """
    rng = np.random.default_rng(config.seed if seed is None else seed)
    w_r = rng.normal(0.0, params.sigma_r, size=(config.n, config.n))
    w_i = rng.normal(0.0, params.sigma_i, size=(config.n, config.d))
    return WeightSet(w_r, w_i)


def sample_input_sequence(d: int, t_max: int, seed: int) -> InputSequence:
    """Draw ``t_max`` independent uniform points on the unit sphere in R^d.

    Standard Gaussian vectors normalized to unit length; deterministic per
    seed. For d = 1 every entry is -1 or +1.
    """
    if d < 1 or t_max < 1:
        raise ValueError("d and t_max must be >= 1")
    rng = np.random.default_rng(seed)
    raw = rng.standard_normal((t_max, d))
    return InputSequence(raw / np.linalg.norm(raw, axis=1, keepdims=True))


def initial_state(n: int, seed: int) -> ReservoirState:
    """Random initial state with i.i.d. N(0, 1/n) entries.

    The 1/n entry variance puts the squared norm at 1 in expectation, which
    is the scale the wide-reservoir limit starts from.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    return ReservoirState(rng.standard_normal(n) / math.sqrt(n))


def step(
    state: ReservoirState, input_vec, weights: WeightSet, params: HyperParams
) -> ReservoirState:
    """One reservoir update: elementwise activation of W_r x + W_i i, scaled by 1/sqrt(n).

    ``sign(0)`` is taken as 0.
    """
    pre = weights.w_r @ state.x + weights.w_i @ np.asarray(input_vec, dtype=float)
    if params.activation is Activation.ERF:
        act = _erf(pre)
    elif params.activation is Activation.SIGN:
        act = np.sign(pre)
    else:
        act = np.maximum(pre, 0.0)
    return ReservoirState(act / math.sqrt(state.n))


def run_twin_experiment(
    config: SimConfig,
    params: HyperParams,
    seed: int | None = None,
    guard: float = DIVERGENCE_GUARD,
) -> Trace:
    """Squared distance between two identically driven twin reservoirs over time.

    The twins share one weight draw and one input sequence but start from
    independent random states; the trace records ``|x1 - x2|^2`` for
    t = 0..t_max. Values beyond ``guard`` (or non-finite) truncate the trace
    and set the diverged flag. Deterministic per master seed (``config.seed``
    unless overridden by ``seed``).
    """
    master = config.seed if seed is None else seed
    weights = generate_weights(config, params, mix_seed(master, _STREAM_WEIGHTS, 0))
    inputs = sample_input_sequence(config.d, config.t_max, mix_seed(master, _STREAM_INPUTS, 0))
    x1 = initial_state(config.n, mix_seed(master, _STREAM_INIT_1, 0))
    x2 = initial_state(config.n, mix_seed(master, _STREAM_INIT_2, 0))
    diff = x1.x - x2.x
    values = [float(diff @ diff)]
    diverged = False
    for t in range(config.t_max):
        x1 = step(x1, inputs.steps[t], weights, params)
        x2 = step(x2, inputs.steps[t], weights, params)
        diff = x1.x - x2.x
        dist = float(diff @ diff)
        if not (dist <= guard):  # also catches NaN
            diverged = True
            break
        values.append(dist)
    return Trace(np.array(values), label="L", diverged=diverged)


def gram_of(x1, x2) -> GramPair:
    """Gram entries ``(|x1|^2, <x1, x2>, |x2|^2)`` of two equal-length states."""
    a = x1.x if isinstance(x1, ReservoirState) else np.asarray(x1, dtype=float)
    b = x2.x if isinstance(x2, ReservoirState) else np.asarray(x2, dtype=float)
    if a.shape != b.shape:
        raise ValueError("states must have equal lengths")
    return GramPair(float(a @ a), float(a @ b), float(b @ b))
