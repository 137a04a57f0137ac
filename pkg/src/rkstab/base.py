"""Shared domain types, seed derivation, and the error taxonomy."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DIVERGENCE_GUARD",
    "Activation",
    "DomainError",
    "GramPair",
    "HyperParams",
    "NoConvergenceError",
    "SimConfig",
    "Trace",
    "mix_seed",
]

DIVERGENCE_GUARD = 1e12
"""Trajectories are truncated and flagged once a tracked quantity exceeds this."""

_CS_SLACK = 1e-12  # tolerance for Cauchy-Schwarz checks on Gram entries


class DomainError(ValueError):
    """An operation was evaluated outside its mathematical domain."""


class NoConvergenceError(RuntimeError):
    """A fixed-point iteration exhausted its iteration cap."""


class Activation(enum.Enum):
    """Element-wise nonlinearity applied in the reservoir update."""

    ERF = "erf"
    SIGN = "sign"
    RELU = "relu"


#: Integer codes shared with the numeric backends.
KIND_CODE = {Activation.ERF: 0, Activation.SIGN: 1, Activation.RELU: 2}


@dataclass(frozen=True)
class HyperParams:
    """Reservoir ensemble parameters.

    ``sigma_r`` and ``sigma_i`` are the standard deviations of the internal
    and input weight entries; ``activation`` selects the nonlinearity.
    Accepts the activation as an :class:`Activation` or its string value.
    """

    activation: Activation
    sigma_r: float
    sigma_i: float = 0.0

    def __post_init__(self):
        if not isinstance(self.activation, Activation):
            object.__setattr__(self, "activation", Activation(self.activation))
        object.__setattr__(self, "sigma_r", float(self.sigma_r))
        object.__setattr__(self, "sigma_i", float(self.sigma_i))
        for name in ("sigma_r", "sigma_i"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0.0):
                raise ValueError(f"{name} must be a finite nonnegative real, got {value!r}")


@dataclass(frozen=True)
class SimConfig:
    """Finite-size simulation shape: reservoir size, input dimension, trace length, seed."""

    n: int
    d: int = 10
    t_max: int = 200
    seed: int = 0

    def __post_init__(self):
        for name, lower in (("n", 1), ("d", 1), ("t_max", 1)):
            value = getattr(self, name)
            if not isinstance(value, int) or value < lower:
                raise ValueError(f"{name} must be an integer >= {lower}, got {value!r}")
        if not isinstance(self.seed, int) or not (0 <= self.seed < 2**64):
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")


@dataclass
class Trace:
    """Time-indexed scalar metric, truncated at the first guard violation."""

    values: np.ndarray
    label: str
    diverged: bool = False

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 1 or self.values.size < 1:
            raise ValueError("trace values must form a nonempty 1-D sequence")

    def __len__(self) -> int:
        return self.values.size

    @property
    def final(self) -> float:
        """Last recorded value (the last in-guard one for diverged traces)."""
        return float(self.values[-1])


@dataclass(frozen=True)
class GramPair:
    """Entries of the symmetric 2x2 Gram matrix of two states."""

    g_xx: float
    g_xy: float
    g_yy: float

    def __post_init__(self):
        for name in ("g_xx", "g_xy", "g_yy"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not all(math.isfinite(getattr(self, n)) for n in ("g_xx", "g_xy", "g_yy")):
            raise ValueError("Gram entries must be finite")
        if self.g_xx < 0.0 or self.g_yy < 0.0:
            raise ValueError("diagonal Gram entries must be nonnegative")
        if self.g_xy * self.g_xy > self.g_xx * self.g_yy + _CS_SLACK:
            raise ValueError("Gram entries violate Cauchy-Schwarz")


_MASK64 = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def mix_seed(seed: int, row: int = 0, col: int = 0) -> int:
    """Derive an independent 64-bit stream seed for grid cell ``(row, col)``.

    Three rounds of the splitmix64 finalizer absorbing ``seed``, ``row``,
    ``col`` in turn. Serial and parallel sweeps derive per-cell seeds with
    this same function, so their results agree bit for bit.
    """
    h = _splitmix64(seed & _MASK64)
    h = _splitmix64(h ^ (row & _MASK64))
    h = _splitmix64(h ^ (col & _MASK64))
    return h
