"""Finite-size vs kernel-limit Gram agreement over paired input streams.

One reservoir pair shares a weight draw but is driven by two independent
unit-sphere input sequences; the squared Frobenius distance between its
final 2x2 Gram and the deterministic limit Gram (iterated with the realized
input overlaps) measures how well the finite network tracks its wide limit.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .base import DIVERGENCE_GUARD, DomainError, HyperParams, SimConfig, mix_seed
from .kernels import iterate_gram
from .reservoir import generate_weights, gram_of, initial_state, sample_input_sequence, step

__all__ = [
    "FLAG_DIVERGED",
    "FLAG_DOMAIN",
    "FLAG_OK",
    "ConvergenceCell",
    "convergence_sweep",
    "run_convergence_cell",
]

FLAG_OK, FLAG_DIVERGED, FLAG_DOMAIN = 0, 1, 2

# sub-stream indices within one cell
_S_WEIGHTS, _S_INPUTS_1, _S_INPUTS_2, _S_INIT_1, _S_INIT_2 = 0, 1, 2, 3, 4


@dataclass(frozen=True)
class ConvergenceCell:
    """Squared Frobenius gap between finite and limit Grams at one grid point.

    ``flag`` is 0 for a finite value, 1 when either side diverged, 2 when the
    limit update was undefined (``e_value`` is NaN in both failure cases).
    """

    sigma_r: float
    sigma_i: float
    n: int
    e_value: float
    seed: int
    flag: int = FLAG_OK


def run_convergence_cell(
    params: HyperParams,
    n: int,
    t_len: int,
    d: int = 10,
    seed: int = 0,
    guard: float = DIVERGENCE_GUARD,
) -> ConvergenceCell:
    """Run one reservoir pair and its limit Gram for ``t_len`` steps.

    Deterministic per ``(params, n, t_len, d, seed)``; weight, input, and
    initialization streams are derived from ``seed`` with the shared mixing
    function.
    """
    config = SimConfig(n=n, d=d, t_max=t_len, seed=seed)
    weights = generate_weights(config, params, mix_seed(seed, _S_WEIGHTS, 0))
    inputs_1 = sample_input_sequence(d, t_len, mix_seed(seed, _S_INPUTS_1, 0))
    inputs_2 = sample_input_sequence(d, t_len, mix_seed(seed, _S_INPUTS_2, 0))
    x = initial_state(n, mix_seed(seed, _S_INIT_1, 0))
    y = initial_state(n, mix_seed(seed, _S_INIT_2, 0))

    reservoir_diverged = False
    for t in range(t_len):
        x = step(x, inputs_1.steps[t], weights, params)
        y = step(y, inputs_2.steps[t], weights, params)
        nx = float(x.x @ x.x)
        ny = float(y.x @ y.x)
        if not (nx <= guard) or not (ny <= guard):  # also catches NaN
            reservoir_diverged = True
            break

    overlaps = np.einsum("td,td->t", inputs_1.steps, inputs_2.steps)
    try:
        limit_gram, _, limit_diverged = iterate_gram(params, overlaps, guard=guard)
    except DomainError:
        return ConvergenceCell(params.sigma_r, params.sigma_i, n, math.nan, seed, FLAG_DOMAIN)
    if reservoir_diverged or limit_diverged:
        return ConvergenceCell(params.sigma_r, params.sigma_i, n, math.nan, seed, FLAG_DIVERGED)

    gram = gram_of(x, y)
    e_value = (
        (gram.g_xx - limit_gram.g_xx) ** 2
        + 2.0 * (gram.g_xy - limit_gram.g_xy) ** 2
        + (gram.g_yy - limit_gram.g_yy) ** 2
    )
    return ConvergenceCell(params.sigma_r, params.sigma_i, n, float(e_value), seed, FLAG_OK)


def convergence_sweep(
    kind,
    sigma_r_values,
    sigma_i_values,
    n: int,
    t_len: int,
    seed: int,
    d: int = 10,
    jobs: int = 1,
    guard: float = DIVERGENCE_GUARD,
) -> list[ConvergenceCell]:
    """One convergence cell per grid point, row-major in (sigma_r, sigma_i).

    Cell ``(i, j)`` runs with seed ``mix_seed(seed, i, j)``, so results do
    not depend on evaluation order or on the number of worker threads.
    Per-cell failures are recorded in the cell; the sweep never aborts.
    """
    sr_axis = np.asarray(sigma_r_values, dtype=float)
    si_axis = np.asarray(sigma_i_values, dtype=float)
    if sr_axis.ndim != 1 or si_axis.ndim != 1 or sr_axis.size < 1 or si_axis.size < 1:
        raise ValueError("grid axes must be nonempty 1-D sequences")
    if jobs < 1:
        raise ValueError("jobs must be >= 1")

    tasks = [
        (i, j, HyperParams(kind, float(sr_axis[i]), float(si_axis[j])))
        for i in range(sr_axis.size)
        for j in range(si_axis.size)
    ]

    def _run(task):
        i, j, params = task
        return run_convergence_cell(params, n, t_len, d=d, seed=mix_seed(seed, i, j), guard=guard)

    if jobs == 1:
        return [_run(task) for task in tasks]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run, tasks))
