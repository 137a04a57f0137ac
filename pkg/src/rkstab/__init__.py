"""Stability laboratory for echo-state networks and their recurrent-kernel limits.

Simulate finite random reservoirs, iterate their deterministic wide-network
limits, classify stable and chaotic regimes, compute the erf stability
frontier in closed form, and measure how fast finite networks approach the
limit.
"""

from ._backend import COMPILED, backend_name
from .base import (
    DIVERGENCE_GUARD,
    Activation,
    DomainError,
    GramPair,
    HyperParams,
    NoConvergenceError,
    SimConfig,
    Trace,
    mix_seed,
)
from .convergence import (
    FLAG_DIVERGED,
    FLAG_DOMAIN,
    FLAG_OK,
    ConvergenceCell,
    convergence_sweep,
    run_convergence_cell,
)
from .kernels import (
    IDENTITY_TWIN,
    GramPairWithInputs,
    KernelArgs,
    TwinGram,
    identity_gram,
    iterate_gram,
    kernel_eval,
    rk_gram_trajectory,
    rk_step_general,
    rk_step_twin,
    rk_trace,
)
from .reservoir import (
    InputSequence,
    ReservoirState,
    WeightSet,
    generate_weights,
    gram_of,
    initial_state,
    run_twin_experiment,
    sample_input_sequence,
    step,
)
from .stability import (
    MAX_FIXED_POINT_ITERATIONS,
    SQRT_PI_OVER_2,
    FixedPointResult,
    PhaseCell,
    PhaseDiagram,
    Regime,
    RegimeLabel,
    erf_fixed_point_a,
    erf_fixed_point_b,
    erf_frontier_sigma_i,
    erf_frontier_sigma_r,
    erf_h1_map,
    erf_h2_map,
    phase_diagram,
    relu_g_eq_closed_form,
    rk_limit,
    sign_h2_map,
    sign_limit_asymptotic,
)

__version__ = "0.1.0"
