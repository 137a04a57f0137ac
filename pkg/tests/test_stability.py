import math

import numpy as np
import pytest

from rkstab import (
    Activation,
    DomainError,
    HyperParams,
    NoConvergenceError,
    Regime,
    SQRT_PI_OVER_2,
    erf_fixed_point_a,
    erf_fixed_point_b,
    erf_frontier_sigma_i,
    erf_frontier_sigma_r,
    erf_h1_map,
    erf_h2_map,
    phase_diagram,
    relu_g_eq_closed_form,
    rk_gram_trajectory,
    rk_limit,
    rk_trace,
    sign_h2_map,
    sign_limit_asymptotic,
)


def erf(sigma_r, sigma_i=0.0):
    return HyperParams("erf", sigma_r, sigma_i)


# ------------------------------------------------------------- fixed points

def test_erf_a_subcritical_no_input_is_zero():
    result = erf_fixed_point_a(erf(0.85), tol=1e-12)
    assert abs(result.value) < 1e-10
    assert result.residual <= 1e-12


def test_erf_a_supercritical_matches_direct_iteration_oracle():
    result = erf_fixed_point_a(erf(1.05), tol=1e-12)
    assert result.value > 0.1
    # oracle: iterate the norm update directly for 1e5 steps
    x = 1.0
    sr2 = 1.05 * 1.05
    for _ in range(10**5):
        s = sr2 * x
        x = (2.0 / math.pi) * math.asin((2.0 * s) / (1.0 + 2.0 * s))
    assert result.value == pytest.approx(x, abs=1e-10)


def test_erf_a_saturates_with_large_input():
    assert erf_fixed_point_a(erf(1.0, 100.0)).value > 0.99


def test_erf_a_requires_erf_activation():
    with pytest.raises(DomainError):
        erf_fixed_point_a(HyperParams("sign", 1.0, 0.0))


def test_erf_a_no_convergence_at_critical_point_with_tiny_tol():
    # marginal map derivative 1 at the fixed point: 1e6 iterations cannot
    # push successive changes below 1e-14
    with pytest.raises(NoConvergenceError):
        erf_fixed_point_a(erf(SQRT_PI_OVER_2), tol=1e-14)


def test_erf_b_zero_input_zero_a_is_zero():
    result = erf_fixed_point_b(erf(0.85), a=0.0, tol=1e-12)
    assert result.value == 0.0
    assert result.iterations == 1


def test_erf_b_strict_gap_in_chaotic_regime():
    params = erf(2.0)
    a = erf_fixed_point_a(params).value
    b = erf_fixed_point_b(params, a).value
    assert b < a - 0.1
    # oracle: run the coupled twin recurrence long enough to equilibrate
    geq, gneq, _ = rk_gram_trajectory(params, 10**4)
    assert a == pytest.approx(geq[-1], abs=1e-9)
    assert b == pytest.approx(gneq[-1], abs=1e-9)


def test_erf_b_equals_a_in_stable_region_with_input():
    for sigma_r in (0.6, 0.88):
        params = erf(sigma_r, 0.5)
        a = erf_fixed_point_a(params, tol=1e-12).value
        b = erf_fixed_point_b(params, a, tol=1e-12).value
        assert b == pytest.approx(a, abs=1e-11)


def test_erf_b_validates_a_range():
    with pytest.raises(ValueError):
        erf_fixed_point_b(erf(1.0), a=1.5)


def test_erf_iteration_monotone_structure():
    params = erf(1.3, 0.4)
    x = 1.0
    for _ in range(500):
        nxt = erf_h1_map(x, params)
        assert nxt <= x + 1e-15
        x = nxt
    a = erf_fixed_point_a(params).value
    y = 0.0
    for _ in range(500):
        nxt = erf_h2_map(y, a, params)
        assert nxt >= y - 1e-15
        y = nxt


def test_sign_iteration_monotone_structure():
    params = HyperParams("sign", 1.0, 1.0)
    y = 0.0
    for _ in range(300):
        nxt = sign_h2_map(y, params)
        assert nxt >= y - 1e-15
        y = nxt


# ------------------------------------------------------------------ rk_limit

def test_rk_limit_sign_no_input_is_exactly_two():
    out = rk_limit(HyperParams("sign", 1.0, 0.0))
    assert out.label is Regime.CHAOTIC
    assert out.limit_value == 2.0


def test_rk_limit_relu_subcritical_stable():
    out = rk_limit(HyperParams("relu", 1.3, 1.7))
    assert out.label is Regime.STABLE
    assert out.limit_value == 0.0


def test_rk_limit_relu_supercritical_divergent():
    out = rk_limit(HyperParams("relu", 1.5, 0.0))
    assert out.label is Regime.DIVERGENT
    assert math.isinf(out.limit_value)


def test_rk_limit_erf_chaotic_case():
    out = rk_limit(erf(1.05))
    assert out.label is Regime.CHAOTIC
    assert out.limit_value > 0.1


def test_rk_limit_erf_stable_case():
    out = rk_limit(erf(0.85))
    assert out.label is Regime.STABLE
    assert out.limit_value <= 1e-6


def test_rk_limit_sign_zero_sigma_r_is_stable():
    out = rk_limit(HyperParams("sign", 0.0, 1.0))
    assert out.label is Regime.STABLE
    assert out.limit_value == 0.0


def test_rk_limit_sign_origin_is_domain_error():
    with pytest.raises(DomainError):
        rk_limit(HyperParams("sign", 0.0, 0.0))


def test_rk_limit_agrees_with_long_traces():
    # random parameter draws across all activations, compared at t = 2000
    rng = np.random.default_rng(2024)
    kinds = [Activation.ERF, Activation.SIGN, Activation.RELU]
    checked = 0
    for k in range(20):
        params = HyperParams(
            kinds[k % 3], float(rng.uniform(0.1, 2.2)), float(rng.uniform(0.0, 2.0))
        )
        out = rk_limit(params)
        if out.label is Regime.DIVERGENT:
            continue
        trace = rk_trace(params, 2000)
        assert not trace.diverged
        assert out.limit_value == pytest.approx(trace.final, abs=1e-4), params
        checked += 1
    assert checked >= 10


# ------------------------------------------------------------------ frontier

def test_frontier_anchor_both_directions():
    assert erf_frontier_sigma_i(SQRT_PI_OVER_2) <= 1e-9
    assert abs(erf_frontier_sigma_r(0.0) - SQRT_PI_OVER_2) <= 1e-9


def test_frontier_domain_error_below_anchor():
    with pytest.raises(DomainError):
        erf_frontier_sigma_i(0.8)


def test_frontier_value_at_1_2_matches_bisected_classification():
    # frozen oracle: bisecting rk_limit in sigma_i at sigma_r = 1.2 flips at
    # 0.2566718...; the closed form must sit within the 1e-4 protocol
    assert erf_frontier_sigma_i(1.2) == pytest.approx(0.25667183473706245, abs=1e-4)


def test_frontier_monotone_increasing():
    values = [erf_frontier_sigma_i(s) for s in np.linspace(0.9, 3.0, 10)]
    assert all(b > a for a, b in zip(values, values[1:]))


def test_frontier_round_trip():
    for sigma_r in np.linspace(0.9, 2.5, 9):
        sigma_i = erf_frontier_sigma_i(float(sigma_r))
        back = erf_frontier_sigma_r(sigma_i, tol=1e-9)
        assert back == pytest.approx(float(sigma_r), abs=1e-6)


def test_frontier_inverse_examples():
    assert erf_frontier_sigma_r(0.25667183473706245) == pytest.approx(1.2, abs=1e-3)
    with pytest.raises(DomainError):
        erf_frontier_sigma_r(-0.5)


# ------------------------------------------------------------- sign and relu

def test_sign_limit_positive_for_any_positive_sigma_r():
    for sigma_r in (0.25, 0.5, 1.0, 2.0):
        for sigma_i in (0.0, 0.5, 1.0, 2.0, 5.0):
            out = rk_limit(HyperParams("sign", sigma_r, sigma_i))
            assert out.limit_value > 0.0


def test_sign_asymptotic_formula_and_domain():
    assert sign_limit_asymptotic(1.0, 10.0) == pytest.approx(16.0 / (100.0 * math.pi**2))
    with pytest.raises(DomainError):
        sign_limit_asymptotic(1.0, 0.0)


def test_sign_asymptotic_approaches_exact_limit():
    exact = rk_limit(HyperParams("sign", 1.0, 10.0)).limit_value
    approx = sign_limit_asymptotic(1.0, 10.0)
    assert abs(approx - exact) / exact < 0.1


def test_relu_threshold_flips_once_between_1_41_and_1_42():
    for sigma_i in (0.0, 0.5, 1.0, 2.0):
        labels = [
            rk_limit(HyperParams("relu", float(s), sigma_i)).label
            for s in np.linspace(0.5, 2.0, 61)
        ]
        flips = sum(1 for a, b in zip(labels, labels[1:]) if a is not b)
        assert flips == 1
        assert rk_limit(HyperParams("relu", 1.41, sigma_i)).label is Regime.STABLE
        assert rk_limit(HyperParams("relu", 1.42, sigma_i)).label is Regime.DIVERGENT


def test_relu_closed_form_matches_iteration():
    for sigma_r, sigma_i in [(0.5, 0.0), (1.0, 0.5), (1.3, 1.0), (1.0, 2.0)]:
        params = HyperParams("relu", sigma_r, sigma_i)
        geq, _, diverged = rk_gram_trajectory(params, 100)
        assert not diverged
        for t in range(101):
            assert abs(relu_g_eq_closed_form(params, t) - geq[t]) <= 1e-12


def test_relu_closed_form_guards():
    # no double squares to exactly 2, so float(sqrt(2)) lands on the divergent side
    assert relu_g_eq_closed_form(HyperParams("relu", math.sqrt(2.0), 0.0), 3) == pytest.approx(
        1.0, rel=1e-12
    )
    with pytest.raises(DomainError):
        relu_g_eq_closed_form(HyperParams("erf", 1.0, 0.0), 5)


# -------------------------------------------------------------- phase diagram

def test_phase_diagram_erf_flip_along_zero_input_column():
    diagram = phase_diagram("erf", [0.85, 1.05], [0.0], t_max=200, tol=1e-6)
    assert diagram.cell(0, 0).label is Regime.STABLE
    assert diagram.cell(1, 0).label is Regime.CHAOTIC


def test_phase_diagram_sign_all_chaotic_off_origin():
    diagram = phase_diagram("sign", np.linspace(0.0, 2.0, 5), np.linspace(0.0, 2.0, 5))
    for cell in diagram.cells:
        if cell.sigma_r == 0.0 and cell.sigma_i == 0.0:
            assert cell.error is not None and cell.label is None
        elif cell.sigma_r == 0.0:
            assert cell.label is Regime.STABLE
        else:
            assert cell.label is Regime.CHAOTIC
            assert cell.limit_value > 0.0


def test_phase_diagram_relu_labels_independent_of_sigma_i():
    diagram = phase_diagram("relu", [0.3, 0.8, 1.2, 1.5, 2.0], np.linspace(0.0, 2.0, 5))
    for i in range(5):
        labels = {diagram.cell(i, j).label for j in range(5)}
        assert len(labels) == 1


def test_phase_diagram_is_deterministic_and_validates():
    grid_r = np.linspace(0.2, 1.8, 7)
    grid_i = np.linspace(0.0, 1.0, 4)
    d1 = phase_diagram("erf", grid_r, grid_i)
    d2 = phase_diagram("erf", grid_r, grid_i)
    assert [(c.limit_value, c.label) for c in d1.cells] == [
        (c.limit_value, c.label) for c in d2.cells
    ]
    assert len(d1.cells) == 28
    with pytest.raises(ValueError):
        phase_diagram("erf", [1.0, 0.5], [0.0])  # not increasing
    with pytest.raises(ValueError):
        phase_diagram("erf", [], [0.0])
