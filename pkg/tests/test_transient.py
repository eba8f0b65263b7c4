import math

import numpy as np
import pytest

from enzyme_qssa.core.exceptions import InvalidInputError
from enzyme_qssa.analysis.transient import (
    DELTA_STAR_PREFERENCE,
    check_upper_time_hypotheses,
    complex_ceiling,
    crossing_time_bounds,
    depletion_bounds,
    hypothesis_threshold,
    linear_lyapunov_bounds,
    lyapunov_l2_bound,
    lyapunov_settling_time,
    manifold_distance_bound,
    onset_time,
    q_log_value,
    substrate_envelopes,
)
from enzyme_qssa.kinetics.mass_action import RIGOROUS_FORCING
from enzyme_qssa.kinetics.parameters import ReactionConfig, epsilon_suite


def test_crossing_time_bounds_grid_cell(grid_config):
    bounds = crossing_time_bounds(grid_config)
    assert bounds.t_SSl == pytest.approx(0.0025)
    assert bounds.t_ell == pytest.approx(0.016680, rel=1e-4)
    assert bounds.t_ell_dagger == pytest.approx(0.016670, rel=1e-4)
    assert bounds.C_star == pytest.approx(8.0)
    assert bounds.t_u_dagger_1 == pytest.approx(0.020178, rel=1e-4)
    assert bounds.t_u_q == pytest.approx(0.020486, rel=1e-4)
    assert bounds.t_u_dagger_q == pytest.approx(0.020880, rel=1e-4)
    assert bounds.t_ell_dagger <= bounds.t_ell <= bounds.t_u_q <= bounds.t_u_dagger_q


def test_lambda_serialized_under_its_symbol(grid_config):
    dumped = crossing_time_bounds(grid_config).model_dump(by_alias=True)
    assert dumped["lambda"] == pytest.approx(400.0)


def test_settling_time(grid_config):
    assert lyapunov_settling_time(grid_config) == pytest.approx(0.01 * math.log(400))


def test_hypothesis_constants():
    assert hypothesis_threshold(0.97) == pytest.approx(4.9e-4, rel=0.01)
    assert q_log_value(0.97, 250) == pytest.approx(0.816, rel=1e-3)


def test_hypotheses_fail_on_grid_cell(grid_config):
    report = check_upper_time_hypotheses(grid_config)
    assert report.cond_eps_e
    assert not report.cond_eps_q
    assert not report.all_hold
    with pytest.raises(InvalidInputError):
        check_upper_time_hypotheses(grid_config, q=0.4)


def test_hypotheses_hold_for_tiny_eps():
    config = ReactionConfig.from_values(k1=1.0, k_m1=100.0, k2=100.0, s0=200.0, e0=0.01)
    assert check_upper_time_hypotheses(config).all_hold


def test_eps_above_inverse_e_fails_hypothesis():
    config = ReactionConfig.from_values(k1=1.0, k_m1=0.0, k2=1.0, s0=1.0, e0=1.0)
    assert not check_upper_time_hypotheses(config).cond_eps_e


def test_depletion_bounds_grid_cell(grid_config):
    bounds = depletion_bounds(grid_config)
    assert bounds.Delta_dstar == pytest.approx(0.014979, rel=1e-4)
    assert bounds.upper == pytest.approx(0.02088, rel=1e-3)
    assert bounds.lower == pytest.approx(0.002084, rel=1e-3)
    assert bounds.lower <= bounds.upper
    assert bounds.conds["lower_valid"]
    assert not bounds.conds["upper_hypotheses"]
    assert bounds.conds["upper_direct"]
    assert bounds.conds["upper_valid"]
    assert bounds.preference_note == DELTA_STAR_PREFERENCE


def test_depletion_sharper_lower_bound(grid_config):
    half = depletion_bounds(grid_config, r=0.5)
    assert half.lower_sharp == pytest.approx(1.5 * half.lower)
    with pytest.raises(InvalidInputError):
        depletion_bounds(grid_config, r=0.0)
    with pytest.raises(InvalidInputError):
        depletion_bounds(grid_config, q=1.0)


def test_lyapunov_bound_shape(phase_plane_config):
    L0 = 3.0
    assert lyapunov_l2_bound(0.5, 0.5, L0, phase_plane_config) == pytest.approx(9.0)
    suite = epsilon_suite(phase_plane_config)
    limit = (suite.eps_SSl * suite.eps_MM * phase_plane_config.s0) ** 2
    far = lyapunov_l2_bound(100.0, 0.0, L0, phase_plane_config, RIGOROUS_FORCING)
    assert far == pytest.approx(limit)
    with pytest.raises(InvalidInputError):
        lyapunov_l2_bound(0.0, 1.0, L0, phase_plane_config)


def test_manifold_distance_constant(phase_plane_config):
    suite = epsilon_suite(phase_plane_config)
    assert manifold_distance_bound(phase_plane_config) == pytest.approx(math.sqrt(1.5) * suite.eps_SSl * suite.eps_MM)


def test_substrate_envelopes_order(phase_plane_config):
    t = np.linspace(0.0, 1.0, 21)
    lower, upper = substrate_envelopes(t, phase_plane_config)
    assert lower[0] == pytest.approx(100.0) and upper[0] == pytest.approx(100.0)
    assert np.all(lower <= upper)
    assert complex_ceiling(phase_plane_config) == pytest.approx(5 * 100 / 120)


def test_linear_lyapunov_bounds_ordered(grid_config):
    bounds = linear_lyapunov_bounds(grid_config)
    assert bounds.A_lower <= bounds.A_upper
    assert bounds.B_lower <= bounds.B_upper


def test_onset_time(grid_config):
    assert onset_time(grid_config) == pytest.approx(0.0025 * math.log(400))
    with pytest.raises(InvalidInputError):
        onset_time(grid_config, m_star=0.0)
