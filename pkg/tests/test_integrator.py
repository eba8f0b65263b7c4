import numpy as np
import pytest

from enzyme_qssa.analysis.transient import check_upper_time_hypotheses, crossing_time_bounds, depletion_bounds
from enzyme_qssa.core.exceptions import HorizonError, InvalidInputError, StepLimitError
from enzyme_qssa.integration.integrator import integrator
from enzyme_qssa.integration.options import IntegrationOptions
from enzyme_qssa.kinetics.lambert import schnell_mendoza
from enzyme_qssa.kinetics.mass_action import qss_manifold
from enzyme_qssa.kinetics.parameters import ReactionConfig, delta_star
from enzyme_qssa.services.figures import E0_GRID, GRID_RATES, S0_PANELS


def test_crossing_inside_bracket(grid_config, options):
    crossing = integrator.find_crossing(grid_config, options)
    bounds = crossing_time_bounds(grid_config)
    assert bounds.t_ell <= crossing.t_cross <= bounds.t_u_dagger_q
    assert crossing.sign_changes == 1
    assert crossing.residual == pytest.approx(0.0, abs=1e-8)
    assert crossing.c_cross == pytest.approx(qss_manifold(crossing.s_cross, grid_config), rel=1e-8)


def test_crossing_is_the_peak_of_c(phase_plane_config, options):
    crossing = integrator.find_crossing(phase_plane_config, options)
    assert crossing.c_max_sampled <= crossing.c_cross * (1 + 1e-8)
    assert crossing.t_cross >= crossing_time_bounds(phase_plane_config).t_ell


def test_crossing_needs_long_enough_horizon(phase_plane_config):
    with pytest.raises(HorizonError):
        integrator.find_crossing(phase_plane_config, IntegrationOptions(t_end=1e-6))


def test_step_budget_enforced(phase_plane_config):
    with pytest.raises(StepLimitError) as excinfo:
        integrator.integrate_full(phase_plane_config, IntegrationOptions(max_steps=3))
    assert excinfo.value.t_reached > 0


def test_full_trajectory_conserves_and_decays(phase_plane_config, options):
    trajectory = integrator.integrate_full(phase_plane_config, options.model_copy(update={"t_end": 2.0}))
    assert trajectory.t_end == pytest.approx(2.0)
    s, c = trajectory.component("s"), trajectory.component("c")
    assert np.all(np.diff(s) <= 0)
    assert np.all(c >= -1e-12) and np.all(c <= phase_plane_config.e0)
    assert np.all(s + c <= phase_plane_config.s0 * (1 + 1e-9))


def test_no_enzyme_means_no_dynamics():
    config = ReactionConfig.from_values(k1=1.0, k_m1=1.0, k2=1.0, s0=5.0, e0=0.0)
    trajectory = integrator.integrate_full(config)
    np.testing.assert_allclose(trajectory.component("s"), 5.0)
    np.testing.assert_allclose(trajectory.component("c"), 0.0)


def test_reduced_matches_closed_form(slow_phase_config, options):
    run = options.model_copy(update={"t_end": 5.0})
    xi = integrator.integrate_reduced(10.0, 0.0, slow_phase_config, run)
    t = np.linspace(0.0, 5.0, 41)
    expected = schnell_mendoza(10.0, 0.0, t, slow_phase_config).s_lower
    np.testing.assert_allclose(xi.value("xi", t), expected, rtol=1e-7)


def test_reduced_rejects_bad_start(slow_phase_config):
    with pytest.raises(InvalidInputError):
        integrator.integrate_reduced(0.0, 0.0, slow_phase_config)
    with pytest.raises(InvalidInputError):
        integrator.integrate_reduced(11.0, 0.0, slow_phase_config)


def test_envelopes_enclose_and_match_closed_form(slow_phase_config, options):
    delta = delta_star(slow_phase_config).delta_star
    run = options.model_copy(update={"t_end": 5.0})
    envelopes = integrator.integrate_envelopes(9.9, 0.1, slow_phase_config, delta, run)
    t = np.linspace(0.1, 5.0, 25)
    lower = envelopes.lower.value("lower", t)
    upper_delta = envelopes.upper_delta.value("upper_delta", t)
    upper_U = envelopes.upper_U.value("upper_U", t)
    assert np.all(lower <= upper_delta * (1 + 1e-9))
    assert np.all(lower <= upper_U * (1 + 1e-9))
    closed = schnell_mendoza(9.9, 0.1, t, slow_phase_config, delta)
    np.testing.assert_allclose(lower, closed.s_lower, rtol=1e-7)
    np.testing.assert_allclose(upper_delta, closed.s_upper, rtol=1e-7)


def test_envelopes_require_invariant_delta(slow_phase_config):
    with pytest.raises(InvalidInputError):
        integrator.integrate_envelopes(9.9, 0.1, slow_phase_config, 1e-5)
    envelopes = integrator.integrate_envelopes(
        9.9, 0.1, slow_phase_config, 0.0, IntegrationOptions(t_end=1.0), check_invariance=False
    )
    np.testing.assert_allclose(envelopes.upper_delta.component("upper_delta"), envelopes.lower.component("lower"))


def test_trajectory_frame_includes_event_row(phase_plane_config, options):
    trajectory = integrator.integrate_full(phase_plane_config, options.model_copy(update={"t_end": 0.5}))
    crossing = integrator.locate_crossing(trajectory, options)
    frame = trajectory.to_frame([crossing.t_cross])
    assert list(frame.columns) == ["t", "s", "c", "g_s", "L"]
    assert len(frame) == trajectory.n_steps + 2
    assert frame["t"].is_monotonic_increasing
    event = frame.loc[frame["t"] == crossing.t_cross].iloc[0]
    assert event["L"] == pytest.approx(0.0, abs=1e-8)


@pytest.mark.slow
@pytest.mark.parametrize("s0", S0_PANELS)
@pytest.mark.parametrize("e0", E0_GRID)
def test_crossing_bracket_on_grid(s0, e0, options):
    config = ReactionConfig.from_values(**GRID_RATES, s0=s0, e0=e0)
    crossing = integrator.find_crossing(config, options)
    bounds = crossing_time_bounds(config, 0.97)
    t = crossing.t_cross
    slack = 1e-9 * t + crossing.refinement_width

    assert crossing.sign_changes == 1
    assert bounds.t_ell_dagger <= bounds.t_ell + slack
    assert bounds.t_ell <= t + slack
    if check_upper_time_hypotheses(config, 0.97).all_hold:
        assert t <= bounds.t_u_q + slack
        assert bounds.t_u_q <= bounds.t_u_dagger_q + slack

    depletion = depletion_bounds(config, 0.97)
    measured = (config.s0 - crossing.s_cross) / config.s0
    if depletion.conds["lower_valid"]:
        assert depletion.lower <= measured + 1e-9
    if depletion.conds["upper_valid"]:
        assert measured <= depletion.upper + 1e-9
