import numpy as np
import pytest

from enzyme_qssa.core.exceptions import InvalidInputError
from enzyme_qssa.kinetics.mass_action import (
    RIGOROUS_FORCING,
    State,
    envelope_constant,
    envelope_rates,
    first_order_manifold,
    full_rhs,
    full_rhs_rewritten,
    linear_lyapunov_rates,
    product_concentration,
    qss_manifold,
    qss_manifold_slope,
    reduced_rhs,
)


def test_full_rhs_at_initial_state(phase_plane_config):
    ds, dc = full_rhs(State(100.0, 0.0), phase_plane_config)
    assert ds == pytest.approx(-500.0)
    assert dc == pytest.approx(500.0)


def test_rewritten_field_agrees(phase_plane_config):
    rng = np.random.default_rng(11)
    s = rng.uniform(0, 100, size=50)
    c = rng.uniform(0, 5, size=50)
    direct = full_rhs(State(s, c), phase_plane_config)
    rewritten = full_rhs_rewritten(State(s, c), phase_plane_config)
    np.testing.assert_allclose(rewritten.ds_dt, direct.ds_dt, rtol=1e-10, atol=1e-10)
    np.testing.assert_allclose(rewritten.dc_dt, direct.dc_dt, rtol=1e-10, atol=1e-10)


def test_manifold_and_reduced_rhs(phase_plane_config):
    assert qss_manifold(50.0, phase_plane_config) == pytest.approx(250 / 70)
    assert reduced_rhs(100.0, phase_plane_config) == pytest.approx(-41.6667, rel=1e-5)
    # g_1 is the s-nullcline
    s = 30.0
    c = qss_manifold(s, phase_plane_config, 1.0)
    assert full_rhs(State(s, c), phase_plane_config).ds_dt == pytest.approx(0.0, abs=1e-12)


def test_manifold_family_is_ordered(phase_plane_config):
    s = np.linspace(0.1, 100, 20)
    g0 = qss_manifold(s, phase_plane_config)
    g_half = qss_manifold(s, phase_plane_config, 0.5)
    g1 = qss_manifold(s, phase_plane_config, 1.0)
    assert np.all(g0 < g_half) and np.all(g_half < g1)
    with pytest.raises(InvalidInputError):
        qss_manifold(s, phase_plane_config, 1.5)


def test_slope_and_first_order(phase_plane_config):
    h = 1e-6
    s = 40.0
    numeric = (qss_manifold(s + h, phase_plane_config) - qss_manifold(s - h, phase_plane_config)) / (2 * h)
    assert qss_manifold_slope(s, phase_plane_config) == pytest.approx(numeric, rel=1e-6)
    assert first_order_manifold(s, phase_plane_config) == pytest.approx(5 * 40 / 20)


def test_envelope_rates_reference(slow_phase_config):
    assert envelope_constant(slow_phase_config) == pytest.approx(0.0385694, rel=1e-5)
    rates = envelope_rates(10.0, slow_phase_config)
    assert rates.U == pytest.approx(-9.05234, rel=1e-5)
    assert rates.U_tilde == pytest.approx(1000 / 110 + 0.0385694, rel=1e-5)
    assert envelope_constant(slow_phase_config, RIGOROUS_FORCING) == pytest.approx(0.0385694 * np.sqrt(2), rel=1e-5)


def test_linear_lyapunov_rates_positive(phase_plane_config):
    rates = linear_lyapunov_rates(np.linspace(1, 100, 10), phase_plane_config)
    assert np.all(rates.A > 0)
    assert np.all(rates.B > 0)


def test_product_concentration(phase_plane_config):
    assert product_concentration(State(60.0, 2.0), phase_plane_config) == pytest.approx(38.0)
