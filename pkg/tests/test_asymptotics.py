import pytest

from enzyme_qssa.analysis.asymptotics import small_e0_asymptotics, small_k1_asymptotics
from enzyme_qssa.analysis.reports import bound_report
from enzyme_qssa.kinetics.parameters import ReactionConfig


def test_small_k1_limits_are_approached():
    config = ReactionConfig.from_values(k1=1e-4, k_m1=100.0, k2=100.0, s0=200.0, e0=1.0)
    asymptotics = small_k1_asymptotics(config)
    assert asymptotics.C_star.exact == pytest.approx(2.0004, rel=1e-5)
    assert asymptotics.C_star.asymptotic == pytest.approx(2.0)
    for name, pair in asymptotics.pairs().items():
        assert pair.rel_gap < 1e-2, name


def test_eps_inf_is_reported_but_undefined(grid_config):
    asymptotics = small_k1_asymptotics(grid_config)
    assert not asymptotics.eps_inf_defined
    assert asymptotics.eps_inf == pytest.approx(0.005 * 0.5)
    assert asymptotics.eps_inf_note


def test_bound_report_contents(phase_plane_config):
    report = bound_report(phase_plane_config).to_dict()
    assert report["derived"]["K_M"] == pytest.approx(20.0)
    assert report["transient"]["lambda"] == pytest.approx(120.0)
    assert report["delta_star"]["delta_star"] > 0
    assert report["manifold_distance_rigorous"] > report["manifold_distance_half_forcing"]
    assert set(report["linear_lyapunov"]) == {"A_upper", "B_upper", "A_lower", "B_lower"}


def test_small_e0_gaps_shrink_monotonically():
    configs = [
        ReactionConfig.from_values(k1=1.0, k_m1=100.0, k2=100.0, s0=200.0, e0=10.0**-k) for k in range(1, 7)
    ]
    gaps = [small_e0_asymptotics(config).pairs() for config in configs]
    for name in ("t_ell_dagger", "t_u_dagger_1", "depletion_upper"):
        series = [pairs[name].rel_gap for pairs in gaps]
        assert all(later < earlier for earlier, later in zip(series, series[1:])), (name, series)
        assert series[-1] < 0.05, name


def test_small_e0_two_term_forms(grid_config):
    pairs = small_e0_asymptotics(grid_config, q=0.97)
    # exact t_ell_dagger carries the factor (1 - eps_SSl) that its two-term form drops
    assert pairs.t_ell_dagger.asymptotic * (1 - 1 / 400) == pytest.approx(pairs.t_ell_dagger.exact)
    assert pairs.depletion_upper.exact >= pairs.depletion_upper.asymptotic
