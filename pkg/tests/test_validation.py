import json

import numpy as np
import pytest

from enzyme_qssa.core.exceptions import InvalidInputError
from enzyme_qssa.integration.options import IntegrationOptions
from enzyme_qssa.kinetics.parameters import ReactionConfig, delta_star
from enzyme_qssa.services.validation import Scenario, Severity, SuiteReport, validation_suite


def test_transient_battery_passes(phase_plane_config, options):
    results = validation_suite.check_config(phase_plane_config, options=options)
    names = {r.name for r in results}
    assert {"crossing_lemma", "crossing_bracket", "depletion", "substrate_envelopes", "lyapunov_l2",
            "manifold_distance_after_t_hat", "invariant_region"} <= names
    hard = [r for r in results if r.severity is Severity.HARD]
    assert all(r.passed for r in hard), [r for r in hard if not r.passed]


def test_bracket_upper_side_via_direct_condition(grid_config, options):
    result = validation_suite.verify_bracket(grid_config, options=options)
    assert result.passed
    assert "exp(-gamma)" in result.notes


def test_invariant_region_delta_zero_is_vacuous(phase_plane_config):
    result = validation_suite.verify_invariant_region(phase_plane_config, 0.0)
    assert result.passed
    assert "vacuous" in result.notes


def test_invariant_region_rejects_small_delta(phase_plane_config):
    with pytest.raises(InvalidInputError):
        validation_suite.verify_invariant_region(phase_plane_config, 1e-4)


def test_no_enzyme_is_vacuous():
    config = ReactionConfig.from_values(k1=1.0, k_m1=1.0, k2=1.0, s0=1.0, e0=0.0)
    results = validation_suite.check_config(config)
    assert [r.name for r in results] == ["crossing_lemma"]
    assert results[0].passed


def test_integration_failure_becomes_failed_check(phase_plane_config):
    results = validation_suite.check_config(phase_plane_config, options=IntegrationOptions(max_steps=3))
    assert len(results) == 1
    assert results[0].name == "integration"
    assert not results[0].passed
    assert not SuiteReport(results=results).all_hard_passed


def test_unknown_scope(phase_plane_config):
    with pytest.raises(InvalidInputError):
        validation_suite.check_config(phase_plane_config, scope="everything")


def test_suite_report_json(phase_plane_config, grid_config, options):
    report = validation_suite.run_suite([phase_plane_config, grid_config], options=options)
    payload = json.loads(report.to_json())
    assert payload["all_hard_passed"]
    assert payload["n_checks"] == len(report.results)
    labels = {r["config_label"] for r in payload["results"]}
    assert labels == {phase_plane_config.label(), grid_config.label()}


@pytest.mark.slow
def test_slow_phase_battery_passes(slow_phase_config, options):
    results = validation_suite.verify_slow_error(slow_phase_config, Scenario.ON_MANIFOLD, options)
    results += validation_suite.verify_slow_error(slow_phase_config, Scenario.FROM_T0, options)
    hard = [r for r in results if r.severity is Severity.HARD]
    assert {r.name for r in hard} == {
        "slow_error_eps_L", "slow_error_eps_W", "enclosure_sandwich", "enclosure_gap_eps_L", "t0_running_bound",
    }
    assert all(r.passed for r in hard), [r for r in hard if not r.passed]


def _random_configs(count: int, seed: int):
    rng = np.random.default_rng(seed)
    configs = []
    for _ in range(count):
        k1, k_m1, k2 = 10 ** rng.uniform(-1, 1, size=3)
        s0 = 10 ** rng.uniform(-1, 2)
        K_M = (k_m1 + k2) / k1
        eps_rs = 10 ** rng.uniform(-3, -1)
        configs.append(ReactionConfig.from_values(k1=k1, k_m1=k_m1, k2=k2, s0=s0, e0=eps_rs * K_M))
    return configs


@pytest.mark.slow
def test_crossing_and_invariant_region_on_random_configs(options):
    for config in _random_configs(200, seed=11):
        lemma = validation_suite.verify_crossing_lemma(config, options)
        assert lemma.passed, lemma
        region = validation_suite.verify_invariant_region(config, delta_star(config).delta_star, options)
        assert region.passed, region


@pytest.mark.slow
def test_slow_error_folds_into_one_verdict(slow_phase_config, options):
    results = validation_suite.verify_slow_error(slow_phase_config, Scenario.FROM_T0, options)
    assert [(r.name, r.severity) for r in results] == [
        ("t0_running_bound", Severity.HARD), ("t0_eps_opt", Severity.SOFT),
    ]
    assert SuiteReport(results=results).all_hard_passed
