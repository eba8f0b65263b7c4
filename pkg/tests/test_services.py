import json

import numpy as np
import pandas as pd
import pytest

from enzyme_qssa.core.exceptions import InvalidInputError
from enzyme_qssa.services.batch import run_batch
from enzyme_qssa.services.export import manifest_hash, read_csv, read_manifest_hash, write_csv
from enzyme_qssa.services.figures import compactified_time, figure_builder
from enzyme_qssa.services.quick_reference import quick_reference, write_quick_reference
from enzyme_qssa.services.sweep import SweepSpec, sweep_runner


def test_run_batch_keeps_order():
    assert run_batch(lambda x: x * x, range(10), limit=3) == [x * x for x in range(10)]


def test_csv_carries_manifest_hash(tmp_path):
    frame = pd.DataFrame({"t": [0.0, 0.1 + 0.2], "s": [1.0, 1 / 3]})
    manifest = {"figure_id": "fig1", "q": 0.97}
    path = write_csv(frame, tmp_path / "out" / "data.csv", manifest)
    assert read_manifest_hash(path) == manifest_hash(manifest)
    loaded = read_csv(path)
    assert loaded["t"].iloc[1] == 0.1 + 0.2
    assert loaded["s"].iloc[1] == 1 / 3


def test_manifest_hash_ignores_key_order():
    assert manifest_hash({"a": 1, "b": 2}) == manifest_hash({"b": 2, "a": 1})


def test_compactified_time():
    assert compactified_time(0.0) == pytest.approx(0.0)
    values = compactified_time(np.array([1.0, 10.0, 1e6]))
    assert np.all(np.diff(values) > 0) and np.all(values < 1)


def test_phase_plane_figure(tmp_path, options):
    dataset = figure_builder.run_figure("fig1", tmp_path, options)
    assert sorted(dataset.files) == sorted(str(tmp_path / f"fig1_{name}.csv") for name in ("trajectory", "nullclines"))
    nullclines = read_csv(tmp_path / "fig1_nullclines.csv")
    assert list(nullclines.columns) == ["s", "g_0", "g_1", "g_delta_star"]
    assert np.all(nullclines["g_0"] <= nullclines["g_delta_star"])
    assert np.all(nullclines["g_delta_star"] <= nullclines["g_1"])
    trajectory = read_csv(tmp_path / "fig1_trajectory.csv")
    assert trajectory["t"].is_monotonic_increasing
    manifest = json.loads((tmp_path / "fig1_manifest.json").read_text())
    assert read_manifest_hash(tmp_path / "fig1_trajectory.csv") == manifest_hash(manifest)


def test_figure_rerun_reproduces_manifest(tmp_path, options):
    first = figure_builder.run_figure("fig1", tmp_path / "a", options)
    second = figure_builder.rerun(tmp_path / "a" / "fig1_manifest.json", tmp_path / "b")
    assert first.manifest == second.manifest
    a = read_csv(tmp_path / "a" / "fig1_trajectory.csv")
    b = read_csv(tmp_path / "b" / "fig1_trajectory.csv")
    pd.testing.assert_frame_equal(a, b)


def test_unknown_figure(tmp_path):
    with pytest.raises(InvalidInputError):
        figure_builder.run_figure("fig9", tmp_path)


@pytest.mark.slow
def test_slow_phase_figure_stays_below_eps_L(tmp_path, options):
    figure_builder.run_figure("figww", tmp_path, options)
    bottom = read_csv(tmp_path / "figww_bottom.csv")
    assert bottom["error"].max() <= bottom["eps_L"].iloc[0] * (1 + 1e-6)


def test_sweep_closed_form_outputs(phase_plane_config, tmp_path):
    spec = SweepSpec(base=phase_plane_config, axis="e0", values=[1.0, 5.0], outputs=["eps_SSl", "K_M", "lambda"])
    frame = sweep_runner.sweep(spec, tmp_path / "sweep.csv")
    assert list(frame.columns) == ["e0", "eps_SSl", "K_M", "lambda"]
    assert frame["eps_SSl"].tolist() == pytest.approx([1 / 120, 5 / 120])
    assert frame["lambda"].tolist() == pytest.approx([120.0, 120.0])
    assert read_csv(tmp_path / "sweep.csv").shape == (2, 4)


def test_sweep_measured_crossing(phase_plane_config, options):
    spec = SweepSpec(base=phase_plane_config, axis="e0", values=[1.0, 5.0], outputs=["t_cross", "t_ell"])
    frame = sweep_runner.sweep(spec, options=options)
    assert np.all(frame["t_cross"] >= frame["t_ell"])


def test_sweep_rejects_unknown_output(phase_plane_config):
    spec = SweepSpec(base=phase_plane_config, axis="s0", values=[1.0], outputs=["speed_of_light"])
    with pytest.raises(InvalidInputError):
        sweep_runner.sweep(spec)


def test_quick_reference(phase_plane_config, tmp_path):
    payload = quick_reference(phase_plane_config)
    assert payload["constants"]["K_M"] == pytest.approx(20.0)
    assert payload["timescale"]["eps_SSl"] == pytest.approx(5 / 120)
    assert [row["symbol"] for row in payload["estimates"]] == ["Delta_dstar", "t_star", "eps_dd", "eps_opt", "eps_SSl"]
    descriptions = {row["symbol"]: row["estimates"] for row in payload["estimates"]}
    assert descriptions["eps_opt"] == "MM approximation error bound"
    assert descriptions["t_star"] == "QSS onset time"
    assert payload["notes"]["eps_inf"]
    path = write_quick_reference(phase_plane_config, 0.97, tmp_path / "report.json")
    assert json.loads(path.read_text())["constants"]["K_M"] == pytest.approx(20.0)


def test_sweep_integrates_full_system_once_per_row(phase_plane_config, options, monkeypatch):
    from enzyme_qssa.integration.integrator import integrator

    calls = []
    integrate_full = integrator.integrate_full

    def counting(config, run_options=None):
        calls.append(config.e0)
        return integrate_full(config, run_options)

    monkeypatch.setattr(integrator, "integrate_full", counting)
    spec = SweepSpec(
        base=phase_plane_config, axis="e0", values=[5.0],
        outputs=["t_cross", "depletion_measured", "max_error_on_manifold", "max_error_from_t0"],
    )
    frame = sweep_runner.sweep(spec, options=options.model_copy(update={"t_end": 2.0}))
    assert calls == [5.0]
    assert frame["t_cross"].iloc[0] > 0
    assert frame["max_error_from_t0"].iloc[0] >= 0


def test_sweep_small_e0_gap_outputs(grid_config):
    spec = SweepSpec(base=grid_config, axis="e0", values=[0.1, 0.001], outputs=["rel_gap_e0_t_u_dagger_1"])
    gaps = sweep_runner.sweep(spec)["rel_gap_e0_t_u_dagger_1"].tolist()
    assert gaps[1] < gaps[0]
