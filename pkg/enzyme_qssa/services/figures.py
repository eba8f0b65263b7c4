import json
import logging
import math
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel

from enzyme_qssa.analysis.slow_phase import T0BoundMode, t0_error_bound
from enzyme_qssa.analysis.transient import check_upper_time_hypotheses, crossing_time_bounds
from enzyme_qssa.core.config import settings
from enzyme_qssa.core.exceptions import InvalidInputError
from enzyme_qssa.integration.integrator import integrator
from enzyme_qssa.integration.options import IntegrationOptions
from enzyme_qssa.kinetics.mass_action import qss_manifold
from enzyme_qssa.kinetics.parameters import (
    DEFAULT_Q,
    ReactionConfig,
    delta_star,
    epsilon_suite,
    slow_error_params,
)
from enzyme_qssa.services.batch import run_batch
from enzyme_qssa.services.export import write_csv, write_json

logger = logging.getLogger(__name__)

E0_GRID = [0.025, 0.05, 0.075, 0.1, 0.25, 0.5, 0.75, 1.0, 2.5, 5.0, 7.5, 10.0]
S0_PANELS = [2.0, 20.0, 200.0, 2000.0]

PHASE_PLANE = dict(k1=1.0, k_m1=10.0, k2=10.0, s0=100.0, e0=5.0)
GRID_RATES = dict(k1=1.0, k_m1=100.0, k2=100.0)
SLOW_PHASE_PANELS = {
    "top": dict(k1=2.0, k_m1=100.0, k2=100.0, s0=10.0, e0=10.0),
    "bottom": dict(k1=2.0, k_m1=100.0, k2=100.0, s0=10.0, e0=1.0),
}
T0_PANELS = {
    "top": dict(k1=2.0, k_m1=100.0, k2=100.0, s0=10.0, e0=10.0),
    "bottom": dict(k1=2.0, k_m1=100.0, k2=100.0, s0=100.0, e0=1.0),
}
ETA_PANELS = {
    "top": dict(k1=2.0, k_m1=100.0, k2=1.0, s0=10.0),
    "bottom": dict(k1=2.0, k_m1=1.0, k2=100.0, s0=10.0),
}
NULLCLINE_POINTS = 201


class FigureDataset(BaseModel):
    figure_id: str
    files: List[str]
    manifest: Dict[str, Any]


def compactified_time(t) -> np.ndarray:
    """Maps [0, inf) onto [0, 1): t -> 1 - 1/log(t + e)."""
    return 1.0 - 1.0 / np.log(np.asarray(t, dtype=float) + math.e)


def _config(values: Dict[str, float]) -> ReactionConfig:
    return ReactionConfig.from_values(**values)


class FigureBuilder:
    """Regenerates the CSV data behind each figure."""

    def __init__(self):
        self.dense_samples = settings.QSSA_DENSE_SAMPLES
        self.figures: Dict[str, Callable] = {
            "fig1": self._phase_plane,
            "fig2": self._crossing_grid,
            "figww": self._slow_phase_error,
            "figxx": self._t0_running_bound,
            "figyy": self._crossing_error_grid,
            "figzz": self._eta_regimes,
            "figxxz": self._t0_full_course,
        }

    def run_figure(
        self, figure_id: str, out_dir: Union[str, Path, None] = None, options: Optional[IntegrationOptions] = None,
    ) -> FigureDataset:
        if figure_id not in self.figures:
            raise InvalidInputError(f"Unknown figure '{figure_id}', expected one of {sorted(self.figures)}")
        out_dir = Path(out_dir or settings.QSSA_OUT_DIR)
        options = options or IntegrationOptions()
        logger.info(f"Building {figure_id}", extra={"figure_id": figure_id})

        frames, parameters = self.figures[figure_id](options)
        manifest = {
            "figure_id": figure_id,
            "parameters": parameters,
            "integration": options.model_dump(mode="json"),
            "dense_samples": self.dense_samples,
        }
        files = []
        for name, frame in frames.items():
            path = write_csv(frame, out_dir / f"{figure_id}_{name}.csv", manifest)
            files.append(str(path))
        write_json(manifest, out_dir / f"{figure_id}_manifest.json")
        logger.info(f"{figure_id}: {len(files)} files written to {out_dir}", extra={"figure_id": figure_id})
        return FigureDataset(figure_id=figure_id, files=files, manifest=manifest)

    def rerun(self, manifest_path: Union[str, Path], out_dir: Union[str, Path, None] = None) -> FigureDataset:
        manifest = json.loads(Path(manifest_path).read_text())
        options = IntegrationOptions(**manifest.get("integration", {}))
        return self.run_figure(manifest["figure_id"], out_dir or Path(manifest_path).parent, options)

    def _phase_plane(self, options: IntegrationOptions) -> Tuple[Dict[str, pd.DataFrame], Dict]:
        config = _config(PHASE_PLANE)
        trajectory = integrator.integrate_full(config, options)
        crossing = integrator.locate_crossing(trajectory, options)

        s = np.linspace(0.0, config.s0, NULLCLINE_POINTS)
        nullclines = pd.DataFrame({
            "s": s,
            "g_0": qss_manifold(s, config),
            "g_1": qss_manifold(s, config, 1.0),
            "g_delta_star": qss_manifold(s, config, delta_star(config).delta_star),
        })
        parameters = {"config": PHASE_PLANE, "crossing": crossing.model_dump()}
        return {"trajectory": trajectory.to_frame([crossing.t_cross]), "nullclines": nullclines}, parameters

    def _crossing_row(self, config: ReactionConfig, options: IntegrationOptions, q: float = DEFAULT_Q) -> Dict:
        suite = epsilon_suite(config)
        bounds = crossing_time_bounds(config, q)
        crossing = integrator.find_crossing(config, options)
        return {
            "e0": config.e0,
            "eps_RS": suite.eps_RS,
            "eps_SSl": suite.eps_SSl,
            "t_cross": crossing.t_cross,
            "t_ell": bounds.t_ell,
            "t_ell_dagger": bounds.t_ell_dagger,
            "t_u_q": bounds.t_u_q,
            "t_u_dagger_q": bounds.t_u_dagger_q,
            "t_u_dagger_1": bounds.t_u_dagger_1,
            "hypotheses_hold": check_upper_time_hypotheses(config, q).all_hold,
        }

    def _grid_configs(self, s0: float) -> List[ReactionConfig]:
        return [_config({**GRID_RATES, "s0": s0, "e0": e0}) for e0 in E0_GRID]

    def _crossing_grid(self, options: IntegrationOptions):
        frames = {}
        for s0 in S0_PANELS:
            rows = run_batch(lambda config: self._crossing_row(config, options), self._grid_configs(s0))
            frames[f"s0_{s0:g}"] = pd.DataFrame(rows)
        parameters = {"rates": GRID_RATES, "s0": S0_PANELS, "e0": E0_GRID, "q": DEFAULT_Q}
        return frames, parameters

    def _slow_phase_panel(self, values: Dict[str, float], options: IntegrationOptions) -> pd.DataFrame:
        config = _config(values)
        trajectory = integrator.integrate_full(config, options)
        crossing = integrator.locate_crossing(trajectory, options)
        follow = options.model_copy(update={"t_end": trajectory.t_end})
        xi = integrator.integrate_reduced(crossing.s_cross, crossing.t_cross, config, follow)

        times, states = trajectory.sample(self.dense_samples)
        after = times >= crossing.t_cross
        t = times[after]
        shifted = t - crossing.t_cross
        params = slow_error_params(config)
        return pd.DataFrame({
            "t": t,
            "t_inf": compactified_time(shifted),
            "error": np.abs(xi.value("xi", t) - states[0][after]) / config.s0,
            "eps_L": params.eps_L,
            "eps_W": params.eps_W,
            "eps_opt": params.eps_opt,
        })

    def _slow_phase_error(self, options: IntegrationOptions):
        frames = {name: self._slow_phase_panel(values, options) for name, values in SLOW_PHASE_PANELS.items()}
        return frames, {"panels": SLOW_PHASE_PANELS}

    def _t0_comparison(self, config: ReactionConfig, options: IntegrationOptions):
        trajectory = integrator.integrate_full(config, options)
        crossing = integrator.locate_crossing(trajectory, options)
        follow = options.model_copy(update={"t_end": trajectory.t_end})
        z = integrator.integrate_reduced(config.s0, 0.0, config, follow)
        times, states = trajectory.sample(self.dense_samples)
        return trajectory, crossing, z, times, states

    def _t0_running_bound(self, options: IntegrationOptions):
        frames, crossings = {}, {}
        for name, values in T0_PANELS.items():
            config = _config(values)
            _, crossing, z, times, states = self._t0_comparison(config, options)
            before = times <= crossing.t_cross
            t = times[before]
            s = states[0][before]
            z_t = z.value("xi", t)
            running = t0_error_bound(config, DEFAULT_Q, T0BoundMode.RUNNING, crossing)
            frames[name] = pd.DataFrame({
                "tau": t / crossing.t_cross,
                "t": t,
                "s_over_s0": s / config.s0,
                "z_over_s0": z_t / config.s0,
                "error": (z_t - s) / config.s0,
                "running_bound": running(t),
            })
            crossings[name] = {
                "t_cross": crossing.t_cross,
                "s_cross": crossing.s_cross,
                "exact_a": t0_error_bound(config, DEFAULT_Q, T0BoundMode.EXACT_A, crossing),
            }
        return frames, {"panels": T0_PANELS, "crossings": crossings}

    def _t0_full_course(self, options: IntegrationOptions):
        frames, crossings = {}, {}
        for name, values in T0_PANELS.items():
            config = _config(values)
            _, crossing, z, times, states = self._t0_comparison(config, options)
            frames[name] = pd.DataFrame({
                "t": times,
                "t_inf": compactified_time(times),
                "error": np.abs(z.value("xi", times) - states[0]) / config.s0,
                "eps_opt": epsilon_suite(config).eps_opt,
            })
            crossings[name] = {"t_cross": crossing.t_cross, "t_inf_cross": float(compactified_time(crossing.t_cross))}
        return frames, {"panels": T0_PANELS, "crossings": crossings}

    def _error_at_crossing(self, config: ReactionConfig, options: IntegrationOptions) -> Dict:
        suite = epsilon_suite(config)
        crossing = integrator.find_crossing(config, options)
        follow = options.model_copy(update={"t_end": crossing.t_cross})
        z = integrator.integrate_reduced(config.s0, 0.0, config, follow)
        z_cross = float(z.component("xi")[-1])
        return {
            "e0": config.e0,
            "eps_RS": suite.eps_RS,
            "eps_SSl": suite.eps_SSl,
            "eps_opt": suite.eps_opt,
            "eta": suite.eta,
            "t_cross": crossing.t_cross,
            "error_at_t_cross": abs(z_cross - crossing.s_cross) / config.s0,
        }

    def _crossing_error_grid(self, options: IntegrationOptions):
        frames = {}
        for s0 in S0_PANELS:
            rows = run_batch(lambda config: self._error_at_crossing(config, options), self._grid_configs(s0))
            frames[f"s0_{s0:g}"] = pd.DataFrame(rows)
        return frames, {"rates": GRID_RATES, "s0": S0_PANELS, "e0": E0_GRID}

    def _eta_regimes(self, options: IntegrationOptions):
        frames = {}
        for name, values in ETA_PANELS.items():
            configs = [_config({**values, "e0": e0}) for e0 in E0_GRID]
            rows = run_batch(lambda config: self._error_at_crossing(config, options), configs)
            frames[name] = pd.DataFrame(rows)
        return frames, {"panels": ETA_PANELS, "e0": E0_GRID}


figure_builder = FigureBuilder()
