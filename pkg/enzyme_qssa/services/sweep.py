import logging
from functools import cached_property
from pathlib import Path
from typing import Callable, Dict, List, Literal, Optional, Tuple, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, field_validator

from enzyme_qssa.analysis.asymptotics import small_e0_asymptotics, small_k1_asymptotics
from enzyme_qssa.analysis.transient import crossing_time_bounds, depletion_bounds
from enzyme_qssa.core.config import settings
from enzyme_qssa.core.exceptions import InvalidInputError
from enzyme_qssa.integration.integrator import integrator
from enzyme_qssa.integration.options import IntegrationOptions
from enzyme_qssa.integration.trajectory import CrossingRecord, Trajectory
from enzyme_qssa.kinetics.parameters import (
    DEFAULT_Q,
    ReactionConfig,
    delta_star,
    derive_constants,
    epsilon_suite,
    slow_error_params,
)
from enzyme_qssa.services.batch import run_batch
from enzyme_qssa.services.export import write_csv

logger = logging.getLogger(__name__)

Axis = Literal["e0", "s0", "k1", "k_m1", "k2"]


class SweepSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    base: ReactionConfig
    axis: Axis
    values: List[float] = Field(min_length=1)
    q: float = Field(default=DEFAULT_Q, gt=0, lt=1)
    outputs: List[str] = Field(min_length=1)

    @field_validator("values")
    @classmethod
    def values_positive(cls, values: List[float]) -> List[float]:
        if any(not v > 0 for v in values):
            raise ValueError("sweep values must be positive")
        return values


class SweepRow:
    """Lazily computed quantities for one member of a sweep."""

    def __init__(self, config: ReactionConfig, q: float, options: IntegrationOptions, full_course: bool = False):
        self.config = config
        self.q = q
        self.options = options
        # error outputs need the whole course; the crossing then comes from the same run
        self.needs_full_course = full_course

    @cached_property
    def suite(self):
        return epsilon_suite(self.config)

    @cached_property
    def bounds(self):
        return crossing_time_bounds(self.config, self.q)

    @cached_property
    def depletion(self):
        return depletion_bounds(self.config, self.q)

    @cached_property
    def slow(self):
        return slow_error_params(self.config, self.q)

    @cached_property
    def asymptotics(self):
        return small_k1_asymptotics(self.config)

    @cached_property
    def e0_asymptotics(self):
        return small_e0_asymptotics(self.config, self.q)

    @cached_property
    def full_course(self) -> Tuple[Trajectory, CrossingRecord]:
        self.config.require_positive()
        trajectory = integrator.integrate_full(self.config, self.options)
        return trajectory, integrator.locate_crossing(trajectory, self.options)

    @cached_property
    def crossing(self) -> CrossingRecord:
        if self.needs_full_course:
            return self.full_course[1]
        return integrator.find_crossing(self.config, self.options)

    @cached_property
    def slow_phase_error(self) -> float:
        trajectory, crossing = self.full_course
        follow = self.options.model_copy(update={"t_end": trajectory.t_end})
        xi = integrator.integrate_reduced(crossing.s_cross, crossing.t_cross, self.config, follow)
        times, states = trajectory.sample(settings.QSSA_DENSE_SAMPLES)
        after = times >= crossing.t_cross
        return float(np.max(np.abs(xi.value("xi", times[after]) - states[0][after])) / self.config.s0)

    @cached_property
    def t0_error(self) -> float:
        trajectory, _ = self.full_course
        follow = self.options.model_copy(update={"t_end": trajectory.t_end})
        z = integrator.integrate_reduced(self.config.s0, 0.0, self.config, follow)
        times, states = trajectory.sample(settings.QSSA_DENSE_SAMPLES)
        return float(np.max(np.abs(z.value("xi", times) - states[0])) / self.config.s0)


def _field(attribute: str, name: str) -> Callable[[SweepRow], float]:
    return lambda row: getattr(getattr(row, attribute), name)


def _pair(name: str, side: str) -> Callable[[SweepRow], float]:
    return lambda row: getattr(getattr(row.asymptotics, name), side)


QUANTITIES: Dict[str, Callable[[SweepRow], float]] = {
    **{name: _field("suite", name) for name in ("eps_BH", "eps_RS", "eps_SSl", "eps_MM", "eps_opt", "eta")},
    **{
        name: _field("bounds", name)
        for name in (
            "t_SSl", "t_ell", "t_ell_dagger", "t_u_q", "t_u_dagger_q", "t_u_dagger_1", "C_q", "C_star",
            "gap_rel", "t_hat", "t_star", "t_ell_dagger_asymptotic", "t_u_dagger_q_asymptotic",
            "t_u_dagger_1_asymptotic",
        )
    },
    **{
        name: _field("slow", name)
        for name in (
            "eps_L", "eps_W", "eps_dd", "eps_dag_L", "eps_dag_M", "eps_S_L", "eps_S_M", "Delta_star", "Delta_dstar",
        )
    },
    "lambda": _field("bounds", "lam"),
    "K_M": lambda row: derive_constants(row.config).K_M,
    "delta_star": lambda row: delta_star(row.config).delta_star,
    "depletion_lower": _field("depletion", "lower"),
    "depletion_upper": _field("depletion", "upper"),
    "depletion_upper_asymptotic": _field("depletion", "upper_asymptotic"),
    "t_cross": _field("crossing", "t_cross"),
    "s_cross": _field("crossing", "s_cross"),
    "c_cross": _field("crossing", "c_cross"),
    "depletion_measured": lambda row: (row.config.s0 - row.crossing.s_cross) / row.config.s0,
    "max_error_on_manifold": lambda row: row.slow_phase_error,
    "max_error_from_t0": lambda row: row.t0_error,
    **{
        f"{side}_k1_{name}": _pair(name, side)
        for name in ("eps_SSl", "t_SSl", "t_ell_dagger", "C_star", "t_u_dagger_1", "depletion")
        for side in ("exact", "asymptotic")
    },
    "eps_inf": _field("asymptotics", "eps_inf"),
    **{
        f"rel_gap_e0_{name}": (lambda row, name=name: getattr(row.e0_asymptotics, name).rel_gap)
        for name in ("t_ell_dagger", "t_u_dagger_q", "t_u_dagger_1", "depletion_upper")
    },
}


FULL_COURSE_OUTPUTS = frozenset({"max_error_on_manifold", "max_error_from_t0"})


class SweepRunner:
    def __init__(self):
        self.max_workers = settings.QSSA_MAX_WORKERS

    def validate_outputs(self, outputs: List[str]) -> None:
        unknown = [name for name in outputs if name not in QUANTITIES]
        if unknown:
            raise InvalidInputError(f"Unknown quantities {unknown}; valid names: {', '.join(sorted(QUANTITIES))}")

    def _row(self, spec: SweepSpec, value: float, options: IntegrationOptions) -> Dict[str, float]:
        full_course = bool(FULL_COURSE_OUTPUTS.intersection(spec.outputs))
        row = SweepRow(spec.base.with_value(spec.axis, value), spec.q, options, full_course)
        return {spec.axis: value, **{name: QUANTITIES[name](row) for name in spec.outputs}}

    def sweep(
        self, spec: SweepSpec, out_path: Union[str, Path, None] = None, options: Optional[IntegrationOptions] = None,
    ) -> pd.DataFrame:
        self.validate_outputs(spec.outputs)
        options = options or IntegrationOptions()
        rows = run_batch(lambda value: self._row(spec, value, options), spec.values, self.max_workers)
        frame = pd.DataFrame(rows, columns=[spec.axis, *spec.outputs])
        logger.info(f"Sweep over {spec.axis}: {len(frame)} rows, outputs {spec.outputs}")
        if out_path is not None:
            manifest = {
                "sweep": spec.model_dump(mode="json"),
                "integration": options.model_dump(mode="json"),
            }
            write_csv(frame, out_path, manifest)
        return frame


sweep_runner = SweepRunner()
