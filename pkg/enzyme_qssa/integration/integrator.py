import logging
import math
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np
from scipy.integrate import RK45, OdeSolution
from scipy.optimize import brentq

from enzyme_qssa.core.config import settings
from enzyme_qssa.core.exceptions import (
    HorizonError,
    InvalidInputError,
    StepLimitError,
    StiffnessError,
)
from enzyme_qssa.integration.options import IntegrationOptions
from enzyme_qssa.integration.trajectory import CrossingRecord, Trajectory
from enzyme_qssa.kinetics.mass_action import (
    HALF_FORCING,
    envelope_constant,
    full_rhs_array,
    qss_manifold,
    scalar_rhs_array,
)
from enzyme_qssa.kinetics.parameters import ReactionConfig, c_star, delta_star, segel_slemrod_time

logger = logging.getLogger(__name__)

DEPLETION_STOP = 1e-6
SLOW_TIMESCALES = 10.0
CROSSING_HORIZON_FACTOR = 10.0
SETTLING_HORIZON_FACTOR = 4.0
BRENTQ_RTOL = 4 * np.finfo(float).eps


class EnvelopeTrajectories(NamedTuple):
    lower: Trajectory
    upper_U: Trajectory
    upper_delta: Trajectory


class MassActionIntegrator:
    """Dormand-Prince 5(4) stepping with quartic dense output for the full, reduced and enclosure equations."""

    def auto_horizon(self, config: ReactionConfig) -> float:
        if config.e0 <= 0 or config.s0 <= 0:
            return SLOW_TIMESCALES * segel_slemrod_time(config)
        return SLOW_TIMESCALES * (config.K_M + config.s0) / (config.k2 * config.e0)

    def transient_horizon(self, config: ReactionConfig) -> float:
        """Long enough to contain the crossing, its upper estimates and the Lyapunov settling time."""
        auto = self.auto_horizon(config)
        if config.e0 <= 0 or config.s0 <= 0:
            return auto
        t_ssl = segel_slemrod_time(config)
        eps = config.e0 / (config.K_M + config.s0)
        t_u_dagger_1 = t_ssl * math.log1p(c_star(config) / eps)
        horizon = CROSSING_HORIZON_FACTOR * t_u_dagger_1
        eps_mm = (config.e0 / config.K_M) * config.k2 / (config.k_m1 + config.k2)
        if eps_mm < 1:
            t_hat = 2.0 / (config.k1 * config.K_M) * math.log(1.0 / eps_mm)
            horizon = max(horizon, SETTLING_HORIZON_FACTOR * t_hat)
        return min(auto, horizon)

    def _run(
        self,
        rhs: Callable,
        t0: float,
        y0: Sequence[float],
        t_end: float,
        config: ReactionConfig,
        options: IntegrationOptions,
        labels,
        stop: Optional[Callable[[np.ndarray], bool]] = None,
    ) -> Trajectory:
        if not t_end > t0:
            raise InvalidInputError(f"t_end={t_end} must exceed the initial time {t0}")
        atol = options.resolved_abs_tol(config)
        solver = RK45(rhs, t0, np.asarray(y0, dtype=float), t_end, rtol=options.rel_tol, atol=atol)

        times = [t0]
        states = [solver.y.copy()]
        interpolants = []
        while solver.status == "running":
            if len(interpolants) >= options.max_steps:
                logger.error(f"Step budget of {options.max_steps} exhausted at t={solver.t:.6g} for {config.label()}")
                raise StepLimitError(
                    f"max_steps={options.max_steps} exceeded before t_end={t_end:.6g}", t_reached=solver.t
                )
            message = solver.step()
            if solver.status == "failed":
                logger.error(f"Integration failed at t={solver.t:.6g} for {config.label()}: {message}")
                raise StiffnessError(
                    f"step size underflow at t={solver.t:.6g} (h={solver.step_size}): {message}",
                    t_reached=solver.t,
                )
            interpolants.append(solver.dense_output())
            times.append(solver.t)
            states.append(solver.y.copy())
            if stop is not None and stop(solver.y):
                break

        solution = OdeSolution(np.array(times), interpolants) if interpolants else None
        logger.debug(f"Integrated {labels} over [{t0:.6g}, {times[-1]:.6g}] in {len(interpolants)} steps")
        return Trajectory(np.array(times), np.array(states), solution, config, labels=labels)

    def integrate_full(self, config: ReactionConfig, options: Optional[IntegrationOptions] = None) -> Trajectory:
        options = options or IntegrationOptions()
        stop = None
        if options.t_end is None:
            t_end = self.auto_horizon(config)
            threshold = DEPLETION_STOP * config.s0
            if config.s0 > 0 and config.e0 > 0:
                stop = lambda y: y[0] <= threshold
        else:
            t_end = options.t_end
        return self._run(full_rhs_array(config), 0.0, (config.s0, 0.0), t_end, config, options, ("s", "c"), stop)

    def find_crossing(self, config: ReactionConfig, options: Optional[IntegrationOptions] = None) -> CrossingRecord:
        config.require_positive()
        options = options or IntegrationOptions()
        if options.t_end is None:
            options = options.model_copy(update={"t_end": self.transient_horizon(config)})
        trajectory = self.integrate_full(config, options)
        return self.locate_crossing(trajectory, options)

    def locate_crossing(self, trajectory: Trajectory, options: Optional[IntegrationOptions] = None) -> CrossingRecord:
        """Refine the sign change of h = c - g(s) on the dense interpolant."""
        options = options or IntegrationOptions()
        config = trajectory.config
        s = trajectory.component("s")
        c = trajectory.component("c")
        h = c - qss_manifold(s, config)

        above = np.flatnonzero(h >= 0)
        if above.size == 0 or above[0] == 0:
            raise HorizonError(
                f"no crossing of the QSS manifold before t_end={trajectory.t_end:.6g}", t_reached=trajectory.t_end
            )
        band = 10.0 * options.resolved_abs_tol(config)
        signs = np.sign(np.where(np.abs(h) > band, h, 0.0))
        signs = signs[signs != 0]
        sign_changes = int(np.count_nonzero(np.diff(signs)))

        idx = int(above[0])
        t_lo, t_hi = float(trajectory.times[idx - 1]), float(trajectory.times[idx])

        def h_of(t: float) -> float:
            y = trajectory(t)
            return float(y[1] - qss_manifold(y[0], config))

        xtol = options.resolved_event_tol(t_hi)
        if h_of(t_hi) <= 0.0:
            t_cross = t_hi
        else:
            t_cross = brentq(h_of, t_lo, t_hi, xtol=xtol, rtol=BRENTQ_RTOL)

        s_cross, c_cross = (float(v) for v in trajectory(t_cross))
        _, sampled = trajectory.sample(settings.QSSA_DENSE_SAMPLES)
        record = CrossingRecord(
            t_cross=t_cross,
            s_cross=s_cross,
            c_cross=c_cross,
            refinement_width=xtol + BRENTQ_RTOL * abs(t_cross),
            sign_changes=sign_changes,
            c_max_sampled=float(sampled[1].max()),
            residual=c_cross - float(qss_manifold(s_cross, config)),
        )
        logger.debug(f"Crossing at t={t_cross:.12g} (s={s_cross:.6g}, c={c_cross:.6g}) for {config.label()}")
        return record

    def _scalar_horizon(self, t_init: float, config: ReactionConfig, options: IntegrationOptions) -> float:
        if options.t_end is not None:
            if options.t_end <= t_init:
                raise InvalidInputError(f"t_end={options.t_end} must exceed t_init={t_init}")
            return options.t_end
        return t_init + self.auto_horizon(config)

    def _check_start(self, s_init: float, config: ReactionConfig):
        if not 0 < s_init <= config.s0 * (1.0 + 1e-12):
            raise InvalidInputError(f"initial substrate must lie in (0, s0={config.s0}], got {s_init}")

    def integrate_reduced(
        self, s_init: float, t_init: float, config: ReactionConfig, options: Optional[IntegrationOptions] = None
    ) -> Trajectory:
        options = options or IntegrationOptions()
        self._check_start(s_init, config)
        t_end = self._scalar_horizon(t_init, config, options)
        return self._run(scalar_rhs_array(config), t_init, (s_init,), t_end, config, options, ("xi",))

    def integrate_envelopes(
        self,
        s_tilde: float,
        t_tilde: float,
        config: ReactionConfig,
        delta: float,
        options: Optional[IntegrationOptions] = None,
        forcing: float = HALF_FORCING,
        check_invariance: bool = True,
    ) -> EnvelopeTrajectories:
        options = options or IntegrationOptions()
        self._check_start(s_tilde, config)
        if not 0.0 <= delta < 1.0:
            raise InvalidInputError(f"delta must lie in [0, 1), got {delta}")
        if check_invariance:
            minimum = delta_star(config).delta_star
            if delta < minimum * (1.0 - 1e-12):
                raise InvalidInputError(
                    f"delta={delta} is below delta*={minimum}; the enclosing region is not invariant"
                )
        t_end = self._scalar_horizon(t_tilde, config, options)
        start = (s_tilde,)
        lower = self._run(scalar_rhs_array(config), t_tilde, start, t_end, config, options, ("lower",))
        upper_U = self._run(
            scalar_rhs_array(config, constant=envelope_constant(config, forcing)),
            t_tilde, start, t_end, config, options, ("upper_U",),
        )
        upper_delta = self._run(
            scalar_rhs_array(config, scale=1.0 - delta), t_tilde, start, t_end, config, options, ("upper_delta",)
        )
        return EnvelopeTrajectories(lower=lower, upper_U=upper_U, upper_delta=upper_delta)


integrator = MassActionIntegrator()
