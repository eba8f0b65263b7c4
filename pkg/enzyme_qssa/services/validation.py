import asyncio
import enum
import functools
import json
import logging
import math
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from enzyme_qssa.analysis.slow_phase import T0BoundMode, t0_error_bound
from enzyme_qssa.analysis.transient import (
    check_upper_time_hypotheses,
    complex_ceiling,
    crossing_time_bounds,
    depletion_bounds,
    lyapunov_l2_bound,
    manifold_distance_bound,
    substrate_envelopes,
)
from enzyme_qssa.core.config import settings
from enzyme_qssa.core.exceptions import DomainError, IntegrationError, InvalidInputError
from enzyme_qssa.integration.integrator import integrator
from enzyme_qssa.integration.options import IntegrationOptions
from enzyme_qssa.integration.trajectory import CrossingRecord, Trajectory
from enzyme_qssa.kinetics.mass_action import (
    HALF_FORCING,
    RIGOROUS_FORCING,
    State,
    full_rhs,
    qss_manifold,
)
from enzyme_qssa.kinetics.parameters import (
    DEFAULT_Q,
    ReactionConfig,
    delta_star,
    epsilon_suite,
    slow_error_params,
)
from enzyme_qssa.services.batch import bounded_gather

logger = logging.getLogger(__name__)


class Severity(str, enum.Enum):
    HARD = "hard"
    SOFT = "soft"


class Scenario(str, enum.Enum):
    ON_MANIFOLD = "on_manifold"
    FROM_T0 = "from_t0"


class CheckResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    passed: bool
    worst_margin: float
    worst_t: Optional[float] = None
    notes: str = ""
    severity: Severity = Severity.HARD
    skipped: bool = False
    config_label: str = ""


class SuiteReport(BaseModel):
    results: List[CheckResult]

    @property
    def hard_failures(self) -> List[CheckResult]:
        return [r for r in self.results if r.severity is Severity.HARD and not r.passed]

    @property
    def soft_failures(self) -> List[CheckResult]:
        return [r for r in self.results if r.severity is Severity.SOFT and not r.passed]

    @property
    def all_hard_passed(self) -> bool:
        return not self.hard_failures

    def to_json(self) -> str:
        payload = {
            "all_hard_passed": self.all_hard_passed,
            "n_checks": len(self.results),
            "n_hard_failures": len(self.hard_failures),
            "n_soft_failures": len(self.soft_failures),
            "results": [r.model_dump(mode="json") for r in self.results],
        }
        return json.dumps(payload, indent=2)


Part = Tuple[float, Optional[float], str]


def _worst(margins: np.ndarray, times: np.ndarray, note: str) -> Part:
    if margins.size == 0:
        return math.inf, None, note
    i = int(np.argmin(margins))
    return float(margins[i]), float(times[i]), note


def _result(
    name: str,
    parts: Sequence[Part],
    slack: float,
    config: ReactionConfig,
    severity: Severity = Severity.HARD,
    notes: str = "",
) -> CheckResult:
    margin, worst_t, worst_note = min(parts, key=lambda part: part[0])
    passed = margin >= -slack
    details = [notes] if notes else []
    if not passed:
        details.append(f"violated: {worst_note}")
    result = CheckResult(
        name=name,
        passed=passed,
        worst_margin=margin,
        worst_t=worst_t,
        notes="; ".join(details),
        severity=severity,
        config_label=config.label(),
    )
    log = logger.info if passed or severity is Severity.SOFT else logger.warning
    log(
        f"{name} {'passed' if passed else 'FAILED'} (worst margin {margin:.3e}, slack {slack:.1e})",
        extra={"check_name": name, "config_label": result.config_label},
    )
    return result


def _vacuous(name: str, config: ReactionConfig, notes: str, severity: Severity = Severity.HARD, skipped: bool = False):
    logger.info(f"{name}: {notes}", extra={"check_name": name, "config_label": config.label()})
    return CheckResult(
        name=name, passed=True, worst_margin=0.0, notes=notes, severity=severity,
        skipped=skipped, config_label=config.label(),
    )


@functools.lru_cache(maxsize=64)
def _transient_run(config: ReactionConfig, options: IntegrationOptions) -> Tuple[Trajectory, CrossingRecord, IntegrationOptions]:
    if options.t_end is None:
        options = options.model_copy(update={"t_end": integrator.transient_horizon(config)})
    trajectory = integrator.integrate_full(config, options)
    return trajectory, integrator.locate_crossing(trajectory, options), options


@functools.lru_cache(maxsize=16)
def _full_course_run(config: ReactionConfig, options: IntegrationOptions) -> Tuple[Trajectory, CrossingRecord]:
    trajectory = integrator.integrate_full(config, options)
    return trajectory, integrator.locate_crossing(trajectory, options)


class ValidationSuite:
    """Checks closed-form inequalities against integrated trajectories."""

    def __init__(self):
        self.dense_samples = settings.QSSA_DENSE_SAMPLES
        self.max_workers = settings.QSSA_MAX_WORKERS

    def _options(self, options: Optional[IntegrationOptions]) -> IntegrationOptions:
        return options or IntegrationOptions()

    def verify_crossing_lemma(self, config: ReactionConfig, options: Optional[IntegrationOptions] = None) -> CheckResult:
        name = "crossing_lemma"
        if config.e0 <= 0 or config.s0 <= 0:
            return _vacuous(name, config, "no dynamics for e0 = 0 or s0 = 0; vacuous pass")
        trajectory, crossing, options = _transient_run(config, self._options(options))
        c_tilde = complex_ceiling(config)
        slack = options.numerical_slack(config, c_tilde)

        parts: List[Part] = []
        unique = 0.0 if crossing.sign_changes == 1 else -1.0
        parts.append((unique, crossing.t_cross, f"{crossing.sign_changes} sign changes of c - g(s)"))

        times, values = trajectory.sample(self.dense_samples)
        parts.append(_worst((crossing.c_cross - values[1]) / c_tilde, times, "c exceeds c(t_cross)"))

        steps = trajectory.times
        s, c = trajectory.component("s"), trajectory.component("c")
        dc = full_rhs(State(s, c), config).dc_dt / (config.k1 * config.e0 * config.s0)
        before = steps < crossing.t_cross
        parts.append(_worst(dc[before], steps[before], "c decreasing before t_cross"))
        parts.append(_worst(-dc[~before], steps[~before], "c increasing after t_cross"))
        parts.append(_worst(-np.diff(s) / config.s0, steps[1:], "s increasing"))

        return _result(name, parts, slack, config, notes=f"t_cross={crossing.t_cross:.12g}")

    def verify_bracket(
        self, config: ReactionConfig, q: float = DEFAULT_Q, options: Optional[IntegrationOptions] = None
    ) -> CheckResult:
        name = "crossing_bracket"
        bounds = crossing_time_bounds(config, q)
        _, crossing, options = _transient_run(config, self._options(options))
        t = crossing.t_cross
        slack = settings.QSSA_SLACK_FACTOR * options.rel_tol + crossing.refinement_width / t

        parts: List[Part] = [
            ((t - bounds.t_ell) / t, t, "t_cross < t_ell"),
            ((bounds.t_ell - bounds.t_ell_dagger) / t, t, "t_ell < t_ell_dagger"),
        ]
        hypotheses = check_upper_time_hypotheses(config, q)
        direct = depletion_bounds(config, q).conds["upper_direct"]
        notes = [f"t_u_dagger_1 - t_cross = {(bounds.t_u_dagger_1 - t) / t:.3e} t_cross"]
        if hypotheses.all_hold or direct:
            parts.append(((bounds.t_u_q - t) / t, t, "t_cross > t_u(q)"))
            parts.append(((bounds.t_u_dagger_q - bounds.t_u_q) / t, t, "t_u(q) > t_u_dagger(q)"))
            if not hypotheses.all_hold:
                notes.append("upper side asserted via s0*exp(-gamma) >= q*s0")
        else:
            notes.append("upper-time hypotheses fail; only the lower side asserted")
        return _result(name, parts, slack, config, notes="; ".join(notes))

    def verify_depletion(
        self, config: ReactionConfig, q: float = DEFAULT_Q, options: Optional[IntegrationOptions] = None
    ) -> CheckResult:
        name = "depletion"
        bounds = depletion_bounds(config, q)
        lower_ok, upper_ok = bounds.conds["lower_valid"], bounds.conds["upper_valid"]
        if not (lower_ok or upper_ok):
            return _vacuous(name, config, "validity conditions fail for both bounds", skipped=True)

        trajectory, crossing, options = _transient_run(config, self._options(options))
        slack = options.numerical_slack(config, config.s0)
        measured = (config.s0 - crossing.s_cross) / config.s0
        t = crossing.t_cross

        parts: List[Part] = []
        if lower_ok:
            parts.append((measured - bounds.lower, t, "depletion below the lower bound"))
        if upper_ok:
            parts.append((bounds.upper - measured, t, "depletion above the upper bound"))
            t_u = crossing_time_bounds(config, q).t_u_dagger_q
            if t_u <= trajectory.t_end:
                s_at = float(trajectory.value("s", t_u))
                parts.append((s_at / config.s0 - q, t_u, "s(t_u_dagger(q)) < q*s0"))
        notes = f"measured={measured:.6e}, lower_valid={lower_ok}, upper_valid={upper_ok}"
        return _result(name, parts, slack, config, notes=notes)

    def verify_lyapunov(self, config: ReactionConfig, options: Optional[IntegrationOptions] = None) -> List[CheckResult]:
        trajectory, _, options = _transient_run(config, self._options(options))
        suite = epsilon_suite(config)
        s0 = config.s0
        times, values = trajectory.sample(self.dense_samples)
        L = values[1] - qss_manifold(values[0], config)
        L0 = suite.eps_SSl * s0
        slack = options.numerical_slack(config, s0)
        results = []

        rigorous = lyapunov_l2_bound(times, 0.0, L0, config, RIGOROUS_FORCING)
        results.append(_result(
            "lyapunov_l2", [_worst((rigorous - L**2) / s0**2, times, "L^2 above the decay bound")], slack, config,
        ))

        if suite.eps_MM >= 1:
            return results

        t_hat = crossing_time_bounds(config, 1.0).t_hat
        late = times >= t_hat
        bound = manifold_distance_bound(config)
        parts = [_worst(bound - np.abs(L[late]) / s0, times[late], "|L|/s0 above sqrt(3/2) eps_SSl eps_MM")]
        results.append(_result("manifold_distance_after_t_hat", parts, slack, config))

        # near its limit L^2 is of order (eps_SSl eps_MM s0)^2; measure the half-forcing bound on that scale
        limit_scale = (suite.eps_SSl * suite.eps_MM * s0) ** 2
        half = lyapunov_l2_bound(times[late], 0.0, L0, config, HALF_FORCING)
        soft_slack = 2 * options.numerical_slack(config, complex_ceiling(config)) / suite.eps_MM
        results.append(_result(
            "lyapunov_l2_half_forcing",
            [_worst((half - L[late] ** 2) / limit_scale, times[late], "L^2 above the bound with forcing 1/2")],
            soft_slack, config, severity=Severity.SOFT,
        ))
        return results

    def verify_envelopes(self, config: ReactionConfig, options: Optional[IntegrationOptions] = None) -> CheckResult:
        name = "substrate_envelopes"
        if config.e0 <= 0 or config.s0 <= 0:
            return _vacuous(name, config, "no dynamics for e0 = 0 or s0 = 0; vacuous pass")
        trajectory, _, options = _transient_run(config, self._options(options))
        times, values = trajectory.sample(self.dense_samples)
        lower, upper = substrate_envelopes(times, config)
        s0, c_tilde = config.s0, complex_ceiling(config)
        parts = [
            _worst((values[0] - lower) / s0, times, "s below s0*exp(-k1 e0 t)"),
            _worst((upper - values[0]) / s0, times, "s above the two-exponential envelope"),
            _worst((c_tilde - values[1]) / s0, times, "c above eps_SSl*s0"),
        ]
        return _result(name, parts, options.numerical_slack(config, s0), config)

    def verify_invariant_region(
        self, config: ReactionConfig, delta: float, options: Optional[IntegrationOptions] = None
    ) -> CheckResult:
        name = "invariant_region"
        if delta == 0.0:
            return _vacuous(name, config, "delta = 0 collapses the region onto g; vacuous pass")
        if not 0.0 < delta <= 1.0:
            raise InvalidInputError(f"delta must lie in (0, 1], got {delta}")
        minimum = delta_star(config).delta_star
        if delta < minimum * (1.0 - 1e-12):
            raise InvalidInputError(f"delta={delta} is below delta*={minimum}")

        trajectory, crossing, options = _transient_run(config, self._options(options))
        times, values = trajectory.sample(self.dense_samples)
        after = times >= crossing.t_cross
        s, c, t = values[0][after], values[1][after], times[after]
        c_tilde = complex_ceiling(config)
        parts = [
            _worst((c - qss_manifold(s, config)) / c_tilde, t, "state below g"),
            _worst((qss_manifold(s, config, delta) - c) / c_tilde, t, f"state above g_delta (delta={delta:.6g})"),
        ]
        slack = options.numerical_slack(config, c_tilde)
        return _result(name, parts, slack, config, notes=f"delta={delta:.6g}, delta*={minimum:.6g}")

    def _slow_runs(self, config: ReactionConfig, options: Optional[IntegrationOptions]):
        options = self._options(options)
        trajectory, crossing = _full_course_run(config, options)
        if trajectory.t_end <= crossing.t_cross:
            raise IntegrationError("trajectory ends at the crossing; no slow phase to compare", trajectory.t_end)
        follow = options.model_copy(update={"t_end": trajectory.t_end})
        return trajectory, crossing, options, follow

    def verify_slow_error(
        self, config: ReactionConfig, scenario: Scenario = Scenario.ON_MANIFOLD,
        options: Optional[IntegrationOptions] = None, q: float = DEFAULT_Q,
    ) -> List[CheckResult]:
        """Hard checks on the rigorous slow-phase bounds plus the soft eps_opt check.

        Unlike the other verify_* methods this returns one CheckResult per bound, since a scenario
        certifies several inequalities at once and each carries its own severity:

        - on_manifold: slow_error_eps_L, slow_error_eps_W, enclosure_sandwich, enclosure_gap_eps_L
          (hard) and slow_error_eps_opt (soft)
        - from_t0: t0_running_bound (hard) and t0_eps_opt (soft)

        Use `SuiteReport(results=...)` to fold them into a single verdict.
        """
        scenario = Scenario(scenario)
        config.require_positive()
        trajectory, crossing, options, follow = self._slow_runs(config, options)
        s0 = config.s0
        slack = options.numerical_slack(config, s0)
        params = slow_error_params(config, q)
        times, values = trajectory.sample(self.dense_samples)
        results = []

        if scenario is Scenario.ON_MANIFOLD:
            after = times >= crossing.t_cross
            t, s = times[after], values[0][after]
            xi = integrator.integrate_reduced(crossing.s_cross, crossing.t_cross, config, follow)
            error = np.abs(xi.value("xi", t) - s) / s0
            results.append(_result("slow_error_eps_L", [_worst(params.eps_L - error, t, "|xi - s|/s0 above eps_L")], slack, config))
            results.append(_result("slow_error_eps_W", [_worst(params.eps_W - error, t, "|xi - s|/s0 above eps_W")], slack, config))

            delta = delta_star(config).delta_star
            envelopes = integrator.integrate_envelopes(crossing.s_cross, crossing.t_cross, config, delta, follow)
            lower, upper_delta = envelopes.lower.value("lower", t), envelopes.upper_delta.value("upper_delta", t)
            upper_U = envelopes.upper_U.value("upper_U", t)
            results.append(_result("enclosure_sandwich", [
                _worst((s - lower) / s0, t, "s below the reduced solution"),
                _worst((upper_delta - s) / s0, t, "s above the delta*-scaled solution"),
            ], slack, config))
            results.append(_result("enclosure_gap_eps_L", [
                _worst(params.eps_L - (upper_U - lower) / s0, t, "enclosure gap above s0*eps_L"),
            ], slack, config))
            results.append(_result(
                "slow_error_eps_opt", [_worst(params.eps_opt - error, t, "|xi - s|/s0 above eps_opt")],
                slack, config, severity=Severity.SOFT, notes="one-sided conjecture check",
            ))
            return results

        z = integrator.integrate_reduced(s0, 0.0, config, follow)
        error = (z.value("xi", times) - values[0]) / s0
        running = t0_error_bound(config, q, T0BoundMode.RUNNING, crossing)
        before = times <= crossing.t_cross
        results.append(_result(
            "t0_running_bound",
            [_worst(running(times[before]) - error[before], times[before], "(z - s)/s0 above the running bound")],
            slack, config,
        ))
        results.append(_result(
            "t0_eps_opt", [_worst(params.eps_opt - np.abs(error), times, "|z - s|/s0 above eps_opt")],
            slack, config, severity=Severity.SOFT, notes="one-sided conjecture check over the full course",
        ))
        return results

    def verify_eta_regime(self, config: ReactionConfig, options: Optional[IntegrationOptions] = None) -> CheckResult:
        """Error at t_cross relative to eps_SSl should be of the order of eta (soft)."""
        config.require_positive()
        trajectory, crossing, options = _transient_run(config, self._options(options))
        follow = options.model_copy(update={"t_end": trajectory.t_end})
        z = integrator.integrate_reduced(config.s0, 0.0, config, follow)
        suite = epsilon_suite(config)
        error = abs(float(z.value("xi", crossing.t_cross)) - crossing.s_cross) / config.s0
        ratio = error / suite.eps_SSl
        parts = [
            (ratio - suite.eta / 3.0, crossing.t_cross, "error far below eta*eps_SSl"),
            (3.0 * suite.eta - ratio, crossing.t_cross, "error far above eta*eps_SSl"),
        ]
        return _result(
            "eta_regime", parts, 0.0, config, severity=Severity.SOFT,
            notes=f"error/eps_SSl={ratio:.4g}, eta={suite.eta:.4g}",
        )

    def transient_checks(
        self, config: ReactionConfig, q: float = DEFAULT_Q, options: Optional[IntegrationOptions] = None
    ) -> List[CheckResult]:
        if config.e0 <= 0 or config.s0 <= 0:
            return [self.verify_crossing_lemma(config, options)]
        results = [
            self.verify_crossing_lemma(config, options),
            self.verify_bracket(config, q, options),
            self.verify_depletion(config, q, options),
            self.verify_envelopes(config, options),
        ]
        results.extend(self.verify_lyapunov(config, options))
        try:
            results.append(self.verify_invariant_region(config, delta_star(config).delta_star, options))
        except DomainError as e:
            results.append(_vacuous("invariant_region", config, f"delta* undefined: {e}", skipped=True))
        return results

    def slow_checks(
        self, config: ReactionConfig, q: float = DEFAULT_Q, options: Optional[IntegrationOptions] = None
    ) -> List[CheckResult]:
        results = self.verify_slow_error(config, Scenario.ON_MANIFOLD, options, q)
        results.extend(self.verify_slow_error(config, Scenario.FROM_T0, options, q))
        results.append(self.verify_eta_regime(config, options))
        return results

    def check_config(
        self, config: ReactionConfig, q: float = DEFAULT_Q, options: Optional[IntegrationOptions] = None,
        scope: str = "transient",
    ) -> List[CheckResult]:
        """Run one battery, turning integration failures into failed hard checks."""
        try:
            if scope == "transient":
                return self.transient_checks(config, q, options)
            if scope == "slow":
                return self.slow_checks(config, q, options)
            if scope == "all":
                return self.transient_checks(config, q, options) + self.slow_checks(config, q, options)
            raise InvalidInputError(f"Unknown check scope '{scope}', expected transient, slow or all")
        except IntegrationError as e:
            logger.error(f"Integration failed for {config.label()}: {e}", exc_info=True)
            return [CheckResult(
                name="integration", passed=False, worst_margin=-math.inf, worst_t=e.t_reached,
                notes=str(e), config_label=config.label(),
            )]

    async def run_suite_async(
        self, configs: Iterable[ReactionConfig], q: float = DEFAULT_Q,
        options: Optional[IntegrationOptions] = None, scope: str = "transient",
    ) -> SuiteReport:
        batches = await bounded_gather(
            lambda config: self.check_config(config, q, options, scope), configs, self.max_workers
        )
        return SuiteReport(results=[result for batch in batches for result in batch])

    def run_suite(
        self, configs: Iterable[ReactionConfig], q: float = DEFAULT_Q,
        options: Optional[IntegrationOptions] = None, scope: str = "transient",
    ) -> SuiteReport:
        report = asyncio.run(self.run_suite_async(list(configs), q, options, scope))
        logger.info(
            f"Verification finished: {len(report.results)} checks, "
            f"{len(report.hard_failures)} hard failures, {len(report.soft_failures)} soft failures"
        )
        return report


validation_suite = ValidationSuite()
