"""Error bounds for the reduced equation once the trajectory is near the QSS manifold, and from t=0."""
import enum
import logging
import math
from typing import Callable, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from enzyme_qssa.analysis.transient import (
    check_upper_time_hypotheses,
    lyapunov_l2_bound,
    manifold_distance_bound,
)
from enzyme_qssa.core.exceptions import InvalidInputError
from enzyme_qssa.integration.trajectory import CrossingRecord
from enzyme_qssa.kinetics.mass_action import HALF_FORCING
from enzyme_qssa.kinetics.parameters import (
    DEFAULT_Q,
    ReactionConfig,
    c_star,
    epsilon_suite,
    segel_slemrod_time,
    slow_error_params,
)

logger = logging.getLogger(__name__)


class T0BoundMode(str, enum.Enum):
    EXACT_A = "exact_a"
    EXACT_B = "exact_b"
    RUNNING = "running"
    ASYMPTOTIC = "asymptotic"


class ErrorBounds(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    L2_bound_fn: Callable = Field(exclude=True)
    eqLest_bound: float
    eps_L: float
    eps_W: float
    eps_opt: float
    total_with_L: float
    total_with_W: float
    with_depletion_L: float
    with_depletion_W: float
    with_depletion_valid: bool
    t0_bound_a: Optional[float] = None
    t0_bound_b: Optional[float] = None
    t0_asymptotic: float


def _depletion_term(config: ReactionConfig, q: float) -> float:
    eps = epsilon_suite(config).eps_SSl
    return eps * math.log1p(c_star(config) / (q * eps)) / q


def slow_phase_error_bounds(
    config: ReactionConfig,
    q: float = DEFAULT_Q,
    s_star: Optional[float] = None,
    s_tilde: Optional[float] = None,
    crossing: Optional[CrossingRecord] = None,
    forcing: float = HALF_FORCING,
) -> ErrorBounds:
    """|xi - s| bounds for xi started at s_star and s started at s_tilde (both default to s0)."""
    config.require_positive()
    s0 = config.s0
    s_star = s0 if s_star is None else s_star
    s_tilde = s0 if s_tilde is None else s_tilde
    for name, value in (("s_star", s_star), ("s_tilde", s_tilde)):
        if not 0 < value <= s0:
            raise InvalidInputError(f"{name} must lie in (0, s0={s0}], got {value}")

    params = slow_error_params(config, q)
    suite = epsilon_suite(config)
    offset = abs(s_star - s_tilde)
    depletion = _depletion_term(config, q)

    with_depletion_valid = False
    if 0.5 <= q < 1.0:
        with_depletion_valid = check_upper_time_hypotheses(config, q).all_hold

    def l2_bound(t, t0: float = 0.0, L0: float = suite.eps_SSl * s0):
        return lyapunov_l2_bound(t, t0, L0, config, forcing)

    t0_bound_a = None
    if crossing is not None:
        t0_bound_a = t0_error_bound(config, q, T0BoundMode.EXACT_A, crossing)
    t0_bound_b = None
    if with_depletion_valid:
        t0_bound_b = t0_error_bound(config, q, T0BoundMode.EXACT_B)

    return ErrorBounds(
        L2_bound_fn=l2_bound,
        eqLest_bound=manifold_distance_bound(config, forcing),
        eps_L=params.eps_L,
        eps_W=params.eps_W,
        eps_opt=params.eps_opt,
        total_with_L=offset + s0 * params.eps_L,
        total_with_W=offset + s0 * params.eps_W,
        with_depletion_L=depletion + params.eps_L,
        with_depletion_W=depletion + params.eps_W,
        with_depletion_valid=with_depletion_valid,
        t0_bound_a=t0_bound_a,
        t0_bound_b=t0_bound_b,
        t0_asymptotic=params.eps_opt_over_q,
    )


def t0_error_bound(
    config: ReactionConfig,
    q: float = DEFAULT_Q,
    mode: Union[T0BoundMode, str] = T0BoundMode.RUNNING,
    crossing: Optional[CrossingRecord] = None,
):
    """Bound on (z - s)/s0 for t <= t_cross, z solving the reduced equation from z(0) = s0.

    `running` returns a callable of t; the other modes return a number.
    """
    mode = T0BoundMode(mode)
    suite = epsilon_suite(config)
    eps = suite.eps_SSl
    k1, s0, K_M = config.k1, config.s0, config.K_M
    K_S = config.k_m1 / k1

    if mode is T0BoundMode.ASYMPTOTIC:
        if not 0 < q <= 1:
            raise InvalidInputError(f"q must lie in (0, 1], got {q}")
        return suite.eps_opt / q

    if mode is T0BoundMode.EXACT_B:
        if not (0.5 <= q < 1.0 and check_upper_time_hypotheses(config, q).all_hold):
            raise InvalidInputError("exact_b requires the upper crossing-time hypotheses to hold")
        exponent = k1 * s0 * segel_slemrod_time(config) * _depletion_term(config, q)
        return eps / q * ((s0 + K_S) / (s0 + K_M)) * math.exp(exponent)

    if crossing is None:
        raise InvalidInputError(f"mode {mode.value} needs a located crossing (t_cross, s_cross)")
    s_cross, t_cross = crossing.s_cross, crossing.t_cross

    if mode is T0BoundMode.EXACT_A:
        return eps * ((s0 + K_S) / (s_cross + K_M)) * math.exp(k1 * s0 * eps * t_cross)

    growth = k1 * eps * s0
    decay = k1 * (K_M + s_cross)
    prefactor = eps * (K_S + s0) / (K_M + s_cross + eps * s0)

    def running(t):
        t_arr = np.asarray(t, dtype=float)
        value = prefactor * (np.exp(growth * t_arr) - np.exp(-decay * t_arr))
        return float(value) if np.ndim(t) == 0 else value

    return running
