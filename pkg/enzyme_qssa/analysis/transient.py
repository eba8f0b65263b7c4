"""Closed-form estimates for the fast transient: Lyapunov decay, crossing-time brackets, depletion."""
import logging
import math
from typing import Dict, NamedTuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from enzyme_qssa.core.exceptions import InvalidInputError
from enzyme_qssa.kinetics.mass_action import HALF_FORCING
from enzyme_qssa.kinetics.parameters import (
    DEFAULT_Q,
    ReactionConfig,
    c_star,
    epsilon_suite,
    segel_slemrod_time,
)

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

DELTA_STAR_PREFERENCE = "Delta_star is the heuristically preferred depletion estimate; it is not a proven bound"


class TransientBounds(BaseModel):
    model_config = ConfigDict(frozen=True, populate_by_name=True)

    q: float
    t_SSl: float
    t_ell: float
    t_ell_dagger: float
    t_u_q: float
    t_u_dagger_q: float
    t_u_dagger_1: float
    C_q: float
    C_star: float
    lam: float = Field(serialization_alias="lambda")
    gap_rel: float
    t_hat: float
    t_star: float
    t_ell_dagger_asymptotic: float
    t_u_dagger_q_asymptotic: float
    t_u_dagger_1_asymptotic: float


class HypothesisReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    q: float
    log_4c_star: float
    q_log_q: float
    q_log_value: float
    cond_q_log: bool
    cond_eps_e: bool
    cond_eps_q: bool
    threshold_eps: float
    all_hold: bool


class DepletionBounds(BaseModel):
    model_config = ConfigDict(frozen=True)

    q: float
    r: float
    lower: float
    lower_sharp: float
    upper: float
    gamma: float
    Delta_star: float
    Delta_dstar: float
    lower_asymptotic: float
    upper_asymptotic: float
    s_at_t_ell_dagger_max: float
    s_at_t_u_dagger_q_min: float
    conds: Dict[str, bool]
    preference_note: str = DELTA_STAR_PREFERENCE


class LinearLyapunovBounds(NamedTuple):
    A_upper: float
    B_upper: float
    A_lower: float
    B_lower: float


def _check_q(q: float) -> None:
    if not 0 < q <= 1:
        raise InvalidInputError(f"q must lie in (0, 1], got {q}")


def lyapunov_l2_bound(
    t: ArrayLike, t0: float, L0: float, config: ReactionConfig, forcing: float = HALF_FORCING
) -> ArrayLike:
    """Upper bound on L(t)^2 for L = c - g(s), given |L(t0)| = L0."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < t0):
        raise InvalidInputError("lyapunov_l2_bound requires t >= t0")
    suite = epsilon_suite(config)
    decay = np.exp(-config.k1 * config.K_M * (t_arr - t0))
    limit = forcing * (suite.eps_SSl * suite.eps_MM * config.s0) ** 2
    bound = L0**2 * decay + limit * (1.0 - decay)
    return float(bound) if np.ndim(t) == 0 else bound


def lyapunov_settling_time(config: ReactionConfig) -> float:
    eps_mm = epsilon_suite(config).eps_MM
    return 2.0 / (config.k1 * config.K_M) * math.log(1.0 / eps_mm)


def manifold_distance_bound(config: ReactionConfig, forcing: float = HALF_FORCING) -> float:
    """Bound on |L|/s0 for t >= t_hat; sqrt(3/2) eps_SSl eps_MM with forcing 1/2."""
    suite = epsilon_suite(config)
    return math.sqrt(1.0 + forcing) * suite.eps_SSl * suite.eps_MM


def substrate_envelopes(t: ArrayLike, config: ReactionConfig):
    k1, k_m1, k2 = config.k1, config.k_m1, config.k2
    s0, e0, K_M = config.s0, config.e0, config.K_M
    t_arr = np.asarray(t, dtype=float)
    lower = s0 * np.exp(-k1 * e0 * t_arr)
    km = k_m1 + k2
    upper = s0 * (k_m1 / km + (k2 / km) * np.exp(-k1 * e0 * K_M / (K_M + s0) * t_arr))
    return lower, upper


def complex_ceiling(config: ReactionConfig) -> float:
    return config.e0 * config.s0 / (config.K_M + config.s0)


def linear_lyapunov_bounds(config: ReactionConfig, q: float = DEFAULT_Q) -> LinearLyapunovBounds:
    """Constants bounding A(s) and B(s) of the linear Lyapunov equation on q*s0 <= s <= s0."""
    _check_q(q)
    k1, k2, s0, e0, K_M = config.k1, config.k2, config.s0, config.e0, config.K_M
    return LinearLyapunovBounds(
        A_upper=k1 * (K_M + e0 + s0),
        B_upper=k2 * (e0 * s0 / (K_M + s0)) * (e0 / K_M),
        A_lower=k1 * (q * s0 + K_M),
        B_lower=k2 * (q * e0 * s0 / (K_M + q * s0)) * (e0 * K_M / (K_M + s0) ** 2),
    )


def onset_time(config: ReactionConfig, m_star: float = 1.0) -> float:
    if m_star <= 0:
        raise InvalidInputError(f"m_star must be positive, got {m_star}")
    eps = epsilon_suite(config).eps_SSl
    return segel_slemrod_time(config) * math.log(m_star / eps)


def c_of_q(config: ReactionConfig, q: float) -> float:
    km = config.k_m1 + config.k2
    return (1.0 / q) * (km + q * config.k1 * config.s0) ** 2 / (config.k2 * km)


def crossing_time_bounds(config: ReactionConfig, q: float = DEFAULT_Q) -> TransientBounds:
    _check_q(q)
    suite = epsilon_suite(config)
    eps = suite.eps_SSl
    k1, k2, s0, K_M = config.k1, config.k2, config.s0, config.K_M
    km = config.k_m1 + k2
    t_ssl = segel_slemrod_time(config)
    lam = k1 * (K_M + s0)
    C_star = c_star(config)
    C_q = c_of_q(config, q)

    log_km = math.log(km / k2)
    log_inv_eps = math.log(1.0 / eps)
    log_q_term = math.log1p(C_star / (q * eps))

    return TransientBounds(
        q=q,
        t_SSl=t_ssl,
        t_ell=math.log1p((km / k2) * (1.0 + eps) / eps) / (lam * (1.0 + eps)),
        t_ell_dagger=t_ssl * (1.0 - eps) * (log_inv_eps + log_km),
        t_u_q=math.log1p(C_q / eps) / (k1 * (K_M + q * s0)),
        t_u_dagger_q=t_ssl * log_q_term / q,
        t_u_dagger_1=t_ssl * math.log1p(C_star / eps),
        C_q=C_q,
        C_star=C_star,
        lam=lam,
        gap_rel=((1.0 - q) / q) * (1.0 + log_q_term) / log_q_term,
        t_hat=lyapunov_settling_time(config),
        t_star=t_ssl * log_inv_eps,
        t_ell_dagger_asymptotic=t_ssl * (log_inv_eps + log_km),
        t_u_dagger_q_asymptotic=t_ssl * (log_inv_eps + math.log(C_star / q)) / q,
        t_u_dagger_1_asymptotic=t_ssl * (log_inv_eps + math.log(C_star)),
    )


def hypothesis_threshold(q: float) -> float:
    """Largest eps_SSl allowed by the quadratic condition for a given q."""
    return (9.0 / 16.0) * (q * math.log(1.0 / q)) ** 2


def q_log_value(q: float, C_star: float) -> float:
    return 4.0 * q * math.log(1.0 / q) * math.log(4.0 * C_star)


def check_upper_time_hypotheses(config: ReactionConfig, q: float = DEFAULT_Q) -> HypothesisReport:
    if not 0.5 <= q < 1.0:
        raise InvalidInputError(f"the upper crossing-time hypotheses need q in [1/2, 1), got {q}")
    eps = epsilon_suite(config).eps_SSl
    C_star = c_star(config)
    threshold = hypothesis_threshold(q)
    value = q_log_value(q, C_star)

    cond_q_log = value < 1.0
    cond_eps_e = eps < math.exp(-1.0)
    cond_eps_q = eps <= threshold
    return HypothesisReport(
        q=q,
        log_4c_star=math.log(4.0 * C_star),
        q_log_q=q * math.log(1.0 / q),
        q_log_value=value,
        cond_q_log=cond_q_log,
        cond_eps_e=cond_eps_e,
        cond_eps_q=cond_eps_q,
        threshold_eps=threshold,
        all_hold=cond_q_log and cond_eps_e and cond_eps_q,
    )


def depletion_bounds(config: ReactionConfig, q: float = DEFAULT_Q, r: float = 1.0) -> DepletionBounds:
    """Bounds on (s0 - s_cross)/s0; validity travels in `conds`."""
    if not 0 < q < 1:
        raise InvalidInputError(f"q must lie in (0, 1), got {q}")
    if not 0 < r <= 1:
        raise InvalidInputError(f"r must lie in (0, 1], got {r}")
    suite = epsilon_suite(config)
    eps = suite.eps_SSl
    k1, k2, s0, K_M = config.k1, config.k2, config.s0, config.K_M
    km = config.k_m1 + k2
    C_star = c_star(config)

    log_ratio = math.log(k1 * K_M / (eps * k2))
    log_inv_eps = math.log(1.0 / eps)
    log_q_term = math.log1p(C_star / (q * eps))
    scale = k2 / (k1 * (K_M + s0))

    lower = 0.5 * scale * eps * (1.0 - eps) * log_ratio
    lower_sharp = (1.0 - r / 2.0) * scale * eps * (1.0 - eps) * log_ratio
    gamma = eps * log_q_term / q

    alpha = eps * K_M / (K_M + s0) * (1.0 - eps) * log_ratio
    s_at_t_ell_dagger_max = config.k_m1 / km + (k2 / km) * math.exp(-alpha)
    s_at_t_u_dagger_q_min = math.exp(-gamma)

    hypotheses_hold = False
    if q >= 0.5:
        hypotheses_hold = check_upper_time_hypotheses(config, q).all_hold
    direct = s_at_t_u_dagger_q_min >= q
    conds = {
        "lower_valid": eps * log_ratio < 1.0,
        "lower_sharp_valid": eps * log_ratio < r,
        "upper_hypotheses": hypotheses_hold,
        "upper_direct": direct,
        "upper_gamma_below_one": eps * log_q_term < q,
        "upper_valid": (hypotheses_hold or direct) and eps * log_q_term < q,
    }
    return DepletionBounds(
        q=q,
        r=r,
        lower=lower,
        lower_sharp=lower_sharp,
        upper=gamma,
        gamma=gamma,
        Delta_star=eps * (log_inv_eps + math.log(C_star)),
        Delta_dstar=eps * log_inv_eps,
        lower_asymptotic=0.5 * scale * eps * (log_inv_eps + math.log(k1 * K_M / k2)),
        upper_asymptotic=(eps * log_inv_eps + eps * math.log(C_star / q)) / q,
        s_at_t_ell_dagger_max=s_at_t_ell_dagger_max,
        s_at_t_u_dagger_q_min=s_at_t_u_dagger_q_min,
        conds=conds,
    )
