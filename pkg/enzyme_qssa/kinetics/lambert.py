"""Principal-branch Lambert W and the closed-form solution of the reduced equation."""
import math
from typing import NamedTuple, Union

import numpy as np
from scipy.special import lambertw, wrightomega

from enzyme_qssa.core.exceptions import DomainError, InvalidInputError
from enzyme_qssa.kinetics.parameters import ReactionConfig

ArrayLike = Union[float, np.ndarray]

# s_tilde / K_M above this makes A = (s/K_M) exp(s/K_M) overflow
LOG_DOMAIN_THRESHOLD = 700.0
MAX_LOG_FLOAT = math.log(np.finfo(float).max)


class SchnellMendoza(NamedTuple):
    s_lower: ArrayLike
    s_upper: ArrayLike


class LambertGapBounds(NamedTuple):
    gap: ArrayLike
    log_w: ArrayLike
    linear_w: ArrayLike
    log_a: ArrayLike
    linear_a: ArrayLike


class LambertGapPeak(NamedTuple):
    T_star: float
    value: float


def lambert_w0(x: ArrayLike) -> ArrayLike:
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr < 0):
        raise DomainError("lambert_w0 is only implemented for non-negative arguments")
    w = lambertw(x_arr, 0).real
    return float(w) if np.ndim(w) == 0 else w


def lambert_w0_exp(log_x: ArrayLike) -> ArrayLike:
    """W(exp(log_x)) without forming exp(log_x)."""
    w = np.real(wrightomega(np.asarray(log_x, dtype=float)))
    return float(w) if np.ndim(w) == 0 else w


def _lambert_args(s_tilde: float, t_tilde: float, t: ArrayLike, config: ReactionConfig, delta: float):
    if not 0.0 <= delta < 1.0:
        raise InvalidInputError(f"delta must lie in [0, 1), got {delta}")
    if s_tilde <= 0:
        raise InvalidInputError(f"s_tilde must be positive, got {s_tilde}")
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < t_tilde):
        raise InvalidInputError("closed-form solution requires t >= t_tilde")
    K_M = config.K_M
    ratio = s_tilde / K_M
    T = config.k2 * config.e0 * (t_arr - t_tilde) / K_M
    log_A = math.log(ratio) + ratio
    return K_M, ratio, log_A, T


def _w_of(log_arg: np.ndarray, ratio: float) -> np.ndarray:
    if ratio > LOG_DOMAIN_THRESHOLD:
        return np.asarray(lambert_w0_exp(log_arg))
    return np.asarray(lambert_w0(np.exp(log_arg)))


def _scalar_or_array(value: np.ndarray, like: ArrayLike) -> ArrayLike:
    return float(value) if np.ndim(like) == 0 else value


def schnell_mendoza(
    s_tilde: float, t_tilde: float, t: ArrayLike, config: ReactionConfig, delta: float = 0.0
) -> SchnellMendoza:
    K_M, ratio, log_A, T = _lambert_args(s_tilde, t_tilde, t, config, delta)
    lower = K_M * _w_of(log_A - T, ratio)
    upper = K_M * _w_of(log_A - (1.0 - delta) * T, ratio)
    return SchnellMendoza(_scalar_or_array(lower, t), _scalar_or_array(upper, t))


def lambert_gap_bounds(
    s_tilde: float, t_tilde: float, t: ArrayLike, config: ReactionConfig, delta: float = 0.0
) -> LambertGapBounds:
    """Chained upper bounds on s_upper - s_lower: gap <= log_w <= linear_w and gap <= log_a <= linear_a."""
    K_M, ratio, log_A, T = _lambert_args(s_tilde, t_tilde, t, config, delta)
    w = _w_of(log_A - T, ratio)
    growth = np.expm1(delta * T)
    # A e^{-T} overflows for large s_tilde / K_M; growth = 0 maps to log_product = -inf
    with np.errstate(divide="ignore", over="ignore"):
        log_product = log_A - T + np.log(growth)
        linear_a = K_M * np.exp(log_product)

    solution = schnell_mendoza(s_tilde, t_tilde, t, config, delta)
    gap = np.asarray(solution.s_upper) - np.asarray(solution.s_lower)

    values = LambertGapBounds(
        gap=gap,
        log_w=K_M * np.log1p(w * growth),
        linear_w=K_M * w * growth,
        log_a=K_M * np.logaddexp(0.0, log_product),
        linear_a=linear_a,
    )
    return LambertGapBounds(*(_scalar_or_array(np.asarray(v), t) for v in values))


def lambert_gap_peak(s_tilde: float, config: ReactionConfig, delta: float) -> LambertGapPeak:
    """Maximum over T of K_M A e^{-T} (e^{delta T} - 1), attained at T* = -log(1-delta)/delta."""
    if not 0.0 <= delta < 1.0:
        raise InvalidInputError(f"delta must lie in [0, 1), got {delta}")
    if delta == 0.0:
        return LambertGapPeak(T_star=1.0, value=0.0)
    T_star = -math.log1p(-delta) / delta
    # K_M * A = s_tilde * exp(s_tilde / K_M) and e^{delta T*} - 1 = delta / (1 - delta)
    log_value = math.log(s_tilde) + s_tilde / config.K_M - T_star + math.log(delta / (1.0 - delta))
    value = math.exp(log_value) if log_value < MAX_LOG_FLOAT else math.inf
    return LambertGapPeak(T_star=T_star, value=value)
