"""Vector fields and phase-plane curves of the Michaelis-Menten system.

Functions accept floats or numpy arrays for concentrations and broadcast.
"""
import math
from typing import NamedTuple, Union

import numpy as np

from enzyme_qssa.core.exceptions import InvalidInputError
from enzyme_qssa.kinetics.parameters import ReactionConfig

ArrayLike = Union[float, np.ndarray]

HALF_FORCING = 0.5
RIGOROUS_FORCING = 1.0


class State(NamedTuple):
    s: ArrayLike
    c: ArrayLike


class Derivative(NamedTuple):
    ds_dt: ArrayLike
    dc_dt: ArrayLike


class EnvelopeRates(NamedTuple):
    U: ArrayLike
    U_tilde: ArrayLike


class LinearLyapunovRates(NamedTuple):
    A: ArrayLike
    B: ArrayLike


def full_rhs(state: State, config: ReactionConfig) -> Derivative:
    k1, k_m1, k2, e0 = config.k1, config.k_m1, config.k2, config.e0
    s, c = state
    ds_dt = -k1 * e0 * s + (k1 * s + k_m1) * c
    dc_dt = k1 * e0 * s - (k1 * s + k_m1 + k2) * c
    return Derivative(ds_dt, dc_dt)


def full_rhs_rewritten(state: State, config: ReactionConfig) -> Derivative:
    """Same field written through L = c - g(s)."""
    k1, k_m1, k2 = config.k1, config.k_m1, config.k2
    s, c = state
    L = c - qss_manifold(s, config)
    rate = k_m1 + k2 + k1 * s
    ds_dt = -k2 * config.e0 * s / (config.K_M + s) + (k_m1 + k1 * s) * L
    dc_dt = -rate * L
    return Derivative(ds_dt, dc_dt)


def qss_manifold(s: ArrayLike, config: ReactionConfig, delta: float = 0.0) -> ArrayLike:
    """g_delta(s); delta=0 is the c-nullcline g, delta=1 the s-nullcline."""
    if not 0.0 <= delta <= 1.0:
        raise InvalidInputError(f"delta must lie in [0, 1], got {delta}")
    k1, k_m1, k2 = config.k1, config.k_m1, config.k2
    return k1 * config.e0 * s / ((1.0 - delta) * k2 + k_m1 + k1 * s)


def qss_manifold_slope(s: ArrayLike, config: ReactionConfig) -> ArrayLike:
    K_M = config.K_M
    return K_M * config.e0 / (K_M + s) ** 2


def first_order_manifold(s: ArrayLike, config: ReactionConfig) -> ArrayLike:
    return config.k1 * config.e0 * s / (config.k_m1 + config.k2)


def reduced_rhs(s: ArrayLike, config: ReactionConfig) -> ArrayLike:
    return -config.k2 * config.e0 * s / (config.K_M + s)


def envelope_constant(config: ReactionConfig, forcing: float = HALF_FORCING) -> float:
    """Additive constant of the enclosure equations; forcing=1/2 gives the 1/sqrt(2) factor."""
    k1, k_m1, k2 = config.k1, config.k_m1, config.k2
    s0, e0 = config.s0, config.e0
    binding = (k_m1 + k1 * s0) / (k_m1 + k2 + k1 * s0)
    return math.sqrt(forcing) * k1 * e0 * s0 * binding * (k1 * k2 * e0 / (k_m1 + k2) ** 2)


def envelope_rates(s: ArrayLike, config: ReactionConfig, forcing: float = HALF_FORCING) -> EnvelopeRates:
    leading = config.k2 * config.e0 * s / (config.K_M + s)
    constant = envelope_constant(config, forcing)
    return EnvelopeRates(U=-leading + constant, U_tilde=leading + constant)


def linear_lyapunov_rates(s: ArrayLike, config: ReactionConfig) -> LinearLyapunovRates:
    """Coefficients of dL/dt = -A(s) L + B(s)."""
    k1, k_m1, k2 = config.k1, config.k_m1, config.k2
    slope = qss_manifold_slope(s, config)
    A = k_m1 + k2 + k1 * s + slope * (k_m1 + k1 * s)
    B = k2 * slope * qss_manifold(s, config)
    return LinearLyapunovRates(A=A, B=B)


def product_concentration(state: State, config: ReactionConfig) -> ArrayLike:
    return config.s0 - state.s - state.c


def free_enzyme(state: State, config: ReactionConfig) -> ArrayLike:
    return config.e0 - state.c


def full_rhs_array(config: ReactionConfig):
    """Closure over plain floats for the integrator's inner loop."""
    k1, k_m1, k2, e0 = config.k1, config.k_m1, config.k2, config.e0
    km = k_m1 + k2

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        s, c = y
        binding = k1 * e0 * s
        return np.array([-binding + (k1 * s + k_m1) * c, binding - (k1 * s + km) * c])

    return rhs


def scalar_rhs_array(config: ReactionConfig, scale: float = 1.0, constant: float = 0.0):
    """ds/dt = -scale * k2 e0 s / (K_M + s) + constant."""
    v = scale * config.k2 * config.e0
    K_M = config.K_M

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        return np.array([-v * y[0] / (K_M + y[0]) + constant])

    return rhs
