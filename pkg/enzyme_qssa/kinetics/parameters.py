import logging
import math
from typing import Dict, Optional

from pydantic import BaseModel, ConfigDict, Field

from enzyme_qssa.core.exceptions import DomainError, InvalidInputError

logger = logging.getLogger(__name__)

DEFAULT_Q = 0.97
DISCRIMINANT_FLOOR = -1e-14
SIMPLIFIED_DELTA_LIMIT = 0.1


class RateConstants(BaseModel):
    model_config = ConfigDict(frozen=True)

    k1: float = Field(gt=0, allow_inf_nan=False)
    k_m1: float = Field(ge=0, allow_inf_nan=False)
    k2: float = Field(gt=0, allow_inf_nan=False)


class ReactionConfig(BaseModel):
    """Kinetic inputs of one Michaelis-Menten experiment started at (s0, 0)."""

    model_config = ConfigDict(frozen=True)

    rates: RateConstants
    s0: float = Field(ge=0, allow_inf_nan=False)
    e0: float = Field(ge=0, allow_inf_nan=False)

    @classmethod
    def from_values(cls, k1: float, k_m1: float, k2: float, s0: float, e0: float) -> "ReactionConfig":
        return cls(rates=RateConstants(k1=k1, k_m1=k_m1, k2=k2), s0=s0, e0=e0)

    @property
    def k1(self) -> float:
        return self.rates.k1

    @property
    def k_m1(self) -> float:
        return self.rates.k_m1

    @property
    def k2(self) -> float:
        return self.rates.k2

    @property
    def K_M(self) -> float:
        return (self.rates.k_m1 + self.rates.k2) / self.rates.k1

    def with_value(self, name: str, value: float) -> "ReactionConfig":
        """Copy with one of k1, k_m1, k2, s0, e0 replaced (sweep axes)."""
        values = self.as_flat_dict()
        if name not in values:
            raise InvalidInputError(f"Unknown parameter '{name}', expected one of {sorted(values)}")
        values[name] = value
        return ReactionConfig.from_values(**values)

    def as_flat_dict(self) -> Dict[str, float]:
        return {"k1": self.k1, "k_m1": self.k_m1, "k2": self.k2, "s0": self.s0, "e0": self.e0}

    def label(self) -> str:
        return ",".join(f"{key}={value:g}" for key, value in self.as_flat_dict().items())

    def require_positive(self) -> None:
        """Bounds are only defined for s0 > 0 and e0 > 0."""
        if self.s0 <= 0:
            raise InvalidInputError(f"s0 must be positive for bound computations, got {self.s0}")
        if self.e0 <= 0:
            raise InvalidInputError(f"e0 must be positive for bound computations, got {self.e0}")


class DerivedConstants(BaseModel):
    model_config = ConfigDict(frozen=True)

    K_M: float
    K_S: float
    K: float
    v_inf: float
    sigma: float
    Theta: float
    Theta_bar: float


class EpsilonSuite(BaseModel):
    model_config = ConfigDict(frozen=True)

    eps_BH: float
    eps_RS: float
    eps_SSl: float
    eps_MM: float
    eps_opt: float
    eta: float


class DeltaStar(BaseModel):
    model_config = ConfigDict(frozen=True)

    delta_star: float
    intermediate_bound: float
    simplified_bound: float
    simplified_valid: bool


class SlowErrorParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    q: float
    eps_L: float
    eps_W: float
    eps_LW_simplified: float
    eps_LW_simplified_valid: bool
    eps_opt: float
    eps_opt_over_q: float
    eps_dd: float
    eps_dag_L: float
    eps_dag_M: float
    eps_S_L: float
    eps_S_M: float
    Delta_star: float
    Delta_dstar: float
    t_star: float


def derive_constants(config: ReactionConfig) -> DerivedConstants:
    k1, k_m1, k2 = config.k1, config.k_m1, config.k2
    K_M = (k_m1 + k2) / k1
    theta = k2 / K_M
    return DerivedConstants(
        K_M=K_M,
        K_S=k_m1 / k1,
        K=k2 / k1,
        v_inf=k2 * config.e0,
        sigma=config.s0 / K_M,
        Theta=theta,
        Theta_bar=theta / k1,
    )


def epsilon_suite(config: ReactionConfig) -> EpsilonSuite:
    config.require_positive()
    k1, k_m1, k2 = config.k1, config.k_m1, config.k2
    s0, e0 = config.s0, config.e0
    K_M = (k_m1 + k2) / k1
    K_S = k_m1 / k1

    eps_RS = e0 / K_M
    eps_SSl = e0 / (K_M + s0)
    eta = (K_S + s0) / (K_M + s0)
    return EpsilonSuite(
        eps_BH=e0 / s0,
        eps_RS=eps_RS,
        eps_SSl=eps_SSl,
        eps_MM=eps_RS * k2 / (k_m1 + k2),
        eps_opt=eps_SSl * eta,
        eta=eta,
    )


def segel_slemrod_time(config: ReactionConfig) -> float:
    """Fast timescale t_SSl = 1/(k1 (K_M + s0))."""
    return 1.0 / (config.k1 * (config.K_M + config.s0))


def delta_star(config: ReactionConfig) -> DeltaStar:
    """Smallest delta for which the region between g and g_delta is positively invariant."""
    k1, k2, e0 = config.k1, config.k2, config.e0
    K_M = config.K_M
    x = (4.0 * k2 / k1) * e0 / (K_M + e0) ** 2
    discriminant = 1.0 - x
    if discriminant < DISCRIMINANT_FLOOR:
        raise DomainError(
            f"delta* discriminant is negative ({discriminant:.3e}); e0={e0} is too large for the formula"
        )
    discriminant = max(discriminant, 0.0)

    # 1 - sqrt(1 - x) rewritten as x / (1 + sqrt(1 - x)) to avoid cancellation for small e0
    value = 2.0 * e0 / ((K_M + e0) * (1.0 + math.sqrt(discriminant)))
    eps_RS = e0 / K_M
    return DeltaStar(
        delta_star=value,
        intermediate_bound=(10.0 / 9.0) * e0 / (K_M + e0),
        simplified_bound=(10.0 / 9.0) * eps_RS,
        simplified_valid=eps_RS <= SIMPLIFIED_DELTA_LIMIT,
    )


def c_star(config: ReactionConfig) -> float:
    K_M = config.K_M
    return config.k1 * (K_M + config.s0) ** 2 / (config.k2 * K_M)


def slow_error_params(config: ReactionConfig, q: float = DEFAULT_Q, delta: Optional[DeltaStar] = None) -> SlowErrorParams:
    if not 0 < q <= 1:
        raise InvalidInputError(f"q must lie in (0, 1], got {q}")
    suite = epsilon_suite(config)
    if delta is None:
        delta = delta_star(config)

    K_M = config.K_M
    K_S = config.k_m1 / config.k1
    s0 = config.s0
    eps = suite.eps_SSl
    log_inv_eps = math.log(1.0 / eps)
    C_star = c_star(config)
    excess = math.exp(s0 / K_M - 1.0)

    linear_factor = (K_M + s0) ** 2 * (K_S + s0) / K_M**3
    lambert_factor = excess * (K_M + s0) / K_M
    d = delta.delta_star

    return SlowErrorParams(
        q=q,
        eps_L=suite.eps_RS * (K_M + s0) * (K_S + s0) / K_M**2,
        eps_W=excess * d / (1.0 - d),
        eps_LW_simplified=1.25 * excess * suite.eps_RS,
        eps_LW_simplified_valid=suite.eps_RS <= SIMPLIFIED_DELTA_LIMIT,
        eps_opt=suite.eps_opt,
        eps_opt_over_q=suite.eps_opt / q,
        eps_dd=eps * log_inv_eps,
        eps_dag_L=eps * (math.log(C_star / eps) + linear_factor),
        eps_dag_M=eps * (math.log(C_star / eps) + lambert_factor),
        eps_S_L=eps * (suite.eta + linear_factor),
        eps_S_M=eps * (suite.eta + lambert_factor),
        Delta_star=eps * (log_inv_eps + math.log(C_star)),
        Delta_dstar=eps * log_inv_eps,
        t_star=segel_slemrod_time(config) * log_inv_eps,
    )
