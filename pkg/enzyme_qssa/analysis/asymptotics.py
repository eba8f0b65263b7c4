import math
from typing import Dict

from pydantic import BaseModel, ConfigDict

from enzyme_qssa.analysis.transient import crossing_time_bounds, depletion_bounds
from enzyme_qssa.kinetics.parameters import DEFAULT_Q, ReactionConfig, epsilon_suite

EPS_INF_NOTE = "eps_inf appears only in the small-k1 list and has no definition elsewhere; reported, not interpreted"


class AsymptoticPair(BaseModel):
    model_config = ConfigDict(frozen=True)

    exact: float
    asymptotic: float
    rel_gap: float


class SmallK1Asymptotics(BaseModel):
    model_config = ConfigDict(frozen=True)

    eps_SSl: AsymptoticPair
    t_SSl: AsymptoticPair
    t_ell_dagger: AsymptoticPair
    C_star: AsymptoticPair
    t_u_dagger_1: AsymptoticPair
    depletion: AsymptoticPair
    eps_inf: float
    eps_inf_defined: bool = False
    eps_inf_note: str = EPS_INF_NOTE

    def pairs(self) -> Dict[str, AsymptoticPair]:
        return {
            name: getattr(self, name)
            for name in ("eps_SSl", "t_SSl", "t_ell_dagger", "C_star", "t_u_dagger_1", "depletion")
        }


class SmallE0Asymptotics(BaseModel):
    model_config = ConfigDict(frozen=True)

    q: float
    t_ell_dagger: AsymptoticPair
    t_u_dagger_q: AsymptoticPair
    t_u_dagger_1: AsymptoticPair
    depletion_upper: AsymptoticPair

    def pairs(self) -> Dict[str, AsymptoticPair]:
        return {name: getattr(self, name) for name in ("t_ell_dagger", "t_u_dagger_q", "t_u_dagger_1", "depletion_upper")}


def _pair(exact: float, asymptotic: float) -> AsymptoticPair:
    return AsymptoticPair(exact=exact, asymptotic=asymptotic, rel_gap=abs(exact - asymptotic) / abs(exact))


def small_k1_asymptotics(config: ReactionConfig) -> SmallK1Asymptotics:
    """Leading-order forms as k1 -> 0, benchmarked on eps_RS, next to their exact values."""
    suite = epsilon_suite(config)
    bounds = crossing_time_bounds(config, q=1.0)
    km = config.k_m1 + config.k2
    eps_rs = suite.eps_RS
    log_km = math.log(km / config.k2)
    leading_time = (math.log(1.0 / eps_rs) + log_km) / km

    eps = suite.eps_SSl
    depletion_exact = eps * math.log1p(bounds.C_star / eps)

    return SmallK1Asymptotics(
        eps_SSl=_pair(eps, eps_rs),
        t_SSl=_pair(bounds.t_SSl, 1.0 / km),
        t_ell_dagger=_pair(bounds.t_ell_dagger, leading_time),
        C_star=_pair(bounds.C_star, km / config.k2),
        t_u_dagger_1=_pair(bounds.t_u_dagger_1, leading_time),
        depletion=_pair(depletion_exact, eps_rs * (math.log(1.0 / eps_rs) + log_km)),
        eps_inf=eps_rs * config.k_m1 / km,
    )


def small_e0_asymptotics(config: ReactionConfig, q: float = DEFAULT_Q) -> SmallE0Asymptotics:
    """Exact transient bounds next to their two-term forms in log(1/eps_SSl); gaps vanish as e0 -> 0."""
    bounds = crossing_time_bounds(config, q)
    depletion = depletion_bounds(config, q)
    return SmallE0Asymptotics(
        q=q,
        t_ell_dagger=_pair(bounds.t_ell_dagger, bounds.t_ell_dagger_asymptotic),
        t_u_dagger_q=_pair(bounds.t_u_dagger_q, bounds.t_u_dagger_q_asymptotic),
        t_u_dagger_1=_pair(bounds.t_u_dagger_1, bounds.t_u_dagger_1_asymptotic),
        depletion_upper=_pair(depletion.upper, depletion.upper_asymptotic),
    )
