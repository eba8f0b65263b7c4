import json
import logging
from typing import Any, Dict, Optional

from pydantic import BaseModel, ConfigDict

from enzyme_qssa.analysis.transient import (
    DepletionBounds,
    HypothesisReport,
    TransientBounds,
    check_upper_time_hypotheses,
    complex_ceiling,
    crossing_time_bounds,
    depletion_bounds,
    linear_lyapunov_bounds,
    manifold_distance_bound,
    onset_time,
)
from enzyme_qssa.core.exceptions import DomainError
from enzyme_qssa.kinetics.mass_action import RIGOROUS_FORCING
from enzyme_qssa.kinetics.parameters import (
    DEFAULT_Q,
    DeltaStar,
    DerivedConstants,
    EpsilonSuite,
    ReactionConfig,
    SlowErrorParams,
    delta_star,
    derive_constants,
    epsilon_suite,
    slow_error_params,
)

logger = logging.getLogger(__name__)


class BoundReport(BaseModel):
    """Every closed-form quantity for one configuration, keyed by snake-cased symbol."""

    model_config = ConfigDict(frozen=True)

    config: Dict[str, float]
    q: float
    derived: DerivedConstants
    epsilons: EpsilonSuite
    delta_star: Optional[DeltaStar]
    transient: TransientBounds
    hypotheses: Optional[HypothesisReport]
    depletion: Optional[DepletionBounds]
    slow_error: Optional[SlowErrorParams]
    c_tilde: float
    manifold_distance_half_forcing: float
    manifold_distance_rigorous: float
    linear_lyapunov: Dict[str, float]
    t_ons: float

    def to_dict(self) -> Dict[str, Any]:
        return self.model_dump(mode="json", by_alias=True)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def bound_report(config: ReactionConfig, q: float = DEFAULT_Q, m_star: float = 1.0) -> BoundReport:
    suite = epsilon_suite(config)

    try:
        delta = delta_star(config)
        slow = slow_error_params(config, q, delta)
    except DomainError as e:
        logger.warning(f"delta* unavailable for {config.label()}: {e}")
        delta, slow = None, None

    hypotheses = check_upper_time_hypotheses(config, q) if 0.5 <= q < 1.0 else None
    depletion = depletion_bounds(config, q) if 0 < q < 1 else None

    return BoundReport(
        config=config.as_flat_dict(),
        q=q,
        derived=derive_constants(config),
        epsilons=suite,
        delta_star=delta,
        transient=crossing_time_bounds(config, q),
        hypotheses=hypotheses,
        depletion=depletion,
        slow_error=slow,
        c_tilde=complex_ceiling(config),
        manifold_distance_half_forcing=manifold_distance_bound(config),
        manifold_distance_rigorous=manifold_distance_bound(config, RIGOROUS_FORCING),
        linear_lyapunov=linear_lyapunov_bounds(config, q)._asdict(),
        t_ons=onset_time(config, m_star),
    )
