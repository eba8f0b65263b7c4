from typing import Optional

from pydantic import BaseModel, ConfigDict, Field

from enzyme_qssa.core.config import settings
from enzyme_qssa.kinetics.parameters import ReactionConfig


class IntegrationOptions(BaseModel):
    """Tolerances and limits for one integration; None means derived from the config."""

    model_config = ConfigDict(frozen=True)

    rel_tol: float = Field(default_factory=lambda: settings.QSSA_REL_TOL, ge=1e-13, le=1e-3)
    abs_tol: Optional[float] = Field(default=None, gt=0)
    t_end: Optional[float] = Field(default=None, gt=0)
    max_steps: int = Field(default_factory=lambda: settings.QSSA_MAX_STEPS, gt=0)
    event_tol: Optional[float] = Field(default=None, gt=0)

    def resolved_abs_tol(self, config: ReactionConfig) -> float:
        if self.abs_tol is not None:
            return self.abs_tol
        scale = max(config.s0, config.e0)
        return settings.QSSA_ABS_TOL_SCALE * (scale if scale > 0 else 1.0)

    def resolved_event_tol(self, t_guess: float) -> float:
        if self.event_tol is not None:
            return self.event_tol
        return 1e-12 * max(1.0, t_guess)

    def numerical_slack(self, config: ReactionConfig, scale: float) -> float:
        """Slack on an inequality between quantities of magnitude `scale`, in units of `scale`."""
        if scale <= 0:
            return 0.0
        return settings.QSSA_SLACK_FACTOR * (self.rel_tol * scale + self.resolved_abs_tol(config)) / scale
