from typing import Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict
from scipy.integrate import OdeSolution

from enzyme_qssa.kinetics.mass_action import qss_manifold
from enzyme_qssa.kinetics.parameters import ReactionConfig


class CrossingRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    t_cross: float
    s_cross: float
    c_cross: float
    refinement_width: float
    sign_changes: int
    c_max_sampled: float
    residual: float


class Trajectory:
    """Accepted steps of one integration plus the per-step quartic interpolants.

    `states` has shape (n_points, dim); labels name the components ("s", "c") for the
    full system and a single label for scalar integrations.
    """

    def __init__(
        self,
        times: np.ndarray,
        states: np.ndarray,
        solution: Optional[OdeSolution],
        config: ReactionConfig,
        labels: Tuple[str, ...] = ("s", "c"),
    ):
        self.times = np.asarray(times, dtype=float)
        self.states = np.asarray(states, dtype=float)
        self.solution = solution
        self.config = config
        self.labels = labels
        self.times.setflags(write=False)
        self.states.setflags(write=False)

    @property
    def n_steps(self) -> int:
        return len(self.times) - 1

    @property
    def t_start(self) -> float:
        return float(self.times[0])

    @property
    def t_end(self) -> float:
        return float(self.times[-1])

    @property
    def is_full_system(self) -> bool:
        return self.labels == ("s", "c")

    def component(self, label: str) -> np.ndarray:
        return self.states[:, self.labels.index(label)]

    def __call__(self, t) -> np.ndarray:
        """Interpolated state, shape (dim,) for scalar t and (dim, m) for arrays."""
        if self.solution is None:
            t_arr = np.asarray(t, dtype=float)
            if t_arr.ndim == 0:
                return self.states[0].copy()
            return np.repeat(self.states[0][:, None], t_arr.size, axis=1)
        return self.solution(t)

    def value(self, label: str, t):
        return self(t)[self.labels.index(label)]

    def sample(self, per_step: int = 8) -> Tuple[np.ndarray, np.ndarray]:
        """Step ends plus `per_step` evenly spaced interior points of every step."""
        if self.solution is None or self.n_steps == 0:
            return self.times.copy(), self.states.T.copy()
        fractions = np.arange(per_step + 1) / (per_step + 1)
        starts = self.times[:-1]
        widths = np.diff(self.times)
        grid = (starts[:, None] + widths[:, None] * fractions[None, :]).ravel()
        grid = np.append(grid, self.times[-1])
        values = self.solution(grid)
        # dense output reproduces step ends only up to rounding; use the exact ones there
        step_index = np.arange(0, grid.size, per_step + 1)
        values[:, step_index] = self.states.T
        return grid, values

    def to_frame(self, event_times: Sequence[float] = ()) -> pd.DataFrame:
        frame = pd.DataFrame(self.states, columns=list(self.labels))
        frame.insert(0, "t", self.times)
        if len(event_times):
            events = np.asarray(event_times, dtype=float)
            values = np.atleast_2d(self(events))
            event_frame = pd.DataFrame(values.T, columns=list(self.labels))
            event_frame.insert(0, "t", events)
            frame = pd.concat([frame, event_frame], ignore_index=True)
            frame = frame.sort_values("t", kind="mergesort").reset_index(drop=True)
        if self.is_full_system:
            frame["g_s"] = qss_manifold(frame["s"].to_numpy(), self.config)
            frame["L"] = frame["c"] - frame["g_s"]
        return frame
