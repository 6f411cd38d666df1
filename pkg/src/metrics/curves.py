from dataclasses import dataclass, field

import numpy as np
import pandas as pd


@dataclass(frozen=True, eq=False)
class MetricCurve:
    # per_agent[s, i] is the metric for agent i at snapshot s; mean/std are across agents.
    name: str
    iterations: np.ndarray
    per_agent: np.ndarray = field(repr=False)

    @property
    def mean(self) -> np.ndarray:
        return self.per_agent.mean(axis=1)

    @property
    def std(self) -> np.ndarray:
        return self.per_agent.std(axis=1)

    @property
    def final_mean(self) -> float:
        return float(self.mean[-1])

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.per_agent)))

    def summary_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"iteration": self.iterations, "mean": self.mean, "std": self.std})

    def agent_frame(self) -> pd.DataFrame:
        snaps, agents = self.per_agent.shape
        return pd.DataFrame(
            {
                "iteration": np.repeat(self.iterations, agents),
                "agent": np.tile(np.arange(agents), snaps),
                "value": self.per_agent.ravel(),
            }
        )
