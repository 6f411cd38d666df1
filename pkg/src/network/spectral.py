from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from src.errors import ConstructionError
from src.network.schedules import GraphSchedule
from src.utils.linalg import sigma_max


@dataclass(frozen=True)
class SpectralDiagnostics:
    window: int
    delta_per_k: Tuple[float, ...]
    delta: float

    @property
    def gap(self) -> float:
        return 1.0 - self.delta

    def to_dict(self) -> dict:
        return {
            "window": self.window,
            "delta": self.delta,
            "gap": self.gap,
            "delta_per_k": list(self.delta_per_k),
        }


def window_product(schedule: GraphSchedule, k: int, window: int) -> np.ndarray:
    # W_B^(k) = W^(k) W^(k-1) ... W^(k-B+1), indices taken mod the period.
    product = np.eye(schedule.num_agents)
    for offset in range(window):
        product = product @ schedule.at(k - offset).entries
    return product


def spectral_diagnostics(
    schedule: GraphSchedule, window: Optional[int] = None
) -> SpectralDiagnostics:
    B = schedule.default_window if window is None else int(window)
    if B < 1:
        raise ConstructionError(f"window must be at least 1, got {B}")

    n = schedule.num_agents
    consensus = np.full((n, n), 1.0 / n)
    deltas = []
    for k in range(schedule.period):
        deviation = window_product(schedule, k, B) - consensus
        # sigma_max is clamped at 0 internally; products of stochastic matrices
        # cannot expand the consensus complement beyond 1 except by round-off.
        deltas.append(min(sigma_max(deviation), 1.0))

    return SpectralDiagnostics(window=B, delta_per_k=tuple(deltas), delta=max(deltas))
