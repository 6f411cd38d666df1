from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from src.data.datasets import Dataset
from src.errors import DataError


@dataclass(frozen=True, eq=False)
class Partition:
    agent_slices: Tuple[np.ndarray, ...]

    @property
    def num_agents(self) -> int:
        return len(self.agent_slices)

    @property
    def local_n(self) -> int:
        return self.agent_slices[0].size

    def split(self, dataset: Dataset) -> List[Tuple[np.ndarray, np.ndarray]]:
        # Per-agent (Z_j, y_j) blocks in the form the model builders take.
        return [(dataset.features[idx], dataset.targets[idx]) for idx in self.agent_slices]


def partition(dataset: Dataset, num_agents: int, seed: Optional[int] = None) -> Partition:
    n = dataset.size
    if num_agents < 1:
        raise DataError(f"num_agents must be positive, got {num_agents}")
    if n % num_agents != 0:
        raise DataError(f"{n} samples cannot be split evenly across {num_agents} agents")

    order = np.random.default_rng(seed).permutation(n)
    slices = tuple(np.sort(block) for block in np.split(order, num_agents))
    return Partition(agent_slices=slices)
