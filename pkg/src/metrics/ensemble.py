from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from src.errors import MetricError
from src.samplers.state import Trajectory
from src.utils.linalg import psd_project


@dataclass(frozen=True, eq=False)
class TrialEnsemble:
    # samples[t, s, i] is agent i's iterate at snapshot s of trial t.
    iterations: np.ndarray
    samples: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if self.samples.ndim != 4:
            raise MetricError(f"Ensemble samples must be (trials, snapshots, agents, dim), got {self.samples.shape}")
        if self.samples.shape[1] != self.iterations.shape[0]:
            raise MetricError("Ensemble snapshots do not match the iteration index")

    @property
    def num_trials(self) -> int:
        return self.samples.shape[0]

    @property
    def num_agents(self) -> int:
        return self.samples.shape[2]

    @property
    def dim(self) -> int:
        return self.samples.shape[3]

    @classmethod
    def from_trajectories(cls, trajectories: Sequence[Trajectory]) -> "TrialEnsemble":
        if not trajectories:
            raise MetricError("Cannot build an ensemble from zero trajectories")
        iterations = trajectories[0].iterations
        shape = trajectories[0].x.shape
        for trajectory in trajectories:
            if trajectory.x.shape != shape or not np.array_equal(trajectory.iterations, iterations):
                raise MetricError("All trials must share (iterations, agents, dim)")
        return cls(iterations=iterations.copy(), samples=np.stack([t.x for t in trajectories]))

    def merge(self, other: "TrialEnsemble") -> "TrialEnsemble":
        # Concatenation along the trial axis; associative.
        if not np.array_equal(self.iterations, other.iterations) or self.samples.shape[1:] != other.samples.shape[1:]:
            raise MetricError("Cannot merge ensembles with different layouts")
        return TrialEnsemble(self.iterations, np.concatenate([self.samples, other.samples]))

    def snapshot_index(self, iteration: int) -> int:
        hits = np.flatnonzero(self.iterations == iteration)
        if hits.size == 0:
            raise MetricError(f"Iteration {iteration} was not recorded")
        return int(hits[0])


@dataclass(frozen=True, eq=False)
class MomentEstimate:
    mean: np.ndarray
    covariance: np.ndarray


def sample_moments(points: np.ndarray) -> MomentEstimate:
    # points: (T, dim). Unbiased covariance (divisor T - 1), clamped onto the PSD cone.
    T = points.shape[0]
    if T < 2:
        raise MetricError(f"At least 2 trials are needed for a covariance, got {T}")
    mean = points.mean(axis=0)
    centered = points - mean
    covariance = centered.T @ centered / (T - 1)
    covariance = 0.5 * (covariance + covariance.T)
    return MomentEstimate(mean=mean, covariance=psd_project(covariance))


def ensemble_moments(ensemble: TrialEnsemble, agent: int, iteration: int) -> MomentEstimate:
    s = ensemble.snapshot_index(iteration)
    return sample_moments(ensemble.samples[:, s, agent, :])
