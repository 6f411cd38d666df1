import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional, Tuple

import numpy as np

from src.errors import DomainError
from src.models.oracles import ModelSpec
from src.network.schedules import GraphSchedule
from src.samplers.runner import DIGING, run
from src.samplers.state import SamplerConfig

logger = logging.getLogger(__name__)

MIN_WARMUP_TRIALS = 30


@dataclass(frozen=True)
class InitStats:
    # L2 norms (root mean squares over trials) of the quantities entering the omega
    # terms, with delta-method standard errors. x_consensus[t-1] is ||x~^(t-1)||.
    x0_norm: float
    avg_gap_norm: float
    x_consensus: Tuple[float, ...]
    y_consensus: Tuple[float, ...]
    x0_sq_mean: float = 0.0
    x0_sq_se: float = 0.0
    x0_norm_se: float = 0.0
    avg_gap_se: float = 0.0
    x_consensus_se: Tuple[float, ...] = ()
    y_consensus_se: Tuple[float, ...] = ()
    trials: int = 0

    @property
    def window(self) -> int:
        return len(self.x_consensus)

    def to_dict(self) -> dict:
        return {
            "x0_norm": self.x0_norm,
            "x0_norm_se": self.x0_norm_se,
            "x0_sq_mean": self.x0_sq_mean,
            "x0_sq_se": self.x0_sq_se,
            "avg_gap_norm": self.avg_gap_norm,
            "avg_gap_se": self.avg_gap_se,
            "x_consensus": list(self.x_consensus),
            "x_consensus_se": list(self.x_consensus_se),
            "y_consensus": list(self.y_consensus),
            "y_consensus_se": list(self.y_consensus_se),
            "trials": self.trials,
        }


def _rms(squares: np.ndarray) -> Tuple[float, float, float, float]:
    # squares has one entry per trial. Returns (mean, se of mean, sqrt(mean), se of sqrt).
    T = squares.shape[0]
    mean = float(squares.mean())
    se = float(squares.std(ddof=1) / np.sqrt(T))
    norm = float(np.sqrt(mean))
    norm_se = se / (2.0 * norm) if norm > 0.0 else 0.0
    return mean, se, norm, norm_se


def estimate_init_stats(
    schedule: GraphSchedule,
    model: ModelSpec,
    config: SamplerConfig,
    warmup_trials: int = MIN_WARMUP_TRIALS,
    base_seed: int = 0,
    window: Optional[int] = None,
    workers: Optional[int] = None,
) -> InitStats:
    # Runs DIGing for the first B steps across fresh trials and averages the squared
    # norms the theory needs.
    if warmup_trials < MIN_WARMUP_TRIALS:
        raise DomainError(f"Need at least {MIN_WARMUP_TRIALS} warmup trials, got {warmup_trials}")
    B = schedule.default_window if window is None else int(window)
    warmup = replace(config, iterations=B - 1, stride=1, record_y=True)

    def one(t: int):
        return run(DIGING, schedule, model, warmup, base_seed + t)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        trajectories = list(pool.map(one, range(warmup_trials)))

    xs = np.stack([traj.x for traj in trajectories])  # (T, B, N, dim)
    ys = np.stack([traj.y for traj in trajectories])
    x_tilde = xs - xs.mean(axis=2, keepdims=True)
    y_tilde = ys - ys.mean(axis=2, keepdims=True)
    x_sq = np.einsum("tbnd,tbnd->tb", x_tilde, x_tilde)
    y_sq = np.einsum("tbnd,tbnd->tb", y_tilde, y_tilde)

    x0 = xs[:, 0]
    x0_stats = _rms(np.einsum("tnd,tnd->t", x0, x0))
    gap = x0.mean(axis=1) - model.minimizer
    gap_stats = _rms(np.einsum("td,td->t", gap, gap))

    x_cons = [_rms(x_sq[:, b]) for b in range(B)]
    y_cons = [_rms(y_sq[:, b]) for b in range(B)]
    stats = InitStats(
        x0_norm=x0_stats[2],
        avg_gap_norm=gap_stats[2],
        x_consensus=tuple(c[2] for c in x_cons),
        y_consensus=tuple(c[2] for c in y_cons),
        x0_sq_mean=x0_stats[0],
        x0_sq_se=x0_stats[1],
        x0_norm_se=x0_stats[3],
        avg_gap_se=gap_stats[3],
        x_consensus_se=tuple(c[3] for c in x_cons),
        y_consensus_se=tuple(c[3] for c in y_cons),
        trials=warmup_trials,
    )
    logger.info("Estimated initial statistics over %d warmup trials (B=%d)", warmup_trials, B)
    return stats
