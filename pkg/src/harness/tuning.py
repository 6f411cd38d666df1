import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from src.errors import DomainError, HarnessError, SamplingError
from src.harness.components import Components, build_components
from src.harness.config import LINREG_W2, ExperimentConfig, resolve_eta
from src.harness.experiment import default_workers, diverged, metric_curve, run_trials, sampler_config, trial_seeds
from src.metrics import TrialEnsemble
from src.network.spectral import spectral_diagnostics
from src.samplers.runner import DIGING
from src.theory.lemma import lemma_bound_params

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TuningPoint:
    sampler: str
    eta: float
    score: Optional[float]
    failed: bool
    theory_feasible: Optional[bool]
    reason: str = ""

    def to_dict(self) -> dict:
        return {
            "sampler": self.sampler,
            "eta": self.eta,
            "score": self.score,
            "failed": self.failed,
            "theory_feasible": self.theory_feasible,
            "reason": self.reason,
        }


@dataclass(frozen=True)
class TuningResult:
    best: Dict[str, float]
    points: List[TuningPoint] = field(default_factory=list)
    # Samplers whose chosen stepsize is the smallest or largest grid value.
    on_edge: List[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "best": dict(self.best),
            "points": [p.to_dict() for p in self.points],
            "on_edge": list(self.on_edge),
        }


def theory_eta_bar(components: Components) -> Optional[float]:
    # The lemma's stepsize bound for the configured model and schedule, or None when
    # the schedule does not mix within one period.
    schedule, model = components.schedule, components.model
    diagnostics = spectral_diagnostics(schedule, window=schedule.period)
    try:
        lemma = lemma_bound_params(model.mu, model.lips, model.num_agents, diagnostics.window, diagnostics.delta)
    except DomainError:
        return None
    return lemma.eta_bar


def _score_point(
    config: ExperimentConfig,
    components: Components,
    sampler: str,
    eta: float,
    seeds: Sequence[int],
    workers: Optional[int],
) -> tuple:
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        try:
            trajectories = run_trials(sampler, sampler_config(config, sampler, components.model.lips, eta), components, seeds, workers)
            ensemble = TrialEnsemble.from_trajectories(trajectories)
            if diverged(ensemble):
                return None, "iterates diverged"
            score = metric_curve(config, components, ensemble).final_mean
        except (SamplingError, np.linalg.LinAlgError) as e:
            return None, str(e)
    if not np.isfinite(score):
        return None, "final metric is not finite"
    return float(score), ""


def tune_stepsize(
    config: ExperimentConfig,
    eta_grid: Sequence[Any],
    trials: Optional[int] = None,
    components: Optional[Components] = None,
) -> TuningResult:
    # Empirical grid search on the final-iteration metric. Theory feasibility is
    # reported per point but never excludes it.
    if not eta_grid:
        raise HarnessError("The stepsize grid is empty")
    components = components or build_components(config)
    lips = components.model.lips
    etas = sorted({resolve_eta(value, lips) for value in eta_grid})
    seeds = trial_seeds(config, trials if trials is not None else config.tune.get("trials"))
    workers = config.workers if config.workers is not None else default_workers()
    eta_bar = theory_eta_bar(components)
    minimize = config.experiment == LINREG_W2

    best: Dict[str, float] = {}
    points: List[TuningPoint] = []
    on_edge: List[str] = []
    for sampler in config.samplers:
        chosen, chosen_score = None, None
        for eta in etas:
            feasible = None
            if sampler == DIGING:
                feasible = eta_bar is not None and eta <= eta_bar
            score, reason = _score_point(config, components, sampler, eta, seeds, workers)
            points.append(TuningPoint(sampler, eta, score, score is None, feasible, reason))
            if score is None:
                logger.info("%s eta=%.4g failed: %s", sampler, eta, reason)
                continue
            logger.info("%s eta=%.4g final %.6g", sampler, eta, score)
            # Strict improvement keeps ties on the smaller stepsize.
            better = chosen_score is None or (score < chosen_score if minimize else score > chosen_score)
            if better:
                chosen, chosen_score = eta, score
        if chosen is None:
            raise HarnessError(f"Every stepsize in the grid failed for {sampler}")
        best[sampler] = chosen
        logger.info("Selected eta=%.4g for %s", chosen, sampler)
        if len(etas) > 1 and chosen in (etas[0], etas[-1]):
            logger.warning("Selected eta=%.4g for %s lies on the edge of the grid", chosen, sampler)
            on_edge.append(sampler)
    return TuningResult(best=best, points=points, on_edge=on_edge)
