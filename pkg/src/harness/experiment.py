import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from src.errors import HarnessError, MetricError, SamplingError
from src.harness.config import LINREG_W2, ExperimentConfig, resolve_eta
from src.harness.components import Components, build_components
from src.metrics import TrialEnsemble, accuracy_curve, w2_to_posterior_curve
from src.metrics.curves import MetricCurve
from src.samplers.runner import run
from src.samplers.state import SamplerConfig, Trajectory
from src.samplers.streams import first_batch_mismatch

logger = logging.getLogger(__name__)

DIVERGENCE_BOUND = 1e8
RUNTIME_SOFT_LIMIT = 180.0


@dataclass(frozen=True, eq=False)
class Evaluation:
    etas: Dict[str, float]
    ensembles: Dict[str, TrialEnsemble]
    curves: Dict[str, MetricCurve]
    fingerprints: Dict[str, List[str]]
    batch_fingerprints: Dict[str, List[Dict[int, str]]] = field(default_factory=dict)

    @property
    def metric(self) -> str:
        return next(iter(self.curves.values())).name if self.curves else ""

    def pairing_failure(self) -> Optional[str]:
        # Describes the first trial whose samplers saw different randomness.
        columns = list(self.fingerprints.values())
        for t, row in enumerate(zip(*columns)):
            if len(set(row)) != 1:
                return f"trial {t} consumed different Langevin noise across samplers"
        batch_columns = list(self.batch_fingerprints.values())
        for t, row in enumerate(zip(*batch_columns)):
            key = first_batch_mismatch(row)
            if key is not None:
                return f"trial {t} drew different minibatch indices at key {key} across samplers"
        return None


@dataclass(frozen=True, eq=False)
class RunArtifact:
    output_dir: str
    curves: Dict[str, MetricCurve]
    provenance: dict
    checks: Dict[str, dict] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(result["passed"] for result in self.checks.values())


def sampler_config(config: ExperimentConfig, sampler: str, lips: float, eta: Optional[float] = None) -> SamplerConfig:
    return SamplerConfig(
        eta=resolve_eta(config.eta_for(sampler), lips) if eta is None else eta,
        iterations=config.iterations,
        noise=config.noise,
        gradient_mode=config.model.get("gradient", "minibatch"),
        batch=config.model.get("batch"),
        stride=config.stride,
        y_init=config.model.get("y_init", "exact"),
        init=config.init.get("kind", "gaussian"),
        init_scale=float(config.init.get("scale", 1.0)),
    )


def trial_seeds(config: ExperimentConfig, trials: Optional[int] = None) -> List[int]:
    return [config.base_seed + t for t in range(config.trials if trials is None else trials)]


def default_workers() -> Optional[int]:
    value = os.getenv("DIGING_WORKERS")
    return int(value) if value else None


def run_trials(
    sampler: str,
    sampler_cfg: SamplerConfig,
    components: Components,
    seeds: Sequence[int],
    workers: Optional[int] = None,
) -> List[Trajectory]:
    # Trials share only immutable inputs, so the thread pool needs no locking.
    def one(seed: int) -> Trajectory:
        try:
            return run(sampler, components.schedule, components.model, sampler_cfg, seed)
        except SamplingError as e:
            raise HarnessError(f"{sampler} trial {seed}: {e}") from e

    if workers == 1:
        return [one(seed) for seed in seeds]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, seeds))


def diverged(ensemble: TrialEnsemble) -> bool:
    with np.errstate(over="ignore", invalid="ignore"):
        samples = ensemble.samples
        return bool(not np.all(np.isfinite(samples)) or np.max(np.abs(samples)) > DIVERGENCE_BOUND)


def metric_curve(config: ExperimentConfig, components: Components, ensemble: TrialEnsemble) -> MetricCurve:
    if config.experiment == LINREG_W2:
        return w2_to_posterior_curve(ensemble, components.target)
    return accuracy_curve(ensemble, components.test_set)


def evaluate_samplers(
    config: ExperimentConfig,
    components: Optional[Components] = None,
    trials: Optional[int] = None,
) -> Evaluation:
    components = components or build_components(config)
    seeds = trial_seeds(config, trials)
    workers = config.workers if config.workers is not None else default_workers()

    etas, ensembles, curves, fingerprints, batches = {}, {}, {}, {}, {}
    for sampler in config.samplers:
        cfg = sampler_config(config, sampler, components.model.lips)
        logger.info("Running %s: eta=%.4g, %d trials x %d iterations", sampler, cfg.eta, len(seeds), cfg.iterations)
        trajectories = run_trials(sampler, cfg, components, seeds, workers)
        ensemble = TrialEnsemble.from_trajectories(trajectories)
        try:
            curve = metric_curve(config, components, ensemble)
        except MetricError as e:
            raise MetricError(f"{sampler}: {e}") from e
        etas[sampler] = cfg.eta
        ensembles[sampler] = ensemble
        curves[sampler] = curve
        fingerprints[sampler] = [t.noise_fingerprint for t in trajectories]
        batches[sampler] = [t.batch_fingerprint for t in trajectories]
        logger.info("%s final %s: %.6g", sampler, curve.name, curve.final_mean)
    return Evaluation(
        etas=etas, ensembles=ensembles, curves=curves, fingerprints=fingerprints, batch_fingerprints=batches
    )


def run_experiment(
    config: ExperimentConfig,
    components: Optional[Components] = None,
    output_root: Optional[str] = None,
    extra_provenance: Optional[dict] = None,
) -> RunArtifact:
    # Imported here: artifacts and checks import this module.
    from src.harness.artifacts import output_directory, provenance_document, write_artifacts
    from src.harness.checks import CheckContext, run_self_checks

    started = time.perf_counter()
    components = components or build_components(config)
    evaluation = evaluate_samplers(config, components)
    checks = run_self_checks(CheckContext(config, components, evaluation))

    directory = output_directory(config, output_root)
    provenance = provenance_document(config, components, evaluation, checks)
    if extra_provenance:
        provenance.update(extra_provenance)
    write_artifacts(directory, evaluation, provenance, plots=config.plots)

    elapsed = time.perf_counter() - started
    if elapsed > RUNTIME_SOFT_LIMIT:
        logger.warning("Experiment took %.1fs, above the %.0fs soft limit", elapsed, RUNTIME_SOFT_LIMIT)
    else:
        logger.info("Experiment finished in %.1fs", elapsed)
    return RunArtifact(output_dir=directory, curves=evaluation.curves, provenance=provenance, checks=checks)
