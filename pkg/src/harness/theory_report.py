import json
import logging
import math
import os
from typing import Optional, Tuple

import numpy as np

from src.errors import DomainError
from src.harness.artifacts import output_directory
from src.harness.components import Components, build_components
from src.harness.config import ExperimentConfig
from src.harness.experiment import default_workers, sampler_config
from src.models.oracles import estimate_noise_bound
from src.network.spectral import spectral_diagnostics
from src.samplers.runner import DIGING
from src.theory import (
    TheoryInputs,
    TheoryReport,
    bound_d_bar,
    corollary_schedule,
    estimate_init_stats,
    evaluate_constants,
    gibbs_second_moment_bound,
    lemma_bound_params,
)

logger = logging.getLogger(__name__)

REPORT_FILE = "theory_report.json"
NOISE_DRAWS = 500


def k_grid(iterations: int) -> list:
    step = max(1, iterations // 10)
    return sorted(set(range(0, iterations + 1, step)) | {iterations})


def gradient_noise_sigma(components: Components, seed: int) -> float:
    model = components.model
    points = [model.minimizer, np.zeros(model.dim)]
    sigma_sq = estimate_noise_bound(model, points, np.random.default_rng(seed), draws=NOISE_DRAWS)
    return math.sqrt(sigma_sq)


def build_theory_report(
    config: ExperimentConfig,
    epsilon: Optional[float] = None,
    warmup_trials: int = 30,
    statement_constant: bool = False,
    components: Optional[Components] = None,
) -> Tuple[TheoryReport, dict]:
    components = components or build_components(config)
    schedule, model = components.schedule, components.model
    diagnostics = spectral_diagnostics(schedule)
    B, delta = diagnostics.window, diagnostics.delta

    sigma = gradient_noise_sigma(components, config.base_seed)
    cfg = sampler_config(config, DIGING, model.lips)
    workers = config.workers if config.workers is not None else default_workers()
    init_stats = estimate_init_stats(schedule, model, cfg, warmup_trials, config.base_seed, window=B, workers=workers)
    lemma = lemma_bound_params(model.mu, model.lips, model.num_agents, B, delta)

    notes = []
    if cfg.eta <= lemma.eta_bar:
        lam = lemma.lambda_of(cfg.eta)
    else:
        # Outside the lemma's range: any lambda with (1 + delta)/2 <= lambda^B < 1 keeps the constants bounded.
        lam = ((1.0 + delta) / 2.0) ** (1.0 / B)
        notes.append(f"eta={cfg.eta:.4g} exceeds eta_bar={lemma.eta_bar:.4g}; lambda set from the mixing rate")

    inputs = TheoryInputs(
        mu=model.mu,
        lips=model.lips,
        num_agents=model.num_agents,
        dim=model.dim,
        sigma=sigma,
        delta=delta,
        window=B,
        eta=cfg.eta,
        lambda_param=lam,
        alpha=lemma.alpha,
        beta=lemma.beta,
        init_stats=init_stats,
    )
    report = evaluate_constants(inputs)
    try:
        dbar = bound_d_bar(inputs, lemma)
    except DomainError as e:
        dbar = None
        notes.append(str(e))
    report = report.with_lemma(lemma, dbar)
    if epsilon is not None:
        report = report.with_corollary(corollary_schedule(inputs, epsilon, lemma, statement_constant))
    report.warnings.extend(notes)

    document = report.to_dict(k_grid(config.iterations))
    document["spectral"] = diagnostics.to_dict()
    document["lambda_of_eta"] = lam
    document["gibbs_second_moment_bound"] = gibbs_second_moment_bound(model.mu, model.dim, model.num_agents)
    return report, document


def write_theory_report(config: ExperimentConfig, document: dict, output_root: Optional[str] = None) -> str:
    directory = output_directory(config, output_root)
    os.makedirs(directory, exist_ok=True)
    path = os.path.join(directory, REPORT_FILE)
    with open(path, "w") as f:
        json.dump(document, f, indent=2, sort_keys=True, default=str)
    logger.info("Theory report written to %s", path)
    return path
