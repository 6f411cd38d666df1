"""
Invariant self-checks run after every experiment.

Each check takes a CheckContext and returns (passed, detail). Results are written
into provenance and the command exits non-zero when any check fails.
"""

import inspect
import logging
import sys
from dataclasses import dataclass, replace
from typing import Dict, Optional, Tuple

import numpy as np

from src.decorators import is_self_check, self_check
from src.harness.components import Components
from src.harness.config import ExperimentConfig
from src.harness.experiment import Evaluation, sampler_config
from src.network.spectral import spectral_diagnostics
from src.network.topology import STOCHASTIC_TOL
from src.samplers.runner import DIGING, run
from src.samplers.state import EXACT

logger = logging.getLogger(__name__)

TRACKING_TOL = 1e-10
TRACKING_ITERATIONS = 50


@dataclass(frozen=True, eq=False)
class CheckContext:
    config: ExperimentConfig
    components: Components
    evaluation: Optional[Evaluation] = None


@self_check
def mixing_matrices(context: CheckContext) -> Tuple[bool, str]:
    schedule = context.components.schedule
    for k, (matrix, topology) in enumerate(zip(schedule.matrices, schedule.topologies)):
        W = matrix.entries
        if np.max(np.abs(W - W.T)) > STOCHASTIC_TOL:
            return False, f"entry {k} is not symmetric"
        if np.max(np.abs(W.sum(axis=1) - 1.0)) > STOCHASTIC_TOL:
            return False, f"entry {k} rows do not sum to 1"
        if W.min() < -STOCHASTIC_TOL:
            return False, f"entry {k} has negative weights"
        if topology is not None and not matrix.respects(topology):
            return False, f"entry {k} puts weight on a non-edge"
    return True, f"{schedule.period} matrices symmetric, stochastic and sparse"


@self_check
def spectral_gap(context: CheckContext) -> Tuple[bool, str]:
    schedule = context.components.schedule
    diagnostics = spectral_diagnostics(schedule, window=schedule.period)
    return diagnostics.delta < 1.0, f"delta={diagnostics.delta:.6g} at window {diagnostics.window}"


@self_check
def gradient_tracking_identity(context: CheckContext) -> Tuple[bool, str]:
    # With exact gradients and y^(0) = grad f_i(x_i^(0)) the tracker average equals
    # the average local gradient at every step.
    config, components = context.config, context.components
    if DIGING not in config.samplers:
        return True, "skipped: DIGing not run"
    model = components.model
    cfg = replace(
        sampler_config(config, DIGING, model.lips),
        iterations=min(config.iterations, TRACKING_ITERATIONS),
        gradient_mode=EXACT,
        y_init=EXACT,
        stride=1,
        record_y=True,
    )
    trajectory = run(DIGING, components.schedule, model, cfg, config.base_seed)
    worst = 0.0
    with np.errstate(over="ignore", invalid="ignore"):
        for x, y in zip(trajectory.x, trajectory.y):
            y_bar = y.mean(axis=0)
            gap = np.linalg.norm(y_bar - model.stacked_gradient(x).mean(axis=0))
            worst = max(worst, float(gap / (1.0 + np.linalg.norm(y_bar))))
    passed = bool(np.isfinite(worst) and worst <= TRACKING_TOL)
    return passed, f"max relative gap {worst:.3e} over {cfg.iterations} iterations"


@self_check
def paired_noise(context: CheckContext) -> Tuple[bool, str]:
    evaluation = context.evaluation
    if evaluation is None or len(evaluation.fingerprints) < 2:
        return True, "skipped: fewer than two samplers"
    failure = evaluation.pairing_failure()
    if failure is not None:
        return False, failure
    draws = sum(len(digests) for rows in evaluation.batch_fingerprints.values() for digests in rows)
    return True, f"identical noise across {len(evaluation.fingerprints)} samplers, {draws} minibatch draws compared"


@self_check
def finite_curves(context: CheckContext) -> Tuple[bool, str]:
    evaluation = context.evaluation
    if evaluation is None:
        return True, "skipped: no curves"
    bad = sorted(name for name, curve in evaluation.curves.items() if not curve.is_finite())
    if bad:
        return False, f"non-finite values in {bad}"
    return True, "all metric curves finite"


def collect_checks():
    return [obj for _, obj in inspect.getmembers(sys.modules[__name__], is_self_check)]


def run_self_checks(context: CheckContext) -> Dict[str, dict]:
    results = {}
    for check in collect_checks():
        passed, detail = check(context)
        results[check.__name__] = {"passed": bool(passed), "detail": detail}
        if passed:
            logger.info("Self-check %s passed: %s", check.__name__, detail)
        else:
            logger.error("Self-check %s failed: %s", check.__name__, detail)
    return results
