from src.harness.components import Components, build_components
from src.harness.config import (
    ExperimentConfig,
    apply_overrides,
    config_from_dict,
    load_config,
    parse_grid,
    resolve_eta,
)
from src.harness.experiment import Evaluation, RunArtifact, evaluate_samplers, run_experiment
from src.harness.figures import FIGURE_IDS, reproduce
from src.harness.tuning import TuningPoint, TuningResult, tune_stepsize

__all__ = [
    "Components",
    "Evaluation",
    "ExperimentConfig",
    "FIGURE_IDS",
    "RunArtifact",
    "TuningPoint",
    "TuningResult",
    "apply_overrides",
    "build_components",
    "config_from_dict",
    "evaluate_samplers",
    "load_config",
    "parse_grid",
    "reproduce",
    "resolve_eta",
    "run_experiment",
    "tune_stepsize",
]
