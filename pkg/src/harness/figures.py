import logging
from typing import Optional

from src.errors import ConfigError, DataError
from src.harness.components import build_components
from src.harness.config import apply_overrides, config_from_dict
from src.harness.experiment import RunArtifact, run_experiment
from src.harness.tuning import tune_stepsize
from src.loader import load_figures

logger = logging.getLogger(__name__)

FIGURE_IDS = ("fig2a", "fig2b", "fig2c", "fig3a", "fig3b", "fig3c")


def figure_config(figure_id: str, figures: Optional[dict] = None):
    figures = load_figures() if figures is None else figures
    if figure_id not in figures:
        raise ConfigError(f"Unknown figure '{figure_id}', expected one of {sorted(figures)}")
    return config_from_dict(figures[figure_id])


def reproduce(
    figure_id: str,
    data_path: Optional[str] = None,
    overrides: Optional[dict] = None,
    output_root: Optional[str] = None,
    figures: Optional[dict] = None,
) -> RunArtifact:
    config = figure_config(figure_id, figures)
    if data_path is not None:
        config = apply_overrides(config, data=f"csv:{data_path}")
    if overrides:
        config = apply_overrides(config, **overrides)
    if config.data["source"] == "csv" and not config.data.get("path"):
        raise DataError(f"{figure_id} needs the dataset CSV, pass it with --data <path>")

    components = build_components(config)
    extra = {"figure": figure_id}
    grid = config.tune.get("grid")
    if grid:
        tuning = tune_stepsize(config, grid, config.tune.get("trials"), components)
        for sampler, eta in tuning.best.items():
            config = config.with_eta(sampler, eta)
        extra["tuning"] = tuning.to_dict()
    logger.info("Reproducing %s", figure_id)
    return run_experiment(config, components, output_root, extra_provenance=extra)
