import hashlib
import json
import logging
import os
from typing import Dict, Optional

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import networkx  # noqa: E402
import numpy  # noqa: E402
import pandas  # noqa: E402
import scipy  # noqa: E402

from src import __version__  # noqa: E402
from src.harness.components import Components  # noqa: E402
from src.harness.config import ExperimentConfig  # noqa: E402
from src.harness.experiment import Evaluation, trial_seeds  # noqa: E402
from src.metrics.curves import MetricCurve  # noqa: E402
from src.network.spectral import spectral_diagnostics  # noqa: E402

logger = logging.getLogger(__name__)

PROVENANCE_FILE = "provenance.json"
DEFAULT_OUTPUT_ROOT = "runs"

# Fixed hash salt and no date keep SVG output byte-stable between reruns.
matplotlib.rcParams["svg.hashsalt"] = "diging-sgld"


def config_digest(config: ExperimentConfig) -> str:
    text = json.dumps(config.to_dict(), sort_keys=True, default=str)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def output_directory(config: ExperimentConfig, output_root: Optional[str] = None) -> str:
    # An explicit output_dir wins; otherwise runs/<experiment>-<config hash>.
    if config.output_dir:
        return config.output_dir
    root = output_root or os.getenv("DIGING_OUTPUT_ROOT") or DEFAULT_OUTPUT_ROOT
    return os.path.join(root, f"{config.experiment}-{config_digest(config)[:12]}")


def library_versions() -> Dict[str, str]:
    return {
        "diging_sgld": __version__,
        "numpy": numpy.__version__,
        "scipy": scipy.__version__,
        "networkx": networkx.__version__,
        "pandas": pandas.__version__,
        "matplotlib": matplotlib.__version__,
    }


def provenance_document(
    config: ExperimentConfig,
    components: Components,
    evaluation: Evaluation,
    checks: Dict[str, dict],
) -> dict:
    schedule = components.schedule
    fingerprints = {
        sampler: hashlib.sha256("".join(digests).encode("utf-8")).hexdigest()
        for sampler, digests in evaluation.fingerprints.items()
    }
    return {
        "config": config.to_dict(),
        "config_digest": config_digest(config),
        "versions": library_versions(),
        "schedule": {
            "generator": schedule.generator,
            "digest": schedule.digest(),
            "period": schedule.period,
            "params": schedule.params,
            "spectral": spectral_diagnostics(schedule, window=schedule.period).to_dict(),
        },
        "data_seed": components.data_seed,
        "model": components.model.describe(),
        "eta": evaluation.etas,
        "trial_seeds": trial_seeds(config),
        "noise_fingerprints": fingerprints,
        "paired_noise": len(set(fingerprints.values())) <= 1 and evaluation.pairing_failure() is None,
        "final": {sampler: curve.final_mean for sampler, curve in evaluation.curves.items()},
        "checks": checks,
    }


def write_metric_csvs(directory: str, curves: Dict[str, MetricCurve]) -> None:
    for sampler, curve in curves.items():
        curve.summary_frame().to_csv(os.path.join(directory, f"metrics_{sampler}.csv"), index=False)
        curve.agent_frame().to_csv(os.path.join(directory, f"metrics_{sampler}_agents.csv"), index=False)


def write_provenance(directory: str, provenance: dict) -> str:
    path = os.path.join(directory, PROVENANCE_FILE)
    with open(path, "w") as f:
        json.dump(provenance, f, indent=2, sort_keys=True, default=str)
    return path


def plot_curves(directory: str, curves: Dict[str, MetricCurve]) -> Optional[str]:
    # One figure per metric: cross-agent mean with a one-standard-deviation band.
    if not curves:
        return None
    metric = next(iter(curves.values())).name
    plots_dir = os.path.join(directory, "plots")
    os.makedirs(plots_dir, exist_ok=True)

    fig, ax = plt.subplots(figsize=(7, 4))
    for sampler, curve in curves.items():
        ax.plot(curve.iterations, curve.mean, label=sampler)
        ax.fill_between(curve.iterations, curve.mean - curve.std, curve.mean + curve.std, alpha=0.25)
    ax.set_xlabel("iteration")
    ax.set_ylabel(metric)
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    path = os.path.join(plots_dir, f"{metric}.svg")
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


def write_artifacts(directory: str, evaluation: Evaluation, provenance: dict, plots: bool = False) -> None:
    os.makedirs(directory, exist_ok=True)
    write_metric_csvs(directory, evaluation.curves)
    write_provenance(directory, provenance)
    if plots:
        plot_curves(directory, evaluation.curves)
    logger.info("Artifacts written to %s", directory)
