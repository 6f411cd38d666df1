import json
import logging
import os
from typing import Any, Dict

from src.harness import apply_overrides, load_config, parse_grid, reproduce, run_experiment, tune_stepsize
from src.harness.artifacts import output_directory
from src.harness.experiment import RunArtifact

logger = logging.getLogger(__name__)

OVERRIDE_KEYS = ("trials", "iterations", "seed", "workers", "output", "graph", "period", "data")


def _overrides(args: Any, keys=OVERRIDE_KEYS) -> Dict[str, Any]:
    return {key: getattr(args, key) for key in keys if getattr(args, key, None) is not None}


def _config(args: Any):
    return apply_overrides(load_config(args.config), **_overrides(args))


def _finish(artifact: RunArtifact) -> int:
    failed = sorted(name for name, result in artifact.checks.items() if not result["passed"])
    if failed:
        logger.error("Self-checks failed: %s", ", ".join(failed))
        return 1
    for sampler, curve in artifact.curves.items():
        print(f"{sampler}: final {curve.name} = {curve.final_mean:.6g}")
    print(f"Artifacts in {artifact.output_dir}")
    return 0


def run_command(args: Any) -> int:
    return _finish(run_experiment(_config(args)))


def reproduce_command(args: Any) -> int:
    # --data takes a bare CSV path here; a csv: prefix is accepted as well.
    data = args.data[4:] if args.data and args.data.startswith("csv:") else args.data
    overrides = _overrides(args, tuple(k for k in OVERRIDE_KEYS if k != "data"))
    return _finish(reproduce(args.figure, data_path=data, overrides=overrides))


def tune_command(args: Any, report_file: str = "tuning.json") -> int:
    config = _config(args)
    result = tune_stepsize(config, parse_grid(args.grid), trials=getattr(args, "tune_trials", None))
    directory = output_directory(config)
    os.makedirs(directory, exist_ok=True)
    path = os.path.join(directory, report_file)
    with open(path, "w") as f:
        json.dump(result.to_dict(), f, indent=2, sort_keys=True)
    logger.info("Tuning results written to %s", path)
    print(json.dumps(result.best, sort_keys=True))
    return 0
