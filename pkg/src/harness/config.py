"""
Experiment configuration documents.

An experiment is described by one nested JSON document. Missing keys take the
defaults of the linear-regression and logistic-regression studies; unknown
top-level keys are rejected so that typos never silently fall back to defaults.
"""

import copy
import json
import logging
from dataclasses import asdict, dataclass, field, replace
from typing import Any, Dict, Optional, Sequence, Tuple

from src.errors import ConfigError
from src.samplers.runner import DE_SGLD, DIGING, SAMPLER_KINDS

logger = logging.getLogger(__name__)

LINREG_W2 = "linreg_w2"
LOGREG_ACCURACY = "logreg_accuracy"
EXPERIMENT_KINDS = (LINREG_W2, LOGREG_ACCURACY)

DATA_SOURCES = ("synthetic", "csv", "toy")
GRAPH_KINDS = ("barbell", "lollipop", "complete")

_GRAPH_DEFAULTS = {"kind": "barbell", "num_agents": 20, "period": 50, "seed": 0, "eps_hat": 1e-6}
_DATA_DEFAULTS = {
    LINREG_W2: {"source": "synthetic", "n": 100, "d": 5, "noise_var": 1.0},
    LOGREG_ACCURACY: {"source": "synthetic", "total": 600, "d": 5, "split_ratio": 0.7},
}
_MODEL_DEFAULTS = {
    LINREG_W2: {"lam": 0.1, "batch": None, "y_init": "exact", "noise": True},
    LOGREG_ACCURACY: {"lam": 0.1, "batch": 1, "y_init": "exact", "noise": True},
}
_INIT_DEFAULTS = {"kind": "gaussian", "scale": 1.0}
DEFAULT_ETA = "0.2/L"


def resolve_eta(value: Any, lips: float) -> float:
    # Stepsizes are either plain numbers or "c/L" strings scaled by the smoothness constant.
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        eta = float(value)
    elif isinstance(value, str) and value.replace(" ", "").endswith("/L"):
        try:
            eta = float(value.replace(" ", "")[:-2]) / lips
        except ValueError as e:
            raise ConfigError(f"Cannot parse stepsize '{value}'") from e
    else:
        raise ConfigError(f"Stepsize must be a number or 'c/L', got {value!r}")
    if eta <= 0:
        raise ConfigError(f"Stepsize must be positive, got {value!r}")
    return eta


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str = LINREG_W2
    samplers: Tuple[str, ...] = (DIGING, DE_SGLD)
    graph: Dict[str, Any] = field(default_factory=dict)
    data: Dict[str, Any] = field(default_factory=dict)
    model: Dict[str, Any] = field(default_factory=dict)
    eta: Dict[str, Any] = field(default_factory=dict)
    iterations: int = 100
    trials: int = 200
    base_seed: int = 0
    workers: Optional[int] = None
    stride: int = 1
    init: Dict[str, Any] = field(default_factory=dict)
    output_dir: Optional[str] = None
    plots: bool = False
    tune: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.experiment not in EXPERIMENT_KINDS:
            raise ConfigError(f"Unknown experiment '{self.experiment}', expected one of {EXPERIMENT_KINDS}")
        if not self.samplers:
            raise ConfigError("At least one sampler is required")
        for sampler in self.samplers:
            if sampler not in SAMPLER_KINDS:
                raise ConfigError(f"Unknown sampler '{sampler}', expected one of {SAMPLER_KINDS}")
        if len(set(self.samplers)) != len(self.samplers):
            raise ConfigError(f"Duplicate samplers in {self.samplers}")
        if self.graph.get("kind") not in GRAPH_KINDS:
            raise ConfigError(f"Unknown graph kind '{self.graph.get('kind')}'")
        if self.data.get("source") not in DATA_SOURCES:
            raise ConfigError(f"Unknown data source '{self.data.get('source')}'")
        if self.data["source"] == "toy" and self.experiment != LINREG_W2:
            raise ConfigError("The toy data source only supports the W2 experiment")
        if self.iterations < 1 or self.trials < 1:
            raise ConfigError("iterations and trials must be positive")
        if self.stride < 1:
            raise ConfigError(f"stride must be positive, got {self.stride}")
        if self.workers is not None and self.workers < 1:
            raise ConfigError(f"workers must be positive, got {self.workers}")
        for sampler, value in self.eta.items():
            if sampler not in SAMPLER_KINDS:
                raise ConfigError(f"Stepsize given for unknown sampler '{sampler}'")
            # lips = 1 only validates the shape of the entry
            resolve_eta(value, 1.0)
        grid = self.tune.get("grid")
        if grid is not None and (not isinstance(grid, list) or not grid):
            raise ConfigError("tune.grid must be a nonempty list")

    @property
    def noise(self) -> bool:
        return bool(self.model.get("noise", True))

    def eta_for(self, sampler: str) -> Any:
        return self.eta.get(sampler, DEFAULT_ETA)

    def with_eta(self, sampler: str, value: Any) -> "ExperimentConfig":
        eta = dict(self.eta)
        eta[sampler] = value
        return replace(self, eta=eta)

    def to_dict(self) -> Dict[str, Any]:
        document = asdict(self)
        document["samplers"] = list(self.samplers)
        return document


_FIELDS = set(ExperimentConfig.__dataclass_fields__)


def _merged(defaults: Dict[str, Any], given: Optional[Dict[str, Any]], name: str) -> Dict[str, Any]:
    if given is None:
        given = {}
    if not isinstance(given, dict):
        raise ConfigError(f"'{name}' must be an object")
    merged = copy.deepcopy(defaults)
    merged.update(given)
    return merged


def config_from_dict(document: Dict[str, Any]) -> ExperimentConfig:
    if not isinstance(document, dict):
        raise ConfigError("An experiment config must be a JSON object")
    unknown = set(document) - _FIELDS
    if unknown:
        raise ConfigError(f"Unknown config keys: {sorted(unknown)}")

    experiment = document.get("experiment", LINREG_W2)
    if experiment not in EXPERIMENT_KINDS:
        raise ConfigError(f"Unknown experiment '{experiment}', expected one of {EXPERIMENT_KINDS}")

    values = dict(document)
    values["experiment"] = experiment
    values["samplers"] = tuple(document.get("samplers", (DIGING, DE_SGLD)))
    values["graph"] = _merged(_GRAPH_DEFAULTS, document.get("graph"), "graph")
    data_given = document.get("data") or {}
    data_defaults = _DATA_DEFAULTS[experiment]
    if data_given.get("source", data_defaults["source"]) != data_defaults["source"]:
        data_defaults = {}
    values["data"] = _merged(data_defaults, data_given, "data")
    values["model"] = _merged(_MODEL_DEFAULTS[experiment], document.get("model"), "model")
    values["init"] = _merged(_INIT_DEFAULTS, document.get("init"), "init")
    values["eta"] = _merged({}, document.get("eta"), "eta")
    values["tune"] = _merged({}, document.get("tune"), "tune")
    try:
        return ExperimentConfig(**values)
    except TypeError as e:
        raise ConfigError(f"Malformed config: {e}") from e


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path, "r") as f:
            document = json.load(f)
    except FileNotFoundError as e:
        raise ConfigError(f"Config file not found at {path}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"Invalid JSON in config file at {path}: {e}") from e
    logger.debug("Loaded experiment config from %s", path)
    return config_from_dict(document)


def apply_overrides(
    config: ExperimentConfig,
    trials: Optional[int] = None,
    iterations: Optional[int] = None,
    seed: Optional[int] = None,
    workers: Optional[int] = None,
    output: Optional[str] = None,
    graph: Optional[str] = None,
    period: Optional[int] = None,
    data: Optional[str] = None,
) -> ExperimentConfig:
    # Command-line values win over the document.
    document = config.to_dict()
    if trials is not None:
        document["trials"] = trials
    if iterations is not None:
        document["iterations"] = iterations
    if seed is not None:
        document["base_seed"] = seed
    if workers is not None:
        document["workers"] = workers
    if output is not None:
        document["output_dir"] = output
    if graph is not None:
        document["graph"] = {**document["graph"], "kind": graph}
    if period is not None:
        document["graph"] = {**document["graph"], "period": period}
    if data is not None:
        document["data"] = _data_override(document["data"], data)
    return config_from_dict(document)


def _data_override(current: Dict[str, Any], value: str) -> Dict[str, Any]:
    if value == "synthetic":
        return {k: v for k, v in current.items() if k != "path"} | {"source": "synthetic"}
    if value.startswith("csv:") and len(value) > 4:
        return {**current, "source": "csv", "path": value[4:]}
    raise ConfigError(f"--data must be 'synthetic' or 'csv:<path>', got '{value}'")


def parse_grid(text: str) -> Sequence[Any]:
    # "0.001,0.01,0.5/L" -> [0.001, 0.01, "0.5/L"]
    entries = [item.strip() for item in text.split(",") if item.strip()]
    if not entries:
        raise ConfigError("The stepsize grid is empty")
    grid = []
    for item in entries:
        try:
            grid.append(float(item))
        except ValueError:
            resolve_eta(item, 1.0)
            grid.append(item)
    return grid
