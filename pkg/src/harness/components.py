import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.data import load_real_csv, partition, synth_linear, synth_logistic
from src.data.datasets import Dataset
from src.errors import BalanceError, ConfigError, DataError
from src.harness.config import LINREG_W2, ExperimentConfig
from src.models import gaussian_toy_model, linear_regression_model, logistic_regression_model
from src.models.oracles import ModelSpec
from src.models.posterior import GaussianPosterior
from src.network.schedules import GraphSchedule, schedule_from_spec

logger = logging.getLogger(__name__)

MAX_DATA_ATTEMPTS = 100


@dataclass(frozen=True, eq=False)
class Components:
    schedule: GraphSchedule
    model: ModelSpec
    target: Optional[GaussianPosterior]
    test_set: Optional[Dataset]
    data_seed: int


def _toy(config: ExperimentConfig, schedule: GraphSchedule, seed: int) -> Components:
    data = config.data
    N = schedule.num_agents
    if "centers" in data:
        centers = np.asarray(data["centers"], dtype=float)
    else:
        centers = float(data.get("spread", 1.0)) * np.random.default_rng(seed).standard_normal((N, int(data.get("d", 1))))
    model = gaussian_toy_model(centers, N)
    return Components(schedule, model, model.target, None, seed)


def _linear(config: ExperimentConfig, schedule: GraphSchedule, seed: int) -> Components:
    data, lam = config.data, float(config.model["lam"])
    if data["source"] != "synthetic":
        raise ConfigError("The W2 experiment supports synthetic or toy data only")
    N = schedule.num_agents
    dataset, _ = synth_linear(
        n=int(data.get("n", 100)),
        d=int(data.get("d", 5)),
        lam=lam,
        noise_var=float(data.get("noise_var", 1.0)),
        seed=seed,
    )
    blocks = partition(dataset, N, seed).split(dataset)
    model = linear_regression_model(blocks, lam, N, config.model.get("batch"))
    return Components(schedule, model, model.target, None, seed)


def _load_logistic(config: ExperimentConfig, seed: int):
    data = config.data
    if data["source"] == "csv":
        path = data.get("path")
        if not path:
            raise DataError("The real-data experiment needs the dataset CSV path (--data csv:<path>)")
        return load_real_csv(
            path,
            split_ratio=float(data.get("split_ratio", 0.1)),
            target_train=int(data.get("target_train", 30)),
            seed=seed,
            header=data.get("header"),
            train_count=data.get("train_count"),
        )
    train, test, _ = synth_logistic(
        total=int(data.get("total", 600)),
        d=int(data.get("d", 5)),
        lam=float(config.model["lam"]),
        split_ratio=float(data.get("split_ratio", 0.7)),
        seed=seed,
        target_train=data.get("target_train"),
    )
    return train, test


def _balanced_split(config: ExperimentConfig, first_seed: int):
    # Some splits leave too few minority-class points to balance; move to the next seed.
    for attempt in range(MAX_DATA_ATTEMPTS):
        seed = first_seed + attempt
        try:
            train, test = _load_logistic(config, seed)
        except BalanceError as e:
            logger.debug("Data seed %d rejected: %s", seed, e)
            continue
        if attempt:
            logger.info("Logistic data split accepted at seed %d after %d rejections", seed, attempt)
        return train, test, seed
    raise DataError(f"No balanced training split within {MAX_DATA_ATTEMPTS} seeds from {first_seed}")


def _logistic(config: ExperimentConfig, schedule: GraphSchedule, seed: int) -> Components:
    train, test, seed = _balanced_split(config, seed)
    N = schedule.num_agents
    blocks = partition(train, N, seed).split(train)
    model = logistic_regression_model(blocks, float(config.model["lam"]), N, config.model.get("batch"))
    return Components(schedule, model, None, test, seed)


def build_components(config: ExperimentConfig) -> Components:
    schedule = schedule_from_spec(config.graph)
    seed = int(config.data.get("seed", config.base_seed))
    if config.data["source"] == "toy":
        components = _toy(config, schedule, seed)
    elif config.experiment == LINREG_W2:
        components = _linear(config, schedule, seed)
    else:
        components = _logistic(config, schedule, seed)
    logger.info(
        "Built %s model: N=%d, dim=%d, mu=%.4g, L=%.4g, data seed %d",
        components.model.name,
        components.model.num_agents,
        components.model.dim,
        components.model.mu,
        components.model.lips,
        components.data_seed,
    )
    return components
