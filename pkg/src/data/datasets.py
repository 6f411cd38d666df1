from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
import pandas as pd

from src.errors import BalanceError, DataError

REGRESSION = "regression"
BINARY = "binary"


@dataclass(frozen=True, eq=False)
class Dataset:
    # features are intercept-augmented, the last column is all ones.
    features: np.ndarray = field(repr=False)
    targets: np.ndarray = field(repr=False)
    kind: str

    def __post_init__(self) -> None:
        features = np.asarray(self.features, dtype=float)
        targets = np.asarray(self.targets, dtype=float)
        if self.kind not in (REGRESSION, BINARY):
            raise DataError(f"Unknown dataset kind '{self.kind}'")
        if features.ndim != 2:
            raise DataError(f"Features must be a matrix, got shape {features.shape}")
        if targets.shape != (features.shape[0],):
            raise DataError(f"{features.shape[0]} feature rows but {targets.shape} targets")
        if not (np.all(np.isfinite(features)) and np.all(np.isfinite(targets))):
            raise DataError("Dataset contains missing or non-finite values")
        if self.kind == BINARY and not np.all((targets == 0.0) | (targets == 1.0)):
            raise DataError("Binary labels must be 0 or 1")
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "targets", targets)

    @property
    def size(self) -> int:
        return self.features.shape[0]

    @property
    def dim(self) -> int:
        return self.features.shape[1]

    def subset(self, indices) -> "Dataset":
        indices = np.asarray(indices, dtype=int)
        return Dataset(self.features[indices], self.targets[indices], self.kind)

    def class_counts(self) -> Tuple[int, int]:
        ones = int(np.sum(self.targets == 1.0))
        return self.size - ones, ones

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(self.features, columns=[f"z{i}" for i in range(self.dim)])
        frame["target"] = self.targets
        return frame

    def to_csv(self, path: str) -> None:
        self.to_frame().to_csv(path, index=False)


def add_intercept(features: np.ndarray) -> np.ndarray:
    return np.hstack([features, np.ones((features.shape[0], 1))])


def standardize(features: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    # Column-wise (x - mean) / std with population std; zero-variance columns keep scale 1.
    features = np.asarray(features, dtype=float)
    mean = features.mean(axis=0)
    scale = features.std(axis=0)
    scale = np.where(scale > 0.0, scale, 1.0)
    return (features - mean) / scale, mean, scale


def balance_classes(
    dataset: Dataset, rng: np.random.Generator, target: Optional[int] = None
) -> Dataset:
    # Discards uniformly random surplus samples so both classes are equally represented.
    if dataset.kind != BINARY:
        raise DataError("Only binary datasets can be class-balanced")
    zeros = np.flatnonzero(dataset.targets == 0.0)
    ones = np.flatnonzero(dataset.targets == 1.0)
    if zeros.size == 0 or ones.size == 0:
        raise BalanceError("A class is absent from the training data")

    if target is None:
        per_class = min(zeros.size, ones.size)
    else:
        if target % 2 != 0 or target <= 0:
            raise DataError(f"A balanced set needs an even positive size, got {target}")
        per_class = target // 2
        if min(zeros.size, ones.size) < per_class:
            raise BalanceError(
                f"Cannot balance to {target}: class counts are ({zeros.size}, {ones.size})"
            )

    keep_zeros = rng.choice(zeros, size=per_class, replace=False)
    keep_ones = rng.choice(ones, size=per_class, replace=False)
    # Keep the original sample order among the survivors.
    kept = np.sort(np.concatenate([keep_zeros, keep_ones]))
    return dataset.subset(kept)
