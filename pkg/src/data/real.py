import logging
from typing import Optional, Tuple

import numpy as np
import pandas as pd

from src.data.datasets import BINARY, Dataset, add_intercept, balance_classes, standardize
from src.errors import DataError

logger = logging.getLogger(__name__)

# id, diagnosis, 30 numeric features
EXPECTED_COLUMNS = 32
LABELS = {"B": 1.0, "M": 0.0}


def _read_rows(path: str, header: Optional[bool]) -> Tuple[pd.DataFrame, int]:
    # Returns the data rows and the file line number of the first one.
    try:
        frame = pd.read_csv(path, header=None, dtype=str, skipinitialspace=True)
    except FileNotFoundError as e:
        raise DataError(f"Dataset file not found: {path}") from e
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise DataError(f"Could not parse {path}: {e}") from e

    if frame.shape[1] != EXPECTED_COLUMNS:
        raise DataError(f"Expected {EXPECTED_COLUMNS} columns, found {frame.shape[1]}")

    if header is None:
        # Auto-detect: a header row has no valid diagnosis in column 1.
        header = str(frame.iloc[0, 1]).strip().upper() not in LABELS
    if header:
        frame = frame.iloc[1:]
    return frame.reset_index(drop=True), 2 if header else 1


def _parse(frame: pd.DataFrame, row_offset: int) -> Tuple[np.ndarray, np.ndarray]:
    diagnosis = frame.iloc[:, 1].str.strip().str.upper()
    bad_label = ~diagnosis.isin(list(LABELS))
    if bad_label.any():
        row = int(np.flatnonzero(bad_label.to_numpy())[0]) + row_offset
        raise DataError(f"Row {row}: diagnosis must be 'M' or 'B'")

    numeric = frame.iloc[:, 2:].apply(pd.to_numeric, errors="coerce")
    bad_value = numeric.isna().any(axis=1).to_numpy()
    if bad_value.any():
        row = int(np.flatnonzero(bad_value)[0]) + row_offset
        raise DataError(f"Row {row}: unparseable or missing feature value")

    return numeric.to_numpy(dtype=float), diagnosis.map(LABELS).to_numpy(dtype=float)


def load_real_csv(
    path: str,
    split_ratio: float = 0.1,
    target_train: int = 30,
    seed: Optional[int] = None,
    header: Optional[bool] = None,
    train_count: Optional[int] = None,
) -> Tuple[Dataset, Dataset]:
    # Benign = 1, malignant = 0. Features are standardized with statistics of the
    # final (balanced) training set; the test set reuses them.
    frame, first_line = _read_rows(path, header)
    features, labels = _parse(frame, first_line)

    n = features.shape[0]
    rng = np.random.default_rng(seed)
    order = rng.permutation(n)
    n_train = int(round(split_ratio * n)) if train_count is None else int(train_count)
    if not (0 < n_train < n):
        raise DataError(f"Train size {n_train} is invalid for {n} rows")

    train_raw = Dataset(features[order[:n_train]], labels[order[:n_train]], BINARY)
    test_raw = Dataset(features[order[n_train:]], labels[order[n_train:]], BINARY)
    train_raw = balance_classes(train_raw, rng, target_train)

    train_features, mean, scale = standardize(train_raw.features)
    test_features = (test_raw.features - mean) / scale
    logger.info("Loaded %d rows from %s: %d train, %d test", n, path, train_raw.size, test_raw.size)
    return (
        Dataset(add_intercept(train_features), train_raw.targets, BINARY),
        Dataset(add_intercept(test_features), test_raw.targets, BINARY),
    )
