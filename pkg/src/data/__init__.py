from src.data.datasets import (
    BINARY,
    REGRESSION,
    Dataset,
    add_intercept,
    balance_classes,
    standardize,
)
from src.data.partition import Partition, partition
from src.data.real import load_real_csv
from src.data.synthetic import synth_linear, synth_logistic

__all__ = [
    "BINARY",
    "REGRESSION",
    "Dataset",
    "Partition",
    "add_intercept",
    "balance_classes",
    "load_real_csv",
    "partition",
    "standardize",
    "synth_linear",
    "synth_logistic",
]
