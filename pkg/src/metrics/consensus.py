import numpy as np


def consensus_error(x: np.ndarray) -> float:
    # (sum_i ||x_i - x_bar||^2)^(1/2)
    x = np.asarray(x, dtype=float)
    return float(np.linalg.norm(x - x.mean(axis=0)))
