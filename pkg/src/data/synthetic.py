from typing import Optional, Tuple

import numpy as np
from scipy.special import expit

from src.data.datasets import BINARY, REGRESSION, Dataset, add_intercept, balance_classes
from src.errors import DataError


def synth_linear(
    n: int = 100,
    d: int = 5,
    lam: float = 0.1,
    noise_var: float = 1.0,
    seed: Optional[int] = None,
) -> Tuple[Dataset, np.ndarray]:
    # y_i = z_i^T x + noise with x ~ N(0, I / lam) and z_i = [zhat_i, 1], zhat_i ~ N(0, I_d).
    if n < 1 or d < 1:
        raise DataError(f"Need n, d >= 1, got n={n}, d={d}")
    if lam <= 0 or noise_var < 0:
        raise DataError(f"Invalid lam={lam} or noise_var={noise_var}")

    rng = np.random.default_rng(seed)
    x_true = rng.standard_normal(d + 1) / np.sqrt(lam)
    Z = add_intercept(rng.standard_normal((n, d)))
    y = Z @ x_true + np.sqrt(noise_var) * rng.standard_normal(n)
    return Dataset(Z, y, REGRESSION), x_true


def synth_logistic(
    total: int = 600,
    d: int = 5,
    lam: float = 0.1,
    split_ratio: float = 0.7,
    seed: Optional[int] = None,
    target_train: Optional[int] = None,
) -> Tuple[Dataset, Dataset, np.ndarray]:
    # Labels y_i = 1 iff p_i <= sigmoid(z_i^T x), p_i ~ U(0, 1). The split is unstratified
    # and only the training part is class-balanced.
    if total < 2:
        raise DataError(f"Need at least 2 samples, got {total}")
    if not (0.0 < split_ratio < 1.0):
        raise DataError(f"split_ratio must lie in (0, 1), got {split_ratio}")
    if target_train is None and total == 600:
        target_train = 380

    rng = np.random.default_rng(seed)
    x_true = rng.standard_normal(d + 1) / np.sqrt(lam)
    Z = add_intercept(rng.standard_normal((total, d)))
    p = rng.uniform(size=total)
    labels = (p <= expit(Z @ x_true)).astype(float)
    full = Dataset(Z, labels, BINARY)

    order = rng.permutation(total)
    n_train = int(round(split_ratio * total))
    train = full.subset(order[:n_train])
    test = full.subset(order[n_train:])
    train = balance_classes(train, rng, target_train)
    return train, test, x_true
