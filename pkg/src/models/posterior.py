from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import linalg

from src.errors import ModelError


@dataclass(frozen=True, eq=False)
class GaussianPosterior:
    mean: np.ndarray
    covariance: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return self.mean.shape[0]

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        # Direct sampler, used as the Monte Carlo baseline for the W2 pipeline.
        root = linalg.cholesky(self.covariance, lower=True)
        return self.mean + rng.standard_normal((size, self.dim)) @ root.T

    def to_dict(self) -> dict:
        return {"mean": self.mean.tolist(), "covariance": self.covariance.tolist()}


def gaussian_posterior(features: np.ndarray, targets: np.ndarray, lam: float) -> GaussianPosterior:
    # Sigma = (Z^T Z + lam I)^-1, m = Sigma Z^T y.
    Z = np.asarray(features, dtype=float)
    y = np.asarray(targets, dtype=float)
    if Z.ndim != 2 or y.shape != (Z.shape[0],):
        raise ModelError(f"Design {Z.shape} and responses {y.shape} do not line up")

    precision = Z.T @ Z + lam * np.eye(Z.shape[1])
    try:
        factor = linalg.cho_factor(precision, lower=True)
    except linalg.LinAlgError as e:
        raise ModelError(f"Posterior precision is not positive definite: {e}") from e

    covariance = linalg.cho_solve(factor, np.eye(Z.shape[1]))
    covariance = 0.5 * (covariance + covariance.T)
    mean = linalg.cho_solve(factor, Z.T @ y)
    return GaussianPosterior(mean=mean, covariance=covariance)


def isotropic_gaussian(mean: np.ndarray, variance: float, dim: Optional[int] = None) -> GaussianPosterior:
    mean = np.atleast_1d(np.asarray(mean, dtype=float))
    d = mean.shape[0] if dim is None else dim
    return GaussianPosterior(mean=mean, covariance=variance * np.eye(d))
