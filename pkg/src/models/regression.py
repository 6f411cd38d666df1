import logging
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.special import expit

from src.errors import ModelError
from src.models.oracles import LOGISTIC, SQUARED, GradientOracle, ModelSpec
from src.models.posterior import gaussian_posterior
from src.utils.linalg import extreme_eigenvalues

logger = logging.getLogger(__name__)

MINIMIZER_TOL = 1e-10
MINIMIZER_MAX_ITER = 1_000_000

AgentData = Tuple[np.ndarray, np.ndarray]


def _unpack(partitioned_data: Sequence[AgentData], num_agents: int):
    if len(partitioned_data) != num_agents:
        raise ModelError(f"Got data for {len(partitioned_data)} agents, expected {num_agents}")
    blocks = []
    for j, (Z, y) in enumerate(partitioned_data):
        Z = np.asarray(Z, dtype=float)
        y = np.asarray(y, dtype=float)
        if Z.ndim != 2 or y.shape != (Z.shape[0],):
            raise ModelError(f"Agent {j}: design {Z.shape} and targets {y.shape} do not line up")
        blocks.append((Z, y))
    return blocks


def _gram_spectrum(blocks) -> Tuple[float, float]:
    lows, highs = [], []
    for Z, _ in blocks:
        low, high = extreme_eigenvalues(Z.T @ Z)
        lows.append(max(low, 0.0))
        highs.append(high)
    return min(lows), max(highs)


def linear_regression_model(
    partitioned_data: Sequence[AgentData],
    lam: float,
    num_agents: int,
    batch: Optional[int] = None,
) -> ModelSpec:
    # f_j(x) = ||Z_j x - y_j||^2 / 2 + lam ||x||^2 / (2N)
    if lam <= 0:
        raise ModelError(f"Prior precision must be positive, got {lam}")
    blocks = _unpack(partitioned_data, num_agents)
    reg = lam / num_agents
    batch = blocks[0][0].shape[0] if batch is None else int(batch)

    oracles = tuple(GradientOracle(Z, y, SQUARED, reg, batch) for Z, y in blocks)
    low, high = _gram_spectrum(blocks)

    posterior = gaussian_posterior(
        np.vstack([Z for Z, _ in blocks]), np.concatenate([y for _, y in blocks]), lam
    )
    return ModelSpec(
        name="linear",
        oracles=oracles,
        mu=low + reg,
        lips=high + reg,
        reg=lam,
        minimizer=posterior.mean,
        target=posterior,
    )


def logistic_minimizer(
    features: np.ndarray,
    labels: np.ndarray,
    lam: float,
    tol: float = MINIMIZER_TOL,
    max_iter: int = MINIMIZER_MAX_ITER,
) -> np.ndarray:
    # Deterministic full-gradient descent with step 1/L on the global potential.
    _, high = extreme_eigenvalues(features.T @ features)
    step = 1.0 / (0.25 * high + lam)
    x = np.zeros(features.shape[1])
    for it in range(max_iter):
        grad = features.T @ (expit(features @ x) - labels) + lam * x
        if np.linalg.norm(grad) <= tol:
            logger.debug("Logistic minimizer converged after %d iterations", it)
            return x
        x = x - step * grad
    raise ModelError(f"Logistic minimizer did not reach gradient norm {tol} in {max_iter} iterations")


def logistic_regression_model(
    partitioned_data: Sequence[AgentData],
    lam: float,
    num_agents: int,
    batch: Optional[int] = None,
) -> ModelSpec:
    if lam <= 0:
        raise ModelError(f"Prior precision must be positive, got {lam}")
    blocks = _unpack(partitioned_data, num_agents)
    for j, (_, y) in enumerate(blocks):
        if not np.all((y == 0.0) | (y == 1.0)):
            raise ModelError(f"Agent {j} holds labels outside {{0, 1}}")

    reg = lam / num_agents
    batch = blocks[0][0].shape[0] if batch is None else int(batch)
    oracles = tuple(GradientOracle(Z, y, LOGISTIC, reg, batch) for Z, y in blocks)

    # The sigmoid has curvature at most 1/4, so the data term is (1/4) lambda_max smooth.
    _, high = _gram_spectrum(blocks)
    minimizer = logistic_minimizer(
        np.vstack([Z for Z, _ in blocks]), np.concatenate([y for _, y in blocks]), lam
    )
    return ModelSpec(
        name="logistic",
        oracles=oracles,
        mu=reg,
        lips=0.25 * high + reg,
        reg=lam,
        minimizer=minimizer,
    )
