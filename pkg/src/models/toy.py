import numpy as np

from src.errors import ModelError
from src.models.oracles import SQUARED, GradientOracle, ModelSpec
from src.models.posterior import isotropic_gaussian


def gaussian_toy_model(centers, num_agents: int) -> ModelSpec:
    # f_i(x) = ||x - a_i||^2 / 2, i.e. the squared loss with Z_i = I and y_i = a_i.
    # mu = L = 1 and the target is N(mean(a), I / N).
    if num_agents < 1:
        raise ModelError(f"num_agents must be positive, got {num_agents}")
    a = np.asarray(centers, dtype=float)
    if a.ndim == 1:
        a = a[:, None]
    if a.shape[0] != num_agents:
        raise ModelError(f"Got {a.shape[0]} centers for {num_agents} agents")

    d = a.shape[1]
    identity = np.eye(d)
    oracles = tuple(GradientOracle(identity, a[i].copy(), SQUARED, 0.0, d) for i in range(num_agents))
    center = a.mean(axis=0)
    return ModelSpec(
        name="toy",
        oracles=oracles,
        mu=1.0,
        lips=1.0,
        reg=0.0,
        minimizer=center,
        target=isotropic_gaussian(center, 1.0 / num_agents),
    )
