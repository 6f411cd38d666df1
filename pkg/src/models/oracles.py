import logging
from dataclasses import dataclass, field
from typing import Iterable, Optional, Tuple

import numpy as np
from scipy.special import expit

from src.errors import ModelError
from src.models.posterior import GaussianPosterior

logger = logging.getLogger(__name__)

SQUARED = "squared"
LOGISTIC = "logistic"
LOSSES = (SQUARED, LOGISTIC)

NOISE_SAFETY_FACTOR = 1.5


def _check_batch(batch: int, local_n: int) -> None:
    if batch <= 0:
        raise ModelError(f"Minibatch size must be positive, got {batch}")
    if batch > local_n:
        raise ModelError(f"Minibatch size {batch} exceeds the local sample count {local_n}")


def _sample_losses(loss: str, features: np.ndarray, targets: np.ndarray, x: np.ndarray) -> float:
    u = features @ x
    if loss == SQUARED:
        return 0.5 * float(np.sum((u - targets) ** 2))
    # softplus(u) - y u, written with logaddexp to stay finite for large |u|
    return float(np.sum(np.logaddexp(0.0, u) - targets * u))


def _residual(loss: str, u: np.ndarray, targets: np.ndarray) -> np.ndarray:
    if loss == SQUARED:
        return u - targets
    return expit(u) - targets


@dataclass(frozen=True, eq=False)
class GradientOracle:
    # One agent's local potential
    #   f_j(x) = sum_i loss(z_i^T x, y_i) + reg/2 ||x||^2
    # where reg is the prior precision divided by the number of agents.
    features: np.ndarray = field(repr=False)
    targets: np.ndarray = field(repr=False)
    loss: str
    reg: float
    batch: int

    def __post_init__(self) -> None:
        if self.loss not in LOSSES:
            raise ModelError(f"Unknown loss '{self.loss}'")
        if self.features.ndim != 2 or self.targets.shape != (self.features.shape[0],):
            raise ModelError("Local features and targets do not line up")
        _check_batch(self.batch, self.local_n)

    @property
    def local_n(self) -> int:
        return self.features.shape[0]

    @property
    def dim(self) -> int:
        return self.features.shape[1]

    @property
    def full_batch(self) -> bool:
        return self.batch == self.local_n

    def value(self, x: np.ndarray) -> float:
        return _sample_losses(self.loss, self.features, self.targets, x) + 0.5 * self.reg * float(x @ x)

    def exact_gradient(self, x: np.ndarray) -> np.ndarray:
        u = self.features @ x
        return self.features.T @ _residual(self.loss, u, self.targets) + self.reg * x

    def stochastic_gradient(self, x: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        if self.full_batch:
            return self.exact_gradient(x)
        idx = rng.integers(0, self.local_n, size=self.batch)
        Zb = self.features[idx]
        u = Zb @ x
        scale = self.local_n / self.batch
        return scale * (Zb.T @ _residual(self.loss, u, self.targets[idx])) + self.reg * x


def stochastic_gradient(oracle: GradientOracle, x: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    return oracle.stochastic_gradient(np.asarray(x, dtype=float), rng)


@dataclass(frozen=True, eq=False)
class ModelSpec:
    # Decomposed potential f = sum_i f_i. All agents hold the same number of samples,
    # which lets the stacked methods evaluate every agent in one einsum.
    name: str
    oracles: Tuple[GradientOracle, ...] = field(repr=False)
    mu: float
    lips: float
    reg: float
    minimizer: np.ndarray = field(repr=False)
    target: Optional[GaussianPosterior] = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if not self.oracles:
            raise ModelError("A model needs at least one agent")
        shapes = {o.features.shape for o in self.oracles}
        if len(shapes) != 1:
            raise ModelError(f"Agents hold differently shaped data: {sorted(shapes)}")
        if len({o.loss for o in self.oracles}) != 1 or len({o.batch for o in self.oracles}) != 1:
            raise ModelError("All agents must share the loss and the minibatch size")
        if not (0.0 < self.mu <= self.lips):
            raise ModelError(f"Need 0 < mu <= L, got mu={self.mu}, L={self.lips}")

        object.__setattr__(self, "_Z", np.stack([o.features for o in self.oracles]))
        object.__setattr__(self, "_y", np.stack([o.targets for o in self.oracles]))

    @property
    def num_agents(self) -> int:
        return len(self.oracles)

    @property
    def dim(self) -> int:
        return self.oracles[0].dim

    @property
    def local_n(self) -> int:
        return self.oracles[0].local_n

    @property
    def batch(self) -> int:
        return self.oracles[0].batch

    @property
    def loss(self) -> str:
        return self.oracles[0].loss

    @property
    def full_batch(self) -> bool:
        return self.oracles[0].full_batch

    @property
    def kappa(self) -> float:
        return self.lips / self.mu

    @property
    def agent_reg(self) -> float:
        return self.oracles[0].reg

    def with_batch(self, batch: int) -> "ModelSpec":
        oracles = tuple(
            GradientOracle(o.features, o.targets, o.loss, o.reg, batch) for o in self.oracles
        )
        return ModelSpec(self.name, oracles, self.mu, self.lips, self.reg, self.minimizer, self.target)

    def check_stacked(self, X: np.ndarray) -> None:
        if X.shape != (self.num_agents, self.dim):
            raise ModelError(f"Expected iterates of shape {(self.num_agents, self.dim)}, got {X.shape}")

    def stacked_gradient(self, X: np.ndarray) -> np.ndarray:
        # Row i is grad f_i(x_i).
        u = np.einsum("nij,nj->ni", self._Z, X)
        r = _residual(self.loss, u, self._y)
        return np.einsum("nij,ni->nj", self._Z, r) + self.agent_reg * X

    def stacked_stochastic_gradient(
        self,
        X: np.ndarray,
        rng: Optional[np.random.Generator] = None,
        indices: Optional[np.ndarray] = None,
    ) -> np.ndarray:
        # Full-batch mode bypasses sampling, so the result is bitwise the exact gradient.
        if self.full_batch:
            return self.stacked_gradient(X)
        if indices is None:
            if rng is None:
                raise ModelError("A minibatch gradient needs a generator or explicit indices")
            indices = rng.integers(0, self.local_n, size=(self.num_agents, self.batch))
        idx = np.asarray(indices)
        if idx.shape != (self.num_agents, self.batch):
            raise ModelError(f"Minibatch indices have shape {idx.shape}, expected {(self.num_agents, self.batch)}")
        Zb = np.take_along_axis(self._Z, idx[:, :, None], axis=1)
        yb = np.take_along_axis(self._y, idx, axis=1)
        u = np.einsum("nij,nj->ni", Zb, X)
        r = _residual(self.loss, u, yb)
        scale = self.local_n / self.batch
        return scale * np.einsum("nij,ni->nj", Zb, r) + self.agent_reg * X

    def global_gradient(self, x: np.ndarray) -> np.ndarray:
        X = np.broadcast_to(x, (self.num_agents, self.dim))
        return self.stacked_gradient(X).sum(axis=0)

    def potential(self, x: np.ndarray) -> float:
        return sum(o.value(x) for o in self.oracles)

    def describe(self) -> dict:
        return {
            "name": self.name,
            "num_agents": self.num_agents,
            "dim": self.dim,
            "local_n": self.local_n,
            "batch": self.batch,
            "reg": self.reg,
            "mu": self.mu,
            "lips": self.lips,
            "minimizer": self.minimizer.tolist(),
        }


def estimate_noise_bound(
    model: ModelSpec,
    points: Iterable[np.ndarray],
    rng: np.random.Generator,
    draws: int = 2000,
) -> float:
    # sigma^2 estimate: safety factor times the worst Monte Carlo mean squared deviation
    # of the minibatch estimator from the exact gradient, over agents and points.
    if model.full_batch:
        return 0.0

    worst = 0.0
    for point in points:
        X = np.broadcast_to(np.asarray(point, dtype=float), (model.num_agents, model.dim)).copy()
        exact = model.stacked_gradient(X)
        total = np.zeros(model.num_agents)
        for _ in range(draws):
            diff = model.stacked_stochastic_gradient(X, rng) - exact
            total += np.einsum("ni,ni->n", diff, diff)
        worst = max(worst, float(np.max(total / draws)))

    sigma_sq = NOISE_SAFETY_FACTOR * worst
    logger.debug("Estimated gradient noise bound sigma^2=%.4g", sigma_sq)
    return sigma_sq
