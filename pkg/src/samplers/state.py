from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from src.errors import StateError

EXACT = "exact"
MINIBATCH = "minibatch"


@dataclass(frozen=True)
class SamplerConfig:
    eta: float
    iterations: int
    noise: bool = True
    gradient_mode: str = EXACT
    batch: Optional[int] = None
    stride: int = 1
    record_y: bool = False
    y_init: str = EXACT
    init: str = "gaussian"
    init_scale: float = 1.0

    def __post_init__(self) -> None:
        # eta = 0 is allowed so that pure consensus can be exercised with noise off.
        if self.eta < 0:
            raise StateError(f"Stepsize must be nonnegative, got {self.eta}")
        if self.iterations < 0:
            raise StateError(f"iterations must be nonnegative, got {self.iterations}")
        if self.gradient_mode not in (EXACT, MINIBATCH):
            raise StateError(f"Unknown gradient mode '{self.gradient_mode}'")
        if self.y_init not in (EXACT, MINIBATCH):
            raise StateError(f"Unknown tracker initialization '{self.y_init}'")
        if self.init not in ("gaussian", "zeros"):
            raise StateError(f"Unknown initialization '{self.init}'")
        if self.stride < 1:
            raise StateError(f"stride must be positive, got {self.stride}")
        if self.batch is not None and self.batch < 1:
            raise StateError(f"batch must be positive, got {self.batch}")


@dataclass(frozen=True, eq=False)
class NetworkState:
    x: np.ndarray
    y: Optional[np.ndarray] = None
    prev_grad: Optional[np.ndarray] = None
    iteration: int = 0

    @property
    def x_bar(self) -> np.ndarray:
        return self.x.mean(axis=0)

    @property
    def y_bar(self) -> Optional[np.ndarray]:
        return None if self.y is None else self.y.mean(axis=0)


@dataclass(frozen=True, eq=False)
class Trajectory:
    kind: str
    trial_seed: int
    iterations: np.ndarray
    x: np.ndarray = field(repr=False)
    y: Optional[np.ndarray] = field(default=None, repr=False)
    noise_fingerprint: str = ""
    batch_fingerprint: Dict[int, str] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        if self.iterations.ndim != 1 or np.any(np.diff(self.iterations) <= 0):
            raise StateError("Snapshot iterations must be strictly increasing")
        if self.x.shape[0] != self.iterations.shape[0]:
            raise StateError("Snapshot count does not match the iteration index")

    @property
    def x_bar(self) -> np.ndarray:
        return self.x.mean(axis=1)

    @property
    def y_bar(self) -> Optional[np.ndarray]:
        return None if self.y is None else self.y.mean(axis=1)

    @property
    def final(self) -> np.ndarray:
        return self.x[-1]
