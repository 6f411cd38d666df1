import logging
from typing import Optional

import numpy as np

from src.errors import StateError
from src.models.oracles import ModelSpec
from src.network.topology import MixingMatrix
from src.samplers.state import EXACT, NetworkState, SamplerConfig
from src.samplers.streams import TrialStreams

logger = logging.getLogger(__name__)


def _check_shapes(state: NetworkState, W: MixingMatrix, model: ModelSpec, tracker: bool) -> None:
    expected = (model.num_agents, model.dim)
    if state.x.shape != expected:
        raise StateError(f"Iterates have shape {state.x.shape}, model expects {expected}")
    if W.num_agents != model.num_agents:
        raise StateError(f"Mixing matrix is {W.num_agents}x{W.num_agents}, model has {model.num_agents} agents")
    if tracker:
        if state.y is None or state.prev_grad is None:
            raise StateError("Gradient tracking needs the tracker and the cached gradient")
        if state.y.shape != expected or state.prev_grad.shape != expected:
            raise StateError("Tracker or cached gradient shape does not match the iterates")


def _needs_streams(config: SamplerConfig, streams: Optional[TrialStreams]) -> None:
    if streams is None and (config.noise or config.gradient_mode != EXACT):
        raise StateError("Random streams are required when noise or minibatch gradients are on")


def local_gradients(
    model: ModelSpec,
    X: np.ndarray,
    mode: str,
    streams: Optional[TrialStreams],
    key: int,
) -> np.ndarray:
    # A gradient evaluated at x^(k) draws its minibatch from key k.
    if mode == EXACT:
        return model.stacked_gradient(X)
    if model.full_batch:
        return model.stacked_gradient(X)
    idx = streams.minibatch_indices(key, model.num_agents, model.local_n, model.batch)
    return model.stacked_stochastic_gradient(X, indices=idx)


def langevin_increment(
    config: SamplerConfig, streams: Optional[TrialStreams], iteration: int, shape
) -> Optional[np.ndarray]:
    # The noise that produces x^(iteration) comes from key `iteration`.
    if not config.noise:
        return None
    return streams.langevin_noise(iteration, shape)


def diging_sgld_step(
    state: NetworkState,
    W: MixingMatrix,
    model: ModelSpec,
    config: SamplerConfig,
    streams: Optional[TrialStreams] = None,
    noise: Optional[np.ndarray] = None,
) -> NetworkState:
    # x <- W x - eta y + sqrt(2 eta) w
    # y <- W y + g(x_new) - g(x_old), where g(x_old) is the cached estimate.
    _check_shapes(state, W, model, tracker=True)
    _needs_streams(config, streams)
    k = state.iteration

    x_new = W.entries @ state.x - config.eta * state.y
    if noise is None:
        noise = langevin_increment(config, streams, k + 1, state.x.shape)
    if noise is not None:
        x_new = x_new + np.sqrt(2.0 * config.eta) * noise

    g_new = local_gradients(model, x_new, config.gradient_mode, streams, k + 1)
    y_new = W.entries @ state.y + g_new - state.prev_grad
    return NetworkState(x=x_new, y=y_new, prev_grad=g_new, iteration=k + 1)


def de_sgld_step(
    state: NetworkState,
    W: MixingMatrix,
    model: ModelSpec,
    config: SamplerConfig,
    streams: Optional[TrialStreams] = None,
    noise: Optional[np.ndarray] = None,
) -> NetworkState:
    # x <- W x - eta g(x) + sqrt(2 eta) w
    _check_shapes(state, W, model, tracker=False)
    _needs_streams(config, streams)
    k = state.iteration

    grad = local_gradients(model, state.x, config.gradient_mode, streams, k)
    x_new = W.entries @ state.x - config.eta * grad
    if noise is None:
        noise = langevin_increment(config, streams, k + 1, state.x.shape)
    if noise is not None:
        x_new = x_new + np.sqrt(2.0 * config.eta) * noise
    return NetworkState(x=x_new, iteration=k + 1)


def ula_stepsize_limit(model: ModelSpec) -> float:
    """Largest stable stepsize for the centralized chain.

    The bound is 2N / (mu_f + L_f), where mu_f = N mu and L_f = N L are the
    constants of the global potential f = sum_i f_i. With `model.mu` and
    `model.lips` given per agent this reduces to 2 / (mu + L). The chain steps
    eta / N against grad f, so eta / N <= 2 / (mu_f + L_f) is the same condition.
    """
    n = model.num_agents
    return 2.0 * n / (n * model.mu + n * model.lips)


def ula_reference_step(
    x: np.ndarray,
    model: ModelSpec,
    eta: float,
    rng: Optional[np.random.Generator] = None,
    noise: Optional[np.ndarray] = None,
    gradient: Optional[np.ndarray] = None,
) -> np.ndarray:
    # Centralized chain x <- x - (eta / N) grad f(x) + sqrt(2 eta) w_bar, with w_bar the
    # average of N standard Gaussians. Passing the N x dim agent draws as `noise`
    # couples the chain to the decentralized runs.
    limit = ula_stepsize_limit(model)
    if eta > limit:
        logger.warning("ULA stepsize %.4g exceeds the stable limit %.4g", eta, limit)
        raise StateError(f"ULA stepsize {eta} exceeds 2/(mu+L) = {limit}")

    x = np.asarray(x, dtype=float)
    n = model.num_agents
    grad = model.global_gradient(x) if gradient is None else gradient
    x_new = x - (eta / n) * grad

    if noise is None and rng is not None:
        noise = rng.standard_normal((n, x.shape[-1]))
    if noise is not None:
        x_new = x_new + np.sqrt(2.0 * eta) * noise.mean(axis=0)
    return x_new
