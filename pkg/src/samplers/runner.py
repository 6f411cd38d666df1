import logging
from typing import Callable, Dict, List, Sequence

import numpy as np
import pandas as pd

from src.errors import SamplingError, StateError
from src.models.oracles import ModelSpec
from src.network.schedules import GraphSchedule
from src.samplers.state import EXACT, NetworkState, SamplerConfig, Trajectory
from src.samplers.steps import (
    de_sgld_step,
    diging_sgld_step,
    langevin_increment,
    local_gradients,
    ula_reference_step,
)
from src.samplers.streams import NoiseFingerprint, TrialStreams

logger = logging.getLogger(__name__)

DIGING = "diging"
DE_SGLD = "de_sgld"
ULA_REFERENCE = "ula_reference"
SAMPLER_KINDS = (DIGING, DE_SGLD, ULA_REFERENCE)

_STEPS: Dict[str, Callable] = {DIGING: diging_sgld_step, DE_SGLD: de_sgld_step}


def initial_iterates(model: ModelSpec, config: SamplerConfig, streams: TrialStreams) -> np.ndarray:
    shape = (model.num_agents, model.dim)
    if config.init == "zeros":
        return np.zeros(shape)
    return config.init_scale * streams.init().standard_normal(shape)


def initial_state(kind: str, model: ModelSpec, config: SamplerConfig, streams: TrialStreams) -> NetworkState:
    x0 = initial_iterates(model, config, streams)
    if kind == ULA_REFERENCE:
        # The centralized chain starts from the network average.
        return NetworkState(x=x0.mean(axis=0, keepdims=True))
    if kind == DE_SGLD:
        return NetworkState(x=x0)
    # y^(0) uses the exact gradient unless the stochastic initialization is asked for.
    y0 = local_gradients(model, x0, config.y_init, streams, 0)
    return NetworkState(x=x0, y=y0, prev_grad=y0.copy())


class _Recorder:
    def __init__(self, iterations: int, stride: int, record_y: bool) -> None:
        self.keep = set(range(0, iterations + 1, stride)) | {iterations}
        self.record_y = record_y
        self.steps: List[int] = []
        self.xs: List[np.ndarray] = []
        self.ys: List[np.ndarray] = []

    def add(self, state: NetworkState) -> None:
        if state.iteration not in self.keep:
            return
        self.steps.append(state.iteration)
        self.xs.append(state.x)
        if self.record_y and state.y is not None:
            self.ys.append(state.y)

    def finish(self, kind: str, trial_seed: int, fingerprint: NoiseFingerprint) -> Trajectory:
        return Trajectory(
            kind=kind,
            trial_seed=trial_seed,
            iterations=np.asarray(self.steps, dtype=int),
            x=np.stack(self.xs),
            y=np.stack(self.ys) if self.ys else None,
            noise_fingerprint=fingerprint.hexdigest(),
            batch_fingerprint=dict(fingerprint.batches),
        )


def _ula_step(state: NetworkState, model: ModelSpec, config: SamplerConfig, streams: TrialStreams, noise):
    k = state.iteration
    gradient = None
    if config.gradient_mode != EXACT:
        X = np.broadcast_to(state.x[0], (model.num_agents, model.dim))
        gradient = local_gradients(model, X, config.gradient_mode, streams, k).sum(axis=0)
    x_new = ula_reference_step(state.x[0], model, config.eta, noise=noise, gradient=gradient)
    return NetworkState(x=x_new[None, :], iteration=k + 1)


def run(
    kind: str,
    schedule: GraphSchedule,
    model: ModelSpec,
    config: SamplerConfig,
    trial_seed: int,
) -> Trajectory:
    # Fully determined by (trial_seed, config, schedule, model).
    if kind not in SAMPLER_KINDS:
        raise StateError(f"Unknown sampler '{kind}', expected one of {SAMPLER_KINDS}")
    if schedule.num_agents != model.num_agents:
        raise StateError(
            f"Schedule has {schedule.num_agents} agents, model has {model.num_agents}"
        )
    if config.batch is not None and config.batch != model.batch:
        model = model.with_batch(config.batch)

    fingerprint = NoiseFingerprint(trial_seed)
    streams = TrialStreams(trial_seed, fingerprint)
    recorder = _Recorder(config.iterations, config.stride, config.record_y)

    state = initial_state(kind, model, config, streams)
    recorder.add(state)
    shape = (model.num_agents, model.dim)

    for k in range(config.iterations):
        try:
            noise = langevin_increment(config, streams, k + 1, shape)
            if noise is not None:
                fingerprint.update(k + 1, noise)
            if kind == ULA_REFERENCE:
                state = _ula_step(state, model, config, streams, noise)
            else:
                state = _STEPS[kind](state, schedule.at(k), model, config, streams, noise)
        except SamplingError as e:
            raise StateError(f"{kind} failed at iteration {k}: {e}") from e
        recorder.add(state)

    return recorder.finish(kind, trial_seed, fingerprint)


def trajectories_frame(trajectories: Sequence[Trajectory]) -> pd.DataFrame:
    # Long format: one row per (trial, iteration, agent, coordinate).
    frames = []
    for trajectory in trajectories:
        snaps, agents, dim = trajectory.x.shape
        it, agent, coord = np.meshgrid(
            trajectory.iterations, np.arange(agents), np.arange(dim), indexing="ij"
        )
        frames.append(
            pd.DataFrame(
                {
                    "trial": trajectory.trial_seed,
                    "iteration": it.ravel(),
                    "agent": agent.ravel(),
                    "coordinate": coord.ravel(),
                    "value": trajectory.x.ravel(),
                }
            )
        )
    return pd.concat(frames, ignore_index=True)


def export_trajectories(path: str, trajectories: Sequence[Trajectory]) -> None:
    trajectories_frame(trajectories).to_csv(path, index=False)
