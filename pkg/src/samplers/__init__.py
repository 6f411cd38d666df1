from src.samplers.runner import (
    DE_SGLD,
    DIGING,
    SAMPLER_KINDS,
    ULA_REFERENCE,
    export_trajectories,
    initial_state,
    run,
    trajectories_frame,
)
from src.samplers.state import NetworkState, SamplerConfig, Trajectory
from src.samplers.steps import de_sgld_step, diging_sgld_step, ula_reference_step
from src.samplers.streams import TrialStreams

__all__ = [
    "DE_SGLD",
    "DIGING",
    "NetworkState",
    "SAMPLER_KINDS",
    "SamplerConfig",
    "Trajectory",
    "TrialStreams",
    "ULA_REFERENCE",
    "de_sgld_step",
    "diging_sgld_step",
    "export_trajectories",
    "initial_state",
    "run",
    "trajectories_frame",
    "ula_reference_step",
]
