from src.network.schedules import (
    GraphSchedule,
    barbell_schedule,
    fixed_schedule,
    lollipop_schedule,
    schedule_from_spec,
    static_complete_schedule,
)
from src.network.spectral import SpectralDiagnostics, spectral_diagnostics, window_product
from src.network.topology import MixingMatrix, Topology, metropolis_weights

__all__ = [
    "GraphSchedule",
    "MixingMatrix",
    "SpectralDiagnostics",
    "Topology",
    "barbell_schedule",
    "fixed_schedule",
    "lollipop_schedule",
    "metropolis_weights",
    "schedule_from_spec",
    "spectral_diagnostics",
    "static_complete_schedule",
    "window_product",
]
