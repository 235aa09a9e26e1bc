"""Core package initialization."""

from .exceptions import NJPOError
from .model import (
    FieldState,
    InjectionTone,
    ModeParams,
    PumpDrive,
    StabilityRegion,
    TwoModeSystem,
    paper_device,
)
from .dynamics import IntegratorConfig, NoiseConfig, Trajectory, integrate
from .signal_analysis import Quadratures, SpectralDensity, demodulate, photon_spectral_density
from .experiments import ExperimentResult, SimulationSettings, SweepAxis, SweepSpec

__all__ = [
    "NJPOError",
    "FieldState",
    "InjectionTone",
    "ModeParams",
    "PumpDrive",
    "StabilityRegion",
    "TwoModeSystem",
    "paper_device",
    "IntegratorConfig",
    "NoiseConfig",
    "Trajectory",
    "integrate",
    "Quadratures",
    "SpectralDensity",
    "demodulate",
    "photon_spectral_density",
    "ExperimentResult",
    "SimulationSettings",
    "SweepAxis",
    "SweepSpec",
]
