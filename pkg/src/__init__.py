"""
Main package initialization for the NJPO simulator.
"""

__version__ = "1.0.0"
__description__ = "Quasiclassical simulator of a nondegenerate Josephson parametric oscillator"

from .config import config
from .core import ExperimentResult, SweepSpec, TwoModeSystem, integrate, paper_device
from .templates import ConfigTemplates
from .utils import OutputManager, RunMonitor, parse_config, render_config

__all__ = [
    "config",
    "ExperimentResult",
    "SweepSpec",
    "TwoModeSystem",
    "integrate",
    "paper_device",
    "ConfigTemplates",
    "OutputManager",
    "RunMonitor",
    "parse_config",
    "render_config",
]
