"""
Test configuration and fixtures for the NJPO simulator.

Simulation tests use the measured device re-expressed in rad/us
(`scaled_system`) so that a few thousand integration steps cover many
loss times.
"""

import pytest
import tempfile
from pathlib import Path

from src.config import config
from src.core.dynamics import IntegratorConfig, NoiseConfig
from src.core.experiments import SimulationSettings
from src.core.model import paper_device

# Step of 0.005 us keeps dt * rate well below 0.1 for epsilon <= 4 Gamma
DESK_DT = 0.005
DESK_STRIDE = 10


@pytest.fixture
def temp_dir():
    """Create a temporary directory for tests."""
    with tempfile.TemporaryDirectory() as tmp_dir:
        yield Path(tmp_dir)


@pytest.fixture
def paper_system():
    """Measured device in rad/s."""
    return paper_device()


@pytest.fixture
def scaled_system():
    """Measured device with every rate in rad/us."""
    return paper_device().scaled(1e-6)


def desk_settings(system, duration=40.0, noise=None, transient=None, dt=DESK_DT, stride=DESK_STRIDE):
    """Simulation settings for the rad/us device; noiseless unless `noise` is given."""
    return SimulationSettings(
        system=system,
        noise=noise or NoiseConfig.noiseless(),
        integrator=IntegratorConfig(dt=dt, duration=duration, record_stride=stride),
        transient=transient,
    )


@pytest.fixture
def make_settings(scaled_system):
    """Factory for rad/us simulation settings."""
    def factory(**kwargs):
        return desk_settings(scaled_system, **kwargs)
    return factory


@pytest.fixture
def quiet_settings(scaled_system):
    """Noiseless 40 us runs of the rad/us device."""
    return desk_settings(scaled_system)


@pytest.fixture
def quiet_logging(monkeypatch):
    """Keep CLI runs from writing a log file into the working directory."""
    monkeypatch.setattr(config, "LOG_FILE", "")


# Mock environment variables for testing
@pytest.fixture
def mock_env_vars(monkeypatch):
    """Mock environment variables for testing."""
    monkeypatch.setenv("LOG_LEVEL", "WARNING")
    monkeypatch.setenv("LOG_FILE", "")
    monkeypatch.setenv("OUTPUT_DIRECTORY", "./test_runs")
    monkeypatch.setenv("CSV_PRECISION", "17")
    monkeypatch.setenv("DEFAULT_SEED", "7")
    monkeypatch.setenv("MAX_WORKERS", "1")
    monkeypatch.setenv("RECORD_SAMPLES", "2000")
