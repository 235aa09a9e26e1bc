"""
Tests for output management, run monitoring, templates and settings.
"""

import importlib.util
import json
import logging
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

config_module = importlib.import_module("src.config")
from src.config import configure_logging
from src.core.dynamics import Trajectory
from src.templates import ConfigTemplates
from src.utils.file_manager import OutputManager, provenance_digest
from src.utils.run_config import parse_config
from src.utils.run_monitor import RunMonitor


class TestOutputManager:
    """Test cases for OutputManager."""

    def setup_method(self):
        """Set up a small table."""
        self.frame = pd.DataFrame({"epsilon": [1.0, 2.0], "photons3": [0.0, 1.0 / 3.0]})

    def test_run_directory(self, temp_dir):
        """Test that the run directory is created under the base directory."""
        manager = OutputManager(str(temp_dir), "map")

        assert manager.run_dir == temp_dir / "map"
        assert manager.run_dir.is_dir()

    def test_table_with_header(self, temp_dir):
        """Test that header lines precede the table and values survive exactly."""
        manager = OutputManager(str(temp_dir), "map")

        path = manager.write_table("map", self.frame, {"experiment": "map", "axes": "epsilon"})

        lines = path.read_text().splitlines()
        assert lines[0] == "# experiment: map"
        assert lines[1] == "# axes: epsilon"
        assert lines[2] == "epsilon,photons3"
        assert manager.read_table("map")["photons3"].iloc[1] == 1.0 / 3.0

    def test_manifest(self, temp_dir):
        """Test manifest serialisation of numpy values."""
        manager = OutputManager(str(temp_dir), "simulate")

        path = manager.write_manifest({"seed": np.int64(7), "values": np.arange(3), "out": Path("runs")})

        manifest = json.loads(path.read_text())
        assert manifest["seed"] == 7
        assert manifest["values"] == [0, 1, 2]
        assert manifest["out"] == "runs"
        assert "written_at" in manifest

    def test_manifest_rejects_unknown_objects(self, temp_dir):
        """Test that unserialisable values raise TypeError."""
        manager = OutputManager(str(temp_dir), "simulate")
        with pytest.raises(TypeError):
            manager.write_manifest({"bad": object()})

    def test_spectrogram(self, temp_dir):
        """Test stacked spectra written as columns."""
        manager = OutputManager(str(temp_dir), "ramp")
        stack = np.array([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]])

        manager.write_spectrogram("psd_mode3", np.array([-1.0, 0.0, 1.0]), stack, ["epsilon=1", "epsilon=2"])

        frame = manager.read_table("psd_mode3")
        assert list(frame.columns) == ["frequency_hz", "epsilon=1", "epsilon=2"]
        assert frame["epsilon=2"].tolist() == [4.0, 5.0, 6.0]

    def test_trajectory(self, temp_dir):
        """Test that trajectories are written into the run directory."""
        manager = OutputManager(str(temp_dir), "simulate")
        times = np.linspace(0.0, 1.0, 5)
        trajectory = Trajectory(times, np.exp(1j * times), np.zeros(5, dtype=complex), {"seed": 1})

        path = manager.write_trajectory("trajectory", trajectory)

        assert path.parent == manager.run_dir
        np.testing.assert_array_equal(Trajectory.load(path).a3, trajectory.a3)

    def test_listing(self, temp_dir):
        """Test file listing and storage statistics."""
        manager = OutputManager(str(temp_dir), "map")
        manager.write_table("b", self.frame)
        manager.write_table("a", self.frame)

        listing = manager.list_outputs()
        stats = manager.get_storage_stats()

        assert [item["name"] for item in listing] == ["a.csv", "b.csv"]
        assert all(len(item["sha256"]) == 64 for item in listing)
        assert stats["file_count"] == 2
        assert manager.get_file_info(temp_dir / "missing.csv") == {}

    def test_provenance_digest_ignores_timestamp(self):
        """Test that the digest depends on content only."""
        first = {"experiment": "map", "sweep": {"axes": []}, "created_at": "2024-01-01T00:00:00"}
        second = dict(first, created_at="2025-06-30T12:00:00")

        assert provenance_digest(first) == provenance_digest(second)
        assert provenance_digest(first) != provenance_digest(dict(first, experiment="ramp"))


class TestRunMonitor:
    """Test cases for RunMonitor."""

    def test_empty_metrics(self):
        """Test metrics before any task."""
        assert RunMonitor().get_performance_metrics() == {"total_tasks": 0, "message": "No tasks logged"}

    def test_metrics(self):
        """Test counts and timings of logged tasks."""
        monitor = RunMonitor("map")
        monitor.log_task("map", {"index": 0, "success": True, "elapsed": 1.0})
        monitor.log_task("map", {"index": 1, "success": False, "elapsed": 3.0, "error": "boom", "error_type": "FitError"})

        metrics = monitor.get_performance_metrics()

        assert metrics["total_tasks"] == 2
        assert metrics["failed_tasks"] == 1
        assert metrics["success_rate"] == 0.5
        assert metrics["average_execution_time_seconds"] == 2.0
        assert metrics["max_execution_time_seconds"] == 3.0
        assert monitor.get_failures()[0]["error_type"] == "FitError"

    def test_disabled(self):
        """Test that a disabled monitor records nothing."""
        monitor = RunMonitor(enabled=False)
        monitor.log_task("map", {"index": 0, "success": True})

        assert monitor.tasks == []
        assert monitor.get_system_status()["enabled"] is False

    def test_to_dict(self):
        """Test the manifest block."""
        monitor = RunMonitor("sync")
        monitor.log_task("sync", {"index": 0, "success": True, "elapsed": 0.5})

        block = monitor.to_dict()

        assert block["status"]["name"] == "sync"
        assert block["status"]["tasks_logged"] == 1
        assert block["metrics"]["successful_tasks"] == 1
        assert block["failures"] == []


class TestConfigTemplates:
    """Test cases for ConfigTemplates."""

    def setup_method(self):
        """Set up test fixtures."""
        self.templates = ConfigTemplates()

    def test_available_templates(self):
        """Test the bundled template names."""
        assert self.templates.get_available_templates() == ["default", "map", "ramp", "lock", "sync", "kerr-fit"]

    def test_every_template_parses(self):
        """Test that every bundled template is a valid configuration."""
        for name in self.templates.get_available_templates():
            parse_config(self.templates.get_template(name))

    def test_experiment_sweeps(self):
        """Test the sweep of each experiment template."""
        assert parse_config(self.templates.get_template("map")).sweep_spec(0).shape == (9, 13)
        ramp = parse_config(self.templates.get_template("ramp"))
        assert ramp.pump_in_gamma() == pytest.approx((3.0, 0.26))
        lock = parse_config(self.templates.get_template("lock"))
        assert lock.sweep.axes[0].scale == "log"
        sync = parse_config(self.templates.get_template("sync"))
        assert [axis.name for axis in sync.sweep.axes] == ["photons", "signal_detuning"]
        assert sync.tones[0].mode == 3

    def test_unknown_template(self):
        """Test that an unknown name raises ValueError."""
        with pytest.raises(ValueError):
            self.templates.get_template("laser")

    def test_custom_config(self):
        """Test a configuration at another operating point."""
        text = self.templates.create_custom_config(2.0, -1.5, "[run]\nseed = 9\n")
        run_config = parse_config(text)

        assert run_config.pump_in_gamma() == pytest.approx((2.0, -1.5))
        assert run_config.run.seed == 9


class TestSettings:
    """Test cases for environment settings and logging setup."""

    def test_environment_overrides(self, mock_env_vars):
        """Test that settings are read from the environment."""
        spec = importlib.util.spec_from_file_location("njpo_settings_reloaded", config_module.__file__)
        reloaded = importlib.util.module_from_spec(spec)
        spec.loader.exec_module(reloaded)

        assert reloaded.config.LOG_LEVEL == "WARNING"
        assert reloaded.config.DEFAULT_SEED == 7
        assert reloaded.config.CSV_PRECISION == 17
        assert reloaded.config.RECORD_SAMPLES == 2000
        assert reloaded.config.OUTPUT_DIRECTORY == "./test_runs"

    def test_configure_logging(self, temp_dir):
        """Test console and file handlers."""
        log_file = temp_dir / "run.log"

        configure_logging("debug", str(log_file))
        logging.getLogger("src.test").debug("hello")

        root = logging.getLogger()
        assert root.level == logging.DEBUG
        assert any(isinstance(h, logging.FileHandler) for h in root.handlers)
        for handler in root.handlers:
            handler.flush()
        assert "hello" in log_file.read_text()

        configure_logging("warning", "")
        assert not any(isinstance(h, logging.FileHandler) for h in logging.getLogger().handlers)
