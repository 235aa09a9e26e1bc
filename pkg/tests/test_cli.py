"""
Tests for the command-line interface.
"""

import json

import pandas as pd
import pytest

from src.cli import (
    EXIT_ANALYSIS,
    EXIT_CONFIG,
    EXIT_INTEGRATOR,
    EXIT_IO,
    EXIT_OK,
    EXIT_UNEXPECTED,
    build_parser,
    exit_code_for,
    main,
)
from src.core.exceptions import (
    FitError,
    IntegrationError,
    InversionError,
    MissingFieldError,
    StabilityGuardError,
)
from src.templates.config_templates import DEVICE_BLOCK


def device_config(integrator, extra=""):
    return (
        DEVICE_BLOCK
        + "\n[pump]\nepsilon = 3 gamma\ndelta = 0 gamma\n"
        + "\n[integrator]\n"
        + integrator
        + "\n"
        + extra
    )


@pytest.fixture
def write_config(temp_dir):
    def factory(text, name="run.cfg"):
        path = temp_dir / name
        path.write_text(text)
        return str(path)
    return factory


class TestExitCodes:
    """Test cases for exit-code mapping."""

    def test_categories(self):
        """Test each error category."""
        assert exit_code_for(MissingFieldError("x")) == EXIT_CONFIG
        assert exit_code_for(FileNotFoundError("x")) == EXIT_IO
        assert exit_code_for(IntegrationError("x", 3)) == EXIT_INTEGRATOR
        assert exit_code_for(StabilityGuardError("x")) == EXIT_INTEGRATOR
        assert exit_code_for(FitError("x")) == EXIT_ANALYSIS
        assert exit_code_for(InversionError("x")) == EXIT_ANALYSIS
        assert exit_code_for(KeyError("x")) == EXIT_UNEXPECTED

    def test_class_names(self):
        """Test lookup by exception class name, as stored in failure records."""
        assert exit_code_for("StabilityGuardError") == EXIT_INTEGRATOR
        assert exit_code_for("NoSuchError") == EXIT_UNEXPECTED

    def test_parser(self):
        """Test subcommand and flag parsing."""
        args = build_parser().parse_args(["map", "--seed", "5", "--workers", "2", "--no-noise"])

        assert args.subcommand == "map"
        assert args.seed == 5
        assert args.workers == 2
        assert args.no_noise
        assert args.method == "simulated"

    def test_unknown_subcommand(self):
        """Test that argparse rejects an unknown subcommand."""
        with pytest.raises(SystemExit):
            build_parser().parse_args(["fly"])


class TestMain:
    """Test cases for end-to-end subcommand runs."""

    def test_steady_state(self, temp_dir, quiet_logging):
        """Test the closed-form table with the bundled device."""
        status = main(["steady-state", "--out", str(temp_dir)])

        assert status == EXIT_OK
        table = pd.read_csv(temp_dir / "steady-state" / "steady_state.csv", comment="#")
        assert table["photons3"].iloc[0] == pytest.approx(6.4782, rel=1e-3)
        manifest = json.loads((temp_dir / "steady-state" / "manifest.json").read_text())
        assert manifest["subcommand"] == "steady-state"
        assert "steady_state.csv" in manifest["files"]
        assert "[mode3]" in manifest["config"]

    def test_simulate_is_reproducible(self, temp_dir, write_config, quiet_logging):
        """Test that two runs with the same seed write identical files."""
        path = write_config(device_config("dt = 0.005 gamma\nduration = 60 gamma\nrecord_stride = 5"))

        first = main(["simulate", "--config", path, "--seed", "11", "--out", str(temp_dir / "a")])
        second = main(["simulate", "--config", path, "--seed", "11", "--out", str(temp_dir / "b")])

        assert first == second == EXIT_OK
        for name in ("trajectory.csv", "simulate.csv", "psd_mode3.csv", "reference_trajectory.csv"):
            a = (temp_dir / "a" / "simulate" / name).read_bytes()
            b = (temp_dir / "b" / "simulate" / name).read_bytes()
            assert a == b, name

    def test_simulate_writes_frequency_noise(self, temp_dir, write_config, quiet_logging):
        """Test that a record of 10^4 samples or more writes both frequency-noise tables."""
        path = write_config(device_config("dt = 0.005 gamma\nduration = 300 gamma\nrecord_stride = 5"))

        status = main(["simulate", "--config", path, "--no-noise", "--out", str(temp_dir)])

        assert status == EXIT_OK
        manifest = json.loads((temp_dir / "simulate" / "manifest.json").read_text())
        for index in (3, 4):
            assert f"frequency_noise_mode{index}.csv" in manifest["files"]
        header = (temp_dir / "simulate" / "frequency_noise_mode3.csv").read_text().splitlines()[0]
        assert header.startswith("#")

    def test_map_grid(self, temp_dir, write_config, quiet_logging):
        """Test that a 5x5 map writes one row per grid point."""
        path = write_config(
            device_config(
                "dt = 0.005 gamma\nduration = 30 gamma\nrecord_stride = 10",
                "[sweep]\nepsilon = 0, 4, 5\ndelta = -4, 4, 5\n",
            )
        )

        status = main(["map", "--config", path, "--no-noise", "--out", str(temp_dir)])

        assert status == EXIT_OK
        table = pd.read_csv(temp_dir / "map" / "map.csv", comment="#")
        assert len(table) == 25
        assert set(table["region"]) == {"I", "II", "III"}
        assert table["success"].all()

    def test_kerr_fit_closed_form(self, temp_dir, quiet_logging):
        """Test the closed-form Kerr round trip from the bundled template."""
        status = main(["kerr-fit", "--method", "closed_form", "--out", str(temp_dir)])

        assert status == EXIT_OK
        estimate = pd.read_csv(temp_dir / "kerr-fit" / "kerr_estimate.csv", comment="#")
        assert estimate["kerr3_hz"].iloc[0] == pytest.approx(71e3, rel=1e-9)

    def test_missing_config_file(self, temp_dir, quiet_logging):
        """Test that an unreadable configuration exits with the I/O code."""
        status = main(["simulate", "--config", str(temp_dir / "absent.cfg"), "--out", str(temp_dir)])
        assert status == EXIT_IO

    def test_bad_config(self, write_config, temp_dir, quiet_logging):
        """Test that a malformed configuration exits with the config code."""
        path = write_config("[mode3]\nfoo = 1\n")
        assert main(["simulate", "--config", path, "--out", str(temp_dir)]) == EXIT_CONFIG

    def test_step_too_large(self, write_config, temp_dir, quiet_logging):
        """Test that a step violating the guard exits with the integrator code."""
        path = write_config(device_config("dt = 0.1 gamma\nduration = 20 gamma"))
        status = main(["simulate", "--config", path, "--no-noise", "--out", str(temp_dir)])
        assert status == EXIT_INTEGRATOR
