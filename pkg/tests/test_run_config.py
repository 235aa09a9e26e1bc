"""
Tests for parsing and rendering run configurations.
"""

import math

import pytest
from hypothesis import given, settings, strategies as st

from src.core.exceptions import (
    ConfigSyntaxError,
    InvariantViolationError,
    MissingFieldError,
    UnitSuffixError,
    UnknownKeyError,
)
from src.core.experiments import SweepAxis
from src.core.model import to_angular
from src.templates import ConfigTemplates
from src.utils.run_config import (
    NoiseSection,
    PumpSection,
    Quantity,
    RunConfig,
    RunSection,
    SweepSection,
    ToneSection,
    load_config,
    parse_config,
    render_config,
)


@pytest.fixture
def default_text():
    return ConfigTemplates().get_template("default")


class TestParseConfig:
    """Test cases for parse_config."""

    def test_default_template(self, default_text):
        """Test that the bundled device parses to rad/s values."""
        run_config = parse_config(default_text)
        system = run_config.system()

        assert system.mode3.omega == pytest.approx(to_angular(4.345e9))
        assert system.mode4.kerr == pytest.approx(to_angular(178e3))
        epsilon, delta = run_config.pump_in_gamma(system)
        assert epsilon == pytest.approx(3.0)
        assert delta == pytest.approx(0.0)
        assert run_config.noise.vacuum
        assert run_config.tones == ()

    def test_gamma_units(self, default_text):
        """Test that gamma-relative rates and times are converted once."""
        run_config = parse_config(default_text)
        system = run_config.system()

        pump = run_config.pump_drive(system)
        integrator = run_config.integrator_config(system)

        assert pump.epsilon == pytest.approx(3.0 * system.gamma_eff)
        assert integrator.dt == pytest.approx(0.005 / system.gamma_eff)
        assert integrator.record_stride == 10

    def test_time_units(self, default_text):
        """Test explicit time units on the integrator."""
        text = default_text.replace("dt = 0.005 gamma", "dt = 2 ns\nduration = 50 us")
        integrator = parse_config(text).integrator_config()

        assert integrator.dt == pytest.approx(2e-9)
        assert integrator.duration == pytest.approx(50e-6)

    def test_bare_frequency_is_hz(self, default_text):
        """Test that a frequency without unit is in Hz."""
        text = default_text.replace("kerr = 71 kHz", "kerr = 71000")
        assert parse_config(text).system().mode3.kerr == pytest.approx(to_angular(71e3))

    @pytest.mark.parametrize("unit", ["khz", "mHz", "KHZ", "hz"])
    def test_units_are_case_sensitive(self, default_text, unit):
        """Test that a unit spelled in the wrong case is rejected."""
        text = default_text.replace("kerr = 71 kHz", f"kerr = 71 {unit}")
        with pytest.raises(UnitSuffixError) as excinfo:
            parse_config(text)
        assert excinfo.value.line == text.splitlines().index(f"kerr = 71 {unit}") + 1

    def test_millihertz_is_not_megahertz(self, default_text):
        """Test that mHz never parses as MHz."""
        text = default_text.replace("gamma_total = 0.56 MHz", "gamma_total = 0.56 mHz")
        with pytest.raises(UnitSuffixError):
            parse_config(text)

    def test_tone_section(self, default_text):
        """Test an injection tone."""
        text = default_text + "\n[tone]\nmode = 4\nphotons = 2.5\ndetuning = 0.1 gamma\nphase = 1.0 rad\n"
        run_config = parse_config(text)
        tone = run_config.injection_tones()[0]

        assert run_config.tones == (ToneSection(4, 2.5, Quantity(0.1, "gamma"), 1.0),)
        assert tone.mode_index == 4
        assert tone.phase == pytest.approx(1.0)

    def test_noise_switch(self, default_text):
        """Test switching vacuum noise off."""
        text = default_text.replace("vacuum = on", "vacuum = off")
        noise = parse_config(text).noise_config(seed=3)

        assert not noise.vacuum_noise_on
        assert noise.rng_seed == 3

    def test_sweep_axes_keep_file_order(self, default_text):
        """Test that sweep axes come out in the order they were written."""
        text = default_text + "\n[sweep]\ndelta = -2, 2, 5\nepsilon = 1 gamma, 3 gamma, 3\ntrajectories = 2\n"
        run_config = parse_config(text)

        assert [axis.name for axis in run_config.sweep.axes] == ["delta", "epsilon"]
        assert run_config.sweep.trajectories == 2
        assert run_config.sweep_spec(seed=4).shape == (5, 3)

    def test_comments_and_blank_lines(self, default_text):
        """Test that comments are ignored anywhere on a line."""
        text = default_text.replace("kerr = 71 kHz", "kerr = 71 kHz  # self-Kerr\n\n# note")
        assert parse_config(text).mode3.kerr == Quantity(71.0, "kHz")

    def test_gamma_unit_is_lowercase(self, default_text):
        """Test that Gamma-relative values need the lowercase suffix."""
        text = default_text.replace(" gamma\ndelta", " Gamma\ndelta", 1)
        with pytest.raises(UnitSuffixError):
            parse_config(text)

    def test_hash_inside_value_is_kept(self, default_text):
        """Test that only a # after whitespace starts a comment."""
        text = default_text + "\n[run]\noutput = runs/sweep#2  # second attempt\n"
        assert parse_config(text).run.output == "runs/sweep#2"

    def test_quoted_hash_is_kept(self, default_text):
        """Test that a quoted value keeps a whitespace-preceded #."""
        text = default_text + "\n[run]\noutput = \"runs/take #3\"  # quoted\n"
        assert parse_config(text).run.output == "runs/take #3"

    def test_run_section(self, default_text):
        """Test seed, output and worker overrides."""
        text = default_text + "\n[run]\nseed = 42\noutput = runs/test\nworkers = 3\n"
        assert parse_config(text).run == RunSection(seed=42, output="runs/test", workers=3)

    def test_load_config(self, temp_dir, default_text):
        """Test reading a configuration file."""
        path = temp_dir / "run.cfg"
        path.write_text(default_text)

        assert load_config(path) == parse_config(default_text)

    def test_load_missing_file(self, temp_dir):
        """Test that a missing file raises an OSError."""
        with pytest.raises(FileNotFoundError):
            load_config(temp_dir / "missing.cfg")


class TestConfigErrors:
    """Test cases for rejected configurations."""

    def test_empty_text(self):
        """Test that the first missing field is named."""
        with pytest.raises(MissingFieldError) as excinfo:
            parse_config("")
        assert "mode3.omega" in str(excinfo.value)

    def test_missing_tone_field(self, default_text):
        """Test that a tone needs mode and photons."""
        with pytest.raises(MissingFieldError):
            parse_config(default_text + "\n[tone]\nphotons = 1\n")

    def test_external_exceeds_total(self, default_text):
        """Test gamma_ext > gamma_total."""
        text = default_text.replace("gamma_ext = 0.52 MHz", "gamma_ext = 0.60 MHz")
        with pytest.raises(InvariantViolationError) as excinfo:
            parse_config(text)
        assert excinfo.value.line == 2

    def test_unknown_key_reports_line(self):
        """Test the line number of an unknown key."""
        with pytest.raises(UnknownKeyError) as excinfo:
            parse_config("[mode3]\nfoo = 1\n")
        assert str(excinfo.value).startswith("line 2")
        assert excinfo.value.line == 2

    def test_unknown_section(self):
        """Test that an unknown section is rejected."""
        with pytest.raises(UnknownKeyError):
            parse_config("[laser]\n")

    def test_unknown_unit(self, default_text):
        """Test that THz is not an accepted unit."""
        with pytest.raises(UnitSuffixError):
            parse_config(default_text.replace("4.345 GHz", "0.004345 THz"))

    def test_unit_on_unitless_key(self, default_text):
        """Test that a unit on a plain number is rejected."""
        with pytest.raises(UnitSuffixError):
            parse_config(default_text.replace("record_stride = 10", "record_stride = 10 Hz"))

    def test_phase_unit(self, default_text):
        """Test that phases are in radians."""
        with pytest.raises(UnitSuffixError):
            parse_config(default_text + "\n[tone]\nmode = 3\nphotons = 1\nphase = 90 deg\n")

    def test_duplicate_section(self, default_text):
        """Test that a repeated section is rejected."""
        with pytest.raises(ConfigSyntaxError):
            parse_config(default_text + "\n[pump]\nepsilon = 1 gamma\ndelta = 0 gamma\n")

    def test_repeated_key(self, default_text):
        """Test that a repeated key is rejected."""
        with pytest.raises(ConfigSyntaxError):
            parse_config(default_text.replace("kerr = 71 kHz", "kerr = 71 kHz\nkerr = 72 kHz"))

    def test_pair_outside_section(self):
        """Test a key before any section header."""
        with pytest.raises(ConfigSyntaxError):
            parse_config("omega = 1 GHz\n")

    def test_garbage_line(self, default_text):
        """Test a line that is neither header nor pair."""
        with pytest.raises(ConfigSyntaxError):
            parse_config(default_text + "\njust words\n")

    def test_non_integer(self, default_text):
        """Test a fractional integer field."""
        with pytest.raises(ConfigSyntaxError):
            parse_config(default_text.replace("record_stride = 10", "record_stride = 2.5"))

    def test_axis_without_points(self, default_text):
        """Test an axis with zero points."""
        with pytest.raises(InvariantViolationError):
            parse_config(default_text + "\n[sweep]\ndelta = -1, 1, 0\n")

    def test_malformed_axis(self, default_text):
        """Test an axis with too few fields."""
        with pytest.raises(ConfigSyntaxError):
            parse_config(default_text + "\n[sweep]\ndelta = -1, 1\n")

    def test_zero_workers(self, default_text):
        """Test the worker count invariant."""
        with pytest.raises(InvariantViolationError):
            parse_config(default_text + "\n[run]\nworkers = 0\n")


class TestRenderConfig:
    """Test cases for render_config."""

    @pytest.mark.parametrize("name", ConfigTemplates().get_available_templates())
    def test_templates_roundtrip(self, name):
        """Test parse(render(c)) == c for every bundled template."""
        run_config = parse_config(ConfigTemplates().get_template(name))
        assert parse_config(render_config(run_config)) == run_config

    @pytest.mark.parametrize("output", ["runs/sweep#2", "runs/take #3", " padded ", "\"quoted\" #1"])
    def test_output_path_roundtrip(self, output):
        """Test that awkward output paths survive rendering."""
        base = parse_config(ConfigTemplates().get_template("default"))
        run_config = RunConfig(
            mode3=base.mode3,
            mode4=base.mode4,
            pump=base.pump,
            noise=base.noise,
            integrator=base.integrator,
            run=RunSection(output=output),
        )

        assert parse_config(render_config(run_config)).run.output == output

    @settings(max_examples=50, deadline=None)
    @given(
        epsilon=st.floats(0.0, 10.0),
        delta=st.floats(-10.0, 10.0),
        tones=st.lists(
            st.builds(
                ToneSection,
                mode=st.sampled_from([3, 4]),
                photons=st.floats(0.0, 100.0),
                detuning=st.builds(Quantity, st.floats(-5.0, 5.0), st.just("gamma")),
                phase=st.floats(-math.pi, math.pi),
            ),
            max_size=2,
        ),
        noise=st.builds(
            NoiseSection, vacuum=st.booleans(), vacuum_scale=st.floats(0.0, 5.0), flicker_amplitude=st.floats(0.0, 1.0)
        ),
        axes=st.lists(
            st.builds(
                SweepAxis,
                name=st.sampled_from(["epsilon", "delta", "signal_detuning"]),
                minimum=st.floats(-8.0, 8.0),
                maximum=st.floats(-8.0, 8.0),
                points=st.integers(2, 50),
            ),
            max_size=3,
            unique_by=lambda axis: axis.name,
        ),
        trajectories=st.integers(1, 8),
        seed=st.one_of(st.none(), st.integers(0, 2**64 - 1)),
    )
    def test_roundtrip_property(self, epsilon, delta, tones, noise, axes, trajectories, seed):
        """Test that rendering and parsing are inverse for valid configurations."""
        base = parse_config(ConfigTemplates().get_template("default"))
        run_config = RunConfig(
            mode3=base.mode3,
            mode4=base.mode4,
            pump=PumpSection(Quantity(epsilon, "gamma"), Quantity(delta, "gamma")),
            tones=tuple(tones),
            noise=noise,
            integrator=base.integrator,
            sweep=SweepSection(axes=tuple(axes), trajectories=trajectories),
            run=RunSection(seed=seed),
        )

        assert parse_config(render_config(run_config)) == run_config
