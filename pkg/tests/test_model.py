"""
Tests for the two-mode model and its closed-form predictions.
"""

import math

import pytest
from hypothesis import given, settings, strategies as st

from src.core.exceptions import (
    BelowThresholdError,
    GroundStateOnlyError,
    InversionError,
    ParameterError,
)
from src.core.model import (
    FieldState,
    InjectionTone,
    ModeParams,
    PumpDrive,
    StabilityRegion,
    TwoModeSystem,
    classify_region,
    closed_form_slopes,
    input_photon_number,
    kerr_detunings,
    kerr_from_slopes,
    locked_phase,
    mode_frequency,
    onset_frequency_shift,
    oscillation_frequency_shift,
    output_flux,
    paper_device,
    phase_sum,
    steady_state_field,
    steady_state_photons,
    threshold_detuning,
    to_angular,
    to_hz,
    tone_amplitude,
    wrap_phase,
)


def _pump(system, epsilon, delta):
    return PumpDrive.in_gamma_units(system, epsilon, delta)


class TestModeParams:
    """Test cases for single-mode parameters."""

    def test_internal_loss(self):
        """Test that the internal loss is the difference of total and external loss."""
        mode = ModeParams(omega=1.0, gamma_total=5.0, gamma_ext=3.0, kerr=0.1)
        assert mode.gamma_int == pytest.approx(2.0)

    def test_external_loss_above_total_rejected(self):
        """Test that gamma_ext > gamma_total is rejected."""
        with pytest.raises(ParameterError):
            ModeParams(omega=1.0, gamma_total=1.0, gamma_ext=2.0, kerr=0.1)

    @pytest.mark.parametrize("kerr", [0.0, -1.0, math.nan])
    def test_non_positive_kerr_rejected(self, kerr):
        """Test that the self-Kerr coefficient must be positive and finite."""
        with pytest.raises(ParameterError):
            ModeParams(omega=1.0, gamma_total=1.0, gamma_ext=1.0, kerr=kerr)


class TestTwoModeSystem:
    """Test cases for the two-mode parameter set."""

    def setup_method(self):
        """Set up test fixtures."""
        self.system = paper_device()

    def test_derived_rates(self):
        """Test cross-Kerr and effective loss as geometric means."""
        m3, m4 = self.system.mode3, self.system.mode4
        assert self.system.cross_kerr == pytest.approx(math.sqrt(m3.kerr * m4.kerr))
        assert self.system.gamma_eff == pytest.approx(math.sqrt(m3.gamma_total * m4.gamma_total))
        assert to_hz(self.system.gamma_eff) == pytest.approx(0.6609e6, rel=1e-3)

    def test_dict_roundtrip(self):
        """Test that to_dict/from_dict reproduce the system."""
        assert TwoModeSystem.from_dict(self.system.to_dict()) == self.system

    def test_scaled_keeps_ratios(self):
        """Test that rescaling the time unit leaves photon numbers unchanged."""
        scaled = self.system.scaled(1e-6)
        pump = _pump(self.system, 3.0, 0.5)
        scaled_pump = _pump(scaled, 3.0, 0.5)
        assert steady_state_photons(scaled, scaled_pump)[0] == pytest.approx(
            steady_state_photons(self.system, pump)[0], rel=1e-12
        )

    def test_mode_lookup(self):
        """Test mode access by index."""
        assert self.system.mode(3) is self.system.mode3
        with pytest.raises(ParameterError):
            self.system.mode(5)


class TestSteadyState:
    """Test cases for thresholds, regions and steady-state intensities."""

    def setup_method(self):
        """Set up test fixtures."""
        self.system = paper_device()
        self.gamma = self.system.gamma_eff

    def test_threshold_detuning_at_three_gamma(self):
        """Test delta_th ~ 2.87 Gamma at epsilon = 3 Gamma."""
        delta_th = threshold_detuning(self.system, 3.0 * self.gamma)
        assert delta_th / self.gamma == pytest.approx(2.867, rel=1e-3)
        assert to_hz(delta_th) == pytest.approx(1.895e6, rel=1e-3)

    def test_threshold_detuning_below_threshold(self):
        """Test that no detuning interval exists below threshold."""
        with pytest.raises(BelowThresholdError):
            threshold_detuning(self.system, 0.5 * self.gamma)

    def test_threshold_detuning_vanishes_at_threshold(self):
        """Test delta_th = 0 at epsilon = Gamma."""
        assert threshold_detuning(self.system, self.gamma) == 0.0

    def test_photon_numbers_at_operating_point(self):
        """Test steady-state photon numbers at epsilon = 3 Gamma, delta = 0."""
        photons3, photons4 = steady_state_photons(self.system, _pump(self.system, 3.0, 0.0))
        assert photons3 == pytest.approx(6.478, rel=1e-3)
        assert photons4 == pytest.approx(4.651, rel=1e-3)

    def test_photon_ratio(self):
        """Test |A_4|^2 / |A_3|^2 = Gamma_3 / Gamma_4."""
        photons3, photons4 = steady_state_photons(self.system, _pump(self.system, 2.0, -1.0))
        ratio = self.system.mode3.gamma_total / self.system.mode4.gamma_total
        assert photons4 / photons3 == pytest.approx(ratio, rel=1e-12)

    def test_photons_vanish_at_upper_boundary(self):
        """Test that the intensity reaches zero at delta = delta_th."""
        epsilon = 3.0 * self.gamma
        pump = PumpDrive(epsilon, threshold_detuning(self.system, epsilon))
        assert steady_state_photons(self.system, pump) == (0.0, 0.0)

    @pytest.mark.parametrize("epsilon, delta", [(0.5, 0.0), (3.0, 3.0), (1.0, 0.0)])
    def test_ground_state_only(self, epsilon, delta):
        """Test that no oscillating solution is reported in region I."""
        with pytest.raises(GroundStateOnlyError):
            steady_state_photons(self.system, _pump(self.system, epsilon, delta + 1e-3))

    def test_output_flux(self):
        """Test |C_n|^2 = 2 Gamma_n0 |A_n|^2."""
        flux3, flux4 = output_flux(self.system, (2.0, 3.0))
        assert flux3 == pytest.approx(4.0 * self.system.mode3.gamma_ext)
        assert flux4 == pytest.approx(6.0 * self.system.mode4.gamma_ext)
        with pytest.raises(ParameterError):
            output_flux(self.system, (-1.0, 0.0))


class TestStabilityRegions:
    """Test cases for region classification."""

    def setup_method(self):
        """Set up test fixtures."""
        self.system = paper_device()
        self.gamma = self.system.gamma_eff

    @pytest.mark.parametrize(
        "epsilon, delta, region",
        [
            (0.5, 0.0, StabilityRegion.GROUND_ONLY),
            (3.0, 4.0, StabilityRegion.GROUND_ONLY),
            (3.0, 0.0, StabilityRegion.OSCILLATION_ONLY),
            (3.0, 2.5, StabilityRegion.OSCILLATION_ONLY),
            (3.0, -4.0, StabilityRegion.BISTABLE),
            (8.0, -8.0, StabilityRegion.OSCILLATION_ONLY),
        ],
    )
    def test_classify(self, epsilon, delta, region):
        """Test region labels at representative points."""
        assert classify_region(self.system, _pump(self.system, epsilon, delta)) is region

    def test_boundaries_go_to_lower_region(self):
        """Test that boundary points take the region of smaller index."""
        epsilon = 3.0 * self.gamma
        delta_th = threshold_detuning(self.system, epsilon)
        assert classify_region(self.system, PumpDrive(self.gamma, 0.0)) is StabilityRegion.GROUND_ONLY
        assert classify_region(self.system, PumpDrive(epsilon, delta_th)) is StabilityRegion.GROUND_ONLY
        assert classify_region(self.system, PumpDrive(epsilon, -delta_th)) is StabilityRegion.OSCILLATION_ONLY

    @pytest.mark.parametrize("delta", [-2.0, -1e-6, 0.0, 1.0])
    def test_threshold_pump_has_no_oscillation(self, delta):
        """Test that epsilon = Gamma is ground-only for the photon numbers too."""
        pump = PumpDrive(self.gamma, delta * self.gamma)

        assert classify_region(self.system, pump) is StabilityRegion.GROUND_ONLY
        with pytest.raises(GroundStateOnlyError):
            steady_state_photons(self.system, pump)

    @settings(max_examples=200, deadline=None)
    @given(epsilon=st.floats(0.0, 6.0), delta=st.floats(-8.0, 8.0))
    def test_region_agrees_with_photons(self, epsilon, delta):
        """Test that oscillating photon numbers exist exactly outside region I."""
        pump = _pump(self.system, epsilon, delta)
        region = classify_region(self.system, pump)
        try:
            photons3, _ = steady_state_photons(self.system, pump)
        except GroundStateOnlyError:
            assert region is StabilityRegion.GROUND_ONLY
        else:
            assert region is not StabilityRegion.GROUND_ONLY or photons3 == 0.0


class TestFrequencies:
    """Test cases for radiation frequencies and phases."""

    def setup_method(self):
        """Set up test fixtures."""
        self.system = paper_device()
        self.gamma = self.system.gamma_eff
        self.gamma3 = self.system.mode3.gamma_total
        self.gamma4 = self.system.mode4.gamma_total

    def test_onset_shift(self):
        """Test delta_3 = -delta_4 = delta (Gamma_3 - Gamma_4) / (Gamma_3 + Gamma_4)."""
        delta = 0.7 * self.gamma
        shift3, shift4 = onset_frequency_shift(self.system, delta)
        assert shift3 == pytest.approx(delta * (self.gamma3 - self.gamma4) / (self.gamma3 + self.gamma4))
        assert shift4 == pytest.approx(-shift3)

    def test_shift_continuous_at_threshold_boundary(self):
        """Test that Delta_0 meets the onset shift where the intensity vanishes."""
        epsilon = 2.0 * self.gamma
        delta_th = threshold_detuning(self.system, epsilon)
        pump = PumpDrive(epsilon, delta_th)
        assert oscillation_frequency_shift(self.system, pump) == pytest.approx(
            onset_frequency_shift(self.system, delta_th)[0], rel=1e-9
        )

    def test_mode_frequencies_opposite(self):
        """Test that mode 4 radiates at -Delta_0."""
        pump = _pump(self.system, 3.0, 0.26)
        assert mode_frequency(self.system, pump, 4) == pytest.approx(-mode_frequency(self.system, pump, 3))

    def test_mode_frequency_below_threshold(self):
        """Test that the radiation detuning is zero without oscillation."""
        assert mode_frequency(self.system, _pump(self.system, 0.5, 0.0), 3) == 0.0

    def test_kerr_detunings(self):
        """Test the self- and cross-Kerr shifts of both detunings."""
        state = FieldState.from_polar(4.0, 0.3, 2.0, -1.1)
        pump = _pump(self.system, 3.0, -0.5)
        cross = math.sqrt(self.system.mode3.kerr * self.system.mode4.kerr)

        zeta3, zeta4 = kerr_detunings(self.system, pump, state)

        assert zeta3 == pytest.approx(pump.delta + 4.0 * self.system.mode3.kerr + 4.0 * cross)
        assert zeta4 == pytest.approx(pump.delta + 2.0 * self.system.mode4.kerr + 8.0 * cross)

    def test_phase_sum_range(self):
        """Test that the locked phase sum lies in (pi/2, pi)."""
        theta = phase_sum(self.system, 3.0 * self.gamma)
        assert theta == pytest.approx(0.5 * math.pi + math.atan(math.sqrt(8.0)))
        assert 0.5 * math.pi < theta < math.pi
        with pytest.raises(BelowThresholdError):
            phase_sum(self.system, self.gamma)

    def test_steady_state_field_phases(self):
        """Test that the oscillating field obeys the phase-sum constraint."""
        pump = _pump(self.system, 3.0, 0.0)
        state = steady_state_field(self.system, pump, psi=0.4)
        theta3, theta4 = state.phases
        assert wrap_phase(theta3 + theta4) == pytest.approx(phase_sum(self.system, pump.epsilon))
        assert wrap_phase(theta3 - theta4) == pytest.approx(0.4)
        assert state.photons[0] == pytest.approx(steady_state_photons(self.system, pump)[0])

    def test_locked_phase(self):
        """Test the phase of mode 3 locked by a resonant input."""
        epsilon = 3.0 * self.gamma
        expected = 0.3 - math.atan(3.0 / (2.0 * math.sqrt(8.0)))
        assert locked_phase(self.system, epsilon, 0.3) == pytest.approx(expected)


class TestInjectionTone:
    """Test cases for coherent input tones."""

    def setup_method(self):
        """Set up test fixtures."""
        self.system = paper_device()

    def test_photon_number_roundtrip(self):
        """Test that the amplitude of <n> input photons maps back to <n>."""
        tone = InjectionTone.from_photons(self.system, 3, 2.5)
        assert tone.amplitude == pytest.approx(tone_amplitude(self.system, 3, 2.5))
        assert input_photon_number(self.system, tone) == pytest.approx(2.5)

    def test_phase_wrapped(self):
        """Test that the tone phase is wrapped into (-pi, pi]."""
        tone = InjectionTone(4, 1.0, 0.0, -4.0)
        assert tone.phase == pytest.approx(2.0 * math.pi - 4.0)

    @pytest.mark.parametrize("mode_index, amplitude", [(2, 1.0), (3, -1.0)])
    def test_invalid_tone_rejected(self, mode_index, amplitude):
        """Test that unknown modes and negative amplitudes are rejected."""
        with pytest.raises(ParameterError):
            InjectionTone(mode_index, amplitude)


class TestKerrInversion:
    """Test cases for recovering self-Kerr coefficients from slopes."""

    def setup_method(self):
        """Set up test fixtures."""
        self.system = paper_device()

    def test_closed_form_slopes_match_finite_differences(self):
        """Test slopes against differences of the closed forms at two pump strengths."""
        slope_photons, slope_shift = closed_form_slopes(self.system)
        gamma = self.system.gamma_eff
        for epsilon in (2.0, 4.0):
            low, high = _pump(self.system, epsilon, -0.5), _pump(self.system, epsilon, 0.5)
            d_delta = high.delta - low.delta
            d_photons = steady_state_photons(self.system, high)[0] - steady_state_photons(self.system, low)[0]
            d_shift = oscillation_frequency_shift(self.system, high) - oscillation_frequency_shift(self.system, low)
            assert d_photons / d_delta == pytest.approx(slope_photons, rel=1e-8)
            assert d_shift / d_delta == pytest.approx(slope_shift, rel=1e-8)
        assert slope_photons * gamma < 0

    def test_roundtrip_of_measured_device(self):
        """Test that closed-form slopes give back the device's Kerr coefficients."""
        slopes = closed_form_slopes(self.system)
        kerr3, kerr4 = kerr_from_slopes(
            self.system.mode3.gamma_total, self.system.mode4.gamma_total, *slopes
        )
        assert kerr3 == pytest.approx(self.system.mode3.kerr, rel=1e-9)
        assert kerr4 == pytest.approx(self.system.mode4.kerr, rel=1e-9)

    def test_positive_intensity_slope_rejected(self):
        """Test that a rising intensity slope admits no inversion."""
        with pytest.raises(InversionError):
            kerr_from_slopes(1.0, 1.5, 0.1, 0.0)

    def test_unreachable_slopes_report_condition(self):
        """Test that slopes needing negative Kerr coefficients raise with a condition number."""
        gamma3 = self.system.mode3.gamma_total
        gamma4 = self.system.mode4.gamma_total
        slope_photons, _ = closed_form_slopes(self.system)
        # a shift slope far outside the reachable range
        with pytest.raises(InversionError) as info:
            kerr_from_slopes(gamma3, gamma4, slope_photons, 50.0)
        assert info.value.condition is not None

    @settings(max_examples=50, deadline=None)
    @given(
        kerr3=st.floats(min_value=1e4, max_value=1e6),
        kerr4=st.floats(min_value=1e4, max_value=1e6),
        gamma3=st.floats(min_value=1e5, max_value=1e7),
        gamma4=st.floats(min_value=1e5, max_value=1e7),
    )
    def test_roundtrip_property(self, kerr3, kerr4, gamma3, gamma4):
        """Test the slope inversion over a range of devices."""
        system = TwoModeSystem(
            ModeParams(1.0, to_angular(gamma3), to_angular(gamma3), to_angular(kerr3)),
            ModeParams(1.0, to_angular(gamma4), to_angular(gamma4), to_angular(kerr4)),
        )
        slopes = closed_form_slopes(system)
        found3, found4 = kerr_from_slopes(system.mode3.gamma_total, system.mode4.gamma_total, *slopes)
        assert found3 == pytest.approx(system.mode3.kerr, rel=1e-6)
        assert found4 == pytest.approx(system.mode4.kerr, rel=1e-6)


class TestProperties:
    """Property tests over the oscillation region."""

    @settings(max_examples=100, deadline=None)
    @given(
        epsilon=st.floats(min_value=1.05, max_value=10.0),
        fraction=st.floats(min_value=-0.99, max_value=0.99),
    )
    def test_region_two_oscillates(self, epsilon, fraction):
        """Test that every region II point has positive photon numbers in the right ratio."""
        system = paper_device()
        gamma = system.gamma_eff
        delta = fraction * threshold_detuning(system, epsilon * gamma)
        pump = PumpDrive(epsilon * gamma, delta)
        assert classify_region(system, pump) is StabilityRegion.OSCILLATION_ONLY
        photons3, photons4 = steady_state_photons(system, pump)
        assert photons3 > 0
        assert photons4 / photons3 == pytest.approx(
            system.mode3.gamma_total / system.mode4.gamma_total, rel=1e-9
        )

    @given(angle=st.floats(min_value=-100.0, max_value=100.0))
    def test_wrap_phase_range(self, angle):
        """Test that wrapped phases land in (-pi, pi] and differ by whole turns."""
        wrapped = wrap_phase(angle)
        assert -math.pi < wrapped <= math.pi
        turns = (angle - wrapped) / (2.0 * math.pi)
        assert turns == pytest.approx(round(turns), abs=1e-9)

    def test_field_state_polar(self):
        """Test polar construction of a field state."""
        state = FieldState.from_polar(4.0, 0.5, 9.0, -0.25)
        assert state.photons == pytest.approx((4.0, 9.0))
        assert state.phases == pytest.approx((0.5, -0.25))
