"""
Two-mode model of the nondegenerate Josephson parametric oscillator.
Holds the physical parameter set and every closed-form prediction of the
quasiclassical theory: thresholds, stability regions, steady-state
intensities, radiation frequencies and phase relations.

All rates are angular frequencies (rad/s) unless a name says otherwise.
"""

import logging
import math
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Any, Dict, Tuple

import numpy as np
from scipy.optimize import brentq

from .exceptions import (
    BelowThresholdError,
    GroundStateOnlyError,
    InversionError,
    ParameterError,
)

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
BOUNDARY_RTOL = 1e-12
MODE_INDICES = (3, 4)


def to_angular(hz: float) -> float:
    """Convert cycles/s to rad/s."""
    return TWO_PI * hz


def to_hz(rad_per_s: float) -> float:
    """Convert rad/s to cycles/s."""
    return rad_per_s / TWO_PI


def wrap_phase(angle):
    """Wrap an angle (or array of angles) into (-pi, pi]."""
    wrapped = math.pi - np.mod(math.pi - np.asarray(angle, dtype=float), TWO_PI)
    # np.mod may round up to exactly 2*pi
    wrapped = np.where(wrapped <= -math.pi, wrapped + TWO_PI, wrapped)
    if np.ndim(wrapped) == 0:
        return float(wrapped)
    return wrapped


def _close(x: float, y: float, scale: float) -> bool:
    return abs(x - y) <= BOUNDARY_RTOL * max(abs(x), abs(y), scale)


@dataclass(frozen=True)
class ModeParams:
    """Parameters of a single resonator mode."""

    omega: float
    gamma_total: float
    gamma_ext: float
    kerr: float

    def __post_init__(self):
        for name in ("omega", "gamma_total", "gamma_ext", "kerr"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ParameterError(f"{name} must be finite, got {value}")
        if self.omega <= 0:
            raise ParameterError(f"omega must be positive, got {self.omega}")
        if self.kerr <= 0:
            raise ParameterError(f"kerr must be positive, got {self.kerr}")
        if not 0 < self.gamma_ext <= self.gamma_total:
            raise ParameterError(
                f"need 0 < gamma_ext <= gamma_total, got gamma_ext={self.gamma_ext}, "
                f"gamma_total={self.gamma_total}"
            )

    @property
    def gamma_int(self) -> float:
        return self.gamma_total - self.gamma_ext

    def scaled(self, factor: float) -> "ModeParams":
        return ModeParams(
            omega=self.omega * factor,
            gamma_total=self.gamma_total * factor,
            gamma_ext=self.gamma_ext * factor,
            kerr=self.kerr * factor,
        )


@dataclass(frozen=True)
class TwoModeSystem:
    """Modes 3 and 4 of the resonator with derived cross-Kerr and effective loss."""

    mode3: ModeParams
    mode4: ModeParams
    cross_kerr: float = field(init=False)
    gamma_eff: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "cross_kerr", math.sqrt(self.mode3.kerr * self.mode4.kerr))
        object.__setattr__(
            self, "gamma_eff", math.sqrt(self.mode3.gamma_total * self.mode4.gamma_total)
        )

    @property
    def gamma_sum(self) -> float:
        return self.mode3.gamma_total + self.mode4.gamma_total

    @property
    def intensity_denominator(self) -> float:
        """alpha_3*Gamma_4 + alpha_4*Gamma_3 + 2*alpha*(Gamma_3 + Gamma_4)."""
        m3, m4 = self.mode3, self.mode4
        return (
            m3.kerr * m4.gamma_total
            + m4.kerr * m3.gamma_total
            + 2.0 * self.cross_kerr * self.gamma_sum
        )

    def mode(self, index: int) -> ModeParams:
        if index == 3:
            return self.mode3
        if index == 4:
            return self.mode4
        raise ParameterError(f"mode index must be 3 or 4, got {index}")

    def scaled(self, factor: float) -> "TwoModeSystem":
        """
        Re-express every rate in another time unit.

        Args:
            factor: Multiplier applied to all rates, e.g. 1e-6 turns rad/s into rad/us

        Returns:
            New TwoModeSystem
        """
        return TwoModeSystem(self.mode3.scaled(factor), self.mode4.scaled(factor))

    def to_dict(self) -> Dict[str, Any]:
        return {"mode3": asdict(self.mode3), "mode4": asdict(self.mode4)}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "TwoModeSystem":
        return cls(ModeParams(**data["mode3"]), ModeParams(**data["mode4"]))


@dataclass(frozen=True)
class PumpDrive:
    """Parametric pump at omega_p = omega_3 + omega_4 + 2*delta."""

    epsilon: float
    delta: float

    def __post_init__(self):
        if not (math.isfinite(self.epsilon) and math.isfinite(self.delta)):
            raise ParameterError(f"pump values must be finite, got {self}")
        if self.epsilon < 0:
            raise ParameterError(f"epsilon must be non-negative, got {self.epsilon}")

    @classmethod
    def in_gamma_units(cls, system: TwoModeSystem, epsilon: float, delta: float) -> "PumpDrive":
        """Build a pump from values given as multiples of Gamma."""
        return cls(epsilon=epsilon * system.gamma_eff, delta=delta * system.gamma_eff)

    def pump_frequency(self, system: TwoModeSystem) -> float:
        return system.mode3.omega + system.mode4.omega + 2.0 * self.delta

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class FieldState:
    """In-resonator amplitudes (A_3, A_4) in the doubly rotating frame."""

    a3: complex = 0j
    a4: complex = 0j

    def __post_init__(self):
        object.__setattr__(self, "a3", complex(self.a3))
        object.__setattr__(self, "a4", complex(self.a4))
        if not all(math.isfinite(v) for v in (self.a3.real, self.a3.imag, self.a4.real, self.a4.imag)):
            raise ParameterError(f"field amplitudes must be finite, got {self}")

    @classmethod
    def from_polar(cls, photons3: float, theta3: float, photons4: float, theta4: float) -> "FieldState":
        return cls(
            a3=math.sqrt(photons3) * complex(math.cos(theta3), math.sin(theta3)),
            a4=math.sqrt(photons4) * complex(math.cos(theta4), math.sin(theta4)),
        )

    @property
    def photons(self) -> Tuple[float, float]:
        return abs(self.a3) ** 2, abs(self.a4) ** 2

    @property
    def phases(self) -> Tuple[float, float]:
        return math.atan2(self.a3.imag, self.a3.real), math.atan2(self.a4.imag, self.a4.real)

    def to_dict(self) -> Dict[str, Any]:
        return {"a3": [self.a3.real, self.a3.imag], "a4": [self.a4.real, self.a4.imag]}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "FieldState":
        return cls(complex(*data["a3"]), complex(*data["a4"]))


@dataclass(frozen=True)
class InjectionTone:
    """
    Coherent input on one mode.

    The detuning is measured from the free-running oscillation frequency of
    the targeted mode (see mode_frequency); amplitude is |B| in sqrt(photons/s).
    """

    mode_index: int
    amplitude: float
    detuning: float = 0.0
    phase: float = 0.0

    def __post_init__(self):
        if self.mode_index not in MODE_INDICES:
            raise ParameterError(f"mode_index must be 3 or 4, got {self.mode_index}")
        if not (math.isfinite(self.amplitude) and self.amplitude >= 0):
            raise ParameterError(f"amplitude must be finite and non-negative, got {self.amplitude}")
        if not (math.isfinite(self.detuning) and math.isfinite(self.phase)):
            raise ParameterError(f"tone detuning and phase must be finite, got {self}")
        object.__setattr__(self, "phase", wrap_phase(self.phase))

    @classmethod
    def from_photons(
        cls,
        system: TwoModeSystem,
        mode_index: int,
        photons: float,
        detuning: float = 0.0,
        phase: float = 0.0,
    ) -> "InjectionTone":
        """Build a tone carrying an average of `photons` coherent input photons."""
        return cls(mode_index, tone_amplitude(system, mode_index, photons), detuning, phase)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


class StabilityRegion(Enum):
    """Regions of the (epsilon, delta) plane."""

    GROUND_ONLY = "I"
    OSCILLATION_ONLY = "II"
    BISTABLE = "III"


def paper_device() -> TwoModeSystem:
    """Device parameters of the measured resonator, in rad/s."""
    return TwoModeSystem(
        mode3=ModeParams(
            omega=to_angular(4.345e9),
            gamma_total=to_angular(0.56e6),
            gamma_ext=to_angular(0.52e6),
            kerr=to_angular(71e3),
        ),
        mode4=ModeParams(
            omega=to_angular(6.150e9),
            gamma_total=to_angular(0.78e6),
            gamma_ext=to_angular(0.70e6),
            kerr=to_angular(178e3),
        ),
    )


def _detunings_from_photons(
    system: TwoModeSystem, delta: float, photons3: float, photons4: float
) -> Tuple[float, float]:
    zeta3 = delta + system.mode3.kerr * photons3 + 2.0 * system.cross_kerr * photons4
    zeta4 = delta + system.mode4.kerr * photons4 + 2.0 * system.cross_kerr * photons3
    return zeta3, zeta4


def kerr_detunings(system: TwoModeSystem, pump: PumpDrive, state: FieldState) -> Tuple[float, float]:
    """
    Nonlinear detunings including the Kerr-induced frequency shifts.

    Args:
        system: Two-mode parameter set
        pump: Pump drive (only delta enters)
        state: Field amplitudes

    Returns:
        (zeta_3, zeta_4) in rad/s
    """
    photons3, photons4 = state.photons
    return _detunings_from_photons(system, pump.delta, photons3, photons4)


def _threshold_ratio(system: TwoModeSystem, epsilon: float) -> float:
    gamma = system.gamma_eff
    if epsilon < gamma and not _close(epsilon, gamma, gamma):
        raise BelowThresholdError(epsilon, gamma)
    return max((epsilon / gamma) ** 2 - 1.0, 0.0)


def threshold_detuning(system: TwoModeSystem, epsilon: float) -> float:
    """
    Half-width of the pump-detuning interval in which the ground state is unstable.

    Raises:
        BelowThresholdError: if epsilon < Gamma
    """
    return 0.5 * system.gamma_sum * math.sqrt(_threshold_ratio(system, epsilon))


def classify_region(system: TwoModeSystem, pump: PumpDrive) -> StabilityRegion:
    """
    Label an operating point with its stability region.

    Boundary points (within 1e-12 relative) go to the region of smaller index.
    """
    gamma = system.gamma_eff
    epsilon, delta = pump.epsilon, pump.delta
    if epsilon < gamma or _close(epsilon, gamma, gamma):
        return StabilityRegion.GROUND_ONLY
    delta_th = threshold_detuning(system, epsilon)
    if delta > delta_th or _close(delta, delta_th, gamma):
        return StabilityRegion.GROUND_ONLY
    if delta > -delta_th or _close(delta, -delta_th, gamma):
        return StabilityRegion.OSCILLATION_ONLY
    return StabilityRegion.BISTABLE


def steady_state_photons(system: TwoModeSystem, pump: PumpDrive) -> Tuple[float, float]:
    """
    Photon numbers of the self-sustained oscillation.

    Args:
        system: Two-mode parameter set
        pump: Pump drive

    Returns:
        (|A_3|^2, |A_4|^2); zero at delta = delta_th

    Raises:
        GroundStateOnlyError: if no oscillating solution exists, including
            epsilon = Gamma itself, which classify_region puts in region I
    """
    gamma = system.gamma_eff
    if pump.epsilon < gamma or _close(pump.epsilon, gamma, gamma):
        raise GroundStateOnlyError(
            f"ground state only: epsilon={pump.epsilon:.6g} rad/s not above Gamma={gamma:.6g} rad/s"
        )
    delta_th = threshold_detuning(system, pump.epsilon)
    if _close(pump.delta, delta_th, gamma):
        return 0.0, 0.0
    if pump.delta > delta_th:
        raise GroundStateOnlyError(
            f"ground state only: delta={pump.delta:.6g} rad/s above delta_th={delta_th:.6g} rad/s"
        )

    gamma3 = system.mode3.gamma_total
    gamma4 = system.mode4.gamma_total
    photons3 = max(2.0 * gamma4 * (delta_th - pump.delta) / system.intensity_denominator, 0.0)
    photons4 = gamma3 / gamma4 * photons3
    return photons3, photons4


def output_flux(system: TwoModeSystem, photons: Tuple[float, float]) -> Tuple[float, float]:
    """Output photon flux |C_n|^2 = 2*Gamma_n0*|A_n|^2 in photons/s."""
    photons3, photons4 = photons
    if photons3 < 0 or photons4 < 0:
        raise ParameterError(f"photon numbers must be non-negative, got {photons}")
    return 2.0 * system.mode3.gamma_ext * photons3, 2.0 * system.mode4.gamma_ext * photons4


def onset_frequency_shift(system: TwoModeSystem, delta: float) -> Tuple[float, float]:
    """Radiation detunings (delta_3, delta_4) at the oscillation onset."""
    gamma3 = system.mode3.gamma_total
    gamma4 = system.mode4.gamma_total
    shift = delta * (gamma3 - gamma4) / (gamma3 + gamma4)
    return shift, -shift


def oscillation_frequency_shift(system: TwoModeSystem, pump: PumpDrive) -> float:
    """
    Radiation detuning Delta_0 of mode 3 above threshold (mode 4 sits at -Delta_0).

    Raises:
        GroundStateOnlyError: if no oscillating solution exists
    """
    photons3, photons4 = steady_state_photons(system, pump)
    zeta3, zeta4 = _detunings_from_photons(system, pump.delta, photons3, photons4)
    gamma3 = system.mode3.gamma_total
    gamma4 = system.mode4.gamma_total
    return (gamma3 * zeta4 - gamma4 * zeta3) / (gamma3 + gamma4)


def mode_frequency(system: TwoModeSystem, pump: PumpDrive, mode_index: int) -> float:
    """Free-running radiation detuning of one mode; 0 when the pump is below threshold."""
    system.mode(mode_index)
    try:
        shift = oscillation_frequency_shift(system, pump)
    except GroundStateOnlyError:
        return 0.0
    return shift if mode_index == 3 else -shift


def phase_sum(system: TwoModeSystem, epsilon: float) -> float:
    """
    Locked phase sum Theta = theta_3 + theta_4, in (pi/2, pi).

    Raises:
        BelowThresholdError: if epsilon <= Gamma
    """
    gamma = system.gamma_eff
    if epsilon <= gamma:
        raise BelowThresholdError(epsilon, gamma)
    return 0.5 * math.pi + math.atan(math.sqrt((epsilon / gamma) ** 2 - 1.0))


def locked_phase(system: TwoModeSystem, epsilon: float, theta_in: float) -> float:
    """Phase of mode 3 locked by a resonant input of phase theta_in."""
    gamma = system.gamma_eff
    if epsilon <= gamma:
        raise BelowThresholdError(epsilon, gamma)
    offset = math.atan(3.0 * gamma / (2.0 * math.sqrt(epsilon**2 - gamma**2)))
    return wrap_phase(theta_in - offset)


def steady_state_field(system: TwoModeSystem, pump: PumpDrive, psi: float = 0.0) -> FieldState:
    """
    Oscillating solution with phases obeying the phase-sum constraint.

    Args:
        system: Two-mode parameter set
        pump: Pump drive above threshold
        psi: Free phase difference theta_3 - theta_4

    Returns:
        FieldState at t = 0 of the oscillating solution
    """
    photons3, photons4 = steady_state_photons(system, pump)
    try:
        theta = phase_sum(system, pump.epsilon)
    except BelowThresholdError as e:
        raise GroundStateOnlyError(f"ground state only: {e}") from e
    return FieldState.from_polar(photons3, 0.5 * (theta + psi), photons4, 0.5 * (theta - psi))


def classical_hamiltonian(system: TwoModeSystem, pump: PumpDrive, state: FieldState) -> float:
    """Rotating-frame energy H/hbar (rad/s) evaluated at classical amplitudes."""
    photons3, photons4 = state.photons
    energy = -(pump.delta * photons3 + 0.5 * system.mode3.kerr * photons3**2)
    energy -= pump.delta * photons4 + 0.5 * system.mode4.kerr * photons4**2
    energy -= 2.0 * system.cross_kerr * photons3 * photons4
    energy -= 2.0 * pump.epsilon * (state.a3 * state.a4).real
    return energy


def input_photon_number(system: TwoModeSystem, tone: InjectionTone) -> float:
    """Average number of coherent input photons <n> = |B|^2 / (2*Gamma_n0)."""
    return tone.amplitude**2 / (2.0 * system.mode(tone.mode_index).gamma_ext)


def tone_amplitude(system: TwoModeSystem, mode_index: int, photons: float) -> float:
    """Input amplitude |B| carrying `photons` average coherent photons."""
    if photons < 0:
        raise ParameterError(f"photon number must be non-negative, got {photons}")
    return math.sqrt(2.0 * system.mode(mode_index).gamma_ext * photons)


def closed_form_slopes(system: TwoModeSystem) -> Tuple[float, float]:
    """
    Slopes of |A_3|^2 and Delta_0 with respect to delta at fixed epsilon.

    Both are independent of epsilon inside the oscillation region.
    """
    gamma3 = system.mode3.gamma_total
    gamma4 = system.mode4.gamma_total
    slope_photons = -2.0 * gamma4 / system.intensity_denominator
    mismatch = system.mode4.kerr * gamma3**2 / gamma4 - system.mode3.kerr * gamma4
    slope_shift = ((gamma3 - gamma4) + slope_photons * mismatch) / (gamma3 + gamma4)
    return slope_photons, slope_shift


def _slope_condition(gamma3: float, gamma4: float, kerr3: float, kerr4: float) -> float:
    """Condition number of the (alpha_3, alpha_4) -> slopes map at a point."""
    kerr3 = max(kerr3, 1e-12 * gamma3)
    kerr4 = max(kerr4, 1e-12 * gamma4)
    nominal = TwoModeSystem(
        ModeParams(1.0, gamma3, gamma3, kerr3), ModeParams(1.0, gamma4, gamma4, kerr4)
    )
    base = np.array(closed_form_slopes(nominal))
    jacobian = np.empty((2, 2))
    for column, (d3, d4) in enumerate(((1e-6 * kerr3, 0.0), (0.0, 1e-6 * kerr4))):
        shifted = TwoModeSystem(
            ModeParams(1.0, gamma3, gamma3, kerr3 + d3), ModeParams(1.0, gamma4, gamma4, kerr4 + d4)
        )
        jacobian[:, column] = (np.array(closed_form_slopes(shifted)) - base) / (d3 + d4)
    return float(np.linalg.cond(jacobian))


def kerr_from_slopes(
    gamma3: float, gamma4: float, slope_photons: float, slope_shift: float
) -> Tuple[float, float]:
    """
    Invert the intensity and frequency-shift slopes for the self-Kerr coefficients.

    Args:
        gamma3: Total loss rate of mode 3
        gamma4: Total loss rate of mode 4
        slope_photons: d|A_3|^2/d(delta), photons per rad/s
        slope_shift: d(Delta_0)/d(delta), dimensionless

    Returns:
        (alpha_3, alpha_4) in rad/s

    Raises:
        InversionError: if no positive pair reproduces the slopes
    """
    if not (math.isfinite(slope_photons) and math.isfinite(slope_shift)) or slope_photons >= 0:
        raise InversionError(
            f"intensity slope must be finite and negative, got {slope_photons}", condition=math.inf
        )

    denominator = -2.0 * gamma4 / slope_photons
    mismatch = ((gamma3 + gamma4) * slope_shift - (gamma3 - gamma4)) / slope_photons

    def kerr4_of(kerr3: float) -> float:
        return (mismatch + kerr3 * gamma4) * gamma4 / gamma3**2

    def residual(kerr3: float) -> float:
        kerr4 = kerr4_of(kerr3)
        cross = math.sqrt(max(kerr3 * kerr4, 0.0))
        return kerr3 * gamma4 + kerr4 * gamma3 + 2.0 * cross * (gamma3 + gamma4) - denominator

    lower = max(0.0, -mismatch / gamma4)
    upper = lower + 2.0 * denominator / gamma4
    if residual(lower) >= 0:
        condition = _slope_condition(gamma3, gamma4, lower, kerr4_of(lower))
        logger.error("Kerr inversion has no positive solution for the given slopes")
        raise InversionError("no positive Kerr pair reproduces the slopes", condition=condition)

    kerr3 = brentq(residual, lower, upper, xtol=1e-15 * upper, rtol=4 * np.finfo(float).eps)
    kerr4 = kerr4_of(kerr3)
    if kerr3 <= 0 or kerr4 <= 0:
        raise InversionError(
            f"inversion gave non-positive Kerr pair ({kerr3:.3g}, {kerr4:.3g})",
            condition=_slope_condition(gamma3, gamma4, kerr3, kerr4),
        )
    return kerr3, kerr4
