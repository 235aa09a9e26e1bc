"""
Time-domain integration of the quasiclassical two-mode equations of motion.
Supports coherent injection tones, additive vacuum-level noise split between
the external and internal loss channels, and 1/f pump-detuning noise.
"""

import cmath
import hashlib
import json
import logging
import math
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy import signal

from .exceptions import GroundStateOnlyError, IntegrationError, ParameterError, StabilityGuardError
from .model import (
    TWO_PI,
    FieldState,
    InjectionTone,
    PumpDrive,
    TwoModeSystem,
    _detunings_from_photons,
    mode_frequency,
    oscillation_frequency_shift,
    steady_state_photons,
)

logger = logging.getLogger(__name__)

STABILITY_LIMIT = 0.1
FLICKER_PER_DECADE = 3
DEFAULT_SEED_AMPLITUDE = 1e-3
TRANSIENT_GAMMA_TIMES = 20.0
TRAJECTORY_COLUMNS = ("t", "re_a3", "im_a3", "re_a4", "im_a4")

Rhs = Callable[[complex, complex, float, float], Tuple[complex, complex]]


@dataclass(frozen=True)
class NoiseConfig:
    """Noise sources of a run and the seed of every random stream."""

    vacuum_noise_on: bool = True
    vacuum_scale: float = 1.0
    flicker_amplitude: float = 0.0
    rng_seed: int = 0

    def __post_init__(self):
        if not (math.isfinite(self.vacuum_scale) and self.vacuum_scale >= 0):
            raise ParameterError(f"vacuum_scale must be non-negative, got {self.vacuum_scale}")
        if not (math.isfinite(self.flicker_amplitude) and self.flicker_amplitude >= 0):
            raise ParameterError(
                f"flicker_amplitude must be non-negative, got {self.flicker_amplitude}"
            )
        if not 0 <= int(self.rng_seed) < 2**64:
            raise ParameterError(f"rng_seed must fit in 64 unsigned bits, got {self.rng_seed}")

    @classmethod
    def noiseless(cls, rng_seed: int = 0) -> "NoiseConfig":
        return cls(vacuum_noise_on=False, vacuum_scale=0.0, flicker_amplitude=0.0, rng_seed=rng_seed)

    @property
    def vacuum_photons(self) -> float:
        """Mean |A_n|^2 that the vacuum noise alone sustains in a mode."""
        return 0.5 * self.vacuum_scale if self.vacuum_noise_on else 0.0

    @property
    def is_noiseless(self) -> bool:
        return (not self.vacuum_noise_on or self.vacuum_scale == 0) and self.flicker_amplitude == 0

    def with_seed(self, rng_seed: int) -> "NoiseConfig":
        return replace(self, rng_seed=int(rng_seed))

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class IntegratorConfig:
    """Step size, run length, recording stride and initial state of one run."""

    dt: float
    duration: float
    record_stride: int = 1
    initial_state: Optional[FieldState] = None
    seed_amplitude: float = DEFAULT_SEED_AMPLITUDE

    def __post_init__(self):
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ParameterError(f"dt must be positive, got {self.dt}")
        if not (math.isfinite(self.duration) and self.duration >= self.dt):
            raise ParameterError(f"duration must be at least one step, got {self.duration}")
        if int(self.record_stride) != self.record_stride or self.record_stride < 1:
            raise ParameterError(f"record_stride must be a positive integer, got {self.record_stride}")
        if self.seed_amplitude < 0:
            raise ParameterError(f"seed_amplitude must be non-negative, got {self.seed_amplitude}")

    @property
    def n_steps(self) -> int:
        return int(round(self.duration / self.dt))

    @property
    def sample_interval(self) -> float:
        return self.dt * self.record_stride

    def to_dict(self) -> Dict[str, Any]:
        return {
            "dt": self.dt,
            "duration": self.duration,
            "record_stride": int(self.record_stride),
            "initial_state": None if self.initial_state is None else self.initial_state.to_dict(),
            "seed_amplitude": self.seed_amplitude,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "IntegratorConfig":
        initial = data.get("initial_state")
        return cls(
            dt=data["dt"],
            duration=data["duration"],
            record_stride=data.get("record_stride", 1),
            initial_state=None if initial is None else FieldState.from_dict(initial),
            seed_amplitude=data.get("seed_amplitude", DEFAULT_SEED_AMPLITUDE),
        )


@dataclass(frozen=True)
class NoiseStream:
    """Per-step noise increments: complex (2, N) per channel and the real flicker series."""

    external: np.ndarray
    internal: np.ndarray
    flicker: np.ndarray

    @property
    def total(self) -> np.ndarray:
        return self.external + self.internal


@dataclass
class Trajectory:
    """Recorded field amplitudes with the provenance needed to reproduce them."""

    times: np.ndarray
    a3: np.ndarray
    a4: np.ndarray
    provenance: Dict[str, Any]

    def __len__(self) -> int:
        return len(self.times)

    @property
    def sample_interval(self) -> float:
        return float(self.times[1] - self.times[0]) if len(self.times) > 1 else 0.0

    @property
    def final_state(self) -> FieldState:
        return FieldState(self.a3[-1], self.a4[-1])

    def field(self, mode_index: int) -> np.ndarray:
        if mode_index == 3:
            return self.a3
        if mode_index == 4:
            return self.a4
        raise ParameterError(f"mode index must be 3 or 4, got {mode_index}")

    def photons(self) -> Tuple[np.ndarray, np.ndarray]:
        return np.abs(self.a3) ** 2, np.abs(self.a4) ** 2

    def segment(self, after: float) -> "Trajectory":
        """Drop samples earlier than `after` (seconds from the start)."""
        mask = self.times - self.times[0] >= after
        provenance = dict(self.provenance, segment_start=float(after))
        return Trajectory(self.times[mask], self.a3[mask], self.a4[mask], provenance)

    def provenance_hash(self) -> str:
        digest = hashlib.sha256()
        for array in (self.times, self.a3, self.a4):
            digest.update(np.ascontiguousarray(array).tobytes())
        return digest.hexdigest()

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "t": self.times,
                "re_a3": self.a3.real,
                "im_a3": self.a3.imag,
                "re_a4": self.a4.real,
                "im_a4": self.a4.imag,
            },
            columns=list(TRAJECTORY_COLUMNS),
        )

    def save(self, path: Union[str, Path]) -> Path:
        """
        Write the trajectory as CSV (with a provenance header) or as .npz.

        Args:
            path: Target file; the suffix selects the format

        Returns:
            Path to the written file
        """
        path = Path(path)
        try:
            if path.suffix == ".npz":
                np.savez(
                    path,
                    times=self.times,
                    a3=self.a3,
                    a4=self.a4,
                    provenance=np.array(json.dumps(self.provenance, sort_keys=True)),
                )
            else:
                with open(path, "w", newline="") as handle:
                    handle.write("# njpo trajectory\n")
                    handle.write(f"# provenance: {json.dumps(self.provenance, sort_keys=True)}\n")
                    handle.write(f"# sha256: {self.provenance_hash()}\n")
                    self.to_frame().to_csv(handle, index=False, float_format="%.17g")
            logger.info(f"Saved trajectory with {len(self)} samples to {path}")
            return path
        except OSError as e:
            logger.error(f"Error saving trajectory to {path}: {e}")
            raise

    @classmethod
    def load(cls, path: Union[str, Path]) -> "Trajectory":
        path = Path(path)
        if path.suffix == ".npz":
            with np.load(path, allow_pickle=False) as data:
                return cls(
                    data["times"], data["a3"], data["a4"], json.loads(str(data["provenance"]))
                )
        provenance: Dict[str, Any] = {}
        with open(path) as handle:
            for line in handle:
                if not line.startswith("#"):
                    break
                if line.startswith("# provenance: "):
                    provenance = json.loads(line[len("# provenance: "):])
        frame = pd.read_csv(path, comment="#", float_precision="round_trip")
        return cls(
            frame["t"].to_numpy(),
            frame["re_a3"].to_numpy() + 1j * frame["im_a3"].to_numpy(),
            frame["re_a4"].to_numpy() + 1j * frame["im_a4"].to_numpy(),
            provenance,
        )


def default_transient(system: TwoModeSystem) -> float:
    """Settling time discarded before analysis, 20/Gamma."""
    return TRANSIENT_GAMMA_TIMES / system.gamma_eff


def _drive_terms(
    system: TwoModeSystem, pump: PumpDrive, tones: Sequence[InjectionTone], mode_index: int
) -> List[Tuple[complex, float]]:
    terms = []
    for tone in tones:
        if tone.mode_index != mode_index or tone.amplitude == 0:
            continue
        gamma_ext = system.mode(mode_index).gamma_ext
        coeff = -1j * math.sqrt(2.0 * gamma_ext) * tone.amplitude * cmath.exp(1j * tone.phase)
        carrier = mode_frequency(system, pump, mode_index) + tone.detuning
        terms.append((coeff, carrier))
    return terms


def _build_rhs(system: TwoModeSystem, pump: PumpDrive, tones: Sequence[InjectionTone]) -> Rhs:
    gamma3 = system.mode3.gamma_total
    gamma4 = system.mode4.gamma_total
    kerr3 = system.mode3.kerr
    kerr4 = system.mode4.kerr
    cross2 = 2.0 * system.cross_kerr
    ieps = 1j * pump.epsilon
    drives3 = _drive_terms(system, pump, tones, 3)
    drives4 = _drive_terms(system, pump, tones, 4)

    def rhs(a3: complex, a4: complex, t: float, delta: float) -> Tuple[complex, complex]:
        n3 = a3.real * a3.real + a3.imag * a3.imag
        n4 = a4.real * a4.real + a4.imag * a4.imag
        d3 = complex(-gamma3, delta + kerr3 * n3 + cross2 * n4) * a3 + ieps * a4.conjugate()
        d4 = complex(-gamma4, delta + kerr4 * n4 + cross2 * n3) * a4 + ieps * a3.conjugate()
        for coeff, carrier in drives3:
            d3 += coeff * cmath.exp(-1j * carrier * t)
        for coeff, carrier in drives4:
            d4 += coeff * cmath.exp(-1j * carrier * t)
        return d3, d4

    return rhs


def drift(
    system: TwoModeSystem,
    pump: PumpDrive,
    tones: Sequence[InjectionTone],
    state: FieldState,
    t: float,
) -> Tuple[complex, complex]:
    """
    Deterministic right-hand side dA/dt of the equations of motion.

    Args:
        system: Two-mode parameter set
        pump: Pump drive
        tones: Injection tones (may be empty)
        state: Field amplitudes
        t: Time in the rotating frame (s)

    Returns:
        (dA_3/dt, dA_4/dt)
    """
    rhs = _build_rhs(system, pump, tones)
    return rhs(state.a3, state.a4, t, pump.delta)


def steady_state_residual(
    system: TwoModeSystem, pump: PumpDrive, state: FieldState
) -> Tuple[complex, complex]:
    """Drift seen from the frame co-rotating with the free oscillation."""
    d3, d4 = drift(system, pump, (), state, 0.0)
    shift = oscillation_frequency_shift(system, pump)
    return d3 + 1j * shift * state.a3, d4 - 1j * shift * state.a4


def _fastest_rate(
    system: TwoModeSystem, pump: PumpDrive, tones: Sequence[InjectionTone], initial: FieldState
) -> float:
    rates = [system.mode3.gamma_total, system.mode4.gamma_total, pump.epsilon]
    photons3, photons4 = initial.photons
    rates.extend(abs(z) for z in _detunings_from_photons(system, pump.delta, photons3, photons4))
    try:
        photons3, photons4 = steady_state_photons(system, pump)
        rates.extend(abs(z) for z in _detunings_from_photons(system, pump.delta, photons3, photons4))
    except GroundStateOnlyError:
        pass
    for tone in tones:
        rates.append(abs(mode_frequency(system, pump, tone.mode_index) + tone.detuning))
    return max(rates)


def check_stability(
    system: TwoModeSystem,
    pump: PumpDrive,
    tones: Sequence[InjectionTone],
    cfg: IntegratorConfig,
    initial: Optional[FieldState] = None,
) -> None:
    """
    Reject step sizes with dt * max(rate) >= 0.1.

    Raises:
        StabilityGuardError: if the step is too large
    """
    rate = _fastest_rate(system, pump, tones, initial or cfg.initial_state or FieldState())
    if cfg.dt * rate >= STABILITY_LIMIT:
        raise StabilityGuardError(
            f"dt={cfg.dt:.3g} too large for fastest rate {rate:.3g}; "
            f"need dt < {STABILITY_LIMIT / rate:.3g}"
        )


def _flicker_series(
    amplitude: float, n_steps: int, dt: float, rng: np.random.Generator
) -> np.ndarray:
    f_low = 1.0 / (n_steps * dt)
    f_high = 1.0 / (10.0 * dt)
    if f_high <= f_low:
        logger.warning("Run too short for a flicker band; flicker series left at zero")
        return np.zeros(n_steps)

    n_corners = int(math.floor(FLICKER_PER_DECADE * math.log10(f_high / f_low))) + 1
    corners = f_low * 10.0 ** (np.arange(n_corners) / FLICKER_PER_DECADE)
    # equal variance per OU term gives a one-sided spectrum of amplitude/f in band
    variance = amplitude * math.log(10.0) / FLICKER_PER_DECADE

    series = np.zeros(n_steps)
    for corner in corners:
        decay = math.exp(-TWO_PI * corner * dt)
        kick = math.sqrt(variance * (1.0 - decay**2))
        start = math.sqrt(variance) * rng.standard_normal()
        ou, _ = signal.lfilter([kick], [1.0, -decay], rng.standard_normal(n_steps), zi=[decay * start])
        series += ou
    return series


def _complex_normal(rng: np.random.Generator, shape: Tuple[int, ...]) -> np.ndarray:
    pairs = rng.standard_normal(shape + (2,))
    return pairs[..., 0] + 1j * pairs[..., 1]


def _substreams(rng_seed: int) -> List[np.random.Generator]:
    children = np.random.SeedSequence(int(rng_seed)).spawn(4)
    return [np.random.default_rng(child) for child in children]


def generate_noise_stream(
    noise: NoiseConfig, system: TwoModeSystem, n_steps: int, dt: float
) -> NoiseStream:
    """
    Draw the noise increments of a run.

    Each mode receives complex Gaussian increments with total variance
    Gamma_n * vacuum_scale * dt (half per quadrature), split between the
    external and internal channels in proportion Gamma_n0 : Gamma_n - Gamma_n0.

    Args:
        noise: Noise configuration (flags, strengths, seed)
        system: Two-mode parameter set (supplies the loss rates)
        n_steps: Number of integration steps
        dt: Step size (s)

    Returns:
        NoiseStream with external/internal increments and the flicker series
    """
    ext_rng, int_rng, flicker_rng, _ = _substreams(noise.rng_seed)
    external = np.zeros((2, n_steps), dtype=complex)
    internal = np.zeros((2, n_steps), dtype=complex)

    if noise.vacuum_noise_on and noise.vacuum_scale > 0:
        modes = (system.mode3, system.mode4)
        ext_var = np.array([m.gamma_ext for m in modes]) * noise.vacuum_scale * dt
        int_var = np.array([m.gamma_int for m in modes]) * noise.vacuum_scale * dt
        external = _complex_normal(ext_rng, (2, n_steps)) * np.sqrt(ext_var / 2.0)[:, None]
        internal = _complex_normal(int_rng, (2, n_steps)) * np.sqrt(int_var / 2.0)[:, None]

    if noise.flicker_amplitude > 0:
        flicker = _flicker_series(noise.flicker_amplitude, n_steps, dt, flicker_rng)
    else:
        flicker = np.zeros(n_steps)

    return NoiseStream(external=external, internal=internal, flicker=flicker)


def seed_state(rng_seed: int, amplitude: float = DEFAULT_SEED_AMPLITUDE) -> FieldState:
    """Small random initial amplitudes that break the unstable ground state."""
    rng = _substreams(rng_seed)[3]
    theta3, theta4 = rng.uniform(-math.pi, math.pi, size=2)
    return FieldState(
        amplitude * cmath.exp(1j * theta3), amplitude * cmath.exp(1j * theta4)
    )


def _provenance(
    system: TwoModeSystem,
    pump: PumpDrive,
    tones: Sequence[InjectionTone],
    noise: NoiseConfig,
    cfg: IntegratorConfig,
) -> Dict[str, Any]:
    return {
        "system": system.to_dict(),
        "pump": pump.to_dict(),
        "tones": [tone.to_dict() for tone in tones],
        "noise": noise.to_dict(),
        "integrator": cfg.to_dict(),
        "seed": int(noise.rng_seed),
    }


def integrate(
    system: TwoModeSystem,
    pump: PumpDrive,
    tones: Sequence[InjectionTone],
    noise: NoiseConfig,
    cfg: IntegratorConfig,
) -> Trajectory:
    """
    Integrate the equations of motion.

    The deterministic part advances with a classical 4th-order Runge-Kutta
    step; noise increments are added after each step (additive noise).

    Args:
        system: Two-mode parameter set
        pump: Pump drive
        tones: Injection tones (may be empty)
        noise: Noise configuration including the seed
        cfg: Integrator settings

    Returns:
        Trajectory sampled every `record_stride` steps, including t = 0

    Raises:
        StabilityGuardError: if dt violates the stability guard
        IntegrationError: if a non-finite state appears
    """
    tones = tuple(tones or ())
    initial = cfg.initial_state or seed_state(noise.rng_seed, cfg.seed_amplitude)
    check_stability(system, pump, tones, cfg, initial)

    n_steps = cfg.n_steps
    stride = int(cfg.record_stride)
    dt = cfg.dt
    half = 0.5 * dt
    sixth = dt / 6.0

    stream = generate_noise_stream(noise, system, n_steps, dt)
    noisy = noise.vacuum_noise_on and noise.vacuum_scale > 0
    kicks3 = stream.total[0].tolist() if noisy else None
    kicks4 = stream.total[1].tolist() if noisy else None
    detunings = (pump.delta + stream.flicker).tolist() if noise.flicker_amplitude > 0 else None

    rhs = _build_rhs(system, pump, tones)
    n_records = n_steps // stride + 1
    out3 = np.empty(n_records, dtype=complex)
    out4 = np.empty(n_records, dtype=complex)
    a3 = complex(initial.a3)
    a4 = complex(initial.a4)
    out3[0], out4[0] = a3, a4
    delta = pump.delta

    logger.info(
        f"Integrating {n_steps} steps (dt={dt:.3g}, stride={stride}, seed={noise.rng_seed}, "
        f"tones={len(tones)})"
    )
    for k in range(n_steps):
        t = k * dt
        if detunings is not None:
            delta = detunings[k]
        k1a, k1b = rhs(a3, a4, t, delta)
        k2a, k2b = rhs(a3 + half * k1a, a4 + half * k1b, t + half, delta)
        k3a, k3b = rhs(a3 + half * k2a, a4 + half * k2b, t + half, delta)
        k4a, k4b = rhs(a3 + dt * k3a, a4 + dt * k3b, t + dt, delta)
        a3 += sixth * (k1a + 2.0 * k2a + 2.0 * k3a + k4a)
        a4 += sixth * (k1b + 2.0 * k2b + 2.0 * k3b + k4b)
        if kicks3 is not None:
            a3 += kicks3[k]
            a4 += kicks4[k]
        if not (cmath.isfinite(a3) and cmath.isfinite(a4)):
            logger.error(f"Non-finite field amplitude at step {k + 1} of {n_steps}")
            raise IntegrationError("non-finite field amplitude", step=k + 1)
        if (k + 1) % stride == 0:
            j = (k + 1) // stride
            out3[j] = a3
            out4[j] = a4

    times = np.arange(n_records) * (stride * dt)
    provenance = _provenance(system, pump, tones, noise, cfg)
    return Trajectory(times=times, a3=out3, a4=out4, provenance=provenance)


def integrate_from_provenance(provenance: Dict[str, Any]) -> Trajectory:
    """Re-run a trajectory from its provenance block."""
    return integrate(
        TwoModeSystem.from_dict(provenance["system"]),
        PumpDrive(**provenance["pump"]),
        [InjectionTone(**tone) for tone in provenance["tones"]],
        NoiseConfig(**provenance["noise"]),
        IntegratorConfig.from_dict(provenance["integrator"]),
    )
