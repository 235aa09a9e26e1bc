"""
Experiment orchestration.
Expands parameter grids, runs grid points through a bounded worker pool
and collects per-point records, stacked spectra and summary tables for the
stability map, pump ramp, injection locking, synchronization and Kerr
extraction experiments.

Sweep axes `epsilon`, `delta` and `signal_detuning` are in multiples of
Gamma; `photons` is the mean input photon number <n>.
"""

import itertools
import logging
import math
import time
from dataclasses import dataclass, field, replace
from datetime import datetime
from multiprocessing import Pool
from typing import TYPE_CHECKING, Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from .dynamics import (
    IntegratorConfig,
    NoiseConfig,
    Trajectory,
    default_transient,
    integrate,
)
from .exceptions import (
    FitError,
    GroundStateOnlyError,
    InsufficientDataError,
    NJPOError,
    NoLineFoundError,
    ParameterError,
)
from .model import (
    FieldState,
    InjectionTone,
    PumpDrive,
    StabilityRegion,
    TwoModeSystem,
    classify_region,
    closed_form_slopes,
    kerr_from_slopes,
    locked_phase,
    mode_frequency,
    onset_frequency_shift,
    oscillation_frequency_shift,
    output_flux,
    phase_sum,
    steady_state_field,
    steady_state_photons,
    threshold_detuning,
    to_hz,
    wrap_phase,
)
from .signal_analysis import (
    PhaseDiffusion,
    Quadratures,
    SpectralDensity,
    angular_uniformity,
    classify_idlers,
    cross_quadrature_histogram,
    demodulate,
    detect_peaks,
    emission_frequency,
    fit_sqrt_law,
    frequency_noise_spectrum,
    linewidth,
    low_pass,
    phase_diffusion,
    phase_series,
    phase_space_histogram,
    phase_statistics,
    photon_spectral_density,
)

if TYPE_CHECKING:
    from ..utils.run_monitor import RunMonitor

logger = logging.getLogger(__name__)

AXIS_NAMES = ("epsilon", "delta", "photons", "signal_detuning")
DEFAULT_EPSILON = 3.0
DEFAULT_DELTA = 0.0
DEFAULT_RAMP_DELTA = 0.26
ONSET_GROWTH_FLOOR = 1e-2
PHASE_HISTOGRAM_BINS = 36
PHASE_SPACE_BINS = 64
DETECTION_BANDWIDTH_GAMMA = 0.25
UNIFORM_PHASE_STD = math.pi / math.sqrt(3.0)
DECORRELATED_BINS = 12


@dataclass(frozen=True)
class SweepAxis:
    """One named grid axis."""

    name: str
    minimum: float
    maximum: float
    points: int
    scale: str = "linear"

    def __post_init__(self):
        if self.name not in AXIS_NAMES:
            raise ParameterError(f"unknown sweep axis {self.name!r}; expected one of {AXIS_NAMES}")
        if int(self.points) != self.points or self.points < 1:
            raise ParameterError(f"axis {self.name}: points must be a positive integer, got {self.points}")
        if self.scale not in ("linear", "log"):
            raise ParameterError(f"axis {self.name}: scale must be linear or log, got {self.scale!r}")
        if self.scale == "log" and (self.minimum <= 0 or self.maximum <= 0):
            raise ParameterError(f"axis {self.name}: log axes need positive bounds")
        if self.points == 1 and self.minimum != self.maximum:
            raise ParameterError(f"axis {self.name}: a single point needs min == max")

    def values(self) -> np.ndarray:
        if self.points == 1:
            return np.array([float(self.minimum)])
        if self.scale == "log":
            return np.geomspace(self.minimum, self.maximum, int(self.points))
        return np.linspace(self.minimum, self.maximum, int(self.points))

    @property
    def step(self) -> float:
        if self.points < 2:
            return 0.0
        if self.scale == "log":
            return float(np.log(self.maximum / self.minimum) / (self.points - 1))
        return float((self.maximum - self.minimum) / (self.points - 1))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "minimum": self.minimum,
            "maximum": self.maximum,
            "points": int(self.points),
            "scale": self.scale,
        }


@dataclass(frozen=True)
class SweepSpec:
    """
    Parameter grid of an experiment.

    Grid points expand row-major in the declared axis order; the first
    axis varies slowest.
    """

    axes: Tuple[SweepAxis, ...] = ()
    trajectories: int = 1
    master_seed: int = 0
    analyses: Tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "axes", tuple(self.axes))
        object.__setattr__(self, "analyses", tuple(self.analyses))
        names = [axis.name for axis in self.axes]
        if len(set(names)) != len(names):
            raise ParameterError(f"duplicate sweep axes: {names}")
        if int(self.trajectories) != self.trajectories or self.trajectories < 1:
            raise ParameterError(f"trajectories must be a positive integer, got {self.trajectories}")
        if not 0 <= int(self.master_seed) < 2**64:
            raise ParameterError(f"master seed must fit in 64 unsigned bits, got {self.master_seed}")

    @property
    def names(self) -> List[str]:
        return [axis.name for axis in self.axes]

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(int(axis.points) for axis in self.axes)

    def axis(self, name: str) -> Optional[SweepAxis]:
        for axis in self.axes:
            if axis.name == name:
                return axis
        return None

    def expand(self) -> List[Dict[str, float]]:
        """All grid points as coordinate dicts, row-major."""
        if not self.axes:
            return [{}]
        grids = [axis.values() for axis in self.axes]
        return [
            {name: float(value) for name, value in zip(self.names, combo)}
            for combo in itertools.product(*grids)
        ]

    def seeds(self, grid_index: int) -> List[int]:
        """Per-trajectory seeds of a grid point; the first is master_seed XOR grid_index."""
        base = int(self.master_seed) ^ int(grid_index)
        seeds = [base]
        for trajectory in range(1, int(self.trajectories)):
            state = np.random.SeedSequence([base, trajectory]).generate_state(2, np.uint32)
            seeds.append(int(state[0]) | (int(state[1]) << 32))
        return seeds

    def wants(self, analysis: str) -> bool:
        return not self.analyses or analysis in self.analyses

    def with_axes(self, *axes: SweepAxis) -> "SweepSpec":
        return replace(self, axes=tuple(axes))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "axes": [axis.to_dict() for axis in self.axes],
            "trajectories": int(self.trajectories),
            "master_seed": int(self.master_seed),
            "analyses": list(self.analyses),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SweepSpec":
        return cls(
            axes=tuple(SweepAxis(**axis) for axis in data.get("axes", [])),
            trajectories=data.get("trajectories", 1),
            master_seed=data.get("master_seed", 0),
            analyses=tuple(data.get("analyses", ())),
        )


@dataclass(frozen=True)
class SimulationSettings:
    """Device, noise and integrator settings shared by all points of an experiment."""

    system: TwoModeSystem
    noise: NoiseConfig
    integrator: IntegratorConfig
    transient: Optional[float] = None

    @property
    def transient_time(self) -> float:
        return default_transient(self.system) if self.transient is None else self.transient

    def noiseless(self) -> "SimulationSettings":
        return replace(self, noise=NoiseConfig.noiseless(self.noise.rng_seed))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "system": self.system.to_dict(),
            "noise": self.noise.to_dict(),
            "integrator": self.integrator.to_dict(),
            "transient": self.transient,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SimulationSettings":
        return cls(
            system=TwoModeSystem.from_dict(data["system"]),
            noise=NoiseConfig(**data["noise"]),
            integrator=IntegratorConfig.from_dict(data["integrator"]),
            transient=data.get("transient"),
        )


@dataclass
class ExperimentResult:
    """One record per grid point, plus stacked spectra, summary tables and provenance."""

    name: str
    axes: List[str]
    records: List[Dict[str, Any]]
    provenance: Dict[str, Any]
    spectra: Dict[str, Any] = field(default_factory=dict)
    summary: Dict[str, Any] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.records)

    @property
    def failures(self) -> List[Dict[str, Any]]:
        return [record for record in self.records if not record.get("success", False)]

    def column(self, key: str) -> np.ndarray:
        return np.array([record.get(key, np.nan) for record in self.records], dtype=float)

    def to_frame(self) -> pd.DataFrame:
        """Scalar columns of every record, in grid order."""
        rows = []
        for record in self.records:
            rows.append(
                {
                    key: value
                    for key, value in record.items()
                    if value is None or isinstance(value, (bool, int, float, str, np.generic))
                }
            )
        return pd.DataFrame(rows)


# ---------------------------------------------------------------------------
# Worker pool
# ---------------------------------------------------------------------------


def _run_point(job: Tuple[Callable, SimulationSettings, Dict[str, float], List[int], Dict[str, Any], int]):
    point_fn, settings, coords, seeds, params, index = job
    started = time.perf_counter()
    record: Dict[str, Any] = {"index": index, **coords, "seed": seeds[0]}
    try:
        record.update(point_fn(settings, coords, seeds, **params))
        record["success"] = True
    except NJPOError as e:
        record.update({"success": False, "error": str(e), "error_type": type(e).__name__})
    except (ValueError, ArithmeticError, np.linalg.LinAlgError) as e:
        record.update({"success": False, "error": str(e), "error_type": type(e).__name__})
    record["elapsed"] = time.perf_counter() - started
    return record


def _execute(
    name: str,
    point_fn: Callable,
    settings: SimulationSettings,
    sweep: SweepSpec,
    params: Dict[str, Any],
    workers: int = 1,
    monitor: Optional["RunMonitor"] = None,
) -> List[Dict[str, Any]]:
    points = sweep.expand()
    jobs = [
        (point_fn, settings, coords, sweep.seeds(index), params, index)
        for index, coords in enumerate(points)
    ]
    logger.info(f"Running {name}: {len(jobs)} grid point(s) on {max(workers, 1)} worker(s)")

    records = []
    if workers <= 1 or len(jobs) <= 1:
        results = map(_run_point, jobs)
        for record in results:
            records.append(_collect(name, record, monitor))
    else:
        with Pool(processes=min(workers, len(jobs))) as pool:
            for record in pool.imap(_run_point, jobs):
                records.append(_collect(name, record, monitor))

    failed = sum(1 for record in records if not record["success"])
    if failed:
        logger.warning(f"{name}: {failed} of {len(records)} grid point(s) failed")
    return records


def _collect(name: str, record: Dict[str, Any], monitor: Optional["RunMonitor"]) -> Dict[str, Any]:
    if not record["success"]:
        logger.error(f"{name} point {record['index']} failed: {record['error_type']}: {record['error']}")
    if monitor is not None:
        monitor.log_task(name, record)
    return record


def _provenance(
    name: str, settings: SimulationSettings, sweep: SweepSpec, params: Dict[str, Any]
) -> Dict[str, Any]:
    return {
        "experiment": name,
        "settings": settings.to_dict(),
        "sweep": sweep.to_dict(),
        "parameters": dict(params),
        "created_at": datetime.now().isoformat(),
    }


def _pop_arrays(records: List[Dict[str, Any]], key: str) -> List[Any]:
    return [record.pop(key, None) for record in records]


def _stack(rows: List[Optional[np.ndarray]]) -> Optional[np.ndarray]:
    """Stack per-point arrays, padding failed points with NaN rows."""
    template = next((row for row in rows if row is not None), None)
    if template is None:
        return None
    filler = np.full_like(np.asarray(template, dtype=float), np.nan)
    return np.vstack([filler if row is None else row for row in rows])


# ---------------------------------------------------------------------------
# Shared per-point helpers
# ---------------------------------------------------------------------------


def _pump(settings: SimulationSettings, epsilon: float, delta: float) -> PumpDrive:
    return PumpDrive.in_gamma_units(settings.system, epsilon, delta)


def _simulate(
    settings: SimulationSettings,
    pump: PumpDrive,
    tones: Sequence[InjectionTone],
    seed: int,
    initial: Optional[FieldState] = None,
) -> Trajectory:
    integrator = settings.integrator
    if initial is not None:
        integrator = replace(integrator, initial_state=initial)
    return integrate(settings.system, pump, tones, settings.noise.with_seed(seed), integrator)


def _settled(settings: SimulationSettings, trajectory: Trajectory) -> Trajectory:
    settled = trajectory.segment(settings.transient_time)
    if len(settled) < 2:
        span = float(trajectory.times[-1] - trajectory.times[0])
        logger.warning(
            f"Run of {span:.3g} shorter than the transient {settings.transient_time:.3g}; "
            "analysing its second half"
        )
        settled = trajectory.segment(0.5 * span)
    return settled


def _mean_photons(settings: SimulationSettings, trajectory: Trajectory) -> Tuple[float, float]:
    """Time-averaged photon numbers with the vacuum half-photon of symmetric ordering removed."""
    photons3, photons4 = trajectory.photons()
    vacuum = settings.noise.vacuum_photons
    return float(photons3.mean()) - vacuum, float(photons4.mean()) - vacuum


def _average_psd(spectra: List[SpectralDensity]) -> SpectralDensity:
    first = spectra[0]
    if len(spectra) == 1:
        return first
    return SpectralDensity(
        frequencies=first.frequencies,
        values=np.mean([psd.values for psd in spectra], axis=0),
        resolution_bandwidth=first.resolution_bandwidth,
        averaging_count=sum(psd.averaging_count for psd in spectra),
        mode_index=first.mode_index,
        source_hash=first.source_hash,
    )


def _ratio(numerator: float, denominator: float) -> float:
    if not (math.isfinite(numerator) and math.isfinite(denominator)) or denominator <= 0:
        return math.nan
    return numerator / denominator


def _detected(system: TwoModeSystem, quadratures: Quadratures) -> Quadratures:
    """Quadratures limited to the detection bandwidth used for quadrature correlations."""
    cutoff = DETECTION_BANDWIDTH_GAMMA * to_hz(system.gamma_eff)
    if cutoff >= 0.5 * quadratures.sample_rate:
        return quadratures
    try:
        return low_pass(quadratures, cutoff)
    except InsufficientDataError as e:
        logger.warning(f"Correlations taken without detection filter: {e}")
        return quadratures


def _phase_uniformity(theta: np.ndarray, sample_rate: float) -> float:
    """Uniformity p-value on samples spaced by the lag over which the phase spreads by pi^2 rad^2."""
    cap = max(len(theta) // (5 * DECORRELATED_BINS), 1)
    try:
        rate = phase_diffusion(theta, sample_rate).rate
    except InsufficientDataError:
        rate = 0.0
    stride = cap if rate <= 0 else min(math.ceil(math.pi**2 * sample_rate / rate), cap)
    return angular_uniformity(theta, bins=DECORRELATED_BINS, stride=max(stride, 1))


def _line(psd: SpectralDensity) -> Dict[str, Any]:
    try:
        line = linewidth(psd)
        return {
            "center_hz": line.center,
            "linewidth_hz": line.width,
            "below_resolution": line.below_resolution,
        }
    except NoLineFoundError:
        return {"center_hz": math.nan, "linewidth_hz": math.nan, "below_resolution": False}


# ---------------------------------------------------------------------------
# Closed-form table and single runs
# ---------------------------------------------------------------------------


def _closed_form_point(settings, coords, seeds, epsilon=DEFAULT_EPSILON, delta=DEFAULT_DELTA):
    system = settings.system
    pump = _pump(settings, coords.get("epsilon", epsilon), coords.get("delta", delta))
    record: Dict[str, Any] = {"region": classify_region(system, pump).value}
    try:
        record["delta_threshold_hz"] = to_hz(threshold_detuning(system, pump.epsilon))
        record["phase_sum"] = phase_sum(system, pump.epsilon)
    except NJPOError:
        record["delta_threshold_hz"] = math.nan
        record["phase_sum"] = math.nan
    onset3, onset4 = onset_frequency_shift(system, pump.delta)
    record["onset_shift3_hz"] = to_hz(onset3)
    record["onset_shift4_hz"] = to_hz(onset4)
    try:
        photons = steady_state_photons(system, pump)
        record["shift_hz"] = to_hz(oscillation_frequency_shift(system, pump))
    except GroundStateOnlyError:
        photons = (0.0, 0.0)
        record["shift_hz"] = math.nan
    flux3, flux4 = output_flux(system, photons)
    record.update(photons3=photons[0], photons4=photons[1], flux3=flux3, flux4=flux4)
    return record


def steady_state_table(
    settings: SimulationSettings,
    sweep: Optional[SweepSpec] = None,
    workers: int = 1,
    monitor: Optional["RunMonitor"] = None,
    epsilon: float = DEFAULT_EPSILON,
    delta: float = DEFAULT_DELTA,
) -> ExperimentResult:
    """
    Closed-form predictions on a grid (or at a single operating point).

    Args:
        settings: Simulation settings (only the device is used)
        sweep: Grid over epsilon and/or delta; a single point when omitted
        workers: Ignored beyond bookkeeping; closed forms are evaluated in-process
        monitor: Optional RunMonitor
        epsilon: Pump strength (multiples of Gamma) when not swept
        delta: Pump detuning (multiples of Gamma) when not swept

    Returns:
        ExperimentResult with region, threshold detuning, photon numbers,
        output fluxes and radiation shifts per point
    """
    sweep = sweep or SweepSpec()
    params = {"epsilon": epsilon, "delta": delta}
    records = _execute("steady-state", _closed_form_point, settings, sweep, params, 1, monitor)
    return ExperimentResult("steady-state", sweep.names, records, _provenance("steady-state", settings, sweep, params))


def _single_run_point(settings, coords, seeds, epsilon=DEFAULT_EPSILON, delta=DEFAULT_DELTA, tones=()):
    system = settings.system
    pump = _pump(settings, coords.get("epsilon", epsilon), coords.get("delta", delta))
    tone_objects = tuple(InjectionTone(**tone) for tone in tones)
    trajectory = _simulate(settings, pump, tone_objects, seeds[0])
    settled = _settled(settings, trajectory)
    photons3, photons4 = _mean_photons(settings, settled)
    flux3, flux4 = output_flux(system, (photons3, photons4))
    record: Dict[str, Any] = {
        "photons3": photons3,
        "photons4": photons4,
        "flux3": flux3,
        "flux4": flux4,
        "trajectory_hash": trajectory.provenance_hash(),
        "_trajectory": trajectory,
    }
    quadratures = {}
    thetas = {}
    for index in (3, 4):
        quadratures[index] = demodulate(settled, index, mode_frequency(system, pump, index))
        psd = photon_spectral_density(quadratures[index])
        record[f"_psd{index}"] = psd
        line = _line(psd)
        record[f"linewidth{index}_hz"] = line["linewidth_hz"]
        record[f"below_resolution{index}"] = line["below_resolution"]
        try:
            record[f"emission{index}_hz"] = to_hz(emission_frequency(quadratures[index]))
            thetas[index] = phase_series(quadratures[index])
            stats = phase_statistics(wrap_phase(thetas[index]))
            record[f"phase_std{index}"] = stats.std
            record[f"phase_mean{index}"] = stats.mean
            record[f"uniformity_p{index}"] = _phase_uniformity(thetas[index], quadratures[index].sample_rate)
        except NJPOError as e:
            logger.warning(f"Phase analysis of mode {index} skipped: {e}")
            record[f"emission{index}_hz"] = math.nan
            record[f"phase_std{index}"] = math.nan
            record[f"phase_mean{index}"] = math.nan
            record[f"uniformity_p{index}"] = math.nan
        record[f"freq_noise_flicker{index}"] = math.nan
        record[f"freq_noise_white{index}"] = math.nan
        if index in thetas:
            try:
                noise_psd, noise_fit = frequency_noise_spectrum(thetas[index], quadratures[index].sample_rate)
                record[f"_fnoise{index}"] = noise_psd
                if noise_fit is not None:
                    record[f"freq_noise_flicker{index}"] = noise_fit.flicker
                    record[f"freq_noise_white{index}"] = noise_fit.white
            except NJPOError as e:
                logger.info(f"Frequency-noise spectrum of mode {index} skipped: {e}")

    if len(thetas) == 2:
        try:
            record["phase_sum_std"] = phase_statistics(wrap_phase(thetas[3] + thetas[4])).std
            diffusion = phase_diffusion(thetas[3] - thetas[4], quadratures[3].sample_rate)
            record["phase_difference_diffusion"] = diffusion.rate
            record["phase_difference_r_squared"] = diffusion.r_squared
        except NJPOError as e:
            logger.warning(f"Two-mode phase analysis skipped: {e}")

    try:
        half_sum = 0.5 * phase_sum(system, pump.epsilon)
    except NJPOError:
        half_sum = 0.0
    rotated3 = _detected(system, quadratures[3].rotate(half_sum))
    rotated4 = _detected(system, quadratures[4].rotate(half_sum))
    record["corr_i"] = float(np.corrcoef(rotated3.i, rotated4.i)[0, 1])
    record["corr_q"] = float(np.corrcoef(rotated3.q, rotated4.q)[0, 1])
    record["_cross_i"] = cross_quadrature_histogram(rotated3, rotated4, "I")
    record["_cross_q"] = cross_quadrature_histogram(rotated3, rotated4, "Q")
    return record


def simulate_point(
    settings: SimulationSettings,
    epsilon: float = DEFAULT_EPSILON,
    delta: float = DEFAULT_DELTA,
    tones: Sequence[InjectionTone] = (),
    seed: Optional[int] = None,
    reference: Optional[bool] = None,
    monitor: Optional["RunMonitor"] = None,
) -> ExperimentResult:
    """
    Simulate one operating point and analyse it.

    When vacuum noise is on (or `reference` is set) a pump-off run with the
    same seed is added as the noise-floor reference spectrum.

    Returns:
        ExperimentResult with the trajectory under spectra['trajectory'] and
        the photon spectral densities of both modes; records of at least
        10^4 settled samples add frequency-noise spectra (spectra['fnoise3'],
        spectra['fnoise4']) and their 1/f + white coefficients.
        Quadrature correlations are taken within a detection bandwidth of
        Gamma/8pi (Hz).
    """
    seed = settings.noise.rng_seed if seed is None else int(seed)
    sweep = SweepSpec(master_seed=seed)
    params = {"epsilon": epsilon, "delta": delta, "tones": [tone.to_dict() for tone in tones]}
    records = _execute("simulate", _single_run_point, settings, sweep, params, 1, monitor)

    if reference is None:
        reference = settings.noise.vacuum_noise_on and settings.noise.vacuum_scale > 0
    if reference:
        off = _execute(
            "simulate-reference", _single_run_point, settings, sweep, dict(params, epsilon=0.0), 1, monitor
        )
        off[0]["index"] = 1
        off[0]["reference"] = True
        records.append(off[0])

    spectra: Dict[str, Any] = {}
    for record, key in zip(records, ("", "reference_")):
        trajectory = record.pop("_trajectory", None)
        if trajectory is not None:
            spectra[f"{key}trajectory"] = trajectory
        for component in ("i", "q"):
            hist = record.pop(f"_cross_{component}", None)
            if hist is not None:
                spectra[f"{key}cross_{component}"] = hist
        for index in (3, 4):
            psd = record.pop(f"_psd{index}", None)
            if psd is not None:
                spectra[f"{key}psd{index}"] = psd
            noise_psd = record.pop(f"_fnoise{index}", None)
            if noise_psd is not None:
                spectra[f"{key}fnoise{index}"] = noise_psd

    result = ExperimentResult("simulate", [], records, _provenance("simulate", settings, sweep, dict(params, reference=reference)), spectra)
    if records[0]["success"]:
        result.summary = {key: value for key, value in records[0].items() if not key.startswith("_")}
    return result


# ---------------------------------------------------------------------------
# Stability map and onset
# ---------------------------------------------------------------------------


def _stability_point(settings, coords, seeds, epsilon=DEFAULT_EPSILON, delta=DEFAULT_DELTA):
    system = settings.system
    pump = _pump(settings, coords.get("epsilon", epsilon), coords.get("delta", delta))
    region = classify_region(system, pump)
    record = _closed_form_point(settings, coords, seeds, epsilon, delta)
    record = {
        "region": region.value,
        "closed_photons3": record["photons3"],
        "closed_photons4": record["photons4"],
        "closed_flux3": record["flux3"],
        "closed_flux4": record["flux4"],
        "shift_hz": record["shift_hz"],
    }

    outcomes = [
        _mean_photons(settings, _settled(settings, _simulate(settings, pump, (), seed))) for seed in seeds
    ]
    photons3 = float(np.mean([o[0] for o in outcomes]))
    photons4 = float(np.mean([o[1] for o in outcomes]))
    flux3, flux4 = output_flux(system, (photons3, photons4))
    record.update(sim_photons3=photons3, sim_photons4=photons4, sim_flux3=flux3, sim_flux4=flux4)

    if region is StabilityRegion.BISTABLE:
        start = steady_state_field(system, pump)
        seeded = [
            _mean_photons(settings, _settled(settings, _simulate(settings, pump, (), seed, initial=start)))
            for seed in seeds
        ]
        record["osc_seeded_photons3"] = float(np.mean([o[0] for o in seeded]))
        record["osc_seeded_photons4"] = float(np.mean([o[1] for o in seeded]))
    return record


def stability_map(
    settings: SimulationSettings,
    sweep: SweepSpec,
    workers: int = 1,
    monitor: Optional["RunMonitor"] = None,
    epsilon: float = DEFAULT_EPSILON,
    delta: float = DEFAULT_DELTA,
) -> ExperimentResult:
    """
    Closed-form and simulated output intensities over the (epsilon, delta) plane.

    Every point is run from a small random seed state; bistable points are
    additionally run from the closed-form oscillating state, so both
    attractor outcomes are reported.

    Args:
        settings: Simulation settings
        sweep: Grid over epsilon and/or delta (multiples of Gamma)
        workers: Worker processes
        monitor: Optional RunMonitor
        epsilon: Pump strength used when epsilon is not swept
        delta: Pump detuning used when delta is not swept

    Returns:
        ExperimentResult with one record per grid point
    """
    params = {"epsilon": epsilon, "delta": delta}
    records = _execute("map", _stability_point, settings, sweep, params, workers, monitor)
    result = ExperimentResult("map", sweep.names, records, _provenance("map", settings, sweep, params))

    bistable = [r for r in records if r.get("success") and r.get("region") == StabilityRegion.BISTABLE.value]
    result.summary = {
        "points": len(records),
        "failed": len(result.failures),
        "bistable_points": len(bistable),
        "bistability_witnessed": sum(
            1 for r in bistable if r["osc_seeded_photons3"] > 10.0 * max(r["sim_photons3"], 1e-12)
        ),
    }
    return result


def _late_growth(settings: SimulationSettings, pump: PumpDrive, seed: int) -> Tuple[float, float]:
    trajectory = _simulate(settings, pump, (), seed)
    photons3 = trajectory.photons()[0]
    quarter = max(len(photons3) // 4, 1)
    return float(photons3[quarter: 2 * quarter].mean()), float(photons3[-quarter:].mean())


def onset_bisection(
    settings: SimulationSettings,
    delta: float = 0.0,
    low: float = 0.5,
    high: float = 2.0,
    tolerance: float = 0.005,
    seed: Optional[int] = None,
) -> Dict[str, Any]:
    """
    Locate the simulated oscillation onset on the epsilon axis by bisection.

    Runs are noiseless and start from the small seed state; a point counts
    as oscillating when the late photon number exceeds the earlier one or
    has grown beyond 1e-2.

    Args:
        settings: Simulation settings
        delta: Pump detuning (multiples of Gamma)
        low: Lower bracket (multiples of Gamma), must not oscillate
        high: Upper bracket (multiples of Gamma), must oscillate
        tolerance: Bracket width at which to stop (multiples of Gamma)
        seed: Seed of the initial state

    Returns:
        Dict with the onset estimate, the final bracket and the iteration count
    """
    quiet = settings.noiseless()
    seed = settings.noise.rng_seed if seed is None else seed

    def oscillates(epsilon: float) -> bool:
        early, late = _late_growth(quiet, _pump(quiet, epsilon, delta), seed)
        return late > early or late > ONSET_GROWTH_FLOOR

    if oscillates(low) or not oscillates(high):
        raise ParameterError(f"bracket [{low}, {high}] does not enclose the oscillation onset")

    iterations = 0
    while high - low > tolerance:
        middle = 0.5 * (low + high)
        if oscillates(middle):
            high = middle
        else:
            low = middle
        iterations += 1
    onset = 0.5 * (low + high)
    logger.info(f"Oscillation onset at epsilon = {onset:.4f} Gamma after {iterations} bisection steps")
    return {"onset": onset, "low": low, "high": high, "iterations": iterations, "delta": delta}


# ---------------------------------------------------------------------------
# Pump ramp
# ---------------------------------------------------------------------------


def _ramp_point(settings, coords, seeds, delta=DEFAULT_RAMP_DELTA):
    system = settings.system
    pump = _pump(settings, coords["epsilon"], coords.get("delta", delta))
    trajectories = [_settled(settings, _simulate(settings, pump, (), seed)) for seed in seeds]
    record: Dict[str, Any] = {}
    for index in (3, 4):
        psd = _average_psd(
            [photon_spectral_density(demodulate(traj, index, 0.0)) for traj in trajectories]
        )
        line = _line(psd)
        record[f"peak{index}_hz"] = line["center_hz"]
        record[f"predicted{index}_hz"] = to_hz(mode_frequency(system, pump, index))
        record[f"_psd{index}"] = psd
        record["rbw_hz"] = psd.resolution_bandwidth
    return record


def pump_ramp_spectrogram(
    settings: SimulationSettings,
    sweep: SweepSpec,
    workers: int = 1,
    monitor: Optional["RunMonitor"] = None,
    delta: float = DEFAULT_RAMP_DELTA,
) -> ExperimentResult:
    """
    Photon spectral densities of both modes along a ramp of the pump strength.

    Spectra are taken in the rotating frame (detection detuning 0) so the
    line centers trace the radiation shifts directly.

    Args:
        settings: Simulation settings
        sweep: Grid with an epsilon axis (multiples of Gamma)
        workers: Worker processes
        monitor: Optional RunMonitor
        delta: Fixed pump detuning (multiples of Gamma)

    Returns:
        ExperimentResult whose spectra hold 'frequencies_hz', 'psd3' and 'psd4'
        stacked along the ramp
    """
    if sweep.axis("epsilon") is None:
        raise ParameterError("pump ramp needs an epsilon axis")
    params = {"delta": delta}
    records = _execute("ramp", _ramp_point, settings, sweep, params, workers, monitor)
    psd3 = _pop_arrays(records, "_psd3")
    psd4 = _pop_arrays(records, "_psd4")
    first = next((psd for psd in psd3 if psd is not None), None)

    spectra: Dict[str, Any] = {}
    if first is not None:
        spectra = {
            "frequencies_hz": first.frequencies,
            "psd3": _stack([None if psd is None else psd.values for psd in psd3]),
            "psd4": _stack([None if psd is None else psd.values for psd in psd4]),
        }
    return ExperimentResult("ramp", sweep.names, records, _provenance("ramp", settings, sweep, params), spectra)


# ---------------------------------------------------------------------------
# Injection locking
# ---------------------------------------------------------------------------


def _histogram_extent(system: TwoModeSystem, pump: PumpDrive, index: int):
    try:
        flux = output_flux(system, steady_state_photons(system, pump))[index - 3]
    except GroundStateOnlyError:
        return None
    reach = 1.5 * math.sqrt(flux)
    return ((-reach, reach), (-reach, reach))


def _held_phase_diffusion(thetas: List[np.ndarray], sample_rate: float) -> Optional[PhaseDiffusion]:
    """Phase diffusion over lags of 1/50 to 1/5 of the record, pooled over trajectories."""
    fits = []
    for theta in thetas:
        try:
            fits.append(
                phase_diffusion(theta, sample_rate, max_lag=len(theta) // 5, min_lag=max(len(theta) // 50, 1))
            )
        except (NJPOError, ValueError) as e:
            logger.warning(f"Phase diffusion skipped: {e}")
    if not fits:
        return None
    errors = np.array([fit.rate_error for fit in fits])
    return PhaseDiffusion(
        lags=fits[0].lags,
        variances=np.mean([fit.variances for fit in fits], axis=0),
        rate=float(np.mean([fit.rate for fit in fits])),
        r_squared=float(np.mean([fit.r_squared for fit in fits])),
        rate_error=float(np.sqrt(np.sum(errors**2))) / len(fits),
    )


def _locking_point(
    settings,
    coords,
    seeds,
    epsilon=DEFAULT_EPSILON,
    delta=DEFAULT_DELTA,
    mode_index=3,
    tone_phase=0.0,
    histograms=True,
):
    system = settings.system
    pump = _pump(settings, coords.get("epsilon", epsilon), coords.get("delta", delta))
    photons = coords.get("photons", 0.0)
    tone = InjectionTone.from_photons(system, mode_index, photons, 0.0, tone_phase)
    trajectories = [_settled(settings, _simulate(settings, pump, (tone,), seed)) for seed in seeds]

    record: Dict[str, Any] = {"input_photons": photons}
    for index in (3, 4):
        detection = mode_frequency(system, pump, index)
        quadratures = [demodulate(traj, index, detection) for traj in trajectories]
        psd = _average_psd([photon_spectral_density(q) for q in quadratures])
        line = _line(psd)
        record[f"linewidth{index}_hz"] = line["linewidth_hz"]
        record[f"below_resolution{index}"] = line["below_resolution"]
        record["rbw_hz"] = psd.resolution_bandwidth

        thetas = [phase_series(q) for q in quadratures]
        diffusion = _held_phase_diffusion(thetas, quadratures[0].sample_rate)
        record[f"diffusion_linewidth{index}_hz"] = diffusion.linewidth if diffusion else math.nan
        record[f"diffusion_resolved{index}"] = bool(diffusion and diffusion.resolved)
        theta = np.concatenate([wrap_phase(t) for t in thetas])
        stats = phase_statistics(theta, bins=PHASE_HISTOGRAM_BINS)
        record[f"phase_std{index}"] = stats.std
        record[f"phase_mean{index}"] = stats.mean
        record[f"gaussianity{index}"] = stats.gaussianity
        if histograms:
            record[f"_phase_hist{index}"] = stats.counts
            hist = phase_space_histogram(quadratures[0], PHASE_SPACE_BINS, _histogram_extent(system, pump, index))
            extent = ((hist.x_edges[0], hist.x_edges[-1]), (hist.y_edges[0], hist.y_edges[-1]))
            for q in quadratures[1:]:
                hist = hist.merge(phase_space_histogram(q, PHASE_SPACE_BINS, extent))
            record[f"_phase_space{index}"] = hist
    try:
        record["predicted_locked_phase"] = locked_phase(system, pump.epsilon, tone_phase)
    except NJPOError:
        record["predicted_locked_phase"] = math.nan
    return record


def injection_locking_scan(
    settings: SimulationSettings,
    sweep: SweepSpec,
    workers: int = 1,
    monitor: Optional["RunMonitor"] = None,
    epsilon: float = DEFAULT_EPSILON,
    delta: float = DEFAULT_DELTA,
    mode_index: int = 3,
    tone_phase: float = 0.0,
) -> ExperimentResult:
    """
    Linewidths and phase statistics of both modes versus a resonant input.

    The tone sits at the free-running radiation frequency of `mode_index`;
    each mode is demodulated at its own radiation frequency. Besides the
    spectral -3 dB width, every point carries the Lorentzian width implied
    by its phase diffusion; a locked line is narrower than any affordable
    resolution bandwidth, so the linewidth ratios compare diffusion widths.
    An unresolved diffusion rate is replaced by its fit error and the ratio
    is flagged as a lower bound.

    Args:
        settings: Simulation settings
        sweep: Grid with a photons axis (<n>, 0 allowed for free running)
        workers: Worker processes
        monitor: Optional RunMonitor
        epsilon: Pump strength (multiples of Gamma)
        delta: Pump detuning (multiples of Gamma)
        mode_index: Mode receiving the tone
        tone_phase: Input phase theta_in (rad)

    Returns:
        ExperimentResult; spectra hold phase histograms and (I, Q) histograms
        per point, summary the free-running/locked linewidth ratios and the
        knee of the phase spread
    """
    if sweep.axis("photons") is None:
        raise ParameterError("injection locking scan needs a photons axis")
    params = {
        "epsilon": epsilon,
        "delta": delta,
        "mode_index": mode_index,
        "tone_phase": tone_phase,
        "histograms": sweep.wants("histograms"),
    }
    records = _execute("lock", _locking_point, settings, sweep, params, workers, monitor)

    spectra: Dict[str, Any] = {}
    for index in (3, 4):
        hist = _stack(_pop_arrays(records, f"_phase_hist{index}"))
        if hist is not None:
            spectra[f"phase_hist{index}"] = hist
            spectra["phase_edges"] = np.linspace(-math.pi, math.pi, PHASE_HISTOGRAM_BINS + 1)
        space = _pop_arrays(records, f"_phase_space{index}")
        if any(h is not None for h in space):
            spectra[f"phase_space{index}"] = space

    result = ExperimentResult("lock", sweep.names, records, _provenance("lock", settings, sweep, params), spectra)
    good = [r for r in records if r["success"]]
    if good:
        free = min(good, key=lambda r: r["input_photons"])
        ratios = []
        for record in good:
            ratios.append(
                {
                    "input_photons": record["input_photons"],
                    "linewidth_ratio3": _ratio(free["diffusion_linewidth3_hz"], record["diffusion_linewidth3_hz"]),
                    "lower_bound": not record["diffusion_resolved3"],
                    "psd_linewidth_ratio3": _ratio(free["linewidth3_hz"], record["linewidth3_hz"]),
                    "psd_lower_bound": bool(record["below_resolution3"]),
                }
            )
        result.summary = {
            "reference_photons": free["input_photons"],
            "linewidth_ratios": ratios,
            "knee_photons": locking_knee(
                [r["input_photons"] for r in good], [r[f"phase_std{mode_index}"] for r in good]
            ),
        }
    return result


def locking_knee(photons: Sequence[float], phase_std: Sequence[float]) -> float:
    """
    Input photon number at which the phase spread drops to half the uniform value pi/sqrt(3).

    Interpolated linearly in log <n> between the first bracketing pair of
    points; NaN when the scan never crosses that level.
    """
    level = 0.5 * UNIFORM_PHASE_STD
    points = sorted((n, s) for n, s in zip(photons, phase_std) if n > 0 and math.isfinite(s))
    for (n0, s0), (n1, s1) in zip(points, points[1:]):
        if s0 >= level > s1:
            fraction = (s0 - level) / (s0 - s1)
            return float(math.exp(math.log(n0) + fraction * math.log(n1 / n0)))
    return math.nan


# ---------------------------------------------------------------------------
# Synchronization
# ---------------------------------------------------------------------------


def _sync_point(settings, coords, seeds, epsilon=DEFAULT_EPSILON, delta=DEFAULT_DELTA, photons=1.0, idlers=True):
    system = settings.system
    gamma = system.gamma_eff
    pump = _pump(settings, coords.get("epsilon", epsilon), coords.get("delta", delta))
    n_in = coords.get("photons", photons)
    signal_detuning = coords["signal_detuning"] * gamma
    tone = InjectionTone.from_photons(system, 3, n_in, signal_detuning)
    trajectories = [_settled(settings, _simulate(settings, pump, (tone,), seed)) for seed in seeds]

    shift = mode_frequency(system, pump, 3)
    q3 = [demodulate(traj, 3, shift) for traj in trajectories]
    q4 = [demodulate(traj, 4, -shift) for traj in trajectories]
    psd3 = _average_psd([photon_spectral_density(q) for q in q3])
    psd4 = _average_psd([photon_spectral_density(q) for q in q4])
    rbw = psd3.resolution_bandwidth

    emission3 = float(np.mean([emission_frequency(q) for q in q3]))
    emission4 = float(np.mean([emission_frequency(q) for q in q4]))
    beat_hz = to_hz(emission3 - (shift + signal_detuning))
    offsets = {3: to_hz(emission3 - shift), 4: to_hz(emission4 + shift)}
    record: Dict[str, Any] = {
        "input_photons": n_in,
        "signal_detuning_hz": to_hz(signal_detuning),
        "emission3_offset_hz": offsets[3],
        "emission4_offset_hz": offsets[4],
        "beat_hz": beat_hz,
        "rbw_hz": rbw,
        "synchronized": bool(abs(beat_hz) < rbw),
        "_psd3": psd3,
        "_psd4": psd4,
    }

    if idlers:
        table = []
        detuning_hz = to_hz(signal_detuning)
        peaks3 = classify_idlers(detect_peaks(psd3), 3, detuning_hz, 2.0 * rbw, oscillation_hz=offsets[3])
        signal_peaks = [p for p in peaks3 if p.label == "signal"]
        reference = signal_peaks[0].width if signal_peaks else rbw
        for index, psd in ((3, psd3), (4, psd4)):
            labelled = classify_idlers(
                detect_peaks(psd), index, detuning_hz, 2.0 * rbw, reference, oscillation_hz=offsets[index]
            )
            for peak in labelled:
                table.append({"mode": index, "label": peak.label, "frequency_hz": peak.frequency,
                              "height": peak.height, "width_hz": peak.width, "kind": peak.kind})
        record["peaks3"] = sum(1 for row in table if row["mode"] == 3)
        record["peaks4"] = sum(1 for row in table if row["mode"] == 4)
        record["_idlers"] = table
    return record


def gap_width(detunings: Sequence[float], synchronized: Sequence[bool]) -> Tuple[float, float]:
    """
    Width of the contiguous synchronized interval around zero detuning.

    Args:
        detunings: Signal detunings of one photon-number row, ascending
        synchronized: Synchronized flags aligned with `detunings`

    Returns:
        (width, error): interval span plus one grid step, and +-one grid step
    """
    values = np.asarray(detunings, dtype=float)
    flags = np.asarray(synchronized, dtype=bool)
    if len(values) == 0:
        return 0.0, math.nan
    order = np.argsort(values)
    values, flags = values[order], flags[order]
    step = float(np.min(np.diff(values))) if len(values) > 1 else math.nan
    center = int(np.argmin(np.abs(values)))
    if not flags[center]:
        return 0.0, step
    left = center
    while left > 0 and flags[left - 1]:
        left -= 1
    right = center
    while right < len(values) - 1 and flags[right + 1]:
        right += 1
    span = float(values[right] - values[left])
    return span + (step if math.isfinite(step) else 0.0), step


def synchronization_scan(
    settings: SimulationSettings,
    sweep: SweepSpec,
    workers: int = 1,
    monitor: Optional["RunMonitor"] = None,
    epsilon: float = DEFAULT_EPSILON,
    delta: float = DEFAULT_DELTA,
    photons: float = 1.0,
) -> ExperimentResult:
    """
    Response of the oscillation to a detuned signal on mode 3.

    A point is synchronized when the mean mode-3 emission coincides with the
    signal frequency within one resolution bandwidth. Gap widths per input
    photon number are fitted to g = c*sqrt(<n>).

    Args:
        settings: Simulation settings
        sweep: Grid with a signal_detuning axis (multiples of Gamma) and
            optionally a photons axis
        workers: Worker processes
        monitor: Optional RunMonitor
        epsilon: Pump strength (multiples of Gamma)
        delta: Pump detuning (multiples of Gamma)
        photons: Input photon number when photons is not swept

    Returns:
        ExperimentResult; spectra hold stacked PSDs and the idler table,
        summary the gap table and the square-root fit
    """
    if sweep.axis("signal_detuning") is None:
        raise ParameterError("synchronization scan needs a signal_detuning axis")
    params = {"epsilon": epsilon, "delta": delta, "photons": photons, "idlers": sweep.wants("idlers")}
    records = _execute("sync", _sync_point, settings, sweep, params, workers, monitor)

    psd3 = _pop_arrays(records, "_psd3")
    psd4 = _pop_arrays(records, "_psd4")
    idler_rows = []
    for record, table in zip(records, _pop_arrays(records, "_idlers")):
        for row in table or []:
            idler_rows.append({"index": record["index"], **row})
    spectra: Dict[str, Any] = {"idlers": idler_rows}
    first = next((psd for psd in psd3 if psd is not None), None)
    if first is not None:
        spectra["frequencies_hz"] = first.frequencies
        spectra["psd3"] = _stack([None if psd is None else psd.values for psd in psd3])
        spectra["psd4"] = _stack([None if psd is None else psd.values for psd in psd4])

    gamma_hz = to_hz(settings.system.gamma_eff)
    gaps = []
    rows: Dict[float, List[Dict[str, Any]]] = {}
    for record in records:
        if record["success"]:
            rows.setdefault(record["input_photons"], []).append(record)
    for n_in in sorted(rows):
        row = rows[n_in]
        width, error = gap_width([r["signal_detuning"] for r in row], [r["synchronized"] for r in row])
        gaps.append({"input_photons": n_in, "gap": width, "gap_error": error,
                     "gap_hz": width * gamma_hz, "gap_error_hz": error * gamma_hz})

    summary: Dict[str, Any] = {"gaps": gaps, "sqrt_fit": None}
    try:
        fit = fit_sqrt_law([g["input_photons"] for g in gaps], [g["gap"] for g in gaps])
        summary["sqrt_fit"] = {"coefficient": fit.coefficient, "r_squared": fit.r_squared, "points": fit.n_points}
    except FitError as e:
        logger.warning(f"Square-root gap fit skipped: {e}")

    result = ExperimentResult("sync", sweep.names, records, _provenance("sync", settings, sweep, params), spectra)
    result.summary = summary
    return result


# ---------------------------------------------------------------------------
# Kerr extraction
# ---------------------------------------------------------------------------


def _kerr_point(settings, coords, seeds, epsilon=DEFAULT_EPSILON):
    system = settings.system
    pump = _pump(settings, epsilon, coords["delta"])
    photons3 = []
    emission = []
    for seed in seeds:
        settled = _settled(settings, _simulate(settings, pump, (), seed))
        photons3.append(_mean_photons(settings, settled)[0])
        emission.append(emission_frequency(demodulate(settled, 3, 0.0)))
    p3 = float(np.mean(photons3))
    return {
        "delta_rad_s": pump.delta,
        "photons3": p3,
        "flux3": output_flux(system, (p3, 0.0))[0],
        "shift_rad_s": float(np.mean(emission)),
        "shift_hz": to_hz(float(np.mean(emission))),
    }


def kerr_extraction_roundtrip(
    settings: SimulationSettings,
    sweep: Optional[SweepSpec] = None,
    workers: int = 1,
    monitor: Optional["RunMonitor"] = None,
    epsilon: float = DEFAULT_EPSILON,
    method: str = "simulated",
) -> ExperimentResult:
    """
    Recover the self-Kerr coefficients from intensity and frequency-shift slopes.

    With method 'closed_form' the slopes come from the model; with
    'simulated' they are least-squares slopes of simulated |A_3|^2 and
    radiation shift over the delta axis of the sweep.

    Args:
        settings: Simulation settings; settings.system is the ground truth
        sweep: Grid with a delta axis (multiples of Gamma); defaults to 5 points in [-1, 1]
        workers: Worker processes
        monitor: Optional RunMonitor
        epsilon: Fixed pump strength (multiples of Gamma)
        method: 'closed_form' or 'simulated'

    Returns:
        ExperimentResult whose summary holds kerr3/kerr4 estimates (rad/s)
        and their relative errors

    Raises:
        InversionError: if the slopes admit no positive Kerr pair
    """
    if method not in ("closed_form", "simulated"):
        raise ParameterError(f"method must be 'closed_form' or 'simulated', got {method!r}")
    system = settings.system
    sweep = sweep or SweepSpec(axes=(SweepAxis("delta", -1.0, 1.0, 5),))
    if method == "simulated" and sweep.axis("delta") is None:
        raise ParameterError("simulated Kerr extraction needs a delta axis")
    params = {"epsilon": epsilon, "method": method}

    if method == "closed_form":
        records: List[Dict[str, Any]] = []
        slope_photons, slope_shift = closed_form_slopes(system)
    else:
        records = _execute("kerr-fit", _kerr_point, settings, sweep, {"epsilon": epsilon}, workers, monitor)
        good = [r for r in records if r["success"]]
        if len(good) < 2:
            raise FitError(f"need at least 2 successful delta points, got {len(good)}")
        deltas = np.array([r["delta_rad_s"] for r in good])
        slope_photons = float(np.polyfit(deltas, [r["photons3"] for r in good], 1)[0])
        slope_shift = float(np.polyfit(deltas, [r["shift_rad_s"] for r in good], 1)[0])

    kerr3, kerr4 = kerr_from_slopes(
        system.mode3.gamma_total, system.mode4.gamma_total, slope_photons, slope_shift
    )
    summary = {
        "method": method,
        "slope_photons": slope_photons,
        "slope_shift": slope_shift,
        "kerr3": kerr3,
        "kerr4": kerr4,
        "kerr3_hz": to_hz(kerr3),
        "kerr4_hz": to_hz(kerr4),
        "relative_error3": abs(kerr3 - system.mode3.kerr) / system.mode3.kerr,
        "relative_error4": abs(kerr4 - system.mode4.kerr) / system.mode4.kerr,
    }
    logger.info(
        f"Kerr extraction ({method}): alpha3/2pi={to_hz(kerr3):.6g}, alpha4/2pi={to_hz(kerr4):.6g} "
        f"(errors {summary['relative_error3']:.2e}, {summary['relative_error4']:.2e})"
    )
    result = ExperimentResult("kerr-fit", sweep.names, records, _provenance("kerr-fit", settings, sweep, params))
    result.summary = summary
    return result


EXPERIMENTS = {
    "steady-state": steady_state_table,
    "map": stability_map,
    "ramp": pump_ramp_spectrogram,
    "lock": injection_locking_scan,
    "sync": synchronization_scan,
    "kerr-fit": kerr_extraction_roundtrip,
}


def replay_experiment(provenance: Dict[str, Any], workers: int = 1) -> ExperimentResult:
    """Re-run a gridded experiment from the provenance block of its result."""
    name = provenance["experiment"]
    if name not in EXPERIMENTS:
        raise ParameterError(f"cannot replay experiment {name!r}")
    settings = SimulationSettings.from_dict(provenance["settings"])
    sweep = SweepSpec.from_dict(provenance["sweep"])
    params = dict(provenance.get("parameters", {}))
    # recomputed from the sweep on replay
    params.pop("histograms", None)
    params.pop("idlers", None)
    return EXPERIMENTS[name](settings, sweep, workers=workers, **params)
