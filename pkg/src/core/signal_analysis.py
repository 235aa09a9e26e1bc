"""
Signal analysis of simulated trajectories.
Turns field amplitudes into the measured quantities: quadratures, photon
spectral densities, linewidths, phase statistics, frequency-noise spectra,
histograms, spectral peaks and the square-root gap law.

Spectral frequency axes are detection detunings in Hz, positive above the
rotating frame (a component e^{-i 2 pi f t} of A_n sits at +f).
"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy import signal, stats
from scipy.optimize import curve_fit

from .dynamics import Trajectory
from .exceptions import (
    AliasingError,
    FitError,
    InsufficientDataError,
    NoLineFoundError,
    PhaseUndefinedError,
    SegmentLengthError,
)
from .model import TWO_PI, TwoModeSystem, wrap_phase

logger = logging.getLogger(__name__)

RBW_GAMMA_FRACTION = 50.0
MIN_PHASE_SAMPLES = 1000
MIN_NOISE_SAMPLES = 10_000
GAP_AMPLITUDE_FRACTION = 1e-6
UNIFORMITY_BINS = 36
LINE_THRESHOLD_DB = 6.0
NARROW_WIDTH_FACTOR = 3.0


@dataclass
class Quadratures:
    """Demodulated output field I + iQ of one mode, in sqrt(photons/s)."""

    mode_index: int
    detection_detuning: float
    i: np.ndarray
    q: np.ndarray
    sample_rate: float
    gamma_eff: Optional[float] = None
    source_hash: str = ""

    def __len__(self) -> int:
        return len(self.i)

    @property
    def field(self) -> np.ndarray:
        return self.i + 1j * self.q

    @property
    def times(self) -> np.ndarray:
        return np.arange(len(self.i)) / self.sample_rate

    def rotate(self, angle: float) -> "Quadratures":
        """Rotate the quadrature frame so that every phase drops by `angle`."""
        rotated = self.field * np.exp(-1j * angle)
        return Quadratures(
            self.mode_index,
            self.detection_detuning,
            rotated.real,
            rotated.imag,
            self.sample_rate,
            self.gamma_eff,
            self.source_hash,
        )


@dataclass
class SpectralDensity:
    """Photon spectral density in photons/(s Hz) on a detection-detuning grid (Hz)."""

    frequencies: np.ndarray
    values: np.ndarray
    resolution_bandwidth: float
    averaging_count: int
    mode_index: Optional[int] = None
    source_hash: str = ""

    def total_power(self) -> float:
        return float(np.sum(self.values) * self.resolution_bandwidth)

    def peak_frequency(self) -> float:
        return float(self.frequencies[int(np.argmax(self.values))])

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"frequency_hz": self.frequencies, "psd": self.values})


@dataclass
class Histogram2D:
    """Two-dimensional count matrix with an overflow tally for out-of-range samples."""

    x_edges: np.ndarray
    y_edges: np.ndarray
    counts: np.ndarray
    overflow: int = 0

    @property
    def total(self) -> int:
        return int(self.counts.sum()) + int(self.overflow)

    def merge(self, other: "Histogram2D") -> "Histogram2D":
        if not (np.array_equal(self.x_edges, other.x_edges) and np.array_equal(self.y_edges, other.y_edges)):
            raise ValueError("cannot merge histograms with different bin edges")
        return Histogram2D(
            self.x_edges, self.y_edges, self.counts + other.counts, self.overflow + other.overflow
        )

    def to_frame(self) -> pd.DataFrame:
        x_centers = 0.5 * (self.x_edges[1:] + self.x_edges[:-1])
        y_centers = 0.5 * (self.y_edges[1:] + self.y_edges[:-1])
        xx, yy = np.meshgrid(x_centers, y_centers, indexing="ij")
        return pd.DataFrame({"x": xx.ravel(), "y": yy.ravel(), "count": self.counts.ravel()})


@dataclass
class NoiseFitResult:
    """Coefficients of S(f) = flicker/f + white and the fit residual."""

    flicker: float
    white: float
    residual: float


@dataclass
class Linewidth:
    width: float
    below_resolution: bool
    resolution: float
    center: float


@dataclass
class PhaseStatistics:
    std: float
    mean: float
    counts: np.ndarray
    edges: np.ndarray
    gaussianity: float


@dataclass
class Peak:
    frequency: float
    height: float
    width: float


@dataclass
class IdlerPeak:
    label: str
    frequency: float
    height: float
    width: float
    kind: str


@dataclass
class SqrtLawFit:
    coefficient: float
    r_squared: float
    n_points: int = 0
    residuals: List[float] = field(default_factory=list)


@dataclass
class PhaseDiffusion:
    lags: np.ndarray
    variances: np.ndarray
    rate: float
    r_squared: float
    rate_error: float = 0.0

    @property
    def resolved(self) -> bool:
        return self.rate > 2.0 * self.rate_error

    @property
    def linewidth(self) -> float:
        """Lorentzian full width (Hz) of a line whose phase diffuses at `rate`; unresolved rates give the fit error."""
        return max(self.rate, self.rate_error) / TWO_PI


def demodulate(trajectory: Trajectory, mode_index: int, detection_detuning: float) -> Quadratures:
    """
    Output field of one mode in a detection frame shifted by `detection_detuning`.

    Args:
        trajectory: Simulated trajectory (its provenance supplies Gamma_n0)
        mode_index: 3 or 4
        detection_detuning: Detection-frame detuning delta_n (rad/s)

    Returns:
        Quadratures with I + iQ = sqrt(2 Gamma_n0) A_n(t) exp(+i delta_n t)

    Raises:
        AliasingError: if |delta_n| reaches the Nyquist limit of the record
    """
    interval = trajectory.sample_interval
    if interval <= 0:
        raise InsufficientDataError("trajectory needs at least two samples to demodulate")
    nyquist = math.pi / interval
    if abs(detection_detuning) >= nyquist:
        raise AliasingError(
            f"detection detuning {detection_detuning:.6g} rad/s outside Nyquist band "
            f"+-{nyquist:.6g} rad/s"
        )

    system = TwoModeSystem.from_dict(trajectory.provenance["system"])
    gamma_ext = system.mode(mode_index).gamma_ext
    times = trajectory.times - trajectory.times[0]
    output = math.sqrt(2.0 * gamma_ext) * trajectory.field(mode_index) * np.exp(1j * detection_detuning * times)
    return Quadratures(
        mode_index=mode_index,
        detection_detuning=detection_detuning,
        i=output.real,
        q=output.imag,
        sample_rate=1.0 / interval,
        gamma_eff=system.gamma_eff,
        source_hash=trajectory.provenance_hash(),
    )


def low_pass(quadratures: Quadratures, cutoff_hz: float, order: int = 4) -> Quadratures:
    """
    Quadratures seen through a detection chain of finite bandwidth.

    Zero-phase Butterworth filter of both quadratures; components further
    than `cutoff_hz` from the detection frame are suppressed.
    """
    nyquist = 0.5 * quadratures.sample_rate
    if not 0 < cutoff_hz < nyquist:
        raise ValueError(f"cutoff must lie in (0, {nyquist:.6g}) Hz, got {cutoff_hz}")
    if len(quadratures) <= 3 * (2 * order + 1):
        raise InsufficientDataError(f"{len(quadratures)} samples too few to filter")
    sos = signal.butter(order, cutoff_hz, fs=quadratures.sample_rate, output="sos")
    return Quadratures(
        quadratures.mode_index,
        quadratures.detection_detuning,
        signal.sosfiltfilt(sos, quadratures.i),
        signal.sosfiltfilt(sos, quadratures.q),
        quadratures.sample_rate,
        quadratures.gamma_eff,
        quadratures.source_hash,
    )


def default_segment_length(n_samples: int, sample_rate: float, gamma_eff: Optional[float]) -> int:
    """Segment length giving a resolution bandwidth of at most Gamma/50 where the data allow it."""
    longest = max(n_samples // 2, 1)
    if gamma_eff is None:
        return max(n_samples // 8, 1)
    needed = int(math.ceil(sample_rate * TWO_PI * RBW_GAMMA_FRACTION / gamma_eff))
    if needed > longest:
        logger.warning(
            f"Record too short for RBW <= Gamma/{RBW_GAMMA_FRACTION:g}; using {longest}-sample segments"
        )
        return longest
    return needed


def photon_spectral_density(
    quadratures: Quadratures,
    segment_length: Optional[int] = None,
    overlap: float = 0.5,
    window: str = "hann",
) -> SpectralDensity:
    """
    Averaged-periodogram photon spectral density of I + iQ.

    Calibrated so that a coherent tone of flux F photons/s integrates to F.

    Args:
        quadratures: Demodulated field
        segment_length: Samples per segment; defaults to RBW <= Gamma/50
        overlap: Fractional segment overlap
        window: Window name understood by scipy.signal

    Returns:
        SpectralDensity on an ascending detection-detuning grid

    Raises:
        SegmentLengthError: if the segment is longer than the data or fewer than 2 segments fit
    """
    n_samples = len(quadratures)
    if segment_length is None:
        segment_length = default_segment_length(n_samples, quadratures.sample_rate, quadratures.gamma_eff)
    if segment_length > n_samples:
        raise SegmentLengthError(f"segment of {segment_length} samples longer than data ({n_samples})")
    noverlap = int(overlap * segment_length)
    step = segment_length - noverlap
    n_segments = (n_samples - noverlap) // step
    if n_segments < 2:
        raise SegmentLengthError(f"only {n_segments} segment(s) of {segment_length} samples fit the data")

    # conjugate so that e^{-i 2 pi f t} components land at +f
    frequencies, values = signal.welch(
        np.conj(quadratures.field),
        fs=quadratures.sample_rate,
        window=window,
        nperseg=segment_length,
        noverlap=noverlap,
        return_onesided=False,
        detrend=False,
        scaling="density",
    )
    return SpectralDensity(
        frequencies=np.fft.fftshift(frequencies),
        values=np.fft.fftshift(values),
        resolution_bandwidth=quadratures.sample_rate / segment_length,
        averaging_count=n_segments,
        mode_index=quadratures.mode_index,
        source_hash=quadratures.source_hash,
    )


def linewidth(psd: SpectralDensity) -> Linewidth:
    """
    Interpolated -3 dB full width of the dominant spectral line.

    Raises:
        NoLineFoundError: if nothing rises 6 dB above the median floor
    """
    values = psd.values
    freqs = psd.frequencies
    peak = int(np.argmax(values))
    floor = float(np.median(values))
    if values[peak] <= floor * 10 ** (LINE_THRESHOLD_DB / 10):
        raise NoLineFoundError(
            f"no line above the median floor by {LINE_THRESHOLD_DB:g} dB"
        )

    half = 0.5 * values[peak]
    left = peak
    while left > 0 and values[left - 1] > half:
        left -= 1
    right = peak
    while right < len(values) - 1 and values[right + 1] > half:
        right += 1

    def crossing(inner: int, outer: int) -> float:
        if outer < 0 or outer >= len(values):
            return float(freqs[inner])
        fraction = (values[inner] - half) / (values[inner] - values[outer])
        return float(freqs[inner] + fraction * (freqs[outer] - freqs[inner]))

    width = crossing(right, right + 1) - crossing(left, left - 1)
    resolution = psd.resolution_bandwidth
    return Linewidth(
        width=width,
        below_resolution=width < 2.0 * resolution,
        resolution=resolution,
        center=float(freqs[peak]),
    )


def phase_series(quadratures: Quadratures) -> np.ndarray:
    """
    Continuous (unwrapped) phase of I + iQ.

    Samples whose amplitude drops below 1e-6 of the mean are bridged by
    linear interpolation of the unwrapped phase.

    Raises:
        PhaseUndefinedError: if the amplitude is essentially zero throughout
    """
    field_values = quadratures.field
    amplitude = np.abs(field_values)
    mean_amplitude = float(amplitude.mean()) if len(amplitude) else 0.0
    if mean_amplitude == 0.0:
        raise PhaseUndefinedError("field amplitude is identically zero")
    valid = amplitude > GAP_AMPLITUDE_FRACTION * mean_amplitude
    if valid.sum() < max(2, len(valid) // 2):
        raise PhaseUndefinedError(
            f"field amplitude negligible on {np.count_nonzero(~valid)} of {len(valid)} samples"
        )

    unwrapped = np.unwrap(np.angle(field_values[valid]))
    if valid.all():
        return unwrapped
    logger.warning(f"Bridging {np.count_nonzero(~valid)} low-amplitude samples in phase series")
    index = np.arange(len(field_values))
    return np.interp(index, index[valid], unwrapped)


def emission_frequency(quadratures: Quadratures) -> float:
    """
    Mean radiation detuning (rad/s) of the field, relative to the rotating frame.

    Combines the detection-frame offset with the least-squares phase slope.
    """
    theta = phase_series(quadratures)
    slope = np.polyfit(quadratures.times, theta, 1)[0]
    return float(quadratures.detection_detuning - slope)


def _flicker_white(f, flicker, white):
    return np.log(flicker / f + white)


def frequency_noise_spectrum(
    theta: np.ndarray, sample_rate: float, segment_length: Optional[int] = None
) -> Tuple[SpectralDensity, Optional[NoiseFitResult]]:
    """
    Spectrum of the instantaneous frequency (1/2pi) d(theta)/dt with a 1/f + white fit.

    Args:
        theta: Unwrapped phase series (rad)
        sample_rate: Samples per second
        segment_length: Welch segment length; defaults to 1/16 of the record

    Returns:
        (one-sided SpectralDensity in Hz^2/Hz, NoiseFitResult or None when the fit fails)
    """
    theta = np.asarray(theta, dtype=float)
    if len(theta) < MIN_NOISE_SAMPLES:
        raise InsufficientDataError(
            f"frequency-noise spectrum needs at least {MIN_NOISE_SAMPLES} samples, got {len(theta)}"
        )
    frequency = np.diff(theta) * sample_rate / TWO_PI
    segment_length = segment_length or len(frequency) // 16
    freqs, values = signal.welch(
        frequency, fs=sample_rate, window="hann", nperseg=segment_length, detrend="constant",
        scaling="density",
    )
    psd = SpectralDensity(
        frequencies=freqs,
        values=values,
        resolution_bandwidth=sample_rate / segment_length,
        averaging_count=max((len(frequency) - segment_length // 2) // (segment_length - segment_length // 2), 1),
    )

    band = freqs > 0
    f_fit = freqs[band]
    s_fit = values[band]
    scale = float(np.median(s_fit))
    try:
        if scale <= 0 or not np.all(np.isfinite(s_fit)):
            raise FitError("spectrum has no positive floor")
        params, _ = curve_fit(
            _flicker_white,
            f_fit,
            np.log(np.maximum(s_fit / scale, 1e-300)),
            p0=[0.1 * f_fit[0], 0.5],
            bounds=([1e-300, 1e-300], [np.inf, np.inf]),
        )
        flicker, white = params * scale
        model = flicker / f_fit + white
        residual = float(np.mean(np.log10(s_fit / model) ** 2))
        return psd, NoiseFitResult(flicker=float(flicker), white=float(white), residual=residual)
    except (RuntimeError, ValueError) as e:
        logger.warning(f"Frequency-noise fit failed: {e}")
        return psd, None


def histogram2d(
    x_series: np.ndarray,
    y_series: np.ndarray,
    bins: int = 100,
    extent: Optional[Tuple[Tuple[float, float], Tuple[float, float]]] = None,
) -> Histogram2D:
    """
    Two-dimensional histogram; samples outside `extent` go to the overflow tally.

    Args:
        x_series: Horizontal coordinate (e.g. I_n or I_3)
        y_series: Vertical coordinate (e.g. Q_n or I_4)
        bins: Bins per axis
        extent: ((xmin, xmax), (ymin, ymax)); symmetric around zero when omitted

    Returns:
        Histogram2D
    """
    x_series = np.asarray(x_series, dtype=float)
    y_series = np.asarray(y_series, dtype=float)
    if x_series.shape != y_series.shape:
        raise ValueError(f"series lengths differ: {x_series.shape} vs {y_series.shape}")
    if extent is None:
        reach = float(max(np.max(np.abs(x_series), initial=0.0), np.max(np.abs(y_series), initial=0.0)))
        reach = reach or 1.0
        extent = ((-reach, reach), (-reach, reach))
    counts, x_edges, y_edges = np.histogram2d(x_series, y_series, bins=bins, range=extent)
    counts = counts.astype(np.int64)
    return Histogram2D(x_edges, y_edges, counts, overflow=int(len(x_series) - counts.sum()))


def phase_space_histogram(quadratures: Quadratures, bins: int = 100, extent=None) -> Histogram2D:
    """(I_n, Q_n) distribution of one mode."""
    return histogram2d(quadratures.i, quadratures.q, bins, extent)


def cross_quadrature_histogram(
    first: Quadratures, second: Quadratures, component: str = "I", bins: int = 100, extent=None
) -> Histogram2D:
    """(I_3, I_4) or (Q_3, Q_4) distribution of two simultaneously recorded modes."""
    if component == "I":
        return histogram2d(first.i, second.i, bins, extent)
    if component == "Q":
        return histogram2d(first.q, second.q, bins, extent)
    raise ValueError(f"component must be 'I' or 'Q', got {component!r}")


def phase_statistics(theta_samples: np.ndarray, bins: int = UNIFORMITY_BINS) -> PhaseStatistics:
    """
    Circular spread of a phase sample.

    The standard deviation is taken of the deviations from the circular
    mean, wrapped to (-pi, pi]; a uniform sample gives pi/sqrt(3).
    """
    theta_samples = np.asarray(theta_samples, dtype=float)
    if len(theta_samples) < MIN_PHASE_SAMPLES:
        raise InsufficientDataError(
            f"phase statistics need at least {MIN_PHASE_SAMPLES} samples, got {len(theta_samples)}"
        )
    mean = float(stats.circmean(theta_samples, high=math.pi, low=-math.pi))
    deviations = wrap_phase(theta_samples - mean)
    std = float(np.sqrt(np.mean(deviations**2)))
    counts, edges = np.histogram(wrap_phase(theta_samples), bins=bins, range=(-math.pi, math.pi))
    if std == 0.0:
        gaussianity = 1.0
    else:
        gaussianity = 1.0 - float(stats.kstest(deviations, "norm", args=(0.0, std)).statistic)
    return PhaseStatistics(std=std, mean=wrap_phase(mean), counts=counts, edges=edges, gaussianity=gaussianity)


def angular_uniformity(theta_samples: np.ndarray, bins: int = UNIFORMITY_BINS, stride: int = 1) -> float:
    """
    Chi-square p-value of the phase sample against a uniform distribution.

    Consecutive samples of a simulated phase are correlated; `stride` keeps
    every stride-th sample so that the counts are close to independent.
    """
    if stride < 1:
        raise ValueError(f"stride must be at least 1, got {stride}")
    counts, _ = np.histogram(wrap_phase(np.asarray(theta_samples, dtype=float)[::stride]), bins=bins, range=(-math.pi, math.pi))
    return float(stats.chisquare(counts).pvalue)


def detect_peaks(
    psd: SpectralDensity,
    floor_offset_db: float = 10.0,
    max_peaks: Optional[int] = None,
    prominence_db: float = 1.0,
) -> List[Peak]:
    """
    Local maxima standing `floor_offset_db` above the median floor.

    Args:
        psd: Spectral density
        floor_offset_db: Required height above the median, in dB
        max_peaks: Keep only the highest peaks when given
        prominence_db: Required prominence in dB; ripple on a broad line stays below it

    Returns:
        Peaks sorted by height (highest first) with interpolated centers and -3 dB widths
    """
    values = np.maximum(psd.values, np.finfo(float).tiny)
    level_db = 10.0 * np.log10(values)
    floor_db = float(np.median(level_db))
    indices, _ = signal.find_peaks(level_db, height=floor_db + floor_offset_db, prominence=prominence_db)
    if len(indices) == 0:
        return []

    widths = signal.peak_widths(values, indices, rel_height=0.5)[0] * psd.resolution_bandwidth
    peaks = []
    for index, width in zip(indices, widths):
        center = float(psd.frequencies[index])
        if 0 < index < len(values) - 1:
            before, here, after = level_db[index - 1], level_db[index], level_db[index + 1]
            curvature = before - 2.0 * here + after
            if curvature < 0:
                center += 0.5 * (before - after) / curvature * psd.resolution_bandwidth
        peaks.append(Peak(frequency=center, height=float(psd.values[index]), width=float(width)))

    peaks.sort(key=lambda p: p.height, reverse=True)
    return peaks[:max_peaks] if max_peaks else peaks


def classify_idlers(
    peaks: Sequence[Peak],
    mode_index: int,
    signal_detuning_hz: float,
    tolerance_hz: float,
    reference_width: Optional[float] = None,
    oscillation_hz: float = 0.0,
) -> List[IdlerPeak]:
    """
    Label the peaks of one mode spectrum.

    Offsets are detection detunings of the mode's own frame. The oscillation
    sits at `oscillation_hz` (its measured, pulled emission). Mode 3 carries
    the signal at +Delta_s and a secondary idler at 2*f_osc - Delta_s; mode 4
    carries the primary idler at -Delta_s and a secondary idler at
    2*f_osc + Delta_s. A peak matches a label within `tolerance_hz` or half
    its own width, whichever is larger; each label goes to the highest
    matching peak. Peaks no wider than 3x the reference (signal) width are
    narrow.
    """
    if mode_index == 3:
        expected = {
            "oscillation": oscillation_hz,
            "signal": signal_detuning_hz,
            "secondary_idler": 2.0 * oscillation_hz - signal_detuning_hz,
        }
    else:
        expected = {
            "oscillation": oscillation_hz,
            "primary_idler": -signal_detuning_hz,
            "secondary_idler": 2.0 * oscillation_hz + signal_detuning_hz,
        }

    taken = set()
    labelled = []
    for peak in sorted(peaks, key=lambda p: p.height, reverse=True):
        label = "other"
        best = math.inf
        reach = max(tolerance_hz, 0.5 * peak.width)
        for name, offset in expected.items():
            distance = abs(peak.frequency - offset)
            if name not in taken and distance <= reach and distance < best:
                label, best = name, distance
        if label != "other":
            taken.add(label)
        if reference_width is None:
            kind = "unknown"
        else:
            kind = "narrow" if peak.width <= NARROW_WIDTH_FACTOR * reference_width else "broad"
        labelled.append(IdlerPeak(label, peak.frequency, peak.height, peak.width, kind))
    return labelled


def fit_sqrt_law(n_values: Sequence[float], gap_values: Sequence[float]) -> SqrtLawFit:
    """
    Least-squares fit of g = c * sqrt(n).

    Raises:
        FitError: for fewer than 3 points, non-positive n or non-finite input
    """
    n = np.asarray(n_values, dtype=float)
    g = np.asarray(gap_values, dtype=float)
    if n.shape != g.shape or n.ndim != 1 or len(n) < 3:
        raise FitError(f"need at least 3 paired points, got {n.shape} and {g.shape}")
    if not (np.all(np.isfinite(n)) and np.all(np.isfinite(g))):
        raise FitError("input contains non-finite values")
    if np.any(n <= 0):
        raise FitError("photon numbers must be positive")

    root = np.sqrt(n)
    coefficient = float(np.dot(root, g) / np.dot(root, root))
    residuals = g - coefficient * root
    total = float(np.sum((g - g.mean()) ** 2))
    if total == 0.0:
        r_squared = 1.0 if np.allclose(residuals, 0.0) else 0.0
    else:
        r_squared = 1.0 - float(np.sum(residuals**2)) / total
    return SqrtLawFit(coefficient, r_squared, len(n), residuals.tolist())


def phase_diffusion(
    theta: np.ndarray,
    sample_rate: float,
    max_lag: Optional[int] = None,
    points: int = 20,
    min_lag: int = 1,
) -> PhaseDiffusion:
    """
    Variance of phase increments versus lag, with a straight-line fit.

    A diffusing phase gives var[theta(t + tau) - theta(t)] = 2 D tau; `rate`
    is the fitted slope (rad^2/s). A phase held by a restoring force saturates
    once the lag exceeds its correlation time, so starting the lags there
    (`min_lag`) leaves a slope compatible with zero.
    """
    theta = np.asarray(theta, dtype=float)
    max_lag = max_lag or len(theta) // 10
    if max_lag < 2 or len(theta) < 2 * max_lag:
        raise InsufficientDataError(f"{len(theta)} samples too few for lags up to {max_lag}")
    if not 1 <= min_lag < max_lag:
        raise ValueError(f"min_lag must lie in [1, {max_lag}), got {min_lag}")
    lags = np.unique(np.linspace(min_lag, max_lag, points).astype(int))
    variances = np.array([np.var(theta[lag:] - theta[:-lag]) for lag in lags])
    taus = lags / sample_rate
    fit = stats.linregress(taus, variances)
    return PhaseDiffusion(taus, variances, float(fit.slope), float(fit.rvalue**2), float(fit.stderr))
