"""
Run configuration files.
Parses and renders the sectioned key-value format that describes a device,
its pump, injection tones, noise, integrator settings and parameter sweeps,
and turns it into domain objects (rates converted to rad/s exactly once).

Example::

    [mode3]
    omega = 4.345 GHz
    gamma_total = 0.56 MHz
    gamma_ext = 0.52 MHz
    kerr = 71 kHz

    [pump]
    epsilon = 3 gamma
    delta = 0 gamma
"""

import logging
import re
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from ..config import config
from ..core.dynamics import IntegratorConfig, NoiseConfig
from ..core.exceptions import (
    ConfigSyntaxError,
    InvariantViolationError,
    MissingFieldError,
    ParameterError,
    UnitSuffixError,
    UnknownKeyError,
)
from ..core.experiments import AXIS_NAMES, SimulationSettings, SweepAxis, SweepSpec
from ..core.model import InjectionTone, ModeParams, PumpDrive, TwoModeSystem, to_angular

logger = logging.getLogger(__name__)

FREQUENCY_UNITS = {"Hz": 1.0, "kHz": 1e3, "MHz": 1e6, "GHz": 1e9}
TIME_UNITS = {"s": 1.0, "ms": 1e-3, "us": 1e-6, "ns": 1e-9}
GAMMA = "gamma"
SWITCH_VALUES = {"on": True, "true": True, "yes": True, "off": False, "false": False, "no": False}
QUOTES = ("\"", "'")

_NUMBER = re.compile(r"^\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?|[+-]?inf|nan)\s*([A-Za-z]*)\s*$")
_HEADER = re.compile(r"^\[\s*([A-Za-z0-9_]+)\s*\]$")
_PAIR = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(.*)$")


@dataclass(frozen=True)
class Quantity:
    """A number together with the unit it was entered in."""

    value: float
    unit: str

    def render(self) -> str:
        return f"{self.value!r} {self.unit}"


@dataclass(frozen=True)
class ModeSection:
    omega: Quantity
    gamma_total: Quantity
    gamma_ext: Quantity
    kerr: Quantity


@dataclass(frozen=True)
class PumpSection:
    epsilon: Quantity
    delta: Quantity


@dataclass(frozen=True)
class ToneSection:
    mode: int
    photons: float
    detuning: Quantity = Quantity(0.0, "Hz")
    phase: float = 0.0


@dataclass(frozen=True)
class NoiseSection:
    vacuum: bool = True
    vacuum_scale: float = field(default_factory=lambda: config.VACUUM_SCALE)
    flicker_amplitude: float = 0.0


@dataclass(frozen=True)
class IntegratorSection:
    dt: Quantity = Quantity(0.005, GAMMA)
    duration: Optional[Quantity] = None
    record_stride: int = 10
    initial_amplitude: float = 1e-3


@dataclass(frozen=True)
class SweepSection:
    axes: Tuple[SweepAxis, ...] = ()
    trajectories: int = 1


@dataclass(frozen=True)
class RunSection:
    seed: Optional[int] = None
    output: Optional[str] = None
    workers: Optional[int] = None


@dataclass(frozen=True)
class RunConfig:
    """Parsed run configuration; values keep the units they were entered in."""

    mode3: ModeSection
    mode4: ModeSection
    pump: PumpSection
    tones: Tuple[ToneSection, ...] = ()
    noise: NoiseSection = field(default_factory=NoiseSection)
    integrator: IntegratorSection = field(default_factory=IntegratorSection)
    sweep: SweepSection = field(default_factory=SweepSection)
    run: RunSection = field(default_factory=RunSection)
    lines: Dict[str, int] = field(default_factory=dict, compare=False, repr=False)

    def system(self) -> TwoModeSystem:
        """Device parameters in rad/s."""
        modes = []
        for name, section in (("mode3", self.mode3), ("mode4", self.mode4)):
            try:
                modes.append(
                    ModeParams(
                        omega=_angular(section.omega),
                        gamma_total=_angular(section.gamma_total),
                        gamma_ext=_angular(section.gamma_ext),
                        kerr=_angular(section.kerr),
                    )
                )
            except ParameterError as e:
                raise InvariantViolationError(f"[{name}] {e}", self.lines.get(name)) from e
        return TwoModeSystem(*modes)

    def pump_drive(self, system: Optional[TwoModeSystem] = None) -> PumpDrive:
        system = system or self.system()
        try:
            return PumpDrive(
                epsilon=_rate(self.pump.epsilon, system), delta=_rate(self.pump.delta, system)
            )
        except ParameterError as e:
            raise InvariantViolationError(f"[pump] {e}", self.lines.get("pump")) from e

    def pump_in_gamma(self, system: Optional[TwoModeSystem] = None) -> Tuple[float, float]:
        """Pump strength and detuning as multiples of Gamma."""
        system = system or self.system()
        pump = self.pump_drive(system)
        return pump.epsilon / system.gamma_eff, pump.delta / system.gamma_eff

    def injection_tones(self, system: Optional[TwoModeSystem] = None) -> List[InjectionTone]:
        system = system or self.system()
        tones = []
        for index, tone in enumerate(self.tones):
            try:
                tones.append(
                    InjectionTone.from_photons(
                        system, tone.mode, tone.photons, _rate(tone.detuning, system), tone.phase
                    )
                )
            except ParameterError as e:
                raise InvariantViolationError(f"[tone] {e}", self.lines.get(f"tone{index}")) from e
        return tones

    def noise_config(self, seed: int, no_noise: bool = False) -> NoiseConfig:
        if no_noise:
            return NoiseConfig.noiseless(seed)
        try:
            return NoiseConfig(
                vacuum_noise_on=self.noise.vacuum,
                vacuum_scale=self.noise.vacuum_scale,
                flicker_amplitude=self.noise.flicker_amplitude,
                rng_seed=seed,
            )
        except ParameterError as e:
            raise InvariantViolationError(f"[noise] {e}", self.lines.get("noise")) from e

    def integrator_config(self, system: Optional[TwoModeSystem] = None) -> IntegratorConfig:
        system = system or self.system()
        section = self.integrator
        dt = _duration(section.dt, system)
        if section.duration is None:
            duration = dt * section.record_stride * config.RECORD_SAMPLES
        else:
            duration = _duration(section.duration, system)
        try:
            return IntegratorConfig(
                dt=dt,
                duration=duration,
                record_stride=section.record_stride,
                seed_amplitude=section.initial_amplitude,
            )
        except ParameterError as e:
            raise InvariantViolationError(f"[integrator] {e}", self.lines.get("integrator")) from e

    def sweep_spec(self, seed: int) -> SweepSpec:
        return SweepSpec(axes=self.sweep.axes, trajectories=self.sweep.trajectories, master_seed=seed)

    def simulation_settings(self, seed: int, no_noise: bool = False) -> SimulationSettings:
        system = self.system()
        return SimulationSettings(
            system=system,
            noise=self.noise_config(seed, no_noise),
            integrator=self.integrator_config(system),
            transient=config.TRANSIENT_GAMMA_TIMES / system.gamma_eff,
        )

    def validate(self) -> "RunConfig":
        """Build every domain object once so invariant violations surface at parse time."""
        system = self.system()
        self.pump_drive(system)
        self.injection_tones(system)
        self.noise_config(self.run.seed or 0)
        self.integrator_config(system)
        if self.run.workers is not None and self.run.workers < 1:
            raise InvariantViolationError(
                f"[run] workers must be at least 1, got {self.run.workers}", self.lines.get("run.workers")
            )
        if self.run.seed is not None and not 0 <= self.run.seed < 2**64:
            raise InvariantViolationError(
                f"[run] seed must fit in 64 unsigned bits, got {self.run.seed}", self.lines.get("run.seed")
            )
        return self


def _angular(quantity: Quantity) -> float:
    return to_angular(quantity.value * FREQUENCY_UNITS[quantity.unit])


def _rate(quantity: Quantity, system: TwoModeSystem) -> float:
    if quantity.unit == GAMMA:
        return quantity.value * system.gamma_eff
    return _angular(quantity)


def _duration(quantity: Quantity, system: TwoModeSystem) -> float:
    if quantity.unit == GAMMA:
        return quantity.value / system.gamma_eff
    return quantity.value * TIME_UNITS[quantity.unit]


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_FREQ = ("frequency", tuple(FREQUENCY_UNITS), "Hz")
_FREQ_OR_GAMMA = ("frequency", tuple(FREQUENCY_UNITS) + (GAMMA,), "Hz")
_TIME_OR_GAMMA = ("time", tuple(TIME_UNITS) + (GAMMA,), "s")

MODE_KEYS = {"omega": _FREQ, "gamma_total": _FREQ, "gamma_ext": _FREQ, "kerr": _FREQ}
SECTION_KEYS: Dict[str, Dict[str, Any]] = {
    "mode3": MODE_KEYS,
    "mode4": MODE_KEYS,
    "pump": {"epsilon": _FREQ_OR_GAMMA, "delta": _FREQ_OR_GAMMA},
    "tone": {"mode": "int", "photons": "float", "detuning": _FREQ_OR_GAMMA, "phase": "phase"},
    "noise": {"vacuum": "switch", "vacuum_scale": "float", "flicker_amplitude": "float"},
    "integrator": {
        "dt": _TIME_OR_GAMMA,
        "duration": _TIME_OR_GAMMA,
        "record_stride": "int",
        "initial_amplitude": "float",
    },
    "sweep": dict({name: "axis" for name in AXIS_NAMES}, trajectories="int"),
    "run": {"seed": "int", "output": "str", "workers": "int"},
}
REQUIRED_FIELDS = (
    ("mode3", ("omega", "gamma_total", "gamma_ext", "kerr")),
    ("mode4", ("omega", "gamma_total", "gamma_ext", "kerr")),
    ("pump", ("epsilon", "delta")),
)


@dataclass
class _Section:
    name: str
    line: int
    values: Dict[str, Tuple[str, int]] = field(default_factory=dict)


def _canonical_unit(unit: str, allowed: Tuple[str, ...]) -> Optional[str]:
    # mHz and MHz differ only in case
    return unit if unit in allowed else None


def _strip_comment(line: str) -> str:
    """Drop a trailing comment: an unquoted # at the start of the line or after whitespace."""
    quote = None
    for position, char in enumerate(line):
        if quote:
            if char == quote:
                quote = None
        elif char in QUOTES and (position == 0 or line[position - 1].isspace() or line[position - 1] == "="):
            quote = char
        elif char == "#" and (position == 0 or line[position - 1].isspace()):
            return line[:position]
    return line


def _unquote(raw: str) -> str:
    if len(raw) >= 2 and raw[0] in QUOTES and raw[-1] == raw[0]:
        return raw[1:-1]
    return raw


def _split_number(raw: str, line: int) -> Tuple[float, str]:
    match = _NUMBER.match(raw)
    if not match:
        raise ConfigSyntaxError(f"expected a number with optional unit, got {raw!r}", line)
    return float(match.group(1)), match.group(2)


def _convert(key: str, kind: Any, raw: str, line: int) -> Any:
    if isinstance(kind, tuple):
        _, allowed, bare_unit = kind
        value, unit = _split_number(raw, line)
        if not unit:
            return Quantity(value, bare_unit)
        canonical = _canonical_unit(unit, allowed)
        if canonical is None:
            raise UnitSuffixError(f"{key}: unit {unit!r} not one of {', '.join(allowed)}", line)
        return Quantity(value, canonical)
    if kind == "axis":
        return _parse_axis(key, raw, line)
    if kind == "str":
        value = _unquote(raw)
        if not value:
            raise ConfigSyntaxError(f"{key}: empty value", line)
        return value
    if kind == "switch":
        if raw.lower() not in SWITCH_VALUES:
            raise ConfigSyntaxError(f"{key}: expected on/off, got {raw!r}", line)
        return SWITCH_VALUES[raw.lower()]

    value, unit = _split_number(raw, line)
    if kind == "phase":
        if unit and unit != "rad":
            raise UnitSuffixError(f"{key}: phase unit must be rad, got {unit!r}", line)
        return value
    if unit:
        raise UnitSuffixError(f"{key}: takes no unit, got {unit!r}", line)
    if kind == "int":
        if re.fullmatch(r"[+-]?\d+", raw.strip()):
            return int(raw)
        if not value.is_integer():
            raise ConfigSyntaxError(f"{key}: expected an integer, got {raw!r}", line)
        return int(value)
    return value


def _parse_axis(name: str, raw: str, line: int) -> SweepAxis:
    parts = [part.strip() for part in raw.split(",")]
    if len(parts) not in (3, 4):
        raise ConfigSyntaxError(f"sweep axis {name}: expected 'min, max, points[, linear|log]'", line)
    minimum, min_unit = _split_number(parts[0], line)
    maximum, max_unit = _split_number(parts[1], line)
    for unit in (min_unit, max_unit):
        if unit and unit != GAMMA:
            raise UnitSuffixError(f"sweep axis {name}: unit {unit!r} not allowed", line)
    if not re.fullmatch(r"\d+", parts[2]):
        raise ConfigSyntaxError(f"sweep axis {name}: points must be a positive integer, got {parts[2]!r}", line)
    scale = parts[3].lower() if len(parts) == 4 else "linear"
    try:
        return SweepAxis(name, minimum, maximum, int(parts[2]), scale)
    except ParameterError as e:
        raise InvariantViolationError(str(e), line) from e


def _scan(text: str) -> List[_Section]:
    sections: List[_Section] = []
    current: Optional[_Section] = None
    for number, raw_line in enumerate(text.splitlines(), start=1):
        stripped = _strip_comment(raw_line).strip()
        if not stripped:
            continue
        header = _HEADER.match(stripped)
        if header:
            name = header.group(1).lower()
            if name not in SECTION_KEYS:
                raise UnknownKeyError(f"unknown section [{name}]", number)
            if name != "tone" and any(s.name == name for s in sections):
                raise ConfigSyntaxError(f"section [{name}] appears twice", number)
            current = _Section(name, number)
            sections.append(current)
            continue
        pair = _PAIR.match(stripped)
        if not pair:
            raise ConfigSyntaxError(f"cannot parse {stripped!r}", number)
        if current is None:
            raise ConfigSyntaxError("key-value pair outside any section", number)
        key = pair.group(1).lower()
        if key not in SECTION_KEYS[current.name]:
            raise UnknownKeyError(f"unknown key {key!r} in [{current.name}]", number)
        if key in current.values:
            raise ConfigSyntaxError(f"key {key!r} repeated in [{current.name}]", number)
        current.values[key] = (pair.group(2).strip(), number)
    return sections


def _build(section: _Section, lines: Dict[str, int]) -> Dict[str, Any]:
    kinds = SECTION_KEYS[section.name]
    values = {}
    for key, (raw, line) in section.values.items():
        values[key] = _convert(key, kinds[key], raw, line)
        lines[f"{section.name}.{key}"] = line
    return values


def parse_config(text: str) -> RunConfig:
    """
    Parse a run configuration.

    Args:
        text: Configuration text

    Returns:
        Validated RunConfig

    Raises:
        ConfigSyntaxError, UnknownKeyError, UnitSuffixError, MissingFieldError,
        InvariantViolationError: on the first problem found, with its line number
    """
    sections = _scan(text)
    by_name = {s.name: s for s in sections if s.name != "tone"}
    lines: Dict[str, int] = {s.name: s.line for s in by_name.values()}

    for name, keys in REQUIRED_FIELDS:
        section = by_name.get(name)
        for key in keys:
            if section is None or key not in section.values:
                raise MissingFieldError(
                    f"missing field {name}.{key}", None if section is None else section.line
                )

    built = {name: _build(section, lines) for name, section in by_name.items()}
    tones = []
    for index, section in enumerate(s for s in sections if s.name == "tone"):
        lines[f"tone{index}"] = section.line
        values = _build(section, lines)
        for key in ("mode", "photons"):
            if key not in values:
                raise MissingFieldError(f"missing field tone.{key}", section.line)
        tones.append(ToneSection(**values))

    sweep_values = built.get("sweep", {})
    trajectories = sweep_values.pop("trajectories", 1)
    if trajectories < 1:
        raise InvariantViolationError(
            f"trajectories must be at least 1, got {trajectories}", lines.get("sweep.trajectories")
        )
    axes = _ordered_axes(by_name["sweep"], sweep_values) if sweep_values else ()

    run_config = RunConfig(
        mode3=ModeSection(**built["mode3"]),
        mode4=ModeSection(**built["mode4"]),
        pump=PumpSection(**built["pump"]),
        tones=tuple(tones),
        noise=NoiseSection(**built.get("noise", {})),
        integrator=IntegratorSection(**built.get("integrator", {})),
        sweep=SweepSection(axes=axes, trajectories=trajectories),
        run=RunSection(**built.get("run", {})),
        lines=lines,
    )
    logger.debug(f"Parsed configuration with {len(tones)} tone(s) and {len(run_config.sweep.axes)} sweep axis/axes")
    return run_config.validate()


def _ordered_axes(section: _Section, axes: Dict[str, SweepAxis]) -> Tuple[SweepAxis, ...]:
    ordered = sorted(axes, key=lambda name: section.values[name][1])
    return tuple(axes[name] for name in ordered)


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------


def _render_value(value: Any) -> str:
    if isinstance(value, Quantity):
        return value.render()
    if isinstance(value, bool):
        return "on" if value else "off"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, str) and _needs_quotes(value):
        return f"'{value}'" if "\"" in value else f"\"{value}\""
    return str(value)


def _needs_quotes(text: str) -> bool:
    return (
        text != text.strip()
        or text[:1] in QUOTES
        or text.startswith("#")
        or any(char == "#" and text[i - 1].isspace() for i, char in enumerate(text) if i > 0)
    )


def render_config(run_config: RunConfig) -> str:
    """Render a RunConfig back into the text format; parse_config inverts it exactly."""
    out: List[str] = []

    def section(name: str, pairs: List[Tuple[str, Any]]) -> None:
        pairs = [(key, value) for key, value in pairs if value is not None]
        out.append(f"[{name}]")
        out.extend(f"{key} = {_render_value(value)}" for key, value in pairs)
        out.append("")

    for name, mode in (("mode3", run_config.mode3), ("mode4", run_config.mode4)):
        section(name, [(key, getattr(mode, key)) for key in MODE_KEYS])
    section("pump", [("epsilon", run_config.pump.epsilon), ("delta", run_config.pump.delta)])
    for tone in run_config.tones:
        section(
            "tone",
            [("mode", tone.mode), ("photons", float(tone.photons)), ("detuning", tone.detuning), ("phase", float(tone.phase))],
        )
    noise = run_config.noise
    section(
        "noise",
        [("vacuum", noise.vacuum), ("vacuum_scale", float(noise.vacuum_scale)),
         ("flicker_amplitude", float(noise.flicker_amplitude))],
    )
    integrator = run_config.integrator
    section(
        "integrator",
        [("dt", integrator.dt), ("duration", integrator.duration), ("record_stride", integrator.record_stride),
         ("initial_amplitude", float(integrator.initial_amplitude))],
    )
    sweep_pairs: List[Tuple[str, Any]] = [
        (axis.name, f"{float(axis.minimum)!r}, {float(axis.maximum)!r}, {int(axis.points)}, {axis.scale}")
        for axis in run_config.sweep.axes
    ]
    sweep_pairs.append(("trajectories", run_config.sweep.trajectories))
    section("sweep", sweep_pairs)
    run = run_config.run
    if any(value is not None for value in (run.seed, run.output, run.workers)):
        section("run", [("seed", run.seed), ("output", run.output), ("workers", run.workers)])
    return "\n".join(out)


def load_config(path) -> RunConfig:
    """Read and parse a configuration file."""
    try:
        with open(path, encoding="utf-8") as handle:
            text = handle.read()
    except OSError as e:
        logger.error(f"Error reading configuration {path}: {e}")
        raise
    return parse_config(text)
