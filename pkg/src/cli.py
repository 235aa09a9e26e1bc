"""
Command-line interface.
Parses arguments, loads the run configuration, dispatches a subcommand
and writes its manifest and CSV tables.
"""

import argparse
import logging
from typing import Any, Dict, List, Optional, Sequence

import pandas as pd

from . import __version__
from .config import config, configure_logging
from .core import exceptions
from .core.experiments import (
    ExperimentResult,
    injection_locking_scan,
    kerr_extraction_roundtrip,
    pump_ramp_spectrogram,
    simulate_point,
    stability_map,
    steady_state_table,
    synchronization_scan,
)
from .templates import ConfigTemplates
from .utils.file_manager import OutputManager, provenance_digest
from .utils.run_config import RunConfig, load_config, parse_config, render_config
from .utils.run_monitor import RunMonitor

logger = logging.getLogger(__name__)

SUBCOMMANDS = ("steady-state", "simulate", "map", "ramp", "lock", "sync", "kerr-fit")

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_INTEGRATOR = 4
EXIT_ANALYSIS = 5


def exit_code_for(error: Any) -> int:
    """Exit category of an exception instance or class (or its class name)."""
    if isinstance(error, str):
        error = getattr(exceptions, error, None)
        if error is None:
            return EXIT_UNEXPECTED
    cls = error if isinstance(error, type) else type(error)
    if issubclass(cls, (exceptions.ConfigError, exceptions.ParameterError)):
        return EXIT_CONFIG
    if issubclass(cls, OSError):
        return EXIT_IO
    if issubclass(cls, (exceptions.IntegrationError, exceptions.StabilityGuardError)):
        return EXIT_INTEGRATOR
    if issubclass(cls, (exceptions.AnalysisError, exceptions.InversionError)):
        return EXIT_ANALYSIS
    return EXIT_UNEXPECTED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="njpo",
        description="Simulate a nondegenerate Josephson parametric oscillator and reproduce its measurements.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("subcommand", choices=SUBCOMMANDS)
    parser.add_argument("--config", metavar="PATH", help="run configuration file (bundled template if omitted)")
    parser.add_argument("--seed", type=int, help="master seed")
    parser.add_argument("--out", metavar="DIR", help="output directory")
    parser.add_argument("--workers", type=int, help="worker processes for sweeps")
    parser.add_argument("--no-noise", action="store_true", help="switch off vacuum and flicker noise")
    parser.add_argument(
        "--method",
        choices=("simulated", "closed_form"),
        default="simulated",
        help="slope source for kerr-fit",
    )
    parser.add_argument("--log-level", default=None, help="override LOG_LEVEL")
    return parser


def _frame(result: ExperimentResult) -> pd.DataFrame:
    frame = result.to_frame()
    return frame.drop(columns=[c for c in ("elapsed",) if c in frame.columns])


def _header(result: ExperimentResult, **extra: Any) -> Dict[str, Any]:
    header = {"experiment": result.name, "axes": ", ".join(result.axes) or "none"}
    header.update(extra)
    header["provenance_sha256"] = provenance_digest(result.provenance)
    return header


def _point_labels(result: ExperimentResult) -> List[str]:
    labels = []
    for record in result.records:
        coords = "_".join(f"{axis}={record[axis]:.6g}" for axis in result.axes)
        labels.append(coords or f"point{record['index']}")
    return labels


def _write_stacked(manager: OutputManager, result: ExperimentResult, files: List[str]) -> None:
    frequencies = result.spectra.get("frequencies_hz")
    if frequencies is None:
        return
    for index in (3, 4):
        stack = result.spectra.get(f"psd{index}")
        if stack is not None:
            path = manager.write_spectrogram(
                f"psd_mode{index}",
                frequencies,
                stack,
                _point_labels(result),
                _header(result, units="photons/(s Hz) versus detection detuning in Hz"),
            )
            files.append(path.name)


def _write_outputs(manager: OutputManager, subcommand: str, result: ExperimentResult) -> List[str]:
    files = []
    table = subcommand.replace("-", "_")
    files.append(manager.write_table(table, _frame(result), _header(result)).name)

    if subcommand == "simulate":
        for prefix in ("", "reference_"):
            trajectory = result.spectra.get(f"{prefix}trajectory")
            if trajectory is not None:
                files.append(manager.write_trajectory(f"{prefix}trajectory", trajectory).name)
            for index in (3, 4):
                psd = result.spectra.get(f"{prefix}psd{index}")
                if psd is not None:
                    path = manager.write_table(
                        f"{prefix}psd_mode{index}", psd.to_frame(),
                        _header(result, rbw_hz=repr(psd.resolution_bandwidth), units="photons/(s Hz)"),
                    )
                    files.append(path.name)
                noise_psd = result.spectra.get(f"{prefix}fnoise{index}")
                if noise_psd is not None:
                    path = manager.write_table(
                        f"{prefix}frequency_noise_mode{index}", noise_psd.to_frame(),
                        _header(result, rbw_hz=repr(noise_psd.resolution_bandwidth), units="Hz^2/Hz"),
                    )
                    files.append(path.name)
            for component in ("i", "q"):
                hist = result.spectra.get(f"{prefix}cross_{component}")
                if hist is not None:
                    path = manager.write_table(
                        f"{prefix}cross_quadrature_{component}", hist.to_frame(),
                        _header(result, overflow=hist.overflow),
                    )
                    files.append(path.name)
    else:
        _write_stacked(manager, result, files)

    if subcommand == "lock":
        for index in (3, 4):
            hist = result.spectra.get(f"phase_hist{index}")
            if hist is not None:
                edges = result.spectra["phase_edges"]
                frame = pd.DataFrame(hist.T, columns=_point_labels(result))
                frame.insert(0, "phase_center", 0.5 * (edges[1:] + edges[:-1]))
                files.append(manager.write_table(f"phase_histogram_mode{index}", frame, _header(result)).name)
    if subcommand == "sync":
        files.append(manager.write_table("gaps", pd.DataFrame(result.summary["gaps"]), _header(result)).name)
        idlers = pd.DataFrame(result.spectra.get("idlers", []))
        files.append(manager.write_table("idlers", idlers, _header(result)).name)
    if subcommand == "kerr-fit":
        files.append(manager.write_table("kerr_estimate", pd.DataFrame([result.summary]), _header(result)).name)
    return files


def _summary_for_manifest(summary: Dict[str, Any]) -> Dict[str, Any]:
    return {key: value for key, value in summary.items() if not hasattr(value, "shape")}


def run(subcommand: str, run_config: RunConfig, flags: Optional[Dict[str, Any]] = None) -> int:
    """
    Execute one subcommand and write its artifacts.

    Args:
        subcommand: One of SUBCOMMANDS
        run_config: Parsed configuration
        flags: seed, out, workers, no_noise and method overrides

    Returns:
        Process exit status (0 on success, category code on failure)
    """
    flags = dict(flags or {})
    if subcommand not in SUBCOMMANDS:
        logger.error(f"Unknown subcommand: {subcommand}")
        return EXIT_CONFIG

    seed = flags.get("seed")
    seed = run_config.run.seed if seed is None else seed
    seed = config.DEFAULT_SEED if seed is None else seed
    workers = flags.get("workers") or run_config.run.workers or config.MAX_WORKERS
    out = flags.get("out") or run_config.run.output or config.OUTPUT_DIRECTORY
    no_noise = bool(flags.get("no_noise", False))

    try:
        settings = run_config.simulation_settings(seed, no_noise)
        system = settings.system
        sweep = run_config.sweep_spec(seed)
        epsilon, delta = run_config.pump_in_gamma(system)
        tones = run_config.injection_tones(system)
        monitor = RunMonitor(subcommand)
        grid = {"workers": workers, "monitor": monitor}

        logger.info(f"Running {subcommand} (seed={seed}, workers={workers}, noise={'off' if no_noise else 'on'})")
        if subcommand == "steady-state":
            result = steady_state_table(settings, sweep if sweep.axes else None, epsilon=epsilon, delta=delta, **grid)
        elif subcommand == "simulate":
            result = simulate_point(settings, epsilon, delta, tones, seed=seed, monitor=monitor)
            if not result.records[0]["success"]:
                logger.error(f"Simulation failed: {result.records[0]['error']}")
                return exit_code_for(result.records[0]["error_type"])
        elif subcommand == "map":
            result = stability_map(settings, sweep, epsilon=epsilon, delta=delta, **grid)
        elif subcommand == "ramp":
            result = pump_ramp_spectrogram(settings, sweep, delta=delta, **grid)
        elif subcommand == "lock":
            mode_index = tones[0].mode_index if tones else 3
            phase = tones[0].phase if tones else 0.0
            result = injection_locking_scan(
                settings, sweep, epsilon=epsilon, delta=delta, mode_index=mode_index, tone_phase=phase, **grid
            )
        elif subcommand == "sync":
            photons = run_config.tones[0].photons if run_config.tones else 1.0
            result = synchronization_scan(settings, sweep, epsilon=epsilon, delta=delta, photons=photons, **grid)
        else:
            result = kerr_extraction_roundtrip(
                settings, sweep if sweep.axes else None, epsilon=epsilon, method=flags.get("method", "simulated"), **grid
            )

        manager = OutputManager(out, subcommand)
        files = _write_outputs(manager, subcommand, result)
        manager.write_manifest(
            {
                "subcommand": subcommand,
                "version": __version__,
                "config": render_config(run_config),
                "seed": seed,
                "workers": workers,
                "no_noise": no_noise,
                "flags": {key: value for key, value in flags.items() if value is not None},
                "provenance": result.provenance,
                "provenance_sha256": provenance_digest(result.provenance),
                "summary": _summary_for_manifest(result.summary),
                "metrics": monitor.to_dict(),
                "files": files,
            }
        )
        logger.info(f"{subcommand} finished: {len(result)} record(s), {len(result.failures)} failed, output in {manager.run_dir}")
        return EXIT_OK

    except exceptions.NJPOError as e:
        logger.error(f"{subcommand} failed: {type(e).__name__}: {e}")
        return exit_code_for(e)
    except OSError as e:
        logger.error(f"{subcommand} failed writing output: {e}")
        return EXIT_IO


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point; returns the exit status."""
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)

    try:
        if args.config:
            run_config = load_config(args.config)
        else:
            templates = ConfigTemplates()
            name = args.subcommand if args.subcommand in templates.get_available_templates() else "default"
            run_config = parse_config(templates.get_template(name))
    except exceptions.ConfigError as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIG
    except OSError as e:
        logger.error(f"Cannot read configuration: {e}")
        return EXIT_IO

    flags = {
        "seed": args.seed,
        "out": args.out,
        "workers": args.workers,
        "no_noise": args.no_noise,
        "method": args.method,
    }
    return run(args.subcommand, run_config, flags)
