"""
Output management for simulation runs.
Creates per-run directories and writes manifests and CSV tables with
commented headers.
"""

import hashlib
import json
import logging
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from ..config import config
from ..core.dynamics import Trajectory

logger = logging.getLogger(__name__)


def _json_default(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"cannot serialise {type(value).__name__}")


def provenance_digest(provenance: Dict[str, Any]) -> str:
    """SHA-256 of a provenance block, ignoring its creation timestamp."""
    stable = {key: value for key, value in provenance.items() if key != "created_at"}
    text = json.dumps(stable, sort_keys=True, default=_json_default)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


class OutputManager:
    """Manages the output directory of one subcommand run."""

    def __init__(self, base_dir: Optional[str] = None, subcommand: str = "run"):
        self.base_dir = Path(base_dir or config.OUTPUT_DIRECTORY)
        self.run_dir = self.base_dir / subcommand
        self.precision = config.CSV_PRECISION
        self.ensure_directories()

    def ensure_directories(self):
        """Ensure the run directory exists."""
        self.run_dir.mkdir(parents=True, exist_ok=True)
        logger.info(f"Ensured output directory: {self.run_dir}")

    def write_manifest(self, manifest: Dict[str, Any]) -> Path:
        """
        Write manifest.json for the run.

        Args:
            manifest: Parameters, seeds, flags and metrics of the run

        Returns:
            Path to the manifest
        """
        path = self.run_dir / "manifest.json"
        try:
            body = dict(manifest, written_at=datetime.now().isoformat())
            with open(path, "w", encoding="utf-8") as handle:
                json.dump(body, handle, indent=2, sort_keys=True, default=_json_default)
                handle.write("\n")
            logger.info(f"Wrote manifest: {path}")
            return path
        except (OSError, TypeError) as e:
            logger.error(f"Error writing manifest {path}: {e}")
            raise

    def write_table(
        self, name: str, frame: pd.DataFrame, header: Optional[Dict[str, Any]] = None
    ) -> Path:
        """
        Write a CSV table preceded by '#' header lines.

        Args:
            name: File name without extension
            frame: Table to write
            header: Ordered key/value pairs (axes, units, provenance hash)

        Returns:
            Path to the CSV file
        """
        path = self.run_dir / f"{name}.csv"
        try:
            with open(path, "w", newline="", encoding="utf-8") as handle:
                for key, value in (header or {}).items():
                    handle.write(f"# {key}: {value}\n")
                frame.to_csv(handle, index=False, float_format=f"%.{self.precision}g")
            logger.info(f"Wrote table {path.name} ({len(frame)} rows)")
            return path
        except OSError as e:
            logger.error(f"Error writing table {path}: {e}")
            raise

    def write_spectrogram(
        self,
        name: str,
        frequencies: np.ndarray,
        stack: np.ndarray,
        labels: Sequence[str],
        header: Optional[Dict[str, Any]] = None,
    ) -> Path:
        """Write stacked spectra as columns next to a shared frequency axis."""
        columns = {"frequency_hz": np.asarray(frequencies)}
        for label, row in zip(labels, np.atleast_2d(stack)):
            columns[label] = row
        return self.write_table(name, pd.DataFrame(columns), header)

    def write_trajectory(self, name: str, trajectory: Trajectory) -> Path:
        return trajectory.save(self.run_dir / f"{name}.csv")

    def read_table(self, name: str) -> pd.DataFrame:
        return pd.read_csv(self.run_dir / f"{name}.csv", comment="#", float_precision="round_trip")

    def get_file_info(self, file_path: Path) -> Dict[str, Any]:
        """
        Get information about an output file.

        Returns:
            Dictionary with name, size, modification time and SHA-256 digest
        """
        try:
            stat = file_path.stat()
            return {
                "name": file_path.name,
                "size": stat.st_size,
                "modified": datetime.fromtimestamp(stat.st_mtime),
                "sha256": hashlib.sha256(file_path.read_bytes()).hexdigest(),
            }
        except OSError as e:
            logger.error(f"Error getting file info for {file_path}: {e}")
            return {}

    def list_outputs(self) -> List[Dict[str, Any]]:
        """List files of the run directory, sorted by name."""
        files = []
        for file_path in sorted(self.run_dir.iterdir()):
            if file_path.is_file():
                info = self.get_file_info(file_path)
                if info:
                    info["path"] = str(file_path)
                    files.append(info)
        return files

    def get_storage_stats(self) -> Dict[str, Any]:
        try:
            sizes = [f.stat().st_size for f in self.run_dir.rglob("*") if f.is_file()]
            return {
                "path": str(self.run_dir),
                "file_count": len(sizes),
                "size_bytes": sum(sizes),
                "size_mb": sum(sizes) / (1024 * 1024),
            }
        except OSError as e:
            logger.error(f"Error getting storage stats: {e}")
            return {}
