"""
Run monitoring for experiment sweeps.
Tracks per-task outcomes and timings and summarises them for manifests.
"""

import logging
from datetime import datetime
from typing import Any, Dict, List

logger = logging.getLogger(__name__)


class RunMonitor:
    """Collects the outcome of every grid-point task of a run."""

    def __init__(self, name: str = "run", enabled: bool = True):
        self.name = name
        self.enabled = enabled
        self.tasks: List[Dict[str, Any]] = []
        self.started_at = datetime.now()

    def log_task(self, experiment: str, record: Dict[str, Any]) -> None:
        """
        Log one finished grid-point task.

        Args:
            experiment: Experiment the task belongs to
            record: Result record with 'success', 'elapsed' and, on failure, 'error'
        """
        if not self.enabled:
            return

        entry = {
            "experiment": experiment,
            "index": record.get("index"),
            "success": bool(record.get("success", False)),
            "elapsed": float(record.get("elapsed", 0.0)),
        }
        if entry["success"]:
            logger.debug(f"{experiment} point {entry['index']} done in {entry['elapsed']:.3f} s")
        else:
            entry["error"] = record.get("error", "Unknown error")
            entry["error_type"] = record.get("error_type", "Exception")
            logger.info(f"Logged failed {experiment} point {entry['index']}: {entry['error_type']}")
        self.tasks.append(entry)

    def get_failures(self) -> List[Dict[str, Any]]:
        return [task for task in self.tasks if not task["success"]]

    def get_performance_metrics(self) -> Dict[str, Any]:
        """
        Get performance metrics of the logged tasks.

        Returns:
            Dictionary with counts, success rate and timing statistics
        """
        total = len(self.tasks)
        if not total:
            return {"total_tasks": 0, "message": "No tasks logged"}

        successful = sum(1 for task in self.tasks if task["success"])
        elapsed = [task["elapsed"] for task in self.tasks]
        return {
            "total_tasks": total,
            "successful_tasks": successful,
            "failed_tasks": total - successful,
            "success_rate": successful / total,
            "average_execution_time_seconds": sum(elapsed) / total,
            "max_execution_time_seconds": max(elapsed),
            "total_execution_time_seconds": sum(elapsed),
        }

    def get_system_status(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "enabled": self.enabled,
            "started_at": self.started_at.isoformat(),
            "tasks_logged": len(self.tasks),
        }

    def to_dict(self) -> Dict[str, Any]:
        return {"status": self.get_system_status(), "metrics": self.get_performance_metrics(), "failures": self.get_failures()}
