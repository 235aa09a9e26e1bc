"""Utils package initialization."""

from .file_manager import OutputManager
from .run_config import RunConfig, load_config, parse_config, render_config
from .run_monitor import RunMonitor

__all__ = ["OutputManager", "RunConfig", "load_config", "parse_config", "render_config", "RunMonitor"]
