"""
Configuration module for the NJPO simulator.
Handles environment variables and process-wide settings.
"""

import logging
import os
from typing import Optional

from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


class Config:
    """Configuration class for application settings."""

    # Logging Configuration
    LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")
    LOG_FILE = os.getenv("LOG_FILE", "njpo.log")

    # Output Configuration
    OUTPUT_DIRECTORY = os.getenv("OUTPUT_DIRECTORY", "./runs")
    CSV_PRECISION = int(os.getenv("CSV_PRECISION", "17"))

    # Run Defaults
    DEFAULT_SEED = int(os.getenv("DEFAULT_SEED", "20180131"))
    MAX_WORKERS = int(os.getenv("MAX_WORKERS", "1"))
    RECORD_SAMPLES = int(os.getenv("RECORD_SAMPLES", "100000"))

    # Simulation Defaults
    TRANSIENT_GAMMA_TIMES = float(os.getenv("TRANSIENT_GAMMA_TIMES", "20"))
    VACUUM_SCALE = float(os.getenv("VACUUM_SCALE", "1.0"))


def configure_logging(level: Optional[str] = None, log_file: Optional[str] = None) -> None:
    """
    Install console and (optionally) file handlers on the root logger.

    Args:
        level: Log level name; defaults to LOG_LEVEL
        log_file: Log file path; defaults to LOG_FILE, empty disables file logging
    """
    level = (level or config.LOG_LEVEL).upper()
    log_file = config.LOG_FILE if log_file is None else log_file

    handlers = [logging.StreamHandler()]
    if log_file:
        handlers.append(logging.FileHandler(log_file))
    logging.basicConfig(level=getattr(logging, level, logging.INFO), format=LOG_FORMAT, handlers=handlers, force=True)


# Create global config instance
config = Config()
