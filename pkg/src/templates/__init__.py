"""Templates package initialization."""

from .config_templates import ConfigTemplates

__all__ = ["ConfigTemplates"]
