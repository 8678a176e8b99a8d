"""
Core package.

This package provides engine configuration, the exception hierarchy and logging setup.
"""

from .config import settings
from .logging import setup_logging

__all__ = ["settings", "setup_logging"]
