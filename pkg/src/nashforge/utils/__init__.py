"""Utilities package for NashForge."""

from .config import DEFAULTS, NumericDefaults
from .formatting import (
    format_margin,
    format_number,
    format_vector,
    format_verdict
)
from .logging import (
    setup_logging,
    get_logger,
    log_error
)

__all__ = [
    # Configuration
    'DEFAULTS',
    'NumericDefaults',
    # Formatting
    'format_margin',
    'format_number',
    'format_vector',
    'format_verdict',
    # Logging
    'setup_logging',
    'get_logger',
    'log_error'
]
