"""Logging for NashForge: one package logger, configured once by the command line."""

import logging
import sys
from typing import List, Optional, Union

from ..exceptions import ConfigError

PACKAGE_LOGGER = "nashforge"
DEFAULT_FORMAT = "%(levelname)-7s %(name)s: %(message)s"
DEBUG_FORMAT = "[%(asctime)s] %(levelname)s %(name)s:%(lineno)d: %(message)s"

_HANDLER_TAG = "_nashforge_handler"


def _level(level: Union[int, str]) -> int:
    if isinstance(level, int):
        return level
    value = logging.getLevelName(str(level).upper())
    if not isinstance(value, int):
        raise ConfigError(f"unknown log level {level!r}")
    return value


def setup_logging(
    level: Union[int, str] = logging.INFO,
    log_file: Optional[str] = None,
) -> logging.Logger:
    """
    Attach stderr (and optionally file) handlers to the package logger.

    Calling it again replaces the handlers it installed before; other
    handlers, including those of the root logger, are left alone. Records
    still propagate so that host applications see them.

    Args:
        level: Level number or name such as "DEBUG".
        log_file: Optional file that receives the same records.

    Returns:
        The package logger.

    Raises:
        ConfigError: If the level name is unknown.
    """
    numeric = _level(level)
    root = logging.getLogger(PACKAGE_LOGGER)
    for handler in [h for h in root.handlers if getattr(h, _HANDLER_TAG, False)]:
        root.removeHandler(handler)
        handler.close()

    formatter = logging.Formatter(DEBUG_FORMAT if numeric <= logging.DEBUG else DEFAULT_FORMAT)
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if log_file:
        handlers.append(logging.FileHandler(log_file, encoding="utf-8"))
    for handler in handlers:
        setattr(handler, _HANDLER_TAG, True)
        handler.setFormatter(formatter)
        root.addHandler(handler)
    root.setLevel(numeric)
    return root


def get_logger(name: str) -> logging.Logger:
    """Logger under the package namespace (``__name__`` of a package module works as is)."""
    if name != PACKAGE_LOGGER and not name.startswith(PACKAGE_LOGGER + "."):
        name = f"{PACKAGE_LOGGER}.{name}"
    return logging.getLogger(name)


def log_error(logger: logging.Logger, error: Exception, message: str) -> None:
    """Log ``message: error`` at ERROR; the traceback goes to DEBUG."""
    logger.error(f"{message}: {error}")
    logger.debug("Exception details:", exc_info=error)
