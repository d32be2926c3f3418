"""Exception hierarchy for NashForge."""

from typing import Optional


class NashForgeError(Exception):
    """Base class for all NashForge errors."""


class GameFormatError(NashForgeError, ValueError):
    """A game or direction file could not be parsed or is inconsistent."""

    def __init__(self, message: str, player: Optional[int] = None, field: Optional[str] = None):
        self.player = player
        self.field = field
        prefix = ""
        if player is not None:
            prefix += f"player {player}: "
        if field is not None:
            prefix += f"field '{field}': "
        super().__init__(prefix + message)


class DimensionError(NashForgeError, ValueError):
    """In-process dimension mismatch between a game and a vector/direction."""


class ConfigError(NashForgeError, ValueError):
    """Invalid run configuration or environment setting."""


class GuardError(NashForgeError):
    """A combinatorial enumeration would exceed its configured limit."""


class NumericalError(NashForgeError):
    """A numerical kernel failed (e.g. the simplex iteration guard was exceeded)."""


class NotKktPointError(NashForgeError, ValueError):
    """Index classification was requested for a point that is not a KKT point."""
