"""Numeric defaults, overridable through the environment or a .env file."""

import os
from dataclasses import dataclass
from typing import Callable, TypeVar

from dotenv import load_dotenv

from ..exceptions import ConfigError

# Load environment variables
load_dotenv()

T = TypeVar("T", int, float)

ENV_PREFIX = "NASHFORGE_"


def _read(name: str, default: T, cast: Callable[[str], T]) -> T:
    raw = os.getenv(ENV_PREFIX + name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = cast(raw)
    except ValueError as e:
        raise ConfigError(f"{ENV_PREFIX + name}={raw!r} is not a valid number") from e
    if value <= 0 and name != "SEED":
        raise ConfigError(f"{ENV_PREFIX + name} must be positive, got {raw!r}")
    return value


@dataclass(frozen=True)
class NumericDefaults:
    """Default tolerances and search parameters."""

    tol_kkt: float = 1e-8
    tol_active: float = 1e-7
    tol_rank: float = 1e-9
    grid_res: float = 1e-2
    starts: int = 64
    seed: int = 0
    max_ineq: int = 20
    max_weak: int = 12
    grid_budget: int = 1_000_000
    log_level: str = "INFO"

    @classmethod
    def from_env(cls) -> "NumericDefaults":
        """Build defaults from NASHFORGE_* environment variables."""
        base = cls()
        return cls(
            tol_kkt=_read("TOL_KKT", base.tol_kkt, float),
            tol_active=_read("TOL_ACTIVE", base.tol_active, float),
            tol_rank=_read("TOL_RANK", base.tol_rank, float),
            grid_res=_read("GRID_RES", base.grid_res, float),
            starts=_read("STARTS", base.starts, int),
            seed=_read("SEED", base.seed, int),
            max_ineq=_read("MAX_INEQ", base.max_ineq, int),
            max_weak=_read("MAX_WEAK", base.max_weak, int),
            grid_budget=_read("GRID_BUDGET", base.grid_budget, int),
            log_level=os.getenv(ENV_PREFIX + "LOG_LEVEL", base.log_level).upper(),
        )


DEFAULTS = NumericDefaults.from_env()
