"""Validation, symmetrization and tilt perturbations of QP Nash games."""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..exceptions import DimensionError
from ..utils.logging import get_logger
from .models import Perturbation, PerturbationDirection, Player, QpNepGame

logger = get_logger(__name__)

ASYMMETRY_WARN = 1e-12


@dataclass(frozen=True)
class Violation:
    """One broken invariant of a game or direction."""

    player: Optional[int]
    field: str
    message: str

    def __str__(self) -> str:
        where = f"player {self.player}: " if self.player is not None else ""
        return f"{where}{self.field}: {self.message}"


def symmetrize(P: np.ndarray) -> Tuple[np.ndarray, float]:
    """
    Symmetric part of a square matrix and the asymmetry it removed.

    Returns:
        ``(0.5 * (P + P^T), max |P - P^T|)``. The quadratic form is unchanged.
    """
    P = np.asarray(P, dtype=float)
    asym = float(np.max(np.abs(P - P.T))) if P.size else 0.0
    return 0.5 * (P + P.T), asym


def symmetrized_game(players: Sequence[Player]) -> QpNepGame:
    """Build a game whose players' P matrices are replaced by their symmetric parts."""
    fixed, warnings = [], []
    for k, p in enumerate(players):
        P = np.asarray(p.P, dtype=float)
        if P.ndim == 2 and P.shape[0] == P.shape[1]:
            P, asym = symmetrize(P)
            if asym > ASYMMETRY_WARN:
                msg = f"player {k}: P symmetrized (asymmetry {asym:.3g} in max-norm)"
                logger.warning(msg)
                warnings.append(msg)
        fixed.append(Player(p.n, P, p.c, p.A, p.b, p.num_eq))
    return QpNepGame(tuple(fixed), tuple(warnings))


def validate_game(game: QpNepGame) -> List[Violation]:
    """
    Check the structural invariants of a game.

    Args:
        game: The game to check.

    Returns:
        List of violations; empty when the game is valid.
    """
    if game.N == 0:
        return [Violation(None, "players", "no players")]

    out: List[Violation] = []
    bad_n = [k for k, p in enumerate(game.players) if int(p.n) != p.n or p.n <= 0]
    for k in bad_n:
        out.append(Violation(k, "n", f"strategy dimension must be a positive integer, got {game.players[k].n}"))
    if bad_n:
        return out

    n = game.n
    for k, p in enumerate(game.players):
        if p.P.shape != (n, n):
            out.append(Violation(k, "P", f"expected shape ({n}, {n}), got {p.P.shape}"))
        elif not np.array_equal(p.P, p.P.T):
            out.append(Violation(k, "P", "matrix is not symmetric"))
        if p.c.size != n:
            out.append(Violation(k, "c", f"expected length {n}, got {p.c.size}"))
        if p.A.ndim != 2 or (p.A.shape[0] and p.A.shape[1] != p.n):
            out.append(Violation(k, "A", f"expected {p.n} columns, got shape {p.A.shape}"))
        if p.b.size != p.m:
            out.append(Violation(k, "b", f"expected length {p.m}, got {p.b.size}"))
        if p.num_eq < 0:
            out.append(Violation(k, "num_eq", "equality count is negative"))
        elif p.num_eq > p.m:
            out.append(Violation(k, "num_eq", "equality count exceeds constraint count"))
        for name in ("P", "c", "A", "b"):
            arr = getattr(p, name)
            if arr.size and not np.all(np.isfinite(arr)):
                out.append(Violation(k, name, "entries must be finite"))
    return out


def validate_direction(game: QpNepGame, direction: PerturbationDirection) -> List[Violation]:
    """Dimension and non-degeneracy checks of a perturbation direction."""
    out = []
    if direction.du.size != game.m:
        out.append(Violation(None, "du", f"expected length {game.m}, got {direction.du.size}"))
    if direction.dv.size != game.n:
        out.append(Violation(None, "dv", f"expected length {game.n}, got {direction.dv.size}"))
    if not out and direction.size == 0.0:
        out.append(Violation(None, "direction", "du and dv are both zero"))
    return out


def apply_tilt(game: QpNepGame, direction: PerturbationDirection, t: float) -> Perturbation:
    """
    Perturbation at parameter t along a direction: (u, v) = (t*du, t*dv).

    Raises:
        DimensionError: If the direction does not match the game.
    """
    if direction.du.size != game.m or direction.dv.size != game.n:
        raise DimensionError(
            f"direction has lengths ({direction.du.size}, {direction.dv.size}), "
            f"game needs ({game.m}, {game.n})"
        )
    return Perturbation(t * direction.du, t * direction.dv)


def _tilt(game: QpNepGame, v: Optional[np.ndarray]) -> np.ndarray:
    if v is None:
        return np.zeros(game.n)
    v = np.asarray(v, dtype=float)
    if v.size != game.n:
        raise DimensionError(f"tilt vector must have length {game.n}")
    return v


def player_objective(game: QpNepGame, k: int, x: np.ndarray, v: Optional[np.ndarray] = None) -> float:
    """Player k's objective 0.5 x^T P x - <c, x> - <v_k, x_k>."""
    p = game.players[k]
    x = np.asarray(x, dtype=float)
    blk = game.block(k)
    return float(0.5 * x @ p.P @ x - p.c @ x - _tilt(game, v)[blk] @ x[blk])


def player_gradient(game: QpNepGame, k: int, x: np.ndarray, v: Optional[np.ndarray] = None) -> np.ndarray:
    """Gradient of player k's objective with respect to its own block x_k."""
    p = game.players[k]
    x = np.asarray(x, dtype=float)
    blk = game.block(k)
    return p.P[blk, :] @ x - p.c[blk] - _tilt(game, v)[blk]
