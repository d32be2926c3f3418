"""Game and direction file ingestion."""

import json
from pathlib import Path
from typing import Any, Dict, List, Union

import numpy as np

from ..core.game import symmetrized_game, validate_direction, validate_game
from ..core.models import Player, PerturbationDirection, QpNepGame
from ..exceptions import GameFormatError
from ..utils.logging import get_logger
from .config import DIRECTION_SUFFIX, FIXTURE_DIR, FIXTURE_NAMES, GAME_SUFFIX

logger = get_logger(__name__)

PathLike = Union[str, Path]


def _read_json(path: PathLike) -> Any:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"no such file: {path}")
    try:
        with open(path, 'r', encoding='utf-8') as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise GameFormatError(f"{path}: not valid JSON ({e.msg} at line {e.lineno})") from e


def _matrix(value: Any, player: int, field: str, cols: int) -> np.ndarray:
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError) as e:
        raise GameFormatError("expected a numeric matrix", player, field) from e
    if arr.size == 0:
        return np.zeros((0, cols))
    if arr.ndim != 2:
        raise GameFormatError(f"expected a 2-D array, got {arr.ndim} dimension(s)", player, field)
    return arr


def _vector(value: Any, player: Any, field: str) -> np.ndarray:
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError) as e:
        raise GameFormatError("expected a numeric vector", player, field) from e
    if arr.ndim > 1:
        raise GameFormatError("expected a 1-D array", player, field)
    return arr.reshape(-1)


def _dimension(record: Any, k: int) -> int:
    if not isinstance(record, dict):
        raise GameFormatError("player record must be an object", k)
    if "n" not in record:
        raise GameFormatError("missing field", k, "n")
    n = record["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n <= 0:
        raise GameFormatError(f"strategy dimension must be a positive integer, got {n!r}", k, "n")
    return n


def _player(record: Dict[str, Any], k: int, n: int, n_total: int) -> Player:
    missing = [key for key in ("P", "c", "A", "b") if key not in record]
    if missing:
        raise GameFormatError("missing field", k, missing[0])
    num_eq = record.get("num_eq", 0)
    if not isinstance(num_eq, int) or isinstance(num_eq, bool):
        raise GameFormatError(f"equality count must be an integer, got {num_eq!r}", k, "num_eq")
    P = _matrix(record["P"], k, "P", n_total)
    if P.shape != (n_total, n_total):
        raise GameFormatError(f"expected shape ({n_total}, {n_total}), got {P.shape}", k, "P")
    c = _vector(record["c"], k, "c")
    if c.size != n_total:
        raise GameFormatError(f"expected length {n_total}, got {c.size}", k, "c")
    A = _matrix(record["A"], k, "A", n)
    if A.shape[1] != n:
        raise GameFormatError(f"expected {n} columns, got {A.shape[1]}", k, "A")
    b = _vector(record["b"], k, "b")
    if b.size != A.shape[0]:
        raise GameFormatError(f"expected length {A.shape[0]}, got {b.size}", k, "b")
    if num_eq < 0 or num_eq > A.shape[0]:
        raise GameFormatError("equality count exceeds constraint count" if num_eq > 0
                              else "equality count is negative", k, "num_eq")
    return Player(n, P, c, A, b, num_eq)


def parse_game(document: Any) -> QpNepGame:
    """
    Build a validated game from a parsed game document.

    P matrices are replaced by their symmetric parts; a warning is attached to
    the game when the asymmetry exceeds 1e-12.

    Raises:
        GameFormatError: On schema errors, naming the player and field.
    """
    if not isinstance(document, dict) or "players" not in document:
        raise GameFormatError("missing top-level field 'players'")
    records = document["players"]
    if not isinstance(records, list):
        raise GameFormatError("'players' must be a list")
    if not records:
        raise GameFormatError("no players")
    # Every block size must be known before any shape against n_total is checked.
    dims = [_dimension(r, k) for k, r in enumerate(records)]
    n_total = sum(dims)
    players: List[Player] = [_player(r, k, n, n_total)
                             for k, (r, n) in enumerate(zip(records, dims))]

    game = symmetrized_game(players)
    violations = validate_game(game)
    if violations:
        v = violations[0]
        raise GameFormatError(v.message, v.player, v.field)
    return game


def load_game(path: PathLike) -> QpNepGame:
    """
    Load a game file.

    Args:
        path: JSON game file.

    Returns:
        The validated, symmetrized game.

    Raises:
        FileNotFoundError: If the file does not exist.
        GameFormatError: On parse, schema or dimension errors.
    """
    try:
        game = parse_game(_read_json(path))
    except GameFormatError as e:
        logger.error(f"Error loading game {path}: {e}")
        raise
    logger.info(f"Loaded game from {path}: N={game.N}, n={game.n}, m={game.m}")
    return game


def load_direction(path: PathLike, game: QpNepGame = None) -> PerturbationDirection:
    """
    Load a perturbation direction file {"du": [...], "dv": [...]}.

    When a game is given the direction is validated against it.
    """
    doc = _read_json(path)
    if not isinstance(doc, dict) or "du" not in doc or "dv" not in doc:
        raise GameFormatError(f"{path}: direction needs fields 'du' and 'dv'")
    direction = PerturbationDirection(_vector(doc["du"], None, "du"), _vector(doc["dv"], None, "dv"))
    if game is not None:
        violations = validate_direction(game, direction)
        if violations:
            raise GameFormatError(violations[0].message, field=violations[0].field)
    return direction


def fixture_name(name: str) -> str:
    """Canonical fixture name (case-insensitive match), or raise KeyError."""
    upper = str(name).upper()
    if upper not in FIXTURE_NAMES:
        raise KeyError(f"unknown fixture {name!r}; choose from {', '.join(FIXTURE_NAMES)}")
    return upper


def is_fixture(name: str) -> bool:
    return str(name).upper() in FIXTURE_NAMES


def load_fixture(name: str) -> QpNepGame:
    """Load one of the bundled example games (EX31, EX32, EX61, EX62)."""
    return load_game(FIXTURE_DIR / f"{fixture_name(name).lower()}{GAME_SUFFIX}")


def load_fixture_direction(name: str) -> PerturbationDirection:
    """Load the bundled perturbation direction of a fixture."""
    key = fixture_name(name).lower()
    return load_direction(FIXTURE_DIR / f"{key}{DIRECTION_SUFFIX}", load_fixture(name))


def load_game_source(source: str) -> QpNepGame:
    """Load a fixture by name or a game by path."""
    if is_fixture(source) and not Path(source).exists():
        return load_fixture(source)
    return load_game(source)


def game_to_dict(game: QpNepGame) -> Dict[str, Any]:
    """Game document in the file schema."""
    return {"players": [{
        "n": p.n, "P": p.P.tolist(), "c": p.c.tolist(), "A": p.A.tolist(),
        "b": p.b.tolist(), "num_eq": p.num_eq,
    } for p in game.players]}
