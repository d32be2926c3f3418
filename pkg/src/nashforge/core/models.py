"""Data models for QP Nash games, KKT points and check results."""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from ..numerics.results import ConePositivityResult, Verdict


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float).reshape(-1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Player:
    """
    One player's QP data.

    Objective ``0.5 x^T P x - <c, x> - <v_k, x_k>`` over the player's block x_k,
    subject to ``A x_k = b + u`` on the first ``num_eq`` rows and ``A x_k <= b + u``
    on the rest.
    """

    n: int
    P: np.ndarray
    c: np.ndarray
    A: np.ndarray
    b: np.ndarray
    num_eq: int = 0

    def __post_init__(self):
        P = np.array(self.P, dtype=float)
        A = np.array(self.A, dtype=float)
        if A.size == 0:
            A = np.zeros((0, self.n))
        P.setflags(write=False)
        A.setflags(write=False)
        object.__setattr__(self, 'P', P)
        object.__setattr__(self, 'A', A)
        object.__setattr__(self, 'c', _frozen(self.c))
        object.__setattr__(self, 'b', _frozen(self.b))

    @property
    def m(self) -> int:
        return int(self.A.shape[0])

    @property
    def num_ineq(self) -> int:
        return self.m - self.num_eq

    @property
    def eq_rows(self) -> range:
        return range(self.num_eq)

    @property
    def ineq_rows(self) -> range:
        return range(self.num_eq, self.m)


@dataclass(frozen=True, eq=False)
class QpNepGame:
    """A Nash game of linearly constrained quadratic programs."""

    players: Tuple[Player, ...]
    warnings: Tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, 'players', tuple(self.players))
        object.__setattr__(self, 'warnings', tuple(self.warnings))

    @property
    def N(self) -> int:
        return len(self.players)

    @property
    def n(self) -> int:
        return sum(p.n for p in self.players)

    @property
    def m(self) -> int:
        return sum(p.m for p in self.players)

    @property
    def offsets(self) -> List[int]:
        """Start of each player's block in x (length N + 1)."""
        out = [0]
        for p in self.players:
            out.append(out[-1] + p.n)
        return out

    @property
    def con_offsets(self) -> List[int]:
        """Start of each player's block of constraints / multipliers (length N + 1)."""
        out = [0]
        for p in self.players:
            out.append(out[-1] + p.m)
        return out

    def block(self, k: int) -> slice:
        off = self.offsets
        return slice(off[k], off[k + 1])

    def con_block(self, k: int) -> slice:
        off = self.con_offsets
        return slice(off[k], off[k + 1])

    def own_block(self, k: int) -> np.ndarray:
        """P^k restricted to player k's rows and columns."""
        blk = self.block(k)
        return self.players[k].P[blk, blk]

    def cross_block(self, k: int, i: int) -> np.ndarray:
        """P^k restricted to player k's rows and player i's columns."""
        return self.players[k].P[self.block(k), self.block(i)]

    @property
    def num_ineq(self) -> int:
        return sum(p.num_ineq for p in self.players)

    def ineq_index(self) -> List[Tuple[int, int]]:
        """(player, local row) for every inequality, in player order."""
        return [(k, i) for k, p in enumerate(self.players) for i in p.ineq_rows]

    def constraint_matrix(self) -> np.ndarray:
        """Block-diagonal m x n matrix of all constraint rows embedded in R^n."""
        G = np.zeros((self.m, self.n))
        for k, p in enumerate(self.players):
            G[self.con_block(k), self.block(k)] = p.A
        return G

    @property
    def b(self) -> np.ndarray:
        return np.concatenate([p.b for p in self.players]) if self.m else np.zeros(0)


@dataclass(frozen=True, eq=False)
class Perturbation:
    """Tilt perturbation: right-hand-side shifts u and linear objective shifts v."""

    u: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'u', _frozen(self.u))
        object.__setattr__(self, 'v', _frozen(self.v))

    @classmethod
    def zero(cls, game: QpNepGame) -> 'Perturbation':
        return cls(np.zeros(game.m), np.zeros(game.n))

    @property
    def size(self) -> float:
        """Max-norm of the concatenated (u, v)."""
        both = np.concatenate([self.u, self.v])
        return float(np.max(np.abs(both))) if both.size else 0.0


@dataclass(frozen=True, eq=False)
class PerturbationDirection:
    """Direction of a tilt path u = t*du, v = t*dv."""

    du: np.ndarray
    dv: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'du', _frozen(self.du))
        object.__setattr__(self, 'dv', _frozen(self.dv))

    @property
    def size(self) -> float:
        both = np.concatenate([self.du, self.dv])
        return float(np.max(np.abs(both))) if both.size else 0.0


@dataclass(frozen=True, eq=False)
class KktPoint:
    """A primal-dual pair (x, lambda) of the game's KKT system."""

    x: np.ndarray
    lam: np.ndarray
    active_set: Tuple[int, ...] = ()  # global constraint indices of active inequalities
    residual: float = 0.0
    non_isolated: bool = False

    def __post_init__(self):
        object.__setattr__(self, 'x', _frozen(self.x))
        object.__setattr__(self, 'lam', _frozen(self.lam))
        object.__setattr__(self, 'active_set', tuple(int(i) for i in self.active_set))

    @property
    def z(self) -> np.ndarray:
        return np.concatenate([self.x, self.lam])

    def distance(self, other: 'KktPoint') -> float:
        """Max-norm distance between the stacked (x, lambda) vectors."""
        diff = self.z - other.z
        return float(np.max(np.abs(diff))) if diff.size else 0.0


@dataclass(frozen=True, eq=False)
class IndexSets:
    """
    Per-player classification of constraints at a KKT point.

    ``I1`` holds equalities and strongly active inequalities, ``I2`` weakly
    active inequalities and ``I3`` inactive ones; indices are local rows.
    """

    I1: Tuple[Tuple[int, ...], ...]
    I2: Tuple[Tuple[int, ...], ...]
    I3: Tuple[Tuple[int, ...], ...]
    tol_active: float

    @property
    def N(self) -> int:
        return len(self.I1)

    def active(self, k: int) -> Tuple[int, ...]:
        return tuple(sorted(self.I1[k] + self.I2[k]))

    def weak(self) -> List[Tuple[int, int]]:
        """(player, local row) for every weakly active constraint, in player order."""
        return [(k, i) for k in range(self.N) for i in self.I2[k]]

    @property
    def num_weak(self) -> int:
        return sum(len(s) for s in self.I2)

    def is_partition(self, game: QpNepGame) -> bool:
        for k, p in enumerate(game.players):
            parts = self.I1[k] + self.I2[k] + self.I3[k]
            if sorted(parts) != list(range(p.m)):
                return False
            if any(i not in self.I1[k] for i in p.eq_rows):
                return False
        return True


@dataclass
class CheckResult:
    """Verdict of one stability check, with its certificate or witness."""

    name: str
    verdict: Verdict
    witness: Optional[Dict[str, Any]] = None
    margin: Optional[float] = None
    method: str = "none"
    clause: Optional[str] = None
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.verdict is Verdict.HOLDS

    @property
    def fails(self) -> bool:
        return self.verdict is Verdict.FAILS

    @classmethod
    def from_positivity(cls, name: str, result: ConePositivityResult,
                        clause: Optional[str] = None, **details: Any) -> 'CheckResult':
        """Wrap a cone-positivity outcome; the witness is stored under ``y``."""
        witness = None if result.witness is None else {"y": np.asarray(result.witness).tolist()}
        info = dict(details)
        if result.best_value is not None:
            info["best_value"] = result.best_value
        if result.note:
            info["note"] = result.note
        return cls(
            name, result.verdict, witness=witness, margin=result.margin, method=result.method,
            clause=clause if result.fails else None, details=info,
        )
