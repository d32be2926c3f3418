"""
Strong regularity and C1-localization checks at a KKT point.

Orientation: the game Jacobian J has block (k, i) equal to P^k restricted to
player k's rows and player i's columns. The critical-face condition uses its
transpose M31 = J^T; the C1 condition and the monotone certificate use J.
"""

import itertools
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import linalg as la

from ..exceptions import GuardError
from ..numerics.cones import ConeSpec, cone_nonzero_ray
from ..numerics.linalg import min_eigpair, null_basis, sym
from ..numerics.results import Verdict
from ..utils.config import DEFAULTS
from ..utils.logging import get_logger
from .cq import check_licq, check_scsc, check_ssosc
from .models import CheckResult, IndexSets, QpNepGame

logger = get_logger(__name__)

ALPHA_LEVELS = (1, 2, 3, 4, 5)
ALPHA_SEARCH_CAP = 2000


@dataclass(frozen=True)
class GameJacobian:
    J: np.ndarray

    @property
    def M31(self) -> np.ndarray:
        return self.J.T


@dataclass(frozen=True)
class Partition:
    """Assignment of every constraint to J1 (equality), J2 (inequality) or J3 (dropped)."""

    J1: Tuple[Tuple[int, ...], ...]
    J2: Tuple[Tuple[int, ...], ...]
    J3: Tuple[Tuple[int, ...], ...]

    def to_dict(self) -> Dict[str, List[List[int]]]:
        return {"J1": [list(s) for s in self.J1], "J2": [list(s) for s in self.J2],
                "J3": [list(s) for s in self.J3]}


@dataclass(frozen=True)
class AlphaParams:
    """Pair weights alpha[i, j] > 0 (i != j) with zero diagonal and unit row sums."""

    alpha: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.alpha, dtype=float)
        N = a.shape[0]
        if a.shape != (N, N):
            raise ValueError("alpha must be square")
        off = ~np.eye(N, dtype=bool)
        if np.any(np.diag(a) != 0) or np.any(a[off] <= 0):
            raise ValueError("alpha needs a zero diagonal and positive off-diagonal entries")
        if N > 1 and not np.allclose(a.sum(axis=1), 1.0, atol=1e-12):
            raise ValueError("alpha rows must sum to one")
        object.__setattr__(self, 'alpha', a)

    @classmethod
    def uniform(cls, N: int) -> 'AlphaParams':
        a = np.full((N, N), 1.0 / max(N - 1, 1))
        np.fill_diagonal(a, 0.0)
        return cls(a)


def build_game_jacobian(game: QpNepGame) -> GameJacobian:
    """Stack every player's rows of its own P into the n x n game Jacobian."""
    J = np.zeros((game.n, game.n))
    for k, pl in enumerate(game.players):
        blk = game.block(k)
        J[blk, :] = pl.P[blk, :]
    return GameJacobian(J)


def enumerate_partitions(sets: IndexSets, max_weak: int = DEFAULTS.max_weak) -> List[Partition]:
    """
    All 3^|I2| partitions, as a ternary counter over the weakly active rows.

    The first weakly active row is the least significant digit; digit 0 puts it
    in J1, 1 in J2 and 2 in J3.

    Raises:
        GuardError: If |I2| exceeds ``max_weak``.
    """
    weak = sets.weak()
    if len(weak) > max_weak:
        raise GuardError(f"{len(weak)} weakly active rows exceed the partition limit {max_weak}")
    out = []
    for code in range(3 ** len(weak)):
        J1 = [list(s) for s in sets.I1]
        J2 = [[] for _ in range(sets.N)]
        J3 = [list(s) for s in sets.I3]
        for j, (k, i) in enumerate(weak):
            digit = code // 3 ** j % 3
            (J1, J2, J3)[digit][k].append(i)
        out.append(Partition(*(tuple(tuple(sorted(s)) for s in part) for part in (J1, J2, J3))))
    return out


def embedded_rows(game: QpNepGame, rows: Sequence[Sequence[int]]) -> np.ndarray:
    """Constraint rows of every player (local indices per player) embedded in R^n."""
    G = game.constraint_matrix()
    off = game.con_offsets
    picked = [off[k] + i for k in range(game.N) for i in rows[k]]
    return G[picked] if picked else np.zeros((0, game.n))


def cone_of(partition: Partition, game: QpNepGame) -> ConeSpec:
    """K(J1, J2): equalities on J1 rows, inequalities on J2 rows."""
    return ConeSpec.build(embedded_rows(game, partition.J1), embedded_rows(game, partition.J2),
                          dim=game.n)


def strongly_active_basis(game: QpNepGame, sets: IndexSets) -> List[np.ndarray]:
    """Per-player orthonormal bases B^k of {y : a_i y = 0, i in I1}."""
    return [null_basis(game.players[k].A[list(sets.I1[k])], game.players[k].n).B
            for k in range(game.N)]


def subspace_basis(game: QpNepGame, sets: IndexSets) -> np.ndarray:
    """Block-diagonal basis of the subspace M spanned by all players' B^k."""
    return la.block_diag(*strongly_active_basis(game, sets)) if game.N else np.zeros((0, 0))


def _licq_failure(game: QpNepGame, sets: IndexSets, name: str) -> Optional[CheckResult]:
    failing = [k for k in range(game.N) if not check_licq(game, sets, k)]
    if failing:
        return CheckResult(name, Verdict.FAILS, method="rank", clause="LICQ",
                           details={"players": failing})
    return None


def check_critical_face(game: QpNepGame, sets: IndexSets,
                        max_weak: int = DEFAULTS.max_weak) -> CheckResult:
    """
    Exact strong-regularity test.

    For every partition, look for y != 0 in K(J1, J2) with M31 y in the polar
    cone {E^T mu + F^T nu : nu >= 0}. The joint system in (y, mu, nu) is
    homogeneous, so one LP per y-coordinate and sign decides it.
    """
    name = "strong_regularity"
    failed = _licq_failure(game, sets, name)
    if failed is not None:
        return failed
    M31 = build_game_jacobian(game).M31
    n = game.n
    partitions = enumerate_partitions(sets, max_weak)
    for idx, part in enumerate(partitions):
        cone = cone_of(part, game)
        e, f = cone.E.shape[0], cone.F.shape[0]
        eq = np.vstack([
            np.hstack([cone.E, np.zeros((e, e + f))]),
            np.hstack([M31, -cone.E.T, -cone.F.T]),
        ])
        ineq = np.vstack([
            np.hstack([cone.F, np.zeros((f, e + f))]),
            np.hstack([np.zeros((f, n + e)), -np.eye(f)]),
        ])
        ray = cone_nonzero_ray(eq, ineq, dim=n + e + f, coords=range(n))
        if ray is not None:
            y = ray[:n]
            logger.debug(f"critical face fails on partition {idx}")
            return CheckResult(
                name, Verdict.FAILS, witness={"partition": part.to_dict(), "y": y.tolist()},
                method="lp", clause="critical-face",
                details={"partitions_checked": idx + 1},
            )
    return CheckResult(name, Verdict.HOLDS, method="lp",
                       details={"partitions_checked": len(partitions)})


def _alpha_candidates(N: int, alpha: Union[None, str, AlphaParams]) -> List[AlphaParams]:
    if isinstance(alpha, AlphaParams):
        return [alpha]
    out = [AlphaParams.uniform(N)]
    if alpha != "search" or N <= 2:
        return out
    rows = sorted({tuple(np.array(w) / sum(w)) for w in itertools.product(ALPHA_LEVELS, repeat=N - 1)})
    for combo in itertools.islice(itertools.product(rows, repeat=N), ALPHA_SEARCH_CAP):
        a = np.zeros((N, N))
        for i, row in enumerate(combo):
            a[i, [j for j in range(N) if j != i]] = row
        out.append(AlphaParams(a))
    return out


def _schur_margins(game: QpNepGame, bases: List[np.ndarray], inverses: List[np.ndarray],
                   alpha: np.ndarray) -> Dict[Tuple[int, int], float]:
    margins = {}
    for i, k in itertools.permutations(range(game.N), 2):
        Bk, Bi = bases[k], bases[i]
        if Bk.shape[1] == 0:
            margins[(i, k)] = math.inf
            continue
        T = game.cross_block(i, k) + game.cross_block(k, i).T
        coupling = T.T @ Bi @ inverses[i] @ Bi.T @ T if Bi.shape[1] else 0.0
        S = Bk.T @ (game.own_block(k) - coupling / (4.0 * alpha[i, k] * alpha[k, i])) @ Bk
        margins[(i, k)] = min_eigpair(sym(S))[0]
    return margins


def check_strong_regularity_sufficient(game: QpNepGame, sets: IndexSets,
                                       alpha: Union[None, str, AlphaParams] = None,
                                       tol: float = DEFAULTS.tol_rank) -> CheckResult:
    """
    Sufficient strong-regularity condition: LICQ, SSOSC for every player and a
    positive Schur complement for every ordered pair of players.

    Args:
        game: The game.
        sets: Index sets at the KKT point.
        alpha: None or "uniform" for alpha = 1/(N-1), "search" to also try a
            grid of row-stochastic weights, or explicit AlphaParams.
        tol: Positivity threshold for the eigenvalue tests.

    Returns:
        HOLDS, FAILS on LICQ/SSOSC failure, UNDECIDED when only the Schur
        items fail (the condition is sufficient, not necessary).
    """
    name = "strong_regularity_sufficient"
    failed = _licq_failure(game, sets, name)
    if failed is not None:
        return failed
    ssosc = [check_ssosc(game, sets, k, tol) for k in range(game.N)]
    details = {"ssosc_margins": [s.margin for s in ssosc]}
    for k, s in enumerate(ssosc):
        if s.fails:
            return CheckResult(name, Verdict.FAILS, witness={"player": k, "y": s.witness.tolist()},
                               method="eigen", clause="SSOSC", details=details)
    if any(not s.holds for s in ssosc):
        return CheckResult(name, Verdict.UNDECIDED, method="eigen", details=details)
    if game.N == 1:
        return CheckResult(name, Verdict.HOLDS, margin=ssosc[0].margin, method="eigen", details=details)

    bases = strongly_active_basis(game, sets)
    inverses = []
    for k, B in enumerate(bases):
        if B.shape[1] == 0:
            inverses.append(np.zeros((0, 0)))
            continue
        reduced = B.T @ game.own_block(k) @ B
        if ssosc[k].margin is None or ssosc[k].margin <= tol:
            details["note"] = f"player {k} reduced block is singular"
            return CheckResult(name, Verdict.UNDECIDED, method="schur", details=details)
        inverses.append(np.linalg.inv(sym(reduced)))

    best = None
    for params in _alpha_candidates(game.N, alpha):
        margins = _schur_margins(game, bases, inverses, params.alpha)
        worst = min(margins.values())
        if best is None or worst > best[0]:
            best = (worst, params, margins)
        if worst > tol:
            break
    worst, params, margins = best
    details["schur_margins"] = {f"{i},{k}": v for (i, k), v in margins.items()}
    details["alpha"] = params.alpha.tolist()
    if worst > tol:
        margin = min(worst, min(s.margin for s in ssosc))
        return CheckResult(name, Verdict.HOLDS, margin=margin, method="schur", details=details)
    return CheckResult(name, Verdict.UNDECIDED, method="schur", details=details)


def check_strong_regularity_monotone(game: QpNepGame, sets: IndexSets,
                                     tol: float = DEFAULTS.tol_rank) -> CheckResult:
    """LICQ plus positive definiteness of sym(J) on the subspace M."""
    name = "strong_regularity_monotone"
    failed = _licq_failure(game, sets, name)
    if failed is not None:
        return failed
    B = subspace_basis(game, sets)
    if B.shape[1] == 0:
        return CheckResult(name, Verdict.HOLDS, margin=math.inf, method="vacuous")
    lam, _ = min_eigpair(B.T @ sym(build_game_jacobian(game).J) @ B)
    if lam > tol:
        return CheckResult(name, Verdict.HOLDS, margin=lam, method="eigen")
    return CheckResult(name, Verdict.UNDECIDED, method="eigen", details={"min_eig": lam})


def check_c1_localization(game: QpNepGame, sets: IndexSets,
                          tol: float = DEFAULTS.tol_rank) -> CheckResult:
    """
    Exact C1-localization test: SCSC, LICQ, and B^T J B nonsingular where B
    spans M.
    """
    name = "c1_localization"
    scsc = check_scsc(sets)
    if not all(scsc):
        return CheckResult(name, Verdict.FAILS, method="index-sets", clause="SCSC",
                           details={"players": [k for k, ok in enumerate(scsc) if not ok]})
    failed = _licq_failure(game, sets, name)
    if failed is not None:
        return failed
    B = subspace_basis(game, sets)
    if B.shape[1] == 0:
        return CheckResult(name, Verdict.HOLDS, margin=math.inf, method="vacuous")
    R = B.T @ build_game_jacobian(game).J @ B
    _, s, Vt = la.svd(R)
    if s[-1] <= tol * max(1.0, s[0]):
        return CheckResult(name, Verdict.FAILS, witness={"y": (B @ Vt[-1]).tolist()},
                           margin=None, method="svd", clause="NONSINGULAR",
                           details={"min_singular_value": float(s[-1])})
    return CheckResult(name, Verdict.HOLDS, margin=float(s[-1]), method="svd")


def check_c1_localization_sufficient(game: QpNepGame, sets: IndexSets,
                                     alpha: Union[None, str, AlphaParams] = None) -> CheckResult:
    """SCSC plus the sufficient strong-regularity condition."""
    name = "c1_localization_sufficient"
    scsc = check_scsc(sets)
    if not all(scsc):
        return CheckResult(name, Verdict.FAILS, method="index-sets", clause="SCSC",
                           details={"players": [k for k, ok in enumerate(scsc) if not ok]})
    inner = check_strong_regularity_sufficient(game, sets, alpha)
    return CheckResult(name, inner.verdict, witness=inner.witness, margin=inner.margin,
                       method=inner.method, clause=inner.clause, details=inner.details)
