"""KKT point enumeration, residuals and index-set classification for QP Nash games."""

from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from ..exceptions import GuardError, NotKktPointError
from ..numerics.cones import ConeSpec
from ..numerics.linalg import rank
from ..numerics.positivity import Mode, quad_family_positive_on_cone
from ..numerics.results import Verdict
from ..numerics.simplex import solve_lp
from ..utils.config import DEFAULTS
from ..utils.logging import get_logger
from .cq import check_convexity
from .game import player_gradient
from .models import CheckResult, IndexSets, KktPoint, Perturbation, QpNepGame

logger = get_logger(__name__)

DEDUP_RADIUS = 1e-7

PointLike = Union[KktPoint, Tuple[np.ndarray, np.ndarray]]


def _unpack(point: PointLike) -> Tuple[np.ndarray, np.ndarray]:
    if isinstance(point, KktPoint):
        return point.x, point.lam
    x, lam = point
    return np.asarray(x, dtype=float), np.asarray(lam, dtype=float)


def constraint_slack(game: QpNepGame, p: Perturbation, x: np.ndarray) -> np.ndarray:
    """b + u - G x for every constraint row (nonnegative when feasible)."""
    if game.m == 0:
        return np.zeros(0)
    return game.b + p.u - game.constraint_matrix() @ np.asarray(x, dtype=float)


def kkt_residual(game: QpNepGame, p: Perturbation, point: PointLike) -> float:
    """
    Max-norm defect of the KKT system at (x, lambda).

    Covers stationarity of every player's Lagrangian, equality defects,
    inequality violations, negative multipliers and complementarity.
    """
    x, lam = _unpack(point)
    defects = [0.0]
    for k, pl in enumerate(game.players):
        grad = player_gradient(game, k, x, p.v) + pl.A.T @ lam[game.con_block(k)]
        if grad.size:
            defects.append(float(np.max(np.abs(grad))))

    slack = constraint_slack(game, p, x)
    off = game.con_offsets
    for k, pl in enumerate(game.players):
        for i in range(pl.m):
            g = off[k] + i
            if i < pl.num_eq:
                defects.append(abs(slack[g]))
            else:
                defects.extend([max(0.0, -slack[g]), max(0.0, -lam[g]), abs(lam[g] * slack[g])])
    return float(max(defects))


def _stationarity_system(game: QpNepGame, p: Perturbation,
                         active: Sequence[int]) -> Tuple[np.ndarray, np.ndarray]:
    """Square system in (x, lambda_active) for a fixed active set of global rows."""
    n, na = game.n, len(active)
    G = game.constraint_matrix()
    M = np.zeros((n + na, n + na))
    rhs = np.zeros(n + na)
    for k, pl in enumerate(game.players):
        blk = game.block(k)
        M[blk, :n] = pl.P[blk, :]
        rhs[blk] = pl.c[blk] + p.v[blk]
    if na:
        M[:n, n:] = G[active, :].T
        M[n:, :n] = G[active, :]
        rhs[n:] = game.b[active] + p.u[active]
    return M, rhs


def _singular_representative(game: QpNepGame, p: Perturbation, M: np.ndarray, rhs: np.ndarray,
                             active: List[int], free_mask: np.ndarray,
                             tol_kkt: float) -> Optional[np.ndarray]:
    w = np.linalg.lstsq(M, rhs, rcond=None)[0]
    if np.max(np.abs(M @ w - rhs), initial=0.0) > tol_kkt * max(1.0, float(np.max(np.abs(rhs), initial=0.0))):
        return None
    n = game.n
    inactive = [g for g in range(game.m) if g not in active]
    slack = constraint_slack(game, p, w[:n])
    if np.all(w[n:][~free_mask[n:]] >= -tol_kkt) and np.all(slack[inactive] >= -tol_kkt):
        return w

    G = game.constraint_matrix()
    A_ub = np.hstack([G[inactive, :], np.zeros((len(inactive), len(active)))])
    b_ub = game.b[inactive] + p.u[inactive]
    res = solve_lp(np.zeros(w.size), A_eq=M, b_eq=rhs, A_ub=A_ub, b_ub=b_ub, free=free_mask)
    return res.x if res.feasible else None


def enumerate_kkt(
    game: QpNepGame,
    p: Perturbation,
    max_ineq: int = DEFAULTS.max_ineq,
    tol_kkt: float = DEFAULTS.tol_kkt,
    tol_rank: float = DEFAULTS.tol_rank,
) -> List[KktPoint]:
    """
    Enumerate all KKT points by active-set enumeration.

    Every subset of inequality rows is treated as active and the resulting
    linear system in (x, lambda) is solved. Singular but consistent systems
    contribute one representative flagged ``non_isolated``. Points closer than
    1e-7 in max-norm are merged.

    Args:
        game: The game.
        p: Tilt perturbation.
        max_ineq: Largest number of inequality rows accepted.
        tol_kkt: Residual tolerance for accepting a point.
        tol_rank: Relative rank threshold for the subsystems.

    Returns:
        KKT points ordered by the bitmask of the first active set producing them.

    Raises:
        GuardError: If the game has more than ``max_ineq`` inequality rows.
    """
    ineq = game.ineq_index()
    if len(ineq) > max_ineq:
        raise GuardError(f"{len(ineq)} inequality rows exceed the enumeration limit {max_ineq}")
    off = game.con_offsets
    eq_rows = [off[k] + i for k, pl in enumerate(game.players) for i in pl.eq_rows]
    ineq_rows = [off[k] + i for k, i in ineq]

    points: List[KktPoint] = []
    for mask in range(1 << len(ineq_rows)):
        chosen = [g for j, g in enumerate(ineq_rows) if mask >> j & 1]
        active = sorted(eq_rows + chosen)
        M, rhs = _stationarity_system(game, p, active)
        free_mask = np.ones(game.n + len(active), dtype=bool)
        free_mask[game.n:] = [g in eq_rows for g in active]

        singular = rank(M, tol_rank) < M.shape[0] if M.size else False
        if singular:
            w = _singular_representative(game, p, M, rhs, active, free_mask, tol_kkt)
            if w is None:
                continue
        else:
            w = np.linalg.solve(M, rhs) if M.size else np.zeros(0)

        lam = np.zeros(game.m)
        lam[active] = w[game.n:]
        x = w[:game.n]
        residual = kkt_residual(game, p, (x, lam))
        if residual > tol_kkt:
            continue
        candidate = KktPoint(x, lam, tuple(chosen), residual, singular)
        logger.debug(f"active set {mask:#b}: KKT point with residual {residual:.2e}"
                     f"{' (singular)' if singular else ''}")
        points = _merge(points, candidate)

    logger.debug(f"{len(points)} KKT point(s) from {1 << len(ineq_rows)} active sets")
    return points


def _merge(points: List[KktPoint], candidate: KktPoint) -> List[KktPoint]:
    for idx, q in enumerate(points):
        if q.distance(candidate) <= DEDUP_RADIUS:
            if candidate.non_isolated and not q.non_isolated:
                points[idx] = KktPoint(q.x, q.lam, q.active_set, q.residual, True)
            return points
    points.append(candidate)
    return points


def sort_points(points: Sequence[KktPoint]) -> List[KktPoint]:
    """Points in lexicographic order of x (then lambda)."""
    return sorted(points, key=lambda q: (tuple(np.round(q.x, 12)), tuple(np.round(q.lam, 12))))


def classify_index_sets(game: QpNepGame, p: Perturbation, point: PointLike,
                        tol_active: float = DEFAULTS.tol_active) -> IndexSets:
    """
    Split every player's constraints into I1 (strongly active and equalities),
    I2 (weakly active) and I3 (inactive).

    Raises:
        NotKktPointError: If a constraint has a positive multiplier but is not tight.
    """
    x, lam = _unpack(point)
    slack = constraint_slack(game, p, x)
    off = game.con_offsets
    I1, I2, I3 = [], [], []
    for k, pl in enumerate(game.players):
        s1, s2, s3 = [], [], []
        for i in range(pl.m):
            g = off[k] + i
            tight = abs(slack[g]) <= tol_active
            if i < pl.num_eq:
                s1.append(i)
            elif tight and lam[g] > tol_active:
                s1.append(i)
            elif tight:
                s2.append(i)
            elif lam[g] > tol_active:
                raise NotKktPointError(
                    f"player {k} row {i}: multiplier {lam[g]:.3g} with slack {slack[g]:.3g}"
                )
            else:
                s3.append(i)
        I1.append(tuple(s1))
        I2.append(tuple(s2))
        I3.append(tuple(s3))
    return IndexSets(tuple(I1), tuple(I2), tuple(I3), tol_active)


def player_critical_cone(game: QpNepGame, k: int, sets: IndexSets) -> ConeSpec:
    """{y : a_i y = 0 (i in I1), a_i y <= 0 (i in I2)} in player k's own coordinates."""
    A = game.players[k].A
    return ConeSpec.build(A[list(sets.I1[k])], A[list(sets.I2[k])], dim=game.players[k].n)


def check_local_nash(
    game: QpNepGame,
    p: Perturbation,
    point: PointLike,
    tol_active: float = DEFAULTS.tol_active,
    grid_res: float = DEFAULTS.grid_res,
    starts: int = DEFAULTS.starts,
    seed: int = DEFAULTS.seed,
) -> CheckResult:
    """
    Whether a KKT point is a (local) Nash equilibrium.

    Convex players are settled by the KKT conditions; the others must pass the
    second-order sufficient condition on their critical cone.
    """
    sets = classify_index_sets(game, p, point, tol_active)
    convex = check_convexity(game)
    undecided = []
    details = {"convex": [c.convex for c in convex]}
    for k in range(game.N):
        if convex[k].convex:
            continue
        res = quad_family_positive_on_cone(
            [game.own_block(k)], player_critical_cone(game, k, sets), Mode.MAX,
            grid_res=grid_res, starts=starts, seed=seed,
        )
        if res.fails:
            return CheckResult(
                "local_nash", Verdict.FAILS,
                witness={"player": k, "y": res.witness.tolist()},
                method=res.method, clause="SOSC", details=details,
            )
        if not res.holds:
            undecided.append(k)
    if undecided:
        details["undecided_players"] = undecided
        return CheckResult("local_nash", Verdict.UNDECIDED, method="sosc", details=details)
    return CheckResult("local_nash", Verdict.HOLDS, method="convexity+sosc", details=details)
