"""
Dense two-phase simplex with Bland's anti-cycling rule.

Solves small LPs of the form::

    min  c^T y   s.t.  A_eq y = b_eq,  A_ub y <= b_ub

where each variable is either free or nonnegative. Free variables are split
into positive and negative parts, inequality rows receive slacks, and every row
starts with an artificial variable for phase 1.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from ..exceptions import DimensionError, NumericalError
from ..utils.logging import get_logger
from .linalg import as_rows

logger = get_logger(__name__)

PIVOT_TOL = 1e-10
FEAS_TOL = 1e-9


class LpStatus(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LpResult:
    """Outcome of :func:`solve_lp`. ``x`` is a feasible point unless INFEASIBLE."""

    status: LpStatus
    x: Optional[np.ndarray] = None
    objective: Optional[float] = None
    iterations: int = 0

    @property
    def feasible(self) -> bool:
        return self.status is not LpStatus.INFEASIBLE


@dataclass
class _StandardForm:
    A: np.ndarray
    b: np.ndarray
    c: np.ndarray
    plus_cols: List[int] = field(default_factory=list)
    minus_cols: List[int] = field(default_factory=list)


class DenseSimplex:
    """Tableau simplex over dense numpy arrays."""

    def __init__(self, pivot_tol: float = PIVOT_TOL, feas_tol: float = FEAS_TOL,
                 max_iter: Optional[int] = None):
        self.pivot_tol = pivot_tol
        self.feas_tol = feas_tol
        self.max_iter = max_iter
        self.iterations = 0

    @staticmethod
    def _pivot(T: np.ndarray, row: int, col: int) -> None:
        T[row, :] /= T[row, col]
        for r in range(T.shape[0]):
            if r != row and T[r, col] != 0.0:
                T[r, :] -= T[r, col] * T[row, :]

    def _enter(self, cost_row: np.ndarray) -> int:
        # Bland: smallest index with negative reduced cost.
        idx = np.flatnonzero(cost_row[:-1] < -self.pivot_tol)
        return int(idx[0]) if idx.size else -1

    def _leave(self, T: np.ndarray, col: int, basis: List[int]) -> int:
        column = T[:-1, col]
        rows = np.flatnonzero(column > self.pivot_tol)
        if rows.size == 0:
            return -1
        ratios = T[rows, -1] / column[rows]
        best = ratios.min()
        ties = rows[ratios <= best + self.pivot_tol * max(1.0, abs(best))]
        # Bland: among tied rows, the basic variable with the smallest index leaves.
        return int(min(ties, key=lambda r: basis[r]))

    def _run(self, T: np.ndarray, basis: List[int]) -> LpStatus:
        limit = self.max_iter or 50 * (T.shape[0] + T.shape[1])
        for _ in range(limit):
            col = self._enter(T[-1, :])
            if col < 0:
                return LpStatus.OPTIMAL
            row = self._leave(T, col, basis)
            if row < 0:
                return LpStatus.UNBOUNDED
            self._pivot(T, row, col)
            basis[row] = col
            self.iterations += 1
        raise NumericalError(f"simplex iteration guard exceeded ({limit} pivots)")

    @staticmethod
    def _standard_form(c: np.ndarray, A_eq: np.ndarray, b_eq: np.ndarray,
                       A_ub: np.ndarray, b_ub: np.ndarray,
                       nonneg: np.ndarray) -> _StandardForm:
        n = c.size
        plus_cols, minus_cols, col = [], [], 0
        for j in range(n):
            plus_cols.append(col)
            col += 1
            if nonneg[j]:
                minus_cols.append(-1)
            else:
                minus_cols.append(col)
                col += 1
        n_split = col
        m_eq, m_ub = A_eq.shape[0], A_ub.shape[0]
        A = np.zeros((m_eq + m_ub, n_split + m_ub))
        c_std = np.zeros(n_split + m_ub)
        for j in range(n):
            A[:m_eq, plus_cols[j]] = A_eq[:, j]
            A[m_eq:, plus_cols[j]] = A_ub[:, j]
            c_std[plus_cols[j]] = c[j]
            if minus_cols[j] >= 0:
                A[:m_eq, minus_cols[j]] = -A_eq[:, j]
                A[m_eq:, minus_cols[j]] = -A_ub[:, j]
                c_std[minus_cols[j]] = -c[j]
        A[m_eq:, n_split:] = np.eye(m_ub)
        b = np.concatenate([b_eq, b_ub])
        neg = b < 0
        A[neg] *= -1.0
        b = np.where(neg, -b, b)
        return _StandardForm(A, b, c_std, plus_cols, minus_cols)

    def solve(self, c: np.ndarray, A_eq: np.ndarray, b_eq: np.ndarray,
              A_ub: np.ndarray, b_ub: np.ndarray, nonneg: np.ndarray) -> LpResult:
        self.iterations = 0
        sf = self._standard_form(c, A_eq, b_eq, A_ub, b_ub, nonneg)
        m, ncols = sf.A.shape

        # Phase 1: minimize the sum of artificials (columns ncols..ncols+m-1).
        T = np.zeros((m + 1, ncols + m + 1))
        T[:m, :ncols] = sf.A
        T[:m, ncols:ncols + m] = np.eye(m)
        T[:m, -1] = sf.b
        T[-1, :ncols] = -sf.A.sum(axis=0)
        T[-1, -1] = -sf.b.sum()
        basis = list(range(ncols, ncols + m))
        self._run(T, basis)

        infeasibility = -T[-1, -1]
        if infeasibility > self.feas_tol * max(1.0, float(np.max(sf.b, initial=0.0))):
            logger.debug(f"LP infeasible (phase 1 value {infeasibility:.3e})")
            return LpResult(LpStatus.INFEASIBLE, iterations=self.iterations)

        # Drive remaining artificials out of the basis; drop redundant rows.
        keep = []
        for r in range(m):
            if basis[r] >= ncols:
                cand = np.flatnonzero(np.abs(T[r, :ncols]) > self.pivot_tol)
                if cand.size == 0:
                    continue
                self._pivot(T, r, int(cand[0]))
                basis[r] = int(cand[0])
            keep.append(r)

        # Phase 2 tableau without artificial columns.
        T2 = np.zeros((len(keep) + 1, ncols + 1))
        T2[:-1, :ncols] = T[keep, :ncols]
        T2[:-1, -1] = T[keep, -1]
        basis2 = [basis[r] for r in keep]
        c_basis = sf.c[basis2]
        T2[-1, :ncols] = sf.c - c_basis @ T2[:-1, :ncols]
        T2[-1, -1] = -c_basis @ T2[:-1, -1]
        status = self._run(T2, basis2)

        y_std = np.zeros(ncols)
        y_std[basis2] = T2[:-1, -1]
        x = np.array([
            y_std[p] - (y_std[q] if q >= 0 else 0.0)
            for p, q in zip(sf.plus_cols, sf.minus_cols)
        ])
        objective = float(c @ x) if status is LpStatus.OPTIMAL else float("-inf")
        return LpResult(status, x, objective, self.iterations)


def _prepare(c, A_eq, b_eq, A_ub, b_ub, free) -> Tuple[np.ndarray, ...]:
    c = np.asarray(c, dtype=float).ravel()
    n = c.size
    A_eq = as_rows(A_eq if A_eq is not None else np.zeros((0, n)), n)
    A_ub = as_rows(A_ub if A_ub is not None else np.zeros((0, n)), n)
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=float).ravel()
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=float).ravel()
    if A_eq.shape[1] != n or A_ub.shape[1] != n:
        raise DimensionError(f"constraint matrices must have {n} columns")
    if b_eq.size != A_eq.shape[0] or b_ub.size != A_ub.shape[0]:
        raise DimensionError("right-hand side length does not match constraint rows")
    if isinstance(free, (bool, np.bool_)):
        nonneg = np.full(n, not free)
    else:
        nonneg = ~np.asarray(free, dtype=bool)
        if nonneg.size != n:
            raise DimensionError(f"free mask must have length {n}")
    return c, A_eq, b_eq, A_ub, b_ub, nonneg


def solve_lp(c: Sequence[float], A_eq=None, b_eq=None, A_ub=None, b_ub=None,
             free: Union[bool, Sequence[bool]] = True) -> LpResult:
    """
    Solve a small dense LP with the two-phase Bland simplex.

    Args:
        c: Objective coefficients (length n); pass zeros for a feasibility problem.
        A_eq, b_eq: Equality rows (may be None or have 0 rows).
        A_ub, b_ub: ``<=`` rows (may be None or have 0 rows).
        free: True for all-free variables, False for all-nonnegative, or a per-variable mask.

    Returns:
        LpResult with status OPTIMAL, INFEASIBLE or UNBOUNDED.

    Raises:
        DimensionError: On inconsistent shapes.
        NumericalError: When the pivot guard is exceeded.
    """
    c, A_eq, b_eq, A_ub, b_ub, nonneg = _prepare(c, A_eq, b_eq, A_ub, b_ub, free)
    return DenseSimplex().solve(c, A_eq, b_eq, A_ub, b_ub, nonneg)
