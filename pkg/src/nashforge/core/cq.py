"""Constraint qualifications and per-player second-order checks."""

import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np
import pandas as pd

from ..numerics.cones import lp_feasible_strict
from ..numerics.linalg import min_eigpair, null_basis, rank
from ..numerics.results import ConePositivityResult, Verdict
from ..utils.config import DEFAULTS
from ..utils.logging import get_logger
from .models import IndexSets, QpNepGame

logger = get_logger(__name__)


@dataclass(frozen=True)
class SmfcqResult:
    holds: bool
    direction: Optional[np.ndarray] = None


@dataclass(frozen=True)
class Convexity:
    convex: bool
    min_eig: float


def _rows(game: QpNepGame, k: int, rows) -> np.ndarray:
    return game.players[k].A[list(rows)]


def check_licq(game: QpNepGame, sets: IndexSets, k: int) -> bool:
    """Rows of player k's A indexed by I1 and I2 are linearly independent."""
    rows = _rows(game, k, sets.active(k))
    return rank(rows) == rows.shape[0] if rows.shape[0] else True


def check_smfcq(game: QpNepGame, sets: IndexSets, k: int) -> SmfcqResult:
    """
    Strict MFCQ for player k: A_I1 has full row rank and some y has
    A_I1 y = 0, A_I2 y < 0 (normalized to <= -1).
    """
    A1 = _rows(game, k, sets.I1[k])
    A2 = _rows(game, k, sets.I2[k])
    if A1.shape[0] and rank(A1) < A1.shape[0]:
        return SmfcqResult(False)
    y = lp_feasible_strict(A1, A2, dim=game.players[k].n)
    return SmfcqResult(y is not None, y)


def check_scsc(sets: IndexSets) -> List[bool]:
    """Strict complementarity per player: no weakly active constraints."""
    return [len(s) == 0 for s in sets.I2]


def check_convexity(game: QpNepGame, tol: float = DEFAULTS.tol_rank) -> List[Convexity]:
    """Player k is convex iff its own quadratic block P^k_kk is positive semidefinite."""
    out = []
    for k in range(game.N):
        lam, _ = min_eigpair(game.own_block(k))
        out.append(Convexity(lam >= -tol, lam))
    return out


def check_ssosc(game: QpNepGame, sets: IndexSets, k: int,
                tol: float = DEFAULTS.tol_rank) -> ConePositivityResult:
    """
    Strong second-order sufficient condition for player k.

    Positivity of y^T P^k_kk y on the null space of the I1 rows, decided by the
    smallest eigenvalue of the projected block.
    """
    A1 = _rows(game, k, sets.I1[k])
    if A1.shape[0] and rank(A1) < A1.shape[0]:
        return ConePositivityResult(Verdict.UNDECIDED, method="eigen",
                                    note="strongly active rows are linearly dependent")
    B = null_basis(A1, game.players[k].n).B
    if B.shape[1] == 0:
        return ConePositivityResult(Verdict.HOLDS, margin=math.inf, method="vacuous")
    lam, vec = min_eigpair(B.T @ game.own_block(k) @ B)
    if lam > tol:
        return ConePositivityResult(Verdict.HOLDS, margin=lam, method="eigen", best_value=lam)
    return ConePositivityResult(Verdict.FAILS, witness=B @ vec, method="eigen", best_value=lam)


@dataclass
class CqReport:
    """Per-player constraint qualifications and second-order data at a KKT point."""

    licq: List[bool]
    smfcq: List[SmfcqResult]
    scsc: List[bool]
    convexity: List[Convexity]
    ssosc: List[ConePositivityResult]

    @property
    def all_licq(self) -> bool:
        return all(self.licq)

    @property
    def all_smfcq(self) -> bool:
        return all(s.holds for s in self.smfcq)

    @property
    def all_scsc(self) -> bool:
        return all(self.scsc)

    @property
    def all_convex(self) -> bool:
        return all(c.convex for c in self.convexity)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            'player': list(range(len(self.licq))),
            'licq': self.licq,
            'smfcq': [s.holds for s in self.smfcq],
            'scsc': self.scsc,
            'convex': [c.convex for c in self.convexity],
            'min_eig': [c.min_eig for c in self.convexity],
            'ssosc': [s.verdict.value for s in self.ssosc],
            'ssosc_margin': [s.margin for s in self.ssosc],
        }).set_index('player')


def cq_report(game: QpNepGame, sets: IndexSets) -> CqReport:
    """Run every per-player check at the given index sets."""
    report = CqReport(
        licq=[check_licq(game, sets, k) for k in range(game.N)],
        smfcq=[check_smfcq(game, sets, k) for k in range(game.N)],
        scsc=check_scsc(sets),
        convexity=check_convexity(game),
        ssosc=[check_ssosc(game, sets, k) for k in range(game.N)],
    )
    logger.debug(f"CQ: LICQ {report.licq}, SMFCQ {[s.holds for s in report.smfcq]}, SCSC {report.scsc}")
    return report
