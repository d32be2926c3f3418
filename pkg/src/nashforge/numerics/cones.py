"""Polyhedral cones {y : Ey = 0, Fy <= 0} and the LP feasibility tests on them."""

from dataclasses import dataclass
from typing import Iterable, Optional, Tuple

import numpy as np

from ..exceptions import DimensionError
from ..utils.config import DEFAULTS
from ..utils.logging import get_logger
from .linalg import NullBasis, as_rows, null_basis
from .simplex import solve_lp

logger = get_logger(__name__)


def _ambient(E, F, dim: Optional[int]) -> int:
    for M in (E, F):
        if M is None:
            continue
        arr = np.asarray(M, dtype=float)
        if arr.size == 0 and arr.ndim < 2:
            continue
        arr = np.atleast_2d(arr)
        if dim is not None and arr.shape[0] > 0 and arr.shape[1] != dim:
            raise DimensionError(f"expected {dim} columns, got {arr.shape[1]}")
        dim = arr.shape[1] if dim is None else dim
    if dim is None:
        raise DimensionError("ambient dimension cannot be inferred from empty rows")
    return dim


@dataclass(frozen=True)
class ConeSpec:
    """The cone {y : E y = 0, F y <= 0} in R^dim."""

    E: np.ndarray
    F: np.ndarray
    dim: int

    @classmethod
    def build(cls, E=None, F=None, dim: Optional[int] = None) -> "ConeSpec":
        dim = _ambient(E, F, dim)
        E = as_rows(E if E is not None else np.zeros((0, dim)), dim)
        F = as_rows(F if F is not None else np.zeros((0, dim)), dim)
        if E.shape[1] != dim or F.shape[1] != dim:
            raise DimensionError(f"cone rows must have {dim} columns")
        return cls(E, F, dim)

    @classmethod
    def full(cls, dim: int) -> "ConeSpec":
        return cls.build(dim=dim)

    @property
    def is_subspace(self) -> bool:
        return self.F.shape[0] == 0

    def contains(self, y: np.ndarray, tol: float = 1e-8) -> bool:
        y = np.asarray(y, dtype=float)
        scale = tol * max(1.0, float(np.max(np.abs(y), initial=0.0)))
        eq_ok = not self.E.shape[0] or np.max(np.abs(self.E @ y)) <= scale
        ineq_ok = not self.F.shape[0] or np.max(self.F @ y) <= scale
        return bool(eq_ok and ineq_ok)

    def span_basis(self, tol: float = DEFAULTS.tol_rank) -> NullBasis:
        """Orthonormal basis of {y : Ey = 0}, which contains the cone."""
        return null_basis(self.E, self.dim, tol)

    def reduced(self, tol: float = DEFAULTS.tol_rank) -> Tuple[np.ndarray, np.ndarray]:
        """Span basis B and the inequality rows G = F B in span coordinates."""
        B = self.span_basis(tol).B
        return B, self.F @ B

    def nonzero_ray(self) -> Optional[np.ndarray]:
        return cone_nonzero_ray(self.E, self.F, dim=self.dim)

    def strict_direction(self) -> Optional[np.ndarray]:
        return lp_feasible_strict(self.E, self.F, dim=self.dim)


def lp_feasible_strict(E, F, dim: Optional[int] = None) -> Optional[np.ndarray]:
    """
    Find y with Ey = 0 and Fy <= -1, or return None.

    Homogeneity makes this equivalent to Fy < 0. With no rows in F the zero
    vector is returned.

    Raises:
        NumericalError: When the simplex pivot guard is exceeded.
    """
    cone = ConeSpec.build(E, F, dim)
    if cone.F.shape[0] == 0:
        return np.zeros(cone.dim)
    res = solve_lp(
        np.zeros(cone.dim),
        A_eq=cone.E, b_eq=np.zeros(cone.E.shape[0]),
        A_ub=cone.F, b_ub=-np.ones(cone.F.shape[0]),
        free=True,
    )
    return res.x if res.feasible else None


def cone_nonzero_ray(E, F, dim: Optional[int] = None,
                     coords: Optional[Iterable[int]] = None) -> Optional[np.ndarray]:
    """
    Find a point of {Ey = 0, Fy <= 0} that is nonzero in one of ``coords``.

    For each coordinate j and sign s the LP {Ey = 0, Fy <= 0, s*y_j = 1} is
    solved; the first feasible point is returned. Over all coordinates this is
    an exact test for a nonzero element of the cone.

    Args:
        E: Equality rows (possibly 0 rows).
        F: Inequality rows (possibly 0 rows).
        dim: Ambient dimension, required when both E and F are empty.
        coords: Coordinates allowed to carry the normalization (default all).

    Returns:
        A ray of the cone or None when none exists.
    """
    cone = ConeSpec.build(E, F, dim)
    coords = range(cone.dim) if coords is None else list(coords)
    for j in coords:
        for sign in (1.0, -1.0):
            row = np.zeros(cone.dim)
            row[j] = sign
            res = solve_lp(
                np.zeros(cone.dim),
                A_eq=np.vstack([cone.E, row]),
                b_eq=np.concatenate([np.zeros(cone.E.shape[0]), [1.0]]),
                A_ub=cone.F, b_ub=np.zeros(cone.F.shape[0]),
                free=True,
            )
            if res.feasible:
                logger.debug(f"cone ray found on coordinate {j} (sign {sign:+.0f})")
                return res.x
    return None
