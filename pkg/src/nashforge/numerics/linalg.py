"""Dense linear-algebra kernels: rank, null spaces and symmetric eigenvalues."""

from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy import linalg as la

from ..utils.config import DEFAULTS

SYMMETRY_TOL = 1e-10


@dataclass(frozen=True)
class NullBasis:
    """Orthonormal basis (columns of B) of the null space of a row matrix."""

    B: np.ndarray

    @property
    def dim(self) -> int:
        return int(self.B.shape[1])

    @property
    def ambient(self) -> int:
        return int(self.B.shape[0])


def as_rows(matrix, ncols: int) -> np.ndarray:
    """Coerce ``matrix`` to a float 2-D array with ``ncols`` columns (zero rows allowed)."""
    arr = np.asarray(matrix, dtype=float)
    if arr.size == 0:
        return np.zeros((0, ncols))
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    return arr


def rank(matrix: np.ndarray, tol: float = DEFAULTS.tol_rank) -> int:
    """
    Numerical rank via singular values.

    Singular values below ``tol`` times the largest one count as zero.

    Args:
        matrix: Any 2-D array (zero rows allowed).
        tol: Relative threshold, must be positive.

    Returns:
        The numerical rank.
    """
    if tol <= 0:
        raise ValueError("rank tolerance must be positive")
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    if matrix.size == 0:
        return 0
    s = la.svdvals(matrix)
    if s[0] == 0.0:
        return 0
    return int(np.sum(s > tol * s[0]))


def _fix_signs(B: np.ndarray) -> np.ndarray:
    # First nonzero entry of each column is made positive.
    for j in range(B.shape[1]):
        i = int(np.argmax(np.abs(B[:, j]) > 1e-12))
        if B[i, j] < 0:
            B[:, j] = -B[:, j]
    return B


def null_basis(matrix: np.ndarray, ncols: int = None, tol: float = DEFAULTS.tol_rank) -> NullBasis:
    """
    Orthonormal basis of the null space of ``matrix``.

    Args:
        matrix: Row matrix (zero rows allowed when ``ncols`` is given).
        ncols: Ambient dimension, needed when ``matrix`` has no rows.
        tol: Relative singular-value threshold.

    Returns:
        NullBasis with ``ambient - rank`` columns.
    """
    if tol <= 0:
        raise ValueError("null-space tolerance must be positive")
    arr = np.asarray(matrix, dtype=float)
    if ncols is None:
        ncols = arr.shape[-1]
    arr = as_rows(arr, ncols)
    if arr.shape[0] == 0:
        return NullBasis(np.eye(ncols))
    B = la.null_space(arr, rcond=tol)
    return NullBasis(_fix_signs(np.array(B)))


def check_symmetric(Q: np.ndarray, tol: float = SYMMETRY_TOL) -> None:
    """Raise ValueError when ``Q`` is not symmetric to ``tol`` (relative to its size)."""
    Q = np.asarray(Q, dtype=float)
    if Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {Q.shape}")
    scale = max(1.0, float(np.max(np.abs(Q)))) if Q.size else 1.0
    if Q.size and np.max(np.abs(Q - Q.T)) > tol * scale:
        raise ValueError("matrix is not symmetric")


def min_eigpair(Q: np.ndarray) -> Tuple[float, np.ndarray]:
    """
    Smallest eigenvalue and a unit eigenvector of a symmetric matrix.

    An empty matrix yields ``(inf, empty vector)``.
    """
    check_symmetric(Q)
    Q = np.asarray(Q, dtype=float)
    if Q.shape[0] == 0:
        return float("inf"), np.zeros(0)
    w, V = la.eigh(0.5 * (Q + Q.T), subset_by_index=[0, 0])
    return float(w[0]), V[:, 0]


def sym_eig_min(Q: np.ndarray) -> float:
    """
    Smallest eigenvalue of a symmetric matrix.

    Args:
        Q: Symmetric matrix (to 1e-10).

    Returns:
        The smallest eigenvalue.

    Raises:
        ValueError: If ``Q`` is not symmetric.
    """
    return min_eigpair(Q)[0]


def sym(Q: np.ndarray) -> np.ndarray:
    """Symmetric part of a square matrix."""
    Q = np.asarray(Q, dtype=float)
    return 0.5 * (Q + Q.T)


def spectral_norm(Q: np.ndarray) -> float:
    """Largest singular value (0 for empty input)."""
    Q = np.asarray(Q, dtype=float)
    if Q.size == 0:
        return 0.0
    return float(la.svdvals(Q)[0])
