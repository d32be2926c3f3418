"""
Positivity of a family of quadratic forms on a polyhedral cone.

Two questions are answered for forms q_k(y) = y^T Phi_k y on C = {Ey = 0, Fy <= 0}:

* ``Mode.MAX``: is min over C and the unit sphere of max_k q_k(y) positive?
* ``Mode.ZERO_SET``: is the common zero set of all q_k in C trivial?

Both are copositivity-type problems, so the answer comes from three tiers:
exact eigenvalue certificates, a seeded multistart search for violations and,
in low dimension, a Lipschitz-certified grid on the sphere. Everything runs in
coordinates of an orthonormal basis B of {Ey = 0}, where the cone becomes
{z : Gz <= 0} with G = F B.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence

import numpy as np
from scipy.optimize import least_squares, nnls

from ..exceptions import DimensionError
from ..utils.config import DEFAULTS
from ..utils.logging import get_logger
from .cones import ConeSpec, cone_nonzero_ray
from .linalg import check_symmetric, min_eigpair, spectral_norm
from .results import ConePositivityResult, Verdict

logger = get_logger(__name__)

MAX_VIOLATION = -1e-8
ZERO_SET_RESIDUAL = 1e-16
GRID_MAX_DIM = 4
SEARCH_ITERATIONS = 150
POLISH_COUNT = 4


class Mode(str, Enum):
    MAX = "max"
    ZERO_SET = "zero_set"


@dataclass(frozen=True)
class ReducedFamily:
    """A form family expressed in span coordinates of a cone."""

    cone: ConeSpec
    B: np.ndarray
    G: np.ndarray
    forms: List[np.ndarray]

    @property
    def dim(self) -> int:
        return int(self.B.shape[1])

    @property
    def lipschitz(self) -> float:
        return 2.0 * max(spectral_norm(F) for F in self.forms)

    @property
    def eig_tol(self) -> float:
        return DEFAULTS.tol_rank * max(1.0, max(spectral_norm(F) for F in self.forms))

    def lift(self, z: np.ndarray) -> np.ndarray:
        return self.B @ z

    def values(self, Z: np.ndarray) -> np.ndarray:
        """Form values for a stack of points, shape (points, forms)."""
        Z = np.atleast_2d(Z)
        return np.stack([np.einsum("pi,ij,pj->p", Z, F, Z) for F in self.forms], axis=-1)

    def in_cone(self, z: np.ndarray, tol: float = 1e-10) -> bool:
        return not self.G.shape[0] or float(np.max(self.G @ z)) <= tol

    def project(self, z: np.ndarray) -> Optional[np.ndarray]:
        """Nearest cone point (Moreau decomposition), normalized; None if it vanishes."""
        if self.G.shape[0] and np.max(self.G @ z) > 0:
            mu, _ = nnls(self.G.T, z)
            z = z - self.G.T @ mu
        norm = np.linalg.norm(z)
        if norm < 1e-12:
            return None
        return z / norm


def reduce_family(family: Sequence[np.ndarray], cone: ConeSpec) -> ReducedFamily:
    """Check the family against the cone and express it in span coordinates."""
    if not family:
        raise ValueError("form family is empty")
    forms = []
    for k, Phi in enumerate(family):
        Phi = np.asarray(Phi, dtype=float)
        if Phi.shape != (cone.dim, cone.dim):
            raise DimensionError(f"form {k} has shape {Phi.shape}, cone dimension is {cone.dim}")
        check_symmetric(Phi)
        forms.append(Phi)
    B, G = cone.reduced()
    reduced = [B.T @ Phi @ B for Phi in forms]
    return ReducedFamily(cone, B, G, [0.5 * (R + R.T) for R in reduced])


def _objective(values: np.ndarray, mode: Mode) -> np.ndarray:
    if mode is Mode.MAX:
        return values.max(axis=-1)
    return np.sum(values ** 2, axis=-1)


def _gradients(fam: ReducedFamily, Z: np.ndarray, values: np.ndarray, mode: Mode) -> np.ndarray:
    grads = np.zeros_like(Z)
    if mode is Mode.MAX:
        active = values.argmax(axis=-1)
        for k, F in enumerate(fam.forms):
            rows = active == k
            grads[rows] = 2.0 * Z[rows] @ F
    else:
        for k, F in enumerate(fam.forms):
            grads += 4.0 * values[:, k:k + 1] * (Z @ F)
    return grads


def exact_tier(fam: ReducedFamily, mode: Mode) -> Optional[ConePositivityResult]:
    """Eigenvalue certificates; None when no exact statement applies."""
    tol = fam.eig_tol
    pairs = [min_eigpair(F) for F in fam.forms]

    if mode is Mode.MAX:
        if fam.G.shape[0] == 0 and len(fam.forms) == 1:
            lam, vec = pairs[0]
            if lam > tol:
                return ConePositivityResult(Verdict.HOLDS, margin=lam, method="eigen", best_value=lam)
            return ConePositivityResult(
                Verdict.FAILS, witness=fam.lift(vec), method="eigen", best_value=lam,
                note="form is not positive definite on the subspace",
            )
        best = max(lam for lam, _ in pairs)
        if best > tol:
            return ConePositivityResult(
                Verdict.HOLDS, margin=best, method="eigen-dominant", best_value=best,
                note="one form is positive definite on the span of the cone",
            )
        return None

    for k, F in enumerate(fam.forms):
        w = np.linalg.eigvalsh(F)
        if w[0] > tol or w[-1] < -tol:
            margin = float(min(abs(w[0]), abs(w[-1])))
            return ConePositivityResult(
                Verdict.HOLDS, margin=margin, method="eigen-definite", best_value=margin,
                note=f"form {k} is definite on the span of the cone",
            )

    if fam.G.shape[0] == 0 and len(fam.forms) == 1:
        w, V = np.linalg.eigh(fam.forms[0])
        small = np.flatnonzero(np.abs(w) <= tol)
        if small.size:
            z = V[:, small[0]]
        else:
            # Indefinite: mix the extreme eigenvectors so the form vanishes.
            z = math.sqrt(w[-1]) * V[:, 0] + math.sqrt(-w[0]) * V[:, -1]
            z = z / np.linalg.norm(z)
        return ConePositivityResult(
            Verdict.FAILS, witness=fam.lift(z), method="eigen-isotropic", best_value=0.0,
            note="single form on a subspace has a nonzero root",
        )
    return None


def _start_points(fam: ReducedFamily, starts: int, seed: int,
                  ray: Optional[np.ndarray]) -> np.ndarray:
    rng = np.random.default_rng(seed)
    d = fam.dim
    raw = [np.eye(d)[i] * s for i in range(d) for s in (1.0, -1.0)]
    if ray is not None:
        raw.append(fam.B.T @ ray)
    raw.extend(rng.standard_normal((starts, d)))
    points = [p for p in (fam.project(np.asarray(z, dtype=float)) for z in raw) if p is not None]
    return np.array(points)


def _polish_root(fam: ReducedFamily, z: np.ndarray) -> Optional[np.ndarray]:
    def residuals(w: np.ndarray) -> np.ndarray:
        return np.append(fam.values(w)[0], w @ w - 1.0)

    sol = least_squares(residuals, z, method="trf", xtol=1e-15, ftol=1e-15, gtol=1e-15)
    return fam.project(sol.x)


def search_tier(fam: ReducedFamily, mode: Mode, starts: int = DEFAULTS.starts,
                seed: int = DEFAULTS.seed, ray: Optional[np.ndarray] = None) -> ConePositivityResult:
    """
    Multistart projected-gradient search for a violation.

    Returns FAILS with a witness, or UNDECIDED carrying the best objective value.
    """
    Z = _start_points(fam, starts, seed, ray)
    eta = np.full(Z.shape[0], 0.1)
    f = _objective(fam.values(Z), mode)

    for _ in range(SEARCH_ITERATIONS):
        if np.all(eta < 1e-12):
            break
        vals = fam.values(Z)
        grads = _gradients(fam, Z, vals, mode)
        cand = Z - eta[:, None] * grads
        for p in range(cand.shape[0]):
            proj = fam.project(cand[p])
            cand[p] = Z[p] if proj is None else proj
        f_new = _objective(fam.values(cand), mode)
        better = f_new < f
        Z[better] = cand[better]
        f[better] = f_new[better]
        eta = np.where(better, eta * 1.5, eta * 0.5)

    order = sorted(range(Z.shape[0]), key=lambda p: (f[p], tuple(Z[p])))
    best = order[0]
    logger.debug(f"search tier ({mode.value}): best objective {f[best]:.3e} over {Z.shape[0]} starts")

    if mode is Mode.MAX:
        if f[best] < MAX_VIOLATION:
            return ConePositivityResult(
                Verdict.FAILS, witness=fam.lift(Z[best]), method="search", best_value=float(f[best]),
            )
        return ConePositivityResult(Verdict.UNDECIDED, method="search", best_value=float(f[best]))

    best_value = float(f[best])
    for p in order[:POLISH_COUNT]:
        z = _polish_root(fam, Z[p])
        if z is None:
            continue
        value = float(_objective(fam.values(z), mode)[0])
        best_value = min(best_value, value)
        if value < ZERO_SET_RESIDUAL and fam.in_cone(z):
            return ConePositivityResult(
                Verdict.FAILS, witness=fam.lift(z), method="search", best_value=value,
                note="common root of all forms found in the cone",
            )
    return ConePositivityResult(Verdict.UNDECIDED, method="search", best_value=best_value)


def _grid_points(d: int, grid_res: float) -> np.ndarray:
    if d == 1:
        return np.array([[1.0], [-1.0]])
    step = grid_res / math.sqrt(d - 1)
    ticks = np.linspace(-1.0, 1.0, int(math.ceil(2.0 / step)) + 1)
    mesh = np.meshgrid(*([ticks] * (d - 1)), indexing="ij")
    face = np.stack(mesh, axis=-1).reshape(-1, d - 1)
    blocks = []
    for axis in range(d):
        for sign in (1.0, -1.0):
            block = np.insert(face, axis, sign, axis=1)
            blocks.append(block)
    pts = np.vstack(blocks)
    return pts / np.linalg.norm(pts, axis=1, keepdims=True)


def grid_size(d: int, grid_res: float) -> int:
    """Number of grid points the grid tier would evaluate."""
    if d <= 1:
        return 2 * d
    per_axis = int(math.ceil(2.0 * math.sqrt(d - 1) / grid_res)) + 1
    return 2 * d * per_axis ** (d - 1)


def grid_tier(fam: ReducedFamily, mode: Mode, grid_res: float = DEFAULTS.grid_res,
              grid_budget: int = DEFAULTS.grid_budget) -> ConePositivityResult:
    """
    Lipschitz-certified grid on the unit sphere intersected with the cone.

    In MAX mode the certified quantity is max_k q_k, in ZERO_SET mode max_k |q_k|;
    both are 2*max_k ||Phi_k||-Lipschitz on the sphere. Every sphere point of the
    cone lies within grid_res of a projected grid point, so the grid minimum
    minus L*grid_res is a lower bound.

    Returns:
        HOLDS with the certified margin, FAILS (MAX mode) when a grid point in the
        cone violates, UNDECIDED otherwise.
    """
    d = fam.dim
    if d > GRID_MAX_DIM:
        return ConePositivityResult(
            Verdict.UNDECIDED, method="grid",
            note=f"grid certification needs span dimension <= {GRID_MAX_DIM}, got {d}",
        )
    size = grid_size(d, grid_res)
    if size > grid_budget:
        logger.warning(f"grid of {size} points exceeds budget {grid_budget}; skipping")
        return ConePositivityResult(
            Verdict.UNDECIDED, method="grid",
            note=f"grid of {size} points exceeds budget {grid_budget}",
        )

    pts = _grid_points(d, grid_res)
    if fam.G.shape[0]:
        norms = np.linalg.norm(fam.G, axis=1)
        norms[norms == 0] = 1.0
        slack = np.max((pts @ fam.G.T) / norms, axis=1)
        pts = pts[slack <= grid_res / 2]
        slack = slack[slack <= grid_res / 2]
        for p in np.flatnonzero(slack > 0):
            proj = fam.project(pts[p])
            pts[p] = proj if proj is not None else np.nan
        pts = pts[~np.isnan(pts).any(axis=1)]
    if pts.shape[0] == 0:
        return ConePositivityResult(Verdict.UNDECIDED, method="grid", note="grid missed the cone")

    vals = fam.values(pts)
    f = vals.max(axis=1) if mode is Mode.MAX else np.abs(vals).max(axis=1)
    best = int(np.argmin(f))
    f_min = float(f[best])
    exact = d == 1
    margin = f_min if exact else f_min - fam.lipschitz * grid_res
    logger.debug(f"grid tier ({mode.value}): {pts.shape[0]} points, min {f_min:.4g}, margin {margin:.4g}")

    if exact and mode is Mode.ZERO_SET and f_min <= fam.eig_tol:
        return ConePositivityResult(
            Verdict.FAILS, witness=fam.lift(pts[best]), method="grid", best_value=f_min,
        )
    if margin > (fam.eig_tol if exact else 0.0):
        return ConePositivityResult(Verdict.HOLDS, margin=margin, method="grid", best_value=f_min)
    if mode is Mode.MAX and f_min < MAX_VIOLATION and fam.in_cone(pts[best]):
        return ConePositivityResult(
            Verdict.FAILS, witness=fam.lift(pts[best]), method="grid", best_value=f_min,
        )
    return ConePositivityResult(
        Verdict.UNDECIDED, method="grid", best_value=f_min,
        note=f"grid minimum {f_min:.3g} does not exceed the Lipschitz allowance",
    )


def quad_family_positive_on_cone(
    family: Sequence[np.ndarray],
    cone: ConeSpec,
    mode: Mode = Mode.MAX,
    grid_res: float = DEFAULTS.grid_res,
    starts: int = DEFAULTS.starts,
    seed: int = DEFAULTS.seed,
    grid_budget: int = DEFAULTS.grid_budget,
) -> ConePositivityResult:
    """
    Decide positivity of a quadratic-form family on a polyhedral cone.

    Args:
        family: Symmetric matrices Phi_k of the cone's ambient dimension.
        cone: The cone {Ey = 0, Fy <= 0}.
        mode: MAX (is max_k y^T Phi_k y > 0 on the cone?) or ZERO_SET
            (do the forms have no common nonzero root in the cone?).
        grid_res: Grid resolution for the certification tier.
        starts: Random starts for the search tier.
        seed: Seed of the search tier.
        grid_budget: Largest grid the certification tier will evaluate.

    Returns:
        ConePositivityResult; FAILS witnesses are given in ambient coordinates.
    """
    mode = Mode(mode)
    fam = reduce_family(family, cone)

    if fam.dim == 0:
        return ConePositivityResult(Verdict.HOLDS, margin=math.inf, method="trivial",
                                    note="cone is the origin")
    ray = cone_nonzero_ray(None, fam.G, dim=fam.dim)
    if ray is None:
        return ConePositivityResult(Verdict.HOLDS, margin=math.inf, method="trivial",
                                    note="cone is the origin")
    ray = fam.lift(ray)

    result = exact_tier(fam, mode)
    if result is not None:
        return result

    found = search_tier(fam, mode, starts=starts, seed=seed, ray=ray)
    if found.fails:
        return found

    certified = grid_tier(fam, mode, grid_res=grid_res, grid_budget=grid_budget)
    if certified.verdict is not Verdict.UNDECIDED:
        return certified

    best = found.best_value
    if certified.best_value is not None and mode is Mode.MAX:
        best = min(best, certified.best_value)
    return ConePositivityResult(
        Verdict.UNDECIDED, method="none", best_value=best,
        note=certified.note or "no certificate and no violation found",
    )
