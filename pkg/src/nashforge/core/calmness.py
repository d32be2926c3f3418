"""Isolated calmness checks: the I-property, the P-property and the exact homogeneous test."""

import itertools
from typing import List

import numpy as np

from ..exceptions import GuardError
from ..numerics.cones import ConeSpec, cone_nonzero_ray
from ..numerics.linalg import sym
from ..numerics.positivity import Mode, quad_family_positive_on_cone
from ..numerics.results import Verdict
from ..utils.config import DEFAULTS
from ..utils.logging import get_logger
from .models import CheckResult, IndexSets, QpNepGame
from .regularity import build_game_jacobian, embedded_rows

logger = get_logger(__name__)


def coupling_forms(game: QpNepGame, own_weight: float) -> List[np.ndarray]:
    """
    Symmetric matrices of y^k^T (row block k of P^k) y with the own block scaled.

    ``own_weight=1`` gives the I-property forms q_k, ``own_weight=0.5`` the
    P-property forms phi_k.
    """
    forms = []
    for k, pl in enumerate(game.players):
        blk = game.block(k)
        R = np.zeros((game.n, game.n))
        R[blk, :] = pl.P[blk, :]
        R[blk, blk] *= own_weight
        forms.append(sym(R))
    return forms


def calmness_cone(game: QpNepGame, sets: IndexSets) -> ConeSpec:
    """K(I1, I2)."""
    return ConeSpec.build(embedded_rows(game, sets.I1), embedded_rows(game, sets.I2), dim=game.n)


def check_i_property(game: QpNepGame, sets: IndexSets, grid_res: float = DEFAULTS.grid_res,
                     starts: int = DEFAULTS.starts, seed: int = DEFAULTS.seed) -> CheckResult:
    """
    No nonzero y in K(I1, I2) is a common root of all q_k.

    The sum of the q_k is y^T J y, so a definite sym(J) on the span of the cone
    settles the question first.
    """
    name = "i_property"
    cone = calmness_cone(game, sets)
    J = build_game_jacobian(game).J
    B = cone.span_basis().B
    if B.shape[1]:
        w = np.linalg.eigvalsh(B.T @ sym(J) @ B)
        tol = DEFAULTS.tol_rank * max(1.0, float(np.max(np.abs(w))))
        if w[0] > tol or w[-1] < -tol:
            return CheckResult(name, Verdict.HOLDS, margin=float(min(abs(w[0]), abs(w[-1]))),
                               method="jacobian-definite")
    res = quad_family_positive_on_cone(coupling_forms(game, 1.0), cone, Mode.ZERO_SET,
                                       grid_res=grid_res, starts=starts, seed=seed)
    return CheckResult.from_positivity(name, res, clause="common-root")


def check_p_property(game: QpNepGame, sets: IndexSets, grid_res: float = DEFAULTS.grid_res,
                     starts: int = DEFAULTS.starts, seed: int = DEFAULTS.seed) -> CheckResult:
    """
    max_k phi_k(y) > 0 for every nonzero y in K(I1, I2).

    When the family test is inconclusive, positivity of the single form
    sum_k phi_k also certifies it (with margin divided by N).
    """
    name = "p_property"
    cone = calmness_cone(game, sets)
    forms = coupling_forms(game, 0.5)
    res = quad_family_positive_on_cone(forms, cone, Mode.MAX, grid_res=grid_res,
                                       starts=starts, seed=seed)
    if res.verdict is not Verdict.UNDECIDED:
        return CheckResult.from_positivity(name, res, clause="max-form")

    total = quad_family_positive_on_cone([sum(forms)], cone, Mode.MAX, grid_res=grid_res,
                                         starts=starts, seed=seed)
    if total.holds:
        return CheckResult(name, Verdict.HOLDS, margin=total.margin / game.N,
                           method=f"sum-form/{total.method}")
    return CheckResult.from_positivity(name, res)


def check_isolated_calmness_exact(game: QpNepGame, sets: IndexSets,
                                  max_weak: int = DEFAULTS.max_weak) -> CheckResult:
    """
    Exact isolated-calmness test from the homogeneous linearized system.

    Unknowns are (y, dlam) with dlam over the active rows I1 and I2. Each
    weakly active row i picks a branch: (dlam_i >= 0, a_i y = 0) or
    (dlam_i = 0, a_i y <= 0). The solution set of each branch is a polyhedral
    cone, so isolation means every branch cone is {0}.

    Raises:
        GuardError: If |I2| exceeds ``max_weak``.
    """
    name = "isolated_calmness_exact"
    weak = sets.weak()
    if len(weak) > max_weak:
        raise GuardError(f"{len(weak)} weakly active rows exceed the branch limit {max_weak}")
    n = game.n
    J = build_game_jacobian(game).J
    G = game.constraint_matrix()
    off = game.con_offsets
    strong = [off[k] + i for k in range(game.N) for i in sets.I1[k]]
    weak_rows = [off[k] + i for k, i in weak]
    active = strong + weak_rows
    na = len(active)

    base_eq = [np.hstack([J, G[active].T if na else np.zeros((n, 0))])]
    base_eq += [np.concatenate([G[g], np.zeros(na)])[None, :] for g in strong]
    for choices in itertools.product((0, 1), repeat=len(weak)):
        # first weakly active row varies fastest
        choices = choices[::-1]
        eq, ineq = list(base_eq), []
        for j, g in enumerate(weak_rows):
            pos = len(strong) + j
            unit = np.zeros(n + na)
            unit[n + pos] = 1.0
            row = np.concatenate([G[g], np.zeros(na)])
            if choices[j] == 0:
                eq.append(row[None, :])
                ineq.append(-unit[None, :])
            else:
                eq.append(unit[None, :])
                ineq.append(row[None, :])
        E = np.vstack(eq)
        F = np.vstack(ineq) if ineq else np.zeros((0, n + na))
        ray = cone_nonzero_ray(E, F, dim=n + na)
        if ray is not None:
            dlam = np.zeros(game.m)
            dlam[active] = ray[n:]
            return CheckResult(
                name, Verdict.FAILS, method="lp", clause="nonzero-solution",
                witness={"branch": list(choices), "y": ray[:n].tolist(), "dlam": dlam.tolist()},
            )
    return CheckResult(name, Verdict.HOLDS, method="lp", details={"branches": 2 ** len(weak)})
