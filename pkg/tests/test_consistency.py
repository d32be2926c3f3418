"""Implications between verdicts on random games, and brute-force oracles for small games."""

import numpy as np
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from scipy import linalg as la
from scipy.optimize import nnls

from conftest import random_game
from nashforge.core.analysis import AnalysisOptions, analyze, consistency_violations
from nashforge.core.calmness import calmness_cone, check_p_property
from nashforge.core.kkt import classify_index_sets, enumerate_kkt
from nashforge.core.models import Perturbation, QpNepGame
from nashforge.core.regularity import check_c1_localization, check_critical_face
from nashforge.numerics.results import Verdict

FAST = AnalysisOptions(grid_res=5e-2, starts=16)

GRID_STEP = 1e-2
GRID_TICKS = np.arange(-300, 301) * GRID_STEP
RESIDUAL_TOL = 1e-3
MATCH_RADIUS = 1e-2


@settings(max_examples=50)
@given(st.integers(0, 1_000_000))
def test_verdicts_respect_implications(seed):
    game = random_game(seed, integer=seed % 3 == 0)
    p = Perturbation.zero(game)
    for point in enumerate_kkt(game, p)[:2]:
        report = analyze(game, p, point, FAST)
        assert consistency_violations(report) == []


@settings(max_examples=50)
@given(st.integers(0, 1_000_000))
def test_c1_implies_critical_face(seed):
    game = random_game(seed, max_m=1)
    p = Perturbation.zero(game)
    for point in enumerate_kkt(game, p):
        sets = classify_index_sets(game, p, point)
        if check_c1_localization(game, sets).holds:
            assert check_critical_face(game, sets).holds


def _second_order_sign(P: np.ndarray, A1: np.ndarray, A2: np.ndarray) -> Verdict:
    """
    Sign of min y^T P y over unit vectors of {A1 y = 0, A2 y <= 0}, for at most
    two free dimensions: both directions of a line, or 20001 angles plus the
    boundary rays of a planar cone. Values within 1e-2 of zero are UNDECIDED.
    """
    B = la.null_space(A1) if A1.shape[0] else np.eye(P.shape[0])
    d = B.shape[1]
    if d == 0:
        return Verdict.HOLDS
    G, Q = A2 @ B, B.T @ P @ B
    if d == 1:
        dirs = np.array([[1.0], [-1.0]])
    else:
        theta = np.linspace(0.0, 2.0 * np.pi, 20_001)
        dirs = [np.column_stack([np.cos(theta), np.sin(theta)])]
        for g in G:
            norm = np.linalg.norm(g)
            if norm > 0:
                edge = np.array([-g[1], g[0]]) / norm
                dirs += [edge[None, :], -edge[None, :]]
        dirs = np.vstack(dirs)
    if G.shape[0]:
        dirs = dirs[np.all(dirs @ G.T <= 1e-12, axis=1)]
    if dirs.shape[0] == 0:
        return Verdict.HOLDS
    lowest = float(np.einsum("pi,ij,pj->p", dirs, Q, dirs).min())
    if lowest > 1e-2:
        return Verdict.HOLDS
    if lowest < -1e-2:
        return Verdict.FAILS
    return Verdict.UNDECIDED


@settings(max_examples=50)
@given(st.integers(0, 1_000_000))
def test_single_player_p_property_matches_second_order_test(seed):
    game = random_game(seed, N=1, max_n=2, max_m=2, integer=True)
    p = Perturbation.zero(game)
    P, A = game.own_block(0), game.players[0].A
    for point in enumerate_kkt(game, p):
        sets = classify_index_sets(game, p, point)
        result = check_p_property(game, sets, grid_res=5e-2, starts=16)
        if result.fails:
            y = np.array(result.witness["y"])
            assert calmness_cone(game, sets).contains(y, tol=1e-7)
            assert y @ P @ y <= 1e-9
        direct = _second_order_sign(P, A[list(sets.I1[0])], A[list(sets.I2[0])])
        if Verdict.UNDECIDED not in (direct, result.verdict):
            assert result.verdict is direct


def _grid_kkt_points(game: QpNepGame) -> np.ndarray:
    """Grid points of [-3, 3]^n whose KKT residual, with the best multipliers, is below 1e-3."""
    n = game.n
    X = np.stack(np.meshgrid(*([GRID_TICKS] * n), indexing="ij"), axis=-1).reshape(-1, n)
    keep = np.ones(len(X), dtype=bool)
    residual = np.zeros(len(X))
    for k, pl in enumerate(game.players):
        blk = game.block(k)
        grad = X @ pl.P[blk, :].T - pl.c[blk]
        slack = pl.b - X[:, blk] @ pl.A.T if pl.m else np.zeros((len(X), 0))
        keep &= np.all(slack >= -RESIDUAL_TOL, axis=1)
        near = slack <= RESIDUAL_TOL
        own = np.max(np.abs(grad), axis=1)
        for i in np.flatnonzero(keep & near.any(axis=1)):
            rows = pl.A[near[i]]
            lam, _ = nnls(rows.T, -grad[i])
            own[i] = np.max(np.abs(grad[i] + rows.T @ lam))
        residual = np.maximum(residual, own)
    return X[keep & (residual < RESIDUAL_TOL)]


def _nearest(points: np.ndarray, x: np.ndarray) -> float:
    if points.size == 0:
        return np.inf
    return float(np.min(np.max(np.abs(points - x), axis=1)))


@given(st.integers(0, 1_000_000))
def test_enumeration_matches_residual_grid_scan(seed):
    # Integer data keep residuals and slacks on the 1e-2 lattice, so the scan is exact.
    N = 1 + seed % 2
    game = random_game(seed, N=N, max_n=3 - N, max_m=2, integer=True)
    points = enumerate_kkt(game, Perturbation.zero(game))
    assume(not any(q.non_isolated for q in points))

    enumerated = np.array([q.x for q in points]).reshape(-1, game.n)
    scanned = _grid_kkt_points(game)
    for x in scanned:
        assert _nearest(enumerated, x) <= MATCH_RADIUS
    for x in enumerated:
        on_grid = np.allclose(x / GRID_STEP, np.round(x / GRID_STEP), atol=1e-6)
        if on_grid and np.all(np.abs(x) <= 3.0):
            assert _nearest(scanned, x) <= MATCH_RADIUS
