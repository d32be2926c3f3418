import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from conftest import random_game
from nashforge.core.analysis import AnalysisOptions, analyze
from nashforge.core.kkt import enumerate_kkt, sort_points
from nashforge.core.models import KktPoint, Perturbation, PerturbationDirection
from nashforge.core.perturb import (
    Branch,
    default_window,
    detect_branches,
    estimate_calmness_constant,
    parse_t_grid,
    sweep,
)
from nashforge.data.loader import load_fixture_direction
from nashforge.exceptions import ConfigError, NotKktPointError
from nashforge.numerics.results import Verdict

SMALL_TILTS = [-0.1, -0.01, -0.001, 0.001, 0.01, 0.1]


def _reference(game, index=0):
    return sort_points(enumerate_kkt(game, Perturbation.zero(game)))[index]


def test_parse_t_grid():
    grid = parse_t_grid("-0.1:0.1:41")
    assert grid.size == 41
    assert grid[20] == 0.0
    assert grid[0] == pytest.approx(-0.1)
    assert grid[1] - grid[0] == pytest.approx(0.005)


@pytest.mark.parametrize("spec", ["0:1", "a:b:3", "0:1:1", "0.5:0.5:5", "0:1:2.5"])
def test_parse_t_grid_rejects(spec):
    with pytest.raises(ConfigError):
        parse_t_grid(spec)


def test_default_window(ex61, ex62):
    assert default_window(ex61, _reference(ex61, 1)) == pytest.approx(0.5)
    assert default_window(ex62, _reference(ex62)) == pytest.approx(0.5)


def test_ex62_calmness_constant(ex62, ex62_direction):
    result = sweep(ex62, ex62_direction, _reference(ex62), SMALL_TILTS)
    estimate = estimate_calmness_constant(result)
    assert estimate.kappa_hat == pytest.approx(3.0, rel=0.05)
    assert estimate.kappa_hat_z == pytest.approx(3.5, rel=0.05)
    # At t = -0.1 the only KKT point lies 0.7 away, outside the default window.
    assert estimate.existence_profile == [False, True, True, True, True, True]
    assert result.robustness_violated
    assert len(result.excluded) == 1
    t, distance = result.excluded[0]
    assert t == pytest.approx(-0.1)
    assert distance == pytest.approx(0.7)
    assert estimate.ratios[0] is None
    assert all(v is Verdict.HOLDS for row in result.nash for v in row)


def test_ex62_branch_count(ex62, ex62_direction):
    result = sweep(ex62, ex62_direction, _reference(ex62), parse_t_grid("-0.1:0.1:41"))
    summary = detect_branches(result)
    assert summary.count_positive == 3
    assert summary.count_negative == 1
    assert result.ambiguous == []
    assert [len(pts) for pts in result.points][20] == 1
    labels = {label for row, t in zip(result.labels, result.t_grid) if t > 0 for label in row}
    assert labels == {"+0", "+1", "+2"}
    slopes = [np.round(s, 8) for s in summary.slopes().values() if s is not None]
    expected = {(2.0, -6.0, 3.0, 0.0), (-2.0, 1.0, 0.0, 1.0), (-1.0, 0.0, 0.0, 0.0)}
    assert expected <= {tuple(s) for s in slopes}


def test_ex61_kink(ex61, ex61_direction):
    reference = _reference(ex61, 1)
    result = sweep(ex61, ex61_direction, reference, parse_t_grid("-0.1:0.1:21"))
    np.testing.assert_allclose(result.points[-1][0].z, [-0.1, 0.0, -1.1, 0.0, 1.1], atol=1e-9)
    np.testing.assert_allclose(result.points[0][0].z, [0.0, 0.0, -1.0, 0.1, 1.0], atol=1e-9)

    summary = detect_branches(result)
    assert summary.kink is True
    assert summary.kink_gap > 0.5
    positive = [b.fit()[0] for b in summary.branches if b.side > 0]
    negative = [b.fit()[0] for b in summary.branches if b.side < 0]
    assert any(np.allclose(s, [-1.0, 0.0, -1.0, 0.0, 1.0]) for s in positive)
    assert any(np.allclose(s, [0.0, 0.0, 0.0, -1.0, 0.0]) for s in negative)


def test_ex32_linear_path(ex32):
    direction = load_fixture_direction("EX32")
    result = sweep(ex32, direction, _reference(ex32), parse_t_grid("-0.1:0.1:21"))
    summary = detect_branches(result)
    assert summary.count_positive == summary.count_negative == 1
    assert summary.kink is False
    for slope in summary.slopes().values():
        np.testing.assert_allclose(slope, [-1.0, 1.0, -1.0], atol=1e-9)
    assert estimate_calmness_constant(result).kappa_hat == pytest.approx(0.5)

    frame = result.to_frame()
    assert len(frame) == 21
    assert {"t", "branch", "x0", "x1", "x2", "residual", "nash"} <= set(frame.columns)
    assert list(summary.to_frame()["side"]) == ["+", "-"]


def test_ex31_robustness_violated(ex31):
    direction = load_fixture_direction("EX31")
    result = sweep(ex31, direction, _reference(ex31), parse_t_grid("0.01:0.1:10"))
    assert result.robustness_violated
    assert result.existence_profile == [False] * 10
    # the perturbed games have no KKT points at all
    assert result.excluded == []
    estimate = estimate_calmness_constant(result)
    assert estimate.kappa_hat is None
    assert estimate.ratios == [None] * 10
    summary = detect_branches(result)
    assert summary.branches == []
    assert summary.kink is None


def test_zero_in_grid_keeps_reference(ex62, ex62_direction):
    result = sweep(ex62, ex62_direction, _reference(ex62), [0.0, 0.01], check_nash=False)
    assert len(result.points[0]) == 1
    assert result.labels[0] == ["0"]
    assert not result.robustness_violated
    assert estimate_calmness_constant(result).ratios[0] is None
    assert result.nash[1] == [Verdict.UNDECIDED] * len(result.points[1])


def test_sweep_validation(ex62, ex62_direction):
    with pytest.raises(NotKktPointError):
        sweep(ex62, ex62_direction, KktPoint(np.array([1.0, 0.0]), np.zeros(2)), [0.1])
    with pytest.raises(ConfigError):
        sweep(ex62, ex62_direction, _reference(ex62), [0.1], window=0.0)


def test_branch_predictor():
    branch = Branch("+0", 1, [0.1], [np.array([1.0])])
    np.testing.assert_allclose(branch.predict(0.2, np.array([0.0])), [2.0])
    branch.t.append(0.2)
    branch.z.append(np.array([1.5]))
    np.testing.assert_allclose(branch.predict(0.3, np.array([0.0])), [2.0])
    slope, intercept, resid = branch.fit()
    np.testing.assert_allclose(slope, [5.0])
    np.testing.assert_allclose(intercept, [0.5])
    assert resid == pytest.approx(0.0, abs=1e-12)


def _settled(game, point, sets, margin=1e-2):
    """Strongly active multipliers and inactive slacks stay above ``margin``."""
    slack = game.b - game.constraint_matrix() @ point.x
    for k in range(game.N):
        offset = game.con_block(k).start
        if any(point.lam[offset + i] <= margin for i in sets.I1[k]):
            return False
        if any(slack[offset + i] <= margin for i in sets.I3[k]):
            return False
    return True


@given(st.integers(0, 1_000_000))
def test_sweep_agrees_with_verdicts(seed):
    game = random_game(seed)
    p = Perturbation.zero(game)
    points = enumerate_kkt(game, p)
    assume(points and not any(q.non_isolated for q in points))
    reference = sort_points(points)[0]
    rng = np.random.default_rng(seed)
    direction = PerturbationDirection(rng.uniform(-1, 1, game.m), rng.uniform(-1, 1, game.n))
    assume(direction.size > 0.1)

    report = analyze(game, p, reference, AnalysisOptions(grid_res=5e-2, starts=16))
    result = sweep(game, direction, reference, [-1e-4, -1e-5, 1e-5, 1e-4], check_nash=False)
    if report["strong_regularity"].holds:
        assert [len(pts) for pts in result.points] == [1, 1, 1, 1]
    if report["robust_isolated_calmness"].holds:
        assert all(result.existence_profile)
    c1 = report["c1_localization"]
    if c1.holds and c1.margin > 0.1 and _settled(game, reference, report.index_sets):
        summary = detect_branches(result)
        assert summary.count_positive == summary.count_negative == 1
        assert summary.kink is False
