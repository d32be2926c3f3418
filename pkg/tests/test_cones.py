import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import linalg as la

from nashforge.exceptions import DimensionError
from nashforge.numerics.cones import ConeSpec, cone_nonzero_ray, lp_feasible_strict


def test_strict_direction_in_orthant():
    y = lp_feasible_strict(None, np.eye(2))
    assert y is not None
    assert np.all(y <= -1 + 1e-9)


def test_strict_direction_with_equalities():
    y = lp_feasible_strict([[1.0, -1.0]], [[1.0, 0.0]])
    assert y is not None
    assert y[0] == pytest.approx(y[1])
    assert y[0] <= -1 + 1e-9


def test_strict_direction_missing():
    assert lp_feasible_strict(None, [[1.0], [-1.0]]) is None


def test_strict_direction_without_inequalities():
    np.testing.assert_array_equal(lp_feasible_strict([[1.0, 0.0]], None), np.zeros(2))


def test_ray_of_pointed_cone_is_none():
    assert cone_nonzero_ray(np.eye(2), None) is None
    assert cone_nonzero_ray(None, [[1.0], [-1.0]]) is None


def test_ray_in_null_space():
    y = cone_nonzero_ray([[2.0, 2.0], [3.0, 3.0]], [[-1.0, 0.0]])
    assert y is not None
    assert y[0] > 0
    assert y[0] == pytest.approx(-y[1])


def test_full_space_ray():
    y = cone_nonzero_ray(None, None, dim=1)
    assert y is not None and abs(y[0]) > 0


def test_ray_restricted_coordinates():
    # The cone is the first axis; normalizing the second coordinate must fail.
    assert cone_nonzero_ray([[0.0, 1.0]], None, coords=[1]) is None
    assert cone_nonzero_ray([[0.0, 1.0]], None, coords=[0]) is not None


def test_dimension_required_for_empty_rows():
    with pytest.raises(DimensionError):
        ConeSpec.build()
    with pytest.raises(DimensionError):
        ConeSpec.build(np.eye(2), np.eye(3))


def test_cone_spec_membership():
    cone = ConeSpec.build([[1.0, 1.0, 0.0]], [[0.0, 0.0, 1.0]])
    assert cone.contains(np.array([1.0, -1.0, -2.0]))
    assert not cone.contains(np.array([1.0, -1.0, 2.0]))
    assert not cone.contains(np.array([1.0, 1.0, 0.0]))
    assert not cone.is_subspace
    assert ConeSpec.full(3).is_subspace
    B, G = cone.reduced()
    assert B.shape == (3, 2)
    assert G.shape == (1, 2)


@given(st.integers(0, 100_000))
def test_ray_belongs_to_cone(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 5))
    E = rng.uniform(-1, 1, (int(rng.integers(0, n)), n))
    F = rng.uniform(-1, 1, (int(rng.integers(0, 4)), n))
    cone = ConeSpec.build(E, F, n)
    y = cone.nonzero_ray()
    if y is not None:
        assert np.max(np.abs(y)) > 0.5
        assert cone.contains(y, tol=1e-7)
    s = cone.strict_direction()
    if s is not None and F.shape[0]:
        assert np.all(F @ s <= -1 + 1e-7)


def _sampled_hits(cone: ConeSpec, rng: np.random.Generator, count: int = 10_000) -> int:
    """Gaussian directions of the span of the cone that satisfy every inequality row."""
    B, G = cone.reduced()
    if B.shape[1] == 0:
        return 0
    Z = rng.standard_normal((count, B.shape[1]))
    if G.shape[0] == 0:
        return count
    return int(np.sum(np.all(Z @ G.T <= 0.0, axis=1)))


@settings(max_examples=50)
@given(st.integers(0, 100_000))
def test_missing_ray_means_no_sampled_point(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 4))
    E = rng.uniform(-1, 1, (int(rng.integers(0, n)), n)) if seed % 2 else None
    F = rng.uniform(-1, 1, (int(rng.integers(1, 5)), n))
    cone = ConeSpec.build(E, F, n)
    if cone.nonzero_ray() is None:
        assert _sampled_hits(cone, rng) == 0
    if _sampled_hits(cone, rng) > 0:
        assert cone.nonzero_ray() is not None


@settings(max_examples=50)
@given(st.integers(0, 100_000))
def test_cone_around_planted_direction_is_found(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 4))
    E = rng.uniform(-1, 1, (int(rng.integers(0, n)), n)) if seed % 2 else None
    span = la.null_space(E) if E is not None and E.shape[0] else np.eye(n)
    y0 = span @ rng.standard_normal(span.shape[1])
    y0 /= np.linalg.norm(y0)
    # Every row keeps y0 strictly inside, so the cone holds a cap around it.
    F = rng.uniform(-1, 1, (int(rng.integers(1, 5)), n))
    F -= np.outer(F @ y0 + 0.3 + rng.uniform(0, 0.5, F.shape[0]), y0)
    cone = ConeSpec.build(E, F, n)
    assert cone.nonzero_ray() is not None
    assert _sampled_hits(cone, rng) > 0
