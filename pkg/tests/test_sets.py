import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crfeas.sets import (AffineSubspace, Annulus, Box, Diamond, EuclideanBall, Halfspace, SqrtBall, WholeSpace,
                         line, reflect)

coord = st.floats(-5, 5, allow_nan=False)
point2 = st.tuples(coord, coord).map(np.array)


def convex_sets():
    rng = np.random.default_rng(11)
    return [
        line([1.0, 1.0]),
        AffineSubspace(rng.normal(size=4), rng.normal(size=(2, 4))),
        Halfspace([1.0, -2.0, 0.5], 0.3),
        Box([-1, 0, -2], [1, 0.5, 2]),
        EuclideanBall([0.5, -0.5], 1.5),
        Diamond(1.0),
        Diamond(2.0, dim=3),
    ]


ALL_SETS = convex_sets() + [Annulus(1, 2), SqrtBall()]


def test_reflect_examples():
    np.testing.assert_allclose(reflect(line([1.0, 0.0]), [1.0, 1.0]), [1.0, -1.0])
    np.testing.assert_allclose(reflect(EuclideanBall([0, 0], 1), [2.0, 0.0]), [0.0, 0.0])


def test_diamond_reflection_against_grid():
    g = np.linspace(-1, 1, 2001)
    X, Y = np.meshgrid(g, g)
    pts = np.column_stack([X.ravel(), Y.ravel()])
    pts = pts[np.abs(pts).sum(axis=1) <= 1 + 1e-12]
    nearest = pts[np.argmin(np.sum((pts - [1.0, 1.0]) ** 2, axis=1))]
    np.testing.assert_allclose(nearest, [0.5, 0.5], atol=1e-3)
    np.testing.assert_allclose(Diamond(1.0).project([1.0, 1.0]), [0.5, 0.5], atol=1e-12)
    np.testing.assert_allclose(reflect(Diamond(1.0), [1.0, 1.0]), [0.0, 0.0], atol=1e-12)


@pytest.mark.parametrize("S", ALL_SETS, ids=lambda S: type(S).__name__)
def test_idempotent_and_member(S):
    rng = np.random.default_rng(1)
    for _ in range(200):
        x = 3 * rng.normal(size=S.dim)
        p = S.project(x)
        assert S.contains(p)
        np.testing.assert_allclose(S.project(p), p, atol=1e-10)


@pytest.mark.parametrize("S", ALL_SETS, ids=lambda S: type(S).__name__)
def test_nearest_point_against_sampled_members(S):
    rng = np.random.default_rng(2)
    members = np.array([S.project(3 * rng.normal(size=S.dim)) for _ in range(200)])
    for _ in range(50):
        x = 3 * rng.normal(size=S.dim)
        d = np.linalg.norm(x - S.project(x))
        assert d <= np.min(np.linalg.norm(members - x, axis=1)) + 1e-10


@pytest.mark.parametrize("S", convex_sets(), ids=lambda S: type(S).__name__)
def test_firm_nonexpansiveness(S):
    rng = np.random.default_rng(3)
    for _ in range(1000):
        x, y = 3 * rng.normal(size=(2, S.dim))
        px, py = S.project(x), S.project(y)
        lhs = np.sum((px - py) ** 2) + np.sum(((x - px) - (y - py)) ** 2)
        assert lhs <= np.sum((x - y) ** 2) + 1e-9
        assert np.linalg.norm(S.reflect(x) - S.reflect(y)) <= np.linalg.norm(x - y) + 1e-9


def test_affine_characterisation():
    rng = np.random.default_rng(4)
    S = AffineSubspace(rng.normal(size=5), rng.normal(size=(3, 5)))
    for _ in range(100):
        x = rng.normal(size=5)
        p = S.project(x)
        d = S.project(rng.normal(size=5) * 4)
        assert abs(np.dot(x - p, d - p)) < 1e-9


def test_affine_from_equations():
    S = AffineSubspace.from_equations([[1.0, 1.0, 0.0]], [2.0])
    p = S.project([0.0, 0.0, 5.0])
    np.testing.assert_allclose(p, [1.0, 1.0, 5.0])
    assert S.is_affine and S.contains([2.0, 0.0, -1.0])


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        EuclideanBall([0, 0], 1).project([1.0, 2.0, 3.0])


def test_whole_space_is_identity():
    x = np.array([1.0, -2.0])
    assert WholeSpace(2).project(x) is not None
    np.testing.assert_array_equal(WholeSpace(2).project(x), x)


def test_annulus_projection_and_tie():
    B = Annulus(1, 2)
    np.testing.assert_allclose(B.project([0.5, 0.0]), [1.0, 0.0])
    np.testing.assert_allclose(B.project([0.0, 3.0]), [0.0, 2.0])
    np.testing.assert_allclose(B.project([0.0, 0.0]), [-1.0, 0.0])
    C = Annulus(1, 2, tie_direction=[1.0, 1.0])
    np.testing.assert_allclose(C.project([0.0, 0.0]), [2**-0.5, 2**-0.5])
    assert not B.is_convex


def sqrt_ball_oracle(x, n=400_001):
    # dense sampling of the full boundary in all four quadrants
    s = np.linspace(0, 1, n)
    q = np.column_stack([s**2, (1 - s) ** 2])
    best = None
    for sx in (1, -1):
        for sy in (1, -1):
            pts = q * [sx, sy]
            i = np.argmin(np.sum((pts - x) ** 2, axis=1))
            if best is None or np.linalg.norm(pts[i] - x) < np.linalg.norm(best - x):
                best = pts[i]
    return best


@settings(max_examples=40, deadline=None)
@given(point2)
def test_sqrt_ball_matches_dense_oracle(x):
    S = SqrtBall()
    p = S.project(x)
    if S._gauge(x) <= 1:
        np.testing.assert_array_equal(p, x)
        return
    o = sqrt_ball_oracle(x)
    assert np.linalg.norm(x - p) <= np.linalg.norm(x - o) + 1e-9


@given(point2)
def test_reflection_is_twice_projection_minus_identity(x):
    for S in (Diamond(1.0), EuclideanBall([0.0, 0.0], 1.0), Annulus(1, 2)):
        np.testing.assert_allclose(reflect(S, x), 2 * S.project(x) - x)


def test_invalid_parameters():
    with pytest.raises(ValueError):
        EuclideanBall([0, 0], -1)
    with pytest.raises(ValueError):
        Annulus(2, 1)
    with pytest.raises(ValueError):
        Box([1, 1], [0, 2])
    with pytest.raises(ValueError):
        Halfspace([0, 0], 1)
