"""Randomised invariants (hypothesis)."""

import numpy as np
import pytest
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st
from scipy.spatial import ConvexHull

from asymsob import (
    ConvexBody,
    MomentNormSpec,
    extrapolate_limit,
    minkowski_functional,
    moment_norm,
    polar_body,
)

SETTINGS = settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])

coord = st.floats(-2.0, 2.0, allow_nan=False)
vec2 = st.tuples(coord, coord).map(np.array)


@st.composite
def polygons(draw):
    """Convex polygons with the origin well inside: star-shaped radii on sorted angles."""
    k = draw(st.integers(3, 7))
    angles = np.sort(np.array(draw(st.lists(st.floats(0, 2 * np.pi), min_size=k, max_size=k, unique=True))))
    gaps = np.diff(np.concatenate([angles, [angles[0] + 2 * np.pi]]))
    assume(gaps.max() < 0.9 * np.pi)
    radii = np.array(draw(st.lists(st.floats(0.3, 2.0), min_size=k, max_size=k)))
    pts = radii[:, None] * np.column_stack([np.cos(angles), np.sin(angles)])
    return ConvexBody.polytope_v(pts)


def nonzero(v):
    return np.linalg.norm(v) > 1e-3


@SETTINGS
@given(polygons(), vec2, st.floats(0.01, 50.0))
def test_gauge_positive_homogeneity(K, x, lam):
    assert minkowski_functional(K, lam * x) == pytest.approx(lam * minkowski_functional(K, x), rel=1e-10, abs=1e-12)


@SETTINGS
@given(polygons(), vec2, vec2)
def test_gauge_subadditive(K, x, y):
    assert minkowski_functional(K, x + y) <= minkowski_functional(K, x) + minkowski_functional(K, y) + 1e-10


@SETTINGS
@given(polygons())
def test_gauge_is_one_on_the_boundary(K):
    hull = ConvexHull(K.vertices)
    np.testing.assert_allclose(minkowski_functional(K, K.vertices[hull.vertices]), 1.0, rtol=1e-10)
    inner = np.delete(K.vertices, hull.vertices, axis=0)
    assert np.all(minkowski_functional(K, inner) <= 1.0 + 1e-12) if inner.size else True


@SETTINGS
@given(polygons(), vec2)
def test_polar_gauge_is_support_function(K, x):
    # ||x||_{K polar} = max over vertices of K of <x, v>
    assert minkowski_functional(polar_body(K), x) == pytest.approx(max(0.0, np.max(K.vertices @ x)), rel=1e-9, abs=1e-12)


@SETTINGS
@given(polygons(), vec2, st.sampled_from([1, 2, 3]))
def test_moment_sign_identities(K, v, p):
    assume(nonzero(v))
    plus = moment_norm(MomentNormSpec(K, p, "plus"), v)
    minus = moment_norm(MomentNormSpec(K, p, "minus"), v)
    sym = moment_norm(MomentNormSpec(K, p, "symmetric"), v)
    assert minus == pytest.approx(moment_norm(MomentNormSpec(K, p, "plus"), -v), rel=1e-12)
    assert plus**p + minus**p == pytest.approx(2 * sym**p, rel=1e-12)


@SETTINGS
@given(polygons(), vec2, st.floats(0.05, 20.0), st.sampled_from([1, 2, 4]))
def test_moment_norm_homogeneity(K, v, lam, p):
    assume(nonzero(v))
    spec = MomentNormSpec(K, p, "plus")
    assert moment_norm(spec, lam * v) == pytest.approx(lam * moment_norm(spec, v), rel=1e-11)


@SETTINGS
@given(polygons(), vec2, st.lists(st.floats(-2, 2), min_size=4, max_size=4), st.sampled_from([1, 2]))
def test_moment_norm_gl_covariance(K, v, entries, p):
    # ||v||_{AK}^p = |det A| ||A^T v||_K^p
    A = np.array(entries).reshape(2, 2)
    assume(abs(np.linalg.det(A)) > 0.1 and nonzero(v))
    AK = ConvexBody.polytope_v(K.vertices @ A.T)
    lhs = moment_norm(MomentNormSpec(AK, p), v) ** p
    rhs = abs(np.linalg.det(A)) * moment_norm(MomentNormSpec(K, p), A.T @ v) ** p
    assert lhs == pytest.approx(rhs, rel=1e-9)


@SETTINGS
@given(
    st.floats(-5, 5),
    st.floats(-5, 5),
    st.lists(st.floats(0.05, 0.999), min_size=3, max_size=7, unique=True),
)
def test_extrapolation_exact_on_affine_data(L, c, s):
    assume(np.ptp(s) > 0.01)
    limit, slope, resid = extrapolate_limit([(x, L + c * (1 - x)) for x in s])
    assert limit == pytest.approx(L, abs=1e-9)
    assert slope == pytest.approx(c, abs=1e-8)
    assert resid < 1e-9


@SETTINGS
@given(st.floats(0.2, 3.0), st.floats(-1.0, 1.0))
def test_interval_moment_closed_form(b, v):
    # K=[-1, b], p=1: ||v||_+ = 2 * int (v x)_+ dx = v b^2 for v>0, -v for v<0
    assume(abs(v) > 1e-3)
    K = ConvexBody.interval(-1.0, b)
    want = v * b * b if v > 0 else -v
    assert moment_norm(MomentNormSpec(K, 1), np.array([v])) == pytest.approx(want, rel=1e-12)
