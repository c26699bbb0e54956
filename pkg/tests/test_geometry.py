import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from polyscat.errors import DegenerateVertex, EpsTooLarge, NonConvex
from polyscat.geometry import (BOUNDARY, INSIDE, OUTSIDE, BumpProfile1D, BumpProfile2D, Point2,
                               bump_integral, classify_points, contains, corner_sector,
                               make_convex_polygon)


def test_triangle_area_and_angles(triangle):
    # base 1.2 on x = 0.6, apex at x = -0.2
    assert triangle.area() == pytest.approx(0.5 * 1.2 * 0.8, rel=1e-14)
    total = sum(triangle.interior_angle(i) for i in range(3))
    assert total == pytest.approx(np.pi, rel=1e-14)


def test_square_right_angles(square):
    for i in range(4):
        assert square.interior_angle(i) == pytest.approx(np.pi / 2, rel=1e-14)


def test_clockwise_input_is_reoriented():
    ccw = make_convex_polygon([(0, 0), (1, 0), (0, 1)])
    cw = make_convex_polygon([(0, 0), (0, 1), (1, 0)])
    assert ccw.area() == pytest.approx(cw.area())
    assert contains(cw, (0.2, 0.2)) == INSIDE


def test_nonconvex_rejected():
    with pytest.raises(NonConvex):
        make_convex_polygon([(0, 0), (2, 0), (1, 0.5), (2, 2), (0, 2)])


def test_collinear_vertex_rejected():
    with pytest.raises(DegenerateVertex):
        make_convex_polygon([(0, 0), (1, 0), (2, 0), (1, 1)])


def test_classification(triangle):
    pts = np.array([[0.3, 0.0], [0.6, 0.0], [-0.2, 0.0], [1.0, 0.0], [-0.5, 0.5]])
    assert classify_points(triangle, pts).tolist() == [1, 0, 0, -1, -1]
    assert [contains(triangle, p) for p in pts] == [INSIDE, BOUNDARY, BOUNDARY, OUTSIDE, OUTSIDE]


def test_distance_to_polygon(square):
    assert square.distance_to((-0.8, 0.0)) == pytest.approx(0.6)
    assert square.distance_to((1.6, 1.4)) == pytest.approx(np.hypot(1.0, 1.0))
    assert square.distance_to((0.2, 0.0)) == 0.0


@st.composite
def convex_polygons(draw):
    n = draw(st.integers(3, 9))
    angles = np.sort(draw(st.lists(st.floats(0, 2 * np.pi, exclude_max=True), min_size=n,
                                   max_size=n, unique=True)))
    gaps = np.diff(np.r_[angles, angles[0] + 2 * np.pi])
    if gaps.min() < 0.05 or gaps.max() > np.pi - 0.05:
        angles = 2 * np.pi * np.arange(n) / n
    r = draw(st.floats(0.2, 3.0))
    return make_convex_polygon(np.c_[r * np.cos(angles), r * np.sin(angles)])


@settings(max_examples=60, deadline=None)
@given(convex_polygons(), st.lists(st.floats(0, 1), min_size=3, max_size=3))
def test_convex_combinations_are_not_outside(poly, w):
    v = poly.as_array()
    w = np.asarray(w) + 1e-3
    w /= w.sum()
    p = w @ v[:3]
    assert contains(poly, p) != OUTSIDE


@settings(max_examples=60, deadline=None)
@given(convex_polygons(), st.floats(-5, 5), st.floats(-5, 5))
def test_classification_translation_invariant(poly, dx, dy):
    pts = np.random.default_rng(0).uniform(-4, 4, size=(50, 2))
    a = classify_points(poly, pts)
    b = classify_points(poly.translated(dx, dy), pts + [dx, dy])
    assert list(a) == list(b)


@settings(max_examples=40, deadline=None)
@given(convex_polygons())
def test_angle_sum(poly):
    n = len(poly.vertices)
    total = sum(poly.interior_angle(i) for i in range(n))
    assert total == pytest.approx((n - 2) * np.pi, rel=1e-12)


def test_corner_sector(square):
    sec = corner_sector(square, 0, 0.2)
    assert sec.opening_half_angle == pytest.approx(np.pi / 4)
    pts = sec.sample_points()
    assert np.all(np.hypot(pts[:, 0] - sec.apex.x, pts[:, 1] - sec.apex.y) < 0.2)
    assert np.all(classify_points(square, pts) >= 0)


def test_corner_sector_eps_bounds(square):
    with pytest.raises(EpsTooLarge):
        corner_sector(square, 0, 0.5)
    with pytest.raises(EpsTooLarge):
        corner_sector(square, 0, 0.0)


def test_bump_integrals_match_quadrature():
    g = BumpProfile1D(1.0, 0.5, 2.0)
    ref = integrate.quad(g, 0.5, 1.5, epsabs=0, epsrel=1e-12)[0]
    assert bump_integral(g) == pytest.approx(ref, rel=1e-10)
    assert g.laplace(1e-12) == pytest.approx(ref, rel=1e-9)

    f = BumpProfile2D(Point2(0.3, -0.2), 0.4, 1.5)
    ref2 = integrate.dblquad(lambda y, x: float(f(x, y)), -0.1, 0.7, -0.6, 0.2,
                             epsabs=0, epsrel=1e-10)[0]
    assert bump_integral(f) == pytest.approx(ref2, rel=1e-7)


def test_bump_profile_support():
    g = BumpProfile1D(1.0, 0.25)
    assert g.support == (0.75, 1.25)
    assert g(np.array([0.74, 1.26])).tolist() == [0.0, 0.0]
    assert g(1.0) == pytest.approx(np.exp(-1.0))
