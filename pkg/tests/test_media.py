import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polyscat.errors import InvariantViolated
from polyscat.media import (POTENTIAL, REFRACTIVE_INDEX, SOUND_SPEED, AdmissibleDescriptor, Grid2D,
                            build_coefficient, zero_contrast)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-2, 2), min_size=1, max_size=9))
def test_descriptor_is_harmonic(coeffs):
    d = AdmissibleDescriptor(tuple(coeffs))
    x, y, h = 0.31, -0.17, 1e-3
    lap = (d(x + h, y) + d(x - h, y) + d(x, y + h) + d(x, y - h) - 4 * d(x, y)) / h ** 2
    scale = 1 + sum(abs(c) for c in coeffs)
    assert abs(lap) <= 1e-4 * scale


def test_descriptor_terms():
    d = AdmissibleDescriptor.from_terms({0: 1.0, 2: 1 + 2j})
    x, y = 0.5, 0.25
    z = complex(x, y)
    assert d(x, y) == pytest.approx(1.0 + (z ** 2).real + 2 * (z ** 2).imag)
    assert d.degree == 2


def test_coefficient_values(triangle):
    c = build_coefficient(SOUND_SPEED, triangle, AdmissibleDescriptor.constant(4.0))
    assert c.inv_c2_at(0.3, 0.0) == pytest.approx(4.0)
    assert c.inv_c2_at(-1.0, 0.0) == pytest.approx(1.0)
    assert c.max_value() == pytest.approx(1.0)


def test_sound_speed_must_be_positive(triangle):
    with pytest.raises(InvariantViolated):
        build_coefficient(SOUND_SPEED, triangle, AdmissibleDescriptor((0.1, 1.0)))


def test_potential_nonzero_at_corners(triangle):
    # q = x + 0.2 vanishes at the apex (-0.2, 0)
    with pytest.raises(InvariantViolated):
        build_coefficient(POTENTIAL, triangle, AdmissibleDescriptor((0.2, 1.0)))


def test_index_not_one_at_corners(triangle):
    with pytest.raises(InvariantViolated):
        build_coefficient(REFRACTIVE_INDEX, triangle, AdmissibleDescriptor.constant(1.0))


def test_zero_contrast_is_background(square):
    q = zero_contrast(POTENTIAL, square)
    assert np.all(q.contrast_at(np.array([0.0, 5.0]), np.array([0.0, 0.0])) == 0)


def test_grid_geometry():
    g = Grid2D.centered(1.0, 0.25)
    assert g.shape == (9, 9)
    assert g.x[0] == pytest.approx(-1.0) and g.x[-1] == pytest.approx(1.0)
    assert g.index_of((0.0, 0.0)) == (4, 4)


def test_interpolation_exact_for_bilinear(rng):
    g = Grid2D.centered(1.0, 0.1)
    X, Y = g.mesh()
    vals = 1 + 2 * X - 3 * Y + 0.5 * X * Y
    pts = rng.uniform(-0.9, 0.9, size=(20, 2))
    got = g.interpolate(pts, vals)
    ref = 1 + 2 * pts[:, 0] - 3 * pts[:, 1] + 0.5 * pts[:, 0] * pts[:, 1]
    np.testing.assert_allclose(got, ref, rtol=0, atol=1e-13)
