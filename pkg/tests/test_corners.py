import numpy as np
import pytest

from polyscat import corners, corpus
from polyscat import frequency as fq
from polyscat.errors import GeometryMismatch, RangeNotCertified
from polyscat.geometry import corner_sector, make_convex_polygon
from polyscat.media import AdmissibleDescriptor
from polyscat.timedomain import BoundaryRecording


def _free_field(f, kern, p, n_r=64, n_t=128):
    """Gauss-Legendre / trapezoid quadrature of int G(p - y) f(y) dy."""
    xg, wg = np.polynomial.legendre.leggauss(n_r)
    rr, wr = 0.5 * f.radius * (xg + 1), 0.5 * f.radius * wg
    th = 2 * np.pi * np.arange(n_t) / n_t
    R, TH = np.meshgrid(rr, th, indexing="ij")
    Y1, Y2 = f.center.x + R * np.cos(TH), f.center.y + R * np.sin(TH)
    vals = kern(np.hypot(p[0] - Y1, p[1] - Y2))
    return np.sum(wr[:, None] * R * np.real(f.radial(R)) * vals) * 2 * np.pi / n_t


def test_linear_fit_exact():
    x = np.linspace(0, 3, 7)
    fit = corners.linear_fit(x, 2 * x + 1)
    assert fit["slope"] == pytest.approx(2.0)
    assert fit["intercept"] == pytest.approx(1.0)
    assert fit["r2"] == pytest.approx(1.0)


def test_corner_value_without_contrast_matches_free_field():
    prob = corpus.wave_instance(contrast=False, pulse=corpus.early_pulse())
    O = corpus.nearest_corner(prob.polygon, prob.f.center)
    s_list = [0.05, 0.2]
    probe = corners.corner_blowup_small_s(prob, O, s_list, spacing=0.0125)
    for s, v in zip(s_list, probe.values):
        ref = prob.g.laplace(s) * _free_field(prob.f, fq.Kernel(fq.MODIFIED_HELMHOLTZ, s), (O.x, O.y))
        assert v.real == pytest.approx(ref, rel=2e-3)


def test_blowup_slope_without_contrast():
    # c = 1: u(O, s) = ghat(s) int K0(s|O-y|) f / 2pi ~ oracle * ln(1/s) + const
    prob = corpus.wave_instance(contrast=False, pulse=corpus.early_pulse())
    O = corpus.nearest_corner(prob.polygon, prob.f.center)
    probe = corners.corner_blowup_small_s(prob, O, np.geomspace(0.05, 0.5, 6))
    assert probe.monotone_blowup
    assert probe.slope_error < 0.15


def test_range_not_certified():
    prob = corpus.wave_instance()
    with pytest.raises(RangeNotCertified):
        corners.corner_blowup_small_s(prob, prob.polygon.vertices[0], [100.0], spacing=0.0125)


def test_ring_average_about_bump_center():
    f = corpus.standard_source()
    for r in (0.0, 0.1, 0.3):
        assert corners.ring_average(f, r, (f.center.x, f.center.y)) == pytest.approx(
            2 * np.pi * f.radial(r), rel=1e-12)
    assert corners.ring_average(f, 0.5, (f.center.x, f.center.y)) == 0


def _rec(u, times=(0.0, 1.0)):
    n = u.shape[0]
    return BoundaryRecording(2.0, 2 * np.pi * np.arange(n) / n, np.asarray(times), u, 2 * u)


def test_cauchy_gap_properties(rng):
    a = rng.standard_normal((64, 2))
    b = rng.standard_normal((64, 2))
    assert corners.cauchy_gap(_rec(a), _rec(a)).u_gap == 0
    g1 = corners.cauchy_gap(_rec(a), _rec(b))
    g2 = corners.cauchy_gap(_rec(b), _rec(a))
    assert g1.u_gap == pytest.approx(g2.u_gap)
    assert g1.dnu_gap == pytest.approx(g1.u_gap)
    with pytest.raises(GeometryMismatch):
        corners.cauchy_gap(_rec(a), _rec(a[:, :1], times=(0.0,)))
    with pytest.raises(GeometryMismatch):
        corners.cauchy_gap(_rec(a), _rec(a, times=(0.0, 2.0)))


def test_spectral_cauchy_data_without_contrast():
    prob = corpus.wave_instance(contrast=False)
    s = 1.0
    rec = corners.spectral_cauchy_data(prob, [s], spacing=0.025, n_angles=64)
    kern = fq.Kernel(fq.MODIFIED_HELMHOLTZ, s)
    for k in (0, 16, 32):
        p = 2.0 * np.array([np.cos(rec.angles[k]), np.sin(rec.angles[k])])
        ref = prob.g.laplace(s) * _free_field(prob.f, kern, p)
        assert rec.u_values[k, 0].real == pytest.approx(ref, rel=1e-3)


def test_sector_source_test():
    square = make_convex_polygon([(0, 0), (1, 0), (1, 1), (0, 1)])
    sector = corner_sector(square, 0, 0.4)
    one = lambda x, y: np.ones_like(np.asarray(x, dtype=float))
    r0 = corners.sector_source_test(sector, AdmissibleDescriptor.constant(0.0), one, n_r=16, n_t=16)
    r1 = corners.sector_source_test(sector, AdmissibleDescriptor.constant(1.0), one, n_r=16, n_t=16)
    assert r0 == 0.0
    assert r1 > 0.01
