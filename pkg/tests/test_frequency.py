import numpy as np
import pytest
from scipy import integrate, special

from polyscat import corpus
from polyscat import frequency as fq
from polyscat.errors import NotContractive
from polyscat.geometry import make_convex_polygon
from polyscat.media import (POTENTIAL, REFRACTIVE_INDEX, AdmissibleDescriptor, Grid2D,
                            build_coefficient, zero_contrast)


@pytest.mark.parametrize("kind,param", [(fq.MODIFIED_HELMHOLTZ, 3.0), (fq.HELMHOLTZ, 5.0),
                                        (fq.SCHRODINGER_LAPLACE, 40.0)])
def test_cell_integral_matches_quadrature(kind, param):
    kern = fq.Kernel(kind, param)
    a = 0.05
    opts = dict(limit=500, epsabs=0, epsrel=1e-13)
    re = integrate.quad(lambda r: (2 * np.pi * r * kern(r)).real, 0, a, **opts)[0]
    im = integrate.quad(lambda r: (2 * np.pi * r * kern(r)).imag, 0, a, **opts)[0]
    assert abs(kern.cell_integral(a) - complex(re, im)) <= 1e-10 * abs(complex(re, im))


def _mie_far_field(k, n, a, angles, m_max=30):
    k1 = k * np.sqrt(n)
    J, H, Jp, Hp = special.jv, special.hankel1, special.jvp, special.h1vp
    out = np.zeros(len(angles), complex)
    for m in range(-m_max, m_max + 1):
        b = -((k * Jp(m, k * a) * J(m, k1 * a) - k1 * J(m, k * a) * Jp(m, k1 * a))
              / (k * Hp(m, k * a) * J(m, k1 * a) - k1 * H(m, k * a) * Jp(m, k1 * a)))
        out += b * np.exp(1j * m * angles)
    return out * np.exp(-1j * np.pi / 4) * np.sqrt(2 / (np.pi * k))


def test_far_field_matches_mie_series():
    k, n, a = 2.0, 1.5, 0.5
    th = np.linspace(0, 2 * np.pi, 256, endpoint=False)
    disk = make_convex_polygon(np.c_[a * np.cos(th), a * np.sin(th)])
    coef = build_coefficient(REFRACTIVE_INDEX, disk, AdmissibleDescriptor.constant(n))
    sol = fq.lippmann_schwinger_solve(fq.Kernel(fq.HELMHOLTZ, k), coef,
                                      fq.IncidentField.plane_wave(k, 0.0), Grid2D.centered(1.0, 0.01))
    ff = fq.far_field(coef, sol, k, 16)
    ref = _mie_far_field(k, n, a, ff.directions)
    assert np.max(np.abs(ff.values - ref)) / np.max(np.abs(ref)) < 0.01


def test_zero_contrast_gives_incident_field(triangle):
    k = 3.0
    g = Grid2D.centered(0.8, 0.05)
    coef = zero_contrast(REFRACTIVE_INDEX, triangle)
    drive = fq.IncidentField.plane_wave(k, 0.4)
    sol = fq.lippmann_schwinger_solve(fq.Kernel(fq.HELMHOLTZ, k), coef, drive, g)
    np.testing.assert_allclose(sol.values, fq.incident_values(drive, g), atol=1e-12)


def test_neumann_agrees_with_gmres():
    prob = corpus.schrodinger_instance()
    s = 100.0
    from polyscat import corners
    grid = corners.solver_grid(prob, corners.dominance_spacing(s))
    kern = fq.Kernel(fq.SCHRODINGER_LAPLACE, s)
    drive = fq.IncidentField.volume_source(prob.u0, -1j)
    a = fq.lippmann_schwinger_solve(kern, prob.q_field, drive, grid, "neumann", tol=1e-10)
    b = fq.lippmann_schwinger_solve(kern, prob.q_field, drive, grid, "direct_iterative", tol=1e-10)
    assert np.linalg.norm(a.values - b.values) / np.linalg.norm(b.values) < 1e-8


def test_neumann_refuses_without_contraction():
    prob = corpus.schrodinger_instance(q=20.0)
    grid = Grid2D.covering(-1.3, 0.7, -0.7, 0.7, 0.05)
    kern = fq.Kernel(fq.SCHRODINGER_LAPLACE, 1.0)
    assert fq.operator_norm(kern, prob.q_field, grid) >= 1
    with pytest.raises(NotContractive):
        fq.lippmann_schwinger_solve(kern, prob.q_field, fq.IncidentField.volume_source(prob.u0, -1j),
                                    grid, "neumann")


def test_operator_norms_match_dense_matrix(triangle):
    q = build_coefficient(POTENTIAL, triangle, AdmissibleDescriptor.constant(2.0))
    grid = Grid2D.covering(-0.3, 0.7, -0.7, 0.7, 0.1)
    for s in (1.0, 10.0):
        kern = fq.Kernel(fq.SCHRODINGER_LAPLACE, s)
        op = fq.LSOperator(kern, q, grid)
        n = grid.nx * grid.ny
        cols = []
        for j in range(n):
            e = np.zeros(n, complex)
            e[j] = 1.0
            cols.append(op(e.reshape(grid.shape)).ravel())
        K = np.array(cols).T
        sup = fq.operator_norm(kern, q, grid, "sup", op=op)
        l2 = fq.operator_norm(kern, q, grid, "l2", op=op, tol=1e-10)
        assert sup == pytest.approx(np.max(np.abs(K).sum(axis=1)), rel=1e-10)
        assert l2 == pytest.approx(np.linalg.norm(K, 2), rel=1e-6)


def test_modified_helmholtz_green_residual():
    from polyscat import laplace as lp
    s = 2.0
    grid = Grid2D.covering(0.5, 1.5, -0.5, 0.5, 1e-2)
    X, Y = grid.mesh()
    G = fq.Kernel(fq.MODIFIED_HELMHOLTZ, s)(np.hypot(X, Y))
    lap = lp.laplacian(G, grid.spacing, order=4)
    ok = np.isfinite(lap)
    assert np.max(np.abs(lap[ok] - s ** 2 * G[ok])) / np.max(np.abs(s ** 2 * G)) < 1e-6


def test_wave_spectral_solve_without_contrast_is_convolution(triangle):
    # c = 1: u_hat = ghat * (G_s * f); compare with direct quadrature at one point
    from polyscat.media import SOUND_SPEED
    c = zero_contrast(SOUND_SPEED, triangle)
    f = corpus.standard_source()
    s, ghat = 1.5, 0.7
    grid = Grid2D.covering(-1.3, 0.7, -0.7, 0.7, 0.0125)
    sol = fq.wave_spectral_solve(c, f, ghat, s, grid)
    p = np.array([0.4, 0.3])
    kern = fq.Kernel(fq.MODIFIED_HELMHOLTZ, s)
    xg, wg = np.polynomial.legendre.leggauss(64)
    rr, wr = 0.5 * f.radius * (xg + 1), 0.5 * f.radius * wg
    th = 2 * np.pi * np.arange(128) / 128
    R, TH = np.meshgrid(rr, th, indexing="ij")
    Y1, Y2 = f.center.x + R * np.cos(TH), f.center.y + R * np.sin(TH)
    ref = ghat * np.sum(wr[:, None] * R * f.radial(R) * kern(np.hypot(p[0] - Y1, p[1] - Y2))) * 2 * np.pi / 128
    assert float(grid.with_values(sol.values).interpolate(p)) == pytest.approx(ref, rel=2e-3)
