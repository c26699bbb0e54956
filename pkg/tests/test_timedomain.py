import numpy as np
import pytest
from scipy import fft as sfft
from scipy import integrate

from polyscat import corpus
from polyscat import timedomain as td
from polyscat.errors import CflViolated, ConfigInvalid
from polyscat.geometry import BumpProfile1D, BumpProfile2D, Point2
from polyscat.media import POTENTIAL, SOUND_SPEED, Grid2D, zero_contrast


def _free_wave_oracle(f, g, x, t):
    """Retarded 2D potential: u(x,t) = int f(y) (1/2pi) int_0^{t-r} g(t-r cosh..) ... in polar form."""
    def inner(r):
        if t <= r:
            return 0.0
        smax = np.arccosh(t / r)
        val = integrate.quad(lambda u: float(g(t - r * np.cosh(u))), 0, smax, limit=200, epsabs=1e-13)[0]
        return val / (2 * np.pi)

    xr, wr = np.polynomial.legendre.leggauss(40)
    rr, wr = 0.5 * (xr + 1) * f.radius, 0.5 * wr * f.radius
    th = 2 * np.pi * np.arange(64) / 64
    tot = 0.0
    for ri, wi in zip(rr, wr):
        fv = float(f.radial(ri))
        for tj in th:
            y = np.array([f.center.x + ri * np.cos(tj), f.center.y + ri * np.sin(tj)])
            tot += wi * ri * (2 * np.pi / 64) * fv * inner(np.linalg.norm(np.asarray(x) - y))
    return tot


def test_leapfrog_matches_free_space_solution(square):
    f = BumpProfile2D(Point2(-1.0, 0.0), 0.4, 1.0)
    g = BumpProfile1D(0.3, 0.25)
    h = 8.0 / 256
    grid = Grid2D.centered(4.0, h)
    dt = 0.99 * td.CFL_SAFETY * h / np.sqrt(2)
    T = 2.0
    n = int(round(T / dt))
    cfg = td.WaveConfig(zero_contrast(SOUND_SPEED, square), f, g, grid, dt, n * dt,
                        snapshot_stride=n, record_stride=10 ** 9)
    sol, _ = td.solve_wave(cfg)
    p = np.array([0.5, 0.3])
    got = float(sol.window.interpolate(p, sol.snapshots[-1]))
    ref = _free_wave_oracle(f, g, p, sol.times[-1])
    assert got == pytest.approx(ref, rel=1e-2)


def test_cfl_enforced(triangle):
    prob = corpus.wave_instance()
    grid = Grid2D.centered(3.0, 0.05)
    with pytest.raises(CflViolated):
        td.solve_wave(td.WaveConfig(prob.c_field, prob.f, prob.g, grid, 0.05, 3.0))


def test_source_overlap_rejected(triangle):
    prob = corpus.wave_instance()
    f = BumpProfile2D(Point2(0.3, 0.0), 0.2)
    with pytest.raises(ConfigInvalid):
        td.solve_wave(td.WaveConfig(prob.c_field, f, prob.g, Grid2D.centered(3.0, 0.05), 0.01, 3.0))


def test_energy_constant_after_source_switches_off():
    prob = corpus.wave_instance()
    h = 0.05
    T = 6.0
    grid = Grid2D.centered(prob.record_radius + T + 4 * h, h)
    dt = td.CFL_SAFETY * h / np.sqrt(2)
    cfg = td.WaveConfig(prob.c_field, prob.f, prob.g, grid, dt, T, snapshot_stride=10 ** 9,
                        record_stride=10 ** 9, snapshot_window=0.5, energy_stride=5)
    sol, _ = td.solve_wave(cfg)
    E = td.energy_curve(sol, prob.c_field)
    post = E[:, 0] > prob.g.support[1] + 2 * dt
    e = E[post, 1]
    assert e[0] > 0
    assert np.max(np.abs(e / e[0] - 1)) < 1e-10


def test_finite_propagation_speed():
    prob = corpus.wave_instance()
    h = 0.05
    T = 1.6
    grid = Grid2D.centered(prob.record_radius + T + 4 * h, h)
    dt = td.CFL_SAFETY * h / np.sqrt(2)
    n = int(T / dt)
    sol, _ = td.solve_wave(td.WaveConfig(prob.c_field, prob.f, prob.g, grid, dt, n * dt,
                                         snapshot_stride=n, record_stride=10 ** 9))
    X, Y = sol.window.mesh()
    r = np.hypot(X - prob.f.center.x, Y - prob.f.center.y)
    reach = prob.f.radius + (sol.times[-1] - prob.g.support[0]) + 4 * h
    u = sol.snapshots[-1]
    # leapfrog has a finite numerical domain of dependence; far field is exactly zero
    assert np.max(np.abs(u[r > 2 * reach])) == 0.0
    assert np.max(np.abs(u[r < reach])) > 0


def _schrodinger(q_value, T, dt=1e-3, h=0.05, box=3.0, absorber="none"):
    poly = corpus.polygon("triangle")
    from polyscat.media import AdmissibleDescriptor, build_coefficient
    q = (zero_contrast(POTENTIAL, poly) if q_value == 0
         else build_coefficient(POTENTIAL, poly, AdmissibleDescriptor.constant(q_value)))
    grid = Grid2D.centered(box, h)
    cfg = td.SchrodingerConfig(q, corpus.standard_source(), grid, dt, T, absorber=absorber,
                               snapshot_stride=max(1, int(round(T / dt / 10))), record_stride=10 ** 9)
    return td.solve_schrodinger(cfg)


@pytest.mark.parametrize("q", [0.0, 2.0])
def test_schrodinger_mass_conserved(q):
    sol, _ = _schrodinger(q, 0.5)
    m = td.mass_curve(sol)[:, 1]
    assert np.max(np.abs(m / m[0] - 1)) < 1e-10


def _dst_symbols(sol):
    g = sol.window
    h = g.spacing
    lx = 4 / h ** 2 * np.sin(np.arange(1, g.nx - 1) * np.pi / (2 * (g.nx - 1))) ** 2
    ly = 4 / h ** 2 * np.sin(np.arange(1, g.ny - 1) * np.pi / (2 * (g.ny - 1))) ** 2
    return lx[:, None], ly[None, :]


def _initial_interior(sol):
    X, Y = sol.window.mesh()
    return corpus.standard_source()(X, Y)[1:-1, 1:-1].astype(complex)


def test_schrodinger_adi_is_exact_cayley_product():
    # q = 0: each step multiplies sine mode (j, k) by C(lx_j) C(ly_k),
    # C(l) = (1 - i dt l / 2) / (1 + i dt l / 2)
    dt, T = 2e-3, 0.1
    sol, _ = _schrodinger(0.0, T, dt=dt, h=0.05, box=3.0)
    lx, ly = _dst_symbols(sol)
    cay = lambda lam: (1 - 0.5j * dt * lam) / (1 + 0.5j * dt * lam)
    n = int(round(sol.times[-1] / dt))
    ref = sfft.idstn((cay(lx) * cay(ly)) ** n * sfft.dstn(_initial_interior(sol), type=1), type=1)
    got = sol.snapshots[-1][1:-1, 1:-1]
    assert np.linalg.norm(got - ref) / np.linalg.norm(ref) < 1e-10


def test_schrodinger_time_order():
    # converges to the semi-discrete solution exp(-i (lx + ly) t) at second order
    T = 0.02
    errs = []
    for dt in (2e-4, 1e-4, 5e-5):
        sol, _ = _schrodinger(0.0, T, dt=dt, h=0.05, box=3.0)
        lx, ly = _dst_symbols(sol)
        exact = sfft.idstn(np.exp(-1j * (lx + ly) * T) * sfft.dstn(_initial_interior(sol), type=1),
                           type=1)
        errs.append(np.linalg.norm(sol.snapshots[-1][1:-1, 1:-1] - exact))
    assert 3.5 <= errs[0] / errs[1] <= 4.5
    assert 3.5 <= errs[1] / errs[2] <= 4.5


def test_recording_shapes():
    prob = corpus.wave_instance()
    h = 0.05
    T = 2.0
    grid = Grid2D.centered(prob.record_radius + T + 4 * h, h)
    dt = td.CFL_SAFETY * h / np.sqrt(2)
    sol, rec = td.solve_wave(td.WaveConfig(prob.c_field, prob.f, prob.g, grid, dt, T,
                                           n_angles=64, record_stride=4))
    assert rec.u_values.shape == (64, len(rec.times))
    assert rec.dnu_values.shape == rec.u_values.shape
    assert np.allclose(np.diff(rec.times), 4 * dt)
