"""End-to-end checks that combine the solver modules.

Each function runs one measurable property on a problem instance and returns
a :class:`Check` with the measured quantities and a pass/fail verdict. The
lemma registry, the CLI and the acceptance suite all go through here.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from numpy.polynomial.legendre import leggauss

from . import corners, corpus
from . import frequency as fq
from . import laplace as lp
from . import timedomain as td
from .geometry import BumpProfile2D, Point2, corner_sector, make_convex_polygon
from .media import POTENTIAL, AdmissibleDescriptor, Grid2D, build_coefficient, zero_contrast

log = logging.getLogger(__name__)


@dataclass
class Check:
    name: str
    passed: bool
    metrics: dict[str, Any] = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        keys = ", ".join(f"{k}={_fmt(v)}" for k, v in self.metrics.items() if np.isscalar(v))
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {keys}"

    def to_record(self) -> dict:
        return {"name": self.name, "passed": bool(self.passed), "seconds": self.seconds,
                "metrics": _jsonable(self.metrics)}


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.4g}"
    return str(v)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def _timed(fn):
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        chk = fn(*args, **kwargs)
        chk.seconds = time.perf_counter() - t0
        log.info("%s", chk.line())
        return chk

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


# ---------------------------------------------------------------- time-domain runs

def wave_run(problem: corpus.WaveProblem, spacing: float = 0.025, T: float = 20.0,
             snapshot_stride: int = 2, record_interval: float | None = None,
             energy_stride: int | None = None, window: float | None = None):
    """Reflection-free wave run: box half-width R + c_max T plus a margin.

    The step count is padded to a multiple of ``4 * snapshot_stride`` so the
    snapshot series supports the Richardson-corrected Simpson rule.
    """
    R = problem.record_radius
    c_max = problem.c_field.max_value()
    grid = Grid2D.centered(R + c_max * T + 4 * spacing, spacing)
    dt = td.CFL_SAFETY * spacing / (np.sqrt(2.0) * c_max)
    record_stride = 1
    if record_interval is not None:
        record_stride = int(np.ceil(record_interval / dt))
        dt = record_interval / record_stride
    block = 4 * snapshot_stride * record_stride // np.gcd(4 * snapshot_stride, record_stride)
    nsteps = int(np.ceil(T / dt))
    if block > nsteps:
        # snapshots effectively disabled; only the recording cadence matters
        block = record_stride
    nsteps += (-nsteps) % block
    cfg = td.WaveConfig(problem.c_field, problem.f, problem.g, grid, dt, nsteps * dt,
                        record_radius=R, snapshot_stride=snapshot_stride, record_stride=record_stride,
                        snapshot_window=R if window is None else window, energy_stride=energy_stride)
    return td.solve_wave(cfg)


def schrodinger_run(problem: corpus.SchrodingerProblem, spacing: float = 0.05, dt: float = 1e-3,
                    T: float = 12.0, box: float = 8.0, cap: td.CAP | None = td.CAP(4.0, 5.0),
                    snapshot_stride: int = 10, record_stride: int = 10, window: float | None = None):
    grid = Grid2D.centered(box, spacing)
    nsteps = int(np.ceil(T / dt))
    if 4 * snapshot_stride <= nsteps:
        nsteps += (-nsteps) % (4 * snapshot_stride)
    cfg = td.SchrodingerConfig(problem.q_field, problem.u0, grid, dt, nsteps * dt,
                               absorber=cap if cap is not None else "none",
                               record_radius=problem.record_radius, snapshot_stride=snapshot_stride,
                               record_stride=record_stride,
                               snapshot_window=problem.record_radius if window is None else window)
    return td.solve_schrodinger(cfg)


def _disk_rel_l2(a: np.ndarray, b: np.ndarray, mask: np.ndarray) -> float:
    return float(np.linalg.norm((a - b)[mask]) / np.linalg.norm(b[mask]))


# ---------------------------------------------------------------- checks

@_timed
def mass_identity(n_nodes: int = 256, n_steps: int = 10_000, dt: float = 1e-3, half_width: float = 3.0,
                  q_value: float = 2.0, tol: float = 1e-8) -> Check:
    """Unitary Schrodinger stepping: relative L2 drift with q = 0 and with real q != 0."""
    h = 2 * half_width / (n_nodes - 1)
    grid = Grid2D((-half_width, -half_width), h, n_nodes, n_nodes)
    poly = corpus.polygon("triangle")
    u0 = corpus.standard_source()
    drifts = {}
    for label, qf in (("q0", zero_contrast(POTENTIAL, poly)),
                      ("q_real", build_coefficient(POTENTIAL, poly, AdmissibleDescriptor.constant(q_value)))):
        cfg = td.SchrodingerConfig(qf, u0, grid, dt, n_steps * dt, absorber="none",
                                   record_radius=2.0, snapshot_stride=n_steps // 20,
                                   record_stride=n_steps)
        sol, _ = td.solve_schrodinger(cfg)
        m = td.mass_curve(sol)[:, 1]
        drifts[label] = float(np.max(np.abs(m / m[0] - 1.0)))
    return Check("mass_identity", max(drifts.values()) <= tol,
                 {"drift_q0": drifts["q0"], "drift_q_real": drifts["q_real"], "tol": tol,
                  "steps": n_steps, "grid": n_nodes})


@_timed
def energy_growth(problem: corpus.WaveProblem, spacing: float = 0.05, width_factor: float = 40.0,
                  max_exponent: float = 1.1) -> Check:
    """Log-log growth exponent of sqrt(E) over [2 T_g, T] for T = width_factor * |supp g|."""
    lo, hi = problem.g.support
    width = hi - lo
    T = width_factor * width
    sol, _ = wave_run(problem, spacing, T, snapshot_stride=10 ** 9, energy_stride=20, window=0.5)
    E = td.energy_curve(sol, problem.c_field)
    t, e = E[:, 0], E[:, 1]
    sel = t >= 2 * width
    env = np.sqrt(np.maximum.accumulate(e))[sel]
    exponent = float(np.polyfit(np.log(t[sel]), np.log(env), 1)[0])
    post = t >= hi
    drift = float(np.max(np.abs(e[post] / e[post][0] - 1.0)))
    return Check("energy_growth", exponent <= max_exponent,
                 {"exponent": exponent, "max_exponent": max_exponent, "T": T,
                  "post_source_energy_drift": drift})


@_timed
def laplace_bound(problem: corpus.WaveProblem, s_values=None, run=None, max_variation: float = 10.0,
                  spacing: float = 0.025, T: float = 20.0) -> Check:
    """``s^3 ||u_hat(s)||_{L2(B_R)}`` over s in [0.5, 8] varies by at most ``max_variation``."""
    s_values = np.geomspace(0.5, 8.0, 9) if s_values is None else np.asarray(s_values)
    sol, _ = run if run is not None else wave_run(problem, spacing, T)
    mask = sol.window.disk_mask(problem.record_radius)
    vals, tails, qerr = [], [], []
    for s in s_values:
        f = lp.laplace_field(sol, s, lp.WAVE_T2)
        vals.append(s ** 3 * f.l2_norm(problem.record_radius))
        tails.append(f.source_meta["tail_bound"])
        qerr.append(f.source_meta["quadrature_err_max"])
    vals = np.array(vals)
    variation = float(vals.max() / vals.min())
    dt = sol.dt
    return Check("laplace_bound", variation <= max_variation,
                 {"variation": variation, "max_variation": max_variation, "C_max": float(vals.max()),
                  "s_values": s_values, "scaled_norms": vals, "tail_bounds": tails,
                  "quadrature_err": qerr, "s_max_policy": 0.1 / dt})


@_timed
def wave_bridge(problem: corpus.WaveProblem, s_values=(0.5, 1.0, 2.0, 4.0), run=None,
                spacing: float = 0.025, T: float = 20.0, tol: float = 0.05) -> Check:
    """Laplace transform of the wave run vs direct volume-integral solve on B_R."""
    sol, _ = run if run is not None else wave_run(problem, spacing, T)
    grid = sol.window.like()
    mask = grid.disk_mask(problem.record_radius)
    errs, tails = {}, {}
    for s in s_values:
        lf = lp.laplace_field(sol, s, lp.WAVE_T2)
        direct = fq.wave_spectral_solve(problem.c_field, problem.f, problem.g.laplace(s), s, grid)
        errs[float(s)] = _disk_rel_l2(lf.values, direct.values, mask)
        tails[float(s)] = lf.source_meta["tail_bound"]
    worst = max(errs.values())
    return Check("wave_bridge", worst <= tol, {"max_rel_l2": worst, "tol": tol, "rel_l2": errs,
                                               "tail_bounds": tails})


@_timed
def schrodinger_bridge(problem: corpus.SchrodingerProblem, s_values=(0.5, 1.0, 2.0, 4.0), run=None,
                       tol: float = 0.05, **run_kw) -> Check:
    """Laplace transform of the Schrodinger run vs direct volume-integral solve on B_R."""
    sol, _ = run if run is not None else schrodinger_run(problem, **run_kw)
    grid = sol.window.like()
    mask = grid.disk_mask(problem.record_radius)
    errs, tails = {}, {}
    for s in s_values:
        lf = lp.laplace_field(sol, s, lp.SCHRODINGER_LINEAR)
        direct, _ = fq.schrodinger_spectral_solve(problem.q_field, problem.u0, s, grid)
        errs[float(s)] = _disk_rel_l2(lf.values, direct.values, mask)
        tails[float(s)] = lf.source_meta["tail_bound"]
    worst = max(errs.values())
    return Check("schrodinger_bridge", worst <= tol,
                 {"max_rel_l2": worst, "tol": tol, "rel_l2": errs, "tail_bounds": tails,
                  "cap_leakage": sol.meta["cap_leakage"]})


@_timed
def exterior_vanishing(problem: corpus.WaveProblem, spacing: float = 0.025, T: float = 4.0,
                       rel_tol: float = 1e-10, arrival_margin: float = 0.2) -> Check:
    """Zero forcing gives zero Cauchy data; before the first arrival both traces vanish."""
    zero = corpus.WaveProblem(problem.c_field, BumpProfile2D(problem.f.center, problem.f.radius, 0.0),
                              problem.g, problem.record_radius)
    sol0, rec0 = wave_run(zero, spacing, T, snapshot_stride=10 ** 9, window=0.5)
    zero_max = float(max(np.max(np.abs(rec0.u_values)), np.max(np.abs(rec0.dnu_values))))

    sol, rec = wave_run(problem, spacing, T, snapshot_stride=10, window=problem.record_radius)
    peak = float(np.max(np.abs(sol.snapshots)))
    src = problem.f
    dist = problem.record_radius - (np.hypot(src.center.x, src.center.y) + src.radius)
    t_arrival = problem.g.support[0] + dist / problem.c_field.max_value()
    pre = rec.times < t_arrival - arrival_margin
    u_pre = float(np.max(np.abs(rec.u_values[:, pre])) / peak)
    d_pre = float(np.max(np.abs(rec.dnu_values[:, pre])) / peak)
    u_post = float(np.max(np.abs(rec.u_values)) / peak)
    ok = zero_max == 0.0 and u_pre <= rel_tol and d_pre <= rel_tol
    return Check("exterior_vanishing", ok,
                 {"zero_forcing_max": zero_max, "pre_arrival_u": u_pre, "pre_arrival_dnu": d_pre,
                  "rel_tol": rel_tol, "t_arrival": t_arrival, "post_arrival_u": u_post})


@_timed
def schrodinger_growth(problem: corpus.SchrodingerProblem, spacing: float = 0.05, dt: float = 2e-3,
                       T: float = 4.0, box: float = 4.0, tol: float = 1e-8) -> Check:
    """Mass is non-increasing (to ``tol``) for real q; envelope constant of ||u|| <= C(1+t)."""
    # mass over the whole box, not the recording window
    sol, _ = schrodinger_run(problem, spacing, dt, T, box, cap=None, snapshot_stride=50,
                             record_stride=10 ** 9, window=2 * box)
    t, m = td.mass_curve(sol).T
    increase = float(np.max(np.diff(m)) / m[0]) if len(m) > 1 else 0.0
    C = float(np.max(m / (1 + t)))
    return Check("schrodinger_growth", increase <= tol,
                 {"max_relative_increase": increase, "tol": tol, "envelope_C": C})


@_timed
def kernel_identities(s_values=(0.5, 1.0, 2.0, 4.0)) -> Check:
    """Hankel/K0 identity, discrete (Lap - s^2) G residual, small-argument remainder scaling."""
    from . import specialfn as sf

    x = np.geomspace(1e-4, 50.0, 400)
    ident = float(np.max(np.abs(0.25j * sf.hankel1_0(1j * x) - sf.bessel_k0(x) / (2 * np.pi))
                         / (sf.bessel_k0(x) / (2 * np.pi))))
    resid = {}
    for s in s_values:
        grid = Grid2D.covering(0.5, 1.5, -0.5, 0.5, 1e-2)
        X, Y = grid.mesh()
        G = sf.bessel_k0(s * np.hypot(X, Y)) / (2 * np.pi)
        field_ = lp.SpectralField(s, grid.with_values(G))
        resid[float(s)] = lp.frequency_residual(
            field_, lp.WaveModel(zero_contrast("sound_speed", corpus.polygon("triangle")), None, 0.0))
    # remainder |K0(sr)/2pi - principal| at r = 1 as s halves
    rem = []
    s_list = [0.1 / 2 ** k for k in range(6)]
    for s in s_list:
        exp = sf.hankel_small_arg(s, 1.0)
        rem.append(abs(sf.bessel_k0(s) / (2 * np.pi) - exp.principal))
    ratios = [rem[k] / rem[k + 1] for k in range(len(rem) - 1)]
    ok = ident <= 1e-10 and max(resid.values()) <= 1e-6 and all(3.0 <= r <= 5.0 for r in ratios)
    return Check("kernel_identities", ok,
                 {"hankel_k0_rel": ident, "max_green_residual": max(resid.values()),
                  "remainder_halving_ratios": ratios, "min_ratio": min(ratios), "max_ratio": max(ratios)})


@_timed
def neumann_contraction(problem: corpus.SchrodingerProblem, s_values=(10.0, 1e2, 1e3, 1e4),
                        coarse: float = 0.0125, agree_tol: float = 1e-4, n_powers: int = 8) -> Check:
    """Sup norms of K_s, Neumann vs GMRES agreement, and ||K^n v|| <= ||K||^n ||v||."""
    norms, agree, power_ok, l2 = [], {}, True, []
    power_worst = 0.0
    for s in s_values:
        grid = corners.solver_grid(problem, corners.dominance_spacing(s, coarse))
        kernel = fq.Kernel(fq.SCHRODINGER_LAPLACE, s)
        op = fq.LSOperator(kernel, problem.q_field, grid)
        nrm = fq.operator_norm(kernel, problem.q_field, grid, "sup", op=op)
        norms.append(nrm)
        if nrm < 1:
            v = fq.volume_source_values(kernel, problem.u0, -1j, grid)
            drive = fq.IncidentField.volume_source(problem.u0, -1j)
            a = fq.lippmann_schwinger_solve(kernel, problem.q_field, drive, grid, "neumann",
                                            tol=1e-10, v=v, op=op)
            b = fq.lippmann_schwinger_solve(kernel, problem.q_field, drive, grid, "direct_iterative",
                                            tol=1e-10, v=v, op=op)
            agree[float(s)] = float(np.linalg.norm(a.values - b.values) / np.linalg.norm(b.values))
            term, vmax = v.copy(), np.max(np.abs(v))
            for n in range(1, n_powers + 1):
                term = op(term)
                lhs, rhs = np.max(np.abs(term)), nrm ** n * vmax
                power_worst = max(power_worst, lhs / rhs)
                power_ok &= lhs <= rhs * (1 + 1e-12)
    decreasing = bool(np.all(np.diff(norms) < 0))
    exponent = float(-np.polyfit(np.log(s_values), np.log(norms), 1)[0])
    ok = decreasing and norms[-1] < 1 and power_ok and all(e <= agree_tol for e in agree.values())
    return Check("neumann_contraction", ok,
                 {"norm_at_smax": norms[-1], "monotone": decreasing, "norms": norms,
                  "fitted_decay_exponent": exponent,
                  "max_neumann_direct_gap": max(agree.values()) if agree else float("nan"),
                  "power_bound_worst_ratio": power_worst, "power_bound_holds": power_ok})


@_timed
def corner_blowup(problem: corpus.WaveProblem, s_values=None, spacing: float = 0.0125,
                  slope_tol: float = 0.15) -> Check:
    """|u_hat(O, s)| grows as s decreases on [0.05, 0.5]; slope vs the free-term oracle."""
    s_values = np.geomspace(0.05, 0.5, 8) if s_values is None else np.asarray(s_values)
    O = corpus.nearest_corner(problem.polygon, problem.f.center)
    probe = corners.corner_blowup_small_s(problem, O, s_values, spacing)
    err = probe.slope_error
    return Check("corner_blowup", probe.monotone_blowup and err <= slope_tol,
                 {"monotone": probe.monotone_blowup, "slope": probe.fit["slope"],
                  "oracle_slope": probe.oracle_slope, "rel_slope_err": err, "slope_tol": slope_tol,
                  "r2": probe.fit["r2"], "probe": probe.to_record()})


@_timed
def corner_dominance(problem: corpus.SchrodingerProblem, s_values=(10.0, 1e2, 1e3, 1e4),
                     final_max: float = 0.1) -> Check:
    """|w(O,s)|/|v(O,s)| strictly decreasing, final ratio < final_max; ring average nonzero."""
    O = corpus.nearest_corner(problem.polygon, problem.u0.center)
    res = corners.corner_dominance_large_s(problem, O, s_values)
    # ring about the corner through the centre of supp u0
    r0 = float(np.hypot(O.x - problem.u0.center.x, O.y - problem.u0.center.y))
    ring = corners.ring_average(problem.u0, r0, center=(O.x, O.y))
    ok = (res.strictly_decreasing and res.ratios[-1] < final_max and abs(ring) > 0
          and res.geometric_bound_holds and not res.dropped)
    return Check("corner_dominance", ok,
                 {"strictly_decreasing": res.strictly_decreasing, "final_ratio": res.ratios[-1],
                  "final_max": final_max, "geometric_bound_holds": res.geometric_bound_holds,
                  "ring_average_abs": abs(ring), "ring_radius": r0, "record": res.to_record()})


@_timed
def sector_obstruction(n_coarse: int = 48, min_ratio: float = 100.0, min_refine: float = 0.5) -> Check:
    """h = 1 (f = 1, p = 0) on a right-angle sector vs h = 0; persistence under refinement."""
    square = make_convex_polygon([(0, 0), (1, 0), (1, 1), (0, 1)])
    sector = corner_sector(square, 0, 0.4)
    one = lambda x, y: np.ones_like(np.asarray(x, dtype=float))
    h1, h0 = AdmissibleDescriptor.constant(1.0), AdmissibleDescriptor.constant(0.0)
    r1 = corners.sector_source_test(sector, h1, one, n_r=n_coarse, n_t=n_coarse)
    r0 = corners.sector_source_test(sector, h0, one, n_r=n_coarse, n_t=n_coarse)
    r1f = corners.sector_source_test(sector, h1, one, n_r=2 * n_coarse, n_t=2 * n_coarse)
    ratio = r1 / r0 if r0 > 0 else float("inf")
    refine = r1f / r1
    return Check("sector_obstruction", ratio >= min_ratio and refine >= min_refine,
                 {"residual_h1": r1, "residual_h0": r0, "residual_h1_refined": r1f,
                  "obstruction_ratio": ratio, "refinement_ratio": refine})


@_timed
def plane_wave_pairing(problem: corpus.WaveProblem, s_values=(1.0, 2.0), run=None,
                       omega_angle: float = 0.3, radius: float | None = None, n_angles: int = 256,
                       tol: float = 0.05, spacing: float = 0.025, T: float = 20.0) -> Check:
    """``ghat(s) int f e^{-s x.w}`` two ways: volume quadrature vs pairing over a circle around E.

    On a disk E* that contains supp f and avoids the scatterer, Green's second
    identity against ``v = exp(-s x.w)`` gives
    ``ghat int f v = int_{dE*} (u_hat d_nu v - v d_nu u_hat)``.
    """
    sol, _ = run if run is not None else wave_run(problem, spacing, T)
    f = problem.f
    if radius is None:
        radius = 0.5 * (f.radius + problem.polygon.distance_to(f.center))
    w = np.array([np.cos(omega_angle), np.sin(omega_angle)])
    h = sol.window.spacing
    th = 2 * np.pi * np.arange(n_angles) / n_angles
    nrm = np.column_stack([np.cos(th), np.sin(th)])
    c = np.array([f.center.x, f.center.y])
    # Gauss-Legendre in r, trapezoid in angle for the volume side
    xg, wg = leggauss(96)
    rr = 0.5 * f.radius * (xg + 1)
    wr = 0.5 * f.radius * wg
    errs, pair_vals, vol_vals = {}, {}, {}
    for s in s_values:
        uh = lp.laplace_field(sol, s, lp.WAVE_T2)
        rings = []
        for k in (-2, -1, 0, 1, 2):
            pts = c + (radius + k * h) * nrm
            rings.append(uh.grid.interpolate(pts))
        u_c = rings[2]
        dnu = (-rings[4] + 8 * rings[3] - 8 * rings[1] + rings[0]) / (12 * h)
        pts = c + radius * nrm
        v = np.exp(-s * pts @ w)
        dv = -s * (nrm @ w) * v
        pairing = float(np.sum(u_c * dv - v * dnu) * radius * 2 * np.pi / n_angles)
        R_, TH = np.meshgrid(rr, th, indexing="ij")
        X, Y = c[0] + R_ * np.cos(TH), c[1] + R_ * np.sin(TH)
        integrand = np.real(f(X, Y)) * np.exp(-s * (X * w[0] + Y * w[1])) * R_
        volume = float(problem.g.laplace(s) * np.sum(wr[:, None] * integrand) * 2 * np.pi / n_angles)
        pair_vals[float(s)], vol_vals[float(s)] = pairing, volume
        errs[float(s)] = abs(pairing - volume) / abs(volume)
    worst = max(errs.values())
    return Check("plane_wave_pairing", worst <= tol,
                 {"max_rel_err": worst, "tol": tol, "pairing": pair_vals, "volume": vol_vals,
                  "radius": radius})


# ---------------------------------------------------------------- distinguishability

def _wave_recording(problem, spacing, T, interval):
    _, rec = wave_run(problem, spacing, T, snapshot_stride=10 ** 9, record_interval=interval, window=0.5)
    return rec


@_timed
def distinguish_wave(a: corpus.WaveProblem, b: corpus.WaveProblem, spacing: float = 0.0125,
                     T: float = 5.0, interval: float = 0.05, factor: float = 10.0,
                     name: str = "distinguish_wave") -> Check:
    """Cauchy-data gap on Gamma_R x [0, T] against the self-refinement noise of setup a."""
    ra = _wave_recording(a, spacing, T, interval)
    rf = _wave_recording(a, spacing / 2, T, interval)
    rb = _wave_recording(b, spacing, T, interval)
    gap = corners.cauchy_gap(ra, rb, (ra, rf))
    return Check(name, gap.u_gap >= factor * gap.noise_floor,
                 {"u_gap": gap.u_gap, "dnu_gap": gap.dnu_gap, "noise_floor": gap.noise_floor,
                  "separation": gap.separation(), "factor": factor})


@_timed
def distinguish_schrodinger(a: corpus.SchrodingerProblem, b: corpus.SchrodingerProblem,
                            s_values=(0.5, 1.0, 2.0, 4.0), spacing: float = 0.025,
                            factor: float = 10.0, name: str = "distinguish_schrodinger") -> Check:
    """Laplace-domain Cauchy-data gap on Gamma_R x s-grid against grid self-refinement."""
    ra = corners.spectral_cauchy_data(a, s_values, spacing)
    rf = corners.spectral_cauchy_data(a, s_values, spacing / 2)
    rb = corners.spectral_cauchy_data(b, s_values, spacing)
    gap = corners.cauchy_gap(ra, rb, (ra, rf))
    return Check(name, gap.u_gap >= factor * gap.noise_floor,
                 {"u_gap": gap.u_gap, "dnu_gap": gap.dnu_gap, "noise_floor": gap.noise_floor,
                  "separation": gap.separation(), "factor": factor})


def helmholtz_far_field(problem: corpus.HelmholtzProblem, spacing: float, n_directions: int = 128):
    v = problem.polygon.as_array()
    m = 0.1
    grid = Grid2D.covering(v[:, 0].min() - m, v[:, 0].max() + m, v[:, 1].min() - m,
                           v[:, 1].max() + m, spacing)
    kernel = fq.Kernel(fq.HELMHOLTZ, problem.k)
    drive = fq.IncidentField.plane_wave(problem.k, problem.direction)
    sol = fq.lippmann_schwinger_solve(kernel, problem.n_field, drive, grid, tol=1e-10)
    return fq.far_field(problem.n_field, sol, problem.k, n_directions)


@_timed
def distinguish_helmholtz(a: corpus.HelmholtzProblem, b: corpus.HelmholtzProblem,
                          spacing: float = 0.0125, factor: float = 10.0,
                          name: str = "distinguish_helmholtz") -> Check:
    """Single plane-wave far-field gap against grid self-refinement of setup a."""
    fa = helmholtz_far_field(a, spacing)
    ff = helmholtz_far_field(a, spacing / 2)
    fb = helmholtz_far_field(b, spacing)
    gap = corners.far_field_gap(fa, fb, (fa, ff))
    return Check(name, gap.u_gap >= factor * gap.noise_floor,
                 {"u_gap": gap.u_gap, "noise_floor": gap.noise_floor,
                  "separation": gap.separation(), "factor": factor})
