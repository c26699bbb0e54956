"""Corner asymptotics as numerical probes.

Small-s logarithmic blowup of the transformed wave field at a corner, large-s
dominance of the free Schrodinger field over the scattered part, ring averages
of initial data, Cauchy-data gap metrics and the sector source obstruction.
"""
from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field
from typing import Any, Callable

import numpy as np
from scipy import sparse
from scipy.sparse import linalg as splinalg

from . import frequency as fq
from .corpus import SchrodingerProblem, WaveProblem
from .errors import GeometryMismatch, NotContractive, RangeNotCertified
from .geometry import CornerSector, Point2, bump_integral
from .media import AdmissibleDescriptor, Grid2D

log = logging.getLogger(__name__)

RING_ANGLES = 512


@dataclass
class CornerProbe:
    corner: Point2
    s_values: list[float]
    values: list[complex]
    fit: dict[str, float]
    oracle_slope: float | None = None
    meta: dict[str, Any] = field(default_factory=dict)

    @property
    def monotone_blowup(self) -> bool:
        """|u(O, s)| strictly increases as s decreases."""
        order = np.argsort(self.s_values)
        mags = np.abs(np.asarray(self.values))[order]
        return bool(np.all(np.diff(mags) < 0))

    @property
    def slope_error(self) -> float:
        if not self.oracle_slope:
            return float("nan")
        return abs(self.fit["slope"] / self.oracle_slope - 1.0)

    def to_record(self) -> dict:
        return {"corner": [self.corner.x, self.corner.y], "s_values": list(self.s_values),
                "values": [[complex(v).real, complex(v).imag] for v in self.values],
                "fit": dict(self.fit), "oracle_slope": self.oracle_slope, "meta": self.meta}


@dataclass
class GapReport:
    u_gap: float
    dnu_gap: float
    noise_floor: float

    def __post_init__(self):
        if min(self.u_gap, self.dnu_gap, self.noise_floor) < 0:
            raise ValueError("gaps are nonnegative")

    def separation(self) -> float:
        return self.u_gap / self.noise_floor if self.noise_floor > 0 else float("inf")

    def to_record(self) -> dict:
        return asdict(self)


def linear_fit(x, y) -> dict[str, float]:
    x, y = np.asarray(x, float), np.asarray(y, float)
    slope, intercept = np.polyfit(x, y, 1)
    ss_res = float(np.sum((y - (slope * x + intercept)) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return {"slope": float(slope), "intercept": float(intercept), "r2": r2}


def blowup_oracle(problem: WaveProblem) -> float:
    """Coefficient of ln(1/s) in the free term: ``ghat(0) int f / (2 pi)``."""
    return float(problem.g.laplace(0.0) * np.real(bump_integral(problem.f)) / (2 * np.pi))


def solver_grid(problem, spacing: float, margin: float = 0.05) -> Grid2D:
    """Grid covering the source disk and the scatterer."""
    src = problem.f if isinstance(problem, WaveProblem) else problem.u0
    v = problem.polygon.as_array()
    xmin = min(v[:, 0].min(), src.center.x - src.radius) - margin
    xmax = max(v[:, 0].max(), src.center.x + src.radius) + margin
    ymin = min(v[:, 1].min(), src.center.y - src.radius) - margin
    ymax = max(v[:, 1].max(), src.center.y + src.radius) + margin
    return Grid2D.covering(xmin, xmax, ymin, ymax, spacing)


def certified_s_range(spacing: float) -> tuple[float, float]:
    """Direct solves hold for any s > 0 as long as the decay length 1/s spans >= 5 cells."""
    return 0.0, 0.2 / spacing


def corner_blowup_small_s(problem: WaveProblem, corner: Point2, s_list, spacing: float = 0.0125,
                          bridge: Callable[[float], complex] | None = None) -> CornerProbe:
    """Transformed wave field at a corner for small s, fitted against ln(1/s).

    ``bridge``, if given, maps s to the Laplace transform of the time-domain
    field at the corner; it is compared with the direct solve at the two
    largest s values and the relative differences are stored in ``meta``.
    """
    s_arr = np.asarray(s_list, dtype=float)
    lo, hi = certified_s_range(spacing)
    if np.any(s_arr <= lo) or np.any(s_arr > hi):
        raise RangeNotCertified(f"s values must lie in ({lo}, {hi:.3g}] at spacing {spacing}")
    grid = solver_grid(problem, spacing)
    vals = []
    for s in s_arr:
        sol = fq.wave_spectral_solve(problem.c_field, problem.f, problem.g.laplace(s), s, grid)
        vals.append(complex(grid.interpolate(np.array([corner.x, corner.y]), sol.values)))
    vals_arr = np.asarray(vals)
    if np.all(vals_arr == 0):
        fit = {"slope": 0.0, "intercept": 0.0, "r2": 1.0}
    else:
        fit = linear_fit(np.log(1.0 / s_arr), vals_arr.real)
    meta: dict[str, Any] = {"spacing": spacing}
    if bridge is not None:
        top = np.argsort(s_arr)[-2:]
        meta["bridge_rel_diff"] = {float(s_arr[i]): abs(bridge(s_arr[i]) - vals_arr[i]) / abs(vals_arr[i])
                                   for i in top}
    return CornerProbe(corner, [float(s) for s in s_arr], vals, fit, blowup_oracle(problem), meta)


@dataclass
class DominanceResult:
    s_values: list[float]
    v_values: list[complex]
    w_values: list[complex]
    ratios: list[float]
    norms: list[float]
    dropped: list[float] = field(default_factory=list)

    @property
    def strictly_decreasing(self) -> bool:
        return bool(np.all(np.diff(self.ratios) < 0))

    @property
    def geometric_bound_holds(self) -> bool:
        return all(r <= n / (1 - n) for r, n in zip(self.ratios, self.norms))

    def to_record(self) -> dict:
        c = lambda z: [complex(z).real, complex(z).imag]
        return {"s_values": self.s_values, "v_values": [c(v) for v in self.v_values],
                "w_values": [c(w) for w in self.w_values], "ratios": self.ratios,
                "norms": self.norms, "dropped": self.dropped}


def dominance_spacing(s: float, coarse: float = 0.0125, cells_per_decay: float = 8.0) -> float:
    from .corpus import dyadic_spacing

    rate = np.sqrt(s / 2)
    return dyadic_spacing(min(coarse, 1.0 / (cells_per_decay * rate)))


def corner_dominance_large_s(problem: SchrodingerProblem, corner: Point2, s_list,
                             coarse: float = 0.0125) -> DominanceResult:
    """``|w(O,s)| / |v(O,s)|`` with ``w = u - v`` over an ascending list of s.

    s values whose certified operator norm is >= 1 are dropped and reported.
    The grid spacing shrinks with s to keep 8 cells per kernel decay length.
    """
    s_arr = np.asarray(s_list, dtype=float)
    if np.any(np.diff(s_arr) <= 0):
        raise ValueError("s_list must be ascending")
    out = DominanceResult([], [], [], [], [])
    for s in s_arr:
        grid = solver_grid(problem, dominance_spacing(s, coarse))
        kernel = fq.Kernel(fq.SCHRODINGER_LAPLACE, s)
        op = fq.LSOperator(kernel, problem.q_field, grid)
        norm = fq.operator_norm(kernel, problem.q_field, grid, "sup", op=op)
        if norm >= 1:
            log.info("s=%g dropped: certified norm %.3g >= 1", s, norm)
            out.dropped.append(float(s))
            continue
        sol, v = fq.schrodinger_spectral_solve(problem.q_field, problem.u0, s, grid, focus=corner)
        p = np.array([corner.x, corner.y])
        vo = complex(grid.interpolate(p, v))
        wo = complex(grid.interpolate(p, sol.values - v))
        out.s_values.append(float(s))
        out.v_values.append(vo)
        out.w_values.append(wo)
        out.ratios.append(abs(wo) / abs(vo) if vo != 0 else 0.0)
        out.norms.append(norm)
    if not out.s_values:
        raise NotContractive("no s in the list has a certified contraction")
    return out


def ring_average(u0, r: float, center=(0.0, 0.0), n_angles: int = RING_ANGLES) -> complex:
    """``int_0^{2 pi} u0(c + r (cos t, sin t)) dt`` by the periodic trapezoid rule."""
    if r < 0:
        raise ValueError("radius must be nonnegative")
    t = 2 * np.pi * np.arange(n_angles) / n_angles
    vals = u0(center[0] + r * np.cos(t), center[1] + r * np.sin(t))
    return complex(np.sum(vals) * 2 * np.pi / n_angles)


def _flatten(values) -> np.ndarray:
    return np.asarray(values).ravel()


def _rel_gap(a, b) -> float:
    a, b = _flatten(a), _flatten(b)
    scale = np.sqrt(0.5 * (np.sum(np.abs(a) ** 2) + np.sum(np.abs(b) ** 2)))
    if scale == 0:
        return 0.0
    return float(np.sqrt(np.sum(np.abs(a - b) ** 2)) / scale)


def _check_match(r1, r2):
    if r1.u_values.shape != r2.u_values.shape:
        raise GeometryMismatch(f"sample shapes differ: {r1.u_values.shape} vs {r2.u_values.shape}")
    if not (np.allclose(r1.angles, r2.angles) and np.allclose(r1.times, r2.times)
            and np.isclose(r1.radius, r2.radius)):
        raise GeometryMismatch("recordings use different angles, samples or radius")


def cauchy_gap(rec1, rec2, refined_pair=None) -> GapReport:
    """Relative L2 gaps of (u, d_nu u) between two recordings.

    The gaps are normalized by the RMS of the two norms, which keeps them
    symmetric. ``refined_pair = (coarse, fine)`` recordings of one setup give
    the noise floor.
    """
    _check_match(rec1, rec2)
    u_gap = _rel_gap(rec1.u_values, rec2.u_values)
    dnu_gap = _rel_gap(rec1.dnu_values, rec2.dnu_values)
    noise = 0.0
    if refined_pair is not None:
        coarse, fine = refined_pair
        _check_match(coarse, fine)
        noise = _rel_gap(coarse.u_values, fine.u_values)
    return GapReport(u_gap, dnu_gap, noise)


def far_field_gap(ff1, ff2, refined_pair=None) -> GapReport:
    if ff1.values.shape != ff2.values.shape or not np.allclose(ff1.directions, ff2.directions):
        raise GeometryMismatch("far fields sampled on different directions")
    noise = 0.0
    if refined_pair is not None:
        noise = _rel_gap(refined_pair[0].values, refined_pair[1].values)
    return GapReport(_rel_gap(ff1.values, ff2.values), 0.0, noise)


def spectral_cauchy_data(problem, s_list, spacing: float = 0.0125, radius: float | None = None,
                         n_angles: int = 64):
    """Laplace-domain Cauchy data ``(u_hat, d_nu u_hat)`` on the circle |x| = R.

    Each s is a direct volume-integral solve; the boundary values come from
    the resulting source-plus-contrast density integrated exactly against the
    kernel and its gradient. Returned as a recording whose sample axis is s.
    """
    from .timedomain import BoundaryRecording

    R = problem.record_radius if radius is None else radius
    grid = solver_grid(problem, spacing)
    X, Y = grid.mesh()
    angles = 2 * np.pi * np.arange(n_angles) / n_angles
    normals = np.column_stack([np.cos(angles), np.sin(angles)])
    pts = R * normals
    us, ds = [], []
    for s in s_list:
        if isinstance(problem, WaveProblem):
            kernel = fq.Kernel(fq.MODIFIED_HELMHOLTZ, s)
            ghat = problem.g.laplace(s)
            sol = fq.wave_spectral_solve(problem.c_field, problem.f, ghat, s, grid)
            density = ghat * problem.f(X, Y) + kernel.contrast_weight(problem.c_field, X, Y) * sol.values
        else:
            kernel = fq.Kernel(fq.SCHRODINGER_LAPLACE, s)
            sol, _ = fq.schrodinger_spectral_solve(problem.q_field, problem.u0, s, grid)
            density = -1j * problem.u0(X, Y) + kernel.contrast_weight(problem.q_field, X, Y) * sol.values
        sel = density != 0
        ys = np.column_stack([X[sel], Y[sel]])
        u, d = fq.layer_on_points(kernel, ys, density[sel] * spacing ** 2, pts, normals)
        us.append(u)
        ds.append(d)
    return BoundaryRecording(R, angles, np.asarray(s_list, dtype=float),
                             np.array(us).T, np.array(ds).T)


def _polar_nodes(sector: CornerSector, n_r: int, n_t: int):
    r = sector.radius * np.arange(n_r + 1) / n_r
    th = np.linspace(-sector.opening_half_angle, sector.opening_half_angle, n_t + 1)
    return r, th


def sector_source_test(sector: CornerSector, h: AdmissibleDescriptor, f_corner: Callable,
                       p: Callable | None = None, n_r: int = 48, n_t: int = 48) -> float:
    """Least-squares residual of ``Lap u + p u = h f`` with zero Cauchy data on the edges.

    A polar grid (``n_r`` radial by ``n_t`` angular cells) covers the sector.
    ``u`` vanishes on both edges and at the apex, and its normal derivative
    vanishes on the edges through a second-order one-sided condition that is
    imposed exactly. The returned residual is the area-weighted discrete L2
    norm of the PDE defect at interior nodes, minimized over all nodal ``u``.
    """
    r, th = _polar_nodes(sector, n_r, n_t)
    dr, dt = r[1] - r[0], th[1] - th[0]
    phi0 = np.arctan2(sector.bisector_direction[1], sector.bisector_direction[0])
    R, TH = np.meshgrid(r, th, indexing="ij")
    X = sector.apex.x + R * np.cos(phi0 + TH)
    Y = sector.apex.y + R * np.sin(phi0 + TH)
    rhs_full = np.asarray(h(X, Y) * f_corner(X, Y), dtype=float)
    p_full = np.zeros_like(X) if p is None else np.asarray(p(X, Y), dtype=float)

    # unknowns: radial index 1..n_r, angular index 1..n_t-1 (edges are zero)
    ni, nj = n_r, n_t - 1
    idx = lambda i, j: (i - 1) * nj + (j - 1)
    rows, cols, vals, b, wts = [], [], [], [], []
    row = 0
    for i in range(1, n_r):
        ri = r[i]
        for j in range(1, n_t):
            w = np.sqrt(ri * dr * dt)
            stencil = {
                (i + 1, j): 1 / dr ** 2 + 1 / (2 * ri * dr),
                (i - 1, j): 1 / dr ** 2 - 1 / (2 * ri * dr),
                (i, j + 1): 1 / (ri * dt) ** 2,
                (i, j - 1): 1 / (ri * dt) ** 2,
                (i, j): -2 / dr ** 2 - 2 / (ri * dt) ** 2 + p_full[i, j],
            }
            for (a, c), v in stencil.items():
                if a == 0 or c == 0 or c == n_t:
                    continue
                rows.append(row)
                cols.append(idx(a, c))
                vals.append(w * v)
            b.append(w * rhs_full[i, j])
            row += 1
    A = sparse.csr_matrix((vals, (rows, cols)), shape=(row, ni * nj))
    b = np.asarray(b)

    # normal derivative on each edge: (-3 u_0 + 4 u_1 - u_2) / (2 r dt) = 0 with u_0 = 0
    crow, ccol, cval = [], [], []
    k = 0
    for i in range(1, n_r + 1):
        for j1, j2 in ((1, 2), (n_t - 1, n_t - 2)):
            crow += [k, k]
            ccol += [idx(i, j1), idx(i, j2)]
            cval += [4.0, -1.0]
            k += 1
    C = sparse.csr_matrix((cval, (crow, ccol)), shape=(k, ni * nj))

    if not np.any(b):
        return 0.0
    AtA = (A.T @ A).tocsc()
    kkt = sparse.bmat([[AtA, C.T], [C, None]], format="csc")
    sol = splinalg.spsolve(kkt, np.concatenate([A.T @ b, np.zeros(k)]))
    u = sol[: ni * nj]
    return float(np.linalg.norm(A @ u - b))
