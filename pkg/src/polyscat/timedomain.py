"""Time-domain forward solvers and Cauchy-data recording on the circle |x| = R.

Wave: ``(1/c^2) u_tt = Lap u + f(x) g(t)`` with zero initial data, explicit
leapfrog + five-point Laplacian, zero Dirichlet box (optionally with a damping
layer). Schrodinger: ``i u_t + Lap u + q u = 0``, Strang splitting of the
potential/absorber (exact phase) around a Peaceman-Rachford ADI Crank-Nicolson
kinetic step.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy import linalg, sparse

from . import _ext
from .errors import CflViolated, ConfigInvalid, LinearSolveFailure, NonFiniteValue
from .geometry import BumpProfile1D, BumpProfile2D
from .media import CoefficientField, Grid2D

log = logging.getLogger(__name__)

CFL_SAFETY = 0.7
MIN_ANGLES = 64


@dataclass(frozen=True)
class PML:
    """Graded damping layer ``sigma = strength * (depth/width)^2`` on the box edges."""

    layers: int
    strength: float


@dataclass(frozen=True)
class CAP:
    """Complex absorbing potential ``-i W`` with ``W = strength * (depth/width)^2``."""

    width: float
    strength: float


@dataclass
class WaveConfig:
    c_field: CoefficientField
    f: BumpProfile2D
    g: BumpProfile1D
    grid: Grid2D
    dt: float
    T: float
    boundary: str | PML = "enlarged_domain"
    record_radius: float = 2.0
    n_angles: int = 64
    record_stride: int = 1
    snapshot_stride: int = 10
    snapshot_window: float | None = None
    store_previous: bool = False
    energy_stride: int | None = None

    def c_max(self) -> float:
        return self.c_field.max_value()

    def validate(self):
        h = self.grid.spacing
        limit = CFL_SAFETY * h / (np.sqrt(2.0) * self.c_max())
        if self.dt > limit * (1 + 1e-12):
            raise CflViolated(f"dt={self.dt:.4g} exceeds 0.7*h/(sqrt(2) c_max) = {limit:.4g}")
        lo, hi = self.g.support
        if lo <= 0 or hi >= self.T:
            raise ConfigInvalid(f"supp g = ({lo}, {hi}) must lie in (0, T={self.T})")
        if self.c_field.support.distance_to(self.f.center) <= self.f.radius:
            raise ConfigInvalid("supp f intersects the scatterer")
        _check_recording(self.grid, self.record_radius, self.n_angles)


@dataclass
class SchrodingerConfig:
    q_field: CoefficientField
    u0: BumpProfile2D
    grid: Grid2D
    dt: float
    T: float
    absorber: str | CAP = "none"
    record_radius: float = 2.0
    n_angles: int = 64
    record_stride: int = 1
    snapshot_stride: int = 10
    snapshot_window: float | None = None
    record_until: float | None = None

    def validate(self):
        if self.dt <= 0 or self.T <= 0:
            raise ConfigInvalid("dt and T must be positive")
        if self.q_field.support.distance_to(self.u0.center) <= self.u0.radius:
            raise ConfigInvalid("supp u0 intersects the scatterer")
        _check_recording(self.grid, self.record_radius, self.n_angles)


def _check_recording(grid: Grid2D, R: float, n_angles: int):
    if n_angles < MIN_ANGLES:
        raise ConfigInvalid(f"need at least {MIN_ANGLES} recording angles")
    reach = R + 2 * grid.spacing + grid.spacing
    x, y = grid.x, grid.y
    if -reach < x[0] or reach > x[-1] or -reach < y[0] or reach > y[-1]:
        raise ConfigInvalid("recording circle (with derivative rings) leaves the grid")


@dataclass
class SpaceTimeSolution:
    window: Grid2D
    times: np.ndarray
    snapshots: np.ndarray
    dt: float
    T: float
    previous: np.ndarray | None = None
    meta: dict[str, Any] = field(default_factory=dict)

    @property
    def snapshot_dt(self) -> float:
        return float(self.times[1] - self.times[0]) if len(self.times) > 1 else self.dt


@dataclass
class BoundaryRecording:
    radius: float
    angles: np.ndarray
    times: np.ndarray
    u_values: np.ndarray
    dnu_values: np.ndarray

    def __post_init__(self):
        if len(self.angles) < MIN_ANGLES:
            raise ValueError(f"recording needs >= {MIN_ANGLES} angles")
        if not (np.all(np.isfinite(self.u_values)) and np.all(np.isfinite(self.dnu_values))):
            raise NonFiniteValue("non-finite recording values")


class _RingSampler:
    """Sparse bilinear interpolation onto five concentric rings R + k h, k=-2..2."""

    OFFSETS = (-2, -1, 0, 1, 2)

    def __init__(self, grid: Grid2D, R: float, n_angles: int):
        self.R = R
        self.h = grid.spacing
        self.angles = 2 * np.pi * np.arange(n_angles) / n_angles
        rows, cols, vals = [], [], []
        row = 0
        for k in self.OFFSETS:
            r = R + k * self.h
            px, py = r * np.cos(self.angles), r * np.sin(self.angles)
            fx = (px - grid.origin.x) / grid.spacing
            fy = (py - grid.origin.y) / grid.spacing
            i, j = np.floor(fx).astype(int), np.floor(fy).astype(int)
            tx, ty = fx - i, fy - j
            for di, dj, w in ((0, 0, (1 - tx) * (1 - ty)), (1, 0, tx * (1 - ty)),
                              (0, 1, (1 - tx) * ty), (1, 1, tx * ty)):
                rows.append(row + np.arange(n_angles))
                cols.append((i + di) * grid.ny + (j + dj))
                vals.append(w)
            row += n_angles
        self.W = sparse.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                                   shape=(row, grid.nx * grid.ny))
        self.n = n_angles

    def sample(self, u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        rings = (self.W @ u.ravel()).reshape(len(self.OFFSETS), self.n)
        dnu = (-rings[4] + 8 * rings[3] - 8 * rings[1] + rings[0]) / (12 * self.h)
        return rings[2], dnu


def _window_slices(grid: Grid2D, half_width: float | None):
    if half_width is None:
        return slice(None), slice(None), grid.like()
    x, y = grid.x, grid.y
    ix = np.nonzero(np.abs(x) <= half_width + 1e-9)[0]
    iy = np.nonzero(np.abs(y) <= half_width + 1e-9)[0]
    sx, sy = slice(ix[0], ix[-1] + 1), slice(iy[0], iy[-1] + 1)
    win = Grid2D((x[ix[0]], y[iy[0]]), grid.spacing, len(ix), len(iy))
    return sx, sy, win


def damping_profile(grid: Grid2D, width: float, strength: float) -> np.ndarray:
    """``strength * (depth/width)^2`` inside a layer of ``width`` along the box edges."""
    X, Y = grid.mesh()
    dx = np.maximum(X[0, 0] + width - X, X - (X[-1, 0] - width))
    dy = np.maximum(Y[0, 0] + width - Y, Y - (Y[0, -1] - width))
    depth = np.clip(np.maximum(dx, dy), 0.0, None) / width
    return strength * np.minimum(depth, 1.0) ** 2


def solve_wave(cfg: WaveConfig) -> tuple[SpaceTimeSolution, BoundaryRecording]:
    """Leapfrog solve of the forced wave equation; returns snapshots and Gamma_R data."""
    cfg.validate()
    grid, dt = cfg.grid, cfg.dt
    h = grid.spacing
    X, Y = grid.mesh()
    c = cfg.c_field.value_at(X, Y)
    c2dt2 = c ** 2 * dt ** 2
    a = np.ascontiguousarray(c2dt2 / h ** 2)
    fvals = np.real(cfg.f(X, Y))
    src = np.ascontiguousarray(c2dt2 * fvals)
    if isinstance(cfg.boundary, PML):
        sigma = damping_profile(grid, cfg.boundary.layers * h, cfg.boundary.strength)
    elif cfg.boundary == "enlarged_domain":
        sigma = np.zeros_like(a)
    else:
        raise ConfigInvalid(f"unknown wave boundary {cfg.boundary!r}")
    dp = np.ascontiguousarray(1.0 - 0.5 * sigma * dt)
    dm = np.ascontiguousarray(1.0 / (1.0 + 0.5 * sigma * dt))

    nsteps = int(round(cfg.T / dt))
    tgrid = dt * np.arange(nsteps + 1)
    gvals = np.asarray(cfg.g(tgrid), dtype=float)

    u_prev = np.zeros_like(a)
    u = np.ascontiguousarray(0.5 * src * gvals[0])
    work = np.zeros_like(a)

    sampler = _RingSampler(grid, cfg.record_radius, cfg.n_angles)
    sx, sy, win = _window_slices(grid, cfg.snapshot_window)
    snaps, prevs, snap_t, rec_u, rec_d, rec_t = [], [], [], [], [], []
    energy = []
    inv_c2 = 1.0 / c ** 2

    def observe(n, up, uc):
        if cfg.energy_stride and n % cfg.energy_stride == 0:
            energy.append((tgrid[n], _staggered_energy(uc, up, inv_c2, h, dt)))
        if n % cfg.snapshot_stride == 0:
            snaps.append(uc[sx, sy].copy())
            if cfg.store_previous:
                prevs.append(up[sx, sy].copy())
            snap_t.append(tgrid[n])
        if n % cfg.record_stride == 0:
            ru, rd = sampler.sample(uc)
            rec_u.append(ru)
            rec_d.append(rd)
            rec_t.append(tgrid[n])

    t0 = time.perf_counter()
    observe(0, u_prev, u_prev)
    observe(1, u_prev, u) if nsteps >= 1 else None
    strides = [cfg.snapshot_stride, cfg.record_stride] + ([cfg.energy_stride] if cfg.energy_stride else [])
    events = sorted({n for n in range(2, nsteps + 1) if any(n % k == 0 for k in strides)})
    n = 1
    bufs = [u_prev, u, work]
    for target in events:
        k = target - n
        ok = _ext.advance(bufs[0], bufs[1], bufs[2], a, src, gvals[n:target], dp, dm)
        bufs = list(_ext.rotate(bufs, k))
        n = target
        if not ok:
            raise NonFiniteValue(f"wave solution blew up before t={tgrid[n]:.4g}")
        observe(n, bufs[0], bufs[1])
    elapsed = time.perf_counter() - t0

    L = min(-grid.x[0], grid.x[-1], -grid.y[0], grid.y[-1])
    c_max = float(np.max(c))
    meta = {
        "backend": _ext.BACKEND,
        "steps": nsteps,
        "seconds": elapsed,
        "c_max": c_max,
        "reflection_free_until": cfg.g.support[0] + 2 * (L - cfg.record_radius) / c_max,
        "boundary": "pml" if isinstance(cfg.boundary, PML) else "enlarged_domain",
    }
    if energy:
        meta["energy"] = np.array(energy)
    sol = SpaceTimeSolution(win, np.array(snap_t), np.array(snaps), dt, cfg.T,
                            np.array(prevs) if cfg.store_previous else None, meta)
    rec = BoundaryRecording(cfg.record_radius, sampler.angles, np.array(rec_t),
                            np.array(rec_u).T.astype(complex), np.array(rec_d).T.astype(complex))
    log.info("wave solve: %d steps on %dx%d in %.2fs (%s)", nsteps, grid.nx, grid.ny,
             elapsed, _ext.BACKEND)
    return sol, rec


def _staggered_energy(un, um, inv_c2, h, dt) -> float:
    kin = np.sum(inv_c2 * ((un - um) / dt) ** 2)
    gx = np.sum((un[1:, :] - un[:-1, :]) * (um[1:, :] - um[:-1, :])) / h ** 2
    gy = np.sum((un[:, 1:] - un[:, :-1]) * (um[:, 1:] - um[:, :-1])) / h ** 2
    return float((kin + gx + gy) * h ** 2)


def energy_curve(sol: SpaceTimeSolution, c_field: CoefficientField) -> np.ndarray:
    """Discrete energy ``sum (|du/dt|^2/c^2 + grad u^n . grad u^{n-1}) h^2`` per snapshot.

    Uses the staggered form that leapfrog conserves exactly in the unforced,
    undamped case. Runs made with ``energy_stride`` carry the full-grid curve
    already; otherwise the snapshots (``store_previous=True``) are used.
    Returns an array of shape (n, 2) holding ``(t, E)``.
    """
    if "energy" in sol.meta:
        return sol.meta["energy"]
    if sol.previous is None:
        raise ValueError("energy needs the previous time level (store_previous=True)")
    X, Y = sol.window.mesh()
    inv_c2 = 1.0 / c_field.value_at(X, Y) ** 2
    return np.array([(t, _staggered_energy(un, um, inv_c2, sol.window.spacing, sol.dt))
                     for t, un, um in zip(sol.times, sol.snapshots, sol.previous)])


def _tridiag_bands(n: int, h: float, tau: complex, sign: float) -> np.ndarray:
    """Banded storage of ``I - sign*i*tau*D2`` with D2 the Dirichlet second difference."""
    r = 1j * tau / h ** 2
    ab = np.empty((3, n), dtype=complex)
    ab[0, :] = sign * -r
    ab[1, :] = 1 + sign * 2 * r
    ab[2, :] = sign * -r
    return ab


def _apply_second_diff(u: np.ndarray, axis: int, h: float) -> np.ndarray:
    out = -2.0 * u
    if axis == 0:
        out[1:, :] += u[:-1, :]
        out[:-1, :] += u[1:, :]
    else:
        out[:, 1:] += u[:, :-1]
        out[:, :-1] += u[:, 1:]
    return out / h ** 2


def solve_schrodinger(cfg: SchrodingerConfig) -> tuple[SpaceTimeSolution, BoundaryRecording]:
    """Split-step Crank-Nicolson (ADI) solve with Gamma_R recording."""
    cfg.validate()
    grid, dt = cfg.grid, cfg.dt
    h = grid.spacing
    X, Y = grid.mesh()
    inner = (slice(1, -1), slice(1, -1))
    q = cfg.q_field.value_at(X, Y)[inner]
    if isinstance(cfg.absorber, CAP):
        W = damping_profile(grid, cfg.absorber.width, cfg.absorber.strength)[inner]
    elif cfg.absorber == "none":
        W = np.zeros_like(q)
    else:
        raise ConfigInvalid(f"unknown absorber {cfg.absorber!r}")
    half_phase = np.exp((1j * q - W) * 0.5 * dt)

    tau = 0.5 * dt
    mx, my = grid.nx - 2, grid.ny - 2
    ab_x = _tridiag_bands(mx, h, tau, 1.0)
    ab_y = _tridiag_bands(my, h, tau, 1.0)

    u_full = np.zeros(grid.shape, dtype=complex)
    u_full[:] = cfg.u0(X, Y)
    u_full[0, :] = u_full[-1, :] = u_full[:, 0] = u_full[:, -1] = 0
    u = u_full[inner].copy()

    nsteps = int(round(cfg.T / dt))
    tgrid = dt * np.arange(nsteps + 1)
    sampler = _RingSampler(grid, cfg.record_radius, cfg.n_angles)
    sx, sy, win = _window_slices(grid, cfg.snapshot_window)
    snaps, snap_t, rec_u, rec_d, rec_t, mass = [], [], [], [], [], []

    def observe(n):
        u_full[inner] = u
        if n % cfg.snapshot_stride == 0:
            snaps.append(u_full[sx, sy].copy())
            snap_t.append(tgrid[n])
            mass.append(np.sqrt(np.sum(np.abs(u) ** 2)) * h)
        if n % cfg.record_stride == 0:
            ru, rd = sampler.sample(u_full)
            rec_u.append(ru)
            rec_d.append(rd)
            rec_t.append(tgrid[n])

    t0 = time.perf_counter()
    observe(0)
    for n in range(1, nsteps + 1):
        u *= half_phase
        try:
            rhs = u + 1j * tau * _apply_second_diff(u, 1, h)
            ustar = linalg.solve_banded((1, 1), ab_x, rhs, check_finite=False)
            rhs = ustar + 1j * tau * _apply_second_diff(ustar, 0, h)
            u = linalg.solve_banded((1, 1), ab_y, rhs.T, check_finite=False).T
        except (linalg.LinAlgError, ValueError) as exc:
            raise LinearSolveFailure(f"ADI solve failed at step {n}: {exc}") from exc
        u *= half_phase
        if n % 256 == 0 and not np.all(np.isfinite(u)):
            raise NonFiniteValue(f"Schrodinger solution non-finite at t={tgrid[n]:.4g}")
        if n % cfg.snapshot_stride == 0 or n % cfg.record_stride == 0:
            observe(n)
    if not np.all(np.isfinite(u)):
        raise NonFiniteValue("Schrodinger solution non-finite at final time")
    elapsed = time.perf_counter() - t0

    mass = np.array(mass)
    record_until = cfg.T if cfg.record_until is None else cfg.record_until
    k_end = np.searchsorted(np.array(snap_t), record_until, side="right") - 1
    leak = float(1.0 - (mass[k_end] / mass[0]) ** 2) if mass[0] > 0 else 0.0
    meta = {"steps": nsteps, "seconds": elapsed, "cap_leakage": leak,
            "cap_flagged": bool(isinstance(cfg.absorber, CAP) and leak > 1e-6)}
    sol = SpaceTimeSolution(win, np.array(snap_t), np.array(snaps), dt, cfg.T, None, meta)
    rec = BoundaryRecording(cfg.record_radius, sampler.angles, np.array(rec_t),
                            np.array(rec_u).T, np.array(rec_d).T)
    log.info("schrodinger solve: %d steps on %dx%d in %.2fs", nsteps, grid.nx, grid.ny, elapsed)
    return sol, rec


def mass_curve(sol: SpaceTimeSolution) -> np.ndarray:
    """``(t, ||u(., t)||_L2)`` per snapshot over the snapshot window."""
    h = sol.window.spacing
    norms = np.sqrt(np.sum(np.abs(sol.snapshots) ** 2, axis=(1, 2))) * h
    return np.column_stack([sol.times, norms])
