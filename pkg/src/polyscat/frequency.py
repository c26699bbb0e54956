"""Volume integral (Lippmann-Schwinger) solvers on uniform grids.

The discrete operator is ``(K u)(x_i) = h^2 sum_j G(x_i - x_j) m(x_j) u(x_j)``
where ``m`` is the kernel-specific contrast and the self term ``G(0) h^2`` is
replaced by the exact integral of ``G`` over the disk of area ``h^2``.
Convolutions run through zero-padded FFTs; an optional exponential tilt keeps
relative accuracy where the kernel decays by many orders of magnitude.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy import fft as sfft
from scipy.sparse import linalg as splinalg

from . import specialfn as sf
from .errors import NoConvergence, NotContractive, PowerIterationStall
from .geometry import BumpProfile2D, Point2
from .laplace import SpectralField
from .media import POTENTIAL, REFRACTIVE_INDEX, SOUND_SPEED, CoefficientField, Grid2D

log = logging.getLogger(__name__)

MODIFIED_HELMHOLTZ = "modified_helmholtz"
HELMHOLTZ = "helmholtz"
SCHRODINGER_LAPLACE = "schrodinger_laplace"
_PAIRING = {MODIFIED_HELMHOLTZ: SOUND_SPEED, HELMHOLTZ: REFRACTIVE_INDEX,
            SCHRODINGER_LAPLACE: POTENTIAL}


@dataclass(frozen=True)
class Kernel:
    """Outgoing/decaying fundamental solution with ``L G = -delta``.

    modified_helmholtz: ``K0(s r)/(2 pi)`` for ``L = Lap - s^2``;
    helmholtz: ``(i/4) H0(k r)`` for ``L = Lap + k^2``;
    schrodinger_laplace: ``(i/4) H0(sqrt(s) e^{i pi/4} r)`` for ``L = Lap + i s``.
    """

    kind: str
    param: float

    def __post_init__(self):
        if self.kind not in _PAIRING:
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        if not self.param > 0:
            raise ValueError("kernel parameter must be positive")

    @property
    def kappa(self) -> complex:
        if self.kind == MODIFIED_HELMHOLTZ:
            return 1j * self.param
        if self.kind == HELMHOLTZ:
            return complex(self.param)
        return complex(sf.sqrt_is(self.param))

    @property
    def decay_rate(self) -> float:
        return float(self.kappa.imag)

    @property
    def is_real(self) -> bool:
        return self.kind == MODIFIED_HELMHOLTZ

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        if self.kind == MODIFIED_HELMHOLTZ:
            return sf.bessel_k0(self.param * r) / (2 * np.pi)
        return 0.25j * sf.hankel1_0(self.kappa * r)

    def cell_integral(self, a: float):
        """Integral of the kernel over the disk of radius ``a`` centred on the pole."""
        if self.kind == MODIFIED_HELMHOLTZ:
            s = self.param
            return (1.0 - s * a * sf.bessel_k1(s * a)) / s ** 2
        k = self.kappa
        return complex(0.5j * np.pi * a / k * sf.hankel1_1(k * a) - 1.0 / k ** 2)

    def contrast_weight(self, coef: CoefficientField, X, Y) -> np.ndarray:
        """``m`` such that the scattering problem reads ``u = v + int G m u``."""
        want = _PAIRING[self.kind]
        if coef.kind != want:
            raise ValueError(f"{self.kind} kernel pairs with a {want} field, got {coef.kind}")
        contrast = coef.contrast_at(X, Y)
        if self.kind == MODIFIED_HELMHOLTZ:
            return -self.param ** 2 * contrast
        if self.kind == HELMHOLTZ:
            return self.param ** 2 * contrast
        return contrast


@dataclass(frozen=True)
class IncidentField:
    kind: str
    k: float | None = None
    direction: float | None = None
    z: Point2 | None = None
    f: BumpProfile2D | None = None
    weight: complex = 1.0

    @classmethod
    def plane_wave(cls, k: float, angle: float) -> "IncidentField":
        return cls("plane_wave", k=k, direction=angle)

    @classmethod
    def point_source(cls, k: float, z) -> "IncidentField":
        return cls("point_source", k=k, z=Point2(*map(float, z)))

    @classmethod
    def volume_source(cls, f: BumpProfile2D, weight: complex) -> "IncidentField":
        return cls("volume_source", f=f, weight=weight)


class Convolver:
    """``h^2 sum_j G(x_i - x_j) w_j`` on one grid via zero-padded FFT."""

    def __init__(self, kernel: Kernel, grid: Grid2D, tilt: np.ndarray | None = None,
                 ref: np.ndarray | None = None):
        self.kernel, self.grid = kernel, grid
        nx, ny, h = grid.nx, grid.ny, grid.spacing
        ix = np.arange(-(nx - 1), nx)
        iy = np.arange(-(ny - 1), ny)
        DX, DY = np.meshgrid(ix * h, iy * h, indexing="ij")
        r = np.hypot(DX, DY)
        r[nx - 1, ny - 1] = 1.0
        gk = np.asarray(kernel(r), dtype=complex) * h ** 2
        gk[nx - 1, ny - 1] = kernel.cell_integral(h / np.sqrt(np.pi))
        self.self_weight = complex(gk[nx - 1, ny - 1])
        self.tilt = None if tilt is None else np.asarray(tilt, dtype=float)
        if self.tilt is not None:
            gk = gk * np.exp(self.tilt[0] * DX + self.tilt[1] * DY)
            X, Y = grid.mesh()
            ref = np.zeros(2) if ref is None else np.asarray(ref, dtype=float)
            self._phase = self.tilt[0] * (X - ref[0]) + self.tilt[1] * (Y - ref[1])
        self.shape = tuple(sfft.next_fast_len(2 * n - 1) for n in (nx, ny))
        self._gk_abs_hat = None
        self._gk = gk
        self._gk_hat = sfft.fft2(gk, s=self.shape, workers=-1)

    def __call__(self, w: np.ndarray) -> np.ndarray:
        nx, ny = self.grid.nx, self.grid.ny
        if self.tilt is not None:
            w = w * np.exp(self._phase)
        out = sfft.ifft2(sfft.fft2(w, s=self.shape, workers=-1) * self._gk_hat, workers=-1)
        out = out[nx - 1:2 * nx - 1, ny - 1:2 * ny - 1]
        if self.tilt is not None:
            out = out * np.exp(-self._phase)
        return out

    def abs_rowsum(self, w_abs: np.ndarray) -> np.ndarray:
        """``sum_j |G_ij| h^2 w_abs_j`` for nonnegative weights."""
        nx, ny = self.grid.nx, self.grid.ny
        if self._gk_abs_hat is None:
            self._gk_abs_hat = sfft.fft2(np.abs(self._gk), s=self.shape, workers=-1)
        out = sfft.ifft2(sfft.fft2(w_abs, s=self.shape, workers=-1) * self._gk_abs_hat, workers=-1)
        return out.real[nx - 1:2 * nx - 1, ny - 1:2 * ny - 1]

    def adjoint(self, w: np.ndarray) -> np.ndarray:
        """``sum_i conj(G_ij) w_i``; G is symmetric so this is conj(G) * w."""
        return np.conj(self(np.conj(w)))


class LSOperator:
    """Discrete ``K`` for one (kernel, contrast, grid) triple."""

    def __init__(self, kernel: Kernel, contrast: CoefficientField, grid: Grid2D):
        self.kernel, self.contrast, self.grid = kernel, contrast, grid
        X, Y = grid.mesh()
        self.m = kernel.contrast_weight(contrast, X, Y).astype(complex)
        self.conv = Convolver(kernel, grid)

    def __call__(self, u: np.ndarray) -> np.ndarray:
        return self.conv(self.m * u)

    def adjoint(self, u: np.ndarray) -> np.ndarray:
        return np.conj(self.m) * self.conv.adjoint(u)

    @property
    def diagonal(self) -> np.ndarray:
        return self.conv.self_weight * self.m


def apply_K(kernel: Kernel, contrast: CoefficientField, field_: Grid2D) -> np.ndarray:
    """``K u`` for a field given on a grid (values indexed [ix, iy])."""
    if field_.values is None:
        raise ValueError("field has no values")
    return LSOperator(kernel, contrast, field_)(np.asarray(field_.values, dtype=complex))


def operator_norm(kernel: Kernel, contrast: CoefficientField, grid: Grid2D, norm: str = "sup",
                  tol: float = 1e-6, max_iter: int = 500, op: LSOperator | None = None) -> float:
    """Norm of the discrete operator on ``grid``.

    ``sup``: maximum absolute row sum (exact for the discrete operator).
    ``l2``: power iteration on ``K* K`` to relative tolerance ``tol``.
    """
    op = op or LSOperator(kernel, contrast, grid)
    if not np.any(op.m):
        return 0.0
    if norm == "sup":
        absm = np.abs(op.m)
        rows = op.conv.abs_rowsum(absm)
        # the self weight is not |G| h^2 but the exact cell integral
        return float(np.max(rows))
    if norm != "l2":
        raise ValueError("norm must be 'sup' or 'l2'")
    rng = np.random.default_rng(0)
    x = rng.standard_normal(grid.shape) + 0j
    x *= (op.m != 0)
    x /= np.linalg.norm(x)
    lam_old = 0.0
    for _ in range(max_iter):
        y = op.adjoint(op(x))
        lam = np.linalg.norm(y)
        if lam == 0:
            return 0.0
        x = y / lam
        if abs(lam - lam_old) <= tol * lam:
            return float(np.sqrt(lam))
        lam_old = lam
    raise PowerIterationStall(f"power iteration did not settle in {max_iter} steps")


def incident_values(drive: IncidentField, grid: Grid2D, kernel: Kernel | None = None,
                    tilt=None, ref=None) -> np.ndarray:
    X, Y = grid.mesh()
    if drive.kind == "plane_wave":
        d = np.array([np.cos(drive.direction), np.sin(drive.direction)])
        return np.exp(1j * drive.k * (X * d[0] + Y * d[1]))
    if drive.kind == "point_source":
        r = np.hypot(X - drive.z.x, Y - drive.z.y)
        if np.any(r == 0):
            raise ValueError("point source sits on a grid node")
        return 0.25j * sf.hankel1_0(drive.k * r)
    if drive.kind == "volume_source":
        if kernel is None:
            raise ValueError("volume sources need a kernel")
        return volume_source_values(kernel, drive.f, drive.weight, grid, tilt=tilt, ref=ref)
    raise ValueError(f"unknown incident kind {drive.kind!r}")


def volume_source_values(kernel: Kernel, f: BumpProfile2D, weight: complex, grid: Grid2D,
                         tilt=None, ref=None) -> np.ndarray:
    """``weight * int G(x - y) f(y) dy`` sampled on ``grid``.

    With a ``tilt`` vector the convolution is evaluated twice (plain and
    exponentially tilted) and each node keeps the estimate with the smaller
    round-off bound.
    """
    X, Y = grid.mesh()
    fv = f(X, Y).astype(complex) * weight
    if not np.any(fv):
        return np.zeros(grid.shape, dtype=complex)
    plain = Convolver(kernel, grid)(fv)
    if tilt is None:
        return plain
    conv_t = Convolver(kernel, grid, tilt=tilt, ref=ref)
    tilted = conv_t(fv)
    eps = np.finfo(float).eps * 64
    err_plain = eps * np.max(np.abs(plain))
    weighted = np.abs(tilted) * np.exp(conv_t._phase)
    err_tilt = eps * np.max(weighted) * np.exp(-conv_t._phase)
    return np.where(err_tilt < err_plain, tilted, plain)


def volume_source_field(kernel: Kernel, f: BumpProfile2D, weight: complex, grid: Grid2D,
                        **kw) -> SpectralField:
    """Free field solving ``L v = -weight * f`` (``L`` the kernel's operator)."""
    vals = volume_source_values(kernel, f, weight, grid, **kw)
    if kernel.is_real and np.isreal(weight):
        vals = vals.real
    return SpectralField(kernel.param, grid.with_values(vals),
                         {"kernel": kernel.kind, "source": "volume", "weight": complex(weight)})


def lippmann_schwinger_solve(kernel: Kernel, contrast: CoefficientField, drive: IncidentField,
                             grid: Grid2D, method: str = "direct_iterative", tol: float = 1e-8,
                             max_terms: int = 500, v: np.ndarray | None = None,
                             op: LSOperator | None = None, restart: int = 60) -> SpectralField:
    """Total field ``u = v + K u`` on ``grid``.

    method ``neumann`` sums the series and requires a certified sup-norm below
    one; ``direct_iterative`` runs restarted GMRES on ``(I - K) u = v`` with
    left Jacobi (diagonal) preconditioning.
    """
    op = op or LSOperator(kernel, contrast, grid)
    if v is None:
        v = incident_values(drive, grid, kernel)
    v = np.asarray(v, dtype=complex)
    meta: dict[str, Any] = {"kernel": kernel.kind, "param": kernel.param, "method": method}
    vnorm = np.linalg.norm(v)
    if not np.any(op.m) or vnorm == 0:
        meta.update(iterations=0, residual=0.0)
        return _wrap(kernel, grid, v.copy(), meta)

    if method == "neumann":
        knorm = operator_norm(kernel, contrast, grid, "sup", op=op)
        meta["certified_norm"] = knorm
        if knorm >= 1:
            raise NotContractive(f"sup-norm of K_s is {knorm:.4g} >= 1")
        u = v.copy()
        term = v.copy()
        for n in range(1, max_terms + 1):
            term = op(term)
            u += term
            if np.linalg.norm(term) <= 0.1 * tol * np.linalg.norm(u):
                break
        meta["terms"] = n
    elif method == "direct_iterative":
        shape = grid.shape
        diag = 1.0 - op.diagonal.ravel()
        N = diag.size

        def matvec(x):
            x = x.reshape(shape)
            return ((x - op(x)).ravel()) / diag

        A = splinalg.LinearOperator((N, N), matvec=matvec, dtype=complex)
        count = {"n": 0}

        def cb(_):
            count["n"] += 1

        b = v.ravel() / diag
        x, info = splinalg.gmres(A, b, x0=b.copy(), rtol=0.05 * tol, atol=0.0, restart=restart,
                                 maxiter=max_terms, callback=cb, callback_type="pr_norm")
        u = x.reshape(shape)
        meta["iterations"] = count["n"]
        meta["gmres_info"] = int(info)
    else:
        raise ValueError(f"unknown method {method!r}")

    res = np.linalg.norm(u - v - op(u)) / np.linalg.norm(u)
    meta["residual"] = float(res)
    if not res <= tol:
        raise NoConvergence(f"{method} stopped at relative residual {res:.3g} > {tol:.3g}")
    return _wrap(kernel, grid, u, meta)


def _wrap(kernel, grid, u, meta):
    if kernel.is_real and np.all(np.abs(u.imag) <= 1e-14 * (np.max(np.abs(u)) + 1e-300)):
        u = u.real
    return SpectralField(kernel.param, grid.with_values(u), meta)


def scattered_at(kernel: Kernel, contrast: CoefficientField, total: SpectralField,
                 points: np.ndarray, chunk: int = 256) -> np.ndarray:
    """Direct-sum ``int G(x - y) m(y) u(y) dy`` at arbitrary points (shape (..., 2))."""
    grid = total.grid
    X, Y = grid.mesh()
    m = kernel.contrast_weight(contrast, X, Y) * total.values
    sel = m != 0
    ys = np.stack([X[sel], Y[sel]], -1)
    w = m[sel] * grid.spacing ** 2
    self_w = kernel.cell_integral(grid.spacing / np.sqrt(np.pi))
    pts = np.asarray(points, dtype=float)
    flat = pts.reshape(-1, 2)
    out = np.zeros(len(flat), dtype=complex)
    for k in range(0, len(flat), chunk):
        p = flat[k:k + chunk]
        r = np.hypot(p[:, None, 0] - ys[None, :, 0], p[:, None, 1] - ys[None, :, 1])
        hit = r < 1e-9 * grid.spacing
        r = np.where(hit, 1.0, r)
        G = np.asarray(kernel(r), dtype=complex) * grid.spacing ** 2
        G = np.where(hit, self_w, G)
        out[k:k + chunk] = G @ w
    return out.reshape(pts.shape[:-1])


@dataclass
class FarField:
    k: float
    directions: np.ndarray
    values: np.ndarray
    meta: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if not np.all(np.isfinite(self.values)):
            raise ValueError("non-finite far-field values")


def far_field(contrast: CoefficientField, total_field: SpectralField, k: float,
              n_directions: int = 128) -> FarField:
    """``v_inf(xhat) = e^{i pi/4}/sqrt(8 pi k) int e^{-i k xhat.y} k^2 (n-1) v dy``."""
    grid = total_field.grid
    X, Y = grid.mesh()
    m = k ** 2 * contrast.contrast_at(X, Y) * total_field.values
    sel = m != 0
    theta = 2 * np.pi * np.arange(n_directions) / n_directions
    if not np.any(sel):
        return FarField(k, theta, np.zeros(n_directions, dtype=complex))
    ys = np.stack([X[sel], Y[sel]], -1)
    phase = np.exp(-1j * k * (np.cos(theta)[:, None] * ys[None, :, 0]
                              + np.sin(theta)[:, None] * ys[None, :, 1]))
    vals = np.exp(0.25j * np.pi) / np.sqrt(8 * np.pi * k) * (phase @ m[sel]) * grid.spacing ** 2
    return FarField(k, theta, vals)


def wave_spectral_solve(c_field: CoefficientField, f: BumpProfile2D, ghat: float, s: float,
                        grid: Grid2D, method: str = "direct_iterative",
                        tol: float = 1e-8) -> SpectralField:
    """Direct solve of ``Lap u - s^2 u / c^2 + ghat f = 0`` on ``grid``."""
    kernel = Kernel(MODIFIED_HELMHOLTZ, s)
    drive = IncidentField.volume_source(f, ghat)
    return lippmann_schwinger_solve(kernel, c_field, drive, grid, method=method, tol=tol)


def schrodinger_spectral_solve(q_field: CoefficientField, u0: BumpProfile2D, s: float,
                               grid: Grid2D, method: str = "direct_iterative", tol: float = 1e-8,
                               focus: Point2 | None = None, tilt_fraction: float = 0.9
                               ) -> tuple[SpectralField, np.ndarray]:
    """Direct solve of ``Lap u + (q + i s) u = i u0``; returns (total field, free field).

    ``focus`` marks a point far (in decay lengths) from the source where the
    free field must keep relative accuracy; the source convolution is then
    exponentially tilted towards it.
    """
    kernel = Kernel(SCHRODINGER_LAPLACE, s)
    tilt = ref = None
    if focus is not None:
        e = np.array([focus.x - u0.center.x, focus.y - u0.center.y])
        e /= np.linalg.norm(e)
        tilt = tilt_fraction * kernel.decay_rate * e
        ref = np.array([focus.x, focus.y])
    v = volume_source_values(kernel, u0, -1j, grid, tilt=tilt, ref=ref)
    drive = IncidentField.volume_source(u0, -1j)
    sol = lippmann_schwinger_solve(kernel, q_field, drive, grid, method=method, tol=tol, v=v)
    return sol, v


def kernel_gradient(kernel: Kernel, dx, dy):
    """Gradient of the kernel with respect to the target point, at offset (dx, dy) != 0."""
    r = np.hypot(dx, dy)
    if kernel.kind == MODIFIED_HELMHOLTZ:
        radial = -kernel.param * sf.bessel_k1(kernel.param * r) / (2 * np.pi)
    else:
        radial = -0.25j * kernel.kappa * sf.hankel1_1(kernel.kappa * r)
    return radial * dx / r, radial * dy / r


def layer_on_points(kernel: Kernel, ys: np.ndarray, weights: np.ndarray, points: np.ndarray,
                    normals: np.ndarray | None = None, chunk: int = 128):
    """``sum_j G(x - y_j) w_j`` and its derivative along ``normals`` at points off the sources."""
    vals = np.zeros(len(points), dtype=complex)
    dnu = np.zeros(len(points), dtype=complex)
    for k in range(0, len(points), chunk):
        p = points[k:k + chunk]
        dx = p[:, None, 0] - ys[None, :, 0]
        dy = p[:, None, 1] - ys[None, :, 1]
        vals[k:k + chunk] = np.asarray(kernel(np.hypot(dx, dy)), dtype=complex) @ weights
        if normals is not None:
            gx, gy = kernel_gradient(kernel, dx, dy)
            n = normals[k:k + chunk]
            dnu[k:k + chunk] = (gx * n[:, 0:1] + gy * n[:, 1:2]) @ weights
    return vals, dnu
