"""Coefficient fields with contrast supported on a convex polygon.

The interior of every field is a harmonic polynomial
``V(x, y) = sum_m a_m Re (x+iy)^m + b_m Im (x+iy)^m`` (degree <= 6),
which realizes the admissible set with vanishing first- and zeroth-order
coefficients.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InvariantViolated
from .geometry import ConvexPolygon, Point2, classify_points

MAX_DEGREE = 6

SOUND_SPEED = "sound_speed"
POTENTIAL = "potential"
REFRACTIVE_INDEX = "refractive_index"
KINDS = (SOUND_SPEED, POTENTIAL, REFRACTIVE_INDEX)
BACKGROUND = {SOUND_SPEED: 1.0, POTENTIAL: 0.0, REFRACTIVE_INDEX: 1.0}


@dataclass(eq=False)
class Grid2D:
    """Uniform node grid ``x_i = origin.x + i*spacing`` (i < nx), same in y.

    ``values`` is indexed ``[i, j]`` (x first) when present.
    """

    origin: Point2
    spacing: float
    nx: int
    ny: int
    values: np.ndarray | None = None

    def __post_init__(self):
        if not isinstance(self.origin, Point2):
            self.origin = Point2(*map(float, self.origin))
        if self.nx < 2 or self.ny < 2:
            raise ValueError("grid needs at least 2 nodes per axis")
        if not self.spacing > 0:
            raise ValueError("grid spacing must be positive")
        if self.values is not None and self.values.shape != (self.nx, self.ny):
            raise ValueError(f"values shape {self.values.shape} != ({self.nx}, {self.ny})")

    @classmethod
    def centered(cls, half_width: float, spacing: float) -> "Grid2D":
        """Square grid over ``[-L, L]^2`` with a node at the origin."""
        n = int(np.ceil(half_width / spacing - 1e-9))
        return cls(Point2(-n * spacing, -n * spacing), spacing, 2 * n + 1, 2 * n + 1)

    @classmethod
    def covering(cls, xmin, xmax, ymin, ymax, spacing) -> "Grid2D":
        """Smallest grid aligned to integer multiples of ``spacing`` covering the box."""
        i0, i1 = int(np.floor(xmin / spacing + 1e-9)), int(np.ceil(xmax / spacing - 1e-9))
        j0, j1 = int(np.floor(ymin / spacing + 1e-9)), int(np.ceil(ymax / spacing - 1e-9))
        return cls(Point2(i0 * spacing, j0 * spacing), spacing, i1 - i0 + 1, j1 - j0 + 1)

    @property
    def x(self) -> np.ndarray:
        return self.origin.x + self.spacing * np.arange(self.nx)

    @property
    def y(self) -> np.ndarray:
        return self.origin.y + self.spacing * np.arange(self.ny)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.x, self.y, indexing="ij")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nx, self.ny)

    def with_values(self, values) -> "Grid2D":
        return Grid2D(self.origin, self.spacing, self.nx, self.ny, np.asarray(values))

    def like(self) -> "Grid2D":
        return Grid2D(self.origin, self.spacing, self.nx, self.ny)

    def same_geometry(self, other: "Grid2D") -> bool:
        return (self.nx, self.ny) == (other.nx, other.ny) and np.isclose(
            self.spacing, other.spacing) and np.allclose(tuple(self.origin), tuple(other.origin))

    def interpolate(self, pts, values=None) -> np.ndarray:
        """Bilinear interpolation at points of shape (..., 2)."""
        vals = self.values if values is None else values
        pts = np.asarray(pts, dtype=float)
        fx = (pts[..., 0] - self.origin.x) / self.spacing
        fy = (pts[..., 1] - self.origin.y) / self.spacing
        if np.any(fx < -1e-9) or np.any(fx > self.nx - 1 + 1e-9) or np.any(fy < -1e-9) or np.any(
                fy > self.ny - 1 + 1e-9):
            raise ValueError("interpolation point outside grid")
        i = np.clip(np.floor(fx).astype(int), 0, self.nx - 2)
        j = np.clip(np.floor(fy).astype(int), 0, self.ny - 2)
        tx, ty = fx - i, fy - j
        return ((1 - tx) * (1 - ty) * vals[i, j] + tx * (1 - ty) * vals[i + 1, j]
                + (1 - tx) * ty * vals[i, j + 1] + tx * ty * vals[i + 1, j + 1])

    def index_of(self, p) -> tuple[int, int]:
        """Indices of the node nearest to ``p``."""
        p = tuple(p)
        return (int(round((p[0] - self.origin.x) / self.spacing)),
                int(round((p[1] - self.origin.y) / self.spacing)))

    def disk_mask(self, radius: float, center=(0.0, 0.0)) -> np.ndarray:
        X, Y = self.mesh()
        return np.hypot(X - center[0], Y - center[1]) <= radius + 1e-12


@dataclass(frozen=True)
class AdmissibleDescriptor:
    """Harmonic polynomial coefficients ``[a0, a1, b1, a2, b2, ..., aN, bN]``.

    ``a_m`` multiplies ``Re z^m`` and ``b_m`` multiplies ``Im z^m``.
    """

    coefficients: tuple[float, ...]
    kind: str = "harmonic_polynomial"

    def __post_init__(self):
        c = tuple(float(a) for a in self.coefficients)
        if len(c) == 0:
            c = (0.0,)
        if len(c) % 2 == 0:
            c = c + (0.0,)
        if (len(c) - 1) // 2 > MAX_DEGREE:
            raise ValueError(f"harmonic degree capped at {MAX_DEGREE}")
        if self.kind != "harmonic_polynomial":
            raise ValueError(f"unsupported descriptor kind {self.kind!r}")
        object.__setattr__(self, "coefficients", c)

    @classmethod
    def constant(cls, value: float) -> "AdmissibleDescriptor":
        return cls((value,))

    @classmethod
    def from_terms(cls, terms: dict[int, complex]) -> "AdmissibleDescriptor":
        """``{m: a_m + 1j*b_m}`` -> descriptor."""
        deg = max(terms) if terms else 0
        c = [0.0] * (2 * deg + 1)
        for m, w in terms.items():
            w = complex(w)
            if m == 0:
                c[0] = w.real
            else:
                c[2 * m - 1], c[2 * m] = w.real, w.imag
        return cls(tuple(c))

    @property
    def degree(self) -> int:
        return (len(self.coefficients) - 1) // 2

    def __call__(self, x, y):
        z = np.asarray(x, dtype=float) + 1j * np.asarray(y, dtype=float)
        c = self.coefficients
        out = np.full(z.shape, c[0], dtype=float)
        zm = np.ones_like(z)
        for m in range(1, self.degree + 1):
            zm = zm * z
            out = out + c[2 * m - 1] * zm.real + c[2 * m] * zm.imag
        return out

    def scaled(self, alpha: float) -> "AdmissibleDescriptor":
        return AdmissibleDescriptor(tuple(alpha * a for a in self.coefficients))


def verify_admissible(descriptor: AdmissibleDescriptor, region, probe_spacing: float,
                      n_probe: int = 21) -> float:
    """Max five-point-Laplacian residual of ``descriptor`` over probe points.

    ``region`` is a ConvexPolygon (probes on its bounding box, kept if inside)
    or a box ``(xmin, xmax, ymin, ymax)``.
    """
    h = float(probe_spacing)
    if isinstance(region, ConvexPolygon):
        v = region.as_array()
        box = (v[:, 0].min(), v[:, 0].max(), v[:, 1].min(), v[:, 1].max())
    else:
        box = tuple(region)
    X, Y = np.meshgrid(np.linspace(box[0], box[1], n_probe), np.linspace(box[2], box[3], n_probe),
                       indexing="ij")
    if isinstance(region, ConvexPolygon):
        keep = classify_points(region, np.stack([X, Y], -1)) >= 0
        X, Y = X[keep], Y[keep]
    lap = (descriptor(X + h, Y) + descriptor(X - h, Y) + descriptor(X, Y + h)
           + descriptor(X, Y - h) - 4 * descriptor(X, Y)) / h ** 2
    return float(np.max(np.abs(lap)))


@dataclass(eq=False)
class CoefficientField:
    """c(x), q(x) or n(x): ``background`` off the closed polygon, driven by V on it.

    For sound speed V is ``1/c^2``; for the potential and the index V is the
    field itself.
    """

    kind: str
    support: ConvexPolygon
    interior_descriptor: AdmissibleDescriptor
    background: float
    grid: Grid2D | None = None
    _samples: np.ndarray | None = field(default=None, repr=False)

    def interior(self, x, y):
        return self.interior_descriptor(x, y)

    def _inside(self, x, y):
        pts = np.stack(np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float)), axis=-1)
        return classify_points(self.support, pts) >= 0

    def value_at(self, x, y):
        """Physical coefficient with a sharp interface at the polygon boundary."""
        x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
        inside = self._inside(x, y)
        out = np.full(x.shape, self.background, dtype=float)
        v = self.interior(x[inside], y[inside])
        out[inside] = 1.0 / np.sqrt(v) if self.kind == SOUND_SPEED else v
        return out

    def contrast_at(self, x, y):
        """``1/c^2 - 1``, ``q`` or ``n - 1``; zero off the polygon."""
        x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
        inside = self._inside(x, y)
        out = np.zeros(x.shape, dtype=float)
        v = self.interior(x[inside], y[inside])
        out[inside] = v - (0.0 if self.kind == POTENTIAL else 1.0)
        return out

    def inv_c2_at(self, x, y):
        """``1/c^2`` for sound-speed fields."""
        return 1.0 + self.contrast_at(x, y)

    @property
    def samples(self) -> Grid2D:
        if self.grid is None:
            raise ValueError("field was built without a grid")
        if self._samples is None:
            self._samples = self.value_at(*self.grid.mesh())
        return self.grid.with_values(self._samples)

    def on_grid(self, grid: Grid2D) -> "CoefficientField":
        return CoefficientField(self.kind, self.support, self.interior_descriptor,
                                self.background, grid)

    def max_value(self) -> float:
        """Max of the physical coefficient over the plane (vertices + edges + background)."""
        pts = _closure_probe(self.support)
        v = self.value_at(pts[:, 0], pts[:, 1])
        return float(max(np.max(v), self.background))


def _closure_probe(poly: ConvexPolygon, n_edge: int = 400, n_int: int = 41) -> np.ndarray:
    v = poly.as_array()
    t = np.linspace(0.0, 1.0, n_edge, endpoint=False)[:, None]
    edge_pts = [a + t * (b - a) for a, b in zip(v, np.roll(v, -1, axis=0))]
    X, Y = np.meshgrid(np.linspace(v[:, 0].min(), v[:, 0].max(), n_int),
                       np.linspace(v[:, 1].min(), v[:, 1].max(), n_int), indexing="ij")
    P = np.stack([X.ravel(), Y.ravel()], -1)
    P = P[classify_points(poly, P) >= 0]
    return np.concatenate(edge_pts + [v, P])


def build_coefficient(kind: str, poly: ConvexPolygon, descriptor: AdmissibleDescriptor,
                      grid: Grid2D | None = None) -> CoefficientField:
    """Build a coefficient field and check its admissibility invariants.

    Raises
    ------
    InvariantViolated
        Sound speed with ``V <= 0`` on the closed polygon; potential vanishing at
        a corner; refractive index equal to 1 at a corner.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown coefficient kind {kind!r}")
    corners = poly.as_array()
    vc = descriptor(corners[:, 0], corners[:, 1])
    if kind == SOUND_SPEED:
        probe = _closure_probe(poly)
        if np.min(descriptor(probe[:, 0], probe[:, 1])) <= 0:
            raise InvariantViolated("1/c^2 must be positive on the closed polygon")
    elif kind == POTENTIAL:
        bad = np.isclose(vc, 0.0, rtol=0, atol=1e-12)
        if np.any(bad):
            raise InvariantViolated(f"q vanishes at corner {corners[np.argmax(bad)].tolist()}")
    else:
        bad = np.isclose(vc, 1.0, rtol=0, atol=1e-12)
        if np.any(bad):
            raise InvariantViolated(f"n equals 1 at corner {corners[np.argmax(bad)].tolist()}")
    return CoefficientField(kind, poly, descriptor, BACKGROUND[kind], grid)


def zero_contrast(kind: str, poly: ConvexPolygon, grid: Grid2D | None = None) -> CoefficientField:
    """Background-only field (no scatterer); bypasses the corner invariants on purpose."""
    desc = AdmissibleDescriptor.constant(BACKGROUND[kind])
    return CoefficientField(kind, poly, desc, BACKGROUND[kind], grid)
