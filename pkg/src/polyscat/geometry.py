"""Convex polygonal scatterers, corner sectors and C-infinity bump profiles."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import integrate

from .errors import DegenerateVertex, EpsTooLarge, NonConvex

BOUNDARY_TOL = 1e-12

INSIDE = "inside"
BOUNDARY = "boundary"
OUTSIDE = "outside"


@dataclass(frozen=True)
class Point2:
    x: float
    y: float

    def __post_init__(self):
        if not (np.isfinite(self.x) and np.isfinite(self.y)):
            raise ValueError(f"non-finite point ({self.x}, {self.y})")

    def __iter__(self):
        yield self.x
        yield self.y

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y])


def _as_point(p) -> Point2:
    if isinstance(p, Point2):
        return p
    x, y = p
    return Point2(float(x), float(y))


@dataclass(frozen=True)
class ConvexPolygon:
    """Strictly convex polygon stored counterclockwise.

    Build through :func:`make_convex_polygon`; the constructor does not
    validate.
    """

    vertices: tuple[Point2, ...]

    @property
    def corners(self) -> tuple[Point2, ...]:
        return self.vertices

    def as_array(self) -> np.ndarray:
        return np.array([[v.x, v.y] for v in self.vertices])

    def edges(self) -> list[tuple[np.ndarray, np.ndarray]]:
        v = self.as_array()
        return [(v[i], v[(i + 1) % len(v)]) for i in range(len(v))]

    def area(self) -> float:
        v = self.as_array()
        x, y = v[:, 0], v[:, 1]
        return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))

    def interior_angle(self, i: int) -> float:
        v = self.as_array()
        n = len(v)
        a = v[(i - 1) % n] - v[i]
        b = v[(i + 1) % n] - v[i]
        return float(np.arccos(np.clip(a @ b / np.linalg.norm(a) / np.linalg.norm(b), -1, 1)))

    def translated(self, dx: float, dy: float) -> "ConvexPolygon":
        return ConvexPolygon(tuple(Point2(v.x + dx, v.y + dy) for v in self.vertices))

    def distance_to(self, p) -> float:
        """Euclidean distance from ``p`` to the closed polygon."""
        p = np.asarray(tuple(_as_point(p)), dtype=float)
        if classify_points(self, p[None, :])[0] >= 0:
            return 0.0
        return min(_segment_distance(p, a, b) for a, b in self.edges())


def _segment_distance(p, a, b) -> float:
    d = b - a
    t = np.clip((p - a) @ d / (d @ d), 0.0, 1.0)
    return float(np.linalg.norm(p - (a + t * d)))


def make_convex_polygon(vertices: Sequence) -> ConvexPolygon:
    """Validate ``vertices`` and return them as a counterclockwise polygon.

    Raises
    ------
    DegenerateVertex
        Fewer than three points, a repeated vertex, or three consecutive
        collinear vertices.
    NonConvex
        A reflex vertex, or a vertex list that winds more than once.
    """
    pts = [_as_point(p) for p in vertices]
    if len(pts) < 3:
        raise DegenerateVertex("a polygon needs at least 3 vertices")
    v = np.array([[p.x, p.y] for p in pts])
    n = len(v)
    for i in range(n):
        for j in range(i + 1, n):
            if np.allclose(v[i], v[j], rtol=0, atol=BOUNDARY_TOL):
                raise DegenerateVertex(f"duplicate vertex {tuple(v[i])}")
    e = np.roll(v, -1, axis=0) - v
    cross = e[:, 0] * np.roll(e, -1, axis=0)[:, 1] - e[:, 1] * np.roll(e, -1, axis=0)[:, 0]
    scale = np.linalg.norm(e, axis=1) * np.linalg.norm(np.roll(e, -1, axis=0), axis=1)
    if np.any(np.abs(cross) <= 1e-12 * scale):
        i = int(np.argmin(np.abs(cross) / scale))
        raise DegenerateVertex(f"collinear vertices around index {(i + 1) % n}")
    if np.all(cross < 0):
        v = v[::-1]
    elif not np.all(cross > 0):
        raise NonConvex("vertex list has a reflex corner")
    # a star-shaped winding (e.g. pentagram) has all turns the same sign
    turning = np.sum(np.abs(np.arctan2(np.abs(cross), _dots(v))))
    if not np.isclose(turning, 2 * np.pi):
        raise NonConvex("vertex list winds more than once")
    return ConvexPolygon(tuple(Point2(float(x), float(y)) for x, y in v))


def _dots(v):
    e = np.roll(v, -1, axis=0) - v
    en = np.roll(e, -1, axis=0)
    return e[:, 0] * en[:, 0] + e[:, 1] * en[:, 1]


def classify_points(poly: ConvexPolygon, pts: np.ndarray) -> np.ndarray:
    """Vectorized half-plane test: +1 inside, 0 on the boundary, -1 outside.

    ``pts`` has shape (..., 2). The boundary band is 1e-12 m wide on either
    side of every edge.
    """
    pts = np.asarray(pts, dtype=float)
    v = poly.as_array()
    # signed distance to each edge line, positive on the interior side
    dmin = np.full(pts.shape[:-1], np.inf)
    for a, b in zip(v, np.roll(v, -1, axis=0)):
        d = b - a
        nrm = np.hypot(d[0], d[1])
        sd = (d[0] * (pts[..., 1] - a[1]) - d[1] * (pts[..., 0] - a[0])) / nrm
        dmin = np.minimum(dmin, sd)
    out = np.where(dmin > BOUNDARY_TOL, 1, np.where(dmin >= -BOUNDARY_TOL, 0, -1))
    return out.astype(np.int8)


def contains(poly: ConvexPolygon, p) -> str:
    code = int(classify_points(poly, np.asarray(tuple(_as_point(p)))[None, :])[0])
    return {1: INSIDE, 0: BOUNDARY, -1: OUTSIDE}[code]


@dataclass(frozen=True)
class CornerSector:
    apex: Point2
    opening_half_angle: float
    bisector_direction: tuple[float, float]
    radius: float

    def sample_points(self, n_r: int = 16, n_theta: int = 17) -> np.ndarray:
        """Polar sample of the open sector, returned as (n_r*n_theta, 2)."""
        r = np.linspace(0.0, self.radius, n_r + 1)[1:] * (1 - 1e-9)
        th = np.linspace(-self.opening_half_angle, self.opening_half_angle, n_theta)
        base = np.arctan2(self.bisector_direction[1], self.bisector_direction[0])
        R, TH = np.meshgrid(r, th + base, indexing="ij")
        pts = np.stack([self.apex.x + R * np.cos(TH), self.apex.y + R * np.sin(TH)], axis=-1)
        return pts.reshape(-1, 2)


def corner_sector(poly: ConvexPolygon, corner_index: int, eps: float) -> CornerSector:
    v = poly.as_array()
    n = len(v)
    if not 0 <= corner_index < n:
        raise IndexError(f"corner index {corner_index} out of range for {n} corners")
    o = v[corner_index]
    prev, nxt = v[(corner_index - 1) % n], v[(corner_index + 1) % n]
    shortest = min(np.linalg.norm(prev - o), np.linalg.norm(nxt - o))
    if eps <= 0 or eps >= 0.5 * shortest:
        raise EpsTooLarge(f"eps={eps} must lie in (0, {0.5 * shortest})")
    for k, (a, b) in enumerate(poly.edges()):
        if k in (corner_index, (corner_index - 1) % n):
            continue
        if _segment_distance(o, a, b) <= eps:
            raise EpsTooLarge(f"B_eps around corner {corner_index} meets edge {k}")
    a = (prev - o) / np.linalg.norm(prev - o)
    b = (nxt - o) / np.linalg.norm(nxt - o)
    bis = a + b
    bis /= np.linalg.norm(bis)
    return CornerSector(
        apex=Point2(float(o[0]), float(o[1])),
        opening_half_angle=0.5 * poly.interior_angle(corner_index),
        bisector_direction=(float(bis[0]), float(bis[1])),
        radius=float(eps),
    )


def _mollifier(z):
    z = np.asarray(z, dtype=float)
    out = np.zeros_like(z)
    inside = np.abs(z) < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - z[inside] ** 2))
    return out


@dataclass(frozen=True)
class BumpProfile1D:
    """Time profile ``amplitude * exp(-1/(1-((t-center)/half_width)^2))``."""

    center: float
    half_width: float
    amplitude: float = 1.0

    def __post_init__(self):
        if self.half_width <= 0:
            raise ValueError("half_width must be positive")

    @property
    def support(self) -> tuple[float, float]:
        return self.center - self.half_width, self.center + self.half_width

    def __call__(self, t):
        return self.amplitude * _mollifier((np.asarray(t, dtype=float) - self.center) / self.half_width)

    def laplace(self, s: float) -> float:
        """``int g(t) exp(-s t) dt`` by adaptive quadrature."""
        lo, hi = self.support
        val, _ = integrate.quad(lambda t: float(self(t)) * np.exp(-s * t), lo, hi,
                                epsabs=0, epsrel=1e-12, limit=200)
        return val


@dataclass(frozen=True)
class BumpProfile2D:
    """Radial bump on the disk ``|x - center| < radius``.

    ``amplitude`` may be complex (Schrodinger initial data).
    """

    center: Point2
    radius: float
    amplitude: complex = 1.0

    def __post_init__(self):
        object.__setattr__(self, "center", _as_point(self.center))
        if self.radius <= 0:
            raise ValueError("radius must be positive")

    def __call__(self, x, y):
        r = np.hypot(np.asarray(x, dtype=float) - self.center.x,
                     np.asarray(y, dtype=float) - self.center.y)
        return self.amplitude * _mollifier(r / self.radius)

    def radial(self, r):
        return self.amplitude * _mollifier(np.asarray(r, dtype=float) / self.radius)

    @property
    def is_complex(self) -> bool:
        return isinstance(self.amplitude, complex) and self.amplitude.imag != 0


_UNIT_1D = None
_UNIT_2D = None


def _unit_integrals() -> tuple[float, float]:
    global _UNIT_1D, _UNIT_2D
    if _UNIT_1D is None:
        f = lambda x: np.exp(-1.0 / (1.0 - x * x)) if abs(x) < 1 else 0.0
        _UNIT_1D = integrate.quad(f, -1, 1, epsabs=0, epsrel=1e-13, limit=200)[0]
        _UNIT_2D = 2 * np.pi * integrate.quad(lambda r: r * f(r), 0, 1, epsabs=0,
                                              epsrel=1e-13, limit=200)[0]
    return _UNIT_1D, _UNIT_2D


def bump_integral(profile):
    """``int g dt`` (which equals the Laplace transform at 0) or ``int f dx``."""
    one, two = _unit_integrals()
    if isinstance(profile, BumpProfile1D):
        return profile.amplitude * profile.half_width * one
    if isinstance(profile, BumpProfile2D):
        return profile.amplitude * profile.radius ** 2 * two
    raise TypeError(f"not a bump profile: {type(profile).__name__}")
