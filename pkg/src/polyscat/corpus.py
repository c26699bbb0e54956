"""Problem descriptions and the standard instances used by the harness and tests.

Vertex coordinates are multiples of 0.2 so that every corner lands on a grid
node for the dyadic spacings ``0.2 / 2**k`` the harness uses.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import BumpProfile1D, BumpProfile2D, ConvexPolygon, Point2, make_convex_polygon
from .media import (POTENTIAL, REFRACTIVE_INDEX, SOUND_SPEED, AdmissibleDescriptor,
                    CoefficientField, build_coefficient, zero_contrast)

TRIANGLE = ((-0.2, 0.0), (0.6, -0.6), (0.6, 0.6))
SQUARE = ((-0.2, -0.4), (0.6, -0.4), (0.6, 0.4), (-0.2, 0.4))
SOURCE_CENTER = (-0.8, 0.0)
SOURCE_RADIUS = 0.4
RECORD_RADIUS = 2.0


@dataclass
class WaveProblem:
    """``(1/c^2) u_tt = Lap u + f(x) g(t)``, zero initial data."""

    c_field: CoefficientField
    f: BumpProfile2D
    g: BumpProfile1D
    record_radius: float = RECORD_RADIUS

    @property
    def polygon(self) -> ConvexPolygon:
        return self.c_field.support


@dataclass
class SchrodingerProblem:
    """``i u_t + Lap u + q u = 0``, ``u(0) = u0``."""

    q_field: CoefficientField
    u0: BumpProfile2D
    record_radius: float = RECORD_RADIUS

    @property
    def polygon(self) -> ConvexPolygon:
        return self.q_field.support


@dataclass
class HelmholtzProblem:
    """Plane wave ``exp(i k x.d)`` scattered by the index ``n``."""

    n_field: CoefficientField
    k: float
    direction: float = 0.0

    @property
    def polygon(self) -> ConvexPolygon:
        return self.n_field.support


def polygon(name: str) -> ConvexPolygon:
    verts = {"triangle": TRIANGLE, "square": SQUARE}
    if name not in verts:
        raise KeyError(f"unknown corpus polygon {name!r}")
    return make_convex_polygon(verts[name])


def standard_source(amplitude: complex = 1.0) -> BumpProfile2D:
    return BumpProfile2D(Point2(*SOURCE_CENTER), SOURCE_RADIUS, amplitude)


def standard_pulse() -> BumpProfile1D:
    """Delay chosen so that s^3 ||u_hat(s)|| stays within a small band over s in [0.5, 8]."""
    return BumpProfile1D(center=0.8, half_width=0.5)


def early_pulse() -> BumpProfile1D:
    """Short, early pulse: ghat(s) stays close to ghat(0) for s <= 0.5 (small-s probes)."""
    return BumpProfile1D(center=0.3, half_width=0.25)


def wave_instance(shape: str = "triangle", V: float = 4.0, amplitude: float = 1.0,
                  contrast: bool = True, pulse: BumpProfile1D | None = None) -> WaveProblem:
    """Sound speed ``1/c^2 = V`` on the polygon; ``contrast=False`` gives c = 1."""
    poly = polygon(shape)
    c = (build_coefficient(SOUND_SPEED, poly, AdmissibleDescriptor.constant(V)) if contrast
         else zero_contrast(SOUND_SPEED, poly))
    return WaveProblem(c, standard_source(amplitude), pulse or standard_pulse())


def schrodinger_instance(shape: str = "triangle", q: float = 2.0, contrast: bool = True,
                         amplitude: complex = 1.0) -> SchrodingerProblem:
    poly = polygon(shape)
    qf = (build_coefficient(POTENTIAL, poly, AdmissibleDescriptor.constant(q)) if contrast
          else zero_contrast(POTENTIAL, poly))
    return SchrodingerProblem(qf, standard_source(amplitude))


def helmholtz_instance(shape: str = "triangle", n: float = 2.0, k: float = 4.0,
                       direction: float = 0.0) -> HelmholtzProblem:
    poly = polygon(shape)
    nf = build_coefficient(REFRACTIVE_INDEX, poly, AdmissibleDescriptor.constant(n))
    return HelmholtzProblem(nf, k, direction)


def nearest_corner(poly: ConvexPolygon, p) -> Point2:
    """Vertex of ``poly`` closest to ``p``."""
    v = poly.as_array()
    p = tuple(p)
    d = np.hypot(v[:, 0] - p[0], v[:, 1] - p[1])
    return poly.vertices[int(np.argmin(d))]


def dyadic_spacing(target: float, base: float = 0.2) -> float:
    """Largest ``base / 2**k`` not exceeding ``target``."""
    k = max(0, int(np.ceil(np.log2(base / target) - 1e-12)))
    return base / 2 ** k
