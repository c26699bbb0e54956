"""Experiment configuration: YAML text, JSON-schema validation, physical checks at load.

A config describes one model instance (polygon, coefficient, source, grid, time
and frequency knobs) plus what to do with it. Every precondition that can be
expressed in the file is checked in :func:`load_config` before any compute, and
violations raise :class:`ConfigInvalid`.
"""
from __future__ import annotations

import copy
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import jsonschema
import numpy as np
import yaml

from . import corpus
from .errors import ConfigInvalid, PolyscatError
from .geometry import (OUTSIDE, BumpProfile1D, BumpProfile2D, ConvexPolygon, Point2, contains,
                       make_convex_polygon)
from .media import (POTENTIAL, REFRACTIVE_INDEX, SOUND_SPEED, AdmissibleDescriptor,
                    build_coefficient, zero_contrast)

MODELS = ("wave", "schrodinger", "helmholtz")
KINDS = ("simulate_wave", "simulate_schrodinger", "simulate_helmholtz", "laplace_bridge",
         "verify_lemma", "distinguish", "sweep")
SWEEP_PARAMS = ("contrast", "spacing", "k")
MIN_CELLS_ACROSS_BUMP = 8

_num = {"type": "number"}
_pos = {"type": "number", "exclusiveMinimum": 0}
_point = {"type": "array", "items": _num, "minItems": 2, "maxItems": 2}

SCHEMA: dict[str, Any] = {
    "type": "object",
    "additionalProperties": False,
    "required": ["model"],
    "properties": {
        "model": {"enum": list(MODELS)},
        "experiment": {
            "type": "object",
            "additionalProperties": False,
            "required": ["kind"],
            "properties": {
                "kind": {"enum": list(KINDS)},
                "lemma": {"type": "string"},
                "setup_b": {"type": "object"},
                "param": {"enum": list(SWEEP_PARAMS)},
                "values": {"type": "array", "items": _num, "minItems": 1},
                "factor": _pos,
            },
        },
        "geometry": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "shape": {"enum": ["triangle", "square"]},
                "vertices": {"type": "array", "items": _point, "minItems": 3},
                "eps": _pos,
            },
        },
        "media": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "coefficients": {"type": "array", "items": _num, "minItems": 1, "maxItems": 13},
                "contrast": {"type": "boolean"},
            },
        },
        "source": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "center": _point,
                "radius": _pos,
                "amplitude": {"oneOf": [_num, _point]},
            },
        },
        "pulse": {
            "type": "object",
            "additionalProperties": False,
            "required": ["center", "half_width"],
            "properties": {"center": _num, "half_width": _pos},
        },
        "helmholtz": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"k": _pos, "direction": _num, "n_directions": {"type": "integer", "minimum": 8}},
        },
        "grid": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"spacing": _pos},
        },
        "time": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "T": _pos,
                "dt": _pos,
                "snapshot_stride": {"type": "integer", "minimum": 1},
                "box": _pos,
            },
        },
        "frequency": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "s": {"type": "array", "items": _num, "minItems": 1},
                "method": {"enum": ["direct_iterative", "neumann"]},
                "tol": _pos,
            },
        },
        "record_radius": _pos,
        "output_dir": {"type": "string"},
        "seed": {"type": "integer", "minimum": 0},
    },
}

DEFAULT_COEFFICIENT = {"wave": 4.0, "schrodinger": 2.0, "helmholtz": 2.0}
DEFAULT_SPACING = {"wave": 0.025, "schrodinger": 0.05, "helmholtz": 0.0125}
_FIELD_KIND = {"wave": SOUND_SPEED, "schrodinger": POTENTIAL, "helmholtz": REFRACTIVE_INDEX}


@dataclass
class ExperimentConfig:
    raw: dict
    model: str
    kind: str
    polygon: ConvexPolygon
    descriptor: AdmissibleDescriptor
    contrast: bool
    source: BumpProfile2D
    pulse: BumpProfile1D | None
    spacing: float
    record_radius: float
    T: float | None = None
    dt: float | None = None
    snapshot_stride: int | None = None
    box: float | None = None
    s_values: tuple[float, ...] | None = None
    method: str = "direct_iterative"
    tol: float = 1e-8
    k: float = 4.0
    direction: float = 0.0
    n_directions: int = 128
    eps: float = 0.1
    seed: int = 0
    output_dir: str = "polyscat_out"
    lemma: str | None = None
    setup_b: "ExperimentConfig | None" = None
    sweep_param: str | None = None
    sweep_values: tuple[float, ...] = field(default_factory=tuple)
    factor: float = 10.0

    def coefficient_field(self):
        kind = _FIELD_KIND[self.model]
        if not self.contrast:
            return zero_contrast(kind, self.polygon)
        return build_coefficient(kind, self.polygon, self.descriptor)

    def problem(self, default_pulse: BumpProfile1D | None = None):
        """Model instance described by the config."""
        cf = self.coefficient_field()
        if self.model == "wave":
            g = self.pulse or default_pulse or corpus.standard_pulse()
            return corpus.WaveProblem(cf, self.source, g, self.record_radius)
        if self.model == "schrodinger":
            return corpus.SchrodingerProblem(cf, self.source, self.record_radius)
        return corpus.HelmholtzProblem(cf, self.k, self.direction)

    def with_overrides(self, **kw) -> "ExperimentConfig":
        raw = copy.deepcopy(self.raw)
        for dotted, value in kw.items():
            node = raw
            *head, last = dotted.split(".")
            for key in head:
                node = node.setdefault(key, {})
            node[last] = value
        return parse_config(raw)


def _complex(a) -> complex:
    return complex(a[0], a[1]) if isinstance(a, list) else complex(a)


def parse_config(raw: dict) -> ExperimentConfig:
    """Validate ``raw`` against :data:`SCHEMA`, then check the physical invariants."""
    try:
        jsonschema.validate(raw, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigInvalid(f"{where}: {exc.message}") from None

    model = raw["model"]
    exp = raw.get("experiment", {"kind": f"simulate_{model}"})
    kind = exp["kind"]
    if kind.startswith("simulate_") and kind != f"simulate_{model}":
        raise ConfigInvalid(f"experiment {kind} does not match model {model}")

    geo = raw.get("geometry", {})
    if "shape" in geo and "vertices" in geo:
        raise ConfigInvalid("geometry: give either shape or vertices, not both")
    try:
        poly = (make_convex_polygon(geo["vertices"]) if "vertices" in geo
                else corpus.polygon(geo.get("shape", "triangle")))
    except PolyscatError as exc:
        raise ConfigInvalid(f"geometry: {exc}") from None

    med = raw.get("media", {})
    try:
        desc = AdmissibleDescriptor(tuple(med.get("coefficients", [DEFAULT_COEFFICIENT[model]])))
    except ValueError as exc:
        raise ConfigInvalid(f"media: {exc}") from None
    contrast = med.get("contrast", True)

    src = raw.get("source", {})
    source = BumpProfile2D(Point2(*src.get("center", corpus.SOURCE_CENTER)),
                           float(src.get("radius", corpus.SOURCE_RADIUS)),
                           _complex(src.get("amplitude", 1.0)))
    pulse = None
    if "pulse" in raw:
        pulse = BumpProfile1D(float(raw["pulse"]["center"]), float(raw["pulse"]["half_width"]))

    grid = raw.get("grid", {})
    tm = raw.get("time", {})
    fr = raw.get("frequency", {})
    hh = raw.get("helmholtz", {})
    cfg = ExperimentConfig(
        raw=copy.deepcopy(raw), model=model, kind=kind, polygon=poly, descriptor=desc,
        contrast=contrast, source=source, pulse=pulse,
        spacing=float(grid.get("spacing", DEFAULT_SPACING[model])),
        record_radius=float(raw.get("record_radius", corpus.RECORD_RADIUS)),
        T=tm.get("T"), dt=tm.get("dt"), snapshot_stride=tm.get("snapshot_stride"), box=tm.get("box"),
        s_values=tuple(float(s) for s in fr["s"]) if "s" in fr else None,
        method=fr.get("method", "direct_iterative"), tol=float(fr.get("tol", 1e-8)),
        k=float(hh.get("k", 4.0)), direction=float(hh.get("direction", 0.0)),
        n_directions=int(hh.get("n_directions", 128)),
        eps=float(geo.get("eps", 0.1)), seed=int(raw.get("seed", 0)),
        output_dir=raw.get("output_dir", "polyscat_out"),
        lemma=exp.get("lemma"), sweep_param=exp.get("param"),
        sweep_values=tuple(exp.get("values", ())), factor=float(exp.get("factor", 10.0)))
    _check_physics(cfg)

    if kind == "verify_lemma":
        from .lemmas import REGISTRY

        if cfg.lemma not in REGISTRY:
            raise ConfigInvalid(f"experiment.lemma: unknown lemma {cfg.lemma!r}; "
                                f"known: {sorted(REGISTRY)}")
    if kind == "distinguish":
        if "setup_b" not in exp:
            raise ConfigInvalid("experiment.setup_b is required for distinguish")
        merged = _deep_merge({k: v for k, v in raw.items() if k != "experiment"}, exp["setup_b"])
        cfg.setup_b = parse_config(merged)
        if cfg.setup_b.model != model:
            raise ConfigInvalid("distinguish: both setups must use the same model")
    if kind == "sweep" and (cfg.sweep_param is None or not cfg.sweep_values):
        raise ConfigInvalid("sweep needs experiment.param and experiment.values")
    return cfg


def _deep_merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _deep_merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def _check_physics(cfg: ExperimentConfig) -> None:
    poly, src, R = cfg.polygon, cfg.source, cfg.record_radius
    try:
        cfg.coefficient_field()
    except PolyscatError as exc:
        raise ConfigInvalid(f"media: {exc}") from None

    far = float(np.max(np.hypot(*poly.as_array().T)))
    if far >= R:
        raise ConfigInvalid(f"polygon reaches radius {far:.3g}, outside the recording circle R={R}")
    if cfg.model != "helmholtz":
        # supp f (or supp u0) must stay in B_R and away from the closed scatterer
        if contains(poly, src.center) != OUTSIDE or poly.distance_to(src.center) <= src.radius:
            raise ConfigInvalid("source support intersects the scatterer")
        if np.hypot(src.center.x, src.center.y) + src.radius >= R:
            raise ConfigInvalid("source support leaves the recording disk")
        if 2 * src.radius / cfg.spacing < MIN_CELLS_ACROSS_BUMP:
            raise ConfigInvalid(f"grid.spacing {cfg.spacing} resolves the source with fewer than "
                                f"{MIN_CELLS_ACROSS_BUMP} cells")
    if cfg.pulse is not None:
        lo, hi = cfg.pulse.support
        if lo <= 0 or (cfg.T is not None and hi >= cfg.T):
            raise ConfigInvalid("pulse support must lie inside (0, time.T)")
    if cfg.s_values is not None and min(cfg.s_values) <= 0:
        raise ConfigInvalid("frequency.s values must be positive")
    if cfg.model == "helmholtz" and cfg.k * cfg.spacing > 0.5:
        raise ConfigInvalid("grid.spacing too coarse for the wavenumber (k h > 0.5)")
    if cfg.box is not None and cfg.box <= R:
        raise ConfigInvalid("time.box must exceed the recording radius")
    if cfg.dt is not None and cfg.T is not None and cfg.dt > cfg.T:
        raise ConfigInvalid("time.dt exceeds time.T")


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text())
    except FileNotFoundError:
        raise ConfigInvalid(f"{path}: no such config file") from None
    except yaml.YAMLError as exc:
        raise ConfigInvalid(f"{path}: YAML parse error: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigInvalid(f"{path}: top level must be a mapping")
    return parse_config(raw)


def default_config(model: str, **over) -> ExperimentConfig:
    raw: dict = {"model": model}
    for k, v in over.items():
        raw[k] = v
    return parse_config(raw)
