"""Artifact formats: recording/far-field CSV, PSF1 binary grids, JSON sidecars, manifests.

PSF1 layout (little endian)::

    magic  4s   b"PSF1"
    nx     u4
    ny     u4
    dx     f8
    x0, y0 f8 f8   (origin)
    dtype  u1   0 = float64, 1 = complex128
    pad    3x
    values nx*ny items in row-major order of the [ix, iy] array

All writers produce byte-identical output for identical inputs.
"""
from __future__ import annotations

import csv
import hashlib
import io as _io
import json
import os
import struct
import tempfile
from pathlib import Path
from typing import Any

import numpy as np

from .frequency import FarField
from .media import Grid2D
from .timedomain import BoundaryRecording

MAGIC = b"PSF1"
_HEADER = struct.Struct("<4sIIdddB3x")
_DTYPES = {0: np.dtype("<f8"), 1: np.dtype("<c16")}
RECORDING_COLUMNS = ("t", "angle_index", "re_u", "im_u", "re_dnu", "im_dnu")
FARFIELD_COLUMNS = ("angle", "re", "im")


class IoError(OSError):
    pass


def _fmt(x: float) -> str:
    return repr(float(x))


def _atomic_write(path: Path, data: bytes) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def recording_to_csv(rec: BoundaryRecording, path) -> Path:
    """One row per (time, angle) with columns t, angle_index, Re u, Im u, Re d_nu u, Im d_nu u."""
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RECORDING_COLUMNS)
    u, d = np.asarray(rec.u_values, complex), np.asarray(rec.dnu_values, complex)
    for k, t in enumerate(rec.times):
        for a in range(len(rec.angles)):
            w.writerow([_fmt(t), a, _fmt(u[a, k].real), _fmt(u[a, k].imag),
                        _fmt(d[a, k].real), _fmt(d[a, k].imag)])
    _atomic_write(path, buf.getvalue().encode())
    return Path(path)


def read_recording_csv(path, radius: float = float("nan")) -> BoundaryRecording:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    with open(path) as fh:
        header = tuple(fh.readline().strip().split(","))
    if header != RECORDING_COLUMNS:
        raise IoError(f"{path}: not a boundary recording (header {header})")
    times = np.unique(data[:, 0])
    n_angles = int(data[:, 1].max()) + 1
    u = (data[:, 2] + 1j * data[:, 3]).reshape(len(times), n_angles).T
    d = (data[:, 4] + 1j * data[:, 5]).reshape(len(times), n_angles).T
    angles = 2 * np.pi * np.arange(n_angles) / n_angles
    return BoundaryRecording(radius, angles, times, u, d)


def farfield_to_csv(ff: FarField, path) -> Path:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(FARFIELD_COLUMNS)
    for a, v in zip(ff.directions, ff.values):
        w.writerow([_fmt(a), _fmt(np.real(v)), _fmt(np.imag(v))])
    _atomic_write(path, buf.getvalue().encode())
    return Path(path)


def read_farfield_csv(path, k: float = float("nan")) -> FarField:
    with open(path) as fh:
        header = tuple(fh.readline().strip().split(","))
    if header != FARFIELD_COLUMNS:
        raise IoError(f"{path}: not a far-field table (header {header})")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return FarField(k, data[:, 0], data[:, 1] + 1j * data[:, 2])


def grid_to_bytes(grid: Grid2D) -> bytes:
    if grid.values is None:
        raise IoError("grid has no values")
    vals = np.asarray(grid.values)
    code = 1 if np.iscomplexobj(vals) else 0
    head = _HEADER.pack(MAGIC, grid.nx, grid.ny, grid.spacing, grid.origin.x, grid.origin.y, code)
    return head + np.ascontiguousarray(vals, dtype=_DTYPES[code]).tobytes(order="C")


def grid_from_bytes(data: bytes) -> Grid2D:
    if len(data) < _HEADER.size:
        raise IoError("truncated PSF1 header")
    magic, nx, ny, dx, x0, y0, code = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise IoError(f"bad magic {magic!r}")
    if code not in _DTYPES:
        raise IoError(f"unknown dtype code {code}")
    body = np.frombuffer(data, dtype=_DTYPES[code], offset=_HEADER.size)
    if body.size != nx * ny:
        raise IoError(f"expected {nx * ny} values, found {body.size}")
    return Grid2D((x0, y0), dx, nx, ny, body.reshape(nx, ny).copy())


def write_grid(grid: Grid2D, path) -> Path:
    _atomic_write(path, grid_to_bytes(grid))
    return Path(path)


def read_grid(path) -> Grid2D:
    return grid_from_bytes(Path(path).read_bytes())


def dumps(obj: Any) -> str:
    """Canonical JSON (sorted keys, fixed separators) for hash-stable output."""
    return json.dumps(obj, sort_keys=True, indent=1, separators=(",", ": "), allow_nan=True)


def write_json(obj: Any, path) -> Path:
    _atomic_write(path, (dumps(obj) + "\n").encode())
    return Path(path)


def write_spectral_field(field_, path, residual: float | None = None) -> tuple[Path, Path]:
    """Binary grid plus ``<path>.json`` sidecar with s, source metadata, residual and tail bound."""
    from .pipelines import _jsonable

    path = Path(path)
    write_grid(field_.grid, path)
    meta = dict(field_.source_meta)
    side = {"s": float(field_.s), "source_meta": _jsonable(meta), "residual": residual,
            "tail_bound": _jsonable(meta.get("tail_bound"))}
    sidecar = path.with_suffix(path.suffix + ".json")
    write_json(side, sidecar)
    return path, sidecar


def sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def grid_to_csv(grid: Grid2D, path) -> Path:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("x", "y", "re", "im"))
    X, Y = grid.mesh()
    v = np.asarray(grid.values, dtype=complex)
    for x, y, z in zip(X.ravel(), Y.ravel(), v.ravel()):
        w.writerow([_fmt(x), _fmt(y), _fmt(z.real), _fmt(z.imag)])
    _atomic_write(path, buf.getvalue().encode())
    return Path(path)


def grid_to_json(grid: Grid2D, path) -> Path:
    v = np.asarray(grid.values)
    obj = {"nx": grid.nx, "ny": grid.ny, "spacing": grid.spacing,
           "origin": [grid.origin.x, grid.origin.y]}
    if np.iscomplexobj(v):
        obj["re"], obj["im"] = v.real.tolist(), v.imag.tolist()
    else:
        obj["values"] = v.tolist()
    return write_json(obj, path)


def export(src, fmt: str, dest=None) -> Path:
    """Convert a stored artifact to ``csv``, ``json`` or ``bin``."""
    src = Path(src)
    if fmt not in ("csv", "json", "bin"):
        raise IoError(f"unknown format {fmt!r}")
    if not src.exists():
        raise IoError(f"{src}: no such artifact")
    dest = Path(dest) if dest else src.with_suffix({"csv": ".csv", "json": ".json", "bin": ".psf"}[fmt])
    if dest.resolve() == src.resolve():
        raise IoError("export would overwrite its source")
    if src.read_bytes()[:4] == MAGIC:
        grid = read_grid(src)
        if fmt == "bin":
            return write_grid(grid, dest)
        return grid_to_csv(grid, dest) if fmt == "csv" else grid_to_json(grid, dest)
    with open(src) as fh:
        header = tuple(fh.readline().strip().split(","))
    if header == RECORDING_COLUMNS:
        rec = read_recording_csv(src)
        if fmt == "csv":
            return recording_to_csv(rec, dest)
        if fmt == "json":
            return write_json({"times": rec.times.tolist(), "angles": rec.angles.tolist(),
                               "re_u": rec.u_values.real.tolist(), "im_u": rec.u_values.imag.tolist(),
                               "re_dnu": rec.dnu_values.real.tolist(),
                               "im_dnu": rec.dnu_values.imag.tolist()}, dest)
        raise IoError("boundary recordings export to csv or json only")
    if header == FARFIELD_COLUMNS:
        ff = read_farfield_csv(src)
        if fmt == "csv":
            return farfield_to_csv(ff, dest)
        if fmt == "json":
            return write_json({"angle": ff.directions.tolist(), "re": ff.values.real.tolist(),
                               "im": ff.values.imag.tolist()}, dest)
        raise IoError("far fields export to csv or json only")
    raise IoError(f"{src}: unrecognized artifact")
