import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polyscat import io as pio
from polyscat.frequency import FarField
from polyscat.laplace import SpectralField
from polyscat.media import Grid2D
from polyscat.timedomain import BoundaryRecording


def test_psf1_header_layout():
    g = Grid2D((-1.0, 0.5), 0.25, 3, 2, np.arange(6.0).reshape(3, 2))
    data = pio.grid_to_bytes(g)
    assert data[:4] == b"PSF1"
    nx, ny, dx, x0, y0, code = struct.unpack_from("<IIdddB", data, 4)
    assert (nx, ny, dx, x0, y0, code) == (3, 2, 0.25, -1.0, 0.5, 0)
    body = np.frombuffer(data[40:], "<f8")
    assert body.tolist() == [0.0, 1.0, 2.0, 3.0, 4.0, 5.0]


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 12), st.integers(2, 12), st.booleans(), st.integers(0, 2 ** 32 - 1))
def test_psf1_roundtrip(nx, ny, cplx, seed):
    rng = np.random.default_rng(seed)
    v = rng.standard_normal((nx, ny))
    if cplx:
        v = v + 1j * rng.standard_normal((nx, ny))
    g = Grid2D((rng.uniform(-3, 3), rng.uniform(-3, 3)), rng.uniform(0.01, 1), nx, ny, v)
    back = pio.grid_from_bytes(pio.grid_to_bytes(g))
    assert back.same_geometry(g)
    assert np.array_equal(back.values, v)


def test_psf1_rejects_garbage():
    with pytest.raises(pio.IoError):
        pio.grid_from_bytes(b"NOPE" + bytes(40))
    g = Grid2D((0, 0), 1.0, 2, 2, np.zeros((2, 2)))
    with pytest.raises(pio.IoError):
        pio.grid_from_bytes(pio.grid_to_bytes(g)[:-8])


def _recording():
    rng = np.random.default_rng(1)
    u = rng.standard_normal((64, 3)) + 1j * rng.standard_normal((64, 3))
    return BoundaryRecording(2.0, 2 * np.pi * np.arange(64) / 64, np.array([0.0, 0.5, 1.0]), u, 3 * u)


def test_recording_csv(tmp_path):
    rec = _recording()
    p = pio.recording_to_csv(rec, tmp_path / "rec.csv")
    lines = p.read_text().splitlines()
    assert lines[0] == "t,angle_index,re_u,im_u,re_dnu,im_dnu"
    assert len(lines) == 1 + 64 * 3
    t, a, ru, iu, rd, idn = lines[2].split(",")
    assert (float(t), int(a)) == (0.0, 1)
    assert complex(float(ru), float(iu)) == rec.u_values[1, 0]
    back = pio.read_recording_csv(p, radius=2.0)
    assert np.array_equal(back.u_values, rec.u_values)
    assert np.array_equal(back.dnu_values, rec.dnu_values)


def test_far_field_csv(tmp_path):
    ff = FarField(4.0, np.linspace(0, 2 * np.pi, 8, endpoint=False), np.arange(8) * (1 + 2j))
    p = pio.farfield_to_csv(ff, tmp_path / "ff.csv")
    assert p.read_text().splitlines()[0] == "angle,re,im"
    assert np.array_equal(pio.read_farfield_csv(p).values, ff.values)


def test_outputs_are_bit_stable(tmp_path):
    rec = _recording()
    a = pio.recording_to_csv(rec, tmp_path / "a.csv")
    b = pio.recording_to_csv(rec, tmp_path / "b.csv")
    assert pio.sha256(a) == pio.sha256(b)
    g = Grid2D((0, 0), 0.5, 3, 3, np.ones((3, 3)))
    f = SpectralField(2.0, g, {"method": "neumann", "tail_bound": 1e-9})
    p1, s1 = pio.write_spectral_field(f, tmp_path / "f1.psf", residual=1e-7)
    p2, s2 = pio.write_spectral_field(f, tmp_path / "f2.psf", residual=1e-7)
    assert pio.sha256(p1) == pio.sha256(p2) and pio.sha256(s1) == pio.sha256(s2)
    side = __import__("json").loads(s1.read_text())
    assert side["s"] == 2.0 and side["residual"] == 1e-7 and side["tail_bound"] == 1e-9


def test_export_conversions(tmp_path):
    g = Grid2D((0, 0), 0.5, 2, 3, np.arange(6.0).reshape(2, 3) * 1j)
    src = pio.write_grid(g, tmp_path / "g.psf")
    csv = pio.export(src, "csv")
    assert csv.read_text().splitlines()[0] == "x,y,re,im"
    js = pio.export(src, "json")
    assert __import__("json").loads(js.read_text())["im"][1] == [3.0, 4.0, 5.0]
    rec = pio.recording_to_csv(_recording(), tmp_path / "rec.csv")
    assert pio.export(rec, "json").exists()
    with pytest.raises(pio.IoError):
        pio.export(rec, "bin")
    with pytest.raises(pio.IoError):
        pio.export(src, "bin")  # would overwrite itself
    with pytest.raises(pio.IoError):
        pio.export(tmp_path / "missing.psf", "csv")
