"""Config-driven runner: executes an experiment, writes artifacts and the run manifest."""
from __future__ import annotations

import logging
import os
import platform
import time
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from . import frequency as fq
from . import io as pio
from . import laplace as lp
from . import lemmas
from . import pipelines as pl
from . import timedomain as td
from ._ext import BACKEND
from .config import ExperimentConfig, parse_config
from .errors import ConfigInvalid, PolyscatError, StageFailed
from .pipelines import Check

log = logging.getLogger(__name__)

MANIFEST = "manifest.json"


def worker_count() -> int:
    """Pool size from ``POLYSCAT_WORKERS`` (default 1, meaning in-process)."""
    raw = os.environ.get("POLYSCAT_WORKERS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"POLYSCAT_WORKERS must be an integer, got {raw!r}") from None
    return max(1, n)


@contextmanager
def stage(name: str, timings: dict):
    t0 = time.perf_counter()
    try:
        yield
    except (StageFailed, ConfigInvalid):
        raise
    except (PolyscatError, FloatingPointError, np.linalg.LinAlgError) as exc:
        raise StageFailed(name, exc) from exc
    finally:
        timings[name] = time.perf_counter() - t0


# ---------------------------------------------------------------- simulations
# Each returns (checks, artifacts) where artifacts maps a file name to an object
# the parent process serializes. Tasks are pure functions of the config.

def _final_snapshot(sol) -> "pio.Grid2D":
    return sol.window.with_values(np.asarray(sol.snapshots[-1]))


def simulate_wave(cfg: ExperimentConfig):
    prob = cfg.problem()
    T = cfg.T or 8.0
    sol, rec = pl.wave_run(prob, cfg.spacing, T, snapshot_stride=cfg.snapshot_stride or 10)
    src = prob.f
    dist = prob.record_radius - (np.hypot(src.center.x, src.center.y) + src.radius)
    t_arr = prob.g.support[0] + dist / prob.c_field.max_value()
    pre = rec.times < t_arr - 0.2
    peak = float(np.max(np.abs(sol.snapshots)))
    silent = float(np.max(np.abs(rec.u_values[:, pre]))) / peak if pre.any() else 0.0
    checks = [Check("pre_arrival_silence", silent <= 1e-10,
                    {"max_rel_trace": silent, "t_arrival": t_arr, "tol": 1e-10})]
    arts = {"recording.csv": rec, "u_final.psf": _final_snapshot(sol)}
    for s in cfg.s_values or ():
        fld = lp.laplace_field(sol, s, lp.WAVE_T2)
        model = lp.WaveModel(prob.c_field, prob.f, prob.g.laplace(s))
        mask = fld.grid.disk_mask(prob.record_radius)
        arts[f"u_hat_s{s:g}.psf"] = (fld, lp.frequency_residual(fld, model, mask))
    return checks, arts


def simulate_schrodinger(cfg: ExperimentConfig):
    prob = cfg.problem()
    sol, rec = pl.schrodinger_run(prob, cfg.spacing, cfg.dt or 1e-3, cfg.T or 4.0, cfg.box or 8.0,
                                  snapshot_stride=cfg.snapshot_stride or 10)
    t, m = td.mass_curve(sol).T
    inc = float(np.max(np.diff(m)) / m[0]) if len(m) > 1 else 0.0
    checks = [Check("mass_non_increasing", inc <= 1e-8, {"max_relative_increase": inc, "tol": 1e-8})]
    arts = {"recording.csv": rec, "u_final.psf": _final_snapshot(sol)}
    for s in cfg.s_values or ():
        fld = lp.laplace_field(sol, s, lp.SCHRODINGER_LINEAR)
        model = lp.SchrodingerModel(prob.q_field, prob.u0)
        mask = fld.grid.disk_mask(prob.record_radius)
        arts[f"u_hat_s{s:g}.psf"] = (fld, lp.frequency_residual(fld, model, mask))
    return checks, arts


def simulate_helmholtz(cfg: ExperimentConfig):
    prob = cfg.problem()
    v = prob.polygon.as_array()
    m = 0.1
    grid = pio.Grid2D.covering(v[:, 0].min() - m, v[:, 0].max() + m, v[:, 1].min() - m,
                               v[:, 1].max() + m, cfg.spacing)
    kernel = fq.Kernel(fq.HELMHOLTZ, prob.k)
    drive = fq.IncidentField.plane_wave(prob.k, prob.direction)
    sol = fq.lippmann_schwinger_solve(kernel, prob.n_field, drive, grid, cfg.method, tol=cfg.tol)
    ff = fq.far_field(prob.n_field, sol, prob.k, cfg.n_directions)
    res = float(sol.source_meta["residual"])
    checks = [Check("ls_residual", res <= cfg.tol, {"residual": res, "tol": cfg.tol})]
    return checks, {"far_field.csv": ff, "u_total.psf": (sol, res)}


SIMULATE = {"wave": simulate_wave, "schrodinger": simulate_schrodinger, "helmholtz": simulate_helmholtz}


def _distinguish(cfg: ExperimentConfig, b: ExperimentConfig) -> Check:
    kw = {"factor": cfg.factor}
    if "spacing" in cfg.raw.get("grid", {}):
        kw["spacing"] = cfg.spacing
    if cfg.model == "wave":
        return pl.distinguish_wave(cfg.problem(), b.problem(), **kw)
    if cfg.model == "schrodinger":
        return pl.distinguish_schrodinger(cfg.problem(), b.problem(), **kw)
    return pl.distinguish_helmholtz(cfg.problem(), b.problem(), **kw)


def _sweep_task(raw: dict):
    cfg = parse_config(raw)
    return SIMULATE[cfg.model](cfg)


def _sweep_raw(cfg: ExperimentConfig, value: float) -> dict:
    raw = {k: v for k, v in cfg.raw.items() if k != "experiment"}
    raw = {**raw, "experiment": {"kind": f"simulate_{cfg.model}"}}
    if cfg.sweep_param == "contrast":
        raw["media"] = {**raw.get("media", {}), "coefficients": [value]}
    elif cfg.sweep_param == "spacing":
        raw["grid"] = {**raw.get("grid", {}), "spacing": value}
    else:
        raw["helmholtz"] = {**raw.get("helmholtz", {}), "k": value}
    return raw


def execute(cfg: ExperimentConfig, workers: int = 1, timings: dict | None = None):
    """Run the experiment. Returns ``(checks, artifacts)``."""
    timings = {} if timings is None else timings
    kind = cfg.kind
    if kind.startswith("simulate_"):
        with stage(kind, timings):
            return SIMULATE[cfg.model](cfg)
    if kind == "laplace_bridge":
        if cfg.model not in lemmas.BRIDGES:
            raise StageFailed(kind, ValueError("laplace bridge needs a wave or schrodinger model"))
        with stage(kind, timings):
            kw = {"s_values": cfg.s_values} if cfg.s_values else {}
            return [lemmas.BRIDGES[cfg.model](cfg.problem(), **kw)], {}
    if kind == "verify_lemma":
        with stage(f"verify:{cfg.lemma}", timings):
            return [lemmas.verify(cfg.lemma, cfg)], {}
    if kind == "distinguish":
        with stage("distinguish", timings):
            return [_distinguish(cfg, cfg.setup_b)], {}
    # sweep: independent tasks, merged by index
    raws = [_sweep_raw(cfg, v) for v in cfg.sweep_values]
    checks, arts = [], {}
    with stage("sweep", timings):
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as ex:
                results = list(ex.map(_sweep_task, raws))
        else:
            results = [_sweep_task(r) for r in raws]
    for i, (value, (c, a)) in enumerate(zip(cfg.sweep_values, results)):
        for chk in c:
            chk.name = f"{chk.name}[{cfg.sweep_param}={value:g}]"
            checks.append(chk)
        arts.update({f"sweep{i:03d}_{name}": obj for name, obj in a.items()})
    return checks, arts


def write_artifact(name: str, obj, out: Path) -> list[Path]:
    path = out / name
    if isinstance(obj, td.BoundaryRecording):
        return [pio.recording_to_csv(obj, path)]
    if isinstance(obj, fq.FarField):
        return [pio.farfield_to_csv(obj, path)]
    if isinstance(obj, tuple) and isinstance(obj[0], lp.SpectralField):
        return list(pio.write_spectral_field(obj[0], path, residual=float(obj[1])))
    return [pio.write_grid(obj, path)]


def versions() -> dict:
    return {"polyscat": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
            "python": platform.python_version(), "leapfrog_backend": BACKEND}


def run(cfg: ExperimentConfig, out_dir=None, workers: int | None = None) -> tuple[dict, bool]:
    """Execute ``cfg`` and write artifacts plus ``manifest.json`` into the output directory."""
    out = Path(out_dir or cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    workers = worker_count() if workers is None else workers
    timings: dict[str, float] = {}
    checks, arts = execute(cfg, workers, timings)
    files = []
    for name in sorted(arts):
        files.extend(write_artifact(name, arts[name], out))
    passed = all(c.passed for c in checks)
    manifest = {
        "config": pl._jsonable(cfg.raw),
        "versions": versions(),
        "created": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "timings": timings,
        "checks": [c.to_record() for c in checks],
        "artifacts": [{"path": p.name, "sha256": pio.sha256(p)} for p in files],
        "passed": passed,
    }
    pio.write_json(manifest, out / MANIFEST)
    return manifest, passed
