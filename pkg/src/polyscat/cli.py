"""``polyscat`` command line.

Exit codes: 0 all contracts pass, 1 contract failure, 2 config error, 3 runtime error.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__
from .errors import ConfigInvalid, PolyscatError

PASS, CONTRACT_FAILURE, CONFIG_ERROR, RUNTIME_ERROR = 0, 1, 2, 3


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="polyscat", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"polyscat {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="execute an experiment config")
    r.add_argument("config", type=Path)
    r.add_argument("--out", type=Path, help="output directory (overrides output_dir)")

    v = sub.add_parser("verify", help="run one named lemma check")
    v.add_argument("lemma")
    v.add_argument("--config", type=Path, help="model config (default instance if omitted)")
    v.add_argument("--out", type=Path, help="write a manifest into this directory")

    d = sub.add_parser("distinguish", help="boundary-data gap between two configs")
    d.add_argument("config_a", type=Path)
    d.add_argument("config_b", type=Path)
    d.add_argument("--factor", type=float, default=10.0, help="required gap / noise floor")
    d.add_argument("--out", type=Path)

    e = sub.add_parser("export", help="convert a stored artifact")
    e.add_argument("artifact", type=Path)
    e.add_argument("--format", required=True, choices=("csv", "json", "bin"))
    e.add_argument("--out", type=Path, help="destination file")

    sub.add_parser("lemmas", help="list the lemma registry")
    return p


def _report(checks, out: Path | None, cfg=None) -> int:
    for c in checks:
        print(c.line())
    passed = all(c.passed for c in checks)
    if out is not None:
        from . import harness, io as pio
        from .pipelines import _jsonable

        out.mkdir(parents=True, exist_ok=True)
        pio.write_json({"config": _jsonable(cfg.raw) if cfg is not None else None,
                        "versions": harness.versions(),
                        "checks": [c.to_record() for c in checks], "artifacts": [],
                        "passed": passed}, out / harness.MANIFEST)
    return PASS if passed else CONTRACT_FAILURE


def _dispatch(args) -> int:
    from . import harness, lemmas
    from .config import load_config

    if args.command == "lemmas":
        for name, lem in lemmas.REGISTRY.items():
            print(f"{name:22s} {lem.model or '-':12s} {lem.summary}")
        return PASS

    if args.command == "export":
        from . import io as pio

        dest = pio.export(args.artifact, args.format, args.out)
        print(dest)
        return PASS

    try:
        workers = harness.worker_count()
    except ValueError as exc:
        raise ConfigInvalid(str(exc)) from None

    if args.command == "run":
        cfg = load_config(args.config)
        manifest, passed = harness.run(cfg, args.out, workers)
        for rec in manifest["checks"]:
            print(f"[{'PASS' if rec['passed'] else 'FAIL'}] {rec['name']}")
        print(f"manifest: {Path(args.out or cfg.output_dir) / harness.MANIFEST}")
        return PASS if passed else CONTRACT_FAILURE

    if args.command == "verify":
        cfg = load_config(args.config) if args.config else None
        with harness.stage(f"verify:{args.lemma}", {}):
            chk = lemmas.verify(args.lemma, cfg)
        return _report([chk], args.out, cfg)

    # distinguish
    a, b = load_config(args.config_a), load_config(args.config_b)
    if a.model != b.model:
        raise ConfigInvalid(f"cannot compare a {a.model} config with a {b.model} config")
    a.factor = args.factor
    with harness.stage("distinguish", {}):
        chk = harness._distinguish(a, b)
    return _report([chk], args.out, a)


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return _dispatch(args)
    except ConfigInvalid as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return CONFIG_ERROR
    except (PolyscatError, OSError, FloatingPointError, RuntimeError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return RUNTIME_ERROR


if __name__ == "__main__":
    sys.exit(main())
