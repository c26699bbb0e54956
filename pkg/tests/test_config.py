from importlib import resources

import pytest
import yaml

from polyscat.config import load_config, parse_config
from polyscat.errors import ConfigInvalid


def _cfg(**kw):
    raw = {"model": "wave"}
    raw.update(kw)
    return raw


def test_shipped_configs_load():
    root = resources.files("polyscat") / "configs"
    names = sorted(p.name for p in root.iterdir() if p.name.endswith(".yaml"))
    assert names
    for name in names:
        cfg = load_config(root / name)
        assert cfg.model in ("wave", "schrodinger", "helmholtz")


def test_defaults():
    cfg = parse_config({"model": "wave"})
    assert cfg.kind == "simulate_wave"
    prob = cfg.problem()
    assert prob.c_field.inv_c2_at(0.3, 0.0) == pytest.approx(4.0)
    assert prob.f.radius == pytest.approx(0.4)


@pytest.mark.parametrize("raw,needle", [
    ({"model": "acoustic"}, "model"),
    (_cfg(grid={"spacing": -1}), "spacing"),
    (_cfg(grid={"spacing": 0.025, "nx": 5}), "Additional properties"),
    (_cfg(source={"center": [0.2, 0.0], "radius": 0.3}), "intersects the scatterer"),
    (_cfg(source={"center": [-1.8, 0.0], "radius": 0.4}), "recording disk"),
    (_cfg(media={"coefficients": [-1.0]}), "positive"),
    (_cfg(geometry={"vertices": [[0, 0], [2, 0], [1, 0.5], [2, 2], [0, 2]]}), "geometry"),
    (_cfg(geometry={"shape": "triangle", "vertices": [[0, 0], [1, 0], [0, 1]]}), "either"),
    (_cfg(grid={"spacing": 0.2}), "cells"),
    (_cfg(pulse={"center": 0.1, "half_width": 0.5}), "pulse"),
    (_cfg(frequency={"s": [1.0, -2.0]}), "positive"),
    (_cfg(experiment={"kind": "verify_lemma", "lemma": "nonsense"}), "unknown lemma"),
    (_cfg(experiment={"kind": "distinguish"}), "setup_b"),
    (_cfg(experiment={"kind": "simulate_helmholtz"}), "does not match"),
    ({"model": "schrodinger", "media": {"coefficients": [0.2, 1.0]}}, "vanishes"),
    ({"model": "helmholtz", "media": {"coefficients": [1.0]}}, "equals 1"),
    ({"model": "helmholtz", "helmholtz": {"k": 50.0}, "grid": {"spacing": 0.05}}, "coarse"),
])
def test_rejections(raw, needle):
    with pytest.raises(ConfigInvalid, match=needle):
        parse_config(raw)


def test_distinguish_setup_b_merges():
    cfg = parse_config(_cfg(experiment={"kind": "distinguish", "setup_b": {"geometry": {"shape": "square"}}},
                            media={"coefficients": [4.2]}))
    assert len(cfg.setup_b.polygon.vertices) == 4
    assert cfg.setup_b.descriptor.coefficients[0] == pytest.approx(4.2)


def test_yaml_errors(tmp_path):
    p = tmp_path / "bad.yaml"
    p.write_text("model: [wave\n")
    with pytest.raises(ConfigInvalid, match="YAML"):
        load_config(p)
    p.write_text(yaml.safe_dump(["model", "wave"]))
    with pytest.raises(ConfigInvalid, match="mapping"):
        load_config(p)
    with pytest.raises(ConfigInvalid, match="no such"):
        load_config(tmp_path / "missing.yaml")


def test_overrides_revalidate():
    cfg = parse_config({"model": "wave"})
    assert cfg.with_overrides(**{"media.coefficients": [3.0]}).descriptor.coefficients[0] == 3.0
    with pytest.raises(ConfigInvalid):
        cfg.with_overrides(**{"source.center": [0.3, 0.0]})
