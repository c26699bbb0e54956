import pytest

from polyscat import lemmas
from polyscat.config import parse_config
from polyscat.errors import ConfigInvalid

NAMES = {"energy_growth", "laplace_bound", "exterior_vanishing", "schrodinger_growth", "corner_blowup",
         "corner_dominance", "neumann_contraction", "sector_obstruction", "plane_wave_pairing",
         "mass_conservation"}


def test_registry_names():
    assert NAMES <= set(lemmas.REGISTRY)


def test_model_mismatch_rejected():
    with pytest.raises(ConfigInvalid):
        lemmas.verify("schrodinger_growth", parse_config({"model": "wave"}))


def test_schrodinger_growth_default():
    chk = lemmas.verify("schrodinger_growth")
    assert chk.passed
    assert chk.metrics["max_relative_increase"] <= 1e-8


def test_plane_wave_pairing_short_run():
    cfg = parse_config({"model": "wave", "time": {"T": 10.0}})
    chk = lemmas.verify("plane_wave_pairing", cfg)
    assert chk.passed
    assert chk.metrics["max_rel_err"] <= 0.05


def test_kernel_identities():
    chk = lemmas.verify("kernel_identities")
    assert chk.passed


def test_explicit_knobs_override_defaults():
    cfg = parse_config({"model": "wave", "grid": {"spacing": 0.05}})
    assert lemmas._knobs(cfg, spacing=("grid", "spacing"), T=("time", "T")) == {"spacing": 0.05}
