from pathlib import Path

import numpy as np
import pytest
import yaml

from qboxbloch import models
from qboxbloch.config import ConfigError, dump_config, load_config, parse_config

SCENARIOS = sorted((Path(__file__).parents[1] / "scenarios").glob("*.yaml"))

MINIMAL = {
    "model": "one_species",
    "system": {"energies": [0.0, 1.0]},
    "stepper": {"method": "unitary_midpoint", "dt": 0.1, "t_end": 1.0},
}


def with_changes(base=MINIMAL, **sections):
    raw = yaml.safe_load(yaml.safe_dump(base))
    for key, value in sections.items():
        raw[key] = value
    return raw


@pytest.mark.parametrize("path", SCENARIOS, ids=lambda p: p.stem)
def test_round_trip_idempotent(path):
    first = dump_config(load_config(path))
    assert dump_config(parse_config(yaml.safe_load(first))) == first


def test_defaults_filled_in():
    cfg = parse_config(with_changes())
    assert cfg.output == {"path": "trajectory.csv", "precision": 17}
    assert cfg.initial_state == {"preset": "ground"}
    assert cfg.stepper["t_start"] == 0.0 and cfg.stepper["record_every"] == 1
    np.testing.assert_array_equal(cfg.build_initial(), np.diag([1.0, 0.0]))


def test_complex_and_real_scalars_accepted():
    sys = {"energies": [0.0, 1.0],
           "dipole": [[[0, 0, 0], [[0.5, 0.1], 0, 0]], [[[0.5, -0.1], 0, 0], [0, 0, 0]]]}
    cfg = parse_config(with_changes(system=sys))
    assert cfg.system["dipole"][0][1][0] == [0.5, 0.1]
    assert cfg.build_system().dipole[1, 0, 0] == 0.5 - 0.1j


@pytest.mark.parametrize("changes, message", [
    (dict(model="three_species"), "model"),
    (dict(system={"energies": "abc"}), "system.energies"),
    (dict(system={"energies": [0.0, 1.0], "dipole": [[[0, 0, 0]]]}), "system.dipole"),
    (dict(system={"energies": [0.0, 1.0], "dipole": [[[1, 0, 0], [0, 0, 0]], [[0, 0, 0], [0, 0, 0]]]}),
     "M_kk = 0"),
    (dict(system={"energies": [0.0, 1.0], "hbar": -1}), "hbar"),
    (dict(stepper={"method": "euler", "dt": 0.1, "t_end": 1.0}), "stepper"),
    (dict(stepper={"dt": 0.1}), "stepper.t_end"),
    (dict(initial_state={"preset": "diagonal", "populations": [1.0]}), "populations"),
    (dict(initial_state={"preset": "diagonal", "populations": [1.5, 0.0]}), "initial_state"),
    (dict(initial_state={"preset": "weird"}), "preset"),
    (dict(field={"pulses": [{"amplitude": [1, 0]}]}), "amplitude"),
    (dict(field={"pulses": [{"amplitude": [1, 0, 0], "envelope": {"kind": "gaussian",
                                                                   "center": 0, "width": 0}}]}), "width"),
    (dict(output={"precision": 30}), "precision"),
    (dict(extra=1), "unknown"),
])
def test_validation_errors_name_the_field(changes, message):
    with pytest.raises(ConfigError, match=message):
        parse_config(with_changes(**changes))


def test_degenerate_models_need_degeneracies():
    with pytest.raises(ConfigError, match="degeneracies"):
        parse_config(with_changes(model="degenerate_cdb"))
    with pytest.raises(ConfigError, match="degeneracies"):
        parse_config(with_changes(system={"energies": [0, 1], "degeneracies": [1, 2]}))


def test_degenerate_initial_state_is_condensed_for_cdb():
    sys = {"energies": [0.0, 1.0], "degeneracies": [1, 2]}
    init = {"preset": "matrix", "matrix": [[1, 0, 0], [0, 0.5, 0.5], [0, 0.5, 0.5]]}
    fdb = parse_config(with_changes(model="degenerate_fdb", system=sys, initial_state=init))
    rho = fdb.build_initial()
    assert rho[1, 2] == 0  # intra-level coherence dropped by default
    init["keep_intra_level_coherences"] = True
    cdb = parse_config(with_changes(model="degenerate_cdb", system=sys, initial_state=init))
    np.testing.assert_allclose(cdb.build_initial(), models.condense(cdb.build_density(), [1, 2]))
    assert cdb.build_initial()[1, 1] == pytest.approx(1.0)


def test_two_species_presets_and_mappings():
    raw = with_changes(model="electron_hole",
                       system={"conduction_energies": [2.0], "valence_energies": [0.0, -0.5]},
                       stepper={"method": "rk4", "dt": 0.1, "t_end": 1.0})
    eh = parse_config(raw).build_initial()
    assert not eh.rho_h.any() and not eh.rho_c.any()
    raw["initial_state"] = {"preset": "inverted"}
    raw["model"] = "gehrig_hess"
    gh = parse_config(raw).build_initial()
    np.testing.assert_array_equal(gh.n_e, [1.0])
    np.testing.assert_array_equal(gh.n_h, [1.0, 1.0])


def test_one_species_presets():
    raw = with_changes(system={"energies": [1.0, 0.0, 2.0]},
                       initial_state={"preset": "inverted", "electrons": 2})
    np.testing.assert_array_equal(np.diag(parse_config(raw).build_initial()).real, [1, 0, 1])


def test_unreadable_and_invalid_yaml(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "missing.yaml")
    bad = tmp_path / "bad.yaml"
    bad.write_text("model: [unclosed\n")
    with pytest.raises(ConfigError, match="YAML"):
        load_config(bad)
