"""Scenario configuration files (YAML).

Grammar
-------
Top-level sections: ``model``, ``system``, ``initial_state``, ``field``,
``stepper``, ``output``.  Scalars are YAML numbers/strings/booleans.
A complex number is ``[re, im]`` (a bare real is accepted on input); a
3-vector is a list of three complex numbers; a dipole matrix is a nested
``n x n`` (or ``nc x nv``) list of 3-vectors.  Omitted dipoles are zero.

::

    model: one_species | degenerate_fdb | degenerate_cdb
           | two_species | electron_hole | gehrig_hess
    system:                       # one-species models
      hbar: 1.0
      energies: [0.0, 1.0]
      degeneracies: [1, 2]        # degenerate models only
      dipole: [[...], [...]]
    system:                       # two-species models
      hbar: 1.0
      conduction_energies: [...]
      valence_energies: [...]
      dipole_c: ...
      dipole_v: ...
      dipole_cv: ...
    initial_state:
      preset: ground | inverted | diagonal | matrix
      electrons: 1                # ground/inverted, one-species models
      populations: [...]          # diagonal
      matrix: [[[re, im], ...]]   # matrix
      keep_intra_level_coherences: false   # degenerate models
    field:
      pulses:
        - amplitude: [[re, im], [re, im], [re, im]]
          carrier_frequency: 0.0
          phase: 0.0
          envelope: {kind: constant}
                  | {kind: gaussian, center: 5.0, width: 1.0}
                  | {kind: rectangular, start: 0.0, stop: 2.0}
    stepper: {method: unitary_midpoint | rk4, dt: 0.01, t_start: 0.0,
              t_end: 10.0, record_every: 1}
    output: {path: out.csv, precision: 17}

The initial state is always written on the model's level set before any
mapping: the sub-level set for degenerate models (the condensed model starts
from its condensation) and the conduction-then-valence composite for
two-species models (mapped to electron-hole or reduced variables as needed).
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from . import fields, models
from .integrators import MODELS, StepperSpec

ONE_SPECIES_MODELS = ("one_species", "degenerate_fdb", "degenerate_cdb")
TWO_SPECIES_MODELS = ("two_species", "electron_hole", "gehrig_hess")
PRESETS = ("ground", "inverted", "diagonal", "matrix")
DEFAULT_PRECISION = 17


class ConfigError(ValueError):
    """Invalid scenario configuration; the message names the offending field."""


# --- scalar parsing -------------------------------------------------------------

def _complex(value, where) -> list[float]:
    if isinstance(value, bool):
        raise ConfigError(f"{where}: expected a number or [re, im], got {value!r}")
    if isinstance(value, (int, float)):
        return [float(value), 0.0]
    if isinstance(value, (list, tuple)) and len(value) == 2 and all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
        return [float(value[0]), float(value[1])]
    raise ConfigError(f"{where}: expected a number or [re, im], got {value!r}")


def _vec3(value, where) -> list[list[float]]:
    if not isinstance(value, (list, tuple)) or len(value) != 3:
        raise ConfigError(f"{where}: expected a 3-vector of complex numbers, got {value!r}")
    return [_complex(v, f"{where}[{k}]") for k, v in enumerate(value)]


def _reals(value, where, length=None) -> list[float]:
    if not isinstance(value, (list, tuple)):
        raise ConfigError(f"{where}: expected a list of numbers")
    out = []
    for k, v in enumerate(value):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(f"{where}[{k}]: expected a number, got {v!r}")
        out.append(float(v))
    if length is not None and len(out) != length:
        raise ConfigError(f"{where}: expected {length} entries, got {len(out)}")
    return out


def _real(value, where) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}: expected a number, got {value!r}")
    return float(value)


def _matrix(value, rows, cols, where, entry) -> list:
    if not isinstance(value, (list, tuple)) or len(value) != rows:
        raise ConfigError(f"{where}: expected {rows} rows")
    out = []
    for i, row in enumerate(value):
        if not isinstance(row, (list, tuple)) or len(row) != cols:
            raise ConfigError(f"{where}[{i}]: expected {cols} entries")
        out.append([entry(v, f"{where}[{i}][{j}]") for j, v in enumerate(row)])
    return out


def _to_complex_array(nested) -> np.ndarray:
    arr = np.asarray(nested, dtype=float)
    return arr[..., 0] + 1j * arr[..., 1]


def _section(raw, name, required=True) -> dict:
    sec = raw.get(name)
    if sec is None:
        if required:
            raise ConfigError(f"missing section {name!r}")
        return {}
    if not isinstance(sec, dict):
        raise ConfigError(f"section {name!r} must be a mapping")
    return sec


def _unknown(sec, allowed, where):
    extra = sorted(set(sec) - set(allowed))
    if extra:
        raise ConfigError(f"{where}: unknown key(s) {extra}")


# --- sections -------------------------------------------------------------------------

def _parse_system(model, sec) -> dict:
    out: dict[str, Any] = {"hbar": _real(sec.get("hbar", 1.0), "system.hbar")}
    if out["hbar"] <= 0:
        raise ConfigError("system.hbar: must be positive")
    if model in ONE_SPECIES_MODELS:
        _unknown(sec, ("hbar", "energies", "degeneracies", "dipole"), "system")
        if "energies" not in sec:
            raise ConfigError("system.energies: required")
        energies = _reals(sec["energies"], "system.energies")
        n = len(energies)
        if n == 0:
            raise ConfigError("system.energies: at least one level required")
        out["energies"] = energies
        if "degeneracies" in sec:
            d = sec["degeneracies"]
            if (not isinstance(d, list) or len(d) != n
                    or any(isinstance(x, bool) or not isinstance(x, int) or x < 1 for x in d)):
                raise ConfigError(f"system.degeneracies: expected {n} positive integers")
            out["degeneracies"] = [int(x) for x in d]
        elif model != "one_species":
            raise ConfigError("system.degeneracies: required for degenerate models")
        if model == "one_species" and any(x > 1 for x in out.get("degeneracies", [])):
            raise ConfigError("system.degeneracies: one_species needs all ones; "
                              "use degenerate_fdb or degenerate_cdb")
        if "dipole" in sec:
            out["dipole"] = _matrix(sec["dipole"], n, n, "system.dipole", _vec3)
        return out
    _unknown(sec, ("hbar", "conduction_energies", "valence_energies",
                   "dipole_c", "dipole_v", "dipole_cv"), "system")
    for key in ("conduction_energies", "valence_energies"):
        if key not in sec:
            raise ConfigError(f"system.{key}: required")
        out[key] = _reals(sec[key], f"system.{key}")
        if not out[key]:
            raise ConfigError(f"system.{key}: at least one level required")
    nc, nv = len(out["conduction_energies"]), len(out["valence_energies"])
    for key, shape in (("dipole_c", (nc, nc)), ("dipole_v", (nv, nv)), ("dipole_cv", (nc, nv))):
        if key in sec:
            out[key] = _matrix(sec[key], *shape, f"system.{key}", _vec3)
    return out


def _parse_initial(sec, dim) -> dict:
    _unknown(sec, ("preset", "electrons", "populations", "matrix",
                   "keep_intra_level_coherences"), "initial_state")
    preset = sec.get("preset", "ground")
    if preset not in PRESETS:
        raise ConfigError(f"initial_state.preset: expected one of {PRESETS}, got {preset!r}")
    out: dict[str, Any] = {"preset": preset}
    if preset in ("ground", "inverted") and "electrons" in sec:
        e = sec["electrons"]
        if isinstance(e, bool) or not isinstance(e, int) or not 0 <= e <= dim:
            raise ConfigError(f"initial_state.electrons: expected an integer in [0, {dim}]")
        out["electrons"] = e
    if preset == "diagonal":
        if "populations" not in sec:
            raise ConfigError("initial_state.populations: required for preset 'diagonal'")
        out["populations"] = _reals(sec["populations"], "initial_state.populations", dim)
    if preset == "matrix":
        if "matrix" not in sec:
            raise ConfigError("initial_state.matrix: required for preset 'matrix'")
        out["matrix"] = _matrix(sec["matrix"], dim, dim, "initial_state.matrix", _complex)
    if "keep_intra_level_coherences" in sec:
        flag = sec["keep_intra_level_coherences"]
        if not isinstance(flag, bool):
            raise ConfigError("initial_state.keep_intra_level_coherences: expected a boolean")
        out["keep_intra_level_coherences"] = flag
    return out


def _parse_envelope(env, where) -> dict:
    if env is None:
        return {"kind": "constant"}
    if not isinstance(env, dict) or "kind" not in env:
        raise ConfigError(f"{where}: expected a mapping with 'kind'")
    kind = env["kind"]
    if kind == "constant":
        _unknown(env, ("kind",), where)
        return {"kind": "constant"}
    if kind == "gaussian":
        _unknown(env, ("kind", "center", "width"), where)
        out = {"kind": kind, "center": _real(env.get("center"), f"{where}.center"),
               "width": _real(env.get("width"), f"{where}.width")}
        if out["width"] <= 0:
            raise ConfigError(f"{where}.width: must be positive")
        return out
    if kind == "rectangular":
        _unknown(env, ("kind", "start", "stop"), where)
        out = {"kind": kind, "start": _real(env.get("start"), f"{where}.start"),
               "stop": _real(env.get("stop"), f"{where}.stop")}
        if not out["start"] < out["stop"]:
            raise ConfigError(f"{where}: start must be < stop")
        return out
    raise ConfigError(f"{where}.kind: unknown envelope {kind!r}")


def _parse_field(sec) -> dict:
    _unknown(sec, ("pulses",), "field")
    pulses = sec.get("pulses") or []
    if not isinstance(pulses, list):
        raise ConfigError("field.pulses: expected a list")
    out = []
    for k, p in enumerate(pulses):
        where = f"field.pulses[{k}]"
        if not isinstance(p, dict):
            raise ConfigError(f"{where}: expected a mapping")
        _unknown(p, ("amplitude", "carrier_frequency", "phase", "envelope"), where)
        out.append({
            "amplitude": _vec3(p.get("amplitude"), f"{where}.amplitude"),
            "carrier_frequency": _real(p.get("carrier_frequency", 0.0), f"{where}.carrier_frequency"),
            "phase": _real(p.get("phase", 0.0), f"{where}.phase"),
            "envelope": _parse_envelope(p.get("envelope"), f"{where}.envelope"),
        })
    return {"pulses": out}


def _parse_stepper(sec) -> dict:
    _unknown(sec, ("method", "dt", "t_start", "t_end", "record_every"), "stepper")
    out = {
        "method": sec.get("method", "unitary_midpoint"),
        "dt": _real(sec.get("dt"), "stepper.dt"),
        "t_start": _real(sec.get("t_start", 0.0), "stepper.t_start"),
        "t_end": _real(sec.get("t_end"), "stepper.t_end"),
        "record_every": sec.get("record_every", 1),
    }
    if isinstance(out["record_every"], bool) or not isinstance(out["record_every"], int):
        raise ConfigError("stepper.record_every: expected a positive integer")
    try:
        StepperSpec(**out)
    except ValueError as exc:
        raise ConfigError(f"stepper: {exc}") from None
    return out


def _parse_output(sec) -> dict:
    _unknown(sec, ("path", "precision"), "output")
    path = sec.get("path", "trajectory.csv")
    if not isinstance(path, str) or not path:
        raise ConfigError("output.path: expected a non-empty string")
    precision = sec.get("precision", DEFAULT_PRECISION)
    if isinstance(precision, bool) or not isinstance(precision, int) or not 1 <= precision <= 17:
        raise ConfigError("output.precision: expected an integer in [1, 17]")
    return {"path": path, "precision": precision}


@dataclass
class ScenarioConfig:
    model: str
    system: dict
    initial_state: dict
    field: dict = dc_field(default_factory=lambda: {"pulses": []})
    stepper: dict = dc_field(default_factory=dict)
    output: dict = dc_field(default_factory=lambda: {"path": "trajectory.csv",
                                                  "precision": DEFAULT_PRECISION})

    # --- builders ---
    def build_system(self):
        s = self.system
        try:
            if self.model in ONE_SPECIES_MODELS:
                return models.OneSpeciesSystem(
                    energies=s["energies"],
                    dipole=_to_complex_array(s["dipole"]) if "dipole" in s else None,
                    degeneracies=s.get("degeneracies"),
                    hbar=s["hbar"],
                )
            return models.TwoSpeciesSystem(
                conduction_energies=s["conduction_energies"],
                valence_energies=s["valence_energies"],
                dipole_c=_to_complex_array(s["dipole_c"]) if "dipole_c" in s else None,
                dipole_v=_to_complex_array(s["dipole_v"]) if "dipole_v" in s else None,
                dipole_cv=_to_complex_array(s["dipole_cv"]) if "dipole_cv" in s else None,
                hbar=s["hbar"],
            )
        except models.ValidationError as exc:
            raise ConfigError(f"system: {exc}") from None

    def state_dimension(self) -> int:
        s = self.system
        if self.model in ONE_SPECIES_MODELS:
            return int(sum(s.get("degeneracies", [1] * len(s["energies"]))))
        return len(s["conduction_energies"]) + len(s["valence_energies"])

    def build_density(self, system=None) -> np.ndarray:
        """Initial density matrix on the model's level set (before any mapping)."""
        system = system or self.build_system()
        init = self.initial_state
        dim = self.state_dimension()
        preset = init["preset"]
        if preset == "matrix":
            rho = _to_complex_array(init["matrix"])
        elif preset == "diagonal":
            rho = np.diag(init["populations"]).astype(complex)
        elif self.model in ONE_SPECIES_MODELS:
            energies = models.expand_degenerate(system).energies
            order = np.argsort(energies, kind="stable")
            if preset == "inverted":
                order = order[::-1]
            pops = np.zeros(dim)
            pops[order[:init.get("electrons", 1)]] = 1.0
            rho = np.diag(pops).astype(complex)
        else:
            nc = system.nc
            pops = np.zeros(dim)
            if preset == "ground":
                pops[nc:] = 1.0
            else:
                pops[:nc] = 1.0
            rho = np.diag(pops).astype(complex)
        if self.model in ("degenerate_fdb", "degenerate_cdb") and not init.get(
                "keep_intra_level_coherences", False):
            rho = models.zero_intra_level_coherences(rho, system.degeneracies)
        try:
            return models.density_matrix(rho)
        except models.ValidationError as exc:
            raise ConfigError(f"initial_state: {exc}") from None

    def build_initial(self, system=None):
        system = system or self.build_system()
        rho = self.build_density(system)
        if self.model == "degenerate_cdb":
            return models.condense(rho, system.degeneracies)
        if self.model == "electron_hole":
            return models.to_electron_hole(rho, system.split)
        if self.model == "gehrig_hess":
            return models.GHState.from_electron_hole(models.to_electron_hole(rho, system.split))
        return rho

    def build_field(self) -> fields.FieldProfile:
        pulses = []
        for p in self.field["pulses"]:
            env = p["envelope"]
            if env["kind"] == "gaussian":
                envelope = fields.Gaussian(env["center"], env["width"])
            elif env["kind"] == "rectangular":
                envelope = fields.Rectangular(env["start"], env["stop"])
            else:
                envelope = fields.Constant()
            pulses.append(fields.Pulse(_to_complex_array(p["amplitude"]),
                                       p["carrier_frequency"], p["phase"], envelope))
        return fields.FieldProfile(tuple(pulses))

    def build_stepper(self) -> StepperSpec:
        return StepperSpec(**self.stepper)

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "system": self.system,
            "initial_state": self.initial_state,
            "field": self.field,
            "stepper": self.stepper,
            "output": self.output,
        }


def parse_config(raw: Any) -> ScenarioConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config must be a mapping at top level")
    _unknown(raw, ("model", "system", "initial_state", "field", "stepper", "output"), "config")
    model = raw.get("model")
    if model not in MODELS:
        raise ConfigError(f"model: expected one of {MODELS}, got {model!r}")
    system = _parse_system(model, _section(raw, "system"))
    cfg = ScenarioConfig(
        model=model,
        system=system,
        initial_state={},
        field=_parse_field(_section(raw, "field", required=False)),
        stepper=_parse_stepper(_section(raw, "stepper")),
        output=_parse_output(_section(raw, "output", required=False)),
    )
    cfg.initial_state = _parse_initial(_section(raw, "initial_state", required=False),
                                       cfg.state_dimension())
    built = cfg.build_system()
    cfg.build_initial(built)
    return cfg


def load_config(path) -> ScenarioConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"config {path} is not valid YAML: {exc}") from None
    return parse_config(raw)


def dump_config(cfg: ScenarioConfig) -> str:
    return yaml.safe_dump(cfg.to_dict(), sort_keys=False, default_flow_style=None)
