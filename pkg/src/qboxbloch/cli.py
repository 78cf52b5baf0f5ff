"""Command-line entry point: ``simulate``, ``verify`` and ``compare``.

Exit codes: 0 success, 1 runtime or verification failure, 2 invalid config.
``QBOXBLOCH_OUTPUT_DIR`` (if set) redirects every CSV into that directory,
keeping the file name from the config.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from pathlib import Path

import numpy as np

from . import models, verify
from .config import ConfigError, ScenarioConfig, load_config
from .integrators import IncompatibleMethod, StepperSpec, Trajectory, simulate

OUTPUT_DIR_ENV = "QBOXBLOCH_OUTPUT_DIR"
EXIT_OK, EXIT_FAILURE, EXIT_CONFIG = 0, 1, 2
DIAGNOSTIC_COLUMNS = ("hermiticity_defect", "trace_re", "trace_im",
                      "min_eigenvalue", "coherence_bound_defect")


def output_path(path: str) -> Path:
    override = os.environ.get(OUTPUT_DIR_ENV)
    if override:
        return Path(override) / Path(path).name
    return Path(path)


def _fmt(x: float, precision: int) -> str:
    return format(float(x), f".{precision}g")


# --- column layout ---------------------------------------------------------------

def _matrix_entries(labels):
    """Populations first, then upper-triangle coherences."""
    n = len(labels)
    pairs = [(i, i) for i in range(n)] + [(i, j) for i in range(n) for j in range(i + 1, n)]
    return [(f"rho_{labels[i]}_{labels[j]}", i, j) for i, j in pairs]


def level_labels(cfg: ScenarioConfig, system) -> list[str]:
    if cfg.model == "one_species":
        return [str(i) for i in range(system.n_levels)]
    if cfg.model == "degenerate_fdb":
        return [f"{i}s{a}" for i, a in models.expanded_labels(system.degeneracies)]
    if cfg.model == "degenerate_cdb":
        return [str(i) for i in range(system.n_levels)]
    return [f"c{i}" for i in range(system.nc)] + [f"v{i}" for i in range(system.nv)]


def state_columns(cfg: ScenarioConfig, system):
    """(names, extractor) for the tracked entries of the model's native state."""
    if cfg.model in ("one_species", "degenerate_fdb", "degenerate_cdb", "two_species"):
        entries = _matrix_entries(level_labels(cfg, system))
        return [name for name, _, _ in entries], lambda s: [s[i, j] for _, i, j in entries]
    nc, nv = system.nc, system.nv
    if cfg.model == "electron_hole":
        c = _matrix_entries([str(i) for i in range(nc)])
        h = _matrix_entries([str(i) for i in range(nv)])
        names = ([n.replace("rho_", "rho_c_", 1) for n, _, _ in c]
                 + [n.replace("rho_", "rho_h_", 1) for n, _, _ in h]
                 + [f"rho_ch_{i}_{j}" for i in range(nc) for j in range(nv)])

        def extract(s):
            return ([s.rho_c[i, j] for _, i, j in c] + [s.rho_h[i, j] for _, i, j in h]
                    + list(s.rho_ch.ravel()))
        return names, extract
    names = ([f"n_e_{i}" for i in range(nc)] + [f"n_h_{j}" for j in range(nv)]
             + [f"p_{j}_{i}" for j in range(nv) for i in range(nc)])
    return names, lambda s: list(s.n_e) + list(s.n_h) + list(s.p.ravel())


def write_trajectory(path: Path, traj: Trajectory, names, extract, precision: int,
                     degenerate: bool) -> None:
    header = ["t"] + [f"{n}_{part}" for n in names for part in ("re", "im")]
    header += list(DIAGNOSTIC_COLUMNS)
    if degenerate:
        header.append("degeneracy_bound_defect")
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for t, s, d in zip(traj.times, traj.states, traj.diagnostics):
            row = [_fmt(t, precision)]
            for v in extract(s):
                v = complex(v)
                row += [_fmt(v.real, precision), _fmt(v.imag, precision)]
            row += [_fmt(d.hermiticity_defect, precision), _fmt(d.trace.real, precision),
                    _fmt(d.trace.imag, precision), _fmt(d.min_eigenvalue, precision),
                    _fmt(d.coherence_bound_defect, precision)]
            if degenerate:
                row.append(_fmt(d.degeneracy_bound_defect, precision))
            w.writerow(row)


# --- commands -------------------------------------------------------------------------

def cmd_simulate(config_path) -> int:
    try:
        cfg = load_config(config_path)
        system = cfg.build_system()
        initial = cfg.build_initial(system)
        profile = cfg.build_field()
        spec = cfg.build_stepper()
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        traj = simulate(cfg.model, system, initial, profile, spec)
    except IncompatibleMethod as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    names, extract = state_columns(cfg, system)
    path = output_path(cfg.output["path"])
    write_trajectory(path, traj, names, extract, cfg.output["precision"],
                     degenerate=cfg.model in ("degenerate_fdb", "degenerate_cdb"))
    print(f"wrote {len(traj)} records to {path}")
    return EXIT_OK


def run_comparison(system: models.TwoSpeciesSystem, rho_tot, profile, spec: StepperSpec):
    """Full two-species model against the reduced model from matched data.

    Returns ``(times, population_discrepancy[t, level], max_intraband[t])``,
    where levels run over conduction then valence.  Intra-band coherences of
    the full model are zeroed at the start; the reduced model starts from
    ``n_e = diag rho^c``, ``n_h = 1 - diag rho^v`` and the interband block.
    """
    nc, nv = system.split
    rho0 = np.array(rho_tot, dtype=complex)
    for lo, hi in ((0, nc), (nc, nc + nv)):
        block = rho0[lo:hi, lo:hi]
        rho0[lo:hi, lo:hi] = np.diag(np.diag(block))
    full = simulate("two_species", system, rho0, profile, spec)
    gh0 = models.GHState.from_electron_hole(models.to_electron_hole(rho0, system.split))
    gh_spec = StepperSpec("rk4", spec.dt, spec.t_start, spec.t_end, spec.record_every)
    reduced = simulate("gehrig_hess", system, gh0, profile, gh_spec)

    off = ~np.eye(nc + nv, dtype=bool)
    off[:nc, nc:] = False
    off[nc:, :nc] = False
    disc, intra = [], []
    for rho, g in zip(full.states, reduced.states):
        pops = np.real(np.diag(rho))
        gh_pops = np.concatenate([g.n_e, 1.0 - g.n_h])
        disc.append(np.abs(pops - gh_pops))
        intra.append(np.max(np.abs(rho[off]), initial=0.0))
    return full.times, np.array(disc), np.array(intra)


def cmd_compare(config_path) -> int:
    try:
        cfg = load_config(config_path)
        if cfg.model not in ("two_species", "electron_hole", "gehrig_hess"):
            raise ConfigError(f"model: compare needs a two-species model, got {cfg.model!r}")
        system = cfg.build_system()
        rho = cfg.build_density(system)
        profile = cfg.build_field()
        spec = cfg.build_stepper()
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    times, disc, intra = run_comparison(system, rho, profile, spec)
    labels = [f"c{i}" for i in range(system.nc)] + [f"v{i}" for i in range(system.nv)]
    p = cfg.output["precision"]
    path = output_path(cfg.output["path"])
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t"] + [f"population_discrepancy_{l}" for l in labels]
                   + ["max_intraband_coherence"])
        for t, d, m in zip(times, disc, intra):
            w.writerow([_fmt(t, p)] + [_fmt(x, p) for x in d] + [_fmt(m, p)])
    print(f"max population discrepancy: {float(np.max(disc)):.6e}")
    print(f"max intra-band coherence (full model): {float(np.max(intra)):.6e}")
    print(f"wrote {len(times)} records to {path}")
    return EXIT_OK


def cmd_verify(levels: int, seed: int, trials: int, inject_fault: bool = False) -> int:
    try:
        results = verify.run_verification(levels, seed, trials, fault=inject_fault)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(verify.format_table(results))
    failed = [r for r in results if not r.passed()]
    for r in failed:
        print(f"mismatch in {r.name} at {r.coordinate}: relative deviation {r.deviation:.3e}",
              file=sys.stderr)
    return EXIT_FAILURE if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qboxbloch",
                                     description="Bloch equations for quantum boxes.")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("simulate", help="integrate a scenario and write a CSV trajectory")
    p.add_argument("config")
    p = sub.add_parser("verify", help="cross-check the right-hand sides against the operator algebra")
    p.add_argument("--levels", type=int, default=3, help="maximum number of levels (<= 8)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    p = sub.add_parser("compare", help="full two-species model vs the reduced model")
    p.add_argument("config")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "simulate":
        return cmd_simulate(args.config)
    if args.command == "compare":
        return cmd_compare(args.config)
    return cmd_verify(args.levels, args.seed, args.trials, args.inject_fault)


if __name__ == "__main__":
    sys.exit(main())
