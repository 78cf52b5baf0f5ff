"""Randomised cross-checks of the hand-coded right-hand sides.

Four checks per random system:

1. ``fermion``: operator-algebra generator vs ``liouville_rhs`` (one species)
2. ``boson``: boson-statistics generator vs fermion generator
3. ``two_species``: operator-algebra generator vs the block Liouville RHS
4. ``electron_hole``: ``eh_rhs`` vs the chain rule of the Liouville RHS

Deviations are relative: ``max|a - b| / max|b|`` over the compared entries.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import algebra, models

DEFAULT_TOLERANCE = 1e-10
STATES_PER_SYSTEM = 4


@dataclass
class CheckResult:
    name: str
    deviation: float
    coordinate: Optional[tuple]

    def passed(self, tol: float = DEFAULT_TOLERANCE) -> bool:
        return self.deviation < tol


# --- random instances -----------------------------------------------------------

def random_hermitian(rng, n: int) -> np.ndarray:
    X = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (X + X.conj().T) / 2


def random_density(rng, n: int) -> np.ndarray:
    """Random fermionic state: unitary conjugate of a diagonal in [0, 1]."""
    X = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    Q, _ = np.linalg.qr(X)
    return (Q * rng.uniform(0.0, 1.0, size=n)) @ Q.conj().T


def random_dipole(rng, n: int) -> np.ndarray:
    X = rng.normal(size=(n, n, 3)) + 1j * rng.normal(size=(n, n, 3))
    X = (X + X.conj().transpose(1, 0, 2)) / 2
    X[np.arange(n), np.arange(n)] = 0.0
    return X


def random_field(rng) -> np.ndarray:
    return rng.normal(size=3) + 1j * rng.normal(size=3)


def random_one_species(rng, n: int) -> models.OneSpeciesSystem:
    return models.OneSpeciesSystem(rng.normal(size=n), random_dipole(rng, n),
                                   hbar=rng.uniform(0.5, 2.0))


def random_two_species(rng, nc: int, nv: int) -> models.TwoSpeciesSystem:
    return models.TwoSpeciesSystem(
        conduction_energies=rng.normal(size=nc) + 2.0,
        valence_energies=rng.normal(size=nv) - 2.0,
        dipole_c=random_dipole(rng, nc),
        dipole_v=random_dipole(rng, nv),
        dipole_cv=rng.normal(size=(nc, nv, 3)) + 1j * rng.normal(size=(nc, nv, 3)),
        hbar=rng.uniform(0.5, 2.0),
    )


# --- individual checks --------------------------------------------------------------

def _worst(a, b, labels):
    diff = np.abs(np.asarray(a) - np.asarray(b)).ravel()
    scale = max(np.max(np.abs(b)), np.finfo(float).tiny)
    k = int(np.argmax(diff))
    return diff[k] / scale, labels[k]


def _merge(results: list[CheckResult], name: str) -> CheckResult:
    worst = max(results, key=lambda r: r.deviation)
    return CheckResult(name, worst.deviation, worst.coordinate)


def check_generator(system, field_value, states, statistics: str = algebra.FERMION,
                    rhs: Callable = models.liouville_rhs, name: str = "generator") -> CheckResult:
    """Compare ``G vec(rho)`` with ``i hbar rhs(V, rho)`` for each state."""
    G, b, coords = algebra.derive_generator(system, field_value, statistics)
    if isinstance(system, models.TwoSpeciesSystem):
        V = models.potential_two_species(system, field_value)
    else:
        V = models.potential_one_species(system, field_value)
    results = []
    for rho in states:
        lhs = G @ rho.ravel() + b
        ref = 1j * system.hbar * rhs(V, rho, system.hbar)
        dev, coord = _worst(lhs, ref.ravel(), coords)
        results.append(CheckResult(name, dev, coord))
    return _merge(results, name)


def check_statistics(system, field_value) -> CheckResult:
    Gf, bf, coords = algebra.derive_generator(system, field_value, algebra.FERMION)
    Gb, bb, _ = algebra.derive_generator(system, field_value, algebra.BOSON)
    diff = np.abs(Gf - Gb)
    dev = max(np.max(diff), np.max(np.abs(bf - bb))) / max(np.max(np.abs(Gf)), np.finfo(float).tiny)
    row = int(np.argmax(np.max(diff, axis=1)))
    return CheckResult("boson", dev, coords[row])


def check_electron_hole(system: models.TwoSpeciesSystem, field_value, states,
                        eh: Callable = models.eh_rhs) -> CheckResult:
    V = models.potential_two_species(system, field_value)
    nc, nv = system.split
    labels = ([("c", i, j) for i in range(nc) for j in range(nc)]
              + [("h", i, j) for i in range(nv) for j in range(nv)]
              + [("ch", i, j) for i in range(nc) for j in range(nv)])
    results = []
    for rho in states:
        ref = models.electron_hole_derivative(models.liouville_rhs(V, rho, system.hbar), system.split)
        got = eh(models.to_electron_hole(rho, system.split), system, field_value)
        flat = lambda s: np.concatenate([s.rho_c.ravel(), s.rho_h.ravel(), s.rho_ch.ravel()])
        dev, coord = _worst(flat(got), flat(ref), labels)
        results.append(CheckResult("electron_hole", dev, coord))
    return _merge(results, "electron_hole")


def corrupted_liouville_rhs(V, rho, hbar=1.0):
    """Liouville RHS with a sign error in the last entry of the first row."""
    out = models.liouville_rhs(V, rho, hbar)
    n = out.shape[0]
    out[0, n - 1] = (-1j / hbar) * (V @ rho + rho @ V)[0, n - 1]
    return out


# --- driver ----------------------------------------------------------------------------

def _sizes_two(rng, max_levels, max_per_species):
    cap = max_levels - 1 if max_per_species is None else min(max_per_species, max_levels - 1)
    nc = int(rng.integers(1, max(1, cap) + 1))
    cap_v = max_levels - nc if max_per_species is None else min(max_per_species, max_levels - nc)
    nv = int(rng.integers(1, max(1, cap_v) + 1))
    return nc, nv


def run_verification(max_levels: int, seed: int, trials: int,
                     max_per_species: Optional[int] = None,
                     fault: bool = False,
                     states_per_system: int = STATES_PER_SYSTEM) -> list[CheckResult]:
    """Run all four checks over ``trials`` seeded random systems.

    Trial ``k`` draws from the ``k``-th child of ``SeedSequence(seed)``, so
    results do not depend on evaluation order.  Returns the worst result per
    check.
    """
    if max_levels > algebra.DEFAULT_MAX_LEVELS:
        raise ValueError(f"max_levels {max_levels} exceeds the oracle bound "
                         f"{algebra.DEFAULT_MAX_LEVELS}")
    if max_levels < 2:
        raise ValueError("max_levels must be at least 2 (two species need one level each)")
    one_rhs = corrupted_liouville_rhs if fault else models.liouville_rhs
    per_check: dict[str, list[CheckResult]] = {k: [] for k in
                                               ("fermion", "boson", "two_species", "electron_hole")}
    for child in np.random.SeedSequence(seed).spawn(trials):
        rng = np.random.default_rng(child)
        n = int(rng.integers(2, max_levels + 1))
        sys1 = random_one_species(rng, n)
        e1 = random_field(rng)
        states1 = [random_hermitian(rng, n) for _ in range(states_per_system)]
        per_check["fermion"].append(check_generator(sys1, e1, states1, rhs=one_rhs, name="fermion"))
        per_check["boson"].append(check_statistics(sys1, e1))

        nc, nv = _sizes_two(rng, max_levels, max_per_species)
        sys2 = random_two_species(rng, nc, nv)
        e2 = random_field(rng)
        states2 = [random_hermitian(rng, nc + nv) for _ in range(states_per_system)]
        per_check["two_species"].append(check_generator(sys2, e2, states2, name="two_species"))
        per_check["electron_hole"].append(check_electron_hole(sys2, e2, states2))
    return [_merge(v, k) for k, v in per_check.items()]


def format_table(results: list[CheckResult], tol: float = DEFAULT_TOLERANCE) -> str:
    lines = [f"{'check':<15}{'max rel. deviation':>20}  {'worst coordinate':<20}status"]
    for r in results:
        status = "ok" if r.passed(tol) else "FAIL"
        lines.append(f"{r.name:<15}{r.deviation:>20.3e}  {str(r.coordinate):<20}{status}")
    return "\n".join(lines)
