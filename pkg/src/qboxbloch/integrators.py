"""Fixed-step time integration of the Bloch models.

Two steppers:

``unitary_midpoint``
    ``rho <- U rho U^dagger`` with ``U = exp(-i dt V(t + dt/2) / hbar)``.
    Second order, and exactly structure preserving at any ``dt``: the update
    is a unitary conjugation, so Hermiticity, trace and spectrum (hence
    positivity and the ``rho <= Id`` bound) are kept up to rounding.  For a
    constant potential it coincides with the closed-form solution.  For a
    time-dependent potential the closed form written with the integral of V
    is only the leading Magnus term, so no exactness is claimed there.

``rk4``
    Classical Runge-Kutta for any right-hand side, including the
    electron-hole and reduced models that have no Liouville form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from . import _kernels, models
from .diagnostics import DiagnosticsRecord, audit
from .fields import FieldProfile, evaluate
from .linalg import hermitian_eig

__all__ = [
    "MODELS", "LIOUVILLE_MODELS", "METHODS", "StepperSpec", "Trajectory",
    "hermitian_eig", "step_unitary", "step_rk4", "simulate", "IncompatibleMethod",
]

METHODS = ("unitary_midpoint", "rk4")
LIOUVILLE_MODELS = ("one_species", "degenerate_fdb", "degenerate_cdb", "two_species")
MODELS = LIOUVILLE_MODELS + ("electron_hole", "gehrig_hess")


class IncompatibleMethod(ValueError):
    """Stepping method cannot drive the requested model."""


@dataclass(frozen=True)
class StepperSpec:
    method: str
    dt: float
    t_start: float
    t_end: float
    record_every: int = 1

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; expected one of {METHODS}")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not self.t_end > self.t_start:
            raise ValueError("t_end must exceed t_start")
        if self.dt > (self.t_end - self.t_start) * (1 + 1e-12):
            raise ValueError("dt must not exceed t_end - t_start")
        if int(self.record_every) != self.record_every or self.record_every < 1:
            raise ValueError("record_every must be a positive integer")

    def grid(self) -> np.ndarray:
        """Step boundaries; the last step is shortened if dt does not divide the span."""
        span = self.t_end - self.t_start
        n = span / self.dt
        n_steps = max(1, round(n)) if abs(n - round(n)) <= 1e-9 * max(1.0, n) else math.ceil(n)
        times = self.t_start + self.dt * np.arange(n_steps + 1)
        times[-1] = self.t_end
        return times


@dataclass
class Trajectory:
    model: str
    times: np.ndarray
    states: list
    diagnostics: list = field(default_factory=list)

    def __len__(self):
        return len(self.times)


def step_unitary(rho, V_mid, dt: float, hbar: float = 1.0) -> np.ndarray:
    """One midpoint-exponential step; V_mid is the potential at t + dt/2."""
    V_mid = np.asarray(V_mid, dtype=complex)
    hermitian_eig(V_mid)  # validation only; raises on non-Hermitian input
    return _kernels.conjugate(np.asarray(rho, dtype=complex), V_mid, dt / hbar)


def step_rk4(rhs: Callable[[float, Any], Any], state, t: float, dt: float):
    k1 = rhs(t, state)
    k2 = rhs(t + 0.5 * dt, state + (0.5 * dt) * k1)
    k3 = rhs(t + 0.5 * dt, state + (0.5 * dt) * k2)
    k4 = rhs(t + dt, state + dt * k3)
    return state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


# --- model plumbing -------------------------------------------------------------

@dataclass
class _Model:
    potential: Callable | None
    rhs: Callable
    hbar: float
    to_matrix: Callable
    degeneracies: np.ndarray | None = None


def _prepare(model: str, system, field_fn) -> _Model:
    if model not in MODELS:
        raise ValueError(f"unknown model {model!r}; expected one of {MODELS}")
    hbar = system.hbar
    if model in ("one_species", "degenerate_fdb", "degenerate_cdb"):
        if not isinstance(system, models.OneSpeciesSystem):
            raise TypeError(f"model {model!r} needs a OneSpeciesSystem")
        degen = system.degeneracies if model != "one_species" else None
        if model == "degenerate_fdb":
            system = models.expand_degenerate(system)
        elif model == "degenerate_cdb":
            system = models.condensed_system(system)
        elif system.is_degenerate:
            raise ValueError("one_species needs a non-degenerate system; "
                             "use degenerate_fdb or degenerate_cdb")
        potential = lambda t, s=system: models.potential_one_species(s, field_fn(t))
    elif not isinstance(system, models.TwoSpeciesSystem):
        raise TypeError(f"model {model!r} needs a TwoSpeciesSystem")
    elif model == "two_species":
        degen = None
        potential = lambda t: models.potential_two_species(system, field_fn(t))
    else:
        split = system.split
        if model == "electron_hole":
            rhs = lambda t, s: models.eh_rhs(s, system, field_fn(t))
            to_matrix = models.from_electron_hole
        else:
            rhs = lambda t, s: models.gh_state_rhs(s, system, field_fn(t))
            to_matrix = lambda s: models.from_electron_hole(s.to_electron_hole())
        return _Model(None, rhs, hbar, to_matrix)
    rhs = lambda t, rho: models.liouville_rhs(potential(t), rho, hbar)
    return _Model(potential, rhs, hbar, np.asarray, degen)


def simulate(model: str, system, initial, field_profile: FieldProfile | Callable,
             spec: StepperSpec) -> Trajectory:
    """March ``initial`` from ``spec.t_start`` to ``spec.t_end``.

    Records the initial state, every ``record_every``-th step and the final
    state, each with a diagnostics audit of its density matrix.
    """
    if spec.method == "unitary_midpoint" and model not in LIOUVILLE_MODELS:
        raise IncompatibleMethod(
            f"unitary_midpoint needs a Liouville-form model, {model!r} is not one; use rk4")
    if isinstance(field_profile, FieldProfile):
        field_fn = lambda t: evaluate(field_profile, t)
    else:
        field_fn = field_profile
    m = _prepare(model, system, field_fn)
    state = initial
    if model in LIOUVILLE_MODELS:
        state = np.array(initial, dtype=complex)

    times = spec.grid()
    n_steps = len(times) - 1
    rec_t, rec_s, rec_d = [], [], []

    def record(t, s):
        rec_t.append(t)
        rec_s.append(s)
        rec_d.append(audit(m.to_matrix(s), m.degeneracies))

    record(times[0], state)
    unitary = spec.method == "unitary_midpoint"
    for k in range(n_steps):
        t0, t1 = times[k], times[k + 1]
        h = t1 - t0
        if unitary:
            state = _kernels.conjugate(state, m.potential(t0 + 0.5 * h), h / m.hbar)
        else:
            state = step_rk4(m.rhs, state, t0, h)
        if (k + 1) % spec.record_every == 0 or k + 1 == n_steps:
            record(t1, state)
    return Trajectory(model, np.asarray(rec_t), rec_s, rec_d)
