"""Invariant audit of a density-matrix state."""

from __future__ import annotations

from dataclasses import dataclass, asdict
from typing import Optional

import numpy as np

from .linalg import hermitian_eig
from .models import level_sums


@dataclass(frozen=True)
class DiagnosticsRecord:
    hermiticity_defect: float
    trace: complex
    min_eigenvalue: float
    coherence_bound_defect: float
    population_min: float
    population_max: float
    degeneracy_bound_defect: Optional[float] = None

    def as_dict(self) -> dict:
        return asdict(self)


def _level_sums_any(rho, degeneracies):
    d = np.asarray(degeneracies, dtype=int)
    if rho.shape[0] == d.sum():
        return level_sums(rho, d)
    if rho.shape[0] == d.size:
        # condensed sigma: rho^{++} = sigma * sqrt(d_i d_j)
        return rho * np.sqrt(np.outer(d, d))
    raise ValueError(f"state of size {rho.shape[0]} matches neither {d.size} levels "
                     f"nor {d.sum()} sub-levels")


def audit(state, degeneracies=None) -> DiagnosticsRecord:
    """Measure Hermiticity, trace, positivity and the coherence/degeneracy bounds.

    ``degeneracies`` may accompany either an expanded (sub-level) state or a
    condensed one; the size decides which.
    """
    rho = np.asarray(state)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"audit needs a square matrix, got shape {rho.shape}")
    herm = np.max(np.abs(rho - rho.conj().T), initial=0.0)
    lam, _ = hermitian_eig((rho + rho.conj().T) / 2)
    pops = rho.diagonal().real
    clamped = np.sqrt(np.maximum(pops, 0.0))
    excess = np.abs(rho) - np.outer(clamped, clamped)
    np.fill_diagonal(excess, 0.0)
    coherence = max(0.0, float(np.max(excess, initial=0.0)))
    degen = None
    if degeneracies is not None:
        sums = _level_sums_any(rho, degeneracies).diagonal().real
        degen = max(0.0, float(np.max(sums - np.asarray(degeneracies, dtype=float))))
    return DiagnosticsRecord(
        hermiticity_defect=float(herm),
        trace=complex(rho.trace()),
        min_eigenvalue=float(lam[0]),
        coherence_bound_defect=coherence,
        population_min=float(pops.min()),
        population_max=float(pops.max()),
        degeneracy_bound_defect=degen,
    )
