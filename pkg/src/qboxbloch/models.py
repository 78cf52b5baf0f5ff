"""Hand-coded Bloch right-hand sides for quantum-box level systems.

Conventions
-----------
- Density matrices are complex ``(n, n)`` arrays with ``rho[i, j] = <c_j^dag c_i>``.
- Dipoles are complex ``(n, n, 3)`` arrays; a field value is a complex 3-vector.
- Intra-band couplings use the componentwise real part of the field,
  inter-band couplings the full complex field.
- Two-species composite matrices order conduction levels before valence.
- Every ``*_rhs`` returns ``d/dt`` (the ``1/(i hbar)`` is applied).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

HERMITIAN_TOL = 1e-12


class ValidationError(ValueError):
    """An input violates a structural requirement of the model."""


def _as_dipole(dipole, shape, name):
    if dipole is None:
        return np.zeros(shape + (3,), dtype=complex)
    arr = np.asarray(dipole, dtype=complex)
    if arr.shape != shape + (3,):
        raise ValidationError(f"{name} has shape {arr.shape}, expected {shape + (3,)}")
    return arr


def _check_intra_dipole(dipole, name):
    n = dipole.shape[0]
    for k in range(n):
        if np.any(np.abs(dipole[k, k]) > HERMITIAN_TOL):
            raise ValidationError(
                f"{name}[{k}][{k}] = {dipole[k, k].tolist()} is nonzero; "
                f"the dipole diagonal must vanish (M_kk = 0)")
    for k in range(n):
        for l in range(k + 1, n):
            if np.any(np.abs(dipole[k, l].conj() - dipole[l, k]) > HERMITIAN_TOL):
                raise ValidationError(
                    f"{name}[{k}][{l}] and {name}[{l}][{k}] break Hermiticity "
                    f"(M_kl* = M_lk required)")


@dataclass(frozen=True)
class OneSpeciesSystem:
    energies: np.ndarray
    dipole: np.ndarray = None
    degeneracies: np.ndarray = None
    hbar: float = 1.0

    def __post_init__(self):
        energies = np.asarray(self.energies, dtype=float).reshape(-1)
        n = energies.size
        if n == 0:
            raise ValidationError("at least one level is required")
        dipole = _as_dipole(self.dipole, (n, n), "dipole")
        _check_intra_dipole(dipole, "dipole")
        if self.degeneracies is None:
            degen = np.ones(n, dtype=int)
        else:
            degen = np.asarray(self.degeneracies).reshape(-1)
            if degen.size != n:
                raise ValidationError(f"{degen.size} degeneracies for {n} levels")
            if np.any(degen < 1) or np.any(degen != np.round(degen)):
                raise ValidationError("degeneracies must be positive integers")
            degen = degen.astype(int)
        if not self.hbar > 0:
            raise ValidationError("hbar must be positive")
        object.__setattr__(self, "energies", energies)
        object.__setattr__(self, "dipole", dipole)
        object.__setattr__(self, "degeneracies", degen)
        object.__setattr__(self, "hbar", float(self.hbar))

    @property
    def n_levels(self) -> int:
        return self.energies.size

    @property
    def is_degenerate(self) -> bool:
        return bool(np.any(self.degeneracies > 1))


@dataclass(frozen=True)
class TwoSpeciesSystem:
    conduction_energies: np.ndarray
    valence_energies: np.ndarray
    dipole_c: np.ndarray = None
    dipole_v: np.ndarray = None
    dipole_cv: np.ndarray = None
    hbar: float = 1.0

    def __post_init__(self):
        ec = np.asarray(self.conduction_energies, dtype=float).reshape(-1)
        ev = np.asarray(self.valence_energies, dtype=float).reshape(-1)
        if ec.size == 0 or ev.size == 0:
            raise ValidationError("both species need at least one level")
        nc, nv = ec.size, ev.size
        mc = _as_dipole(self.dipole_c, (nc, nc), "dipole_c")
        mv = _as_dipole(self.dipole_v, (nv, nv), "dipole_v")
        mcv = _as_dipole(self.dipole_cv, (nc, nv), "dipole_cv")
        _check_intra_dipole(mc, "dipole_c")
        _check_intra_dipole(mv, "dipole_v")
        if not self.hbar > 0:
            raise ValidationError("hbar must be positive")
        object.__setattr__(self, "conduction_energies", ec)
        object.__setattr__(self, "valence_energies", ev)
        object.__setattr__(self, "dipole_c", mc)
        object.__setattr__(self, "dipole_v", mv)
        object.__setattr__(self, "dipole_cv", mcv)
        object.__setattr__(self, "hbar", float(self.hbar))

    @property
    def nc(self) -> int:
        return self.conduction_energies.size

    @property
    def nv(self) -> int:
        return self.valence_energies.size

    @property
    def split(self) -> tuple[int, int]:
        return self.nc, self.nv

    # hole views: derived, never stored
    @property
    def hole_energies(self) -> np.ndarray:
        return -self.valence_energies

    @property
    def dipole_h(self) -> np.ndarray:
        return self.dipole_v

    @property
    def dipole_ch(self) -> np.ndarray:
        return self.dipole_cv


def density_matrix(entries, physical: bool = True, tol: float = 1e-12) -> np.ndarray:
    """Validate and return a density matrix as a complex array.

    ``physical`` additionally requires a fermionic state: spectrum in [0, 1].
    """
    rho = np.array(entries, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValidationError(f"density matrix must be square, got shape {rho.shape}")
    defect = np.max(np.abs(rho - rho.conj().T), initial=0.0)
    if defect > 1e-13:
        raise ValidationError(f"density matrix is not Hermitian (defect {defect:.3g})")
    if physical:
        lam = np.linalg.eigvalsh((rho + rho.conj().T) / 2)
        if lam.size and (lam[0] < -tol or lam[-1] > 1 + tol):
            raise ValidationError(
                f"density matrix spectrum [{lam[0]:.6g}, {lam[-1]:.6g}] leaves [0, 1]")
    return rho


# --- one species ------------------------------------------------------------

def _field(value) -> np.ndarray:
    return np.asarray(value, dtype=complex).reshape(3)


def _real_coupling(dipole, field_value):
    return np.einsum("klx,x->kl", dipole, _field(field_value).real)


def _complex_coupling(dipole, field_value):
    return np.einsum("klx,x->kl", dipole, _field(field_value))


def potential_one_species(system: OneSpeciesSystem, field_value) -> np.ndarray:
    return np.diag(system.energies).astype(complex) + _real_coupling(system.dipole, field_value)


def liouville_rhs(V, rho, hbar: float = 1.0) -> np.ndarray:
    """(-i/hbar) [V, rho]."""
    V = np.asarray(V)
    rho = np.asarray(rho)
    if V.shape != rho.shape or V.ndim != 2:
        raise ValidationError(f"shape mismatch: V {V.shape} vs rho {rho.shape}")
    return (-1j / hbar) * (V @ rho - rho @ V)


# --- degenerate levels ----------------------------------------------------------

def expanded_labels(degeneracies) -> list[tuple[int, int]]:
    """(level, sub-level) for each row of the expanded index set."""
    return [(i, n) for i, d in enumerate(np.asarray(degeneracies, dtype=int)) for n in range(d)]


def _level_of_row(degeneracies) -> np.ndarray:
    return np.repeat(np.arange(len(degeneracies)), np.asarray(degeneracies, dtype=int))


def expand_degenerate(system: OneSpeciesSystem) -> OneSpeciesSystem:
    """Non-degenerate system on the sub-level index set (full degenerate model)."""
    rows = _level_of_row(system.degeneracies)
    return OneSpeciesSystem(
        energies=system.energies[rows],
        dipole=system.dipole[np.ix_(rows, rows)],
        hbar=system.hbar,
    )


def level_sums(rho_expanded, degeneracies) -> np.ndarray:
    """rho^{++}_ij: sum over sub-levels n of i and m of j."""
    degeneracies = np.asarray(degeneracies, dtype=int)
    rho_expanded = np.asarray(rho_expanded)
    total = int(degeneracies.sum())
    if rho_expanded.shape != (total, total):
        raise ValidationError(
            f"expanded state has shape {rho_expanded.shape}, degeneracies need {(total, total)}")
    P = np.zeros((degeneracies.size, total))
    P[_level_of_row(degeneracies), np.arange(total)] = 1.0
    return P @ rho_expanded @ P.T


def condense(rho_expanded, degeneracies) -> np.ndarray:
    """sigma_ij = rho^{++}_ij / sqrt(d_i d_j)."""
    d = np.asarray(degeneracies, dtype=float)
    return level_sums(rho_expanded, degeneracies) / np.sqrt(np.outer(d, d))


def condensed_system(system: OneSpeciesSystem) -> OneSpeciesSystem:
    d = system.degeneracies.astype(float)
    scale = np.sqrt(np.outer(d, d))[:, :, None]
    return OneSpeciesSystem(
        energies=system.energies, dipole=system.dipole * scale, hbar=system.hbar)


def zero_intra_level_coherences(rho_expanded, degeneracies) -> np.ndarray:
    """Copy of ``rho_expanded`` with coherences between sub-levels of one level removed."""
    rows = _level_of_row(degeneracies)
    mask = (rows[:, None] == rows[None, :]) & ~np.eye(rows.size, dtype=bool)
    out = np.array(rho_expanded, dtype=complex)
    out[mask] = 0.0
    return out


# --- two species --------------------------------------------------------------

def potential_two_species(system: TwoSpeciesSystem, field_value) -> np.ndarray:
    nc = system.nc
    V = np.zeros((nc + system.nv,) * 2, dtype=complex)
    V[:nc, :nc] = np.diag(system.conduction_energies) + _real_coupling(system.dipole_c, field_value)
    V[nc:, nc:] = np.diag(system.valence_energies) + _real_coupling(system.dipole_v, field_value)
    V[:nc, nc:] = _complex_coupling(system.dipole_cv, field_value)
    V[nc:, :nc] = V[:nc, nc:].conj().T
    return V


@dataclass
class ElectronHoleState:
    rho_c: np.ndarray
    rho_h: np.ndarray
    rho_ch: np.ndarray

    def __add__(self, other):
        return ElectronHoleState(self.rho_c + other.rho_c, self.rho_h + other.rho_h,
                                 self.rho_ch + other.rho_ch)

    def __mul__(self, scale):
        return ElectronHoleState(scale * self.rho_c, scale * self.rho_h, scale * self.rho_ch)

    __rmul__ = __mul__

    def max_abs_diff(self, other) -> float:
        return max(np.max(np.abs(self.rho_c - other.rho_c)),
                   np.max(np.abs(self.rho_h - other.rho_h)),
                   np.max(np.abs(self.rho_ch - other.rho_ch)))


def _check_split(n, split):
    nc, nv = split
    if nc < 1 or nv < 1 or nc + nv != n:
        raise ValidationError(f"split {tuple(split)} inconsistent with matrix size {n}")
    return nc, nv


def to_electron_hole(rho_tot, split) -> ElectronHoleState:
    rho_tot = np.asarray(rho_tot, dtype=complex)
    nc, nv = _check_split(rho_tot.shape[0], split)
    rho_v = rho_tot[nc:, nc:]
    return ElectronHoleState(
        rho_c=rho_tot[:nc, :nc].copy(),
        rho_h=np.eye(nv) - rho_v.T,
        rho_ch=rho_tot[:nc, nc:].copy(),
    )


def from_electron_hole(state: ElectronHoleState) -> np.ndarray:
    nc, nv = state.rho_c.shape[0], state.rho_h.shape[0]
    rho = np.zeros((nc + nv,) * 2, dtype=complex)
    rho[:nc, :nc] = state.rho_c
    rho[nc:, nc:] = np.eye(nv) - state.rho_h.T
    rho[:nc, nc:] = state.rho_ch
    rho[nc:, :nc] = state.rho_ch.conj().T
    return rho


def electron_hole_derivative(drho_tot, split) -> ElectronHoleState:
    """Chain rule of :func:`to_electron_hole` (d/dt of delta_ij vanishes)."""
    drho_tot = np.asarray(drho_tot)
    nc, _ = _check_split(drho_tot.shape[0], split)
    return ElectronHoleState(drho_tot[:nc, :nc].copy(), -drho_tot[nc:, nc:].T,
                             drho_tot[:nc, nc:].copy())


def eh_rhs(state: ElectronHoleState, system: TwoSpeciesSystem, field_value) -> ElectronHoleState:
    """Electron-hole Bloch equations (no Liouville structure)."""
    rc, rh, rch = state.rho_c, state.rho_h, state.rho_ch
    nc, nh = system.nc, system.nv
    if rc.shape != (nc, nc) or rh.shape != (nh, nh) or rch.shape != (nc, nh):
        raise ValidationError("electron-hole state does not match the system sizes")
    ec, eh = system.conduction_energies, system.hole_energies
    Wc = _real_coupling(system.dipole_c, field_value)
    Wh = _real_coupling(system.dipole_h, field_value)
    G = _complex_coupling(system.dipole_ch, field_value)   # E.M^ch_ik
    Gs = G.conj()                                          # E*.M^ch*_ik
    rhc = rch.conj().T

    d_c = ((ec[:, None] - ec[None, :]) * rc
           + np.einsum("ik,kj->ij", Wc, rc) - np.einsum("kj,ik->ij", Wc, rc)
           + np.einsum("ik,kj->ij", G, rhc) - np.einsum("jk,ik->ij", Gs, rch))
    d_h = ((eh[:, None] - eh[None, :]) * rh
           + np.einsum("jk,ik->ij", Wh, rh) - np.einsum("ki,kj->ij", Wh, rh)
           + np.einsum("ki,jk->ij", G, rhc) - np.einsum("kj,ki->ij", Gs, rch))
    d_ch = ((ec[:, None] + eh[None, :]) * rch
            + np.einsum("ik,kj->ij", Wc, rch) - np.einsum("kj,ik->ij", Wh, rch)
            + np.einsum("ik,jk->ij", G, np.eye(nh) - rh) - np.einsum("kj,ik->ij", G, rc))
    scale = 1.0 / (1j * system.hbar)
    return ElectronHoleState(scale * d_c, scale * d_h, scale * d_ch)


# --- reduced model with vanishing intra-band coherences --------------------------

@dataclass
class GHState:
    """Populations ``n_e`` (conduction), ``n_h`` (holes) and ``p[j, i] = rho^ch_ij``."""

    n_e: np.ndarray
    n_h: np.ndarray
    p: np.ndarray

    def __add__(self, other):
        return GHState(self.n_e + other.n_e, self.n_h + other.n_h, self.p + other.p)

    def __mul__(self, scale):
        return GHState(scale * self.n_e, scale * self.n_h, scale * self.p)

    __rmul__ = __mul__

    @classmethod
    def from_electron_hole(cls, state: ElectronHoleState) -> "GHState":
        return cls(np.diag(state.rho_c).real.copy(), np.diag(state.rho_h).real.copy(),
                   state.rho_ch.T.copy())

    def to_electron_hole(self) -> ElectronHoleState:
        return ElectronHoleState(np.diag(self.n_e).astype(complex),
                                 np.diag(self.n_h).astype(complex), self.p.T.copy())


def gh_rhs(n_e, n_h, p, system: TwoSpeciesSystem, field_value):
    """Reduced populations/polarisation system; returns (dn_e, dn_h, dp).

    Keeps the intra-band dipole terms in the polarisation equation.
    """
    n_e = np.asarray(n_e, dtype=float)
    n_h = np.asarray(n_h, dtype=float)
    p = np.asarray(p, dtype=complex)
    nc, nh = system.nc, system.nv
    if n_e.shape != (nc,) or n_h.shape != (nh,) or p.shape != (nh, nc):
        raise ValidationError("reduced state does not match the system sizes")
    ec, eh = system.conduction_energies, system.hole_energies
    Wc = _real_coupling(system.dipole_c, field_value)
    Wh = _real_coupling(system.dipole_h, field_value)
    G = _complex_coupling(system.dipole_ch, field_value)
    Gs = G.conj()

    # i hbar dn_e_i = sum_k E.M^ch_ik p*_ki - E*.M^ch*_ik p_ki
    d_ne = np.einsum("ik,ki->i", G, p.conj()) - np.einsum("ik,ki->i", Gs, p)
    # i hbar dn_h_j = sum_k E.M^ch_kj p*_jk - E*.M^ch*_kj p_jk
    d_nh = np.einsum("kj,jk->j", G, p.conj()) - np.einsum("kj,jk->j", Gs, p)
    # i hbar dp_ji = (e^c_i + e^h_j) p_ji + Re E.(M^c_ik p_jk - M^h_kj p_ki)
    #                + E.M^ch_ij (1 - n_h_j - n_e_i)
    d_p = ((eh[:, None] + ec[None, :]) * p
           + np.einsum("ik,jk->ji", Wc, p) - np.einsum("kj,ki->ji", Wh, p)
           + G.T * (1.0 - n_h[:, None] - n_e[None, :]))
    scale = 1.0 / (1j * system.hbar)
    return (scale * d_ne).real, (scale * d_nh).real, scale * d_p


def gh_state_rhs(state: GHState, system: TwoSpeciesSystem, field_value) -> GHState:
    return GHState(*gh_rhs(state.n_e, state.n_h, state.p, system, field_value))
