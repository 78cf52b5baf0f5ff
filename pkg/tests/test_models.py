import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qboxbloch import algebra, models
from qboxbloch.models import (
    ElectronHoleState, GHState, OneSpeciesSystem, TwoSpeciesSystem, ValidationError,
)
from qboxbloch.verify import random_density, random_dipole, random_hermitian, random_two_species

seeds = st.integers(0, 2**32 - 1)


# --- validation -----------------------------------------------------------------

def test_nonzero_dipole_diagonal_rejected():
    M = np.zeros((2, 2, 3), dtype=complex)
    M[1, 1, 2] = 0.1
    with pytest.raises(ValidationError, match="M_kk = 0"):
        OneSpeciesSystem([0.0, 1.0], M)


def test_non_hermitian_dipole_rejected():
    M = np.zeros((2, 2, 3), dtype=complex)
    M[0, 1, 0] = 1.0
    M[1, 0, 0] = 1j
    with pytest.raises(ValidationError, match="M_kl"):
        OneSpeciesSystem([0.0, 1.0], M)


def test_density_matrix_checks():
    assert np.allclose(models.density_matrix(np.eye(2) / 2), np.eye(2) / 2)
    with pytest.raises(ValidationError):
        models.density_matrix([[0.5, 1.0], [0.0, 0.5]])
    with pytest.raises(ValidationError):
        models.density_matrix([[1.5, 0.0], [0.0, 0.0]])
    models.density_matrix([[1.5, 0.0], [0.0, 0.0]], physical=False)


# --- one species ------------------------------------------------------------------

def test_potential_without_field_is_diagonal():
    sys = OneSpeciesSystem([0.0, 1.0, 4.0], random_dipole(np.random.default_rng(0), 3))
    np.testing.assert_array_equal(models.potential_one_species(sys, np.zeros(3)),
                                  np.diag([0.0, 1.0, 4.0]))


def test_potential_uses_real_part_of_field():
    M = np.zeros((2, 2, 3), dtype=complex)
    M[0, 1] = M[1, 0] = [1, 0, 0]
    sys = OneSpeciesSystem([0.0, 1.0], M)
    V = models.potential_one_species(sys, [2 + 3j, 0, 0])
    assert V[0, 1] == 2 and V[1, 0] == 2
    G, _, coords = algebra.derive_generator(sys, np.array([2 + 3j, 0, 0]))
    # row for rho_00 couples to rho_10 with -V_01 and to rho_01 with +V_10
    row = coords.index(("cc", 0, 0))
    assert G[row, coords.index(("cc", 1, 0))] == pytest.approx(V[0, 1])


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(2, 5))
def test_potential_hermitian(seed, n):
    rng = np.random.default_rng(seed)
    sys = OneSpeciesSystem(rng.normal(size=n), random_dipole(rng, n))
    V = models.potential_one_species(sys, rng.normal(size=3) + 1j * rng.normal(size=3))
    np.testing.assert_array_equal(V, V.conj().T)


def test_liouville_identity_and_diagonal_potential():
    V = np.diag([0.0, 1.0, 3.0])
    assert not models.liouville_rhs(V, np.eye(3)).any()
    rho = random_hermitian(np.random.default_rng(1), 3)
    hbar = 0.7
    d = models.liouville_rhs(V, rho, hbar)
    eps = np.diag(V)
    np.testing.assert_allclose(d, (-1j / hbar) * (eps[:, None] - eps[None, :]) * rho, atol=1e-15)


def test_liouville_shape_mismatch():
    with pytest.raises(ValueError):
        models.liouville_rhs(np.eye(2), np.eye(3))


@settings(max_examples=50, deadline=None)
@given(seeds, st.integers(2, 6))
def test_liouville_rhs_hermitian_traceless(seed, n):
    rng = np.random.default_rng(seed)
    V, rho = random_hermitian(rng, n), random_hermitian(rng, n)
    d = models.liouville_rhs(V, rho, rng.uniform(0.5, 2))
    scale = np.max(np.abs(V)) * np.max(np.abs(rho))
    assert np.max(np.abs(d - d.conj().T)) <= 1e-14 * scale
    assert abs(np.trace(d)) <= 1e-13 * scale * n


@settings(max_examples=50, deadline=None)
@given(seeds, st.integers(2, 6))
def test_complement_closure(seed, n):
    rng = np.random.default_rng(seed)
    V, rho = random_hermitian(rng, n), random_density(rng, n)
    np.testing.assert_allclose(models.liouville_rhs(V, np.eye(n) - rho),
                               -models.liouville_rhs(V, rho), atol=1e-13)


# --- degenerate levels ------------------------------------------------------------------

def test_expand_trivial_degeneracy():
    sys = OneSpeciesSystem([0.0, 1.0], random_dipole(np.random.default_rng(2), 2))
    ex = models.expand_degenerate(sys)
    np.testing.assert_array_equal(ex.energies, sys.energies)
    np.testing.assert_array_equal(ex.dipole, sys.dipole)


def test_expand_two_one():
    m = np.array([0.3, -0.2j, 0.1])
    M = np.zeros((2, 2, 3), dtype=complex)
    M[0, 1], M[1, 0] = m, m.conj()
    sys = OneSpeciesSystem([0.5, 2.0], M, degeneracies=[2, 1])
    ex = models.expand_degenerate(sys)
    np.testing.assert_array_equal(ex.energies, [0.5, 0.5, 2.0])
    np.testing.assert_array_equal(ex.dipole[0, 2], m)
    np.testing.assert_array_equal(ex.dipole[1, 2], m)
    assert not ex.dipole[0, 1].any() and not ex.dipole[0, 0].any()
    assert models.expanded_labels([2, 1]) == [(0, 0), (0, 1), (1, 0)]


def test_condense_examples():
    rho = random_hermitian(np.random.default_rng(4), 3)
    np.testing.assert_array_equal(models.condense(rho, [1, 1, 1]), rho)
    assert models.condense(np.eye(2), [2])[0, 0] == pytest.approx(1.0)
    assert models.condense(np.full((2, 2), 0.5), [2])[0, 0] == pytest.approx(1.0)


def test_condensed_system_dipole_scaling():
    m = 0.7
    M = np.zeros((2, 2, 3), dtype=complex)
    M[0, 1, 0] = M[1, 0, 0] = m
    sys = OneSpeciesSystem([0.0, 1.0], M, degeneracies=[1, 4])
    cs = models.condensed_system(sys)
    np.testing.assert_allclose(cs.dipole[0, 1], [2 * m, 0, 0])
    np.testing.assert_array_equal(cs.degeneracies, [1, 1])
    np.testing.assert_array_equal(cs.dipole, cs.dipole.conj().transpose(1, 0, 2))
    assert not cs.dipole[[0, 1], [0, 1]].any()


@settings(max_examples=30, deadline=None)
@given(seeds, st.lists(st.integers(1, 3), min_size=2, max_size=3))
def test_condensation_commutes_with_rhs(seed, degeneracies):
    rng = np.random.default_rng(seed)
    n = len(degeneracies)
    sys = OneSpeciesSystem(rng.normal(size=n), random_dipole(rng, n), degeneracies=degeneracies)
    e = rng.normal(size=3) + 1j * rng.normal(size=3)
    ex, cs = models.expand_degenerate(sys), models.condensed_system(sys)
    rho = random_density(rng, int(sum(degeneracies)))
    lhs = models.condense(models.liouville_rhs(models.potential_one_species(ex, e), rho), degeneracies)
    sigma = models.condense(rho, degeneracies)
    rhs = models.liouville_rhs(models.potential_one_species(cs, e), sigma)
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)


def test_zero_intra_level_coherences():
    rho = np.full((3, 3), 0.2, dtype=complex)
    out = models.zero_intra_level_coherences(rho, [2, 1])
    assert out[0, 1] == 0 and out[1, 0] == 0 and out[0, 2] == 0.2 and out[0, 0] == 0.2


# --- two species ----------------------------------------------------------------------------

def test_two_species_potential_examples():
    sys = random_two_species(np.random.default_rng(5), 2, 1)
    np.testing.assert_array_equal(models.potential_two_species(sys, np.zeros(3)),
                                  np.diag(np.r_[sys.conduction_energies, sys.valence_energies]))
    g = 0.4 + 0.3j
    rabi = TwoSpeciesSystem([1.5], [0.0], dipole_cv=np.array([[[1.0, 0, 0]]]))
    np.testing.assert_allclose(models.potential_two_species(rabi, [g, 0, 0]),
                               [[1.5, g], [np.conj(g), 0.0]])
    V = models.potential_two_species(sys, [1 + 2j, -1j, 0.5])
    np.testing.assert_array_equal(V, V.conj().T)


def test_electron_hole_examples():
    rho = np.zeros((3, 3), dtype=complex)
    rho[1:, 1:] = np.eye(2)
    eh = models.to_electron_hole(rho, (1, 2))
    assert not eh.rho_h.any()
    eh = models.to_electron_hole(np.zeros((3, 3)), (1, 2))
    np.testing.assert_array_equal(eh.rho_h, np.eye(2))
    with pytest.raises(ValidationError):
        models.to_electron_hole(np.zeros((3, 3)), (2, 2))


@settings(max_examples=50, deadline=None)
@given(seeds, st.integers(1, 3), st.integers(1, 3))
def test_electron_hole_round_trip(seed, nc, nv):
    rho = random_hermitian(np.random.default_rng(seed), nc + nv)
    back = models.from_electron_hole(models.to_electron_hole(rho, (nc, nv)))
    assert np.max(np.abs(back - rho)) <= 1e-15 * max(1.0, np.max(np.abs(rho)))


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(1, 3), st.integers(1, 3))
def test_eh_rhs_chain_rule(seed, nc, nv):
    rng = np.random.default_rng(seed)
    sys = random_two_species(rng, nc, nv)
    e = rng.normal(size=3) + 1j * rng.normal(size=3)
    rho = random_hermitian(rng, nc + nv)
    V = models.potential_two_species(sys, e)
    ref = models.electron_hole_derivative(models.liouville_rhs(V, rho, sys.hbar), sys.split)
    got = models.eh_rhs(models.to_electron_hole(rho, sys.split), sys, e)
    scale = max(np.max(np.abs(ref.rho_c)), np.max(np.abs(ref.rho_h)), np.max(np.abs(ref.rho_ch)))
    assert got.max_abs_diff(ref) <= 1e-12 * scale


def test_eh_rhs_free_rotation():
    sys = TwoSpeciesSystem([2.0, 3.0], [-0.5], hbar=0.8)
    state = ElectronHoleState(np.diag([0.3, 0.1]).astype(complex), np.diag([0.6]).astype(complex),
                              np.array([[0.2 + 0.1j], [0.05j]]))
    d = models.eh_rhs(state, sys, np.zeros(3))
    assert not d.rho_c.any() and not d.rho_h.any()
    freq = (sys.conduction_energies[:, None] + sys.hole_energies[None, :]) / sys.hbar
    np.testing.assert_allclose(d.rho_ch, -1j * freq * state.rho_ch)


def test_eh_rhs_pauli_blocked_source():
    sys = random_two_species(np.random.default_rng(6), 2, 2)
    state = ElectronHoleState(np.zeros((2, 2), complex), np.eye(2, dtype=complex),
                              np.zeros((2, 2), complex))
    d = models.eh_rhs(state, sys, np.array([1.0, 0.5j, -0.3]))
    assert np.max(np.abs(d.rho_ch)) == 0


# --- reduced model -------------------------------------------------------------------------

def test_gh_free_evolution():
    sys = TwoSpeciesSystem([2.0, 3.0], [-0.5, 0.2], hbar=1.3)
    p = np.array([[0.1, 0.2j], [0.3, -0.1]])
    dn_e, dn_h, dp = models.gh_rhs([0.2, 0.1], [0.4, 0.0], p, sys, np.zeros(3))
    assert not dn_e.any() and not dn_h.any()
    freq = (sys.hole_energies[:, None] + sys.conduction_energies[None, :]) / sys.hbar
    np.testing.assert_allclose(dp, -1j * freq * p)


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(1, 3), st.integers(1, 3))
def test_gh_matches_eh_on_states_without_intraband_coherence(seed, nc, nv):
    rng = np.random.default_rng(seed)
    sys = random_two_species(rng, nc, nv)
    e = rng.normal(size=3) + 1j * rng.normal(size=3)
    state = ElectronHoleState(np.diag(rng.uniform(size=nc)).astype(complex),
                              np.diag(rng.uniform(size=nv)).astype(complex),
                              rng.normal(size=(nc, nv)) + 1j * rng.normal(size=(nc, nv)))
    eh = models.eh_rhs(state, sys, e)
    gh = models.gh_state_rhs(GHState.from_electron_hole(state), sys, e)
    np.testing.assert_allclose(gh.n_e, np.diag(eh.rho_c).real, atol=1e-12)
    np.testing.assert_allclose(gh.n_h, np.diag(eh.rho_h).real, atol=1e-12)
    np.testing.assert_allclose(gh.p, eh.rho_ch.T, atol=1e-12)


def test_gh_state_round_trip():
    gh = GHState(np.array([0.2, 0.1]), np.array([0.3]), np.array([[0.1 + 0.2j, -0.4j]]))
    back = GHState.from_electron_hole(gh.to_electron_hole())
    np.testing.assert_array_equal(back.p, gh.p)
    np.testing.assert_array_equal(back.n_e, gh.n_e)


def test_gh_shape_mismatch():
    sys = TwoSpeciesSystem([1.0], [0.0])
    with pytest.raises(ValidationError):
        models.gh_rhs([0.0, 0.0], [0.0], np.zeros((1, 1)), sys, np.zeros(3))
