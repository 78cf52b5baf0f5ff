"""Second-quantization algebra for conduction/valence ladder operators.

Expressions are finite sums of complex-weighted words of creation and
annihilation factors.  :func:`normal_order` rewrites them into canonical
form: daggered factors first, each group sorted by ``(species, level)``.
Two expressions are equal iff their canonical term maps are equal.

Operators of the same species obey canonical anticommutation (fermions) or
commutation (bosons) relations; operators of different species commute.

The module also turns quadratic expressions into linear forms over
density-matrix entries, and assembles the Heisenberg generator of the
density matrix directly from a Hamiltonian.  That generator is the
independent oracle for the hand-coded right-hand sides in
:mod:`qboxbloch.models`.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from types import MappingProxyType
from typing import Iterable, Mapping, NamedTuple

import numpy as np

FERMION = "fermion"
BOSON = "boson"
STATISTICS = (FERMION, BOSON)

CONDUCTION = 0
VALENCE = 1
SPECIES_NAMES = {CONDUCTION: "c", VALENCE: "v"}

PRUNE_TOL = 1e-15
DEFAULT_MAX_LEVELS = 8

HAMILTONIAN_KINDS = ("free_e", "laser_L", "free_c", "free_v", "laser_c", "laser_v", "laser_cv")

# (species of the annihilated factor, species of the created factor) -> block
_BLOCK_OF = {
    (CONDUCTION, CONDUCTION): "cc",
    (VALENCE, VALENCE): "vv",
    (CONDUCTION, VALENCE): "cv",
    (VALENCE, CONDUCTION): "vc",
}
_SPECIES_OF_BLOCK = {v: k for k, v in _BLOCK_OF.items()}


class AlgebraError(ValueError):
    """Raised for ill-posed algebra requests."""


class NonClosedExpectation(AlgebraError):
    """A term of degree other than 0 or (1 dagger, 1 plain) survived reduction."""


class Factor(NamedTuple):
    species: int
    level: int
    dagger: bool

    def __str__(self):
        return f"{SPECIES_NAMES[self.species]}{self.level}{'^' if self.dagger else ''}"


def _order_key(f: Factor):
    return (not f.dagger, f.species, f.level)


@lru_cache(maxsize=None)
def _order_word(statistics: str, word: tuple) -> tuple:
    """Normal-order a bare word; returns ((word, integer coefficient), ...)."""
    fermion = statistics == FERMION
    for idx in range(len(word) - 1):
        a, b = word[idx], word[idx + 1]
        if fermion and a == b:
            return ()
        if _order_key(a) > _order_key(b):
            sign = -1 if (fermion and a.species == b.species) else 1
            swapped = word[:idx] + (b, a) + word[idx + 2:]
            out: dict = {}
            for w, c in _order_word(statistics, swapped):
                out[w] = out.get(w, 0) + sign * c
            contracted = (
                not a.dagger and b.dagger
                and a.species == b.species and a.level == b.level
            )
            if contracted:
                for w, c in _order_word(statistics, word[:idx] + word[idx + 2:]):
                    out[w] = out.get(w, 0) + c
            return tuple((w, c) for w, c in out.items() if c != 0)
    return ((word, 1),)


def _merge(pairs: Iterable[tuple[tuple, complex]]) -> dict:
    out: dict = {}
    for word, coeff in pairs:
        word = tuple(word)
        out[word] = out.get(word, 0.0) + coeff
    return {w: complex(c) for w, c in out.items() if abs(c) >= PRUNE_TOL}


def _is_canonical_word(statistics, word) -> bool:
    keys = [_order_key(f) for f in word]
    if any(a > b for a, b in zip(keys, keys[1:])):
        return False
    return statistics != FERMION or len(set(word)) == len(word)


class OperatorExpr:
    """Immutable sum of complex-weighted ladder-operator words.

    Words are stored as given (identical words merged, vanishing
    coefficients dropped).  Use :func:`normal_order` for the canonical form;
    ``==`` compares canonical forms.
    """

    __slots__ = ("_statistics", "_terms")

    def __init__(self, statistics: str = FERMION, terms: Mapping | Iterable = ()):
        if statistics not in STATISTICS:
            raise AlgebraError(f"unknown statistics {statistics!r}")
        pairs = terms.items() if isinstance(terms, Mapping) else terms
        self._statistics = statistics
        self._terms = MappingProxyType(_merge(pairs))

    @property
    def statistics(self) -> str:
        return self._statistics

    @property
    def terms(self) -> Mapping[tuple, complex]:
        return self._terms

    @property
    def is_canonical(self) -> bool:
        return all(_is_canonical_word(self._statistics, w) for w in self._terms)

    @classmethod
    def scalar(cls, value: complex, statistics: str = FERMION) -> "OperatorExpr":
        return cls(statistics, {(): value})

    @classmethod
    def zero(cls, statistics: str = FERMION) -> "OperatorExpr":
        return cls(statistics)

    @classmethod
    def word(cls, factors: Iterable[Factor], coeff: complex = 1.0,
             statistics: str = FERMION) -> "OperatorExpr":
        return cls(statistics, [(tuple(factors), coeff)])

    def _coerce(self, other) -> "OperatorExpr":
        if not isinstance(other, OperatorExpr):
            return OperatorExpr.scalar(other, self._statistics)
        if self._statistics != other._statistics:
            raise AlgebraError(
                f"statistics mismatch: {self._statistics} vs {other._statistics}")
        return other

    def __add__(self, other):
        other = self._coerce(other)
        return OperatorExpr(self._statistics,
                            itertools.chain(self._terms.items(), other._terms.items()))

    __radd__ = __add__

    def __neg__(self):
        return OperatorExpr(self._statistics, {w: -c for w, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, OperatorExpr):
            other = self._coerce(other)
            return OperatorExpr(self._statistics, (
                (w1 + w2, c1 * c2)
                for (w1, c1), (w2, c2) in itertools.product(
                    self._terms.items(), other._terms.items())
            ))
        return OperatorExpr(self._statistics,
                            {w: c * other for w, c in self._terms.items()})

    def __rmul__(self, other):
        return OperatorExpr(self._statistics,
                            {w: other * c for w, c in self._terms.items()})

    def __eq__(self, other):
        if not isinstance(other, OperatorExpr):
            return NotImplemented
        if self._statistics != other._statistics:
            return False
        return dict(normal_order(self).terms) == dict(normal_order(other).terms)

    def __hash__(self):
        return hash((self._statistics, frozenset(normal_order(self).terms.items())))

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not normal_order(self).terms

    def degree(self) -> int:
        return max((len(w) for w in self._terms), default=0)

    def almost_equal(self, other: "OperatorExpr", tol: float = 1e-12) -> bool:
        diff = normal_order(self - other)
        return all(abs(c) <= tol for c in diff.terms.values())

    def __repr__(self):
        if not self._terms:
            return f"OperatorExpr({self._statistics}, 0)"
        body = " + ".join(
            f"({c:.6g})" + ("" if not w else " " + " ".join(map(str, w)))
            for w, c in sorted(self._terms.items(), key=lambda kv: (len(kv[0]), kv[0]))
        )
        return f"OperatorExpr({self._statistics}, {body})"


def create(level: int, species: int = CONDUCTION, statistics: str = FERMION) -> OperatorExpr:
    return OperatorExpr.word([Factor(species, level, True)], statistics=statistics)


def annihilate(level: int, species: int = CONDUCTION, statistics: str = FERMION) -> OperatorExpr:
    return OperatorExpr.word([Factor(species, level, False)], statistics=statistics)


def normal_order(expr: OperatorExpr) -> OperatorExpr:
    """Canonical form: creators before annihilators, each group sorted.

    Same-species swaps pick up a sign for fermions; ``x_i x_i^dagger``
    contracts to ``1 -/+ x_i^dagger x_i``; identical fermionic factors
    annihilate the word.
    """
    stats = expr.statistics
    out: dict = {}
    for word, coeff in expr.terms.items():
        for w, c in _order_word(stats, word):
            out[w] = out.get(w, 0.0) + c * coeff
    return OperatorExpr(stats, out)


def commutator(a: OperatorExpr, b: OperatorExpr) -> OperatorExpr:
    if a.statistics != b.statistics:
        raise AlgebraError(f"statistics mismatch: {a.statistics} vs {b.statistics}")
    return normal_order(a * b - b * a)


# --- expectation values ---------------------------------------------------

class ExpectationForm(NamedTuple):
    """``constant + sum(coeff * rho[block][i, j])``."""

    constant: complex
    coefficients: Mapping[tuple[str, int, int], complex]

    def evaluate(self, blocks: Mapping[str, np.ndarray]) -> complex:
        total = complex(self.constant)
        for (block, i, j), c in self.coefficients.items():
            total += c * blocks[block][i, j]
        return total


def to_expectation(expr: OperatorExpr) -> ExpectationForm:
    """Reduce a quadratic canonical expression to density-matrix entries.

    ``x_j^dagger y_i`` maps to ``rho^{block}_{ij}`` with block fixed by the
    species of ``y`` then ``x`` (so ``v_j^dagger c_i`` is ``rho^cv_ij``).
    """
    constant = 0j
    coeffs: dict = {}
    for word, c in normal_order(expr).terms.items():
        if len(word) == 0:
            constant += c
            continue
        if len(word) == 2 and word[0].dagger and not word[1].dagger:
            x, y = word
            key = (_BLOCK_OF[(y.species, x.species)], y.level, x.level)
            coeffs[key] = coeffs.get(key, 0j) + c
            continue
        raise NonClosedExpectation(
            f"non-closed expectation: term {' '.join(map(str, word))} "
            f"(coefficient {c:.6g}) is not quadratic")
    coeffs = {k: v for k, v in coeffs.items() if abs(v) >= PRUNE_TOL}
    return ExpectationForm(constant, MappingProxyType(coeffs))


def observable(block: str, i: int, j: int, statistics: str = FERMION) -> OperatorExpr:
    """The operator whose expectation is ``rho^{block}_{ij}``."""
    annihilated, created = _SPECIES_OF_BLOCK[block]
    return OperatorExpr.word(
        [Factor(created, j, True), Factor(annihilated, i, False)], statistics=statistics)


# --- Hamiltonians ---------------------------------------------------------

def _dot(field, vector) -> complex:
    return complex(np.dot(np.asarray(field), np.asarray(vector)))


def _free(energies, species, statistics):
    return OperatorExpr(statistics, [
        ((Factor(species, k, True), Factor(species, k, False)), float(e))
        for k, e in enumerate(energies)
    ])


def _laser_intra(dipole, field, species, statistics):
    # 1/2 sum_{k,l} (E.M_kl c_k^dag c_l + E*.M_kl* c_l^dag c_k)
    n = dipole.shape[0]
    pairs = []
    for k in range(n):
        for l in range(n):
            g = _dot(field, dipole[k, l])
            pairs.append(((Factor(species, k, True), Factor(species, l, False)), 0.5 * g))
            pairs.append(((Factor(species, l, True), Factor(species, k, False)), 0.5 * np.conj(g)))
    return OperatorExpr(statistics, pairs)


def _laser_cv(dipole_cv, field, statistics):
    # sum_{k in c, l in v} (E.M^cv_kl c_k^dag v_l + E*.M^cv*_kl v_l^dag c_k); no 1/2
    nc, nv = dipole_cv.shape[:2]
    pairs = []
    for k in range(nc):
        for l in range(nv):
            g = _dot(field, dipole_cv[k, l])
            pairs.append(((Factor(CONDUCTION, k, True), Factor(VALENCE, l, False)), g))
            pairs.append(((Factor(VALENCE, l, True), Factor(CONDUCTION, k, False)), np.conj(g)))
    return OperatorExpr(statistics, pairs)


def _is_two_species(system) -> bool:
    return hasattr(system, "conduction_energies")


def build_hamiltonian(system, field_value, kind: str, statistics: str = FERMION) -> OperatorExpr:
    """Transcribe one Hamiltonian piece for ``system`` at a frozen field value."""
    field_value = np.asarray(field_value, dtype=complex).reshape(3)
    two = _is_two_species(system)
    if kind not in HAMILTONIAN_KINDS:
        raise AlgebraError(f"unknown Hamiltonian kind {kind!r}")
    if kind in ("free_e", "laser_L"):
        if two:
            raise AlgebraError(f"kind {kind!r} needs a one-species system")
        if kind == "free_e":
            return _free(system.energies, CONDUCTION, statistics)
        return _laser_intra(system.dipole, field_value, CONDUCTION, statistics)
    if not two:
        raise AlgebraError(f"kind {kind!r} needs a two-species system")
    if kind == "free_c":
        return _free(system.conduction_energies, CONDUCTION, statistics)
    if kind == "free_v":
        return _free(system.valence_energies, VALENCE, statistics)
    if kind == "laser_c":
        return _laser_intra(system.dipole_c, field_value, CONDUCTION, statistics)
    if kind == "laser_v":
        return _laser_intra(system.dipole_v, field_value, VALENCE, statistics)
    return _laser_cv(system.dipole_cv, field_value, statistics)


def total_hamiltonian(system, field_value, statistics: str = FERMION) -> OperatorExpr:
    if _is_two_species(system):
        kinds = ("free_c", "free_v", "laser_c", "laser_v", "laser_cv")
    else:
        kinds = ("free_e", "laser_L")
    h = OperatorExpr.zero(statistics)
    for kind in kinds:
        h = h + build_hamiltonian(system, field_value, kind, statistics)
    return h


def coordinates(system) -> list[tuple[str, int, int]]:
    """Density-matrix coordinates in row-major order of the composite matrix.

    For a two-species system the composite index runs over conduction levels
    then valence levels, so the list matches ``rho_tot.ravel()``.
    """
    if not _is_two_species(system):
        n = len(system.energies)
        return [("cc", i, j) for i in range(n) for j in range(n)]
    nc, nv = len(system.conduction_energies), len(system.valence_energies)
    labels = [(CONDUCTION, i) for i in range(nc)] + [(VALENCE, i) for i in range(nv)]
    return [
        (_BLOCK_OF[(sa, sb)], i, j)
        for (sa, i), (sb, j) in itertools.product(labels, labels)
    ]


def derive_generator(system, field_value, statistics: str = FERMION,
                     max_levels: int = DEFAULT_MAX_LEVELS, hamiltonian: OperatorExpr | None = None):
    """Assemble ``G`` and ``b`` with ``i hbar d/dt vec(rho) = G vec(rho) + b``.

    Each row is ``<[A, H]>`` for the observable ``A`` of that coordinate,
    reduced symbolically.  ``vec`` is the row-major flattening of the
    (composite) density matrix.  Returns ``(G, b, coords)``.
    """
    coords = coordinates(system)
    if _is_two_species(system):
        n_levels = len(system.conduction_energies) + len(system.valence_energies)
    else:
        n_levels = len(system.energies)
    if n_levels > max_levels:
        raise AlgebraError(f"{n_levels} levels exceeds the oracle bound {max_levels}")
    h = hamiltonian if hamiltonian is not None else total_hamiltonian(system, field_value, statistics)
    index = {c: k for k, c in enumerate(coords)}
    dim = len(coords)
    G = np.zeros((dim, dim), dtype=complex)
    b = np.zeros(dim, dtype=complex)
    for row, (block, i, j) in enumerate(coords):
        form = to_expectation(commutator(observable(block, i, j, statistics), h))
        b[row] = form.constant
        for key, c in form.coefficients.items():
            G[row, index[key]] += c
    return G, b, coords


# --- Fock-space representation ---------------------------------------------

def fock_basis(n_modes: int, statistics: str = FERMION, max_occupation: int = 3):
    """Occupation tuples in bit-pattern (lexicographic) order."""
    top = 1 if statistics == FERMION else max_occupation
    return list(itertools.product(range(top + 1), repeat=n_modes))


def fock_matrix(expr: OperatorExpr, modes: Mapping[int, int] | int,
                max_occupation: int = 3) -> np.ndarray:
    """Dense matrix of ``expr`` on a (truncated) Fock space.

    ``modes`` gives the number of levels per species (an int means
    conduction only).  Modes are laid out conduction first.  Fermionic
    signs follow Jordan-Wigner within each species only, so different
    species commute.  Bosonic modes are truncated at ``max_occupation``.
    """
    if isinstance(modes, int):
        modes = {CONDUCTION: modes}
    offsets, total = {}, 0
    for sp in sorted(modes):
        offsets[sp] = total
        total += modes[sp]
    stats = expr.statistics
    basis = fock_basis(total, stats, max_occupation)
    index = {s: k for k, s in enumerate(basis)}
    top = 1 if stats == FERMION else max_occupation

    def apply(factor: Factor, state, amp):
        m = offsets[factor.species] + factor.level
        occ = state[m]
        if factor.dagger:
            if occ + 1 > top:
                return None, 0.0
            new_occ = occ + 1
            amp *= np.sqrt(new_occ)
        else:
            if occ == 0:
                return None, 0.0
            new_occ = occ - 1
            amp *= np.sqrt(occ)
        if stats == FERMION:
            start = offsets[factor.species]
            parity = sum(state[start:m])
            amp *= (-1) ** parity
        return state[:m] + (new_occ,) + state[m + 1:], amp

    mat = np.zeros((len(basis), len(basis)), dtype=complex)
    for word, c in expr.terms.items():
        for col, state in enumerate(basis):
            s, amp = state, complex(c)
            for factor in reversed(word):
                s, amp = apply(factor, s, amp)
                if s is None:
                    break
            if s is not None:
                mat[index[s], col] += amp
    return mat
