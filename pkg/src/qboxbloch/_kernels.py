"""Hot numeric kernels: complex cyclic Jacobi and the unitary conjugation step.

Each kernel exists twice: an explicit-loop version compiled with numba and a
vectorised numpy version.  ``USE_NUMBA`` picks the one bound to the public
names; set ``QBOXBLOCH_DISABLE_NUMBA=1`` (or uninstall numba) to force the
numpy path.  Both are always importable for benchmarking and cross-checks.
"""

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

_DISABLED = os.environ.get("QBOXBLOCH_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")
HAVE_NUMBA = numba is not None
USE_NUMBA = HAVE_NUMBA and not _DISABLED

JACOBI_TOL = 1e-14
JACOBI_MAX_SWEEPS = 30


def _rotation(app, aqq, apq):
    """Return (c, s, t*|apq|, phase) zeroing apq; phase = apq/|apq|."""
    r = abs(apq)
    phase = apq / r
    theta = (aqq - app) / (2.0 * r)
    sign = 1.0 if theta >= 0.0 else -1.0
    t = sign / (abs(theta) + np.sqrt(theta * theta + 1.0))
    c = 1.0 / np.sqrt(t * t + 1.0)
    return c, t * c, t * r, phase


# --- numpy reference path --------------------------------------------------

def jacobi_eigh_numpy(a, tol=JACOBI_TOL, max_sweeps=JACOBI_MAX_SWEEPS):
    A = np.array(a, dtype=np.complex128)
    n = A.shape[0]
    U = np.eye(n, dtype=np.complex128)
    thresh = tol * np.sqrt(np.sum(np.abs(A) ** 2))
    offdiag = ~np.eye(n, dtype=bool)
    for _ in range(max_sweeps):
        if np.sqrt(np.sum(np.abs(A[offdiag]) ** 2)) <= thresh:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0:
                    continue
                app, aqq = A[p, p].real, A[q, q].real
                c, s, shift, phase = _rotation(app, aqq, apq)
                J = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]])
                idx = [p, q]
                A[:, idx] = A[:, idx] @ J
                A[idx, :] = J.conj().T @ A[idx, :]
                A[p, q] = A[q, p] = 0.0
                A[p, p] = app - shift
                A[q, q] = aqq + shift
                U[:, idx] = U[:, idx] @ J
    lam = A.diagonal().real.copy()
    order = np.argsort(lam, kind="stable")
    return lam[order], U[:, order]


def conjugate_numpy(rho, V, tau):
    """exp(-i tau V) rho exp(+i tau V) via the Jacobi eigenbasis of V."""
    lam, U = jacobi_eigh_numpy(V)
    W = (U * np.exp(-1j * tau * lam)) @ U.conj().T
    # one Newton-Schulz sweep: rotation round-off leaves a biased |W| > 1
    # that would otherwise accumulate as a linear trace drift
    W = W @ (1.5 * np.eye(W.shape[0]) - 0.5 * (W.conj().T @ W))
    return W @ rho @ W.conj().T


# --- numba path ---------------------------------------------------------------

def _jacobi_loops(a, tol, max_sweeps):
    n = a.shape[0]
    A = a.copy()
    U = np.zeros((n, n), dtype=np.complex128)
    for i in range(n):
        U[i, i] = 1.0
    total = 0.0
    for i in range(n):
        for j in range(n):
            total += A[i, j].real ** 2 + A[i, j].imag ** 2
    thresh = tol * np.sqrt(total)
    for _ in range(max_sweeps):
        off = 0.0
        for i in range(n):
            for j in range(n):
                if i != j:
                    off += A[i, j].real ** 2 + A[i, j].imag ** 2
        if np.sqrt(off) <= thresh:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                r = abs(apq)
                if r == 0.0:
                    continue
                app = A[p, p].real
                aqq = A[q, q].real
                phase = apq / r
                theta = (aqq - app) / (2.0 * r)
                sign = 1.0 if theta >= 0.0 else -1.0
                t = sign / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                jpp = c + 0j
                jpq = s + 0j
                jqp = -s * np.conj(phase)
                jqq = c * np.conj(phase)
                for k in range(n):
                    akp = A[k, p]
                    akq = A[k, q]
                    A[k, p] = akp * jpp + akq * jqp
                    A[k, q] = akp * jpq + akq * jqq
                for k in range(n):
                    apk = A[p, k]
                    aqk = A[q, k]
                    A[p, k] = np.conj(jpp) * apk + np.conj(jqp) * aqk
                    A[q, k] = np.conj(jpq) * apk + np.conj(jqq) * aqk
                A[p, q] = 0.0
                A[q, p] = 0.0
                A[p, p] = app - t * r
                A[q, q] = aqq + t * r
                for k in range(n):
                    ukp = U[k, p]
                    ukq = U[k, q]
                    U[k, p] = ukp * jpp + ukq * jqp
                    U[k, q] = ukp * jpq + ukq * jqq
    lam = np.empty(n)
    for i in range(n):
        lam[i] = A[i, i].real
    order = np.argsort(lam, kind="mergesort")
    return lam[order], U[:, order].copy()


def _make_conjugate(eigh):
    def _conjugate_loops(rho, V, tau):
        lam, U = eigh(V, JACOBI_TOL, JACOBI_MAX_SWEEPS)
        return _conjugate_in_basis(rho, lam, U, tau)
    return _conjugate_loops


def _conjugate_in_basis(rho, lam, U, tau):
    n = U.shape[0]
    W = np.zeros((n, n), dtype=np.complex128)
    for i in range(n):
        for j in range(n):
            acc = 0j
            for k in range(n):
                acc += U[i, k] * np.exp(-1j * tau * lam[k]) * np.conj(U[j, k])
            W[i, j] = acc
    # Newton-Schulz polish, as in conjugate_numpy
    G = np.zeros((n, n), dtype=np.complex128)
    for i in range(n):
        for j in range(n):
            acc = 0j
            for k in range(n):
                acc += np.conj(W[k, i]) * W[k, j]
            G[i, j] = (1.5 if i == j else 0.0) - 0.5 * acc
    P = np.zeros((n, n), dtype=np.complex128)
    for i in range(n):
        for j in range(n):
            acc = 0j
            for k in range(n):
                acc += W[i, k] * G[k, j]
            P[i, j] = acc
    W = P
    tmp = np.zeros((n, n), dtype=np.complex128)
    for i in range(n):
        for j in range(n):
            acc = 0j
            for k in range(n):
                acc += W[i, k] * rho[k, j]
            tmp[i, j] = acc
    out = np.zeros((n, n), dtype=np.complex128)
    for i in range(n):
        for j in range(n):
            acc = 0j
            for k in range(n):
                acc += tmp[i, k] * np.conj(W[j, k])
            out[i, j] = acc
    return out


if HAVE_NUMBA:
    _jacobi_nb = numba.njit(cache=True)(_jacobi_loops)
    _conjugate_in_basis = numba.njit(cache=True)(_conjugate_in_basis)
    _conjugate_nb = numba.njit(_make_conjugate(_jacobi_nb))

    def jacobi_eigh_numba(a, tol=JACOBI_TOL, max_sweeps=JACOBI_MAX_SWEEPS):
        return _jacobi_nb(np.ascontiguousarray(a, dtype=np.complex128), tol, max_sweeps)

    def conjugate_numba(rho, V, tau):
        return _conjugate_nb(np.ascontiguousarray(rho, dtype=np.complex128),
                             np.ascontiguousarray(V, dtype=np.complex128), float(tau))
else:  # pragma: no cover
    jacobi_eigh_numba = None
    conjugate_numba = None


if USE_NUMBA:
    jacobi_eigh = jacobi_eigh_numba
    conjugate = conjugate_numba
else:
    jacobi_eigh = jacobi_eigh_numpy
    conjugate = conjugate_numpy
