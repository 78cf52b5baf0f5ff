"""Hermitian eigendecomposition by cyclic complex Jacobi rotations."""

import numpy as np

from . import _kernels

HERMITIAN_INPUT_TOL = 1e-12


def hermitian_eig(H, tol: float = _kernels.JACOBI_TOL, max_sweeps: int = _kernels.JACOBI_MAX_SWEEPS):
    """Return ``(eigenvalues ascending, U)`` with ``H U = U diag(eigenvalues)``.

    Raises ValueError when ``H`` is not Hermitian within 1e-12 (relative to
    its largest entry once that exceeds one).
    """
    H = np.asarray(H, dtype=complex)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {H.shape}")
    scale = max(1.0, np.max(np.abs(H), initial=0.0))
    defect = np.max(np.abs(H - H.conj().T), initial=0.0)
    if defect > HERMITIAN_INPUT_TOL * scale:
        raise ValueError(f"matrix is not Hermitian (defect {defect:.3g})")
    return _kernels.jacobi_eigh((H + H.conj().T) / 2, tol, max_sweeps)
