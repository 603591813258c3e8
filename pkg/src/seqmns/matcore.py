"""Dense complex linear algebra on small matrices.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``. The
arithmetic helpers are thin checked wrappers around numpy; the Hermitian
eigensolver is a cyclic complex Jacobi iteration running in the compiled core
(or its numpy fallback), so results are reproducible bit for bit on a given
backend.

All comparisons use the maximum absolute entry difference.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _backend
from .errors import (
    ConvergenceError,
    DimensionError,
    HermitianityError,
    NonFiniteError,
    NotPsdError,
)

DEFAULT_TOL = 1e-9
OFF_DIAGONAL_TOL = 1e-13
MAX_SWEEPS = 100
ROUNDOFF_SNAP = 8 * np.finfo(float).eps

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)


def as_matrix(m) -> np.ndarray:
    """Coerce ``m`` to a finite 2-d complex128 array."""
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
        raise DimensionError(f"expected a non-empty 2-d matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteError("matrix has non-finite entries")
    return arr


def eye(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.complex128)


def max_abs(m) -> float:
    m = np.asarray(m)
    return float(np.max(np.abs(m))) if m.size else 0.0


def max_abs_diff(a, b) -> float:
    return max_abs(np.asarray(a) - np.asarray(b))


def matmul(a, b) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise DimensionError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def adjoint(m) -> np.ndarray:
    return as_matrix(m).conj().T


def trace(m) -> complex:
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"trace of non-square matrix {m.shape}")
    return complex(np.trace(m))


def add(a, b) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != b.shape:
        raise DimensionError(f"cannot add {a.shape} and {b.shape}")
    return a + b


def sub(a, b) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != b.shape:
        raise DimensionError(f"cannot subtract {b.shape} from {a.shape}")
    return a - b


def scale(c: complex, m) -> np.ndarray:
    return complex(c) * as_matrix(m)


def commutator(a, b) -> np.ndarray:
    return matmul(a, b) - matmul(b, a)


def hermiticity_residual(m) -> float:
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got {m.shape}")
    return max_abs_diff(m, m.conj().T)


def partial_trace(m, dims: tuple[int, int], keep: int) -> np.ndarray:
    """Partial trace of an operator on ``dims[0] x dims[1]``; ``keep`` is 0 or 1."""
    m = as_matrix(m)
    da, db = dims
    if m.shape != (da * db, da * db):
        raise DimensionError(f"matrix of shape {m.shape} is not on a {da}x{db} space")
    m4 = m.reshape(da, db, da, db)
    if keep == 0:
        return np.einsum("ikjk->ij", m4)
    if keep == 1:
        return np.einsum("kikj->ij", m4)
    raise ValueError("keep must be 0 or 1")


@dataclass(frozen=True)
class EigDecomposition:
    """Eigenvalues in ascending order and unit eigenvectors as columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    sweeps: int = 0

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def _first_nonzero(vec: np.ndarray) -> int:
    big = np.flatnonzero(np.abs(vec) > 1e-12)
    return int(big[0]) if big.size else 0


def herm_eig(m, tol: float = DEFAULT_TOL) -> EigDecomposition:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Eigenvalues are sorted ascending. Each eigenvector is phase-normalized so
    its first non-negligible component is real and positive; equal eigenvalues
    are ordered by the position of that component.
    """
    m = as_matrix(m)
    herm = hermiticity_residual(m)
    if herm > tol:
        raise HermitianityError(f"matrix is not Hermitian (residual {herm:.3e})", herm)
    m = 0.5 * (m + m.conj().T)
    scale_ = max(1.0, float(np.linalg.norm(m)))
    w, v, sweeps, off = _backend.jacobi_eigh(m, OFF_DIAGONAL_TOL * scale_, MAX_SWEEPS)
    if sweeps < 0:
        raise ConvergenceError(
            f"Jacobi iteration did not converge in {MAX_SWEEPS} sweeps (off-norm {off:.3e})", off
        )
    v = np.asarray(v)
    n = v.shape[0]
    for k in range(n):
        col = v[:, k]
        lead = col[_first_nonzero(col)]
        v[:, k] = col * (abs(lead) / lead) / np.linalg.norm(col)
    order = sorted(range(n), key=lambda k: (w[k], _first_nonzero(v[:, k])))
    return EigDecomposition(np.asarray(w)[order], v[:, order], sweeps)


def psd_sqrt(m, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Principal square root of a positive semidefinite matrix.

    Eigenvalues in ``[-tol, 0)`` are treated as round-off and clipped to zero.
    """
    eig = herm_eig(m, tol)
    lowest = float(eig.eigenvalues[0])
    if lowest < -tol:
        raise NotPsdError(f"matrix is not PSD (lowest eigenvalue {lowest:.3e})", -lowest)
    w = np.clip(eig.eigenvalues, 0.0, None)
    # eigenvalues at the round-off floor are zero; their square roots would
    # otherwise inject errors of order sqrt(eps)
    w[w <= ROUNDOFF_SNAP * len(w) * max(float(w[-1]), 1e-300)] = 0.0
    root = np.sqrt(w)
    v = eig.eigenvectors
    s = (v * root) @ v.conj().T
    return 0.5 * (s + s.conj().T)


def psd_inv_sqrt(m, cutoff: float, tol: float = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Pseudo-inverse square root of a PSD matrix and the projector onto its kernel.

    Eigenvalues at or below ``cutoff`` count as zero.
    """
    eig = herm_eig(m, tol)
    w = eig.eigenvalues
    v = eig.eigenvectors
    keep = w > cutoff
    inv_root = np.zeros_like(w)
    inv_root[keep] = 1.0 / np.sqrt(w[keep])
    kernel = v[:, ~keep]
    return (v * inv_root) @ v.conj().T, kernel @ kernel.conj().T
