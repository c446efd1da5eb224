"""Dense linear-algebra kernel for desk-scale pencils.

Thin wrappers around LAPACK (via scipy) that add the checks the rest of the
package relies on: explicit singularity detection with the offending pivot,
and a residual for every computed eigenpair.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import NumericalError, SingularMatrixError

__all__ = ["Spectrum", "solve_linear", "eigenvalues_pencil", "kron"]

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues of a pencil together with their residuals.

    ``residuals[i]`` is ``||(A - lambda_i E) v_i||`` for the unit-norm
    eigenvector ``v_i``.
    """

    eigenvalues: np.ndarray
    residuals: np.ndarray

    def __len__(self):
        return len(self.eigenvalues)

    def sorted_by_real_part(self):
        """Copy ordered by descending real part (ties: descending imag)."""
        order = np.lexsort((-self.eigenvalues.imag, -self.eigenvalues.real))
        return Spectrum(self.eigenvalues[order], self.residuals[order])

    def flagged(self, A_norm, E_norm, rtol=1e-8):
        """Boolean mask of eigenvalues whose residual exceeds
        ``rtol * (||A|| + |lambda| ||E||)``."""
        bound = rtol * (A_norm + np.abs(self.eigenvalues) * E_norm)
        return self.residuals > bound


def solve_linear(A, rhs, rtol=None):
    """Solve ``A X = rhs`` by LU with partial pivoting.

    Raises :class:`SingularMatrixError` if the smallest pivot is below
    ``rtol * ||A||`` (default ``rtol = n * eps``).
    """
    A = np.asarray(A)
    rhs = np.asarray(rhs)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"A must be square, got shape {A.shape}")
    if rhs.shape[0] != A.shape[0]:
        raise ValueError(f"rhs has {rhs.shape[0]} rows, A has {A.shape[0]}")
    n = A.shape[0]
    if rtol is None:
        rtol = n * _EPS
    scale = np.max(np.abs(A)) if A.size else 0.0
    with warnings.catch_warnings():
        # exact zero pivots are reported below as SingularMatrixError
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu, piv = sla.lu_factor(A, check_finite=True)
    pivot = np.min(np.abs(np.diag(lu))) if n else 1.0
    if not pivot > rtol * scale:
        raise SingularMatrixError(
            f"matrix is singular to working precision (smallest pivot {pivot:.3e})", pivot)
    return sla.lu_solve((lu, piv), rhs)


def eigenvalues_pencil(A, E=None):
    """Eigenvalues of the pencil (A, E), i.e. of ``E^{-1} A``.

    ``E`` must be nonsingular; ``None`` means the identity.
    """
    A = np.asarray(A, dtype=float if np.isrealobj(A) else complex)
    if E is None:
        M = A
        E = np.eye(A.shape[0])
    else:
        E = np.asarray(E)
        if E.shape != A.shape:
            raise ValueError(f"shape mismatch: A {A.shape}, E {E.shape}")
        M = solve_linear(E, A)
    try:
        lam, vecs = sla.eig(M)
    except sla.LinAlgError as exc:
        raise NumericalError(f"dense eigenvalue iteration failed: {exc}") from exc
    vecs = vecs / np.linalg.norm(vecs, axis=0)
    res = np.linalg.norm(A @ vecs - (E @ vecs) * lam, axis=0)
    return Spectrum(eigenvalues=lam, residuals=res)


def kron(A, B):
    """Kronecker product; block (i, j) equals ``A[i, j] * B``."""
    return np.kron(np.asarray(A), np.asarray(B))
