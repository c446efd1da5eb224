"""H2-norms of tau and collocation realizations.

For a stable pencil realization ``E x' = A x + B u, y = C x`` the squared
H2-norm is ``tr(C V C^T)`` where ``V`` solves the generalized Lyapunov
equation ``A V E^T + E V A^T = -B B^T``.  In the tau coordinates, ``V``
is also the coefficient matrix of the bivariate polynomial

    U(theta, theta') = sum_jk V_jk phi_j(theta) phi_k(theta'),

which approximates ``lambda(theta - theta')`` for the delay Lyapunov
function ``lambda``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import (DomainError, ParameterError, PreconditionError, SingularMatrixError,
                     SpectralConditionError, StabilityError)
from .numerics import solve_linear
from .orthopoly import eval_all, is_symmetric_basis
from .spectrum import char_roots, is_stable

__all__ = [
    "LyapunovSolution",
    "solve_generalized_lyapunov",
    "lyapunov_for",
    "h2_norm",
    "h2_exact_hayes",
    "h2_closed_form",
    "delay_lyapunov_scalar",
    "bivariate_eval",
    "bivariate_grid",
    "reversal_defect",
    "KRON_MAX_DIM",
]

#: Largest pencil dimension solved by the Kronecker route under ``method="auto"``.
KRON_MAX_DIM = 48


@dataclass(frozen=True)
class LyapunovSolution:
    """Symmetric solution ``V`` with its relative residual.

    ``residual`` is ``||A V E^T + E V A^T + B B^T||_F / (||A||_F ||V||_F ||E||_F)``.
    """

    V: np.ndarray
    residual: float
    n: int
    method: str

    @property
    def N(self):
        return self.V.shape[0] // self.n - 1


def _residual(E, A, B, V):
    R = A @ V @ E.T + E @ V @ A.T + B @ B.T
    denom = np.linalg.norm(A) * np.linalg.norm(V) * np.linalg.norm(E)
    num = np.linalg.norm(R)
    return float(num / denom) if denom > 0 else float(num)


def _generalized_bartels_stewart(E, A, Q):
    """Solve ``A V E^T + E V A^T = -Q`` through the complex QZ decomposition.

    With ``A = Z1 S Z2^H`` and ``E = Z1 T Z2^H`` (S, T upper triangular) the
    equation becomes ``S W T^H + T W S^H = F`` for ``W = Z2^H V Z2`` and
    ``F = -Z1^H Q Z1``.  Columns of ``W`` are found last to first, each from
    one upper triangular solve.  Working on the pencil directly avoids the
    rounding that forming ``E^{-1} A`` introduces.
    """
    S, T, Z1, Z2 = sla.qz(A, E, output="complex")
    F = -(Z1.conj().T @ Q @ Z1)
    d = A.shape[0]
    W = np.zeros((d, d), dtype=complex)
    for j in range(d - 1, -1, -1):
        rhs = F[:, j].copy()
        if j + 1 < d:
            tail = W[:, j + 1:]
            rhs -= S @ (tail @ T[j, j + 1:].conj()) + T @ (tail @ S[j, j + 1:].conj())
        M = np.conj(T[j, j]) * S + np.conj(S[j, j]) * T
        diag = np.abs(np.diag(M))
        if diag.min() <= d * np.finfo(float).eps * max(diag.max(), 1.0):
            raise SpectralConditionError("Lyapunov operator is singular (eigenvalues summing to zero)")
        W[:, j] = sla.solve_triangular(M, rhs)
    V = (Z2 @ W @ Z2.conj().T).real
    if not np.all(np.isfinite(V)):
        raise SpectralConditionError("Bartels-Stewart produced non-finite values")
    return V


def solve_generalized_lyapunov(E, A, B, n=1, method="auto"):
    """Solve ``A V E^T + E V A^T = -B B^T``.

    ``method="kron"`` vectorizes (column-major ``vec``) into
    ``(E (x) A + A (x) E) vec(V) = -vec(B B^T)`` and solves it densely;
    ``method="bartels-stewart"`` works on the generalized Schur form of the
    pencil (see :func:`_generalized_bartels_stewart`).  ``"auto"`` picks
    Kronecker up to :data:`KRON_MAX_DIM`.  The result is symmetrized
    afterwards.
    """
    E = np.asarray(E, dtype=float)
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    d = A.shape[0]
    if method == "auto":
        method = "kron" if d <= KRON_MAX_DIM else "bartels-stewart"
    Q = B @ B.T
    if method == "kron":
        K = np.kron(E, A) + np.kron(A, E)
        try:
            vec = solve_linear(K, -Q.ravel(order="F"))
        except SingularMatrixError as exc:
            raise SpectralConditionError(
                "Lyapunov operator is singular (eigenvalues summing to zero)") from exc
        V = vec.reshape((d, d), order="F")
    elif method == "bartels-stewart":
        V = _generalized_bartels_stewart(E, A, Q)
    else:
        raise ParameterError(f"unknown method {method!r}")
    V = 0.5 * (V + V.T)
    return LyapunovSolution(V, _residual(E, A, B, V), int(n), method)


def lyapunov_for(real, method="auto"):
    """Lyapunov solution of a (stable) tau or collocation realization."""
    if not is_stable(real):
        top = char_roots(real).eigenvalues[0]
        raise StabilityError(f"realization is not exponentially stable (rightmost root {top:.6g})")
    return solve_generalized_lyapunov(real.E, real.A, real.B, real.n, method)


def h2_norm(real, method="auto", solution=None):
    """``sqrt(tr(C V C^T))`` for a stable realization."""
    sol = lyapunov_for(real, method) if solution is None else solution
    value = float(np.trace(real.C @ sol.V @ real.C.T))
    return math.sqrt(max(value, 0.0))


def h2_exact_hayes(a, tau):
    """Exact H2-norm of ``x' = a x(t) + a x(t - tau) + u``, ``y = x``, a < 0."""
    if not a < 0:
        raise DomainError(f"closed form needs a < 0, got {a!r}")
    if tau < 0:
        raise DomainError(f"tau must be nonnegative, got {tau!r}")
    return math.sqrt((a * tau - 1.0) / (4.0 * a))


def h2_closed_form(sys):
    """Exact H2-norm when ``sys`` is scalar with ``A0 == A1 < 0``, else ``None``."""
    if sys.n != 1:
        return None
    a0, a1 = float(sys.A0[0, 0]), float(sys.A1[0, 0])
    if a0 != a1 or not a0 < 0:
        return None
    gain = float(np.linalg.norm(sys.C @ sys.B))
    return gain * h2_exact_hayes(a0, sys.tau)


def delay_lyapunov_scalar(a, tau, t):
    """``lambda(t) = (a tau - 2 a |t| - 1) / (4 a)`` for ``|t| <= tau``."""
    if not a < 0:
        raise DomainError(f"closed form needs a < 0, got {a!r}")
    if abs(t) > tau * (1 + 1e-14):
        raise DomainError(f"|t| = {abs(t)!r} exceeds tau = {tau!r}")
    return (a * tau - 2.0 * a * abs(t) - 1.0) / (4.0 * a)


def _eval_block_rows(spec, N, n, thetas):
    rows = eval_all(spec, N, np.asarray(thetas, dtype=float)).T
    return np.kron(rows, np.eye(n))


def bivariate_eval(sol, spec, theta, theta2):
    """``U(theta, theta') = [eps_theta] V [eps_theta']^T`` (an n x n block)."""
    left = _eval_block_rows(spec, sol.N, sol.n, [theta])
    right = _eval_block_rows(spec, sol.N, sol.n, [theta2])
    return left @ sol.V @ right.T


def bivariate_grid(sol, spec, thetas, thetas2):
    """Scalar case: matrix of ``U(thetas[i], thetas2[j])``."""
    if sol.n != 1:
        raise PreconditionError("bivariate_grid is for scalar systems")
    left = eval_all(spec, sol.N, np.asarray(thetas, dtype=float)).T
    right = eval_all(spec, sol.N, np.asarray(thetas2, dtype=float)).T
    return left @ sol.V @ right.T


def reversal_defect(sol, spec, grid_size):
    """``max |U(theta, theta') - U(-tau - theta, -tau - theta')|`` on a
    uniform ``grid_size x grid_size`` grid including both endpoints."""
    if sol.n != 1:
        raise PreconditionError("reversal symmetry is stated for scalar systems only")
    if not is_symmetric_basis(spec):
        raise PreconditionError(f"basis {spec.descriptor} is not symmetric")
    grid = np.linspace(-spec.tau, 0.0, int(grid_size))
    U = bivariate_grid(sol, spec, grid, grid)
    mirrored = -spec.tau - grid
    Ur = bivariate_grid(sol, spec, np.clip(mirrored, -spec.tau, 0.0), np.clip(mirrored, -spec.tau, 0.0))
    return float(np.max(np.abs(U - Ur)))
