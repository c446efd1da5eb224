"""Rational approximants of the delay exponential and transfer functions.

The tau discretization replaces ``exp(s theta)`` by ``r_N(s, theta)``, the
degree-N polynomial in theta with ``r_N(s, 0) = 1`` whose derivative equals
``s`` times its truncation to degree N-1.  Collocation does the same with
``p_N(s, theta)``, whose derivative matches ``s p_N`` at the nonzero mesh
points.  Both enter the transfer function only through their value at
``theta = -tau``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .discretize import barycentric_weights, diff_matrix, lagrange_diff_matrix, lagrange_row
from .errors import PoleError, SingularMatrixError
from .numerics import solve_linear
from .orthopoly import eval_all

__all__ = [
    "RationalFunction",
    "rn_explicit",
    "rn_eval_solve",
    "pn_collocation",
    "tf_exact",
    "tf_reduced",
    "tf_state_space",
    "series_coefficients",
    "pade_moment_defect",
    "pade_exp_coefficients",
    "rn_boundary_modulus",
]

_POLE_RTOL = 1e-12


@dataclass(frozen=True)
class RationalFunction:
    """``sum_k num[k] s^k / sum_k den[k] s^k`` (ascending coefficients)."""

    num: np.ndarray
    den: np.ndarray

    def __call__(self, s):
        s = np.asarray(s, dtype=complex)
        top = np.polynomial.polynomial.polyval(s, self.num)
        bottom = np.polynomial.polynomial.polyval(s, self.den)
        tiny = _POLE_RTOL * np.linalg.norm(self.den)
        if np.any(np.abs(bottom) < tiny):
            raise PoleError(f"denominator vanishes near s={s!r}", float(np.min(np.abs(bottom))))
        out = top / bottom
        return complex(out) if out.ndim == 0 else out

    def normalized(self):
        """Coefficients scaled so that the leading denominator coefficient is 1."""
        lead = self.den[-1]
        return RationalFunction(self.num / lead, self.den / lead)


def rn_explicit(spec, N, theta):
    """Coefficients of r_N(s, theta): ``num[k] = phi_N^(N-k)(theta)``,
    ``den[k] = phi_N^(N-k)(0)``."""
    num = np.array([eval_all(spec, N, theta, N - k)[N] for k in range(N + 1)])
    den = np.array([eval_all(spec, N, 0.0, N - k)[N] for k in range(N + 1)])
    return RationalFunction(num, den)


def rn_eval_solve(spec, N, s, theta):
    """r_N(s, theta) from the (N+1)-square system

        [phi_k(0); s [I_N | 0] - D] x = e_0,   r_N = [phi_k(theta)] . x
    """
    M = np.zeros((N + 1, N + 1), dtype=complex)
    M[0] = eval_all(spec, N, 0.0)
    M[1:] = s * np.eye(N, N + 1) - diff_matrix(spec, N)
    rhs = np.zeros(N + 1, dtype=complex)
    rhs[0] = 1.0
    try:
        x = solve_linear(M, rhs)
    except SingularMatrixError as exc:
        raise PoleError(f"s={s!r} is a pole of r_N", exc.pivot) from exc
    return complex(eval_all(spec, N, theta) @ x)


def pn_collocation(mesh, s, theta):
    """p_N(s, theta): the degree-N polynomial with ``p(0) = 1`` and
    ``p'(theta_k) = s p(theta_k)`` at the nonzero mesh points."""
    pts = mesh.points
    N = mesh.N
    M = np.zeros((N + 1, N + 1), dtype=complex)
    M[:N] = lagrange_diff_matrix(pts)[:N] - s * np.eye(N, N + 1)
    M[N, N] = 1.0
    rhs = np.zeros(N + 1, dtype=complex)
    rhs[N] = 1.0
    try:
        values = solve_linear(M, rhs)
    except SingularMatrixError as exc:
        raise PoleError(f"s={s!r} is a pole of p_N", exc.pivot) from exc
    return complex(lagrange_row(pts, theta, barycentric_weights(pts)) @ values)


def _resolvent_apply(M, B, C, what):
    try:
        X = solve_linear(M, B.astype(complex))
    except SingularMatrixError as exc:
        raise PoleError(f"{what} is singular at this s", exc.pivot) from exc
    return C @ X


def tf_exact(sys, s):
    """``C (s I - A0 - A1 exp(-s tau))^{-1} B``."""
    s = complex(s)
    M = s * np.eye(sys.n) - sys.A0 - sys.A1 * np.exp(-s * sys.tau)
    return _resolvent_apply(M, sys.B, sys.C, "s I - A0 - A1 exp(-s tau)")


def tf_reduced(sys, r_value, s):
    """``C (s I - A0 - A1 r)^{-1} B`` with ``r`` standing in for ``exp(-s tau)``."""
    s = complex(s)
    M = s * np.eye(sys.n) - sys.A0 - sys.A1 * complex(r_value)
    return _resolvent_apply(M, sys.B, sys.C, "s I - A0 - A1 r")


def tf_state_space(E, A, B, C, s):
    """``C (s E - A)^{-1} B``; pass the identity for ``E`` in the standard case."""
    E = np.eye(A.shape[0]) if E is None else E
    return _resolvent_apply(complex(s) * E - A, B, C, "s E - A")


def series_coefficients(num, den, count):
    """First ``count`` Taylor coefficients of num(s)/den(s) at s = 0.

    Truncated power-series division; every convolution sum uses
    ``math.fsum`` to keep cancellation errors at rounding level.
    """
    num = [float(v) for v in num]
    den = [float(v) for v in den]
    if den[0] == 0.0:
        raise PoleError("denominator vanishes at s = 0", 0.0)
    q = []
    for j in range(count):
        a = num[j] if j < len(num) else 0.0
        terms = [a] + [-den[i] * q[j - i] for i in range(1, min(j, len(den) - 1) + 1)]
        q.append(math.fsum(terms) / den[0])
    return q


def pade_moment_defect(spec, N, n):
    """``d^n/ds^n r_N(s, -tau) |_{s=0} - (-tau)^n``."""
    rf = rn_explicit(spec, N, -spec.tau)
    coeff = series_coefficients(rf.num, rf.den, n + 1)[n]
    return math.factorial(n) * coeff - (-spec.tau) ** n


def pade_exp_coefficients(N, tau=1.0):
    """Classical (N, N) Padé approximant of ``exp(-tau s)`` at 0.

    ``num[k] = (2N-k)! N! / ((2N)! k! (N-k)!) (-tau)^k`` and ``den`` the same
    with ``+tau``; normalized to a unit leading denominator coefficient.
    """
    c = np.array([math.factorial(2 * N - k) * math.factorial(N)
                  / (math.factorial(2 * N) * math.factorial(k) * math.factorial(N - k))
                  for k in range(N + 1)])
    k = np.arange(N + 1)
    return RationalFunction(c * (-tau) ** k, c * tau ** k).normalized()


def rn_boundary_modulus(spec, N, omega):
    """``|r_N(i omega, -tau)|`` from the explicit coefficients.

    ``omega`` may be an array; the coefficients are built once.
    """
    rf = rn_explicit(spec, N, -spec.tau)
    values = np.abs(rf(1j * np.asarray(omega, dtype=float)))
    return float(values) if np.ndim(values) == 0 else values

