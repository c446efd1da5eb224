"""Classical orthogonal polynomials shifted to the delay interval [-tau, 0].

Every family is a Jacobi family P_k^(alpha, beta) in the variable
``x = 2*theta/tau + 1`` with the classical normalization
``P_k^(alpha, beta)(0) = binom(k + alpha, k)`` at the right endpoint
``theta = 0``.  Chebyshev polynomials are obtained by the usual rescalings

    T_k = binom(k - 1/2, k)^-1 P_k^(-1/2, -1/2)
    U_k = (k + 1) binom(k + 1/2, k)^-1 P_k^(1/2, 1/2)

so that ``T_k`` and Legendre ``P_k`` equal 1 at ``theta = 0`` while ``U_k(0) = k + 1``.  The weight is
``w(theta) = (-2 theta/tau)^alpha (2 theta/tau + 2)^beta``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import DomainError, NumericalError, ParameterError

__all__ = [
    "Family",
    "BasisSpec",
    "QuadratureRule",
    "MAX_DEGREE",
    "eval_basis",
    "eval_basis_derivative",
    "eval_all",
    "basis_zeros",
    "norm_squared",
    "gauss_rule",
    "is_symmetric_basis",
    "multiplication_coefficients",
    "derivative_coefficients",
]

#: Largest polynomial degree accepted by the evaluators.  Values and
#: derivative constants grow quickly; beyond this accuracy degrades.
MAX_DEGREE = 64

_DOMAIN_SLACK = 1e-12


class Family(str, enum.Enum):
    CHEBYSHEV1 = "chebyshev1"
    CHEBYSHEV2 = "chebyshev2"
    LEGENDRE = "legendre"
    JACOBI = "jacobi"


_FIXED_PARAMS = {
    Family.CHEBYSHEV1: (-0.5, -0.5),
    Family.CHEBYSHEV2: (0.5, 0.5),
    Family.LEGENDRE: (0.0, 0.0),
}

_SHORT_NAMES = {
    "cheb1": Family.CHEBYSHEV1,
    "chebyshev1": Family.CHEBYSHEV1,
    "cheb2": Family.CHEBYSHEV2,
    "chebyshev2": Family.CHEBYSHEV2,
    "legendre": Family.LEGENDRE,
}


@dataclass(frozen=True)
class BasisSpec:
    """A shifted orthogonal polynomial family on [-tau, 0].

    Use the constructors :meth:`chebyshev1`, :meth:`chebyshev2`,
    :meth:`legendre` and :meth:`jacobi`, or :meth:`parse` for the CLI
    descriptor syntax (``cheb1``, ``cheb2``, ``legendre``, ``jacobi:a:b``).
    """

    kind: Family
    tau: float
    alpha: float
    beta: float

    def __post_init__(self):
        kind = Family(self.kind)
        object.__setattr__(self, "kind", kind)
        if not (np.isfinite(self.tau) and self.tau > 0):
            raise ParameterError(f"tau must be positive and finite, got {self.tau!r}")
        if kind in _FIXED_PARAMS and (self.alpha, self.beta) != _FIXED_PARAMS[kind]:
            raise ParameterError(f"{kind.value} fixes (alpha, beta) = {_FIXED_PARAMS[kind]}")
        if not (self.alpha > -1 and self.beta > -1):
            raise ParameterError(
                f"Jacobi parameters must satisfy alpha, beta > -1, got ({self.alpha}, {self.beta})")
        object.__setattr__(self, "tau", float(self.tau))
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "beta", float(self.beta))

    @classmethod
    def chebyshev1(cls, tau=1.0):
        return cls(Family.CHEBYSHEV1, tau, -0.5, -0.5)

    @classmethod
    def chebyshev2(cls, tau=1.0):
        return cls(Family.CHEBYSHEV2, tau, 0.5, 0.5)

    @classmethod
    def legendre(cls, tau=1.0):
        return cls(Family.LEGENDRE, tau, 0.0, 0.0)

    @classmethod
    def jacobi(cls, alpha, beta, tau=1.0):
        return cls(Family.JACOBI, tau, alpha, beta)

    @classmethod
    def parse(cls, descriptor, tau=1.0):
        """Build a spec from ``cheb1 | cheb2 | legendre | jacobi:alpha:beta``."""
        text = descriptor.strip().lower()
        if text in _SHORT_NAMES:
            kind = _SHORT_NAMES[text]
            return cls(kind, tau, *_FIXED_PARAMS[kind])
        parts = text.split(":")
        if parts[0] == "jacobi" and len(parts) == 3:
            try:
                alpha, beta = float(parts[1]), float(parts[2])
            except ValueError:
                raise ParameterError(f"cannot parse Jacobi parameters in {descriptor!r}") from None
            return cls.jacobi(alpha, beta, tau)
        raise ParameterError(
            f"unknown basis {descriptor!r}; expected cheb1, cheb2, legendre or jacobi:alpha:beta")

    def with_tau(self, tau):
        return BasisSpec(self.kind, tau, self.alpha, self.beta)

    @property
    def descriptor(self):
        if self.kind is Family.JACOBI:
            return f"jacobi:{self.alpha:g}:{self.beta:g}"
        return {Family.CHEBYSHEV1: "cheb1", Family.CHEBYSHEV2: "cheb2",
                Family.LEGENDRE: "legendre"}[self.kind]


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss rule for the weight of a :class:`BasisSpec` on [-tau, 0]."""

    nodes: np.ndarray
    weights: np.ndarray

    def integrate(self, values):
        """Weighted integral of samples taken at ``nodes`` (last axis)."""
        return np.asarray(values) @ self.weights


def _binom_real(top, k):
    # binom(k + a, k) for real a, as prod_{i=1}^k (a + i) / i
    a = top - k
    out = 1.0
    for i in range(1, k + 1):
        out *= (a + i) / i
    return out


def _normalization(spec, degrees):
    """Factor c_k with phi_k = c_k P_k^(alpha, beta)."""
    degrees = np.asarray(degrees)
    if spec.kind is Family.CHEBYSHEV1:
        return np.array([1.0 / _binom_real(k - 0.5, k) for k in degrees.ravel()]).reshape(degrees.shape)
    if spec.kind is Family.CHEBYSHEV2:
        return np.array([(k + 1) / _binom_real(k + 0.5, k) for k in degrees.ravel()]).reshape(degrees.shape)
    return np.ones(degrees.shape)


def _to_reference(spec, theta):
    theta = np.asarray(theta, dtype=float)
    slack = _DOMAIN_SLACK * spec.tau
    if np.any(theta < -spec.tau - slack) or np.any(theta > slack) or np.any(~np.isfinite(theta)):
        raise DomainError(f"theta must lie in [-{spec.tau:g}, 0]")
    return np.clip(2.0 * theta / spec.tau + 1.0, -1.0, 1.0)


def _check_degree(k, name="degree"):
    if int(k) != k or k < 0:
        raise ParameterError(f"{name} must be a nonnegative integer, got {k!r}")
    if k > MAX_DEGREE:
        raise ParameterError(f"{name} {k} exceeds the supported maximum {MAX_DEGREE}")
    return int(k)


def _jacobi_table(n, alpha, beta, x):
    """Classical P_0..P_n^(alpha, beta)(x) by the three-term recurrence."""
    x = np.asarray(x, dtype=float)
    out = np.empty((n + 1,) + x.shape)
    out[0] = 1.0
    if n == 0:
        return out
    ab = alpha + beta
    out[1] = (alpha + 1.0) + 0.5 * (ab + 2.0) * (x - 1.0)
    for k in range(2, n + 1):
        c = 2.0 * k + ab
        a1 = 2.0 * k * (k + ab) * (c - 2.0)
        a2 = (c - 1.0) * (alpha * alpha - beta * beta)
        a3 = (c - 2.0) * (c - 1.0) * c
        a4 = 2.0 * (k + alpha - 1.0) * (k + beta - 1.0) * c
        out[k] = ((a2 + a3 * x) * out[k - 1] - a4 * out[k - 2]) / a1
    return out


def eval_all(spec, N, theta, m=0):
    """Values of the m-th derivatives of phi_0, ..., phi_N at ``theta``.

    Returns an array of shape ``(N + 1,) + shape(theta)``.
    """
    N = _check_degree(N)
    m = _check_degree(m, "derivative order")
    x = _to_reference(spec, theta)
    out = np.zeros((N + 1,) + x.shape)
    if m > N:
        return out
    table = _jacobi_table(N - m, spec.alpha + m, spec.beta + m, x)
    ks = np.arange(m, N + 1)
    # d^m/dx^m P_k^(a,b) = prod_{i<m} (k+a+b+1+i)/2 * P_{k-m}^(a+m,b+m); chain rule gives (2/tau)^m
    factor = np.ones(ks.shape)
    for i in range(m):
        factor *= (ks + spec.alpha + spec.beta + 1.0 + i) / 2.0
    factor *= (2.0 / spec.tau) ** m * _normalization(spec, ks)
    out[m:] = factor.reshape((-1,) + (1,) * x.ndim) * table
    return out


def eval_basis(spec, k, theta):
    """phi_k(theta) for the shifted family ``spec``."""
    k = _check_degree(k)
    values = eval_all(spec, k, theta)[k]
    return float(values) if values.ndim == 0 else values


def eval_basis_derivative(spec, k, m, theta):
    """The m-th derivative of phi_k with respect to theta."""
    k = _check_degree(k)
    values = eval_all(spec, k, theta, m)[k]
    return float(values) if values.ndim == 0 else values


def _recurrence_coefficients(m, alpha, beta):
    """Diagonal and squared off-diagonal of the monic Jacobi matrix on [-1, 1]."""
    n = np.arange(m, dtype=float)
    ab = alpha + beta
    diag = np.empty(m)
    diag[0] = (beta - alpha) / (ab + 2.0)
    if m > 1:
        c = 2.0 * n[1:] + ab
        diag[1:] = (beta * beta - alpha * alpha) / (c * (c + 2.0))
    off2 = np.empty(max(m - 1, 0))
    if m > 1:
        off2[0] = 4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab) ** 2 * (3.0 + ab))
    if m > 2:
        k = n[2:]
        c = 2.0 * k + ab
        off2[1:] = 4.0 * k * (k + alpha) * (k + beta) * (k + ab) / (c * c * (c + 1.0) * (c - 1.0))
    return diag, off2


def gauss_rule(spec, m):
    """Gauss quadrature with ``m`` nodes for the weight of ``spec``.

    Nodes come from the symmetric tridiagonal Jacobi matrix (Golub-Welsch);
    the rule integrates ``p(theta) w(theta)`` exactly for deg p <= 2m - 1.
    """
    if int(m) != m or m < 1:
        raise ParameterError(f"node count must be a positive integer, got {m!r}")
    m = int(m)
    a, b = spec.alpha, spec.beta
    diag, off2 = _recurrence_coefficients(m, a, b)
    try:
        x, vecs = eigh_tridiagonal(diag, np.sqrt(off2))
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"Golub-Welsch eigenproblem failed for m={m}: {exc}") from exc
    mu0 = math.exp((a + b + 1.0) * math.log(2.0) + math.lgamma(a + 1.0)
                   + math.lgamma(b + 1.0) - math.lgamma(a + b + 2.0))
    w = mu0 * vecs[0] ** 2
    half = 0.5 * spec.tau
    return QuadratureRule(nodes=half * (x - 1.0), weights=half * w)


def basis_zeros(spec, N, rtol=1e-8):
    """The N zeros of phi_N, strictly increasing inside (-tau, 0)."""
    N = _check_degree(N)
    if N < 1:
        raise ParameterError("basis_zeros needs N >= 1")
    zeros = gauss_rule(spec, N).nodes
    scale = np.max(np.abs(eval_all(spec, N, np.array([-spec.tau, 0.0]))[N]))
    residual = np.max(np.abs(eval_all(spec, N, zeros)[N]))
    if residual > rtol * scale:
        raise NumericalError(
            f"zeros of degree {N} not resolved: max |phi_N(zero)| = {residual:.3e} (scale {scale:.3e})")
    if np.any(np.diff(zeros) <= 0) or zeros[0] <= -spec.tau or zeros[-1] >= 0:
        raise NumericalError(f"zeros of degree {N} are not strictly inside (-tau, 0)")
    return zeros


def norm_squared(spec, k):
    """<phi_k, phi_k> under the weighted inner product on [-tau, 0]."""
    k = _check_degree(k)
    rule = gauss_rule(spec, k + 2)
    return float(rule.integrate(eval_all(spec, k, rule.nodes)[k] ** 2))


def is_symmetric_basis(spec):
    """True iff phi_k(-tau - theta) = (-1)^k phi_k(theta) for every k.

    This holds exactly when the weight is symmetric, i.e. alpha == beta.
    """
    return spec.alpha == spec.beta


def multiplication_coefficients(spec, K):
    """Arrays ``(up, mid, down)`` with

        x phi_k = up[k] phi_{k+1} + mid[k] phi_k + down[k] phi_{k-1},  k = 0..K,

    in the reference variable ``x = 2 theta / tau + 1``.
    """
    a, b = spec.alpha, spec.beta
    ab = a + b
    c = _normalization(spec, np.arange(K + 2))
    up, mid, down = np.zeros(K + 1), np.zeros(K + 1), np.zeros(K + 1)
    for k in range(K + 1):
        # P_{k+1} = (lead x + shift) P_k - back P_{k-1}
        n = k + 1
        if n == 1:
            lead, shift, back = (ab + 2.0) / 2.0, (a - b) / 2.0, 0.0
        else:
            cc = 2.0 * n + ab
            a1 = 2.0 * n * (n + ab) * (cc - 2.0)
            lead = (cc - 2.0) * (cc - 1.0) * cc / a1
            shift = (cc - 1.0) * (a * a - b * b) / a1
            back = 2.0 * (n + a - 1.0) * (n + b - 1.0) * cc / a1
        up[k] = c[k] / (c[k + 1] * lead)
        mid[k] = -shift / lead
        if k > 0:
            down[k] = c[k] * back / (c[k - 1] * lead)
    return up, mid, down


def derivative_coefficients(spec, N):
    """(N+1) x (N+1) matrix whose column k holds the phi-coefficients of
    d phi_k / d theta.

    Obtained by differentiating the three-term recurrence, which gives
    ``phi_{k+1}' = (phi_k + (x - mid_k) phi_k' - down_k phi_{k-1}') / up_k``
    entirely in coefficient space.
    """
    N = _check_degree(N)
    up, mid, down = multiplication_coefficients(spec, N)
    # multiplication by x, mapping P_N coefficients into P_{N+1}
    X = np.zeros((N + 2, N + 1))
    k = np.arange(N + 1)
    X[k + 1, k] = up
    X[k, k] = mid
    X[k[1:] - 1, k[1:]] = down[1:]
    d = np.zeros((N + 1, N + 2))
    for k in range(N):
        rhs = X @ d[k, :N + 1] - mid[k] * d[k]
        rhs[k] += 1.0
        if k > 0:
            rhs -= down[k] * d[k - 1]
        d[k + 1] = rhs / up[k]
    return (2.0 / spec.tau) * d[:, :N + 1].T
