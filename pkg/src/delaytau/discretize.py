"""Finite-dimensional realizations of a single-delay LTI system.

Three discretizations of

    x'(t) = A0 x(t) + A1 x(t - tau) + B u(t),   y(t) = C x(t)

are provided:

* the Lanczos tau pencil ``E x' = A x + B u`` in the coefficient coordinates
  of a shifted orthogonal basis (:func:`build_tau`);
* the same flow with Chebyshev-T coefficients and Chebyshev-U test rows,
  whose differentiation block is banded (:func:`build_tau_mixed`);
* pseudospectral collocation on a mesh ending at 0 (:func:`build_collocation`).

State vectors are ordered block-wise, block ``k`` holding the ``n``
components attached to ``phi_k`` (tau) or to the mesh point ``theta_k``
(collocation).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DegenerateBasisError, MeshError, ParameterError
from .orthopoly import BasisSpec, basis_zeros, derivative_coefficients, eval_all, gauss_rule

__all__ = [
    "DelaySystem",
    "TauRealization",
    "CollocationMesh",
    "CollocRealization",
    "eval_row",
    "diff_matrix",
    "diff_matrix_quadrature",
    "build_tau",
    "build_tau_mixed",
    "chebyshev_extremal_mesh",
    "zeros_plus_origin_mesh",
    "barycentric_weights",
    "lagrange_row",
    "lagrange_diff_matrix",
    "build_collocation",
]


def _as_matrix(name, value):
    """Coerce a nested list / scalar / {rows, cols, data} object to a 2-D float array."""
    if isinstance(value, dict):
        try:
            rows, cols, data = int(value["rows"]), int(value["cols"]), value["data"]
        except (KeyError, TypeError, ValueError):
            raise ParameterError(f"field {name!r}: expected keys rows, cols, data") from None
        arr = np.asarray(data, dtype=float)
        if arr.size != rows * cols:
            raise ParameterError(
                f"field {name!r}: {arr.size} entries do not match dims {rows}x{cols}")
        return arr.reshape(rows, cols)
    try:
        arr = np.asarray(value, dtype=float)
    except (TypeError, ValueError):
        raise ParameterError(f"field {name!r}: not a numeric matrix") from None
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2:
        raise ParameterError(f"field {name!r}: expected a 2-D array, got {arr.ndim}-D")
    if not np.all(np.isfinite(arr)):
        raise ParameterError(f"field {name!r}: entries must be finite")
    return arr


@dataclass(frozen=True)
class DelaySystem:
    """Matrices ``A0, A1`` (n x n), ``B`` (n x p), ``C`` (q x n) and delay ``tau``."""

    A0: np.ndarray
    A1: np.ndarray
    B: np.ndarray
    C: np.ndarray
    tau: float

    def __post_init__(self):
        for name in ("A0", "A1", "B", "C"):
            object.__setattr__(self, name, _as_matrix(name, getattr(self, name)))
        n = self.A0.shape[0]
        if self.A0.shape != (n, n):
            raise ParameterError(f"field 'A0': must be square, got {self.A0.shape}")
        if self.A1.shape != (n, n):
            raise ParameterError(f"field 'A1': expected shape {(n, n)}, got {self.A1.shape}")
        if self.B.shape[0] != n:
            raise ParameterError(f"field 'B': expected {n} rows, got {self.B.shape[0]}")
        if self.C.shape[1] != n:
            raise ParameterError(f"field 'C': expected {n} columns, got {self.C.shape[1]}")
        try:
            tau = float(self.tau)
        except (TypeError, ValueError):
            raise ParameterError("field 'tau': not a number") from None
        if not (math.isfinite(tau) and tau > 0):
            raise ParameterError(f"field 'tau': must be positive, got {self.tau!r}")
        object.__setattr__(self, "tau", tau)

    @property
    def n(self):
        return self.A0.shape[0]

    @classmethod
    def scalar(cls, a0, a1, tau=1.0, b=1.0, c=1.0):
        return cls(a0, a1, b, c, tau)

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise ParameterError("system description must be a JSON object")
        missing = [k for k in ("A0", "A1", "B", "C", "tau") if k not in data]
        if missing:
            raise ParameterError(f"missing field(s): {', '.join(missing)}")
        return cls(data["A0"], data["A1"], data["B"], data["C"], data["tau"])

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def to_dict(self):
        return {"A0": self.A0.tolist(), "A1": self.A1.tolist(), "B": self.B.tolist(),
                "C": self.C.tolist(), "tau": self.tau}


@dataclass(frozen=True)
class TauRealization:
    """Pencil ``E x' = A x + B u, y = C x`` of dimension ``n (N + 1)``.

    ``spec`` is the basis of the state coordinates.  For the mixed
    realization, ``test_spec`` names the basis of the equation rows.
    """

    E: np.ndarray
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    N: int
    n: int
    spec: BasisSpec
    method: str = "tau"
    test_spec: BasisSpec | None = None

    @property
    def tau(self):
        return self.spec.tau


@dataclass(frozen=True)
class CollocationMesh:
    """Strictly increasing points ``-tau <= theta_0 < ... < theta_N = 0``."""

    points: np.ndarray
    tau: float

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float).ravel()
        if pts.size < 2:
            raise MeshError("a mesh needs at least two points")
        if pts[-1] != 0.0:
            raise MeshError(f"last mesh point must be exactly 0, got {pts[-1]!r}")
        if pts[0] < -self.tau * (1 + 1e-14):
            raise MeshError(f"first mesh point {pts[0]!r} lies left of -tau")
        if np.any(np.diff(pts) <= 1e-14 * self.tau):
            raise MeshError("mesh points must be distinct and strictly increasing")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "tau", float(self.tau))

    @property
    def N(self):
        return self.points.size - 1


@dataclass(frozen=True)
class CollocRealization:
    """Collocation system ``x' = A x + B u, y = C x`` on ``mesh``."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    mesh: CollocationMesh
    n: int
    method: str = "colloc"
    E: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "E", np.eye(self.A.shape[0]))

    @property
    def N(self):
        return self.mesh.N

    @property
    def tau(self):
        return self.mesh.tau


def eval_row(spec, N, theta):
    """Row ``[phi_0(theta), ..., phi_N(theta)]`` (scalar part of the
    evaluation functional)."""
    return eval_all(spec, N, float(theta))


def diff_matrix(spec, N):
    """N x (N+1) matrix with entries ``<phi_k', phi_j> / ||phi_j||^2``.

    These are the phi_j-coefficients of phi_k'; they are generated by the
    differentiated three-term recurrence, which is markedly less sensitive
    to rounding than evaluating the inner products by quadrature (see
    :func:`diff_matrix_quadrature`).
    """
    if N < 1:
        raise ParameterError("diff_matrix needs N >= 1")
    return derivative_coefficients(spec, N)[:N]


def diff_matrix_quadrature(spec, N):
    """:func:`diff_matrix` computed by Gauss quadrature of the inner products."""
    if N < 1:
        raise ParameterError("diff_matrix needs N >= 1")
    rule = gauss_rule(spec, N + 1)
    vals = eval_all(spec, N, rule.nodes)
    ders = eval_all(spec, N, rule.nodes, 1)
    w = rule.weights
    gram = (vals[:N] * w) @ ders.T
    norms = (vals[:N] ** 2) @ w
    return gram / norms[:, None]


def _check_tau(sys, tau, what):
    if not math.isclose(sys.tau, tau, rel_tol=1e-12, abs_tol=0.0):
        raise ConfigError(f"{what} tau={tau!r} does not match system tau={sys.tau!r}")


def _assemble_tau(sys, top_E, low_E, low_A, row0, row_tau):
    n = sys.n
    I = np.eye(n)
    E = np.vstack([np.kron(top_E, I), np.kron(low_E, I)])
    A = np.vstack([np.kron(row0, sys.A0) + np.kron(row_tau, sys.A1), np.kron(low_A, I)])
    B = np.vstack([sys.B, np.zeros((n * (row0.size - 1), sys.B.shape[1]))])
    C = np.kron(row0, sys.C)
    return E, A, B, C


def build_tau(sys, spec, N):
    """Lanczos tau realization in the coordinates of ``spec``.

    ``E = [phi_k(0); I_N | 0] (x) I_n`` and
    ``A = [A0 phi_k(0) + A1 phi_k(-tau); D (x) I_n]`` with ``D`` from
    :func:`diff_matrix`; ``B = [B; 0]``, ``C = C [phi_k(0)]``.
    """
    if N < 1:
        raise ParameterError("tau realization needs N >= 1")
    _check_tau(sys, spec.tau, "basis")
    row0 = eval_row(spec, N, 0.0)
    if abs(row0[N]) <= 1e-14 * np.max(np.abs(row0)):
        raise DegenerateBasisError(f"phi_N(0) = {row0[N]:.3e} vanishes; E would be singular")
    row_tau = eval_row(spec, N, -spec.tau)
    low_E = np.eye(N, N + 1)
    E, A, B, C = _assemble_tau(sys, row0[None, :], low_E, diff_matrix(spec, N), row0, row_tau)
    return TauRealization(E, A, B, C, N, sys.n, spec, "tau")


def _t_in_u(N, tau):
    """U-coefficients (rows) of T_0..T_N (columns), and of their derivatives."""
    S = np.zeros((N + 1, N + 1))
    S[0, 0] = 1.0
    if N >= 1:
        S[1, 1] = 0.5
    for k in range(2, N + 1):
        S[k, k] = 0.5
        S[k - 2, k] = -0.5
    # dT_k/dtheta = (2/tau) k U_{k-1}
    D = np.zeros((N, N + 1))
    k = np.arange(1, N + 1)
    D[k - 1, k] = 2.0 * k / tau
    return S, D


def build_tau_mixed(sys, N, projector="cheb1"):
    """Tau realization with Chebyshev-T state coordinates and Chebyshev-U rows.

    The differentiation block has exactly N nonzeros (one per column).
    ``projector`` selects the truncation: ``"cheb1"`` drops the T_N
    component, giving the same transfer function as
    ``build_tau(sys, BasisSpec.chebyshev1(tau), N)``; ``"cheb2"`` drops the
    U_N component, reproducing ``build_tau`` with the Chebyshev-U basis.
    """
    if N < 1:
        raise ParameterError("tau realization needs N >= 1")
    if projector not in ("cheb1", "cheb2"):
        raise ParameterError(f"projector must be 'cheb1' or 'cheb2', got {projector!r}")
    spec = BasisSpec.chebyshev1(sys.tau)
    S, D = _t_in_u(N, sys.tau)
    low_E = S[:N].copy()
    if projector == "cheb1":
        low_E[:, N] = 0.0
    row0 = eval_row(spec, N, 0.0)
    row_tau = eval_row(spec, N, -sys.tau)
    E, A, B, C = _assemble_tau(sys, row0[None, :], low_E, D, row0, row_tau)
    return TauRealization(E, A, B, C, N, sys.n, spec, "mixed",
                          test_spec=BasisSpec.chebyshev2(sys.tau))


def chebyshev_extremal_mesh(tau, N):
    """``theta_k = -(tau/2)(cos(pi k / N) + 1)``, k = 0..N, ascending."""
    if N < 1:
        raise ParameterError("mesh needs N >= 1")
    k = np.arange(N + 1)
    pts = -tau * np.cos(0.5 * np.pi * k / N) ** 2
    pts[0], pts[-1] = -tau, 0.0
    return CollocationMesh(pts, tau)


def zeros_plus_origin_mesh(spec, N):
    """The zeros of phi_N followed by the origin."""
    return CollocationMesh(np.append(basis_zeros(spec, N), 0.0), spec.tau)


def barycentric_weights(points):
    pts = np.asarray(points, dtype=float)
    # rescale to capacity 1 so products neither under- nor overflow
    scale = 4.0 / (pts.max() - pts.min())
    diff = (pts[:, None] - pts[None, :]) * scale
    np.fill_diagonal(diff, 1.0)
    if np.any(diff == 0.0):
        raise MeshError("coincident mesh points")
    return 1.0 / np.prod(diff, axis=1)


def lagrange_row(points, theta, weights=None):
    """Values ``l_k(theta)`` of the Lagrange basis on ``points``."""
    pts = np.asarray(points, dtype=float)
    w = barycentric_weights(pts) if weights is None else weights
    delta = theta - pts
    hit = np.flatnonzero(delta == 0.0)
    if hit.size:
        row = np.zeros(pts.size)
        row[hit[0]] = 1.0
        return row
    terms = w / delta
    return terms / terms.sum()


def lagrange_diff_matrix(points):
    """Matrix with entries ``l_k'(theta_j)``."""
    pts = np.asarray(points, dtype=float)
    w = barycentric_weights(pts)
    diff = pts[:, None] - pts[None, :]
    np.fill_diagonal(diff, 1.0)
    D = (w[None, :] / w[:, None]) / diff
    np.fill_diagonal(D, 0.0)
    np.fill_diagonal(D, -D.sum(axis=1))
    return D


def build_collocation(sys, mesh):
    """Pseudospectral collocation realization on ``mesh``.

    Block rows ``0..N-1`` hold the Lagrange differentiation rows; the last
    block row is ``a_k = A0 l_k(0) + A1 l_k(-tau)``.
    """
    _check_tau(sys, mesh.tau, "mesh")
    pts = mesh.points
    N, n = mesh.N, sys.n
    w = barycentric_weights(pts)
    D = lagrange_diff_matrix(pts)
    row0 = np.zeros(N + 1)
    row0[N] = 1.0
    row_tau = lagrange_row(pts, -sys.tau, w)
    I = np.eye(n)
    A = np.vstack([np.kron(D[:N], I), np.kron(row0, sys.A0) + np.kron(row_tau, sys.A1)])
    B = np.vstack([np.zeros((n * N, sys.B.shape[1])), sys.B])
    C = np.kron(row0, sys.C)
    return CollocRealization(A, B, C, mesh, n)
