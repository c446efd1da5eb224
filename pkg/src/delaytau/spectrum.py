"""Characteristic roots from discretization pencils, with Newton refinement."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import RefinementError, SingularMatrixError
from .numerics import Spectrum, eigenvalues_pencil, solve_linear

__all__ = ["RootReport", "Spectrum", "char_roots", "char_function", "refine_root",
           "is_stable", "track_roots", "match_nearest", "STABILITY_MARGIN"]

#: Eigenvalues with real part above ``-STABILITY_MARGIN`` count as unstable.
STABILITY_MARGIN = 1e-10


@dataclass(frozen=True)
class RootReport:
    """Approximate roots from a pencil and their Newton-refined versions.

    Roots that failed to refine have ``nan`` entries in ``refined_roots``
    and ``refinement_residuals``; they are kept, not dropped.
    """

    approx_roots: np.ndarray
    refined_roots: np.ndarray
    refinement_residuals: np.ndarray
    pencil_residuals: np.ndarray


_CLUSTER_RTOL = 1e-6


def _clusters(lam):
    """Group eigenvalues closer than ``_CLUSTER_RTOL (1 + |s|)`` (transitively)."""
    groups, seen = [], np.zeros(len(lam), bool)
    for i in range(len(lam)):
        if seen[i]:
            continue
        members, frontier = [i], [i]
        seen[i] = True
        while frontier:
            j = frontier.pop()
            near = np.abs(lam - lam[j]) <= _CLUSTER_RTOL * (1.0 + abs(lam[j]))
            for k in np.flatnonzero(near & ~seen):
                seen[k] = True
                members.append(k)
                frontier.append(k)
        groups.append(members)
    return groups


def _polish(A, E, lam, steps=3):
    """Newton on det(s E - A): s <- s - 1 / tr((s E - A)^{-1} E).

    Defective eigenvalues come out of the dense solver split by roughly
    sqrt(eps); the mean of such a cluster is accurate to rounding, while
    Newton stalls there, so clusters are replaced by their mean.  A polished
    simple eigenvalue is kept only if it moved by less than ``1e-6 (1 + |s|)``.
    """
    out = lam.copy()
    for members in _clusters(lam):
        if len(members) > 1:
            out[members] = np.mean(lam[members])
            continue
        s0 = complex(lam[members[0]])
        s = s0
        for _ in range(steps):
            try:
                t = np.trace(np.linalg.solve(s * E - A, E))
            except np.linalg.LinAlgError:
                break
            if t == 0 or not np.isfinite(t):
                break
            s_new = s - 1.0 / t
            if not np.isfinite(s_new) or abs(s_new - s) <= 2 * np.finfo(float).eps * abs(s):
                s = s_new if np.isfinite(s_new) else s
                break
            s = s_new
        if abs(s - s0) <= 1e-6 * (1.0 + abs(s0)):
            out[members[0]] = s
    return out


def char_roots(real, polish=True):
    """Eigenvalues of the realization's pencil, by descending real part.

    With ``polish`` each eigenvalue gets a few Newton steps on
    ``det(s E - A)``, which removes most of the rounding introduced by the
    reduction to ``E^{-1} A``.
    """
    E = None if real.method == "colloc" else real.E
    spec = eigenvalues_pencil(real.A, E)
    if polish:
        lam = _polish(real.A, real.E, spec.eigenvalues)
        spec = Spectrum(lam, spec.residuals)
    return spec.sorted_by_real_part()


def _char_matrix(sys, s):
    return s * np.eye(sys.n) - sys.A0 - sys.A1 * np.exp(-s * sys.tau)


def _det_scale(sys, s):
    # rough magnitude of det(M(s)) away from roots
    mag = abs(s) + np.linalg.norm(sys.A0, 2) + np.linalg.norm(sys.A1, 2) * abs(np.exp(-s * sys.tau))
    return max(mag, 1.0) ** sys.n


def char_function(sys, s):
    """``det(s I - A0 - A1 exp(-s tau))``."""
    return complex(np.linalg.det(_char_matrix(sys, complex(s))))


def _newton_step(sys, s):
    M = _char_matrix(sys, s)
    dM = np.eye(sys.n) + sys.tau * sys.A1 * np.exp(-s * sys.tau)
    return 1.0 / np.trace(np.linalg.solve(M, dM))


def _newton_polish(sys, s, steps=2):
    # quadratic convergence: two extra steps take a converged iterate to rounding level
    for _ in range(steps):
        try:
            step = _newton_step(sys, s)
        except (np.linalg.LinAlgError, ZeroDivisionError):
            break
        if not np.isfinite(step) or abs(step) > 1e-6 * (1.0 + abs(s)):
            break
        s = s - step
    return s


def refine_root(sys, s0, rtol=1e-12, maxiter=50):
    """Newton iteration on ``f(s) = det(s I - A0 - A1 exp(-s tau))``.

    The Newton correction is ``1 / tr(M(s)^{-1} M'(s))`` (Jacobi's formula)
    with ``M'(s) = I + tau A1 exp(-s tau)``.
    """
    s = complex(s0)
    for _ in range(maxiter):
        M = _char_matrix(sys, s)
        f = np.linalg.det(M)
        if abs(f) <= rtol * _det_scale(sys, s):
            return _newton_polish(sys, s)
        dM = np.eye(sys.n) + sys.tau * sys.A1 * np.exp(-s * sys.tau)
        try:
            logderiv = np.trace(solve_linear(M.astype(complex), dM.astype(complex)))
        except SingularMatrixError:
            return s
        if logderiv == 0 or not np.isfinite(logderiv):
            raise RefinementError(f"Newton derivative vanished at s={s!r}", s)
        step = 1.0 / logderiv
        s = s - step
        if not np.isfinite(s) or abs(s) > 1e8:
            raise RefinementError("Newton iteration diverged", s)
        if abs(step) <= 4 * np.finfo(float).eps * max(abs(s), 1.0):
            f = np.linalg.det(_char_matrix(sys, s))
            if abs(f) <= 1e3 * rtol * _det_scale(sys, s):
                return s
    raise RefinementError(f"Newton did not converge in {maxiter} iterations (last {s!r})", s)


def is_stable(real, margin=STABILITY_MARGIN):
    """True iff every pencil eigenvalue has real part below ``-margin``."""
    return bool(np.all(char_roots(real, polish=False).eigenvalues.real < -margin))


def track_roots(sys, real, count):
    """The ``count`` rightmost pencil eigenvalues, each refined by Newton.

    Complex-conjugate partners are tracked individually.
    """
    spec = char_roots(real)
    approx = spec.eigenvalues[:count]
    refined = np.full(approx.shape, np.nan + 0j)
    resid = np.full(approx.shape, np.nan)
    for i, s0 in enumerate(approx):
        try:
            r = refine_root(sys, s0)
        except RefinementError:
            continue
        refined[i] = r
        resid[i] = abs(char_function(sys, r))
    return RootReport(approx, refined, resid, spec.residuals[:count])


def match_nearest(reference, candidates):
    """For each reference point, the nearest candidate (greedy, no reuse)."""
    candidates = list(np.asarray(candidates))
    out = []
    for z in np.asarray(reference):
        i = int(np.argmin([abs(c - z) for c in candidates]))
        out.append(candidates.pop(i))
    return np.array(out)

