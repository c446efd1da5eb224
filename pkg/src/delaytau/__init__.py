"""Tau and collocation discretizations of linear time-delay systems.

Build finite-dimensional realizations of ``x'(t) = A0 x(t) + A1 x(t - tau) + B u(t)``,
``y = C x``, then study their characteristic roots and H2 norms.
"""

from .discretize import (CollocationMesh, CollocRealization, DelaySystem, TauRealization,
                         build_collocation, build_tau, build_tau_mixed,
                         chebyshev_extremal_mesh, diff_matrix, zeros_plus_origin_mesh)
from .errors import *  # noqa: F401,F403
from .h2 import (LyapunovSolution, h2_closed_form, h2_exact_hayes, h2_norm,
                 solve_generalized_lyapunov)
from .orthopoly import BasisSpec, Family, basis_zeros, eval_basis, gauss_rule
from .rational import rn_eval_solve, rn_explicit, tf_exact, tf_state_space
from .spectrum import char_roots, is_stable, refine_root, track_roots

__version__ = "0.1.0"
