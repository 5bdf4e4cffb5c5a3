"""Fractional Crank-Nicolson schemes for the sub-diffusion equation.

Two correction-free time-stepping schemes, CN-I for regular sources and CN-II
for sources singular at t = 0, on top of a P1 finite-element discretization of
the unit interval or square, plus a self-convergence study harness.
"""

from .errors import (
    AlignmentError,
    DataError,
    DomainError,
    NotSPDError,
    ParameterError,
    SingularityError,
    SubcrankError,
)
from .harness import EXAMPLES, ConvergenceReport, compute_rates, emit, run_study, self_error
from .kernels import bdf2_diff, gamma_fn, gl_weights, initial_coeff, omega1, omega2, omega_cn
from .mesh_fem import BoxIndicator, PowerLaw, ZeroProfile, assemble, build_mesh, l2_norm, l2_project, load_vector
from .sources import TimeProfile, make_initial, make_source
from .stepping import SchemeConfig, recover_u, run

__version__ = "0.1.0"
