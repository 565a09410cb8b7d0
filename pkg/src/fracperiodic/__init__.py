"""Periodic fractional Laplacian toolkit: operator, identities and nonlinear solvers."""

from .branch_tracer import BifurcationProblem, Branch, BranchConfig, BranchPoint, solutions_at, trace_branch
from .errors import *  # noqa: F401,F403
from .frac_op import FracOrder, apply_kernel, apply_spectral, kernel_K, kernel_K_with_bound, normalization_C1s
from .identity_lab import (
    EnergyBreakdown,
    check_orthogonality,
    check_poincare,
    check_zero_mean,
    energy_identity,
)
from .lienard_solver import (
    IterationConfig,
    LienardProblem,
    Polynomial,
    SystemProblem,
    solve_lienard,
    solve_system,
)
from .linear_solver import apply_linear, solve_linear
from .nonlinearity import Nonlinearity
from .report import SolveReport
from .singular_solver import (
    AttractiveProblem,
    BoundEstimates,
    ContinuationConfig,
    RepulsiveProblem,
    bound_monitor,
    constant_root,
    find_sub_super,
    forbat_problem,
    solve_attractive,
    solve_repulsive,
)
from .trig_field import (
    PeriodicFunction,
    QuadratureConfig,
    analyze,
    compose_nonlinearity,
    derivative,
    hs_energy,
    l2_norm,
    norms,
    sup_norm,
    synthesize,
)

__version__ = "0.1.0"
