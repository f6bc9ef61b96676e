"""Discrete nabla fractional calculus with Caputo differences.

Initial and boundary value problems for the self-adjoint equation
``nabla[p(t+1) C x(t+1)] + q(t) x(t) = h(t)`` with ``C`` the Caputo
difference of order ``0 < nu <= 1``, plus the Cauchy and Green's functions
that solve them and a dense linear-system oracle to check against.
"""

from .calculus import (
    FracKernelRow,
    caputo_diff,
    caputo_diff_grid,
    frac_sum,
    frac_sum_grid,
    kernel_weights,
    nabla_frac,
    rl_frac_diff,
    rl_frac_diff_grid,
    taylor_caputo,
    taylor_whole,
)
from .errors import (
    DomainError,
    HypothesisError,
    NablaError,
    PoleError,
    SingularError,
    SingularSystemError,
    ValidationError,
)
from .greens import (
    GreensTable,
    InequalityReport,
    SolvabilityReport,
    SturmLiouvilleBC,
    assemble_dense,
    boundary_residuals,
    conjugate_table,
    dense_oracle_solve,
    greens_closed_form_conjugate,
    greens_function,
    inequality_margins,
    rho,
    solvability,
    solve_bvp,
)
from .grid import Domain, FracOrder, GridFunction, nabla_diff, nabla_diff_n, nabla_integral, rising
from .selfadjoint import (
    CaputoIvpSpec,
    InitialData,
    KernelTable,
    SelfAdjointProblem,
    apply_L,
    cauchy_function,
    homogeneous_basis,
    residual,
    solve_caputo_ivp_closed,
    solve_caputo_ivp_stepping,
    solve_selfadjoint_ivp,
    variation_of_constants,
)

__version__ = "0.1.0"
