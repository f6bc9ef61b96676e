"""Boundary value problems for the self-adjoint operator.

Boundary rows on ``N_a^b``:

    alpha x(a) - beta nabla x(a+1) = A,
    gamma x(b) + delta D x(b)      = B,

where ``D`` is the plain backward difference by default.  Passing
``caputo_boundary_at_b=True`` replaces it by the Caputo difference based at
``a``; at ``a + 1`` the two always coincide, so the left row has one form.

Two solution routes are kept apart on purpose: :func:`solve_bvp` goes through
the homogeneous basis, the Cauchy function and the Green's function, while
:func:`dense_oracle_solve` assembles and factors the full linear system.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .calculus import frac_sum, kernel_weights
from .errors import DomainError, HypothesisError, SingularError, SingularSystemError, ValidationError
from .grid import ATOL, Domain, GridFunction, rising
from .selfadjoint import KernelTable, SelfAdjointProblem, cauchy_function, homogeneous_basis

#: relative threshold for calling a determinant or pivot zero
SINGULAR_TOL = 1e-10


@dataclass(frozen=True)
class SturmLiouvilleBC:
    alpha: float
    beta: float
    gamma: float
    delta: float
    A: float = 0.0
    B: float = 0.0

    def __post_init__(self):
        vals = (self.alpha, self.beta, self.gamma, self.delta, self.A, self.B)
        if not all(math.isfinite(v) for v in vals):
            raise ValidationError("boundary coefficients must be finite")
        if self.alpha ** 2 + self.beta ** 2 <= 0:
            raise ValidationError("boundary condition needs alpha^2 + beta^2 > 0")
        if self.gamma ** 2 + self.delta ** 2 <= 0:
            raise ValidationError("boundary condition needs gamma^2 + delta^2 > 0")

    @classmethod
    def dirichlet(cls, A: float = 0.0, B: float = 0.0) -> "SturmLiouvilleBC":
        return cls(1.0, 0.0, 1.0, 0.0, A, B)

    def homogeneous(self) -> "SturmLiouvilleBC":
        return SturmLiouvilleBC(self.alpha, self.beta, self.gamma, self.delta)


@dataclass(frozen=True)
class SolvabilityReport:
    rho: float | None
    det_D: float
    scale: float
    solvable: bool


@dataclass(frozen=True, eq=False)
class GreensTable:
    """Both branches of ``G`` on ``N_a^b x N_a^b``, indexed ``[t - a, s - a]``.

    ``G = u`` for ``t <= s`` and ``G = v = u + cauchy`` for ``s <= t``; the
    branches agree on the diagonal because ``cauchy(t, t) = 0``.
    """

    a: float
    b: float
    nu: float
    u: np.ndarray = field(repr=False)
    v: np.ndarray = field(repr=False)
    cauchy: KernelTable = field(repr=False)

    @property
    def domain(self) -> Domain:
        return Domain.between(self.a, self.b)

    @property
    def matrix(self) -> np.ndarray:
        n = self.u.shape[0]
        return np.where(np.tril(np.ones((n, n), dtype=bool), k=-1), self.v, self.u)

    def __call__(self, t: float, s: float) -> float:
        i, k = self.domain.offset(t), self.domain.offset(s)
        return float(self.u[i, k] if i <= k else self.v[i, k])

    def branch(self, t: float, s: float) -> str:
        i, k = self.domain.offset(t), self.domain.offset(s)
        return "u" if i <= k else "v"


# ---------------------------------------------------------------------------
# boundary rows


def end_difference(x: np.ndarray, nu: float, caputo: bool) -> np.ndarray:
    """``D x(b)`` for the last index along axis 0 (vectorised over columns)."""
    if not caputo:
        return x[-1] - x[-2]
    dx = np.diff(x, axis=0)
    w = kernel_weights(1.0 - nu, dx.shape[0])
    return np.tensordot(w, dx[::-1], axes=(0, 0))


def _left_row(bc: SturmLiouvilleBC, x: np.ndarray):
    return bc.alpha * x[0] - bc.beta * (x[1] - x[0])


def _right_row(bc: SturmLiouvilleBC, x: np.ndarray, nu: float, caputo: bool):
    return bc.gamma * x[-1] + bc.delta * end_difference(x, nu, caputo)


def boundary_residuals(prob: SelfAdjointProblem, bc: SturmLiouvilleBC, x: GridFunction,
                       caputo_boundary_at_b: bool = False) -> tuple[float, float]:
    """Left and right boundary rows of ``x`` minus ``A`` and ``B``."""
    vals = x.values
    return (float(_left_row(bc, vals) - bc.A),
            float(_right_row(bc, vals, prob.nu.nu, caputo_boundary_at_b) - bc.B))


def _boundary_matrix(prob, bc, basis, caputo):
    x1, x2 = (g.values for g in basis)
    nu = prob.nu.nu
    return np.array([[_left_row(bc, x1), _left_row(bc, x2)],
                     [_right_row(bc, x1, nu, caputo), _right_row(bc, x2, nu, caputo)]])


def _singular(M: np.ndarray, tol: float) -> tuple[float, float, bool]:
    det = float(M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0])
    scale = float(np.linalg.norm(M[0]) * np.linalg.norm(M[1]))
    return det, scale, not abs(det) > tol * scale


# ---------------------------------------------------------------------------
# solvability


def rho(prob: SelfAdjointProblem, bc: SturmLiouvilleBC) -> float:
    """``alpha gamma S(b) + alpha delta / p(b) + beta gamma / p(a+1)``.

    ``S`` is the order-``nu`` fractional sum of ``1/p`` based at ``a``.  The
    criterion assumes ``q == 0`` and a Caputo difference in the right row.
    """
    if not prob.q_is_zero:
        raise HypothesisError("the rho criterion requires q == 0")
    recip = GridFunction(prob.p.domain, 1.0 / prob.p.values)
    S = frac_sum(recip, prob.nu, prob.b, prob.a)
    return (bc.alpha * bc.gamma * S + bc.alpha * bc.delta / prob.p(prob.b)
            + bc.beta * bc.gamma / prob.p(prob.a + 1))


def solvability(prob: SelfAdjointProblem, bc: SturmLiouvilleBC, caputo_boundary_at_b: bool = False,
                tol: float = SINGULAR_TOL, basis=None) -> SolvabilityReport:
    """Determinant test on the boundary rows of the homogeneous basis.

    ``solvable`` means ``|det D| > tol * |row 1| * |row 2|``.  ``rho`` is
    reported when ``q == 0`` and is ``None`` otherwise.
    """
    basis = basis or homogeneous_basis(prob)
    M = _boundary_matrix(prob, bc, basis, caputo_boundary_at_b)
    det, scale, sing = _singular(M, tol)
    r = rho(prob, bc) if prob.q_is_zero else None
    return SolvabilityReport(rho=r, det_D=det, scale=scale, solvable=not sing)


# ---------------------------------------------------------------------------
# Green's function and solution through it


def greens_function(prob: SelfAdjointProblem, bc: SturmLiouvilleBC, caputo_boundary_at_b: bool = False,
                    tol: float = SINGULAR_TOL) -> GreensTable:
    """Green's function of the homogeneous BVP.

    For each ``s``, ``u(., s) = c1(s) x1 + c2(s) x2`` meets the homogeneous
    left row and ``right(u) = -right(cauchy(., s))``; then ``v = u + cauchy``.
    Raises :class:`SingularError` when the homogeneous BVP is not uniquely
    solvable.
    """
    basis = homogeneous_basis(prob)
    M = _boundary_matrix(prob, bc, basis, caputo_boundary_at_b)
    det, _, sing = _singular(M, tol)
    if sing:
        raise SingularError(f"homogeneous BVP has nontrivial solutions (det D = {det:.3e})")
    X = cauchy_function(prob)
    rhs = np.vstack([np.zeros(X.values.shape[1]),
                     -_right_row(bc, X.values, prob.nu.nu, caputo_boundary_at_b)])
    c = np.linalg.solve(M, rhs)
    x1, x2 = (g.values for g in basis)
    u = np.outer(x1, c[0]) + np.outer(x2, c[1])
    return GreensTable(prob.a, prob.b, prob.nu.nu, u, u + X.values, X)


def solve_bvp(prob: SelfAdjointProblem, bc: SturmLiouvilleBC, caputo_boundary_at_b: bool = False,
              tol: float = SINGULAR_TOL, greens: GreensTable | None = None) -> GridFunction:
    """``y = z + sum_{s=a+1}^{b-1} G(., s) h(s)``.

    ``z`` solves the homogeneous equation with boundary data ``(A, B)``.  The
    column ``s = b`` of ``G`` vanishes, so stopping at ``b - 1`` (where ``h``
    ends) loses nothing.
    """
    basis = homogeneous_basis(prob)
    M = _boundary_matrix(prob, bc, basis, caputo_boundary_at_b)
    det, _, sing = _singular(M, tol)
    if sing:
        raise SingularError(f"BVP is not uniquely solvable (det D = {det:.3e})")
    c1, c2 = np.linalg.solve(M, [bc.A, bc.B])
    z = c1 * basis[0].values + c2 * basis[1].values
    G = (greens or greens_function(prob, bc, caputo_boundary_at_b, tol)).matrix
    n = prob.n
    return GridFunction(prob.domain, z + G[:, 1:n] @ prob.h.values)


# ---------------------------------------------------------------------------
# dense oracle


def _caputo_row(w: np.ndarray, m: int, size: int) -> np.ndarray:
    """Coefficients ``c`` with ``caputo(x)(a+m) = c . x``."""
    row = np.zeros(size)
    for i in range(1, m + 1):
        row[i] += w[m - i]
        row[i - 1] -= w[m - i]
    return row


def assemble_dense(prob: SelfAdjointProblem, bc: SturmLiouvilleBC,
                   caputo_boundary_at_b: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """Full ``(b - a + 1)``-square system: left row, interior equations, right row."""
    n = prob.n
    size = n + 1
    w = kernel_weights(1.0 - prob.nu.nu, size)
    p, q = prob.p_by_offset(), prob.q_by_offset()
    M = np.zeros((size, size))
    rhs = np.zeros(size)
    M[0, 0], M[0, 1] = bc.alpha + bc.beta, -bc.beta
    rhs[0] = bc.A
    for j in range(1, n):
        M[j] = p[j + 1] * _caputo_row(w, j + 1, size) - p[j] * _caputo_row(w, j, size)
        M[j, j] += q[j]
    rhs[1:n] = prob.h.values
    if caputo_boundary_at_b:
        M[n] = bc.delta * _caputo_row(w, n, size)
    else:
        M[n, n - 1] = -bc.delta
        M[n, n] = bc.delta
    M[n, n] += bc.gamma
    rhs[n] = bc.B
    return M, rhs


def dense_oracle_solve(prob: SelfAdjointProblem, bc: SturmLiouvilleBC, caputo_boundary_at_b: bool = False,
                       tol: float = SINGULAR_TOL) -> GridFunction:
    """Solve the BVP by LU with partial pivoting on the assembled system.

    Rows are scaled to unit max-norm first; a pivot ``<= tol`` raises
    :class:`SingularSystemError`.
    """
    M, rhs = assemble_dense(prob, bc, caputo_boundary_at_b)
    s = np.abs(M).max(axis=1)
    M, rhs = M / s[:, None], rhs / s
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(M)
    pivots = np.abs(np.diag(lu))
    if pivots.min() <= tol:
        raise SingularSystemError(f"pivot {pivots.min():.3e} below tolerance {tol:.1e}")
    return GridFunction(prob.domain, scipy.linalg.lu_solve((lu, piv), rhs))


# ---------------------------------------------------------------------------
# conjugate problem: p = 1, q = 0, x(a) = x(b) = 0


def _offsets(a, b, *pts):
    dom = Domain.between(a, b)
    return dom.length, [dom.offset(t) for t in pts]


def greens_closed_form_conjugate(a: float, b: float, nu: float, t: float, s: float) -> float:
    """Closed-form Green's function of the conjugate problem at ``(t, s)``."""
    n, (i, k) = _offsets(a, b, t, s)
    g = math.gamma(1.0 + nu)
    out = -rising(n - k, nu) * rising(i, nu) / (g * rising(n, nu))
    if k <= i:
        out += rising(i - k, nu) / g
    return out


def conjugate_table(a: float, b: float, nu: float) -> np.ndarray:
    """Closed-form ``G`` as a ``[t - a, s - a]`` matrix."""
    n = Domain.between(a, b).length
    return np.array([[greens_closed_form_conjugate(a, b, nu, a + i, a + k) for k in range(n + 1)]
                     for i in range(n + 1)])


@dataclass(frozen=True)
class InequalityReport:
    """Observed extremes, bounds and margins of the four Green's inequalities.

    ``margins`` are ``(max G, min G + lower_bound, max row sum - bound,
    max difference sum - bound)``; the inequalities claim the signs
    ``(<= 0, >= 0, <= 0, <= 0)``.
    """

    a: float
    b: float
    nu: float
    max_G: float
    min_G: float
    lower_bound: float
    max_abs_row_sum: float
    row_sum_bound: float
    max_abs_diff_sum: float
    diff_sum_bound: float

    @property
    def margins(self) -> tuple[float, float, float, float]:
        return (self.max_G,
                self.min_G + self.lower_bound,
                self.max_abs_row_sum - self.row_sum_bound,
                self.max_abs_diff_sum - self.diff_sum_bound)

    def holds(self, tol: float = ATOL) -> tuple[bool, bool, bool, bool]:
        """Sign checks with slack ``tol`` scaled by the bound size."""
        m1, m2, m3, m4 = self.margins
        return (m1 <= tol,
                m2 >= -tol * max(1.0, self.lower_bound),
                m3 <= tol * max(1.0, self.row_sum_bound),
                m4 <= tol * max(1.0, self.diff_sum_bound))

    def passed(self, tol: float = ATOL) -> bool:
        return all(self.holds(tol))


def diff_sums(G: np.ndarray) -> np.ndarray:
    """``sum_{s=a+1}^b |G(t, s) - G(t-1, s)|`` for ``t`` in ``N_{a+1}^b``."""
    return np.abs(np.diff(G, axis=0)[:, 1:]).sum(axis=1)


def inequality_margins(a: float, b: float, nu: float, method: str = "closed") -> InequalityReport:
    """Evaluate the four Green's inequalities of the conjugate problem.

    ``method="closed"`` uses the closed form, ``"constructed"`` builds ``G``
    with :func:`greens_function`.  Differences in ``t`` are taken on the
    assembled table, so the branch seam needs no special handling.
    """
    n = Domain.between(a, b).length
    if n < 2:
        raise DomainError(f"inequalities need b - a >= 2, got {n}")
    if not 0 < nu < 1:
        raise DomainError(f"inequalities need 0 < nu < 1, got {nu}")
    if method == "closed":
        G = conjugate_table(a, b, nu)
    elif method == "constructed":
        prob = SelfAdjointProblem.build(a, b, nu)
        G = greens_function(prob, SturmLiouvilleBC.dirichlet()).matrix
    else:
        raise ValueError(f"unknown method {method!r}")
    return InequalityReport(
        a=a, b=b, nu=nu,
        max_G=float(G.max()),
        min_G=float(G.min()),
        lower_bound=(n / 4) * math.exp(math.lgamma(n + 1) - math.lgamma(nu + 1) - math.lgamma(n + nu)),
        max_abs_row_sum=float(np.abs(G[:, 1:]).sum(axis=1).max()),
        row_sum_bound=n ** 2 / (4 * math.gamma(nu + 2)),
        max_abs_diff_sum=float(diff_sums(G).max()),
        diff_sum_bound=n / (nu + 1),
    )

