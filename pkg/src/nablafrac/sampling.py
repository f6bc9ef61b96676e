"""Random problem generators for cross-checks and experiments.

All draws go through a caller-supplied ``numpy.random.Generator`` so runs are
reproducible from a seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .calculus import frac_sum
from .greens import SturmLiouvilleBC, end_difference
from .grid import GridFunction
from .selfadjoint import SelfAdjointProblem, homogeneous_basis


@dataclass(frozen=True)
class ProblemRanges:
    max_length: int = 24
    p: tuple[float, float] = (0.5, 2.0)
    q: tuple[float, float] = (-0.5, 0.5)
    h: tuple[float, float] = (-1.0, 1.0)
    zero_q: bool = False


def random_nu(rng: np.random.Generator) -> float:
    """Order in ``(0, 1]``; one draw in ten is exactly 1."""
    if rng.random() < 0.1:
        return 1.0
    return float(rng.uniform(0.02, 1.0))


def random_problem(rng: np.random.Generator, ranges: ProblemRanges = ProblemRanges(),
                   a: float | None = None) -> SelfAdjointProblem:
    n = int(rng.integers(2, ranges.max_length + 1))
    a = float(rng.integers(-3, 4)) if a is None else a
    q = np.zeros(n - 1) if ranges.zero_q else rng.uniform(*ranges.q, n - 1)
    return SelfAdjointProblem.build(
        a, a + n, random_nu(rng),
        p=list(rng.uniform(*ranges.p, n)),
        q=list(q),
        h=list(rng.uniform(*ranges.h, n - 1)),
    )


def random_bc(rng: np.random.Generator, inhomogeneous: bool = True) -> SturmLiouvilleBC:
    """Boundary rows with coefficient pairs drawn at uniform angles."""
    t1, t2 = rng.uniform(0, np.pi, 2)
    A, B = rng.uniform(-1, 1, 2) if inhomogeneous else (0.0, 0.0)
    return SturmLiouvilleBC(np.cos(t1), np.sin(t1), np.cos(t2), np.sin(t2), A, B)


def singular_bc(prob: SelfAdjointProblem, rng: np.random.Generator,
                caputo_boundary_at_b: bool = False) -> SturmLiouvilleBC:
    """Boundary rows that a random homogeneous solution satisfies.

    With ``x = c1 x1 + c2 x2`` the rows ``nabla x(a+1) x(a) - x(a) nabla x(a+1)``
    and ``D x(b) x(b) - x(b) D x(b)`` both vanish, so ``x`` is a nontrivial
    solution of the homogeneous BVP.
    """
    c = rng.normal(size=2)
    c /= np.linalg.norm(c)
    x1, x2 = homogeneous_basis(prob)
    x = c[0] * x1.values + c[1] * x2.values
    dxa = x[1] - x[0]
    dxb = float(end_difference(x, prob.nu.nu, caputo_boundary_at_b))
    return SturmLiouvilleBC(dxa, x[0], dxb, -x[-1])


def zero_rho_bc(prob: SelfAdjointProblem, rng: np.random.Generator) -> SturmLiouvilleBC:
    """Boundary rows with ``rho = 0`` for a ``q == 0`` problem (``delta`` solved for)."""
    recip = GridFunction(prob.p.domain, 1.0 / prob.p.values)
    S = frac_sum(recip, prob.nu, prob.b, prob.a)
    t1, gamma = rng.uniform(0.2, np.pi / 2 - 0.2), rng.uniform(-1, 1)
    alpha, beta = np.cos(t1), np.sin(t1) * rng.choice([-1.0, 1.0])
    if abs(gamma) < 0.1:
        gamma = 0.5
    delta = -(alpha * gamma * S + beta * gamma / prob.p(prob.a + 1)) * prob.p(prob.b) / alpha
    return SturmLiouvilleBC(alpha, beta, gamma, delta)
