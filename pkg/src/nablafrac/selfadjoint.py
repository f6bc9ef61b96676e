"""The self-adjoint Caputo operator and its initial value problems.

``L_a x(t) = nabla[p(t+1) C x(t+1)] + q(t) x(t)`` where ``C`` is the Caputo
difference of order ``0 < nu <= 1`` based at ``a``.  Expanding the outer
difference gives the form evaluated here,

    L_a x(t) = p(t+1) C x(t+1) - p(t) C x(t) + q(t) x(t),   t in N_{a+1}^{b-1}.

Two IVP routes are provided for the plain Caputo problem (forward recursion
on ``nabla^N f`` and the closed Taylor-type formula) and two for the
self-adjoint one (direct stepping and variation of constants through the
Cauchy function).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .calculus import caputo_diff, kernel_weights
from .errors import DomainError, ValidationError
from .grid import Domain, FracOrder, GridFunction, as_order, rising


@dataclass(frozen=True, eq=False)
class SelfAdjointProblem:
    """Coefficients of ``L_a x = h`` on ``N_a^b``.

    ``p`` lives on ``N_{a+1}^b`` and must be positive; ``q`` and ``h`` live on
    ``N_{a+1}^{b-1}``.
    """

    a: float
    b: float
    nu: FracOrder
    p: GridFunction
    q: GridFunction
    h: GridFunction

    def __post_init__(self):
        object.__setattr__(self, "nu", as_order(self.nu))
        try:
            n = Domain.between(self.a, self.b).length
        except DomainError:
            raise ValidationError(f"b - a must be a positive integer (a={self.a}, b={self.b})") from None
        if n < 2:
            raise ValidationError(f"need b - a >= 2, got {n}")
        if self.nu.nu > 1:
            raise ValidationError(f"nu must satisfy 0 < nu <= 1, got {self.nu.nu}")
        if not self.p.domain.compatible(Domain(self.a + 1, n - 1)):
            raise ValidationError(f"p must be given on N_{self.a + 1}^{self.b} ({n} values)")
        for name in ("q", "h"):
            if not getattr(self, name).domain.compatible(Domain(self.a + 1, n - 2)):
                raise ValidationError(f"{name} must be given on N_{self.a + 1}^{self.b - 1} ({n - 1} values)")
        for name in ("p", "q", "h"):
            if not np.all(np.isfinite(getattr(self, name).values)):
                raise ValidationError(f"{name} has non-finite values")
        if np.any(self.p.values <= 0):
            raise ValidationError("p must be positive on N_{a+1}^b")

    @classmethod
    def build(cls, a: float, b: float, nu, p=1.0, q=0.0, h=0.0) -> "SelfAdjointProblem":
        """Coefficients may be constants, callables of ``t`` or value lists."""
        try:
            return cls(
                a,
                b,
                as_order(nu),
                GridFunction.on(a + 1, b, p),
                GridFunction.on(a + 1, b - 1, q),
                GridFunction.on(a + 1, b - 1, h),
            )
        except DomainError as exc:
            raise ValidationError(str(exc)) from None

    @property
    def n(self) -> int:
        return self.p.domain.length + 1

    @property
    def domain(self) -> Domain:
        return Domain(self.a, self.n)

    @property
    def q_is_zero(self) -> bool:
        return not np.any(self.q.values)

    def with_h(self, h) -> "SelfAdjointProblem":
        if not isinstance(h, GridFunction):
            h = GridFunction.on(self.a + 1, self.b - 1, h)
        return replace(self, h=h)

    def homogeneous(self) -> "SelfAdjointProblem":
        return self.with_h(0.0)

    # offset-indexed copies (index = t - a), NaN where undefined
    def p_by_offset(self) -> np.ndarray:
        return np.concatenate([[np.nan], self.p.values])

    def q_by_offset(self) -> np.ndarray:
        return np.concatenate([[np.nan], self.q.values, [np.nan]])

    def h_by_offset(self) -> np.ndarray:
        return np.concatenate([[np.nan], self.h.values, [np.nan]])


@dataclass(frozen=True)
class InitialData:
    """``x(a) = A`` and ``nabla x(a+1) = B``."""

    A: float = 0.0
    B: float = 0.0


@dataclass(frozen=True, eq=False)
class CaputoIvpSpec:
    """``caputo_diff(f, nu) = h`` on ``N_{a+1}`` with ``nabla^k f(a) = c[k]``."""

    a: float
    nu: FracOrder
    c: Sequence[float]
    h: GridFunction

    def __post_init__(self):
        object.__setattr__(self, "nu", as_order(self.nu))
        object.__setattr__(self, "c", tuple(float(v) for v in self.c))
        if len(self.c) != self.nu.ceil_n:
            raise ValidationError(f"need {self.nu.ceil_n} initial values c_0..c_{{N-1}}, got {len(self.c)}")
        if abs(self.h.base - (self.a + 1)) > 1e-9:
            raise ValidationError(f"h must start at a + 1 = {self.a + 1}")


@dataclass(frozen=True, eq=False)
class KernelTable:
    """Two-argument table ``values[t - a, s - a]`` over ``N_a^b x N_a^b``.

    For a Cauchy function the entries with ``t < s`` are zero: the column
    ``x(., s)`` is extended by zero before its base point.
    """

    a: float
    b: float
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def domain(self) -> Domain:
        return Domain.between(self.a, self.b)

    def __call__(self, t: float, s: float) -> float:
        dom = self.domain
        return float(self.values[dom.offset(t), dom.offset(s)])

    def column(self, s: float) -> GridFunction:
        return GridFunction(self.domain, self.values[:, self.domain.offset(s)])


# ---------------------------------------------------------------------------
# operator


def _check_x(prob: SelfAdjointProblem, x: GridFunction) -> None:
    if not x.domain.compatible(prob.domain):
        raise DomainError(f"x must be given on N_{prob.a}^{prob.b}")


def apply_L(prob: SelfAdjointProblem, x: GridFunction, t: float) -> float:
    """``(L_a x)(t)`` for ``t`` in ``N_{a+1}^{b-1}``."""
    _check_x(prob, x)
    k = prob.domain.offset(t)
    if not 1 <= k <= prob.n - 1:
        raise DomainError(f"L_a x(t) is defined for t in N_{prob.a + 1}^{prob.b - 1}, got {t}")
    nu = prob.nu
    return (
        prob.p(t + 1) * caputo_diff(x, nu, t + 1, prob.a)
        - prob.p(t) * caputo_diff(x, nu, t, prob.a)
        + prob.q(t) * x(t)
    )


def residual(prob: SelfAdjointProblem, x: GridFunction) -> np.ndarray:
    """``L_a x - h`` on ``N_{a+1}^{b-1}``."""
    return np.array([apply_L(prob, x, t) - prob.h(t) for t in prob.h.domain.points()])


# ---------------------------------------------------------------------------
# stepping


def _march(p: np.ndarray, q: np.ndarray, h: np.ndarray, w: np.ndarray,
           start: int, n: int, x0: float, d1: float) -> np.ndarray:
    """Solve ``L_s x = h`` with base offset ``start`` up to offset ``n``.

    ``p, q, h`` are indexed by offset from the global base; ``w`` holds the
    order ``1 - nu`` sum weights.  Returns ``x`` at offsets ``start..n``.
    """
    m = n - start
    x = np.zeros(m + 1)
    d = np.zeros(m + 1)  # d[j] = nabla x at offset start + j
    x[0] = x0
    if m == 0:
        return x
    d[1] = d1
    x[1] = x0 + d1
    for j in range(1, m):
        t = start + j
        past = d[j:0:-1]
        cap_t = np.dot(w[:j], past)
        tail = np.dot(w[1 : j + 1], past)
        d[j + 1] = (h[t] - q[t] * x[j] + p[t] * cap_t) / p[t + 1] - tail
        x[j + 1] = x[j] + d[j + 1]
    return x


def _caputo_weights(prob: SelfAdjointProblem) -> np.ndarray:
    return kernel_weights(1.0 - prob.nu.nu, prob.n + 1)


def solve_selfadjoint_ivp(prob: SelfAdjointProblem, init: InitialData) -> GridFunction:
    """Unique solution of ``L_a x = h``, ``x(a) = A``, ``nabla x(a+1) = B``.

    Marches ``x(t+1)`` forward from the two initial values using the
    Caputo memory sums up to ``t``; ``p > 0`` keeps every step well posed.
    """
    x = _march(prob.p_by_offset(), prob.q_by_offset(), prob.h_by_offset(),
               _caputo_weights(prob), 0, prob.n, init.A, init.B)
    return GridFunction(prob.domain, x)


def _cauchy_column(args) -> np.ndarray:
    p, q, zero, w, s, n = args
    col = np.zeros(n + 1)
    if s < n:
        col[s:] = _march(p, q, zero, w, s, n, 0.0, 1.0 / p[s + 1])
    return col


def cauchy_function(prob: SelfAdjointProblem, max_workers: int | None = None) -> KernelTable:
    """Cauchy function ``x(t, s)`` for every ``s`` in ``N_a^b``.

    Column ``s`` solves ``L_s x(., s) = 0`` on ``N_{s+1}`` with ``x(s, s) = 0``
    and ``nabla x(s+1, s) = 1/p(s+1)``; ``p`` and ``q`` are shared, only the
    Caputo base moves.  Columns are independent, so ``max_workers > 1`` builds
    them on a thread pool with bit-identical results.
    """
    n = prob.n
    p, q, w = prob.p_by_offset(), prob.q_by_offset(), _caputo_weights(prob)
    zero = np.zeros(n + 1)
    jobs = [(p, q, zero, w, s, n) for s in range(n + 1)]
    if max_workers and max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            cols = list(pool.map(_cauchy_column, jobs))
    else:
        cols = [_cauchy_column(job) for job in jobs]
    return KernelTable(prob.a, prob.b, np.column_stack(cols))


def variation_of_constants(prob: SelfAdjointProblem, init: InitialData,
                           cauchy: KernelTable | None = None) -> GridFunction:
    """``y(t) = y0(t) + sum_{s=a+1}^{t} x(t, s) h(s)``.

    ``y0`` solves the homogeneous equation with the given initial data and
    ``x`` is the Cauchy function.  ``h`` stops at ``b - 1``; the ``s = b``
    term would carry ``x(b, b) = 0`` anyway.
    """
    y0 = solve_selfadjoint_ivp(prob.homogeneous(), init)
    X = (cauchy or cauchy_function(prob)).values
    n = prob.n
    forced = X[:, 1:n] @ prob.h.values
    return GridFunction(prob.domain, y0.values + forced)


def homogeneous_basis(prob: SelfAdjointProblem) -> tuple[GridFunction, GridFunction]:
    """Solutions of ``L_a x = 0`` with initial data ``(1, 0)`` and ``(0, 1)``."""
    hom = prob.homogeneous()
    return (solve_selfadjoint_ivp(hom, InitialData(1.0, 0.0)),
            solve_selfadjoint_ivp(hom, InitialData(0.0, 1.0)))


# ---------------------------------------------------------------------------
# plain Caputo IVP


def _history(c: Sequence[float]) -> np.ndarray:
    """``f(a-N+1), ..., f(a)`` from ``nabla^k f(a) = c[k]`` (Newton backward form)."""
    n = len(c)
    out = np.empty(n)
    for j in range(n):
        out[n - 1 - j] = math.fsum((-1) ** k * math.comb(j, k) * c[k] for k in range(j + 1))
    return out


def _spec_setup(spec: CaputoIvpSpec, b: float | None):
    b = spec.h.end if b is None else b
    n = Domain.between(spec.a, b).length
    if n < 1:
        raise DomainError("need b >= a + 1")
    if b > spec.h.end + 1e-9:
        raise DomainError(f"h is given only up to {spec.h.end}")
    return b, n, spec.h.values[:n]


def solve_caputo_ivp_stepping(spec: CaputoIvpSpec, b: float | None = None) -> GridFunction:
    """Solve the Caputo IVP by forward recursion on ``nabla^N f``.

    ``nabla^N f(t) = h(t) - sum_{s=a+1}^{t-1} w[t-s] nabla^N f(s)`` with the
    order ``N - nu`` sum weights, then ``f(t)`` is recovered from
    ``nabla^N f(t)`` and the ``N`` previous values.  Result on ``N_{a-N+1}^b``.
    """
    N = spec.nu.ceil_n
    b, n, h = _spec_setup(spec, b)
    w = kernel_weights(N - spec.nu.nu, n)
    coef = [(-1) ** k * math.comb(N, k) for k in range(1, N + 1)]
    f = np.empty(N + n)
    f[:N] = _history(spec.c)
    D = np.zeros(n + 1)
    for i in range(1, n + 1):
        D[i] = h[i - 1] - np.dot(w[1:i], D[i - 1 : 0 : -1])
        pos = N - 1 + i
        f[pos] = D[i] - sum(cf * f[pos - k] for k, cf in enumerate(coef, start=1))
    return GridFunction(Domain(spec.a - N + 1, N - 1 + n), f)


def solve_caputo_ivp_closed(spec: CaputoIvpSpec, b: float | None = None) -> GridFunction:
    """Evaluate the explicit solution formula of the Caputo IVP.

    ``f(t) = sum_{k<N} (t-a)^(k)/k! c_k + (1/Gamma(nu)) sum_{tau=a+1}^t
    (t - tau + 1)^(nu - 1) h(tau)``, each rising factor evaluated directly.
    History points before ``a`` come from the initial differences.
    """
    nu = spec.nu.nu
    N = spec.nu.ceil_n
    b, n, h = _spec_setup(spec, b)
    g = math.gamma(nu)
    vals = list(_history(spec.c))
    for k in range(1, n + 1):
        poly = [rising(k, j) / math.factorial(j) * c for j, c in enumerate(spec.c)]
        conv = [rising(k - i + 1, nu - 1) / g * h[i - 1] for i in range(1, k + 1)]
        vals.append(math.fsum(poly + conv))
    return GridFunction(Domain(spec.a - N + 1, N - 1 + n), vals)
