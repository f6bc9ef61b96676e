"""Nabla fractional sums, Riemann-Liouville and Caputo differences.

Operators are based at a point ``a``.  Unless given explicitly, ``a`` is
inferred from the function's domain: the fractional sum and the
Riemann-Liouville difference take ``a = f.base``, the Caputo difference of
order ``nu`` (which needs ``N = ceil(nu)`` points of history) takes
``a = f.base + N - 1``.

The sum kernel ``(t - s + 1)^(nu - 1) / Gamma(nu)`` depends on ``t - s``
only.  As a function of the lag ``j = t - s`` it is ``Gamma(j + nu) /
(Gamma(j + 1) Gamma(nu))``, which the weight tables below build by the ratio
recurrence ``w[j] = w[j - 1] (j - 1 + nu) / j``.  Order 0 gives the unit
impulse, i.e. the identity operator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError
from .grid import Domain, FracOrder, GridFunction, as_order, rising


@lru_cache(maxsize=256)
def _weights(order: float, n: int) -> np.ndarray:
    w = np.empty(n)
    if n:
        w[0] = 1.0
    for j in range(1, n):
        w[j] = w[j - 1] * (j - 1 + order) / j
    w.setflags(write=False)
    return w


def kernel_weights(order: float, n: int) -> np.ndarray:
    """First ``n`` lag weights of the order-``order`` nabla fractional sum.

    ``w[j] = (j + 1)^(order - 1) / Gamma(order)``; ``order == 0`` yields the
    unit impulse.  Returned arrays are read-only and shared.
    """
    if order < 0:
        raise DomainError(f"sum order must be nonnegative, got {order}")
    return _weights(float(order), int(n))


@dataclass(frozen=True)
class FracKernelRow:
    """Lag weights of one fractional sum, ``weights[j]`` for lag ``t - s = j``."""

    order: float
    weights: np.ndarray

    @classmethod
    def build(cls, order: float, n: int) -> "FracKernelRow":
        return cls(float(order), kernel_weights(order, n))

    def apply(self, history: np.ndarray) -> float:
        """Sum against ``history = [f(a+1), ..., f(t)]`` evaluated at ``t``."""
        k = len(history)
        if k > len(self.weights):
            raise DomainError(f"kernel row holds {len(self.weights)} lags, needs {k}")
        # lag 0 first, the largest lag last
        return math.fsum(self.weights[:k] * history[::-1])


def _span(f: GridFunction, start: float, end: float) -> np.ndarray:
    """Values ``f(start), ..., f(end)``; empty when ``end < start``."""
    i = f.domain.offset(start)
    if end < start:
        return f.values[i:i]
    return f.values[i : f.domain.offset(end) + 1]


def _lag(a: float, t: float) -> int:
    """Integer ``t - a``, which must be nonnegative."""
    return Domain.between(a, t).length


def _sum_at(f: GridFunction, order: float, t: float, a: float) -> float:
    k = _lag(a, t)
    if k == 0:
        return 0.0
    return FracKernelRow.build(order, k).apply(_span(f, a + 1, t))


def frac_sum(f: GridFunction, nu, t: float, a: float | None = None) -> float:
    """Order-``nu`` nabla fractional sum of ``f`` based at ``a``, evaluated at ``t``.

    ``f`` must be defined on ``N_{a+1}^t``.  At ``t == a`` the sum is empty.
    """
    order = as_order(nu)
    a = f.base if a is None else a
    return _sum_at(f, order.nu, t, a)


def frac_sum_grid(f: GridFunction, nu, a: float | None = None) -> GridFunction:
    """The whole function ``t -> frac_sum(f, nu, t)`` on ``N_a^{f.end}``."""
    order = as_order(nu)
    a = f.base if a is None else a
    dom = Domain.between(a, f.end)
    return GridFunction(dom, [_sum_at(f, order.nu, t, a) for t in dom.points()])


def _binom_diff(g: np.ndarray, n: int) -> float:
    """``n``-th backward difference at the last entry of ``g`` (length ``n + 1``)."""
    return float(np.diff(g, n=n)[-1]) if n else float(g[-1])


def rl_frac_diff(f: GridFunction, nu, t: float, a: float | None = None) -> float:
    """Riemann-Liouville difference ``nabla^N nabla_a^{-(N - nu)} f`` at ``t``.

    Valid for ``t`` in ``N_{a+N}``.  For integer ``nu`` the inner sum has
    order 0 and is the identity, so ``f(a)`` must exist in that case.
    """
    order = as_order(nu)
    a = f.base if a is None else a
    n = order.ceil_n
    if _lag(a, t) < n:
        raise DomainError(f"Riemann-Liouville difference of order {order.nu} needs t >= a + {n}")
    inner = n - order.nu
    if inner == 0:
        g = np.array(_span(f, t - n, t))
    else:
        g = np.array([_sum_at(f, inner, t - n + i, a) for i in range(n + 1)])
    return _binom_diff(g, n)


def rl_frac_diff_grid(f: GridFunction, nu, a: float | None = None) -> GridFunction:
    order = as_order(nu)
    a = f.base if a is None else a
    dom = Domain.between(a + order.ceil_n, f.end)
    return GridFunction(dom, [rl_frac_diff(f, order, t, a) for t in dom.points()])


def nabla_frac(f: GridFunction, order: float, t: float, a: float | None = None) -> float:
    """``nabla_a^order f(t)`` for any real order: sums below 0, identity at 0."""
    if order < 0:
        return frac_sum(f, -order, t, a)
    if order == 0:
        return f(t)
    return rl_frac_diff(f, order, t, a)


def _caputo_base(f: GridFunction, order: FracOrder, a: float | None) -> float:
    return f.base + order.ceil_n - 1 if a is None else a


def caputo_diff(f: GridFunction, nu, t: float, a: float | None = None) -> float:
    """Caputo difference ``nabla_a^{-(N - nu)} (nabla^N f)`` evaluated at ``t``.

    ``f`` must be defined on ``N_{a-N+1}^t``.  The value at ``t == a`` is the
    empty sum, 0.
    """
    order = as_order(nu)
    n = order.ceil_n
    a = _caputo_base(f, order, a)
    k = _lag(a, t)
    if k == 0:
        return 0.0
    if a - n + 1 < f.base - 1e-9:
        raise DomainError(f"Caputo difference of order {order.nu} needs f from {a - n + 1}")
    hist = np.diff(_span(f, a - n + 1, t), n=n)
    return FracKernelRow.build(n - order.nu, k).apply(hist)


def caputo_diff_grid(f: GridFunction, nu, a: float | None = None) -> GridFunction:
    """Caputo difference on ``N_a^{f.end}`` (0 at ``a``)."""
    order = as_order(nu)
    a = _caputo_base(f, order, a)
    dom = Domain.between(a, f.end)
    return GridFunction(dom, [caputo_diff(f, order, t, a) for t in dom.points()])


def _backward_diffs_at(f: GridFunction, a: float, n: int) -> list[float]:
    """``[nabla^0 f(a), ..., nabla^{n-1} f(a)]``."""
    hist = np.array(_span(f, a - n + 1, a))
    return [_binom_diff(hist[n - 1 - k :], k) for k in range(n)]


def taylor_whole(f: GridFunction, n: int, t: float, a: float | None = None) -> float:
    """Right-hand side of the discrete whole-order Taylor formula at ``t``.

    Polynomial part from ``nabla^k f(a)``, ``k < n``, plus the remainder sum of
    ``nabla^n f``.  Reproduces ``f(t)`` for every ``t`` in ``N_a``.
    """
    if n < 1:
        raise DomainError("Taylor order must be a positive integer")
    a = f.base + n - 1 if a is None else a
    k = _lag(a, t)
    if a - n + 1 < f.base - 1e-9:
        raise DomainError(f"order-{n} Taylor formula needs f from {a - n + 1}")
    poly = [d * rising(k, j) / math.factorial(j) for j, d in enumerate(_backward_diffs_at(f, a, n))]
    dn = np.diff(_span(f, a - n + 1, t), n=n)
    rem = [rising(k - i + 1, n - 1) / math.factorial(n - 1) * dn[i - 1] for i in range(1, k + 1)]
    return math.fsum(poly + rem)


def taylor_caputo(f: GridFunction, nu, t: float, a: float | None = None) -> float:
    """Caputo Taylor representation of ``f(t)``.

    ``sum_{k<N} (t-a)^(k)/k! nabla^k f(a) + (1/Gamma(nu)) sum_{tau=a+1}^t
    (t - tau + 1)^(nu - 1) caputo_diff(f, nu, tau)``.
    """
    order = as_order(nu)
    n = order.ceil_n
    a = _caputo_base(f, order, a)
    k = _lag(a, t)
    poly = [d * rising(k, j) / math.factorial(j) for j, d in enumerate(_backward_diffs_at(f, a, n))]
    g = math.gamma(order.nu)
    rem = [
        rising(k - i + 1, order.nu - 1) / g * caputo_diff(f, order, a + i, a)
        for i in range(1, k + 1)
    ]
    return math.fsum(poly + rem)
