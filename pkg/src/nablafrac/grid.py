"""Integer-offset lattices, grid functions and the rising function.

Every point handled by the package has the form ``base + k`` with ``k`` an
integer, so differences of points are always integers and are carried as
such.  Values live in read-only numpy arrays indexed by the offset ``k``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

from .errors import DomainError, PoleError

#: relative / absolute comparison tolerances used by the property suites
RTOL = 1e-9
ATOL = 1e-12

#: integer orders up to this size use the exact product in :func:`rising`
MAX_PRODUCT_ORDER = 64

# tolerance for deciding that a real point sits on the lattice
_OFFSET_TOL = 1e-9


@dataclass(frozen=True)
class Domain:
    """The finite lattice ``{base, base + 1, ..., base + length}``."""

    base: float
    length: int

    def __post_init__(self):
        if int(self.length) != self.length or self.length < 0:
            raise DomainError(f"domain length must be a nonnegative integer, got {self.length!r}")
        object.__setattr__(self, "base", float(self.base))
        object.__setattr__(self, "length", int(self.length))

    @classmethod
    def between(cls, start: float, end: float) -> "Domain":
        """Lattice running from ``start`` to ``end`` inclusive."""
        n = end - start
        k = round(n)
        if abs(n - k) > _OFFSET_TOL or k < 0:
            raise DomainError(f"{end} is not in N_{start}")
        return cls(start, k)

    @property
    def end(self) -> float:
        return self.base + self.length

    @property
    def size(self) -> int:
        return self.length + 1

    def points(self) -> np.ndarray:
        return self.base + np.arange(self.size, dtype=float)

    def offset(self, t: float) -> int:
        """Offset ``k`` with ``t == base + k``; raises if ``t`` is off the lattice."""
        d = t - self.base
        k = round(d)
        if abs(d - k) > _OFFSET_TOL or not 0 <= k <= self.length:
            raise DomainError(f"point {t} is not in N_{self.base}^{self.end}")
        return int(k)

    def __contains__(self, t: float) -> bool:
        try:
            self.offset(t)
        except DomainError:
            return False
        return True

    def compatible(self, other: "Domain") -> bool:
        return self.base == other.base and self.length == other.length

    def shift(self, k: int) -> "Domain":
        return Domain(self.base + k, self.length)


Values = Union[Sequence[float], np.ndarray]


@dataclass(frozen=True, eq=False)
class GridFunction:
    """A real function on a :class:`Domain`, stored by offset."""

    domain: Domain
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.ndim != 1 or vals.shape[0] != self.domain.size:
            raise DomainError(
                f"expected {self.domain.size} values on N_{self.domain.base}^{self.domain.end}, "
                f"got shape {vals.shape}"
            )
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_callable(cls, domain: Domain, fn: Callable[[float], float]) -> "GridFunction":
        return cls(domain, [fn(t) for t in domain.points()])

    @classmethod
    def constant(cls, domain: Domain, c: float) -> "GridFunction":
        return cls(domain, np.full(domain.size, float(c)))

    @classmethod
    def on(cls, start: float, end: float, values) -> "GridFunction":
        """Build on ``N_start^end`` from a constant, a callable or a value list."""
        dom = Domain.between(start, end)
        if callable(values):
            return cls.from_callable(dom, values)
        if np.ndim(values) == 0:
            return cls.constant(dom, values)
        return cls(dom, values)

    @property
    def base(self) -> float:
        return self.domain.base

    @property
    def end(self) -> float:
        return self.domain.end

    def __call__(self, t: float) -> float:
        return float(self.values[self.domain.offset(t)])

    def at(self, k: int) -> float:
        """Value at offset ``k`` (no negative-index wraparound)."""
        if not 0 <= k <= self.domain.length:
            raise DomainError(f"offset {k} outside 0..{self.domain.length}")
        return float(self.values[k])

    def restrict(self, start: float, end: float) -> "GridFunction":
        i, j = self.domain.offset(start), self.domain.offset(end)
        if j < i:
            raise DomainError(f"empty restriction [{start}, {end}]")
        return GridFunction(Domain(self.domain.base + i, j - i), self.values[i : j + 1])

    def _check(self, other: "GridFunction") -> None:
        if not self.domain.compatible(other.domain):
            raise DomainError(f"incompatible domains {self.domain} and {other.domain}")

    def __add__(self, other):
        if isinstance(other, GridFunction):
            self._check(other)
            return GridFunction(self.domain, self.values + other.values)
        return GridFunction(self.domain, self.values + float(other))

    def __sub__(self, other):
        if isinstance(other, GridFunction):
            self._check(other)
            return GridFunction(self.domain, self.values - other.values)
        return GridFunction(self.domain, self.values - float(other))

    def __mul__(self, c: float):
        return GridFunction(self.domain, self.values * float(c))

    __rmul__ = __mul__

    def __neg__(self):
        return GridFunction(self.domain, -self.values)

    def __repr__(self) -> str:
        return f"GridFunction(N_{self.base:g}^{self.end:g}, {np.array2string(self.values, threshold=8)})"


@dataclass(frozen=True)
class FracOrder:
    """A positive order ``nu`` together with ``ceil_n = ceil(nu)``."""

    nu: float

    def __post_init__(self):
        nu = float(self.nu)
        if not math.isfinite(nu) or nu <= 0:
            raise DomainError(f"fractional order must be positive, got nu={self.nu!r}")
        object.__setattr__(self, "nu", nu)

    @property
    def ceil_n(self) -> int:
        return math.ceil(self.nu)

    @property
    def is_integer(self) -> bool:
        return self.nu.is_integer()


def as_order(nu) -> FracOrder:
    return nu if isinstance(nu, FracOrder) else FracOrder(nu)


# ---------------------------------------------------------------------------
# rising function


def _nonpos_int(x: float) -> bool:
    return float(x).is_integer() and x <= 0


def _rising_product(t: float, m: int) -> float:
    """``Gamma(t + m) / Gamma(t)`` for integer ``m`` by direct product."""
    if m >= 0:
        out = 1.0
        for i in range(m):
            out *= t + i
        return out
    den = 1.0
    for i in range(1, -m + 1):
        den *= t - i
    return 1.0 / den


def _gamma_sign(x: float) -> float:
    if x > 0:
        return 1.0
    return -1.0 if math.floor(x) % 2 else 1.0


def _rising_lgamma(t: float, nu: float) -> float:
    """``Gamma(t + nu) / Gamma(t)`` through log-gamma; no pole handling."""
    s = _gamma_sign(t + nu) * _gamma_sign(t)
    return s * math.exp(math.lgamma(t + nu) - math.lgamma(t))


def rising(t: float, nu: float) -> float:
    """Generalized rising function ``t^(nu) = Gamma(t + nu) / Gamma(t)``.

    Conventions at gamma poles:

    * ``t`` a non-positive integer and ``t + nu`` not: the value is 0.
    * both non-positive integers: the finite limit of the ratio,
      ``(-1)**nu * Gamma(1 - t) / Gamma(1 - t - nu)``.
    * ``t + nu`` a non-positive integer and ``t`` not: :class:`PoleError`.

    >>> rising(3, 2)
    12.0
    >>> rising(0, 0.5)
    0.0
    """
    t = float(t)
    nu = float(nu)
    t_pole = _nonpos_int(t)
    top_pole = _nonpos_int(t + nu)
    if t_pole and top_pole:
        m = int(round(nu))
        sign = -1.0 if m % 2 else 1.0
        return sign * rising(1.0 - t - m, m)
    if t_pole:
        return 0.0
    if top_pole:
        raise PoleError(f"rising({t}, {nu}): Gamma({t + nu}) is a pole")
    if nu.is_integer() and abs(nu) <= MAX_PRODUCT_ORDER:
        return _rising_product(t, int(nu))
    return _rising_lgamma(t, nu)


# ---------------------------------------------------------------------------
# whole-order nabla calculus


def nabla_diff(f: GridFunction) -> GridFunction:
    """Backward difference ``f(t) - f(t - 1)`` on ``N_{a+1}^b``."""
    if f.domain.length < 1:
        raise DomainError("nabla difference needs at least two points")
    return GridFunction(Domain(f.base + 1, f.domain.length - 1), np.diff(f.values))


def nabla_diff_n(f: GridFunction, n: int) -> GridFunction:
    """``n``-fold backward difference, defined on ``N_{a+n}^b``."""
    if n < 0:
        raise DomainError("difference order must be nonnegative")
    if f.domain.length < n:
        raise DomainError(f"{n}-th difference needs at least {n + 1} points")
    return GridFunction(Domain(f.base + n, f.domain.length - n), np.diff(f.values, n=n))


def nabla_integral(f: GridFunction, c: float, d: float) -> float:
    """Definite nabla integral: ``sum_{s=c+1}^{d} f(s)``, zero when ``d <= c``.

    Only ``f(c+1), ..., f(d)`` are read, so ``c`` may sit one step below the
    domain of ``f`` (as with ``f = nabla F`` on ``N_{a+1}``).
    """
    ext = Domain(f.base - 1, f.domain.length + 1)
    i = ext.offset(c) - 1
    j = ext.offset(d) - 1
    if j <= i:
        return 0.0
    return math.fsum(f.values[i + 1 : j + 1])
