import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nablafrac import Domain, DomainError, FracOrder, GridFunction, PoleError
from nablafrac.grid import _rising_lgamma, _rising_product, nabla_diff, nabla_diff_n, nabla_integral, rising

import oracles

finite = st.floats(-50, 50, allow_nan=False)


@st.composite
def grid_functions(draw, min_len=1, max_len=30):
    base = draw(st.sampled_from([0.0, -2.0, 3.0, 0.5, -1.25]))
    vals = draw(st.lists(finite, min_size=min_len + 1, max_size=max_len + 1))
    return GridFunction(Domain(base, len(vals) - 1), vals)


# -- domains -----------------------------------------------------------------


def test_domain_points_and_offsets():
    d = Domain(0.5, 4)
    assert d.end == 4.5
    assert list(d.points()) == [0.5, 1.5, 2.5, 3.5, 4.5]
    assert d.offset(2.5) == 2
    assert 4.5 in d and 5.5 not in d and 1.0 not in d


def test_domain_rejects_bad_length():
    with pytest.raises(DomainError):
        Domain(0, -1)
    with pytest.raises(DomainError):
        Domain(0, 1.5)


def test_domain_between_requires_integer_gap():
    assert Domain.between(-1, 3) == Domain(-1, 4)
    with pytest.raises(DomainError):
        Domain.between(0, 2.5)
    with pytest.raises(DomainError):
        Domain.between(2, 0)


def test_compatibility_needs_equal_base_and_length():
    assert Domain(0, 3).compatible(Domain(0, 3))
    assert not Domain(0, 3).compatible(Domain(1, 3))
    assert not Domain(0, 3).compatible(Domain(0, 4))


# -- grid functions ------------------------------------------------------------


def test_grid_function_length_must_match():
    with pytest.raises(DomainError):
        GridFunction(Domain(0, 3), [1, 2, 3])


def test_evaluation_by_point_and_offset():
    f = GridFunction.on(2, 5, lambda t: t * t)
    assert f(4) == 16
    assert f.at(0) == 4
    with pytest.raises(DomainError):
        f(6)
    with pytest.raises(DomainError):
        f(1)
    with pytest.raises(DomainError):
        f.at(-1)


def test_values_are_read_only():
    f = GridFunction.on(0, 3, 1.0)
    with pytest.raises(ValueError):
        f.values[0] = 2.0


def test_pointwise_arithmetic_checks_domains():
    f = GridFunction.on(0, 3, lambda t: t)
    g = GridFunction.on(0, 3, 2.0)
    assert list((f + g).values) == [2, 3, 4, 5]
    assert list((2 * f - g).values) == [-2, 0, 2, 4]
    with pytest.raises(DomainError):
        f + GridFunction.on(1, 4, 0.0)


def test_restrict():
    f = GridFunction.on(0, 6, lambda t: 10 * t)
    r = f.restrict(2, 4)
    assert r.base == 2 and list(r.values) == [20, 30, 40]


# -- rising function -------------------------------------------------------------


def test_rising_examples():
    assert rising(0, 0.5) == 0.0
    assert rising(3, 0) == 1.0
    assert rising(3, 2) == 12.0
    assert rising(1, 0.5) == pytest.approx(0.886226925452758, rel=1e-14)


def test_rising_pole_conventions():
    # t a pole, t + nu not: zero
    assert rising(-2, 0.3) == 0.0
    # both poles: finite limit, e.g. Gamma(-1)/Gamma(-2) -> -2
    assert rising(-2, 1) == pytest.approx(-2.0)
    assert rising(0, 0) == 1.0
    assert rising(-3, 2) == pytest.approx(float(oracles.rising(-3, 2)))
    with pytest.raises(PoleError):
        rising(0.5, -1.5)


@given(st.floats(0.01, 40))
def test_rising_one_is_identity(t):
    assert rising(t, 1) == pytest.approx(t, rel=1e-15)


@given(st.integers(1, 20), st.integers(0, 12))
def test_rising_integer_product_exact(t, m):
    assert rising(t, m) == math.prod(range(t, t + m))


@given(st.floats(0.05, 30), st.integers(0, 20))
def test_product_and_lgamma_paths_agree(t, m):
    assert _rising_lgamma(t, m) == pytest.approx(_rising_product(t, m), rel=1e-10)


@given(st.floats(0.05, 30), st.floats(-0.95, 3))
def test_rising_matches_mpmath(t, nu):
    ref = float(oracles.rising(t, nu))
    assert rising(t, nu) == pytest.approx(ref, rel=1e-11, abs=1e-300)


def test_rising_continuous_in_nu_across_integers():
    for t in (0.3, 1.0, 2.5, 7.0):
        for m in (1, 2, 5):
            for eps in (1e-9, -1e-9):
                assert rising(t, m + eps) == pytest.approx(rising(t, m), rel=1e-7)


def test_frac_order():
    assert FracOrder(0.3).ceil_n == 1
    assert FracOrder(1.0).ceil_n == 1 and FracOrder(1.0).is_integer
    assert FracOrder(2.4).ceil_n == 3
    for bad in (0, -0.5, float("nan"), float("inf")):
        with pytest.raises(DomainError):
            FracOrder(bad)


# -- whole-order calculus --------------------------------------------------------


def test_nabla_diff_examples():
    c = nabla_diff(GridFunction.on(0, 5, 7.0))
    assert c.base == 1 and c.end == 5 and not np.any(c.values)
    assert list(nabla_diff(GridFunction.on(0, 5, lambda t: t)).values) == [1] * 5
    ex = GridFunction.on(0, 1, [2.0, 3.0])
    assert nabla_diff(ex)(1) == 1.0
    with pytest.raises(DomainError):
        nabla_diff(GridFunction.on(0, 0, [1.0]))


def test_nabla_diff_n_domain():
    f = GridFunction.on(0, 6, lambda t: t ** 3)
    d3 = nabla_diff_n(f, 3)
    assert d3.base == 3 and list(d3.values) == [6.0] * 4
    with pytest.raises(DomainError):
        nabla_diff_n(f, 7)


def test_nabla_integral_examples():
    assert nabla_integral(GridFunction.on(0, 5, 1.0), 0, 4) == 4
    assert nabla_integral(GridFunction.on(0, 5, lambda t: t), 3, 3) == 0
    assert nabla_integral(GridFunction.on(0, 5, lambda t: t), 0, 3) == 6
    assert nabla_integral(GridFunction.on(0, 5, lambda t: t), 4, 2) == 0
    with pytest.raises(DomainError):
        nabla_integral(GridFunction.on(0, 5, 1.0), 0, 2.5)


@given(grid_functions())
def test_fundamental_theorem(F):
    dF = nabla_diff(F)
    assert nabla_integral(dF, F.base, F.end) == pytest.approx(F.values[-1] - F.values[0], abs=1e-12)


@given(grid_functions(min_len=2))
def test_fundamental_theorem_inner_limits(F):
    dF = nabla_diff(F)
    c, d = F.base + 1, F.end - 1
    assert nabla_integral(dF, c, d) == pytest.approx(F(d) - F(c), abs=1e-12)
