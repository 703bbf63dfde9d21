from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from shiftrate.laguerre import (ZERO, LaguerrePoly, factorial_coords, from_laguerre, laguerre_mean_check,
                                laguerre_orbit_sums, laguerre_pointwise_rate, laguerre_poly,
                                laguerre_shift, random_laguerre_coeffs)
from shiftrate.rates import geometric_grid

small_coeffs = st.dictionaries(st.integers(0, 15), st.fractions(-5, 5, max_denominator=7), max_size=6)


def test_low_degree_polynomials():
    assert laguerre_poly(0) == LaguerrePoly((1,))
    assert laguerre_poly(1) == LaguerrePoly((1, -1))
    assert laguerre_poly(2) == LaguerrePoly((1, -2, Fraction(1, 2)))
    for n in range(20):
        assert laguerre_poly(n).degree == n and laguerre_poly(n).coeffs[0] == 1


def test_values_against_mpmath():
    for n in (3, 9, 17):
        for x in (Fraction(1, 3), Fraction(5, 2), Fraction(11)):
            ref = mpmath.laguerre(n, 0, mpmath.mpf(x.numerator) / x.denominator)
            assert float(laguerre_poly(n)(x)) == pytest.approx(float(ref), rel=1e-12, abs=1e-12)


def test_orthonormality_exact():
    for m in range(16):
        for n in range(m, 16):
            assert laguerre_poly(m).inner(laguerre_poly(n)) == (1 if m == n else 0)


def test_inner_product_matches_quadrature():
    p, q = LaguerrePoly((1, 2, Fraction(-1, 3))), LaguerrePoly((0, Fraction(1, 2), 1))
    ref = mpmath.quad(lambda t: mpmath.polyval([float(c) for c in reversed(p.coeffs)], t)
                      * mpmath.polyval([float(c) for c in reversed(q.coeffs)], t) * mpmath.exp(-t), [0, mpmath.inf])
    assert float(p.inner(q)) == pytest.approx(float(ref), rel=1e-12)


def test_shift_examples():
    assert laguerre_shift(LaguerrePoly((1,))) == laguerre_poly(1)
    assert laguerre_shift(ZERO) == ZERO
    for n in range(31):
        assert laguerre_shift(laguerre_poly(n)) == laguerre_poly(n + 1)


def test_shift_matches_quadrature_definition():
    p = LaguerrePoly((2, Fraction(-1, 3), 5))
    x = Fraction(7, 4)
    integral = mpmath.quad(lambda t: mpmath.polyval([float(c) for c in reversed(p.coeffs)], t), [0, 1.75])
    assert float(laguerre_shift(p)(x)) == pytest.approx(float(p(x)) - float(integral), rel=1e-12)


@given(small_coeffs, small_coeffs)
def test_shift_is_isometry(a, b):
    f, g = from_laguerre(a), from_laguerre(b)
    assert laguerre_shift(f).inner(laguerre_shift(g)) == f.inner(g)


def test_mean_check_examples():
    b = laguerre_mean_check({0: 1}, 4)
    assert b.lhs_sq == Fraction(1, 4) == b.rhs_sq and b.sharp
    b = laguerre_mean_check({0: 1, 7: 1}, 4)
    assert b.lhs_sq == Fraction(1, 2) and b.rhs_sq == 1 and b.holds and not b.sharp
    b = laguerre_mean_check({}, 5)
    assert b.lhs_sq == 0 == b.rhs_sq


@settings(max_examples=30)
@given(small_coeffs, st.sampled_from([1, 2, 3, 8]))
def test_mean_check_holds(coeffs, N):
    assert laguerre_mean_check(coeffs, N).holds


@given(st.integers(0, 20), st.fractions(-3, 3, max_denominator=5).filter(bool), st.integers(1, 12))
def test_single_term_is_sharp(n, c, N):
    assert laguerre_mean_check({n: c}, N).sharp


def monomial_orbit_sums(coeffs, x, N):
    """Reference route: iterate the monomial-basis shift in Fractions."""
    p, total, out = from_laguerre(coeffs), Fraction(0), []
    for _ in range(N):
        total += p(x)
        out.append(total)
        p = laguerre_shift(p)
    return out


@settings(max_examples=25)
@given(small_coeffs, st.fractions(0, 20, max_denominator=9))
def test_factorial_route_matches_monomial_route(coeffs, x):
    ref = monomial_orbit_sums(coeffs, x, 40)
    cps = [1, 2, 7, 20, 40]
    assert laguerre_orbit_sums(coeffs, x, cps) == [ref[n - 1] for n in cps]


def test_factorial_coords():
    assert factorial_coords({3: 1}) == ([1, -3, 3, -1], 1)
    c, den = factorial_coords({0: Fraction(1, 2), 1: Fraction(1, 3)})
    assert (c, den) == ([5, -2], 6)


def test_degree_cap():
    with pytest.raises(ValueError):
        laguerre_orbit_sums({3: 1}, 1, [100], degree_cap=50)


def test_pointwise_rate_examples():
    zero = laguerre_pointwise_rate({}, 1)
    assert all(d == 0 for d in zero.deviation)
    s = laguerre_pointwise_rate({0: 1}, 1, N_grid=geometric_grid(1 << 10))
    assert s.meta["envelope"] < 1


def test_pointwise_rate_linearity():
    cps = geometric_grid(256)
    a = laguerre_orbit_sums({0: 1}, Fraction(3, 2), cps)
    b = laguerre_orbit_sums({1: 1}, Fraction(3, 2), cps)
    ab = laguerre_orbit_sums({0: 1, 1: Fraction(1, 2)}, Fraction(3, 2), cps)
    assert ab == [u + v / 2 for u, v in zip(a, b)]


def test_random_coeffs(rng):
    c = random_laguerre_coeffs(rng)
    assert len(c) == 50 and max(c) <= 100
    assert sum(abs(v) for v in c.values()) < 2
