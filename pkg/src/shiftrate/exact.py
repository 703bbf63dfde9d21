"""Exact comparisons involving square roots of non-negative rationals.

Norm inequalities such as ``||U_N f|| <= N^{-1/2} sum_k ||Pi_k f||`` compare
a square root against a *sum* of square roots.  Squaring does not remove the
radicals, so the comparison is decided here without floating point:

* equality is decided algebraically.  Two radicands ``a, b`` have a rational
  ratio of square roots iff ``a * b`` is a perfect square, and square roots of
  distinct square-free parts are linearly independent over Q;
* strict inequality is decided by integer-sqrt interval bounds at increasing
  precision, which always terminates once equality has been excluded.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt
from typing import Iterable, Sequence

Rational = int | Fraction


def is_square(n: int) -> bool:
    return n >= 0 and isqrt(n) ** 2 == n


def _lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b


def _integer_radicands(values: Sequence[Rational]) -> list[int]:
    """Scale radicands by a common square so that they become integers."""
    fracs = [Fraction(v) for v in values]
    for f in fracs:
        if f < 0:
            raise ValueError(f"negative radicand {f}")
    scale = 1
    for f in fracs:
        scale = _lcm(scale, f.denominator)
    # sqrt(p/q) * L == sqrt(p * L * (L / q))
    return [f.numerator * scale * (scale // f.denominator) for f in fracs]


def _sqrt_bounds(n: int, bits: int) -> tuple[int, int]:
    lo = isqrt(n << (2 * bits))
    hi = lo if lo * lo == n << (2 * bits) else lo + 1
    return lo, hi


def _radical_groups(terms: Iterable[int]) -> list[tuple[int, Fraction]]:
    """Collapse ``sum sqrt(t)`` into ``sum_g c_g sqrt(r_g)`` with distinct classes."""
    groups: list[tuple[int, Fraction]] = []
    for t in terms:
        if t == 0:
            continue
        for i, (r, c) in enumerate(groups):
            prod = r * t
            if is_square(prod):
                # sqrt(t) = sqrt(r t) / r * sqrt(r)
                groups[i] = (r, c + Fraction(isqrt(prod), r))
                break
        else:
            groups.append((t, Fraction(1)))
    return groups


def sqrt_sum_equal(x: int, ys: Sequence[int]) -> bool:
    """Exact test of ``sqrt(x) == sum(sqrt(y) for y in ys)`` for integers >= 0."""
    groups = _radical_groups(ys)
    if x == 0:
        return not groups
    if len(groups) != 1:
        return False
    r, c = groups[0]
    return is_square(x * r) and Fraction(isqrt(x * r), r) == c


def compare_sqrt_sum(x: Rational, ys: Sequence[Rational]) -> int:
    """Return the sign of ``sqrt(x) - sum(sqrt(y) for y in ys)``, exactly."""
    radicands = _integer_radicands([x, *ys])
    xi, yi = radicands[0], [y for y in radicands[1:] if y]
    checked_equal = False
    bits = 32
    while True:
        x_lo, x_hi = _sqrt_bounds(xi, bits)
        s_lo = s_hi = 0
        for y in yi:
            lo, hi = _sqrt_bounds(y, bits)
            s_lo += lo
            s_hi += hi
        # bounds are rigorous, but touching intervals need the algebraic test
        if x_hi < s_lo or (checked_equal and x_hi <= s_lo):
            return -1
        if x_lo > s_hi or (checked_equal and x_lo >= s_hi):
            return 1
        if not checked_equal:
            if sqrt_sum_equal(xi, yi):
                return 0
            checked_equal = True
        bits *= 2


def sqrt_sum_float(ys: Iterable[Rational]) -> float:
    """Floating-point value of ``sum sqrt(y)``, for reporting only."""
    return sum(float(Fraction(y)) ** 0.5 for y in ys)
