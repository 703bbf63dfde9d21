"""Laguerre polynomials and the Volterra-type shift ``T f(x) = f(x) - int_0^x f``.

Two representations are kept.  ``LaguerrePoly`` stores monomial coefficients as
Fractions and is the reference route.  The rate experiments use the factorial basis
``e_k = x^k / k!``, in which ``T e_k = e_k - e_{k+1}`` and ``L_n`` has integer coordinates
``(-1)^k C(n, k)``, so iterating T is integer subtraction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np

from .rates import RateSeries, geometric_grid

Rational = int | Fraction


@dataclass(frozen=True)
class LaguerrePoly:
    """Polynomial with exact monomial coefficients, lowest degree first."""

    coeffs: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        cs = [Fraction(c) for c in self.coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1  # -1 for the zero polynomial

    def __add__(self, other: "LaguerrePoly") -> "LaguerrePoly":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return LaguerrePoly(tuple(x + y for x, y in zip(a, b)))

    def __sub__(self, other: "LaguerrePoly") -> "LaguerrePoly":
        return self + other.scale(-1)

    def scale(self, c: Rational) -> "LaguerrePoly":
        return LaguerrePoly(tuple(c * x for x in self.coeffs))

    def __call__(self, x: Rational) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def inner(self, other: "LaguerrePoly") -> Fraction:
        """``int_0^inf p q e^{-x} dx`` through the moments ``(i+j)!``."""
        return sum((a * b * math.factorial(i + j) for i, a in enumerate(self.coeffs)
                    for j, b in enumerate(other.coeffs)), Fraction(0))

    def norm_sq(self) -> Fraction:
        return self.inner(self)


ZERO = LaguerrePoly(())


@lru_cache(maxsize=None)
def laguerre_poly(n: int) -> LaguerrePoly:
    if n < 0:
        raise ValueError("n must be nonnegative")
    return LaguerrePoly(tuple(Fraction(math.comb(n, k) * (-1) ** k, math.factorial(k)) for k in range(n + 1)))


def laguerre_shift(p: LaguerrePoly) -> LaguerrePoly:
    """``p(x) - int_0^x p``: the coefficient ``c`` of ``x^k`` also feeds ``-c/(k+1)`` to ``x^{k+1}``."""
    if not p.coeffs:
        return ZERO
    out = list(p.coeffs) + [Fraction(0)]
    for k, c in enumerate(p.coeffs):
        out[k + 1] -= c / (k + 1)
    return LaguerrePoly(tuple(out))


def from_laguerre(coeffs: Mapping[int, Rational]) -> LaguerrePoly:
    out = ZERO
    for n, c in coeffs.items():
        out = out + laguerre_poly(n).scale(c)
    return out


# -- norm bound ------------------------------------------------------------------------

@dataclass(frozen=True)
class LaguerreBound:
    N: int
    lhs_sq: Fraction
    rhs_sq: Fraction

    @property
    def holds(self) -> bool:
        return self.lhs_sq <= self.rhs_sq

    @property
    def sharp(self) -> bool:
        return self.lhs_sq == self.rhs_sq


def laguerre_mean_check(coeffs: Mapping[int, Rational], N: int) -> LaguerreBound:
    """Exact ``||U_N f||^2`` (the shift has no fixed part here) against ``(sum |c_n|)^2 / N``."""
    if N < 1:
        raise ValueError("N must be positive")
    p = from_laguerre(coeffs)
    total = ZERO
    for _ in range(N):
        total = total + p
        p = laguerre_shift(p)
    lhs = total.scale(Fraction(1, N)).norm_sq()
    l1 = sum((abs(Fraction(c)) for c in coeffs.values()), Fraction(0))
    return LaguerreBound(N, lhs, l1 * l1 / N)


# -- factorial basis route ---------------------------------------------------------------

def factorial_coords(coeffs: Mapping[int, Rational]) -> tuple[list[int], int]:
    """Integer coordinates of ``sum c_n L_n`` in the basis ``x^k / k!`` over a common denominator."""
    den = math.lcm(1, *(Fraction(c).denominator for c in coeffs.values()))
    deg = max(coeffs, default=-1)
    out = [0] * (deg + 1)
    for n, c in coeffs.items():
        c = Fraction(c) * den
        for k in range(n + 1):
            out[k] += int(c) * math.comb(n, k) * (-1) ** k
    return out, den


def factorial_values(x: Fraction, K: int) -> tuple[list[int], int]:
    """``x^k / k!`` for ``k <= K`` as integers over one common denominator."""
    p, q = x.numerator, x.denominator
    den = q ** K * math.factorial(K)
    vals = []
    num_pow, den_part = 1, den
    for k in range(K + 1):
        vals.append(num_pow * den_part)
        num_pow *= p
        if k < K:
            den_part //= q * (k + 1)
    return vals, den


def laguerre_orbit_sums(coeffs: Mapping[int, Rational], x: Rational,
                        checkpoints: Sequence[int], degree_cap: int | None = None) -> list[Fraction]:
    """Exact ``sum_{n<N} T^n f (x)`` at each checkpoint ``N``."""
    x = Fraction(x)
    c, den = factorial_coords(coeffs)
    if not checkpoints:
        return []
    N_max = max(checkpoints)
    K = len(c) - 1 + N_max
    cap = degree_cap if degree_cap is not None else len(c) - 1 + N_max
    if K > cap:
        raise ValueError(f"degree {K} would exceed the cap {cap}")
    if not c:
        return [Fraction(0)] * len(checkpoints)
    vals, vden = factorial_values(x, K)
    cur = np.zeros(K + 1, dtype=object)
    cur[: len(c)] = c
    cur[len(c):] = 0
    acc = np.zeros(K + 1, dtype=object)
    acc[:] = 0
    want = {N: i for i, N in enumerate(checkpoints)}
    out: list[Fraction] = [Fraction(0)] * len(checkpoints)
    top = len(c)  # live length of cur
    v = np.array(vals, dtype=object)
    for n in range(1, N_max + 1):
        acc[:top] += cur[:top]
        if n in want:
            out[want[n]] = Fraction(int(np.dot(acc[:top], v[:top])), den * vden)
        # T e_k = e_k - e_{k+1}
        cur[1: top + 1] -= cur[:top].copy()
        top += 1
    return out


def laguerre_pointwise_rate(coeffs: Mapping[int, Rational], x: Rational, eta: float = 0.5,
                            N_grid: Sequence[int] | None = None) -> RateSeries:
    grid = list(N_grid) if N_grid is not None else geometric_grid(1 << 10)
    sums = laguerre_orbit_sums(coeffs, x, grid)
    dev = [abs(float(s / N)) for s, N in zip(sums, grid)]
    series = RateSeries(grid, dev, eta, {"system": "laguerre", "x": str(Fraction(x)), "arithmetic": "exact"})
    series.meta["envelope"] = series.envelope_statistic()
    return series


def random_laguerre_coeffs(rng: np.random.Generator, n_terms: int = 50, max_index: int = 100) -> dict[int, Fraction]:
    """``n_terms`` distinct indices with coefficients ``+-1/(1+i)^2``."""
    idx = rng.choice(max_index + 1, size=n_terms, replace=False)
    return {int(n): Fraction(1 if rng.random() < 0.5 else -1, (1 + i) ** 2) for i, n in enumerate(sorted(idx))}
