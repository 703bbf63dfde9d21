"""Exact arithmetic in a real quadratic field Q(sqrt(D))."""

from __future__ import annotations

from fractions import Fraction
from functools import total_ordering
from math import isqrt

from .exact import Rational


def squarefree_decompose(n: int) -> tuple[int, int]:
    """Write ``n = s**2 * D`` with ``D`` square-free (sign carried by ``D``)."""
    if n == 0:
        return 0, 0
    sign = -1 if n < 0 else 1
    n = abs(n)
    s, d, p = 1, 1, 2
    while p * p <= n:
        while n % (p * p) == 0:
            n //= p * p
            s *= p
        if n % p == 0:
            n //= p
            d *= p
        p += 1
    return s, sign * d * n


@total_ordering
class QuadElem:
    """The number ``a + b*sqrt(D)`` with rational ``a, b``.

    ``D`` is a square-free integer greater than one.  Elements with ``b == 0``
    are rationals and combine with elements of any field.
    """

    __slots__ = ("a", "b", "D")

    def __init__(self, a: Rational, b: Rational = 0, D: int = 0) -> None:
        self.a = Fraction(a)
        self.b = Fraction(b)
        if self.b and D < 2:
            raise ValueError(f"invalid discriminant {D} for irrational element")
        self.D = D if self.b else 0

    @classmethod
    def sqrt(cls, n: int) -> QuadElem:
        """Exact square root of a non-negative integer."""
        if n < 0:
            raise ValueError("negative radicand")
        s, d = squarefree_decompose(n)
        if d in (0, 1):
            return cls(s * (d != 0))
        return cls(0, s, d)

    def _field(self, other: QuadElem) -> int:
        if self.D and other.D and self.D != other.D:
            raise ValueError(f"mixed fields Q(sqrt {self.D}) and Q(sqrt {other.D})")
        return self.D or other.D

    @staticmethod
    def _coerce(other) -> QuadElem:
        if isinstance(other, QuadElem):
            return other
        if isinstance(other, (int, Fraction)):
            return QuadElem(other)
        return NotImplemented

    def __add__(self, other) -> QuadElem:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return QuadElem(self.a + other.a, self.b + other.b, self._field(other))

    __radd__ = __add__

    def __neg__(self) -> QuadElem:
        return QuadElem(-self.a, -self.b, self.D)

    def __sub__(self, other) -> QuadElem:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> QuadElem:
        return (-self) + other

    def __mul__(self, other) -> QuadElem:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        D = self._field(other)
        return QuadElem(
            self.a * other.a + self.b * other.b * D,
            self.a * other.b + self.b * other.a,
            D,
        )

    __rmul__ = __mul__

    def conj(self) -> QuadElem:
        return QuadElem(self.a, -self.b, self.D)

    def field_norm(self) -> Fraction:
        return self.a * self.a - self.b * self.b * self.D

    def inverse(self) -> QuadElem:
        n = self.field_norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        return QuadElem(self.a / n, -self.b / n, self.D)

    def __truediv__(self, other) -> QuadElem:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other) -> QuadElem:
        return self._coerce(other) * self.inverse()

    def __pow__(self, k: int) -> QuadElem:
        base = self if k >= 0 else self.inverse()
        result = QuadElem(1)
        k = abs(k)
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def sign(self) -> int:
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sb == 0 or sa == sb:
            return sa or sb
        if sa == 0:
            return sb
        # opposite signs: the larger square wins (never equal, D is not a square)
        return sa if self.a * self.a > self.b * self.b * self.D else sb

    def __abs__(self) -> QuadElem:
        return -self if self.sign() < 0 else self

    def __eq__(self, other) -> bool:
        other = self._coerce(other)
        if other is NotImplemented:
            return False
        return self.a == other.a and self.b == other.b and (not self.b or self.D == other.D)

    def __lt__(self, other) -> bool:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return (self - other).sign() < 0

    def __hash__(self) -> int:
        return hash((self.a, self.b, self.D if self.b else 0))

    def __bool__(self) -> bool:
        return bool(self.a or self.b)

    def is_rational(self) -> bool:
        return self.b == 0

    def __float__(self) -> float:
        if not self.b:
            return float(self.a)
        root = float(isqrt(self.D * 10**32)) / 1e16
        if (self.a > 0) == (self.b > 0) or not self.a:
            return float(self.a) + float(self.b) * root
        # cancellation: use (a + b r) = N / (a - b r)
        return float(self.field_norm()) / (float(self.a) - float(self.b) * root)

    def __repr__(self) -> str:
        if not self.b:
            return f"QuadElem({self.a})"
        return f"QuadElem({self.a}, {self.b}, D={self.D})"

    def __str__(self) -> str:
        if not self.b:
            return str(self.a)
        return f"{self.a} + {self.b}*sqrt({self.D})"
