"""Square integer matrices with exact determinant, adjugate and powers."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from .errors import ConfigInvalid

Vector = tuple[int, ...]


class IntMatrix:
    """Immutable ``d x d`` matrix of Python (arbitrary precision) integers."""

    __slots__ = ("rows", "_det")

    def __init__(self, rows: Iterable[Iterable[int]]) -> None:
        rows = tuple(tuple(r) for r in rows)
        d = len(rows)
        if d == 0 or any(len(r) != d for r in rows):
            raise ConfigInvalid(f"matrix must be square and non-empty, got {rows!r}")
        for r in rows:
            for v in r:
                if isinstance(v, bool) or int(v) != v:
                    raise ConfigInvalid(f"matrix entries must be integers, got {v!r}")
        self.rows: tuple[Vector, ...] = tuple(tuple(int(v) for v in r) for r in rows)
        self._det: int | None = None

    @classmethod
    def identity(cls, d: int, scale: int = 1) -> IntMatrix:
        return cls([[scale if i == j else 0 for j in range(d)] for i in range(d)])

    @property
    def dim(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other) -> bool:
        return isinstance(other, IntMatrix) and self.rows == other.rows

    def __hash__(self) -> int:
        return hash(self.rows)

    def __repr__(self) -> str:
        return f"IntMatrix({[list(r) for r in self.rows]})"

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.rows]

    @property
    def T(self) -> IntMatrix:
        return IntMatrix(zip(*self.rows))

    def trace(self) -> int:
        return sum(self.rows[i][i] for i in range(self.dim))

    def det(self) -> int:
        if self._det is None:
            self._det = _bareiss_det(self.rows)
        return self._det

    def adjugate(self) -> IntMatrix:
        d = self.dim
        if d == 1:
            return IntMatrix([[1]])
        if d == 2:
            (a, b), (c, e) = self.rows
            return IntMatrix([[e, -b], [-c, a]])
        cof = [[(-1) ** (i + j) * _bareiss_det(_minor(self.rows, i, j)) for j in range(d)]
               for i in range(d)]
        return IntMatrix(cof).T

    def __matmul__(self, other):
        if isinstance(other, IntMatrix):
            cols = list(zip(*other.rows))
            return IntMatrix([[sum(a * b for a, b in zip(r, c)) for c in cols] for r in self.rows])
        return self.apply(other)

    def apply(self, v: Sequence[int]) -> Vector:
        return tuple(sum(a * b for a, b in zip(r, v)) for r in self.rows)

    def __mul__(self, k: int) -> IntMatrix:
        return IntMatrix([[k * v for v in r] for r in self.rows])

    __rmul__ = __mul__

    def __pow__(self, k: int) -> IntMatrix:
        if k < 0:
            if abs(self.det()) != 1:
                raise ValueError("negative power of a non-unimodular integer matrix")
            base = self.adjugate() * self.det()
            k = -k
        else:
            base = self
        result = IntMatrix.identity(self.dim)
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def inverse_apply(self, v: Sequence[int]) -> Vector:
        """``A^{-1} v`` for unimodular ``A`` (exact, integral)."""
        det = self.det()
        if abs(det) != 1:
            raise ValueError("integral inverse needs |det| = 1")
        return tuple(det * x for x in self.adjugate().apply(v))

    def norm_inf(self) -> int:
        """Operator norm induced by the max norm: maximum absolute row sum."""
        return max(sum(abs(v) for v in r) for r in self.rows)

    def charpoly(self) -> list[int]:
        """Coefficients of ``det(xI - A)``, highest degree first."""
        d = self.dim
        # Faddeev-LeVerrier in exact rationals; the result is integral.
        A = [[Fraction(v) for v in r] for r in self.rows]
        coeffs = [Fraction(1)]
        M = [[Fraction(0)] * d for _ in range(d)]
        for k in range(1, d + 1):
            M = [[sum(A[i][l] * M[l][j] for l in range(d)) + (coeffs[-1] if i == j else 0)
                  for j in range(d)] for i in range(d)]
            AM = [[sum(A[i][l] * M[l][j] for l in range(d)) for j in range(d)] for i in range(d)]
            coeffs.append(-sum(AM[i][i] for i in range(d)) / k)
        return [int(c) for c in coeffs]


def _minor(rows, i, j):
    return [r[:j] + r[j + 1:] for k, r in enumerate(rows) if k != i]


def _bareiss_det(rows) -> int:
    M = [list(r) for r in rows]
    n = len(M)
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k]:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def as_matrix(obj) -> IntMatrix:
    """Accept an IntMatrix, a nested list of integer rows, or a scalar (d = 1)."""
    if isinstance(obj, IntMatrix):
        return obj
    if isinstance(obj, int) and not isinstance(obj, bool):
        return IntMatrix([[obj]])
    try:
        return IntMatrix(obj)
    except TypeError as exc:
        raise ConfigInvalid(f"cannot interpret {obj!r} as an integer matrix") from exc
