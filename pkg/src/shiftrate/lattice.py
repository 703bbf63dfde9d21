"""Exact integer-lattice dynamics of toral endomorphisms.

Everything here runs in integer or ``Q(sqrt D)`` arithmetic; floats appear only
in reported summaries (fitted constants), never in a decision.

Conventions: for a unimodular matrix the orbit representative of ``xi`` is the
point ``rep`` of the ``A``-orbit of ``xi`` with the smallest ``|S rep|_inf``,
and the *offset* ``k`` satisfies ``xi == A**k @ rep``.  For frequency shells of
the operator ``f -> f o A`` the same machinery is applied to ``A.T``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

from .errors import (CaseNotApplicable, NonErgodicMatrix, RationalEigenvalue,
                     UnimodularMatrix)
from .intmat import IntMatrix, Vector, as_matrix
from .qfield import QuadElem, squarefree_decompose

WALK_CAP = 10_000


class Spectral(str, enum.Enum):
    ROOT_OF_UNITY = "RootOfUnityPresent"
    BILATERAL = "ErgodicBilateral"
    UNILATERAL = "ErgodicUnilateral"
    SINGULAR = "Singular"


@dataclass(frozen=True)
class EigenInfo:
    """Eigenvalue data of a 2x2 integer matrix.

    ``kind`` is ``"real"`` (two distinct real eigenvalues, possibly rational),
    ``"repeated"`` or ``"complex"``.  ``values`` holds exact eigenvalues when
    they are real; for a complex pair ``modulus_sq`` is ``det``.
    """

    kind: str
    trace: int
    det: int
    discriminant: int
    values: tuple[QuadElem, ...] = ()

    @property
    def modulus_sq(self) -> int:
        return self.det


@dataclass(frozen=True)
class SpectralClass:
    tag: Spectral
    det: int
    charpoly: tuple[int, ...]
    eigen_info: EigenInfo | None = None
    cyclotomic_orders: tuple[int, ...] = ()

    @property
    def ergodic(self) -> bool:
        return self.tag in (Spectral.BILATERAL, Spectral.UNILATERAL)


# -- polynomials (integer coefficients, lowest degree first) -------------------

def _poly_divmod(num: list[int], den: list[int]) -> tuple[list[int], list[int]]:
    """Division by a monic integer polynomial."""
    num = list(num)
    if den[-1] != 1:
        raise ValueError("divisor must be monic")
    q = [0] * max(len(num) - len(den) + 1, 1)
    for i in range(len(num) - len(den), -1, -1):
        c = num[i + len(den) - 1]
        q[i] = c
        if c:
            for j, dj in enumerate(den):
                num[i + j] -= c * dj
    rem = num[: len(den) - 1]
    while rem and rem[-1] == 0:
        rem.pop()
    return q, rem


@lru_cache(maxsize=None)
def cyclotomic(n: int) -> tuple[int, ...]:
    """Coefficients of the n-th cyclotomic polynomial, lowest degree first."""
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            poly, rem = _poly_divmod(poly, list(cyclotomic(d)))
            assert not rem
    while poly and poly[-1] == 0:
        poly.pop()
    return tuple(poly)


def totient(n: int) -> int:
    result, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


def cyclotomic_orders(charpoly_high_first: Sequence[int]) -> tuple[int, ...]:
    """Orders n of roots of unity that are eigenvalues (phi(n) <= degree)."""
    d = len(charpoly_high_first) - 1
    low_first = list(reversed(charpoly_high_first))
    # phi(n) >= sqrt(n / 2), so phi(n) <= d forces n <= 2 d^2
    return tuple(
        n for n in range(1, 2 * d * d + 3)
        if totient(n) <= d and not _poly_divmod(low_first, list(cyclotomic(n)))[1]
    )


# -- classification --------------------------------------------------------------

def eigen_info(A: IntMatrix) -> EigenInfo:
    if A.dim != 2:
        raise CaseNotApplicable("eigenvalue data is only provided for 2x2 matrices")
    tr, det = A.trace(), A.det()
    disc = tr * tr - 4 * det
    if disc < 0:
        return EigenInfo("complex", tr, det, disc)
    if disc == 0:
        return EigenInfo("repeated", tr, det, disc, (QuadElem(Fraction(tr, 2)),) * 2)
    s, D = squarefree_decompose(disc)
    half = Fraction(tr, 2)
    if D == 1:
        vals = (QuadElem(half - Fraction(s, 2)), QuadElem(half + Fraction(s, 2)))
    else:
        vals = (QuadElem(half, Fraction(-s, 2), D), QuadElem(half, Fraction(s, 2), D))
    return EigenInfo("real", tr, det, disc, vals)


@lru_cache(maxsize=256)
def _classify_rows(rows: tuple[Vector, ...]) -> SpectralClass:
    A = IntMatrix(rows)
    det = A.det()
    cp = tuple(A.charpoly())
    info = eigen_info(A) if A.dim == 2 else None
    if det == 0:
        return SpectralClass(Spectral.SINGULAR, det, cp, info)
    if A.dim == 2 and abs(det) == 1:
        tr = A.trace()
        rou = abs(tr) <= 2 if det == 1 else tr == 0
        orders = cyclotomic_orders(cp) if rou else ()
    else:
        orders = cyclotomic_orders(cp)
        rou = bool(orders)
    if rou:
        tag = Spectral.ROOT_OF_UNITY
    elif abs(det) == 1:
        tag = Spectral.BILATERAL
    else:
        tag = Spectral.UNILATERAL
    return SpectralClass(tag, det, cp, info, orders)


def classify(A) -> SpectralClass:
    """Spectral class of an integer matrix.

    For 2x2 unimodular matrices the trace criteria are used (``det = 1``: a
    root of unity occurs iff ``|tr| <= 2``; ``det = -1``: iff ``tr = 0``).
    Otherwise the characteristic polynomial is tested exactly for divisibility
    by every cyclotomic polynomial of degree at most ``d``.
    """
    return _classify_rows(as_matrix(A).rows)


def _require(A: IntMatrix, *tags: Spectral) -> SpectralClass:
    cls = classify(A)
    if cls.tag not in tags:
        raise NonErgodicMatrix(f"{A!r} is {cls.tag.value}; need one of {[t.value for t in tags]}")
    return cls


# -- diagonalization of unimodular hyperbolic matrices ---------------------------

class SupKey:
    """``(p + q sqrt(D)) / 2`` with integers ``p, q >= 0``; ordered exactly by integer arithmetic."""

    __slots__ = ("p", "q", "D")

    def __init__(self, p: int, q: int, D: int) -> None:
        self.p, self.q, self.D = p, q, D

    def _sign_diff(self, other: "SupKey") -> int:
        x, y = self.p - other.p, self.q - other.q
        if x >= 0 and y >= 0:
            return int(x > 0 or y > 0)
        if x <= 0 and y <= 0:
            return -1
        t = x * x - y * y * self.D
        return (1 if t > 0 else -1) if x > 0 else (1 if t < 0 else -1)

    def __eq__(self, other) -> bool:
        return self.p == other.p and self.q == other.q

    def __lt__(self, other: "SupKey") -> bool:
        return self._sign_diff(other) < 0

    def __le__(self, other: "SupKey") -> bool:
        return self._sign_diff(other) <= 0

    def __gt__(self, other: "SupKey") -> bool:
        return self._sign_diff(other) > 0

    def __ge__(self, other: "SupKey") -> bool:
        return self._sign_diff(other) >= 0

    def __hash__(self) -> int:
        return hash((self.p, self.q))

    def value(self) -> QuadElem:
        return QuadElem(Fraction(self.p, 2), Fraction(self.q, 2), self.D)


@dataclass(frozen=True)
class Diagonalization:
    """``S @ A == diag(lam_small, lam) @ S`` with ``|lam| > 1``.

    The rows of ``S`` are the left eigenvectors ``(c, mu - a)`` of
    ``A = [[a, b], [c, d]]``; the two rows are Galois conjugate, so the
    eigen-coordinates of ``v`` are ``P -+ Q sqrt(D)`` and ``|S v|_inf = |P| + |Q| sqrt(D)``.
    """

    S: tuple[tuple[QuadElem, QuadElem], tuple[QuadElem, QuadElem]]
    lam: QuadElem
    lam_small: QuadElem

    def apply(self, v: Sequence[int]) -> tuple[QuadElem, QuadElem]:
        (s00, s01), (s10, s11) = self.S
        return (s00 * v[0] + s01 * v[1], s10 * v[0] + s11 * v[1])

    def sup_norm(self, v: Sequence[int]) -> QuadElem:
        e0, e1 = self.apply(v)
        return max(abs(e0), abs(e1))

    def sup_key(self, v: Sequence[int]) -> SupKey:
        """Integer-arithmetic form of :meth:`sup_norm` for fast exact comparisons."""
        c2, a2, b2, D = self._coeffs
        return SupKey(abs(c2 * v[0] + a2 * v[1]), abs(b2 * v[1]), D)

    @property
    def _coeffs(self) -> tuple[int, int, int, int]:
        # rows (c, alpha - a -+ beta sqrt(D)); doubled so every coefficient is an integer
        (s0, s1) = self.S[1]
        return (int(2 * s0.a), int(2 * s1.a), int(2 * s1.b), s1.D)


def diagonalizer(A) -> Diagonalization:
    A = as_matrix(A)
    if A.dim != 2:
        raise CaseNotApplicable("diagonalizer is defined for 2x2 matrices")
    info = eigen_info(A)
    if info.kind != "real" or info.values[0].is_rational():
        raise CaseNotApplicable(f"{A!r} has no pair of real irrational eigenvalues ({info.kind})")
    _require(A, Spectral.BILATERAL)
    lo, hi = info.values
    lam, small = (hi, lo) if abs(hi) > abs(lo) else (lo, hi)
    (a, b), (c, d) = A.rows
    # c != 0 because the eigenvalues are irrational
    S = ((QuadElem(c), small - a), (QuadElem(c), lam - a))
    diag = Diagonalization(S, lam, small)
    _check_diagonalization(A, diag)
    return diag


def _check_diagonalization(A: IntMatrix, diag: Diagonalization) -> None:
    (a, b), (c, d) = A.rows
    for row, ev in zip(diag.S, (diag.lam_small, diag.lam)):
        s0, s1 = row
        if s0 * a + s1 * c != ev * s0 or s0 * b + s1 * d != ev * s1:
            raise AssertionError("S A != D S")


# -- orbit representatives (|det| = 1) --------------------------------------------

@dataclass(frozen=True)
class OrbitRep:
    representative: Vector
    offset: int
    s_norm: QuadElem


class UnimodularOrbits:
    """Orbit representatives for a hyperbolic unimodular 2x2 matrix, with a cache
    shared by every point of each visited orbit."""

    def __init__(self, A) -> None:
        self.A = as_matrix(A)
        _require(self.A, Spectral.BILATERAL)
        self.diag = diagonalizer(self.A)
        self.Ainv = self.A.adjugate() * self.A.det()
        self._cache: dict[Vector, tuple[Vector, int]] = {}
        self._norms: dict[Vector, QuadElem] = {}

    def representative(self, xi: Sequence[int]) -> OrbitRep:
        xi = tuple(int(v) for v in xi)
        if not any(xi):
            raise ValueError("the zero vector has no orbit representative")
        hit = self._cache.get(xi)
        if hit is None:
            hit = self._walk(xi)
        rep, k = hit
        norm = self._norms.get(rep)
        if norm is None:
            norm = self._norms[rep] = self.diag.sup_norm(rep)
        return OrbitRep(rep, k, norm)

    def _walk(self, xi: Vector) -> tuple[Vector, int]:
        key = self.diag.sup_key
        visited = {0: xi}
        best_val = key(xi)
        ties: dict[Vector, int] = {xi: 0}
        for step, M in ((1, self.A), (-1, self.Ainv)):
            v, prev, rises, j = xi, best_val, 0, 0
            while rises < 2:
                j += step
                if abs(j) > WALK_CAP:
                    raise RuntimeError(f"orbit walk exceeded {WALK_CAP} steps at {xi}")
                v = M.apply(v)
                visited[j] = v
                val = key(v)
                if val < best_val:
                    best_val, ties = val, {v: j}
                elif val == best_val:
                    ties[v] = j
                rises = rises + 1 if (val > prev and val > best_val) else 0
                prev = val
        rep = min(ties)
        j_rep = ties[rep]
        for j, v in visited.items():
            self._cache[v] = (rep, j - j_rep)
        return self._cache[xi]


def orbit_representative(A, xi: Sequence[int]) -> OrbitRep:
    """Representative of the ``A``-orbit of ``xi``; ``xi == A**offset @ rep``."""
    return UnimodularOrbits(A).representative(xi)


# -- shells for |det| > 1 -------------------------------------------------------

def shell_index(A, xi: Sequence[int]) -> int:
    """Largest ``k`` with ``xi`` in ``(A^T)^k Z^d`` (requires ``|det A| > 1``)."""
    A = as_matrix(A)
    det = A.det()
    if abs(det) == 1:
        raise UnimodularMatrix("shell_index needs |det A| > 1; use orbit_representative")
    if det == 0:
        raise NonErgodicMatrix("singular matrix")
    if not any(xi):
        raise ValueError("zero vector lies in every shell")
    adj = A.T.adjugate()
    v, k = tuple(xi), 0
    while True:
        w = adj.apply(v)
        if any(x % det for x in w):
            return k
        v = tuple(x // det for x in w)
        k += 1
        if k > WALK_CAP:
            raise NonErgodicMatrix(f"{xi} lies in (A^T)^k Z^d for k > {WALK_CAP}")


class ShellPartition:
    """Frequency shells ``F_k`` of the operator ``f -> f o A`` on ``L^2_0(T^d)``.

    ``|det A| > 1``: ``F_k = (A^T)^k Z^d minus (A^T)^(k+1) Z^d`` (``k >= 0``).
    ``|det A| = 1``: ``F_k = (A^T)^k E`` with ``E`` the orbit representatives of
    ``A^T`` (``k`` in Z).  Only 2x2 unimodular matrices are supported.
    """

    def __init__(self, A) -> None:
        self.A = as_matrix(A)
        cls = _require(self.A, Spectral.BILATERAL, Spectral.UNILATERAL)
        self.bilateral = cls.tag is Spectral.BILATERAL
        self._orbits = UnimodularOrbits(self.A.T) if self.bilateral else None

    def index(self, xi: Sequence[int]) -> int:
        if self.bilateral:
            return self._orbits.representative(xi).offset
        return shell_index(self.A, xi)

    def representative(self, xi: Sequence[int]) -> Vector:
        """Point of ``E`` (bilateral) or of ``F_0`` (unilateral) under ``xi``."""
        if self.bilateral:
            return self._orbits.representative(xi).representative
        k = self.index(xi)
        v = tuple(xi)
        adj, det = self.A.T.adjugate(), self.A.det()
        for _ in range(k):
            v = tuple(x // det for x in adj.apply(v))
        return v

    def partition_ball(self, radius: int) -> dict[int, list[Vector]]:
        shells: dict[int, list[Vector]] = {}
        for xi in ball(radius, self.A.dim):
            shells.setdefault(self.index(xi), []).append(xi)
        return shells


def ball(radius: int, dim: int = 2, include_zero: bool = False) -> Iterator[Vector]:
    """Integer vectors with ``|v|_inf <= radius`` in lexicographic order."""
    rng = range(-radius, radius + 1)
    if dim == 1:
        it = ((a,) for a in rng)
    elif dim == 2:
        it = ((a, b) for a in rng for b in rng)
    else:
        import itertools
        it = itertools.product(rng, repeat=dim)
    for v in it:
        if include_zero or any(v):
            yield v


# -- shortest vectors of A^k Z^2 ---------------------------------------------------

def _dot(u: Sequence[int], v: Sequence[int]) -> int:
    return sum(a * b for a, b in zip(u, v))


def gauss_reduce(u: Sequence[int], v: Sequence[int]) -> tuple[Vector, Vector]:
    """Lagrange-Gauss reduction of a 2D integer lattice basis; first vector is shortest."""
    u, v = tuple(u), tuple(v)
    if _dot(u, u) > _dot(v, v):
        u, v = v, u
    while True:
        uu = _dot(u, u)
        if uu == 0:
            raise ValueError("degenerate basis")
        # nearest integer to <u,v>/<u,u>
        m = (2 * _dot(u, v) + uu) // (2 * uu)
        v = tuple(b - m * a for a, b in zip(u, v))
        if _dot(v, v) >= uu:
            return u, v
        u, v = v, u


def shortest_vectors(A, k_max: int) -> list[Vector]:
    """A shortest nonzero vector of ``A^k Z^2`` for k = 0..k_max (exact Gauss reduction)."""
    A = as_matrix(A)
    if A.dim != 2:
        raise CaseNotApplicable("delta_growth is limited to d = 2")
    if abs(A.det()) <= 1:
        raise UnimodularMatrix("delta_growth needs |det A| > 1")
    _require(A, Spectral.UNILATERAL)
    out, P = [], IntMatrix.identity(2)
    for _ in range(k_max + 1):
        cols = list(zip(*P.rows))
        u, _ = gauss_reduce(cols[0], cols[1])
        out.append(u)
        P = A @ P
    return out


def delta_growth(A, k_max: int) -> list[int]:
    """Squared Euclidean length of the shortest nonzero vector of ``A^k Z^2``, k = 0..k_max."""
    return [_dot(u, u) for u in shortest_vectors(A, k_max)]


# -- growth of orbit representatives (|det| = 1) ---------------------------------

@dataclass
class RepGrowth:
    """Table of ``(xi, k, |A^k xi|^2)`` over representatives ``xi`` in a ball.

    ``c_squared`` is the exact ``min |A^k xi|^2 / lam^(2|k|)`` over the table, so
    ``|A^k xi| >= c |lam|^|k|`` holds on every row with ``c = sqrt(c_squared)``.
    """

    rows: list[tuple[Vector, int, int]]
    c_squared: QuadElem
    lam: QuadElem
    comparable: bool
    representatives: list[Vector] = field(default_factory=list)

    @property
    def c(self) -> float:
        return math.sqrt(float(self.c_squared))

    @property
    def q(self) -> float:
        return abs(float(self.lam))


def representatives_in_ball(orbits: UnimodularOrbits, radius: int) -> list[Vector]:
    return [xi for xi in ball(radius) if orbits.representative(xi).offset == 0]


def rep_growth(A, radius: int, k_max: int) -> RepGrowth:
    orbits = UnimodularOrbits(A)
    A, diag = orbits.A, orbits.diag
    lam_sq = diag.lam * diag.lam
    lam_abs = abs(diag.lam)
    reps = representatives_in_ball(orbits, radius)
    rows: list[tuple[Vector, int, int]] = []
    c_sq: QuadElem | None = None
    comparable = True
    inv_pows = [lam_sq ** (-k) for k in range(k_max + 1)]
    for xi in reps:
        e0, e1 = diag.apply(xi)
        # the two eigen-coordinates of a representative are within a factor |lam|
        if min(abs(e0), abs(e1)) * lam_abs < max(abs(e0), abs(e1)):
            comparable = False
        fwd = bwd = xi
        for k in range(k_max + 1):
            for kk, v in ((k, fwd), (-k, bwd)) if k else ((0, xi),):
                n2 = _dot(v, v)
                rows.append((xi, kk, n2))
                ratio = inv_pows[k] * n2
                if c_sq is None or ratio < c_sq:
                    c_sq = ratio
            fwd, bwd = A.apply(fwd), orbits.Ainv.apply(bwd)
    if c_sq is None:
        raise ValueError("no representatives in the ball")
    assert c_sq > 0
    return RepGrowth(rows, c_sq, diag.lam, comparable, reps)


# -- Dirichlet-type lower bound --------------------------------------------------

@dataclass
class DirichletTable:
    """Rows ``(xi, |xi|^2 dist(xi, V_lam)^2)``; exact minimum and its argument."""

    rows: list[tuple[Vector, QuadElem]]
    minimum_sq: QuadElem
    argmin: Vector
    lam: QuadElem

    @property
    def minimum(self) -> float:
        return math.sqrt(float(self.minimum_sq))


def dirichlet_bound(A, radius: int, expanding: bool = True) -> DirichletTable:
    """``|xi| * dist(xi, V_lam)`` over ``0 < |xi|_inf <= radius``, exactly squared."""
    A = as_matrix(A)
    if A.dim != 2:
        raise CaseNotApplicable("dirichlet_bound is defined for d = 2")
    info = eigen_info(A)
    if info.kind != "real":
        raise CaseNotApplicable(f"eigenvalues are {info.kind}, not real and distinct")
    if info.values[0].is_rational():
        raise RationalEigenvalue(f"{A!r} has rational eigenvalues")
    lo, hi = info.values
    lam = max(lo, hi, key=abs) if expanding else min(lo, hi, key=abs)
    (a, b), (c, d) = A.rows
    v = (QuadElem(b), lam - a) if b else (lam - d, QuadElem(c))
    v_sq = v[0] * v[0] + v[1] * v[1]
    rows = []
    best: QuadElem | None = None
    arg: Vector = (0, 0)
    for xi in ball(radius):
        cross = v[1] * xi[0] - v[0] * xi[1]
        val = cross * cross * _dot(xi, xi) / v_sq
        rows.append((xi, val))
        if best is None or val < best:
            best, arg = val, xi
    assert best is not None and best > 0
    return DirichletTable(rows, best, arg, lam)


# -- growth assumption for general d ---------------------------------------------

@dataclass
class SvpFit:
    """Fitted ``(c, q)`` with ``|A^k xi| >= c q^|k|`` on the sample.

    ``q`` is the smaller of the least-squares growth rates of
    ``log min_xi |A^k xi|`` over the outer half of each direction's ``k`` range;
    ``c`` is then the largest constant valid on every sampled row.
    """

    c: float
    q: float
    ok: bool
    min_sq: dict[int, int]


Q_MARGIN = 1e-2


def verify_svp(A, E: Iterable[Sequence[int]], k_max: int) -> SvpFit:
    A = as_matrix(A)
    det = A.det()
    if det == 0:
        raise NonErgodicMatrix("singular matrix")
    E = [tuple(v) for v in E]
    if not E or any(not any(v) for v in E):
        raise ValueError("E must be a non-empty set of nonzero vectors")
    directions = [1] if abs(det) > 1 else [1, -1]
    min_sq: dict[int, int] = {}
    for sgn in directions:
        M = A if sgn > 0 else A.adjugate() * det
        cur = list(E)
        for k in range(k_max + 1):
            min_sq[sgn * k] = min(_dot(v, v) for v in cur)
            cur = [M.apply(v) for v in cur]
    rates = []
    for sgn in directions:
        ks = [k for k in range(max(1, k_max // 2), k_max + 1)]
        ys = [0.5 * math.log(min_sq[sgn * k]) for k in ks]
        if len(ks) < 2:
            ks, ys = [0] + ks, [0.5 * math.log(min_sq[0])] + ys
        kbar, ybar = sum(ks) / len(ks), sum(ys) / len(ys)
        slope = sum((k - kbar) * (y - ybar) for k, y in zip(ks, ys)) / sum((k - kbar) ** 2 for k in ks)
        rates.append(math.exp(slope))
    q = min(rates)
    c = min(math.exp(0.5 * math.log(m) - abs(k) * math.log(q)) for k, m in min_sq.items())
    return SvpFit(c, q, q > 1 + Q_MARGIN and c > 0, min_sq)
