"""Coefficient-space model of a shift whose unitary Wold part is the identity.

A vector is a finite combination of basis elements ``phi[j, k]`` (``T`` maps
``phi[j, k]`` to ``phi[j, k + 1]``) plus one amplitude for the fixed subspace
on which ``T`` is the identity.  With ``int``/``Fraction`` amplitudes every norm
identity below is checked exactly.
"""

from __future__ import annotations

import bisect
import enum
import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .exact import compare_sqrt_sum, sqrt_sum_float

Scalar = int | Fraction | float | complex


class Kind(str, enum.Enum):
    UNILATERAL = "unilateral"
    BILATERAL = "bilateral"


def _abs2(z: Scalar) -> Scalar:
    if isinstance(z, complex):
        return z.real * z.real + z.imag * z.imag
    return z * z


def _is_exact(z: Scalar) -> bool:
    return isinstance(z, (int, Fraction))


@dataclass
class CoeffVector:
    kind: Kind
    amps: dict[tuple[int, int], Scalar] = field(default_factory=dict)
    fixed_part: Scalar = 0

    def __post_init__(self) -> None:
        self.kind = Kind(self.kind)
        self.amps = {(int(j), int(k)): a for (j, k), a in self.amps.items() if a != 0}
        if self.kind is Kind.UNILATERAL and any(k < 0 for _, k in self.amps):
            raise ValueError("a unilateral shift has no basis vectors with k < 0")

    @property
    def exact(self) -> bool:
        return _is_exact(self.fixed_part) and all(_is_exact(a) for a in self.amps.values())

    def norm_sq(self) -> Scalar:
        return sum((_abs2(a) for a in self.amps.values()), _abs2(self.fixed_part))

    def shells(self) -> set[int]:
        return {k for _, k in self.amps}

    def __sub__(self, other: CoeffVector) -> CoeffVector:
        amps = dict(self.amps)
        for key, a in other.amps.items():
            amps[key] = amps.get(key, 0) - a
        return CoeffVector(self.kind, amps, self.fixed_part - other.fixed_part)


def inner(v: CoeffVector, w: CoeffVector) -> Scalar:
    """``<v, w>``, linear in the first argument."""
    total = v.fixed_part * _conj(w.fixed_part)
    for key, a in v.amps.items():
        b = w.amps.get(key)
        if b is not None:
            total += a * _conj(b)
    return total


def _conj(z: Scalar) -> Scalar:
    return z.conjugate() if isinstance(z, complex) else z


def apply_shift(v: CoeffVector, times: int = 1) -> CoeffVector:
    """``T^times v``; negative powers only for bilateral shifts."""
    if times < 0 and v.kind is Kind.UNILATERAL:
        raise ValueError("a unilateral shift is not invertible")
    return CoeffVector(v.kind, {(j, k + times): a for (j, k), a in v.amps.items()}, v.fixed_part)


def ergodic_mean(v: CoeffVector, N: int) -> CoeffVector:
    """``U_N v = N^{-1} sum_{n<N} T^n v``, materialized coefficient by coefficient."""
    if N < 1:
        raise ValueError("N must be >= 1")
    out: dict[tuple[int, int], Scalar] = defaultdict(int)
    scale = Fraction(1, N) if v.exact else 1.0 / N
    for (j, k), a in v.amps.items():
        for n in range(N):
            out[(j, k + n)] += a * scale
    return CoeffVector(v.kind, dict(out), v.fixed_part)


def projection_norms_sq(v: CoeffVector) -> dict[int, Scalar]:
    """``k -> ||Pi_k v||^2``; exact for rational amplitudes."""
    out: dict[int, Scalar] = defaultdict(int)
    for (_, k), a in v.amps.items():
        out[k] += _abs2(a)
    return dict(out)


def projection_norms(v: CoeffVector) -> dict[int, float]:
    return {k: math.sqrt(float(s)) for k, s in projection_norms_sq(v).items()}


class _LagProfile:
    """Autocorrelation ``R(d) = sum_{j,k} a[j,k] conj(a[j,k+d])`` summed over +-d.

    ``N^2 ||U_N v - Pi_fixed v||^2 = sum_{d<N} (N - d) R(d)``; prefix sums make
    each ``N`` a bisection.  Exact inputs are scaled to integers.
    """

    def __init__(self, v: CoeffVector) -> None:
        self.exact = v.exact
        amps = dict(v.amps)
        self.scale_sq = 1
        if self.exact and amps:
            L = 1
            for a in amps.values():
                den = Fraction(a).denominator
                L = L * den // math.gcd(L, den)
            amps = {key: int(Fraction(a) * L) for key, a in amps.items()}
            self.scale_sq = L * L
        by_j: dict[int, list[tuple[int, Scalar]]] = defaultdict(list)
        for (j, k), a in amps.items():
            by_j[j].append((k, a))
        lags: dict[int, Scalar] = defaultdict(int)
        for terms in by_j.values():
            for i, (k, a) in enumerate(terms):
                lags[0] += _abs2(a)
                for k2, b in terms[i + 1:]:
                    c = a * _conj(b)
                    lags[abs(k - k2)] += 2 * (c.real if isinstance(c, complex) else c)
        self.lags = sorted(lags)
        self.pre_r, self.pre_dr = [0], [0]
        for d in self.lags:
            self.pre_r.append(self.pre_r[-1] + lags[d])
            self.pre_dr.append(self.pre_dr[-1] + d * lags[d])

    def scaled_total(self, N: int) -> Scalar:
        i = bisect.bisect_left(self.lags, N)
        return N * self.pre_r[i] - self.pre_dr[i]

    def deviation_sq(self, N: int) -> Scalar:
        total = self.scaled_total(N)
        if self.exact:
            return Fraction(total, N * N * self.scale_sq)
        return total / (N * N)


def mean_deviation_sq(v: CoeffVector, N: int) -> Scalar:
    """``||U_N v - Pi_fixed v||^2`` without materializing ``U_N v``.

    Uses ``||sum_{n<N} T^n g||^2 = sum_{k,k'} a_k conj(a_k') max(0, N - |k - k'|)``
    within each ``j`` (different ``j`` are orthogonal).
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    return _LagProfile(v).deviation_sq(N)


@dataclass(frozen=True)
class NormBound:
    """Both sides of ``||U_N v - Pi_fixed v|| <= N^{-1/2} sum_k ||Pi_k v||``.

    ``lhs_sq`` and ``shell_sq`` are exact when the input is; ``cmp`` is the sign
    of ``lhs - rhs`` (decided exactly in that case).
    """

    N: int
    lhs_sq: Scalar
    shell_sq: tuple[Scalar, ...]
    cmp: int
    single_shell: bool

    @property
    def lhs(self) -> float:
        return math.sqrt(float(self.lhs_sq))

    @property
    def rhs(self) -> float:
        return sqrt_sum_float(self.shell_sq) / math.sqrt(self.N)

    @property
    def holds(self) -> bool:
        return self.cmp <= 0

    @property
    def sharp(self) -> bool:
        return self.single_shell and self.cmp == 0


def norm_bound_check(v: CoeffVector, N: int, rel_tol: float = 1e-12) -> NormBound:
    return norm_bound_profile(v, [N], rel_tol)[0]


def norm_bound_profile(v: CoeffVector, Ns: Sequence[int], rel_tol: float = 1e-12) -> list[NormBound]:
    """:func:`norm_bound_check` for several ``N`` sharing one lag computation."""
    if any(N < 1 for N in Ns):
        raise ValueError("N must be >= 1")
    prof = _LagProfile(v)
    shells = tuple(projection_norms_sq(v).values())
    out = []
    for N in Ns:
        lhs_sq = prof.deviation_sq(N)
        if v.exact:
            cmp = compare_sqrt_sum(lhs_sq * N, shells)
        else:
            lhs = math.sqrt(float(lhs_sq) * N)
            rhs = sqrt_sum_float(shells)
            cmp = 0 if abs(lhs - rhs) <= rel_tol * max(rhs, 1e-300) else (1 if lhs > rhs else -1)
        out.append(NormBound(N, lhs_sq, shells, cmp, len(shells) == 1))
    return out


def banach_witness(H: int, N: int) -> Fraction:
    """Exact ``(||U_N f_H|| / ||f_H||)^2`` for ``f_H = sum_{k=0}^{H} phi[j, k]``."""
    if H < 0 or N < 1:
        raise ValueError("need H >= 0 and N >= 1")
    # autocorrelation of the all-ones block of length H + 1
    total = sum((N - abs(d)) * (H + 1 - abs(d)) for d in range(-min(N - 1, H), min(N - 1, H) + 1))
    return Fraction(total, N * N * (H + 1))


# -- weights and maximal functions ----------------------------------------------

@dataclass(frozen=True)
class PowerLog:
    """``eps(n) = (n + 1)^-alpha * log(2 + n)^-(beta + eta)``."""

    alpha: float = 0.5
    beta: float = 1.5
    eta: float = 0.0

    def __call__(self, n):
        n = np.asarray(n, dtype=float)
        return (n + 1.0) ** (-self.alpha) * np.log(n + 2.0) ** (-(self.beta + self.eta))

    def rm_exponents(self) -> tuple[float, float]:
        """``eps(n)^2 log(n+2)^2 = (n+1)^-a * log(n+2)^-b``; returns ``(a, b)``."""
        return 2 * self.alpha, 2 * (self.beta + self.eta) - 2


@dataclass(frozen=True)
class ConstantWeight:
    value: float = 1.0

    def __call__(self, n):
        return np.full(np.shape(n), self.value, dtype=float)

    def rm_exponents(self) -> tuple[float, float]:
        return 0.0, -2.0


Weight = PowerLog | ConstantWeight


@dataclass(frozen=True)
class MaximalPair:
    """``S = max_N eps(N)|sum_{n<N} s_n|`` and ``S~ = max_N |sum_{n<N} eps(n) s_n|``."""

    S_value: float
    S_tilde_value: float
    argmax_S: int
    argmax_S_tilde: int

    @property
    def holds(self) -> bool:
        return self.S_value <= 2 * self.S_tilde_value

    @property
    def slack(self) -> float:
        return 2 * self.S_tilde_value - self.S_value


def weighted_maximal_batch(s: np.ndarray, eps: Weight) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Row-wise ``(S, S~, argmax S, argmax S~)`` for a 2-D array of sequences."""
    s = np.atleast_2d(np.asarray(s, dtype=float))
    L = s.shape[1]
    n = np.arange(L)
    partial = np.abs(np.cumsum(s, axis=1)) * eps(n + 1)
    weighted = np.abs(np.cumsum(s * eps(n), axis=1))
    i, i_t = partial.argmax(axis=1), weighted.argmax(axis=1)
    rows = np.arange(s.shape[0])
    return partial[rows, i], weighted[rows, i_t], i + 1, i_t + 1


def weighted_maximal_pair(s: Sequence[float], eps: Weight) -> MaximalPair:
    if len(s) == 0:
        raise ValueError("empty sequence")
    S, St, a, at = weighted_maximal_batch(np.asarray(s, dtype=float)[None, :], eps)
    return MaximalPair(float(S[0]), float(St[0]), int(a[0]), int(at[0]))


@dataclass(frozen=True)
class RMSum:
    """Partial sum ``(sum_{n<=N_max} eps(n)^2 log(n+2)^2)^{1/2}``.

    ``tail_bound`` bounds the omitted tail of the *squared* sum by integral
    comparison when one is available.
    """

    value: float
    convergent: bool
    tail_bound: float | None


def rm_rhs(eps: Weight, N_max: int) -> RMSum:
    n = np.arange(N_max + 1)
    terms = eps(n) ** 2 * np.log(n + 2.0) ** 2
    value = float(np.sqrt(terms.sum()))
    a, b = eps.rm_exponents()
    # sum (n+1)^-a log(n+2)^-b converges iff a > 1, or a == 1 and b > 1
    convergent = a > 1 or (a == 1 and b > 1)
    tail = None
    if isinstance(eps, PowerLog) and convergent:
        if a == 1 and N_max >= 2:
            tail = math.log(N_max + 1) ** (1 - b) / (b - 1)
        elif a > 1 and b >= 0:
            tail = (N_max + 1) ** (1 - a) / (a - 1) * math.log(N_max + 2) ** (-b)
    return RMSum(value, convergent, tail)


def kronecker_limit(a: Sequence[Scalar] | Callable[[int], Scalar],
                    b: Sequence[Scalar] | Callable[[int], Scalar], N: int) -> Scalar:
    """``b_N^{-1} sum_{n<N} b_n a_n`` (exact for exact inputs)."""
    fa = a if callable(a) else a.__getitem__
    fb = b if callable(b) else b.__getitem__
    total = sum((fb(n) * fa(n) for n in range(N)), 0)
    bN = fb(N)
    if bN <= 0:
        raise ValueError("b must be positive")
    return Fraction(total) / bN if _is_exact(total) and _is_exact(bN) else total / bN


def random_coeff_vector(rng: np.random.Generator, max_entries: int = 20, kind: Kind = Kind.BILATERAL,
                        j_range: int = 3, k_range: int = 40, denom: int = 12,
                        single_shell: bool = False) -> CoeffVector:
    """Random vector with small rational amplitudes (test and experiment helper)."""
    m = int(rng.integers(1, max_entries + 1))
    lo = 0 if kind is Kind.UNILATERAL else -k_range
    shell = int(rng.integers(lo, k_range + 1))
    amps: dict[tuple[int, int], Fraction] = {}
    for _ in range(m):
        j = int(rng.integers(0, j_range))
        k = shell if single_shell else int(rng.integers(lo, k_range + 1))
        num = int(rng.integers(1, 21)) * int(rng.choice([-1, 1]))
        amps[(j, k)] = Fraction(num, int(rng.integers(1, denom + 1)))
    fixed = Fraction(int(rng.integers(-5, 6)), int(rng.integers(1, 4)))
    return CoeffVector(kind, amps, fixed)
