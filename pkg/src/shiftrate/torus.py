"""Ergodic averages of trigonometric polynomials along toral endomorphism orbits.

Generic points are rationals ``p / q`` with a large prime ``q``: the orbit
``x -> A x mod 1`` is then computed exactly in integers, and only the final
phase ``xi . x mod 1`` is rounded to a float.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Mapping, Sequence

import gmpy2
import numpy as np

from .errors import FrequencyOverflow, NonErgodicMatrix, PeriodicOrbitWarning, PrecisionExhausted
from .exact import compare_sqrt_sum, sqrt_sum_float
from .intmat import IntMatrix, Vector, as_matrix
from .lattice import ShellPartition, classify
from .rates import RateSeries, geometric_grid

TWO_PI = 2.0 * math.pi
EVAL_TOL = 1e-9
FIXED_POINT_LIMIT = 2.0 ** -32
FREQ_BIT_BUDGET = 1 << 24
_U53 = 2.0 ** -53


# -- points ------------------------------------------------------------------------

@dataclass(frozen=True)
class RationalPoint:
    """The point ``num / den`` of ``T^d``, coordinates reduced into ``[0, den)``."""

    num: Vector
    den: int

    def __post_init__(self) -> None:
        if self.den < 1:
            raise ValueError("denominator must be positive")
        object.__setattr__(self, "num", tuple(int(p) % self.den for p in self.num))

    @property
    def dim(self) -> int:
        return len(self.num)

    def apply(self, A: IntMatrix) -> RationalPoint:
        return RationalPoint(A.apply(self.num), self.den)

    def coords(self) -> tuple[float, ...]:
        return tuple(_ratio53(p, self.den) for p in self.num)

    def as_fractions(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(p, self.den) for p in self.num)


@dataclass(frozen=True)
class FixedPoint:
    """A real point known to ``bits`` binary digits.

    ``mant / 2**bits`` approximates the point with error at most
    ``err * 2**-bits`` per coordinate; every matrix application multiplies
    ``err`` by the max-row-sum norm of the matrix.
    """

    mant: Vector
    bits: int
    err: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "mant", tuple(int(m) % (1 << self.bits) for m in self.mant))

    @property
    def dim(self) -> int:
        return len(self.mant)

    @property
    def error(self) -> float:
        return math.ldexp(self.err, -self.bits)

    def apply(self, A: IntMatrix) -> FixedPoint:
        out = FixedPoint(A.apply(self.mant), self.bits, self.err * A.norm_inf())
        if out.error > FIXED_POINT_LIMIT:
            raise PrecisionExhausted(
                f"fixed-point error {out.error:.3g} exceeds 2^-32 with {self.bits} bits")
        return out

    def coords(self) -> tuple[float, ...]:
        return tuple(_ratio53(m, 1 << self.bits) for m in self.mant)


TorusPoint = RationalPoint | FixedPoint


def _ratio53(p: int, q: int) -> float:
    """``p / q`` for ``0 <= p < q`` with error below ``2^-53``."""
    return ((p << 53) // q) * _U53


def random_prime(rng: np.random.Generator, bits: int) -> int:
    start = int.from_bytes(rng.bytes((bits + 7) // 8), "big") >> (8 * ((bits + 7) // 8) - bits)
    start |= 1 << (bits - 1)
    return int(gmpy2.next_prime(start))


def random_generic_point(rng: np.random.Generator, dim: int = 2, bits: int = 2048,
                         prime: int | None = None) -> RationalPoint:
    """Rational point with a random ``bits``-bit prime denominator and uniform numerators.

    Passing ``prime`` reuses a denominator drawn earlier (prime search dominates the cost)."""
    q = random_prime(rng, bits) if prime is None else prime
    bits = q.bit_length()
    nums = [int.from_bytes(rng.bytes(bits // 8 + 8), "big") % q for _ in range(dim)]
    return RationalPoint(tuple(nums), q)


# -- orbits -----------------------------------------------------------------------

@dataclass
class OrbitInfo:
    period: int | None = None


def iter_orbit(A, x: TorusPoint, N: int, info: OrbitInfo | None = None) -> Iterator[TorusPoint]:
    """Yield ``x, A x, ..., A^{N-1} x``; rational orbits report their first revisit."""
    A = as_matrix(A)
    if A.dim != x.dim:
        raise ValueError("dimension mismatch")
    if A.det() == 0:
        raise NonErgodicMatrix("singular matrix")
    info = info if info is not None else OrbitInfo()
    if isinstance(x, FixedPoint):
        for _ in range(N):
            yield x
            if _ < N - 1:
                x = x.apply(A)
        return
    q = x.den
    bijective = math.gcd(A.det(), q) == 1
    seen: dict[Vector, int] | None = None if bijective else {}
    start = num = x.num
    for n in range(N):
        if info.period is None:
            if bijective:
                if n and num == start:
                    info.period = n
            elif num in seen:
                info.period = n - seen[num]
            else:
                seen[num] = n
        yield _mk(num, q)
        num = tuple(v % q for v in A.apply(num))


def _mk(num: Vector, q: int) -> RationalPoint:
    pt = object.__new__(RationalPoint)
    object.__setattr__(pt, "num", num)
    object.__setattr__(pt, "den", q)
    return pt


def orbit_points(A, x: TorusPoint, N: int) -> list[TorusPoint]:
    """The first ``N`` orbit points; warns with :class:`PeriodicOrbitWarning` on a revisit."""
    info = OrbitInfo()
    pts = list(iter_orbit(A, x, N, info))
    if info.period is not None:
        warnings.warn(f"orbit revisits a previous point; period {info.period}", PeriodicOrbitWarning)
    return pts


def orbit_period(A, x: RationalPoint, N: int) -> int | None:
    info = OrbitInfo()
    for _ in iter_orbit(A, x, N + 1, info):
        pass
    return info.period


def _orbit_coords(A: IntMatrix, x: TorusPoint, N: int, info: OrbitInfo) -> Iterator[np.ndarray]:
    """Float coordinates of the orbit in chunks (exact integer iteration underneath)."""
    chunk = 1 << 14
    buf = np.empty((min(chunk, N), x.dim))
    i = 0
    if isinstance(x, RationalPoint) and A.dim == 2:
        # unrolled 2x2 loop: the hot path of long rate experiments
        (a, b), (c, d) = A.rows
        q = x.den
        p1, p2 = x.num
        bijective = math.gcd(A.det(), q) == 1
        seen: dict | None = None if bijective else {}
        s1, s2 = p1, p2
        for n in range(N):
            if info.period is None:
                if bijective:
                    if n and p1 == s1 and p2 == s2:
                        info.period = n
                elif (p1, p2) in seen:
                    info.period = n - seen[(p1, p2)]
                else:
                    seen[(p1, p2)] = n
            buf[i, 0] = ((p1 << 53) // q) * _U53
            buf[i, 1] = ((p2 << 53) // q) * _U53
            i += 1
            if i == len(buf):
                yield buf[:i].copy()
                i = 0
            p1, p2 = (a * p1 + b * p2) % q, (c * p1 + d * p2) % q
    else:
        for pt in iter_orbit(A, x, N, info):
            buf[i] = pt.coords()
            i += 1
            if i == len(buf):
                yield buf[:i].copy()
                i = 0
    if i:
        yield buf[:i].copy()


# -- trigonometric polynomials ------------------------------------------------------

@dataclass
class FourierFunction:
    """``f(x) = sum_xi c[xi] exp(2 pi i xi . x)`` with finitely many terms."""

    dim: int
    coeffs: dict[Vector, complex | Fraction | int] = field(default_factory=dict)
    real_valued: bool = False

    def __post_init__(self) -> None:
        self.coeffs = {tuple(int(v) for v in xi): c for xi, c in self.coeffs.items() if c != 0}
        if any(len(xi) != self.dim for xi in self.coeffs):
            raise ValueError("frequency dimension mismatch")
        if self.real_valued:
            for xi, c in self.coeffs.items():
                neg = tuple(-v for v in xi)
                if self.coeffs.get(neg, 0) != _conj(c):
                    raise ValueError(f"coefficients at {xi} and {neg} are not conjugate")

    @property
    def mean(self):
        return self.coeffs.get((0,) * self.dim, 0)

    @property
    def exact(self) -> bool:
        return all(isinstance(c, (int, Fraction)) for c in self.coeffs.values())

    def norm_sq(self):
        return sum((_abs2(c) for c in self.coeffs.values()), 0)

    def l1(self) -> float:
        return float(sum(abs(complex(c)) for c in self.coeffs.values()))

    def max_freq_l1(self) -> int:
        return max((sum(abs(v) for v in xi) for xi in self.coeffs), default=0)

    def _arrays(self) -> tuple[np.ndarray, np.ndarray]:
        xis = np.array(list(self.coeffs), dtype=float).reshape(-1, self.dim)
        cs = np.array([complex(c) for c in self.coeffs.values()])
        return xis, cs

    def evaluate(self, x: TorusPoint | Sequence[float]) -> complex:
        """Value at a point; rational points get an exact phase reduction."""
        return self.evaluate_with_bound(x)[0]

    def evaluate_with_bound(self, x) -> tuple[complex, float]:
        if isinstance(x, RationalPoint):
            return self.evaluate_rational(x), self.l1() * 16 * _U53
        coords = x.coords() if isinstance(x, FixedPoint) else tuple(x)
        coord_err = x.error if isinstance(x, FixedPoint) else 0.0
        total = sum(complex(c) * cmath.exp(2j * math.pi * sum(a * b for a, b in zip(xi, coords)))
                    for xi, c in self.coeffs.items())
        bound = sum(abs(complex(c)) * TWO_PI * (sum(map(abs, xi)) + 1) * (coord_err + 4 * _U53)
                    for xi, c in self.coeffs.items())
        return total, bound

    def evaluate_rational(self, x: RationalPoint) -> complex:
        """Value at ``num / den``: phases ``xi . num mod den`` are reduced exactly."""
        if not self.coeffs:
            return 0j
        q, nums = gmpy2.mpz(x.den), [gmpy2.mpz(v) for v in x.num]
        if self.dim == 2:
            p1, p2 = nums
            rs = [int(((a * p1 + b * p2) % q << 53) // q) for a, b in self.coeffs]
        else:
            rs = [int((sum(a * b for a, b in zip(xi, nums)) % q << 53) // q) for xi in self.coeffs]
        phases = np.array(rs, dtype=float) * _U53
        cs = np.array([complex(c) for c in self.coeffs.values()])
        return complex(np.exp(TWO_PI * 1j * phases) @ cs)

    def evaluate_many(self, pts: np.ndarray) -> np.ndarray:
        """Values at float coordinates ``pts`` (shape ``(n, dim)``)."""
        xis, cs = self._arrays()
        if not len(cs):
            return np.zeros(len(pts), dtype=complex)
        return np.exp(TWO_PI * 1j * (pts @ xis.T)) @ cs

    def float_error_bound(self, n_terms: int = 1) -> float:
        """Bound on evaluation error from ``2^-53`` coordinate rounding, plus summation."""
        total = 0.0
        for xi, c in self.coeffs.items():
            total += abs(complex(c)) * (TWO_PI * (sum(map(abs, xi)) + 1) * 4 * _U53)
        return total + self.l1() * (math.log2(max(n_terms, 2)) + 2) * 2 * _U53

    def to_json(self) -> dict:
        return {"dim": self.dim,
                "coeffs": [[list(xi), float(complex(c).real), float(complex(c).imag)]
                           for xi, c in sorted(self.coeffs.items())]}

    @classmethod
    def from_json(cls, obj: Mapping) -> FourierFunction:
        coeffs: dict = {}
        for xi, re, im in obj["coeffs"]:
            coeffs[tuple(xi)] = complex(re, im) if im else _num(re)
        return cls(int(obj["dim"]), coeffs)


def _num(v):
    if isinstance(v, str):
        return Fraction(v)
    if isinstance(v, int):
        return v
    return float(v)


def _conj(c):
    return c.conjugate() if isinstance(c, complex) else c


def _abs2(c):
    if isinstance(c, complex):
        return c.real * c.real + c.imag * c.imag
    return c * c


def _require_ergodic(A: IntMatrix) -> None:
    if not classify(A).ergodic:
        raise NonErgodicMatrix(f"{A!r} is {classify(A).tag.value}")


# -- means ------------------------------------------------------------------------

@dataclass(frozen=True)
class MeanValue:
    value: complex
    error_bound: float


def pointwise_mean(f: FourierFunction, A, x: TorusPoint, N: int) -> MeanValue:
    """``N^{-1} sum_{n<N} f(A^n x)`` with a rigorous floating-point error bound."""
    A = as_matrix(A)
    if N < 1:
        raise ValueError("N must be >= 1")
    use_floats = f.float_error_bound(N) <= EVAL_TOL / 10
    total, bound = 0j, 0.0
    if use_floats and not isinstance(x, FixedPoint):
        info = OrbitInfo()
        for pts in _orbit_coords(A, x, N, info):
            total += f.evaluate_many(pts).sum()
        bound = f.float_error_bound(N)
    else:
        for pt in iter_orbit(A, x, N):
            v, b = f.evaluate_with_bound(pt)
            total += v
            bound = max(bound, b)
        bound += f.l1() * (math.log2(N) + 2) * 2 * _U53
    if bound > EVAL_TOL:
        raise PrecisionExhausted(f"evaluation error bound {bound:.3g} exceeds {EVAL_TOL}")
    return MeanValue(total / N, bound)


def spectral_mean(f: FourierFunction, A, N: int) -> FourierFunction:
    """``U_N f`` as a trigonometric polynomial: ``c / N`` placed at ``(A^T)^n xi``, ``n < N``."""
    A = as_matrix(A)
    _require_ergodic(A)
    if N < 1:
        raise ValueError("N must be >= 1")
    B = A.T
    out: dict[Vector, object] = {}
    for xi, c in f.coeffs.items():
        share = Fraction(c, N) if isinstance(c, (int, Fraction)) else c / N
        v = xi
        for _ in range(N):
            out[v] = out.get(v, 0) + share
            v = B.apply(v)
            if max(abs(t) for t in v).bit_length() > FREQ_BIT_BUDGET:
                raise FrequencyOverflow("frequency entries exceed the big-integer budget")
    return FourierFunction(f.dim, out)


def weighted_sums(f: FourierFunction, A, x: TorusPoint, checkpoints: Sequence[int]) -> tuple[list[complex], float, OrbitInfo]:
    """``sum_{n<N} f(A^n x)`` at each checkpoint (float path), and its error bound."""
    A = as_matrix(A)
    N_max = checkpoints[-1]
    bound = f.float_error_bound(N_max)
    if bound > EVAL_TOL:
        raise PrecisionExhausted(f"float evaluation bound {bound:.3g} exceeds {EVAL_TOL}")
    info = OrbitInfo()
    sums, acc, done = [], 0j, 0
    it = iter(checkpoints)
    target = next(it)
    for pts in _orbit_coords(A, x, N_max, info):
        vals = f.evaluate_many(pts)
        cum = np.cumsum(vals) + acc
        while target is not None and target <= done + len(vals):
            sums.append(complex(cum[target - done - 1]))
            target = next(it, None)
        acc = complex(cum[-1])
        done += len(vals)
    return sums, bound, info


def rate_series(f: FourierFunction, A, x: TorusPoint, eta: float,
                N_grid: Sequence[int] | None = None, delta: float = 1.0) -> RateSeries:
    A = as_matrix(A)
    _require_ergodic(A)
    if not math.isfinite(log_weight_sum(f, delta)):
        raise ValueError("log-weight condition fails")
    grid = list(N_grid) if N_grid is not None else geometric_grid(1 << 20)
    sums, bound, info = weighted_sums(f, A, x, grid)
    mean = complex(f.mean)
    dev = [abs(s / n - mean) for n, s in zip(grid, sums)]
    series = RateSeries(grid, dev, eta, {"error_bound": bound, "period": info.period,
                                         "arithmetic": "exact orbit, float evaluation"})
    series.meta["envelope"] = series.envelope_statistic()
    return series


# -- Fourier summability and shells -----------------------------------------------

def log_weight_sum(f: FourierFunction, delta: float) -> float:
    """``sum_xi log(1 + |xi|)^(1 + delta) |c_xi|^2``."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    return log_power_sum(f, 1.0 + delta)


def log_power_sum(f: FourierFunction, alpha: float) -> float:
    total = 0.0
    for xi, c in f.coeffs.items():
        r = math.sqrt(sum(v * v for v in xi))
        if r:
            total += math.log1p(r) ** alpha * float(_abs2(c))
    return total


@dataclass
class ProjectionNorms:
    """Per-shell squared norms ``||Pi_k f||^2`` and ``sum_k ||Pi_k f||``."""

    per_shell_sq: dict[int, object]
    members: dict[int, list[Vector]]

    @property
    def total(self) -> float:
        return sqrt_sum_float(self.per_shell_sq.values())


def projection_norm_sum(f: FourierFunction, A, partition: ShellPartition | None = None) -> ProjectionNorms:
    A = as_matrix(A)
    part = partition if partition is not None else ShellPartition(A)
    per: dict[int, object] = {}
    members: dict[int, list[Vector]] = {}
    for xi, c in f.coeffs.items():
        if not any(xi):
            continue
        k = part.index(xi)
        per[k] = per.get(k, 0) + _abs2(c)
        members.setdefault(k, []).append(xi)
    return ProjectionNorms(per, members)


@dataclass(frozen=True)
class TorusNormBound:
    N: int
    lhs_sq: object
    shells_sq: tuple
    cmp: int

    @property
    def holds(self) -> bool:
        return self.cmp <= 0


def torus_norm_bound(f: FourierFunction, A, N: int, partition: ShellPartition | None = None) -> TorusNormBound:
    """``||U_N f - mean||_2 <= N^{-1/2} sum_k ||Pi_k f||``, exact for rational coefficients."""
    g = spectral_mean(f, A, N)
    zero = (0,) * f.dim
    lhs_sq = sum((_abs2(c) for xi, c in g.coeffs.items() if xi != zero), 0)
    shells = tuple(projection_norm_sum(f, A, partition).per_shell_sq.values())
    if f.exact:
        cmp = compare_sqrt_sum(Fraction(lhs_sq) * N, shells)
    else:
        lhs, rhs = math.sqrt(float(lhs_sq) * N), sqrt_sum_float(shells)
        cmp = 0 if abs(lhs - rhs) <= 1e-12 * max(rhs, 1e-300) else (1 if lhs > rhs else -1)
    return TorusNormBound(N, lhs_sq, shells, cmp)


def random_fourier(rng: np.random.Generator, n_freq: int, radius: int = 16, dim: int = 2,
                   with_mean: bool = True) -> FourierFunction:
    """Random complex trigonometric polynomial with ``|c_xi| ~ 1 / (1 + |xi|)``."""
    coeffs: dict[Vector, complex] = {}
    while len(coeffs) < n_freq:
        xi = tuple(int(v) for v in rng.integers(-radius, radius + 1, size=dim))
        if not with_mean and not any(xi):
            continue
        mag = 1.0 / (1.0 + math.sqrt(sum(v * v for v in xi)))
        coeffs[xi] = complex(rng.normal(), rng.normal()) * mag
    return FourierFunction(dim, coeffs)
