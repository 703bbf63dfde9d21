"""Modulus of continuity, dyadic log-weight bounds and orbit discrepancy of domains."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .intmat import as_matrix
from .rates import RateSeries, geometric_grid
from .torus import (FourierFunction, OrbitInfo, RationalPoint, _require_ergodic, iter_orbit,
                    log_power_sum)

MAGNITUDE_STEPS = 7  # samples at t * 2^-i, i = 0..6
RANDOM_DIRECTIONS = 16


# -- modulus of continuity ------------------------------------------------------

def _sample_offsets(t: float, dim: int, rng: np.random.Generator) -> np.ndarray:
    dirs = [np.eye(dim)[i] for i in range(dim)]
    for _ in range(RANDOM_DIRECTIONS):
        u = rng.normal(size=dim)
        dirs.append(u / np.linalg.norm(u))
    mags = t * 2.0 ** -np.arange(MAGNITUDE_STEPS)
    return np.array([m * u for m in mags for u in dirs])


def _omega_sq_at(f: FourierFunction, ys: np.ndarray) -> np.ndarray:
    """Parseval form ``sum |exp(2 pi i xi.y) - 1|^2 |c|^2`` for each row of ``ys``."""
    if not f.coeffs:
        return np.zeros(len(ys))
    xis, cs = f._arrays()
    phase = ys @ xis.T
    return (4.0 * np.sin(np.pi * phase) ** 2) @ (np.abs(cs) ** 2)


@dataclass(frozen=True)
class ModulusEstimate:
    """Lower estimate of ``omega(f, t)`` from a finite sample of offsets ``|y| <= t``."""

    t: float
    value: float
    argmax: tuple[float, ...]
    lower_bound: bool = True


def modulus_of_continuity(f: FourierFunction, t: float, seed: int = 0) -> ModulusEstimate:
    """Sampled ``sup_{|y|<=t} ||f(. + y) - f||_2``: coordinate axes and
    ``RANDOM_DIRECTIONS`` seeded random directions, each at magnitudes ``t 2^-i``."""
    if t <= 0:
        raise ValueError("t must be positive")
    ys = _sample_offsets(t, f.dim, np.random.default_rng(seed))
    w = _omega_sq_at(f, ys)
    i = int(np.argmax(w))
    return ModulusEstimate(t, float(math.sqrt(max(w[i], 0.0))), tuple(ys[i]))


def modulus_profile(f: FourierFunction, ts: Sequence[float], seed: int = 0) -> list[float]:
    """``omega`` estimates at each ``t``; samples for smaller ``t`` are reused for larger
    ones, so the profile is nondecreasing in ``t`` and each entry is still a lower bound."""
    order = sorted(range(len(ts)), key=lambda i: ts[i])
    out = [0.0] * len(ts)
    best = 0.0
    for i in order:
        best = max(best, modulus_of_continuity(f, ts[i], seed).value)
        out[i] = best
    return out


@dataclass(frozen=True)
class DyadicBound:
    """``lhs = sum log^a(1+|xi|)|c|^2`` and ``rhs = sum_{j<=J} (1 + j^a) omega^2(2^-j)``."""

    alpha: float
    J: int
    lhs: float
    rhs: float

    @property
    def ratio(self) -> float:
        return self.lhs / self.rhs if self.rhs else (0.0 if self.lhs == 0 else math.inf)


def dyadic_modulus_bound(f: FourierFunction, alpha: float, J: int, seed: int = 0) -> DyadicBound:
    if alpha < 0 or J < 1:
        raise ValueError("need alpha >= 0 and J >= 1")
    lhs = log_power_sum(f, alpha) if alpha > 0 else float(
        sum(abs(complex(c)) ** 2 for xi, c in f.coeffs.items() if any(xi)))
    omegas = modulus_profile(f, [2.0 ** -j for j in range(J + 1)], seed)
    rhs = sum((1.0 + j ** alpha if j else 1.0 + (alpha == 0)) * w * w for j, w in enumerate(omegas))
    return DyadicBound(alpha, J, lhs, rhs)


# -- domains ----------------------------------------------------------------------

def _frac_pair(v) -> Fraction:
    return Fraction(v) if not isinstance(v, float) else Fraction(v).limit_denominator(10**12)


def _periodic_diff(a: np.ndarray) -> np.ndarray:
    return a - np.round(a)


@dataclass
class BoxDomain:
    """Axis box ``prod [lo_i, hi_i)`` inside ``[0, 1)^d``."""

    lo: tuple[Fraction, ...]
    hi: tuple[Fraction, ...]
    name: str = "box"

    def __post_init__(self) -> None:
        self.lo = tuple(_frac_pair(v) for v in self.lo)
        self.hi = tuple(_frac_pair(v) for v in self.hi)
        if any(not 0 <= a < b <= 1 for a, b in zip(self.lo, self.hi)):
            raise ValueError("box must satisfy 0 <= lo < hi <= 1")

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def exact_measure(self) -> Fraction:
        return math.prod((b - a for a, b in zip(self.lo, self.hi)), start=Fraction(1))

    @property
    def measure(self) -> float:
        return float(self.exact_measure)

    def contains_rational(self, x: RationalPoint) -> bool:
        q = x.den
        for p, a, b in zip(x.num, self.lo, self.hi):
            if p * a.denominator < a.numerator * q or p * b.denominator >= b.numerator * q:
                return False
        return True

    def contains(self, pts: np.ndarray) -> np.ndarray:
        lo, hi = np.array(self.lo, dtype=float), np.array(self.hi, dtype=float)
        return np.all((pts >= lo) & (pts < hi), axis=1)

    def boundary_distance(self, pts: np.ndarray) -> np.ndarray:
        lo, hi = np.array(self.lo, dtype=float), np.array(self.hi, dtype=float)
        full = (hi - lo) >= 1.0
        d_lo = np.abs(_periodic_diff(pts - lo))
        d_hi = np.abs(_periodic_diff(pts - hi))
        edge = np.where(full, np.inf, np.minimum(d_lo, d_hi))
        inside = self.contains(np.mod(pts, 1.0))
        outside_gap = np.where(full | ((np.mod(pts, 1.0) >= lo) & (np.mod(pts, 1.0) < hi)), 0.0, edge)
        return np.where(inside, edge.min(axis=1), np.sqrt((outside_gap ** 2).sum(axis=1)))

    def shell_measure_exact(self, t: float) -> float:
        """Measure of the ``t``-neighbourhood of the boundary (2-D, no wrap-around overlap)."""
        w = [float(b - a) for a, b in zip(self.lo, self.hi)]
        if self.dim != 2 or any(wi + 2 * t > 1 and wi < 1 for wi in w) or any(2 * t > wi for wi in w):
            raise ValueError("closed form needs d = 2 and a non-overlapping neighbourhood")
        if w[0] >= 1 and w[1] >= 1:
            return 0.0
        if w[0] >= 1 or w[1] >= 1:
            return 4 * t
        return 4 * t * (w[0] + w[1]) + (math.pi - 4) * t * t

    def fourier(self, trunc: int = 64) -> FourierFunction:
        """Fourier coefficients of the indicator on ``|xi|_inf <= trunc``."""
        def g(h: int, a: Fraction, b: Fraction) -> complex:
            if h == 0:
                return complex(b - a)
            return (np.exp(-2j * np.pi * h * float(a)) - np.exp(-2j * np.pi * h * float(b))) / (2j * np.pi * h)
        rng = range(-trunc, trunc + 1)
        tables = [{h: g(h, a, b) for h in rng} for a, b in zip(self.lo, self.hi)]
        if self.dim == 1:
            return FourierFunction(1, {(h,): tables[0][h] for h in rng})
        if self.dim != 2:
            raise ValueError("indicator Fourier series implemented for d <= 2")
        coeffs = {(h, k): tables[0][h] * tables[1][k] for h in rng for k in rng}
        return FourierFunction(2, {xi: c for xi, c in coeffs.items() if abs(c) > 0})


@dataclass
class DiskDomain:
    """Euclidean disk on ``T^2`` (radius at most 1/2)."""

    center: tuple[Fraction, Fraction]
    radius: Fraction
    name: str = "disk"

    def __post_init__(self) -> None:
        self.center = tuple(_frac_pair(v) for v in self.center)
        self.radius = _frac_pair(self.radius)
        if not 0 < self.radius <= Fraction(1, 2):
            raise ValueError("radius must lie in (0, 1/2]")

    dim = 2

    @property
    def exact_measure(self) -> None:
        return None

    @property
    def measure(self) -> float:
        return math.pi * float(self.radius) ** 2

    def contains_rational(self, x: RationalPoint) -> bool:
        # periodic offsets scaled by m = q * lcm(center denominators), kept in [-m/2, m/2)
        L = math.lcm(*(c.denominator for c in self.center))
        m = x.den * L
        total = 0
        for p, c in zip(x.num, self.center):
            r = (p * L - c.numerator * (L // c.denominator) * x.den) % m
            if 2 * r >= m:
                r -= m
            total += r * r
        rn, rd = self.radius.numerator, self.radius.denominator
        return total * rd * rd <= rn * rn * m * m

    def contains(self, pts: np.ndarray) -> np.ndarray:
        d = _periodic_diff(pts - np.array(self.center, dtype=float))
        return (d ** 2).sum(axis=1) <= float(self.radius) ** 2

    def boundary_distance(self, pts: np.ndarray) -> np.ndarray:
        d = _periodic_diff(pts - np.array(self.center, dtype=float))
        return np.abs(np.sqrt((d ** 2).sum(axis=1)) - float(self.radius))

    def shell_measure_exact(self, t: float) -> float:
        r = float(self.radius)
        if t > r or r + t > 0.5:
            raise ValueError("annulus formula needs t <= r and r + t <= 1/2")
        return 4 * math.pi * r * t


@dataclass
class PolygonDomain:
    """Simple polygon with rational vertices strictly inside ``[0, 1)^2``."""

    vertices: list[tuple[Fraction, Fraction]]
    name: str = "poly"

    def __post_init__(self) -> None:
        self.vertices = [(_frac_pair(a), _frac_pair(b)) for a, b in self.vertices]
        if len(self.vertices) < 3:
            raise ValueError("polygon needs at least three vertices")

    dim = 2

    @property
    def exact_measure(self) -> Fraction:
        v = self.vertices
        s = sum(v[i][0] * v[(i + 1) % len(v)][1] - v[(i + 1) % len(v)][0] * v[i][1] for i in range(len(v)))
        return abs(s) / 2

    @property
    def measure(self) -> float:
        return float(self.exact_measure)

    def contains_rational(self, x: RationalPoint) -> bool:
        # crossing-number test in integer coordinates scaled by q * L
        L = math.lcm(*(c.denominator for v in self.vertices for c in v))
        q = x.den
        px, py = x.num[0] * L, x.num[1] * L
        vs = [(int(a * L) * q, int(b * L) * q) for a, b in self.vertices]
        inside = False
        for i in range(len(vs)):
            (x1, y1), (x2, y2) = vs[i], vs[(i + 1) % len(vs)]
            if (y1 > py) != (y2 > py):
                lhs = (px - x1) * (y2 - y1)
                rhs = (x2 - x1) * (py - y1)
                if (lhs < rhs) == (y2 > y1):
                    inside = not inside
        return inside

    def contains(self, pts: np.ndarray) -> np.ndarray:
        v = np.array(self.vertices, dtype=float)
        px, py = pts[:, 0], pts[:, 1]
        inside = np.zeros(len(pts), dtype=bool)
        for (x1, y1), (x2, y2) in zip(v, np.roll(v, -1, axis=0)):
            cross = (y1 > py) != (y2 > py)
            with np.errstate(divide="ignore", invalid="ignore"):
                xint = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
            inside ^= cross & (px < xint)
        return inside

    def boundary_distance(self, pts: np.ndarray) -> np.ndarray:
        v = np.array(self.vertices, dtype=float)
        best = np.full(len(pts), np.inf)
        for shift in np.array([[i, j] for i in (-1, 0, 1) for j in (-1, 0, 1)], dtype=float):
            p = pts + shift
            for a, b in zip(v, np.roll(v, -1, axis=0)):
                ab = b - a
                s = np.clip(((p - a) @ ab) / (ab @ ab), 0.0, 1.0)
                best = np.minimum(best, np.linalg.norm(p - (a + s[:, None] * ab), axis=1))
        return best


Domain = BoxDomain | DiskDomain | PolygonDomain


def make_domain(kind: str) -> Domain:
    """Library shapes used by the experiments."""
    if kind == "box":
        return BoxDomain((0, 0), (Fraction(1, 2), Fraction(1, 2)))
    if kind == "halfplane":
        return BoxDomain((0, 0), (Fraction(1, 2), 1), name="halfplane")
    if kind == "disk":
        return DiskDomain((Fraction(1, 2), Fraction(1, 2)), Fraction(1, 4))
    if kind == "poly":
        return PolygonDomain([(Fraction(1, 10), Fraction(1, 5)), (Fraction(4, 5), Fraction(1, 10)),
                              (Fraction(7, 10), Fraction(3, 4)), (Fraction(3, 10), Fraction(9, 10))])
    raise ValueError(f"unknown domain {kind!r}")


# -- orbit discrepancy -------------------------------------------------------------

def indicator_discrepancy(domain: Domain, A, x: RationalPoint, N_grid: Sequence[int] | None = None,
                          eta: float = 0.5) -> RateSeries:
    """``|N^{-1} #{n < N : A^n x in domain} - |domain||`` at each checkpoint (exact counts)."""
    A = as_matrix(A)
    _require_ergodic(A)
    grid = list(N_grid) if N_grid is not None else geometric_grid(1 << 17)
    info = OrbitInfo()
    counts, count = [], 0
    it = iter(grid)
    target = next(it)
    for n, pt in enumerate(iter_orbit(A, x, grid[-1], info), start=1):
        count += domain.contains_rational(pt)
        if n == target:
            counts.append(count)
            target = next(it, None)
    mu = domain.measure
    dev = [abs(c / n - mu) for c, n in zip(counts, grid)]
    series = RateSeries(grid, dev, eta, {"domain": domain.name, "measure": mu, "counts": counts,
                                         "period": info.period})
    series.meta["envelope"] = series.envelope_statistic()
    return series


@dataclass(frozen=True)
class ShellEstimate:
    estimate: float
    stderr: float


def boundary_shell_measure(domain: Domain, t: float, samples: int = 200_000,
                           rng: np.random.Generator | None = None) -> ShellEstimate:
    """Monte Carlo estimate of ``|{x : dist(x, boundary) <= t}|`` with its standard error."""
    if not 0 < t < 0.5:
        raise ValueError("need 0 < t < 1/2")
    rng = rng if rng is not None else np.random.default_rng(0)
    hits = 0
    batch = 1 << 16
    done = 0
    while done < samples:
        m = min(batch, samples - done)
        pts = rng.random((m, domain.dim))
        hits += int(np.count_nonzero(domain.boundary_distance(pts) <= t))
        done += m
    p = hits / samples
    return ShellEstimate(p, math.sqrt(p * (1 - p) / samples))
