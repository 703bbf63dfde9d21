"""Rademacher and Walsh functions on the unit square, and the baker map as a bit shift.

Signed labels: a positive label ``s`` stands for the x-Rademacher factor ``r_s(x)`` and a
negative label ``-s`` for ``r_s(y)``.  Composition with the baker map moves every label one
step along ``..., -2, -1, 1, 2, ...`` (zero is skipped).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import NullSetPoint, WindowExhausted
from .rates import RateSeries, geometric_grid


def rademacher(k: int, x) -> int:
    """``(-1)^(k-th binary digit of x)``, i.e. the sign of ``sin(2^k pi x)``."""
    if k < 1:
        raise ValueError("Rademacher index starts at 1")
    x = x if isinstance(x, Fraction) else Fraction(x)
    fl, rem = divmod(x.numerator << k, x.denominator)
    if rem == 0:
        raise NullSetPoint(f"2^{k} * {x} is an integer")
    return -1 if fl & 1 else 1


# -- labels ----------------------------------------------------------------------

def label_to_position(s: int) -> int:
    """Position in the two-sided bit string: x-digit ``s`` at ``s - 1``, y-digit ``s`` at ``-s``."""
    if s == 0:
        raise ValueError("label 0 is not used")
    return s - 1 if s > 0 else s


def position_to_label(m: int) -> int:
    return m + 1 if m >= 0 else m


@dataclass(frozen=True)
class WalshIndexSet:
    labels: tuple[int, ...]

    def __post_init__(self) -> None:
        labels = tuple(int(s) for s in self.labels)
        if 0 in labels:
            raise ValueError("label 0 is excluded")
        if any(a >= b for a, b in zip(labels, labels[1:])):
            raise ValueError("labels must be strictly increasing")
        object.__setattr__(self, "labels", labels)

    @classmethod
    def of(cls, labels: Iterable[int]) -> "WalshIndexSet":
        return cls(tuple(sorted(set(labels))))

    @property
    def positions(self) -> tuple[int, ...]:
        return tuple(label_to_position(s) for s in self.labels)

    def shifted(self, n: int = 1) -> "WalshIndexSet":
        return WalshIndexSet(tuple(position_to_label(m + n) for m in self.positions))

    def __len__(self) -> int:
        return len(self.labels)


def walsh_eval(idx: WalshIndexSet, x, y) -> int:
    out = 1
    for s in idx.labels:
        out *= rademacher(s, x) if s > 0 else rademacher(-s, y)
    return out


# -- dyadic points ------------------------------------------------------------------

@dataclass(frozen=True)
class DyadicPoint:
    """``x = X / 2^xbits``, ``y = Y / 2^ybits``; the readable window is the digits kept."""

    X: int
    xbits: int
    Y: int
    ybits: int

    def __post_init__(self) -> None:
        if not (0 <= self.X < 1 << self.xbits and 0 <= self.Y < 1 << self.ybits):
            raise ValueError("coordinates must lie in [0, 1)")

    @property
    def x(self) -> Fraction:
        return Fraction(self.X, 1 << self.xbits)

    @property
    def y(self) -> Fraction:
        return Fraction(self.Y, 1 << self.ybits)

    def bit(self, m: int) -> int:
        """Digit at two-sided position ``m`` (x-digit ``m+1`` or y-digit ``-m``).

        The terminal digit of each coordinate is excluded: there the point sits on the
        Rademacher null set."""
        if m >= 0:
            if m >= self.xbits - 1:
                raise WindowExhausted(f"x-digit {m + 1} outside window of {self.xbits}")
            return (self.X >> (self.xbits - 1 - m)) & 1
        if -m >= self.ybits:
            raise WindowExhausted(f"y-digit {-m} outside window of {self.ybits}")
        return (self.Y >> (self.ybits + m)) & 1

    def bit_array(self, lo: int, hi: int) -> np.ndarray:
        """Digits at positions ``lo <= m < hi`` as a uint8 array."""
        if hi > self.xbits - 1 or -lo > self.ybits - 1:
            raise WindowExhausted(f"positions [{lo}, {hi}) exceed the window")
        out = np.zeros(hi - lo, dtype=np.uint8)
        if hi > 0:
            start = max(lo, 0)
            out[start - lo:] = _int_bits(self.X, self.xbits)[start:hi]
        if lo < 0:
            ys = _int_bits(self.Y, self.ybits)  # ys[i] = y-digit i+1, position -(i+1)
            top = min(hi, 0)
            out[: top - lo] = ys[-top: -lo][::-1] if top < 0 else ys[: -lo][::-1]
        return out


def _int_bits(v: int, width: int) -> np.ndarray:
    """Big-endian digits of ``v`` over ``width`` places."""
    nbytes = (width + 7) // 8
    raw = np.frombuffer((v << (8 * nbytes - width)).to_bytes(nbytes, "big"), dtype=np.uint8)
    return np.unpackbits(raw)[:width]


def baker_apply(p: DyadicPoint) -> DyadicPoint:
    """One baker step: the leading x-digit is moved to the front of y."""
    if p.xbits == 0:
        raise WindowExhausted("no x-digits left")
    top = p.X >> (p.xbits - 1)
    return DyadicPoint(p.X - (top << (p.xbits - 1)), p.xbits - 1, p.Y | (top << p.ybits), p.ybits + 1)


def baker_formula(x: Fraction, y: Fraction) -> tuple[Fraction, Fraction]:
    """Piecewise-affine definition of the baker map in exact rationals."""
    if not (0 <= x < 1 and 0 <= y < 1):
        raise ValueError("point outside the unit square")
    if x < Fraction(1, 2):
        return 2 * x, y / 2
    return 2 * x - 1, y / 2 + Fraction(1, 2)


def random_dyadic_point(rng: np.random.Generator, bits: int = 64, ybits: int | None = None) -> DyadicPoint:
    """Uniform dyadic point whose last digits are 1, so no digit inside the window is
    on the null set."""
    ybits = bits if ybits is None else ybits

    def draw(w: int) -> int:
        v = int.from_bytes(rng.bytes((w + 7) // 8), "big") >> (8 * ((w + 7) // 8) - w)
        return v | 1
    return DyadicPoint(draw(bits), bits, draw(ybits), ybits)


# -- checks and rates ------------------------------------------------------------------

def walsh_shift_check(idx: WalshIndexSet, count: int, rng: np.random.Generator,
                      target: WalshIndexSet | None = None, bits: int = 64) -> bool:
    """``W_idx(B p) == W_target(p)`` on ``count`` random points (target defaults to idx
    shifted).  ``B p`` comes from the piecewise formula, not from digit shifting."""
    pairs = [(idx, idx.shifted(1) if target is None else target)]
    return not walsh_shift_failures(pairs, count, rng, bits)


def walsh_shift_failures(pairs: Sequence[tuple[WalshIndexSet, WalshIndexSet]], count: int,
                         rng: np.random.Generator, bits: int = 64) -> list[int]:
    """Indices of pairs ``(idx, target)`` with a counterexample among ``count`` shared points."""
    bad: set[int] = set()
    factors = [([s for s in i.labels if s > 0], [-s for s in i.labels if s < 0]) for i, _ in pairs]
    tfactors = [([s for s in t.labels if s > 0], [-s for s in t.labels if s < 0]) for _, t in pairs]

    def ev(fs, x, y) -> int:
        v = 1
        for s in fs[0]:
            v *= rademacher(s, x)
        for s in fs[1]:
            v *= rademacher(s, y)
        return v
    for _ in range(count):
        p = random_dyadic_point(rng, bits)
        x, y = p.x, p.y
        bx, by = baker_formula(x, y)
        for i in range(len(pairs)):
            if i not in bad and ev(factors[i], bx, by) != ev(tfactors[i], x, y):
                bad.add(i)
    return sorted(bad)


def walsh_grid_mean(idx: WalshIndexSet, depth: int = 10) -> Fraction:
    """Exact mean of ``W_idx`` over cell midpoints of the dyadic grid of the given depth
    (constant on cells once every label is at most ``depth`` in size)."""
    if any(abs(s) > depth for s in idx.labels):
        raise ValueError("labels exceed the grid depth")
    n = 1 << depth
    mids = [Fraction(2 * i + 1, 2 * n) for i in range(n)]

    def axis_sum(labels: list[int]) -> int:
        total = 0
        for t in mids:
            v = 1
            for s in labels:
                v *= rademacher(s, t)
            total += v
        return total
    xs = axis_sum([s for s in idx.labels if s > 0])
    ys = axis_sum([-s for s in idx.labels if s < 0])
    return Fraction(xs * ys, n * n)


WalshFunction = Mapping[WalshIndexSet, Fraction]


def walsh_orbit_sums(f: WalshFunction, p: DyadicPoint, N_max: int,
                     checkpoints: Sequence[int]) -> list[Fraction]:
    """Exact ``sum_{n<N} (f - mean f)(B^n p)`` at each checkpoint ``N``."""
    sums = [Fraction(0)] * len(checkpoints)
    cps = np.asarray(checkpoints, dtype=np.int64)
    for idx, c in f.items():
        if not idx.labels:
            continue  # constant term has mean equal to itself
        pos = idx.positions
        bits = p.bit_array(min(pos), max(pos) + N_max)
        acc = np.zeros(N_max, dtype=np.uint8)
        for m in pos:
            acc ^= bits[m - min(pos): m - min(pos) + N_max]
        signs = 1 - 2 * acc.astype(np.int64)
        prefix = np.cumsum(signs)
        for i, N in enumerate(cps):
            sums[i] += Fraction(c) * int(prefix[N - 1])
    return sums


def baker_rate_series(f: WalshFunction, p: DyadicPoint, eta: float = 0.5,
                      N_grid: Sequence[int] | None = None) -> RateSeries:
    grid = list(N_grid) if N_grid is not None else geometric_grid(1 << 18)
    sums = walsh_orbit_sums(f, p, grid[-1], grid)
    dev = [abs(float(s / N)) for s, N in zip(sums, grid)]
    series = RateSeries(grid, dev, eta, {"system": "baker", "arithmetic": "exact"})
    series.meta["envelope"] = series.envelope_statistic()
    return series


def random_walsh_function(rng: np.random.Generator, n_terms: int = 50, max_label: int = 12,
                          max_size: int = 5) -> dict[WalshIndexSet, Fraction]:
    """Mean-zero Walsh polynomial with coefficients ``+-1/(1+i)^2`` (absolutely summable)."""
    out: dict[WalshIndexSet, Fraction] = {}
    labels = [s for s in range(-max_label, max_label + 1) if s]
    while len(out) < n_terms:
        size = int(rng.integers(1, max_size + 1))
        idx = WalshIndexSet.of(int(v) for v in rng.choice(labels, size=size, replace=False))
        if idx not in out:
            sign = 1 if rng.random() < 0.5 else -1
            out[idx] = Fraction(sign, (1 + len(out)) ** 2)
    return out
