"""Weighted convergence profiles shared by the toral, baker and Laguerre experiments."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Sequence


def geometric_grid(n_max: int, n_min: int = 2, ratio: int = 2) -> list[int]:
    """Checkpoints ``n_min, n_min*ratio, ...`` up to and including ``n_max``."""
    if n_min < 1 or ratio < 2 or n_max < n_min:
        raise ValueError("invalid grid parameters")
    grid, n = [], n_min
    while n <= n_max:
        grid.append(n)
        n *= ratio
    return grid


def rate_weight(N: int, eta: float) -> float:
    """``sqrt(N) / log(1 + N)^(3/2 + eta)``."""
    return math.sqrt(N) / math.log1p(N) ** (1.5 + eta)


@dataclass
class RateSeries:
    """Measured ``|U_N f(x) - mean|`` at geometric checkpoints, and its weighting."""

    N: list[int]
    deviation: list[float]
    eta: float
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if len(self.N) != len(self.deviation):
            raise ValueError("length mismatch")
        if any(b <= a for a, b in zip(self.N, self.N[1:])):
            raise ValueError("checkpoint grid must be strictly increasing")

    @property
    def weighted(self) -> list[float]:
        return [rate_weight(n, self.eta) * d for n, d in zip(self.N, self.deviation)]

    def reweighted(self, eta: float) -> RateSeries:
        return RateSeries(list(self.N), list(self.deviation), eta, dict(self.meta))

    def envelope_statistic(self, decade: float = 10.0) -> float:
        """Max weighted value over the last decade of ``N`` over the max over the first.

        Returns ``inf`` when the first decade is identically zero but the last is not,
        and ``0`` when both are zero.
        """
        w = self.weighted
        first = [v for n, v in zip(self.N, w) if n <= self.N[0] * decade]
        last = [v for n, v in zip(self.N, w) if n >= self.N[-1] / decade]
        hi_first, hi_last = max(first), max(last)
        if hi_first == 0:
            return 0.0 if hi_last == 0 else math.inf
        return hi_last / hi_first

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["N", "deviation", "weighted"])
        for n, d, w in zip(self.N, self.deviation, self.weighted):
            writer.writerow([n, repr(float(d)), repr(float(w))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, eta: float) -> RateSeries:
        rows = list(csv.DictReader(io.StringIO(text)))
        return cls([int(r["N"]) for r in rows], [float(r["deviation"]) for r in rows], eta)


def series_from_partial_sums(checkpoints: Sequence[int], sums: Sequence[float], mean: float,
                             eta: float, **meta) -> RateSeries:
    """Build a series from ``sum_{n<N} f(x_n)`` recorded at each checkpoint ``N``."""
    dev = [abs(s / n - mean) for n, s in zip(checkpoints, sums)]
    return RateSeries(list(checkpoints), dev, eta, meta)
