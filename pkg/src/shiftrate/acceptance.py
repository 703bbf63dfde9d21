"""The fixed acceptance battery.

Each criterion returns a :class:`CriterionResult` whose checks carry both sides of
every asserted relation.  ``quick=True`` shrinks sample sizes for the smoke suite;
the relations checked are the same.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import laguerre as lag
from . import walsh as wal
from .discrepancy import BoxDomain, dyadic_modulus_bound
from .intmat import IntMatrix
from .lattice import (ShellPartition, UnimodularOrbits, ball, delta_growth, dirichlet_bound,
                      rep_growth)
from .rates import geometric_grid
from .shift import (Kind, PowerLog, banach_witness, norm_bound_profile, random_coeff_vector,
                    weighted_maximal_batch)
from .torus import (FourierFunction, pointwise_mean, random_fourier, random_generic_point,
                    random_prime, rate_series, spectral_mean)

FIBONACCI = IntMatrix([[1, 1], [1, 0]])
CAT = IntMatrix([[2, 1], [1, 1]])
DOUBLING = IntMatrix([[2, 0], [0, 2]])
TWISTED = IntMatrix([[0, -1], [2, 0]])
TORAL_MATRICES = {"fibonacci": FIBONACCI, "cat": CAT, "doubling": DOUBLING, "twisted": TWISTED}

_U = 2.0 ** -52


@dataclass
class Check:
    name: str
    lhs: object
    rhs: object
    relation: str
    passed: bool

    def to_json(self) -> dict:
        def enc(v):
            if isinstance(v, (bool, int, float, str)) or v is None:
                return v
            return str(v)
        return {"name": self.name, "lhs": enc(self.lhs), "relation": self.relation,
                "rhs": enc(self.rhs), "passed": self.passed}


def check(name: str, lhs, relation: str, rhs) -> Check:
    ops: dict[str, Callable] = {"<=": lambda a, b: a <= b, "<": lambda a, b: a < b,
                                "==": lambda a, b: a == b, ">": lambda a, b: a > b,
                                ">=": lambda a, b: a >= b}
    return Check(name, lhs, rhs, relation, bool(ops[relation](lhs, rhs)))


@dataclass
class CriterionResult:
    number: int
    title: str
    budget: float
    checks: list[Check] = field(default_factory=list)
    measured: dict = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks) and self.seconds < self.budget

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        failed = [c.name for c in self.checks if not c.passed]
        tail = f"  failed: {', '.join(failed)}" if failed else ""
        return (f"[{status}] criterion {self.number}: {self.title} "
                f"({self.seconds:.1f} s, budget {self.budget:.0f} s){tail}")

    def to_json(self) -> dict:
        return {"criterion": self.number, "title": self.title, "passed": self.passed,
                "seconds": round(self.seconds, 3), "budget": self.budget,
                "checks": [c.to_json() for c in self.checks], "measured": self.measured}


def _rng(seed: int, number: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, number]))


def _timed(number: int, title: str, budget: float):
    def wrap(fn):
        def run(seed: int = 0, quick: bool = False, **kw) -> CriterionResult:
            res = CriterionResult(number, title, budget)
            t0 = time.perf_counter()
            fn(res, _rng(seed, number), quick, **kw)
            res.seconds = time.perf_counter() - t0
            res.checks.append(check("runtime_s", round(res.seconds, 3), "<", budget))
            return res
        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run
    return wrap


def random_index_set(rng: np.random.Generator, max_label: int = 12, max_size: int = 5) -> wal.WalshIndexSet:
    labels = [s for s in range(-max_label, max_label + 1) if s]
    size = int(rng.integers(1, max_size + 1))
    return wal.WalshIndexSet.of(int(v) for v in rng.choice(labels, size=size, replace=False))


# -- 1 --------------------------------------------------------------------------------

@_timed(1, "exact shift identities (Laguerre, Walsh/baker)", 10.0)
def criterion_1(res: CriterionResult, rng, quick: bool, sabotage: bool = False) -> None:
    bad_n = [n for n in range(31) if lag.laguerre_shift(lag.laguerre_poly(n)) != lag.laguerre_poly(n + 1)]
    res.checks.append(check("laguerre_identity_failures(n<=30)", len(bad_n), "==", 0))
    n_sets, n_pts = (10, 500) if quick else (50, 10_000)
    sets = [random_index_set(rng) for _ in range(n_sets)]
    # the negative control compares against a target shifted twice
    pairs = [(s, s.shifted(2 if sabotage else 1)) for s in sets]
    bad = wal.walsh_shift_failures(pairs, n_pts, rng)
    res.checks.append(check("walsh_identity_failures", len(bad), "==", 0))
    res.measured.update(index_sets=n_sets, points=n_pts, sabotaged=sabotage)


# -- 2 --------------------------------------------------------------------------------

@_timed(2, "norm bound and its sharpness on random coefficient vectors", 60.0)
def criterion_2(res: CriterionResult, rng, quick: bool) -> None:
    n_vec = 500 if quick else 10_000
    Ns = [1 << i for i in range(11)]
    violations = not_sharp = 0
    worst = 0.0
    for single in (False, True):
        for _ in range(n_vec):
            kind = Kind.BILATERAL if rng.random() < 0.5 else Kind.UNILATERAL
            v = random_coeff_vector(rng, 20, kind, single_shell=single)
            for nb in norm_bound_profile(v, Ns):
                violations += not nb.holds
                if nb.single_shell and nb.cmp != 0:
                    not_sharp += 1
                if nb.rhs > 0:
                    worst = max(worst, nb.lhs / nb.rhs)
    res.checks.append(check("exact_violations(lhs>rhs)", violations, "==", 0))
    res.checks.append(check("single_shell_not_equal", not_sharp, "==", 0))
    res.measured.update(vectors_per_set=n_vec, N=Ns, max_lhs_over_rhs=worst)


# -- 3 --------------------------------------------------------------------------------

@_timed(3, "maximal comparison S <= 2 S~", 60.0)
def criterion_3(res: CriterionResult, rng, quick: bool) -> None:
    n_seq, L = (1000, 1000) if quick else (10_000, 1000)
    eps = PowerLog(0.5, 1.5, 0.1)
    w = eps(np.arange(L + 1))
    # floating error of the two running maxima; a violation is only excluded when the
    # computed slack exceeds it
    err = 4 * L * _U * float(np.sum(w)) + 4 * _U * L
    worst_slack = math.inf
    violations = 0
    for start in range(0, n_seq, 1000):
        m = min(1000, n_seq - start)
        s = rng.choice(np.array([-1.0, 1.0]), size=(m, L))
        S, St, _, _ = weighted_maximal_batch(s, eps)
        slack = 2 * St - S
        violations += int(np.count_nonzero(slack <= err))
        worst_slack = min(worst_slack, float(slack.min()))
    res.checks.append(check("uncertified_sequences", violations, "==", 0))
    res.checks.append(check("min(2S~ - S)", worst_slack, ">", err))
    res.measured.update(sequences=n_seq, length=L, float_error_bound=err, arithmetic="float, certified margin")


# -- 4 --------------------------------------------------------------------------------

@_timed(4, "pointwise vs spectral evaluation of ergodic means on the torus", 300.0)
def criterion_4(res: CriterionResult, rng, quick: bool) -> None:
    n_f, n_pts = (5, 3) if quick else (100, 10)
    worst = 0.0
    count = 0
    # fresh numerators for every point; denominators rotate through a pool of random primes
    primes = [random_prime(rng, 2048) for _ in range(4 if quick else 16)]
    for name, A in TORAL_MATRICES.items():
        for _ in range(n_f):
            f = random_fourier(rng, int(rng.integers(1, 11)), radius=8)
            N = int(rng.integers(1, 1001))
            g = spectral_mean(f, A, N)
            for _ in range(n_pts):
                x = random_generic_point(rng, prime=primes[count % len(primes)])
                a = pointwise_mean(f, A, x, N).value
                b = g.evaluate_rational(x)
                worst = max(worst, abs(a - b))
                count += 1
    res.checks.append(check("max|pointwise - spectral|", worst, "<=", 1e-9))
    res.measured.update(comparisons=count, functions_per_matrix=n_f, points=n_pts)


# -- 5 --------------------------------------------------------------------------------

def _in_power_lattice(M: IntMatrix, k: int, xi) -> bool:
    """``xi`` in ``M^k Z^2``, decided by solving with Fractions."""
    P = M ** k
    (a, b), (c, d) = P.rows
    det = a * d - b * c
    y0 = Fraction(d * xi[0] - b * xi[1], det)
    y1 = Fraction(-c * xi[0] + a * xi[1], det)
    return y0.denominator == 1 and y1.denominator == 1


def _brute_min_sq(A: IntMatrix, k: int, reach: int) -> int | None:
    best = None
    for xi in ball(reach):
        if _in_power_lattice(A, k, xi):
            n2 = xi[0] ** 2 + xi[1] ** 2
            best = n2 if best is None else min(best, n2)
    return best


@_timed(5, "lattice structure: shell partition, shortest vectors, growth constants", 120.0)
def criterion_5(res: CriterionResult, rng, quick: bool) -> None:
    R = 16 if quick else 64
    R_oracle = 8 if quick else 12
    for name, A in TORAL_MATRICES.items():
        part = ShellPartition(A)
        B = A.T
        bad = 0
        counted = 0
        powers: dict[int, IntMatrix] = {}
        for xi in ball(R):
            k = part.index(xi)
            rep = part.representative(xi)
            counted += 1
            if part.bilateral:
                P = powers.get(k) or powers.setdefault(k, B ** k)
                if P @ rep != xi:
                    bad += 1
            elif not (_in_power_lattice(B, k, xi) and not _in_power_lattice(B, k + 1, xi)):
                bad += 1
        res.checks.append(check(f"{name}: shell assignment errors (R={R})", bad, "==", 0))
        res.checks.append(check(f"{name}: points assigned", counted, "==", (2 * R + 1) ** 2 - 1))
        if part.bilateral:
            # independent scan: minimal eigen-sup-norm over |j| <= 20, ties to the smallest vector
            orb = UnimodularOrbits(B)
            Binv = B.adjugate() * B.det()
            mism = 0
            for xi in ball(R_oracle):
                cands = []
                f = b = xi
                for j in range(21):
                    cands += [f, b] if j else [xi]
                    f, b = B.apply(f), Binv.apply(b)
                norms = [(orb.diag.sup_key(v), v) for v in cands]
                m = min(n for n, _ in norms)
                want = min(v for n, v in norms if n == m)
                mism += want != part.representative(xi)
            res.checks.append(check(f"{name}: representative mismatches vs orbit scan (R={R_oracle})",
                                    mism, "==", 0))
    for name in ("doubling", "twisted"):
        A = TORAL_MATRICES[name]
        deltas = delta_growth(A, 12)
        mism, compared = 0, 0
        for k, d2 in enumerate(deltas):
            reach = math.isqrt(d2) + 1
            if (2 * reach + 1) ** 2 > 20_000:
                break
            compared += 1
            mism += _brute_min_sq(A, k, reach) != d2
        ratios = [d2 / abs(A.det()) ** k for k, d2 in enumerate(deltas)]
        res.checks.append(check(f"{name}: delta mismatches vs brute force ({compared} k)", mism, "==", 0))
        res.checks.append(check(f"{name}: min delta_k^2/|det|^k", min(ratios), ">", 0))
    rg = rep_growth(FIBONACCI, 10, 12)
    lam = (1 + math.sqrt(5)) / 2
    res.checks.append(check("fibonacci rep_growth c", rg.c, ">", 0))
    res.checks.append(check("fibonacci rep_growth |q - |lambda||", abs(rg.q - lam), "<=", 1e-12))
    res.checks.append(check("fibonacci eigen-coordinates comparable", rg.comparable, "==", True))
    dt = dirichlet_bound(FIBONACCI, 25 if quick else 50)
    res.checks.append(check("fibonacci min |xi| dist(xi, V)", dt.minimum, ">", 0))
    res.measured.update(radius=R, rep_c=rg.c, rep_q=rg.q, dirichlet_min=dt.minimum,
                        dirichlet_argmin=list(dt.argmin))


# -- 6 --------------------------------------------------------------------------------

@dataclass
class EnvelopeRun:
    system: str
    envelopes: list[float]
    series_csv: list[str]

    @property
    def fraction_below_one(self) -> float:
        return sum(e < 1 for e in self.envelopes) / len(self.envelopes)


def toral_envelopes(rng, n_points: int, N_max: int, eta: float = 0.5) -> EnvelopeRun:
    f = random_fourier(rng, 50, radius=16)
    grid = geometric_grid(N_max)
    envs, csvs = [], []
    for _ in range(n_points):
        s = rate_series(f, FIBONACCI, random_generic_point(rng), eta, grid, delta=1.0)
        envs.append(s.meta["envelope"])
        csvs.append(s.to_csv())
    return EnvelopeRun("toral", envs, csvs)


def baker_envelopes(rng, n_points: int, N_max: int, eta: float = 0.5) -> EnvelopeRun:
    f = wal.random_walsh_function(rng, 50)
    grid = geometric_grid(N_max)
    envs, csvs = [], []
    for _ in range(n_points):
        p = wal.random_dyadic_point(rng, max(64, 4 * N_max))
        s = wal.baker_rate_series(f, p, eta, grid)
        envs.append(s.meta["envelope"])
        csvs.append(s.to_csv())
    return EnvelopeRun("baker", envs, csvs)


def laguerre_envelopes(rng, n_points: int, N_max: int, eta: float = 0.5) -> EnvelopeRun:
    coeffs = lag.random_laguerre_coeffs(rng, 50)
    grid = geometric_grid(N_max)
    envs, csvs = [], []
    for _ in range(n_points):
        x = Fraction(int(rng.integers(1, 1001)), 100)
        s = lag.laguerre_pointwise_rate(coeffs, x, eta, grid)
        envs.append(s.meta["envelope"])
        csvs.append(s.to_csv())
    return EnvelopeRun("laguerre", envs, csvs)


@_timed(6, "decreasing rate envelope (toral, baker, Laguerre)", 900.0)
def criterion_6(res: CriterionResult, rng, quick: bool, keep_series: bool = False) -> None:
    runs = [
        toral_envelopes(rng, 3 if quick else 20, 1 << (14 if quick else 20)),
        baker_envelopes(rng, 5 if quick else 20, 1 << (14 if quick else 18)),
        laguerre_envelopes(rng, 5 if quick else 20, 1 << (8 if quick else 10)),
    ]
    for r in runs:
        res.checks.append(check(f"{r.system}: fraction of points with envelope < 1",
                                r.fraction_below_one, ">=", 0.95))
        res.measured[f"{r.system}_envelopes"] = r.envelopes
    if keep_series:
        res.measured["series"] = {r.system: r.series_csv for r in runs}


# -- 7 --------------------------------------------------------------------------------

@_timed(7, "Banach witness ratio tends to 1", 10.0)
def criterion_7(res: CriterionResult, rng, quick: bool) -> None:
    Hs = [10 ** i for i in range(1, 6)]
    ratios_sq = [banach_witness(H, 4) for H in Hs]
    res.checks.append(check("ratio^2 at H=1e5 vs 0.999^2", ratios_sq[-1], ">", Fraction(999, 1000) ** 2))
    steps = sum(a < b for a, b in zip(ratios_sq, ratios_sq[1:]))
    res.checks.append(check("strict increases over H=10..1e5", steps, "==", len(Hs) - 1))
    res.measured["ratios"] = [math.sqrt(r) for r in ratios_sq]


# -- 8 --------------------------------------------------------------------------------

def modulus_test_functions() -> dict[str, list[tuple[str, FourierFunction]]]:
    singles = [(f"e{xi}", FourierFunction(2, {xi: 1})) for xi in
               [(1, 0), (3, 0), (2, 5), (5, 12), (-7, 4)]]
    boxes = [(f"box{lo}-{hi}", BoxDomain(lo, hi).fourier(64)) for lo, hi in [
        ((0, 0), (Fraction(1, 2), Fraction(1, 2))),
        ((0, 0), (Fraction(1, 2), 1)),
        ((Fraction(1, 10), Fraction(1, 5)), (Fraction(2, 5), Fraction(9, 10))),
        ((Fraction(1, 4), Fraction(1, 4)), (Fraction(3, 4), Fraction(1, 2))),
        ((0, Fraction(1, 3)), (Fraction(1, 3), Fraction(2, 3))),
    ]]
    return {"single_frequency": singles, "box_indicator": boxes}


@_timed(8, "modulus-of-continuity bound with stable ratio", 120.0)
def criterion_8(res: CriterionResult, rng, quick: bool, alpha: float = 2.0) -> None:
    fams = modulus_test_functions()
    if quick:
        fams = {k: v[:2] for k, v in fams.items()}
    for fam, funcs in fams.items():
        r8, r16 = [], []
        for label, f in funcs:
            b8, b16 = dyadic_modulus_bound(f, alpha, 8), dyadic_modulus_bound(f, alpha, 16)
            r8.append(b8.ratio)
            r16.append(b16.ratio)
            res.measured[f"{fam}/{label}"] = {"lhs": b16.lhs, "rhs_J8": b8.rhs, "rhs_J16": b16.rhs}
        max8, max16 = max(r8), max(r16)
        for (label, _), a, b in zip(funcs, r8, r16):
            res.checks.append(check(f"{fam}/{label}: lhs/rhs(J=16) vs ratio_max", b, "<=", max16))
        res.checks.append(check(f"{fam}: |ratio_max(8)-ratio_max(16)|/ratio_max(16)",
                                abs(max8 - max16) / max16, "<", 0.10))
        res.measured[f"{fam}_ratio_max"] = {"J8": max8, "J16": max16}


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8]


def run_all(seed: int = 0, quick: bool = False, sabotage: bool = False,
            only: list[int] | None = None, echo: Callable[[str], None] | None = None) -> list[CriterionResult]:
    out = []
    for i, fn in enumerate(CRITERIA, start=1):
        if only and i not in only:
            continue
        res = fn(seed, quick, sabotage=sabotage) if i == 1 else fn(seed, quick)
        if echo:
            echo(res.line())
        out.append(res)
    return out
