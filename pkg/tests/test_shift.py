import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from shiftrate.shift import (CoeffVector, ConstantWeight, Kind, PowerLog, apply_shift, banach_witness,
                             ergodic_mean, inner, kronecker_limit, mean_deviation_sq, norm_bound_check,
                             norm_bound_profile, projection_norms, projection_norms_sq, random_coeff_vector,
                             rm_rhs, weighted_maximal_batch, weighted_maximal_pair)

amp = st.fractions(min_value=-20, max_value=20, max_denominator=12).filter(lambda f: f != 0)


@st.composite
def coeff_vectors(draw, kind=None, single_shell=False):
    kind = draw(st.sampled_from(list(Kind))) if kind is None else kind
    lo = 0 if kind is Kind.UNILATERAL else -30
    shell = draw(st.integers(lo, 30))
    keys = draw(st.lists(st.tuples(st.integers(0, 3), st.just(shell) if single_shell else st.integers(lo, 30)),
                         min_size=1, max_size=20, unique=True))
    amps = {key: draw(amp) for key in keys}
    return CoeffVector(kind, amps, draw(st.fractions(min_value=-5, max_value=5, max_denominator=6)))


def dense_mean_dev_sq(v: CoeffVector, N: int) -> Fraction:
    """Oracle: materialize U_N v coefficient by coefficient."""
    out: dict = {}
    for (j, k), a in v.amps.items():
        for n in range(N):
            out[(j, k + n)] = out.get((j, k + n), 0) + Fraction(a) / N
    return sum((c * c for c in out.values()), Fraction(0))


def test_apply_shift_examples():
    assert apply_shift(CoeffVector(Kind.UNILATERAL, {(0, 0): 1})).amps == {(0, 1): 1}
    v = CoeffVector(Kind.BILATERAL, {}, Fraction(3, 2))
    assert apply_shift(v) == v


@given(coeff_vectors())
def test_shift_is_isometry_and_mean_identity(v):
    assert apply_shift(v).norm_sq() == v.norm_sq()
    assert apply_shift(v, 5).norm_sq() == v.norm_sq()
    assert ergodic_mean(v, 1) == v


@given(coeff_vectors(single_shell=True), coeff_vectors(single_shell=True), st.integers(0, 6), st.integers(0, 6))
def test_wandering_orthogonality(v, w, m, n):
    # move both into shell 0 first
    v0 = CoeffVector(Kind.BILATERAL, {(j, 0): a for (j, _), a in v.amps.items()})
    w0 = CoeffVector(Kind.BILATERAL, {(j, 0): a for (j, _), a in w.amps.items()})
    ip = inner(apply_shift(v0, m), apply_shift(w0, n))
    if m != n:
        assert ip == 0


def test_ergodic_mean_examples():
    v = CoeffVector(Kind.UNILATERAL, {(0, 0): 1})
    m = ergodic_mean(v, 4)
    assert m.amps == {(0, k): Fraction(1, 4) for k in range(4)}
    assert m.norm_sq() == Fraction(1, 4)
    fixed = CoeffVector(Kind.BILATERAL, {}, 7)
    assert ergodic_mean(fixed, 9) == fixed
    two = CoeffVector(Kind.UNILATERAL, {(0, 0): 1, (0, 5): 1})
    assert (ergodic_mean(two, 4) - CoeffVector(Kind.UNILATERAL, {}, 0)).norm_sq() == Fraction(1, 2)


@given(coeff_vectors(), st.integers(1, 40))
def test_lag_profile_matches_dense_oracle(v, N):
    expected = dense_mean_dev_sq(v, N)
    assert mean_deviation_sq(v, N) == expected
    assert (ergodic_mean(v, N) - CoeffVector(v.kind, {}, v.fixed_part)).norm_sq() == expected


def test_projection_norms_examples():
    assert projection_norms(CoeffVector(Kind.BILATERAL, {(0, 0): 3, (1, 0): 4})) == {0: 5}
    assert projection_norms(CoeffVector(Kind.BILATERAL, {(0, 0): 1, (0, 5): 1})) == {0: 1, 5: 1}


@given(coeff_vectors())
def test_parseval(v):
    assert sum(projection_norms_sq(v).values()) + v.fixed_part ** 2 == v.norm_sq()


def test_norm_bound_examples():
    for N in (1, 3, 4, 100):
        nb = norm_bound_check(CoeffVector(Kind.UNILATERAL, {(0, 0): 1}), N)
        assert nb.lhs_sq == Fraction(1, N) and nb.sharp
    nb = norm_bound_check(CoeffVector(Kind.UNILATERAL, {(0, 0): 1, (0, 5): 1}), 4)
    assert nb.lhs_sq == Fraction(1, 2) and nb.cmp == -1 and nb.rhs == pytest.approx(1.0)
    nb = norm_bound_check(CoeffVector(Kind.BILATERAL, {}, 3), 8)
    assert nb.lhs_sq == 0 and nb.rhs == 0 and nb.holds


@given(coeff_vectors())
def test_norm_bound_holds(v):
    for nb in norm_bound_profile(v, [1, 2, 4, 8, 16, 64]):
        assert nb.holds
        assert nb.lhs <= nb.rhs * (1 + 1e-12)


@given(coeff_vectors(single_shell=True), st.integers(1, 64))
def test_norm_bound_sharp_on_single_shell(v, N):
    nb = norm_bound_check(v, N)
    assert nb.sharp and nb.lhs_sq * N == sum(projection_norms_sq(v).values())


def test_norm_bound_float_path():
    v = CoeffVector(Kind.BILATERAL, {(0, 0): 0.5, (0, 3): -0.25})
    nb = norm_bound_check(v, 4)
    assert nb.holds and not v.exact


def witness_oracle(H: int, N: int) -> Fraction:
    v = CoeffVector(Kind.UNILATERAL, {(0, k): 1 for k in range(H + 1)})
    return dense_mean_dev_sq(v, N) / (H + 1)


def test_banach_witness_examples():
    assert banach_witness(1, 2) == Fraction(3, 4)
    assert banach_witness(7, 1) == 1
    r = [banach_witness(H, 4) for H in (4, 40, 400)]
    assert r[0] < r[1] < r[2] < 1


@given(st.integers(0, 40), st.integers(1, 12))
def test_banach_witness_matches_materialized_oracle(H, N):
    assert banach_witness(H, N) == witness_oracle(H, N)


@given(st.integers(1, 10**6), st.integers(1, 30))
def test_banach_witness_closed_form(H, N):
    if H >= N - 1:
        assert banach_witness(H, N) == 1 - Fraction(N * N - 1, 3 * N * (H + 1))
    assert banach_witness(H, N) <= banach_witness(H + 1, N)


def test_banach_witness_limit_tolerance():
    # the gap at H = 10^6 / N is (N^2 - 1) / (6 N (H + 1)) to first order
    for N in (1, 2):
        assert 1 - math.sqrt(banach_witness(10**6 // N, N)) < 1e-6
    gap4 = 1 - math.sqrt(banach_witness(10**6 // 4, 4))
    assert gap4 == pytest.approx(15 / (24 * (250_001)), rel=1e-5)


def test_weighted_maximal_examples():
    eps = PowerLog(0.5, 1.5, 0.0)
    s = [1.0] + [0.0] * 20
    p = weighted_maximal_pair(s, eps)
    assert p.S_value == pytest.approx(float(eps(1))) and p.S_tilde_value == pytest.approx(float(eps(0)))
    alt = [(-1.0) ** n for n in range(1000)]
    p = weighted_maximal_pair(alt, eps)
    assert p.holds and p.slack > 0


def maximal_oracle(s, eps):
    S = St = 0.0
    tot = wtot = 0.0
    for N in range(1, len(s) + 1):
        tot += s[N - 1]
        wtot += eps(N - 1) * s[N - 1]
        S = max(S, eps(N) * abs(tot))
        St = max(St, abs(wtot))
    return S, St


@given(st.lists(st.floats(-10, 10, allow_nan=False), min_size=1, max_size=200),
       st.floats(0.05, 2.0), st.floats(0.0, 3.0))
def test_maximal_comparison_any_decreasing_weight(s, alpha, beta):
    eps = PowerLog(alpha, beta, 0.0)
    p = weighted_maximal_pair(s, eps)
    S, St = maximal_oracle(s, lambda n: float(eps(n)))
    assert p.S_value == pytest.approx(S, rel=1e-9, abs=1e-12)
    assert p.S_tilde_value == pytest.approx(St, rel=1e-9, abs=1e-12)
    assert p.S_value <= 2 * p.S_tilde_value * (1 + 1e-12) + 1e-12


def test_maximal_batch_random_signs(rng):
    eps = PowerLog(0.5, 1.5, 0.1)
    s = rng.choice(np.array([-1.0, 1.0]), size=(500, 1000))
    S, St, a, at = weighted_maximal_batch(s, eps)
    assert np.all(S <= 2 * St)
    i = 17
    S1, St1 = maximal_oracle(list(s[i]), lambda n: float(eps(n)))
    assert S[i] == pytest.approx(S1) and St[i] == pytest.approx(St1)


def test_rm_rhs_flags():
    assert not rm_rhs(ConstantWeight(), 1000).convergent
    conv = rm_rhs(PowerLog(0.5, 1.5, 0.1), 10**5)
    assert conv.convergent and conv.tail_bound is not None and conv.tail_bound > 0
    assert not rm_rhs(PowerLog(0.5, 1.5, 0.0), 10**5).convergent
    # partial sums grow with N_max
    assert rm_rhs(PowerLog(0.5, 1.5, 0.1), 10**3).value < conv.value


def test_rm_rhs_value_matches_direct_sum():
    eps = PowerLog(0.5, 1.5, 0.1)
    direct = math.sqrt(sum(float(eps(n)) ** 2 * math.log(n + 2) ** 2 for n in range(501)))
    assert rm_rhs(eps, 500).value == pytest.approx(direct, rel=1e-12)


def test_kronecker_limit():
    # summable a_n = (-1)^n / (n + 1): the weighted average decays like 1/N
    v = kronecker_limit(lambda n: Fraction((-1) ** n, n + 1), lambda n: n + 1, 10**4)
    assert abs(v) <= Fraction(1, 10**4)
    assert kronecker_limit([0] * 10, list(range(1, 12)), 10) == 0
    vals = [kronecker_limit(lambda n: Fraction(1, 2 ** n), lambda n: n + 1, N) for N in range(20, 60)]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    # a_n = (-1)^n is not summable: the average tends to -1/2, not 0
    bad = kronecker_limit(lambda n: (-1) ** n, lambda n: n + 1, 10**4)
    assert bad == pytest.approx(-0.5, abs=1e-3)


def test_random_coeff_vector_shapes(rng):
    for _ in range(50):
        v = random_coeff_vector(rng, kind=Kind.UNILATERAL)
        assert v.exact and all(k >= 0 for _, k in v.amps) and 1 <= len(v.amps) <= 20
        w = random_coeff_vector(rng, single_shell=True)
        assert len(w.shells()) == 1
