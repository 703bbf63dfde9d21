from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from shiftrate.errors import NullSetPoint, WindowExhausted
from shiftrate.rates import geometric_grid
from shiftrate.walsh import (DyadicPoint, WalshIndexSet, baker_apply, baker_formula, baker_rate_series,
                             label_to_position, position_to_label, rademacher, random_dyadic_point,
                             random_walsh_function, walsh_eval, walsh_grid_mean, walsh_orbit_sums,
                             walsh_shift_check, walsh_shift_failures)

labels = st.lists(st.integers(-12, 12).filter(bool), min_size=1, max_size=5, unique=True).map(WalshIndexSet.of)


def sine_sign(k: int, x: Fraction) -> int:
    """Oracle: sign of sin(2^k pi x) in high precision."""
    with mpmath.workdps(60):
        v = mpmath.sin(2 ** k * mpmath.pi * mpmath.mpf(x.numerator) / x.denominator)
    assert abs(v) > mpmath.mpf(10) ** -40
    return 1 if v > 0 else -1


def test_rademacher_examples():
    assert rademacher(1, Fraction(1, 4)) == 1
    assert rademacher(1, Fraction(3, 4)) == -1
    with pytest.raises(NullSetPoint):
        rademacher(1, Fraction(1, 2))
    with pytest.raises(NullSetPoint):
        rademacher(3, 0)
    with pytest.raises(ValueError):
        rademacher(0, Fraction(1, 3))


def test_r2_digit_rule_against_sine_oracle(rng):
    for _ in range(1000):
        p = random_dyadic_point(rng, bits=24)
        x = p.x
        digit2 = (x.numerator >> (24 - 2)) & 1
        assert rademacher(2, x) == (1 if digit2 == 0 else -1) == sine_sign(2, x)


@given(st.integers(1, 30), st.integers(1, 10**9), st.integers(1, 10**9))
def test_rademacher_matches_sine_on_rationals(k, a, b):
    x = Fraction(min(a, b), max(a, b) + 1)
    if (x * 2 ** k).denominator == 1:
        return
    assert rademacher(k, x) == sine_sign(k, x)


def test_label_bijection():
    assert [label_to_position(s) for s in (1, 2, -1, -2)] == [0, 1, -1, -2]
    for m in range(-20, 20):
        assert label_to_position(position_to_label(m)) == m
    assert WalshIndexSet((-2, 1, 3)).shifted(1).labels == (-1, 2, 4)
    assert WalshIndexSet((-1,)).shifted(1).labels == (1,)
    with pytest.raises(ValueError):
        WalshIndexSet((2, 1))
    with pytest.raises(ValueError):
        WalshIndexSet((0,))


def test_baker_examples():
    assert baker_formula(Fraction(1, 4), Fraction(1, 2)) == (Fraction(1, 2), Fraction(1, 4))
    assert baker_formula(Fraction(3, 4), Fraction(0)) == (Fraction(1, 2), Fraction(1, 2))
    p = baker_apply(DyadicPoint(1, 2, 1, 1))
    assert (p.x, p.y) == (Fraction(1, 2), Fraction(1, 4))
    p = baker_apply(DyadicPoint(3, 2, 0, 1))
    assert (p.x, p.y) == (Fraction(1, 2), Fraction(1, 2))
    with pytest.raises(WindowExhausted):
        baker_apply(DyadicPoint(0, 0, 1, 2))


def test_bit_shift_equals_case_formula(rng):
    for _ in range(10_000):
        p = random_dyadic_point(rng, bits=int(rng.integers(2, 80)), ybits=int(rng.integers(1, 80)))
        q = baker_apply(p)
        assert (q.x, q.y) == baker_formula(p.x, p.y)


def test_digits_shift_by_one_position(rng):
    p = random_dyadic_point(rng, bits=40)
    q = baker_apply(p)
    assert np.array_equal(q.bit_array(-38, 37), p.bit_array(-37, 38))
    assert all(q.bit(m) == p.bit(m + 1) for m in range(-38, 37))
    with pytest.raises(WindowExhausted):
        p.bit(39)


def test_walsh_eval_examples():
    assert walsh_eval(WalshIndexSet((2,)), Fraction(1, 3), Fraction(1, 5)) == rademacher(2, Fraction(1, 3))
    assert walsh_eval(WalshIndexSet((-1,)), Fraction(1, 3), Fraction(4, 5)) == -1
    x = y = Fraction(1, 4) + Fraction(1, 1 << 20)
    assert walsh_eval(WalshIndexSet((-2, 1)), x, y) == rademacher(2, y) * rademacher(1, x)


@given(labels, st.integers(0, 2**62))
def test_walsh_values_are_signs(idx, seed):
    p = random_dyadic_point(np.random.default_rng(seed), bits=20)
    assert walsh_eval(idx, p.x, p.y) ** 2 == 1


def test_shift_check_examples(rng):
    assert walsh_shift_check(WalshIndexSet((1,)), 1000, rng)
    assert walsh_shift_check(WalshIndexSet((-2, 1, 3)), 1000, rng)
    assert not walsh_shift_check(WalshIndexSet((-2, 1, 3)), 1000, rng, target=WalshIndexSet((-2, 1, 3)))
    assert not walsh_shift_check(WalshIndexSet((1,)), 200, rng, target=WalshIndexSet((3,)))


@given(labels, st.integers(0, 2**62))
def test_shift_identity_property(idx, seed):
    rng = np.random.default_rng(seed)
    assert walsh_shift_failures([(idx, idx.shifted(1)), (idx, idx.shifted(2))], 200, rng) == [1]


def test_grid_orthonormality():
    assert walsh_grid_mean(WalshIndexSet(())) == 1
    for labs in [(1,), (-1,), (-10, 10), (-3, 2, 7), (1, 2, 3, 4, 5)]:
        assert walsh_grid_mean(WalshIndexSet(labs)) == 0
    # orthogonality: W_a W_b = W_{a xor b}
    a, b = {-2, 1, 3}, {1, 4}
    assert walsh_grid_mean(WalshIndexSet.of(a ^ b)) == 0
    with pytest.raises(ValueError):
        walsh_grid_mean(WalshIndexSet((11,)))


def direct_sums(f, p, N):
    """Oracle: iterate the case formula and evaluate each Walsh factor."""
    x, y = p.x, p.y
    out, total = [], Fraction(0)
    for _ in range(N):
        total += sum((c * walsh_eval(idx, x, y) for idx, c in f.items() if idx.labels), Fraction(0))
        out.append(total)
        x, y = baker_formula(x, y)
    return out


def test_orbit_sums_match_direct_iteration(rng):
    f = random_walsh_function(rng, n_terms=8, max_label=6, max_size=3)
    p = random_dyadic_point(rng, bits=200)
    cps = [1, 2, 5, 17, 64]
    assert walsh_orbit_sums(f, p, 64, cps) == [direct_sums(f, p, 64)[n - 1] for n in cps]


def test_shift_covariance(rng):
    f = random_walsh_function(rng, n_terms=10, max_label=8)
    shifted = {idx.shifted(1): c for idx, c in f.items()}
    p = random_dyadic_point(rng, bits=400)
    cps = geometric_grid(256)
    assert walsh_orbit_sums(shifted, p, 256, cps) == walsh_orbit_sums(f, baker_apply(p), 256, cps)


def test_baker_rate_series(rng):
    p = random_dyadic_point(rng, bits=(1 << 12) + 64)
    const = baker_rate_series({WalshIndexSet(()): Fraction(3)}, p, N_grid=geometric_grid(1 << 12))
    assert all(d == 0 for d in const.deviation)
    with pytest.raises(WindowExhausted):
        baker_rate_series({WalshIndexSet((1,)): 1}, p, N_grid=geometric_grid(1 << 13))


def test_single_walsh_envelope():
    p = random_dyadic_point(np.random.default_rng(7), bits=1 << 20)
    s = baker_rate_series({WalshIndexSet((1,)): 1}, p, N_grid=geometric_grid(1 << 18))
    assert s.meta["envelope"] < 1


def test_random_walsh_function_is_summable(rng):
    f = random_walsh_function(rng)
    assert len(f) == 50 and WalshIndexSet(()) not in f
    assert sum(abs(c) for c in f.values()) < 2
    assert all(len(i) <= 5 and max(map(abs, i.labels)) <= 12 for i in f)
