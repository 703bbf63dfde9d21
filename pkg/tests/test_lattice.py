import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from shiftrate.errors import CaseNotApplicable, NonErgodicMatrix, RationalEigenvalue, UnimodularMatrix
from shiftrate.intmat import IntMatrix
from shiftrate.lattice import (ShellPartition, Spectral, UnimodularOrbits, ball, classify, delta_growth,
                               diagonalizer, dirichlet_bound, gauss_reduce, orbit_representative,
                               rep_growth, shell_index, shortest_vectors, verify_svp)
from shiftrate.qfield import QuadElem

FIB = [[1, 1], [1, 0]]
CAT = [[2, 1], [1, 1]]
TWO = [[2, 0], [0, 2]]
TWIST = [[0, -1], [2, 0]]
ROT = [[0, -1], [1, 0]]

nonzero_vec = st.tuples(st.integers(-30, 30), st.integers(-30, 30)).filter(any)


def float_class(rows):
    """Oracle: numeric eigenvalues; for d <= 3 an integer eigenvalue of modulus one is a root of unity."""
    M = np.array(rows, dtype=float)
    det = round(np.linalg.det(M))
    if det == 0:
        return Spectral.SINGULAR
    ev = np.linalg.eigvals(M)
    if np.any(np.abs(np.abs(ev) - 1) < 1e-7):
        return Spectral.ROOT_OF_UNITY
    return Spectral.BILATERAL if abs(det) == 1 else Spectral.UNILATERAL


@pytest.mark.parametrize("rows,tag", [
    (FIB, Spectral.BILATERAL), (ROT, Spectral.ROOT_OF_UNITY), (CAT, Spectral.BILATERAL),
    (TWO, Spectral.UNILATERAL), ([[1, 2], [2, 4]], Spectral.SINGULAR), ([[1, 0], [0, 2]], Spectral.ROOT_OF_UNITY),
    ([[1, 1], [0, 1]], Spectral.ROOT_OF_UNITY), (TWIST, Spectral.UNILATERAL), ([[0, 1], [1, 0]], Spectral.ROOT_OF_UNITY),
])
def test_classify_examples(rows, tag):
    assert classify(rows).tag is tag


def test_classify_fibonacci_data():
    c = classify(FIB)
    assert c.det == -1 and c.eigen_info.trace == 1 and c.ergodic


@given(st.lists(st.lists(st.integers(-4, 4), min_size=2, max_size=2), min_size=2, max_size=2))
def test_classify_2x2_matches_numeric_oracle(rows):
    assert classify(rows).tag is float_class(rows)
    assert classify(rows).tag is classify(IntMatrix(rows).T).tag


@given(st.lists(st.lists(st.integers(-3, 3), min_size=3, max_size=3), min_size=3, max_size=3))
def test_classify_3x3_matches_numeric_oracle(rows):
    assert classify(rows).tag is float_class(rows)
    assert classify(rows).tag is classify(IntMatrix(rows).T).tag


def test_cyclotomic_orders_general_d():
    # companion matrix of x^4 + 1 (primitive 8th roots of unity)
    C = [[0, 0, 0, -1], [1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0]]
    c = classify(C)
    assert c.tag is Spectral.ROOT_OF_UNITY and 8 in c.cyclotomic_orders


@pytest.mark.parametrize("rows,lam", [
    (FIB, QuadElem(Fraction(1, 2), Fraction(1, 2), 5)),
    (CAT, QuadElem(Fraction(3, 2), Fraction(1, 2), 5)),
])
def test_diagonalizer(rows, lam):
    d = diagonalizer(rows)
    assert d.lam == lam
    assert d.lam * d.lam_small == IntMatrix(rows).det()
    (a, b), (c, e) = rows
    for (s0, s1), ev in zip(d.S, (d.lam_small, d.lam)):
        assert s0 * a + s1 * c == ev * s0 and s0 * b + s1 * e == ev * s1


def test_diagonalizer_rejects_complex_pair():
    with pytest.raises(CaseNotApplicable):
        diagonalizer(ROT)


def brute_representative(rows, xi, span=20):
    """Orbit scan over |k| <= span: minimal sup-norm of the eigen-coordinates, then the
    lexicographically smallest vector."""
    A = IntMatrix(rows)
    d = diagonalizer(A)
    Ainv = A ** -1
    cands = {0: tuple(xi)}
    f = b = tuple(xi)
    for k in range(1, span + 1):
        f, b = A.apply(f), Ainv.apply(b)
        cands[k], cands[-k] = f, b
    best = min(d.sup_norm(v) for v in cands.values())
    rep = min(v for v in cands.values() if d.sup_norm(v) == best)
    return rep, [k for k, v in cands.items() if v == rep][0]


def test_orbit_representative_fibonacci():
    r = orbit_representative(FIB, (1, 0))
    rep, k = brute_representative(FIB, (1, 0))
    assert r.representative == rep and r.offset == k
    assert r.representative in {(0, 1), (1, 0), (1, 1), (2, 1), (1, -1), (-1, 2)}
    again = orbit_representative(FIB, r.representative)
    assert again.offset == 0 and again.representative == r.representative


def test_orbit_representative_cat_equivariance():
    A = IntMatrix(CAT)
    a, b = orbit_representative(A, (5, 3)), orbit_representative(A, A.apply((5, 3)))
    assert a.representative == b.representative == (1, 0)
    assert b.offset == a.offset + 1 == 3


@given(nonzero_vec, st.sampled_from([FIB, CAT, [[1, 1], [1, 2]], [[3, 1], [2, 1]]]))
def test_representative_properties(xi, rows):
    A = IntMatrix(rows)
    orbits = UnimodularOrbits(A)
    r = orbits.representative(xi)
    assert (A ** r.offset).apply(r.representative) == xi
    assert orbits.representative(A.apply(xi)).offset == r.offset + 1
    assert orbits.representative(A.apply(xi)).representative == r.representative
    d = orbits.diag
    base = d.sup_norm(r.representative)
    v = w = r.representative
    Ainv = A ** -1
    for _ in range(20):
        v, w = A.apply(v), Ainv.apply(w)
        assert d.sup_norm(v) >= base and d.sup_norm(w) >= base
    assert (r.representative, -r.offset) == brute_representative(rows, xi, span=max(20, abs(r.offset) + 5))


def test_orbit_representative_requires_ergodic():
    with pytest.raises(NonErgodicMatrix):
        orbit_representative(ROT, (1, 0))


def in_power_lattice(rows, k, xi):
    """Oracle: solve (A^T)^k y = xi over the rationals and test integrality."""
    P = IntMatrix(rows).T ** k
    (a, b), (c, d) = P.rows
    det = a * d - b * c
    return (Fraction(d * xi[0] - b * xi[1], det).denominator == 1
            and Fraction(-c * xi[0] + a * xi[1], det).denominator == 1)


def test_shell_index_examples():
    assert shell_index(TWO, (8, 0)) == 3
    assert shell_index(TWO, (4, 6)) == 1
    k = shell_index(TWIST, (1, 0))
    assert in_power_lattice(TWIST, k, (1, 0)) and not in_power_lattice(TWIST, k + 1, (1, 0))
    with pytest.raises(UnimodularMatrix):
        shell_index(FIB, (1, 0))


def test_shell_index_twist_brute_force_enumeration():
    # enumerate (A^T)^k Z^2 inside the ball of radius 64 directly
    A = IntMatrix(TWIST)
    targets = {(1, 0), (0, 4), (6, -8), (16, 32), (3, 7)}
    for xi in targets:
        k = shell_index(A, xi)
        for j in (k, k + 1):
            P = A.T ** j
            (a, b), (c, d) = P.rows
            hit = any((a * y0 + b * y1, c * y0 + d * y1) == xi for y0 in range(-64, 65) for y1 in range(-64, 65))
            assert hit == (j == k)


@given(nonzero_vec, st.sampled_from([TWO, TWIST, [[2, 1], [1, 3]], [[1, 1], [-1, 2]]]))
def test_shell_index_matches_rational_solve(xi, rows):
    k = shell_index(rows, xi)
    assert in_power_lattice(rows, k, xi)
    assert not in_power_lattice(rows, k + 1, xi)


@pytest.mark.parametrize("rows", [FIB, CAT, TWO, TWIST])
def test_partition_covers_ball_once(rows):
    part = ShellPartition(rows)
    A = IntMatrix(rows)
    seen = 0
    for k, members in part.partition_ball(10).items():
        for xi in members:
            seen += 1
            for j in range(-4, 5) if part.bilateral else range(0, 8):
                if part.bilateral:
                    in_shell = part.index((A.T ** -j).apply(xi)) == 0
                else:
                    in_shell = in_power_lattice(rows, j, xi) and not in_power_lattice(rows, j + 1, xi)
                assert in_shell == (j == k)
    assert seen == 21 * 21 - 1


def test_delta_growth_examples():
    assert delta_growth(TWO, 8) == [4 ** k for k in range(9)]
    d = delta_growth(TWIST, 6)
    assert (d[0], d[2], d[4]) == (1, 4, 16)
    assert d[1] == min(x * x + y * y for x, y in ball(8) if in_power_lattice([[0, 2], [-1, 0]], 1, (x, y)))
    with pytest.raises(UnimodularMatrix):
        delta_growth(FIB, 3)


def brute_shortest_sq(A: IntMatrix, k: int, reach: int) -> int:
    P = A ** k
    (a, b), (c, d) = P.rows
    det = a * d - b * c
    best = None
    for x, y in ball(reach):
        if Fraction(d * x - b * y, det).denominator == 1 and Fraction(-c * x + a * y, det).denominator == 1:
            best = x * x + y * y if best is None else min(best, x * x + y * y)
    return best


@pytest.mark.parametrize("rows", [TWO, TWIST, [[2, 1], [1, 3]], [[1, 1], [-1, 2]], [[3, 1], [1, 1]]])
def test_delta_matches_brute_force(rows):
    A = IntMatrix(rows)
    ds = delta_growth(A, 10)
    for k, d in enumerate(ds):
        reach = math.isqrt(d) + 1
        if (2 * reach + 1) ** 2 > 6000:
            break
        assert brute_shortest_sq(A, k, reach) == d
    det = abs(A.det())
    assert min(Fraction(d, det ** k) for k, d in enumerate(ds)) > 0


@given(st.tuples(st.integers(-50, 50), st.integers(-50, 50)), st.tuples(st.integers(-50, 50), st.integers(-50, 50)))
def test_gauss_reduce_preserves_lattice(u, v):
    if u[0] * v[1] - u[1] * v[0] == 0:
        return
    a, b = gauss_reduce(u, v)
    assert abs(a[0] * b[1] - a[1] * b[0]) == abs(u[0] * v[1] - u[1] * v[0])
    na = a[0] ** 2 + a[1] ** 2
    assert na <= b[0] ** 2 + b[1] ** 2
    r = math.isqrt(na) + 1
    # nothing shorter in the lattice
    det = u[0] * v[1] - u[1] * v[0]
    for x, y in ball(r):
        if (x, y) != (0, 0) and (x * v[1] - y * v[0]) % det == 0 and (u[0] * y - u[1] * x) % det == 0:
            assert x * x + y * y >= na


def test_shortest_vectors_are_lattice_members():
    A = IntMatrix(TWIST)
    for k, u in enumerate(shortest_vectors(A, 6)):
        P = A ** k
        (a, b), (c, d) = P.rows
        det = a * d - b * c
        assert (d * u[0] - b * u[1]) % det == 0 and (-c * u[0] + a * u[1]) % det == 0


def test_rep_growth_fibonacci():
    rg = rep_growth(FIB, 10, 12)
    lam = (1 + math.sqrt(5)) / 2
    assert rg.c > 0 and rg.q == pytest.approx(lam, abs=1e-12) and rg.comparable
    for xi, k, n2 in rg.rows:
        assert n2 >= float(rg.c_squared) * lam ** (2 * abs(k)) * (1 - 1e-12)
        if k == 0:
            assert n2 >= float(rg.c_squared)


def test_dirichlet_bound():
    big, small = dirichlet_bound(FIB, 50), dirichlet_bound(FIB, 25)
    assert big.minimum > 0 and big.minimum <= small.minimum
    # float oracle on the smaller ball
    lam = (1 + math.sqrt(5)) / 2
    v = np.array([1.0, lam - 1.0]) / math.hypot(1.0, lam - 1.0)
    vals = []
    for x, y in ball(25):
        cross = abs(x * v[1] - y * v[0])
        vals.append(math.hypot(x, y) * cross)
    assert small.minimum == pytest.approx(min(vals), rel=1e-9)
    with pytest.raises(RationalEigenvalue):
        dirichlet_bound([[2, 1], [0, 3]], 5)


def test_verify_svp_examples():
    fit = verify_svp([[2, 0], [0, 3]], [(1, 0), (0, 1)], 10)
    assert fit.ok and fit.q >= 2 - 1e-9
    reps = rep_growth(FIB, 10, 1).representatives
    fit = verify_svp(FIB, reps, 12)
    assert fit.ok and fit.q == pytest.approx((1 + math.sqrt(5)) / 2, rel=0.05)
    assert not verify_svp(ROT, [(1, 0), (0, 1)], 12).ok
    assert not verify_svp([[1, 1], [0, 1]], [(1, 0)], 12).ok


@given(st.sampled_from([[[1, 1], [1, 0]], [[2, 1], [1, 1]], [[3, 1], [2, 1]], [[1, 2], [1, 1]]]),
       st.tuples(st.integers(-10**6, 10**6), st.integers(-10**6, 10**6)),
       st.tuples(st.integers(-10**6, 10**6), st.integers(-10**6, 10**6)))
def test_sup_key_orders_like_sup_norm(rows, v, w):
    d = diagonalizer(rows)
    assert d.sup_key(v).value() == d.sup_norm(v)
    a, b = d.sup_norm(v), d.sup_norm(w)
    ka, kb = d.sup_key(v), d.sup_key(w)
    assert (ka < kb) == (a < b) and (ka == kb) == (a == b)
