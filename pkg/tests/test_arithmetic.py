import math
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from kugasatake.arithmetic import (congruence_membership, cyclotomic_orders, finite_order,
                                   fujino_separation_check, has_finite_order,
                                   neat_congruence_level, separation_sum_bounds)
from kugasatake.exceptions import ValidationError


@pytest.mark.parametrize("n,ell", [(1, 3), (2, 5), (3, 11)])
def test_neat_levels(n, ell):
    cert = neat_congruence_level(n)
    assert cert.prime == ell
    assert cert.to_document()["n"] == n


def test_neat_level_bound_up_to_25():
    for n in range(1, 26):
        ell = neat_congruence_level(n).prime
        f = math.factorial(n)
        assert sympy.isprime(ell) and ell - 1 > f
        # smallest such prime
        assert not any(sympy.isprime(q) for q in range(f + 2, ell))


def test_neat_level_rejects_zero():
    with pytest.raises(ValidationError):
        neat_congruence_level(0)


@pytest.mark.parametrize("g,expected", [
    ([[1, 0], [0, 1]], True),
    ([[0, -1], [1, 0]], True),
    ([[1, 1], [0, 1]], False),
    ([[2, 1], [1, 1]], False),
    ([[0, -1], [1, -1]], True),
    ([[-1, 1], [0, -1]], False),
])
def test_has_finite_order_examples(g, expected):
    assert has_finite_order(g) is expected


def test_cyclotomic_orders():
    assert cyclotomic_orders([[0, -1], [1, 0]]) == [4]
    assert cyclotomic_orders([[2, 1], [1, 1]]) is None
    assert finite_order([[0, -1], [1, -1]]) == 3
    assert finite_order([[1, 1], [0, 1]]) is None


def _mat_pow(g, N):
    M = sympy.Matrix(g)
    return M ** N


@settings(max_examples=30)
@given(st.permutations(range(4)), st.lists(st.sampled_from([-1, 1]), min_size=4, max_size=4),
       st.lists(st.integers(-2, 2), min_size=3, max_size=3))
def test_finite_order_by_explicit_powering(perm, signs, shear):
    # conjugate a signed permutation by a unimodular matrix
    P = sympy.zeros(4)
    for i, (j, s) in enumerate(zip(perm, signs)):
        P[j, i] = s
    U = sympy.eye(4)
    U[0, 1], U[1, 2], U[2, 3] = shear
    g = (U * P * U.inv()).tolist()
    assert has_finite_order(g)
    N = finite_order(g)
    assert _mat_pow(g, N) == sympy.eye(4)
    for d in sympy.divisors(N)[:-1]:
        assert _mat_pow(g, d) != sympy.eye(4)


def test_congruence_membership_examples():
    assert congruence_membership([[1, 0], [0, 1]], 7)
    assert congruence_membership([[1, 3], [0, 1]], 3)
    assert not congruence_membership([[0, 1], [1, 0]], 3)


@pytest.mark.parametrize("dim,c,expected", [
    (1, [2], True),
    (2, [4, 4], False),
    (1, [Fraction(19, 10)], False),
])
def test_fujino_examples(dim, c, expected):
    assert fujino_separation_check(dim, c) is expected


def test_fujino_sum_enclosure():
    lo, hi = separation_sum_bounds([4, 4], 64)
    exact = sympy.Rational(1, 2) + 2 * sympy.sqrt(2) / 4
    assert lo <= exact <= hi
    assert hi - lo < Fraction(1, 2 ** 60)


def test_fujino_indeterminate_at_low_precision():
    # c(2) just below 4 sqrt(2) puts the sum a hair above 1
    c2 = Fraction(int(sympy.floor(4 * sympy.sqrt(2) * 10 ** 30)), 10 ** 30)
    assert fujino_separation_check(2, [4, c2], max_bits=32) is None
    assert fujino_separation_check(2, [4, c2], max_bits=256) is False
    c2 += Fraction(1, 10 ** 29)
    assert fujino_separation_check(2, [4, c2], max_bits=256) is True


def test_fujino_validation():
    with pytest.raises(ValidationError):
        fujino_separation_check(2, [1])
    with pytest.raises(ValidationError):
        fujino_separation_check(1, [0])


positive = st.fractions(min_value=Fraction(1, 2), max_value=50, max_denominator=20)


@settings(max_examples=60)
@given(st.integers(1, 5).flatmap(lambda d: st.tuples(st.just(d), st.lists(positive, min_size=d, max_size=d))),
       st.integers(0, 4), st.fractions(min_value=0, max_value=10, max_denominator=7))
def test_fujino_monotone(dc, k, bump):
    dim, c = dc
    before = fujino_separation_check(dim, c)
    c2 = list(c)
    c2[k % dim] += bump
    after = fujino_separation_check(dim, c2)
    if before is True:
        assert after is True
