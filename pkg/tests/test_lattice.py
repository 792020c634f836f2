from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from kugasatake import linalg
from kugasatake.exceptions import DegenerateLatticeError, ValidationError
from kugasatake.lattice import (FiniteAbelianGroup, QuadLattice, SubLattice, bilinear,
                                cokernel_of_sum, diagonal_lattice, discriminant, e8_gram,
                                hyperbolic_plane, k3_period_lattice, orthogonal_complement,
                                quadratic, signature)

D3 = diagonal_lattice([-1, -1, 1])
U = hyperbolic_plane(-1)
D4 = diagonal_lattice([1, 1, 1, -1])


def sympy_snf_diagonal(M):
    from sympy.matrices.normalforms import smith_normal_form

    S = smith_normal_form(sympy.Matrix(M), domain=sympy.ZZ)
    return sorted(abs(int(S[i, i])) for i in range(min(S.shape)))


# -- bilinear / discriminant -------------------------------------------------

def test_bilinear_diagonal_entry():
    assert bilinear(D3, [0, 0, 1], [0, 0, 1]) == 1


def test_bilinear_hyperbolic():
    assert bilinear(U, [1, 1], [1, 1]) == -2


def test_bilinear_rational_vector():
    v = [Fraction(5, 4), 0, Fraction(3, 4)]
    assert bilinear(D3, v, v) == -1
    assert quadratic(D3, v) == -1


@pytest.mark.parametrize("gram,expected", [
    ([[0, -1], [-1, 0]], 1),
    ([[2]], 2),
    (e8_gram(), 1),
])
def test_discriminant_examples(gram, expected):
    assert discriminant(QuadLattice(gram)) == expected


def test_e8_determinant_matches_sympy():
    assert sympy.Matrix(e8_gram()).det() == 1


def test_asymmetric_gram_rejected():
    with pytest.raises(ValidationError):
        QuadLattice([[0, 1], [2, 0]])


def test_degenerate_needs_flag():
    with pytest.raises(DegenerateLatticeError):
        QuadLattice([[1, 1], [1, 1]])
    L = QuadLattice([[1, 1], [1, 1]], degenerate=True)
    with pytest.raises(DegenerateLatticeError):
        discriminant(L)


# -- complements and cokernels -----------------------------------------------

def test_complement_of_e3():
    T = orthogonal_complement(D3, SubLattice([[0, 0, 1]], 3, D3))
    assert T.same_span(SubLattice([[1, 0, 0], [0, 1, 0]], 3, D3))


def test_complement_in_hyperbolic_plane():
    T = orthogonal_complement(U, SubLattice([[1, 1]], 2, U))
    assert T.same_span(SubLattice([[1, -1]], 2, U))


def test_complement_integer_kernel():
    T = orthogonal_complement(D4, SubLattice([[2, 1, 0, 0]], 4, D4))
    expected = SubLattice([[1, -2, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]], 4, D4)
    assert T.same_span(expected)


def test_cokernel_trivial():
    S = SubLattice([[0, 0, 1]], 3, D3)
    T = SubLattice([[1, 0, 0], [0, 1, 0]], 3, D3)
    assert cokernel_of_sum(D3, S, T).is_trivial()


def test_cokernel_z2():
    K = cokernel_of_sum(U, SubLattice([[1, 1]], 2, U), SubLattice([[1, -1]], 2, U))
    assert K.invariant_factors == (2,)


def test_cokernel_z5():
    S = SubLattice([[2, 1, 0, 0]], 4, D4)
    K = cokernel_of_sum(D4, S, orthogonal_complement(D4, S))
    assert K.invariant_factors == (5,)
    assert K.order == 5


# -- Smith normal form -------------------------------------------------------

@pytest.mark.parametrize("M,diag", [
    ([[2, 0], [0, 3]], [1, 6]),
    ([[1, 0], [0, 1]], [1, 1]),
    ([[-1, 1], [1, -1]], [1, 0]),
])
def test_snf_examples(M, diag):
    U_, D, V = linalg.smith_normal_form(M)
    assert linalg.diagonal(D) == diag
    assert linalg.matmul(linalg.matmul(U_, M), V) == D
    assert sorted(diag) == sympy_snf_diagonal(M)


# -- signature ---------------------------------------------------------------

def test_signature_examples():
    assert signature(D3) == (1, 2)
    assert signature(U) == (1, 1)
    H, h, P = k3_period_lattice(1)
    assert signature(P.as_lattice()) == (19, 2)
    assert signature(H) == (19, 3)


def test_signature_matches_eigenvalues():
    import numpy as np

    ev = np.linalg.eigvalsh(np.array(e8_gram(), dtype=float))
    assert signature(QuadLattice(e8_gram())) == (int((ev > 0).sum()), int((ev < 0).sum()))


# -- K3 lattice --------------------------------------------------------------

@pytest.mark.parametrize("d", [1, 2, 3, 7])
def test_k3_period_lattice(d):
    H, h, P = k3_period_lattice(d)
    assert H.rank == 22 and P.rank == 21
    assert discriminant(H) == 1
    assert quadratic(H, h) == -2 * d
    assert discriminant(P) == 2 * d
    assert all(bilinear(H, h, b) == 0 for b in P.basis)


def test_k3_rejects_bad_degree():
    with pytest.raises(ValidationError):
        k3_period_lattice(0)


def test_finite_abelian_group():
    G = FiniteAbelianGroup.from_diagonal([1, 2, 6])
    with pytest.raises(ValidationError):
        FiniteAbelianGroup.from_diagonal([2, 0])
    assert G.invariant_factors == (2, 6)
    assert G.order == 12
    assert G.exponent() == 6
    assert G.primary_part(2).order == 4
    assert G.primary_part(3).order == 3


# -- properties --------------------------------------------------------------

int_matrix = st.integers(1, 6).flatmap(
    lambda r: st.integers(1, 6).flatmap(
        lambda c: st.lists(st.lists(st.integers(-20, 20), min_size=c, max_size=c),
                           min_size=r, max_size=r)))


@given(int_matrix)
def test_snf_postcondition(M):
    U_, D, V = linalg.smith_normal_form(M)
    assert linalg.matmul(linalg.matmul(U_, M), V) == D
    assert abs(linalg.det(U_)) == 1 and abs(linalg.det(V)) == 1
    d = linalg.diagonal(D)
    nz = [x for x in d if x]
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
    assert sorted(d) == sympy_snf_diagonal(M)


def test_snf_large_random():
    import random

    rng = random.Random(3)
    for size in (20, 35, 50):
        M = [[rng.randint(-9, 9) for _ in range(size)] for _ in range(size)]
        U_, D, V = linalg.smith_normal_form(M)
        assert linalg.matmul(linalg.matmul(U_, M), V) == D
        prod = 1
        for x in linalg.diagonal(D):
            prod *= x
        assert prod == abs(linalg.det(M))


sym_gram = st.integers(1, 5).flatmap(
    lambda n: st.lists(st.integers(-4, 4), min_size=n * (n + 1) // 2, max_size=n * (n + 1) // 2)
    .map(lambda xs, n=n: _sym(n, xs)))


def _sym(n, xs):
    g = [[0] * n for _ in range(n)]
    k = 0
    for i in range(n):
        for j in range(i, n):
            g[i][j] = g[j][i] = xs[k]
            k += 1
    return g


@given(sym_gram)
def test_signature_adds_to_rank(g):
    if linalg.det(g) == 0:
        return
    L = QuadLattice(g)
    p, q = signature(L)
    assert p + q == L.rank
    assert (-1) ** q == (1 if linalg.det(g) > 0 else -1)


@given(sym_gram, st.lists(st.integers(-3, 3), min_size=5, max_size=5))
def test_double_complement(g, v):
    if linalg.det(g) == 0:
        return
    L = QuadLattice(g)
    v = v[:L.rank]
    if not any(v):
        return
    S = SubLattice([v], L.rank, L).saturate()
    if S.gram()[0][0] == 0:
        return
    T = orthogonal_complement(L, S)
    TT = orthogonal_complement(L, T)
    assert TT.same_span(S)


@given(st.lists(st.integers(-3, 3), min_size=2, max_size=4).filter(any), st.integers(1, 3))
def test_cokernel_order_equals_discriminants(v, d):
    H, h, P = k3_period_lattice(d)
    # a saturated sublattice of the unimodular K3 lattice spanned by h and a coordinate vector
    w = [0] * 22
    w[4:4 + len(v)] = v
    S = SubLattice([list(h), w], 22, H).saturate()
    if linalg.det(S.gram()) == 0:
        return
    T = orthogonal_complement(H, S)
    K = cokernel_of_sum(H, S, T)
    assert K.order == discriminant(S) == discriminant(T)
