import random
import warnings
from fractions import Fraction

import mpmath
import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from kugasatake import correspondence as co
from kugasatake import linalg
from kugasatake.clifford import CliffordContext, left_mult_matrix
from kugasatake.correspondence import (UnverifiedWarning, commutant, disjointness_exclusion_primes,
                                       hodge_type_00, p_embedding, picard_commutant, picard_direct,
                                       picard_from_period, picard_full, rational_intersection_rank,
                                       top_wedge_twist, tu_map, u_map, wedge_family)
from kugasatake.galois import GaloisModule, reduce_mod, torsion_invariant_order
from kugasatake.kuga_satake import K3Period, complex_structure, kuga_satake_torus, standard_period
from kugasatake.lattice import SubLattice, discriminant, k3_period_lattice
from kugasatake.samples import random_period
from kugasatake.scalars import QuadraticNumber

F = Fraction
CTX3 = CliffordContext([-1, -1, 1])


def span(rows, n=3):
    return SubLattice(rows, n, None)


# -- u and tu ----------------------------------------------------------------

def test_tu_examples():
    ctx = CliffordContext([-1, -1])
    assert (tu_map(ctx.one()) == np.eye(2, dtype=object)).all()
    assert tu_map(ctx.blade(1, 2)).tolist() == [[0, -1], [1, 0]]
    assert (u_map(ctx.blade(1, 2)) == tu_map(ctx.blade(1, 2)).T).all()


@given(st.integers(0, 10 ** 6))
def test_tu_homomorphism_u_anti(seed):
    rng = random.Random(seed)
    ctx = CliffordContext([-1, -1] + [rng.randint(1, 3) for _ in range(rng.randint(0, 3))])
    masks = ctx.basis_masks()
    a = ctx.element({m: rng.randint(-3, 3) for m in rng.sample(masks, min(3, len(masks)))})
    b = ctx.element({m: rng.randint(-3, 3) for m in rng.sample(masks, min(3, len(masks)))})
    assert (tu_map(a * b) == tu_map(a).dot(tu_map(b))).all()
    assert (tu_map(a + b) == tu_map(a) + tu_map(b)).all()
    assert (u_map(a * b) == u_map(b).dot(u_map(a))).all()


# -- P inside End(C+) --------------------------------------------------------

def test_p_embedding_rank2():
    ctx = CliffordContext([-1, -1])
    assert p_embedding(ctx, [1, 0]).tolist() == [[-1, 0], [0, 1]]
    assert not p_embedding(ctx, [0, 0]).any()


def test_p_embedding_e3_commutes_with_J():
    M = p_embedding(CTX3, [0, 0, 1])
    L = left_mult_matrix(CTX3.blade(1, 2))
    assert (M.dot(L) == L.dot(M)).all()


def test_hodge_type_examples():
    t = kuga_satake_torus(standard_period(3))
    assert hodge_type_00(np.eye(4, dtype=object), t)
    assert hodge_type_00(p_embedding(CTX3, [0, 0, 1]), t)
    assert not hodge_type_00(p_embedding(CTX3, [1, 0, 0]), t)


@settings(max_examples=15)
@given(st.integers(0, 10 ** 6), st.sampled_from([None, 2, 3]))
def test_hodge_type_iff_orthogonal_to_period(seed, D):
    rng = random.Random(seed)
    p = random_period(rng, rng.randint(3, 5), D=D)
    t = kuga_satake_torus(p)
    for i in range(p.context.n):
        e = [int(i == j) for j in range(p.context.n)]
        orth = p.pair(e, p.f1) == 0 and p.pair(e, p.f2) == 0
        assert hodge_type_00(p_embedding(p.context, e), t) == orth
    for v in picard_direct(p).basis:
        assert hodge_type_00(p_embedding(p.context, list(v)), t)


# -- Picard lattices ---------------------------------------------------------

def test_picard_standard():
    S = picard_from_period(standard_period(3))
    assert S.same_span(span([[0, 0, 1]]))


def test_picard_rational_period():
    p = K3Period(CTX3, (F(5, 4), 0, F(3, 4)), (0, 1, 0))
    S = picard_from_period(p)
    assert S.same_span(span([[3, 0, 5]]))
    assert S.gram() == [[16]]


def test_picard_sqrt2_period():
    p = K3Period(CTX3, (QuadraticNumber(0, 1, 2), 0, 1), (0, 1, 0))
    S = picard_from_period(p)
    assert S.rank == 0


def sympy_picard(p):
    """Oracle: rational nullspace of the period functionals, then saturation."""
    n = p.context.n
    rows = []
    for f in (p.f1, p.f2):
        for part in ("a", "b"):
            row = []
            for q, x in zip(p.context.q, f):
                if isinstance(x, QuadraticNumber):
                    val = x.a if part == "a" else x.b
                else:
                    val = Fraction(x) if part == "a" else 0
                row.append(sympy.Rational(q) * sympy.Rational(val.numerator, val.denominator))
            rows.append(row)
    ns = sympy.Matrix(rows).nullspace()
    vecs = []
    for v in ns:
        den = sympy.ilcm(*[sympy.fraction(x)[1] for x in v])
        vecs.append([int(x * den) for x in v])
    return SubLattice(linalg.saturation(vecs, n) if vecs else [], n, None)


@settings(max_examples=20)
@given(st.integers(0, 10 ** 6), st.integers(3, 6), st.sampled_from([None, 2, 3, 5]))
def test_picard_routes_agree(seed, n, D):
    p = random_period(random.Random(seed), n, D=D)
    a = picard_direct(p)
    b = picard_commutant(p)
    assert a.same_span(b)
    assert a.same_span(sympy_picard(p))


def _float_generic_period(ctx, prec=256):
    # square roots of distinct primes are linearly independent over Q
    primes = list(sympy.primerange(2, 200))
    with mpmath.workprec(prec):
        q = [mpmath.mpf(x) for x in ctx.q]
        pair = lambda v, w: mpmath.fsum(a * b * c for a, b, c in zip(q, v, w))

        def vec(lead, offset):
            v = [mpmath.sqrt(primes[offset + i]) / 2000 for i in range(len(q))]
            v[lead] += 1
            return v

        x = vec(0, 0)
        x = [a / mpmath.sqrt(-pair(x, x)) for a in x]
        y = vec(1, len(q))
        c = pair(x, y) / pair(x, x)
        y = [b - c * a for a, b in zip(x, y)]
        y = [a / mpmath.sqrt(-pair(y, y)) for a in y]
        return K3Period(ctx, x, y, eps=mpmath.mpf(2) ** (-prec // 2))


def test_picard_full_generic_is_zh():
    H, h, P = k3_period_lattice(1)
    ctx = CliffordContext.from_lattice(P)
    p = _float_generic_period(ctx)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", UnverifiedWarning)
        S = picard_full(H, h, p)
    assert any(issubclass(w.category, UnverifiedWarning) for w in caught)
    assert S.same_span(SubLattice([list(h)], 22, H))
    assert discriminant(S) == 2


def test_picard_full_rank3_support():
    H, h, P = k3_period_lattice(1)
    ctx = CliffordContext.from_lattice(P)
    half = QuadraticNumber(0, F(1, 2), 2)
    f1 = [half] + [0] * 20
    f2 = [0, half] + [0] * 19
    p = K3Period(ctx, f1, f2)
    S = picard_full(H, h, p)
    assert S.rank == 20
    # oracle: saturated integer kernel of the period functionals in H-coordinates
    G = sympy.Matrix(H.gram)
    V = sympy.Matrix([list(v) for v in ctx.vectors])
    F1 = V.T * sympy.Matrix([sympy.sqrt(2) / 2] + [0] * 20)
    F2 = V.T * sympy.Matrix([0, sympy.sqrt(2) / 2] + [0] * 19)
    rows = []
    for Fv in (F1, F2):
        r = (Fv.T * G).applyfunc(sympy.expand)
        rows.append([x.coeff(sympy.sqrt(2)) for x in r])
        rows.append([x.subs(sympy.sqrt(2), 0) for x in r])
    ns = sympy.Matrix(rows).nullspace()
    vecs = [[int(x * sympy.ilcm(*[sympy.fraction(y)[1] for y in v])) for x in v] for v in ns]
    oracle = SubLattice(linalg.saturation(vecs, 22), 22, H)
    assert S.same_span(oracle)
    assert S.contains(list(h))


def test_picard_cross_check_raises_on_disagreement(monkeypatch):
    p = standard_period(3)
    monkeypatch.setattr(co, "picard_commutant", lambda p, guard=None: span([[1, 0, 0]]))
    from kugasatake.exceptions import InvariantViolation

    with pytest.raises(InvariantViolation):
        picard_from_period(p)


def test_float_picard_matches_exact():
    ctx = CTX3
    with mpmath.workprec(200):
        p = K3Period(ctx, (mpmath.mpf(5) / 4, 0, mpmath.mpf(3) / 4), (0, mpmath.mpf(1), 0))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", UnverifiedWarning)
        S = picard_from_period(p)
    assert caught
    assert S.same_span(span([[3, 0, 5]]))


# -- endomorphism lattices ---------------------------------------------------

def test_commutant_rank2_cm():
    t = kuga_satake_torus(standard_period(2))
    C = commutant(t.complex_structure)
    assert C.rank == 2
    assert C.contains([[0, 1], [-1, 0]])
    assert C.contains(np.eye(2, dtype=int))


def test_wedge_family_examples():
    T = span([[1, 0, 0], [0, 1, 0]])
    W = wedge_family(CTX3, [0, 0, 1], T)
    assert W.rank == 2
    assert wedge_family(CTX3, [0, 0, 0], T).rank == 0
    t = kuga_satake_torus(standard_period(3))
    C = commutant(t.complex_structure)
    assert C.rank == 8
    assert rational_intersection_rank(W, C) == 0


@settings(max_examples=15)
@given(st.integers(0, 10 ** 6))
def test_wedge_family_disjoint_from_commutant(seed):
    rng = random.Random(seed)
    p = random_period(rng, rng.randint(3, 4))
    pic = picard_direct(p)
    if pic.rank == 0:
        return
    from kugasatake.lattice import orthogonal_complement

    L = co._diag_ambient(p.context)
    T = orthogonal_complement(L, pic)
    m = list(pic.basis[0])
    W = wedge_family(p.context, m, T)
    assert W.rank == T.rank
    C = commutant(kuga_satake_torus(p).complex_structure)
    assert rational_intersection_rank(W, C) == 0


@pytest.mark.parametrize("A,B,expected", [
    ([[1, 0, 0]], [[0, 1, 0], [0, 0, 1]], []),
    ([[2, 0]], [[0, 1]], [2]),
    ([[1, 1]], [[1, -1]], [2]),
])
def test_exclusion_primes(A, B, expected):
    assert disjointness_exclusion_primes(A, B) == expected


def test_exclusion_primes_standard_fixture():
    t = kuga_satake_torus(standard_period(3))
    W = wedge_family(CTX3, [0, 0, 1], span([[1, 0, 0], [0, 1, 0]]))
    C = commutant(t.complex_structure)
    primes = disjointness_exclusion_primes(W, C)
    assert all(sympy.isprime(x) for x in primes)


def test_top_wedge_examples():
    swap = GaloisModule(2, [[[0, 1], [1, 0]]])
    W = top_wedge_twist(swap, 2)
    assert W.rank == 1 and W.generators[0] == ((-1,),)
    W0 = top_wedge_twist(swap, 0)
    assert W0.rank == 1 and W0.generators[0] == ((1,),)


def test_wedge2_rank3_signed_permutation():
    g = [[0, 0, 1], [1, 0, 0], [0, 1, 0]]
    h = [[-1, 0, 0], [0, -1, 0], [0, 0, 1]]
    T = GaloisModule(3, [g, h])
    W = top_wedge_twist(T, 2)
    for ell in (2, 3, 5):
        for n in (1, 2):
            assert torsion_invariant_order(reduce_mod(W, ell, n)) == \
                torsion_invariant_order(reduce_mod(T, ell, n))


@given(st.integers(0, 10 ** 6))
def test_compound_matrix_multiplicative(seed):
    rng = random.Random(seed)
    r = rng.randint(2, 4)
    k = rng.randint(0, r)
    A = [[rng.randint(-3, 3) for _ in range(r)] for _ in range(r)]
    B = [[rng.randint(-3, 3) for _ in range(r)] for _ in range(r)]
    lhs = co.compound_matrix(linalg.matmul(A, B), k)
    rhs = linalg.matmul(co.compound_matrix(A, k), co.compound_matrix(B, k))
    assert lhs == rhs
