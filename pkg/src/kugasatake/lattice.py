"""Integral quadratic lattices, sublattices and finite abelian quotients.

Sign convention, fixed here once for the whole package: the form ``Q`` is
the *negative* of the intersection form.  The K3 lattice is therefore
U(-1)^3 + E8^2 of signature (19, 3), a polarization ``h`` has
Q(h) = -2d, and the primitive lattice P = h^perp has signature (19, 2), so
the period plane spanned by f1, f2 is negative definite.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import gcd

from . import linalg
from .exceptions import DegenerateLatticeError, ValidationError
from .scalars import common_mode

__all__ = [
    "QuadLattice", "SubLattice", "FiniteAbelianGroup", "bilinear", "quadratic",
    "discriminant", "orthogonal_complement", "cokernel_of_sum", "smith_normal_form",
    "signature", "k3_period_lattice", "e8_gram", "hyperbolic_plane", "direct_sum",
    "diagonal_lattice", "primes_dividing", "content",
]

smith_normal_form = linalg.smith_normal_form


def _as_int_rows(rows) -> tuple[tuple[int, ...], ...]:
    try:
        return tuple(tuple(int(x) if not isinstance(x, Fraction) or x.denominator == 1 else _bad(x)
                           for x in r) for r in rows)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"expected an integer matrix: {exc}") from exc


def _bad(x):
    raise ValidationError(f"non-integral entry {x}")


@dataclass(frozen=True)
class QuadLattice:
    gram: tuple[tuple[int, ...], ...]
    degenerate: bool = False

    def __post_init__(self):
        gram = _as_int_rows(self.gram)
        object.__setattr__(self, "gram", gram)
        n = len(gram)
        if any(len(r) != n for r in gram):
            raise ValidationError("Gram matrix must be square")
        for i in range(n):
            for j in range(i + 1, n):
                if gram[i][j] != gram[j][i]:
                    raise ValidationError(f"Gram matrix not symmetric at ({i}, {j})")
        if not self.degenerate and n and linalg.det(gram) == 0:
            raise DegenerateLatticeError("Gram matrix is degenerate; pass degenerate=True to allow")

    @property
    def rank(self) -> int:
        return len(self.gram)

    def __len__(self):
        return self.rank

    def pair(self, v, w):
        return bilinear(self, v, w)

    def sublattice(self, basis, saturated: bool = False) -> "SubLattice":
        return SubLattice(basis, self.rank, self, saturated=saturated)

    def whole(self) -> "SubLattice":
        return SubLattice(linalg.identity(self.rank), self.rank, self, saturated=True)


def diagonal_lattice(entries) -> QuadLattice:
    n = len(entries)
    return QuadLattice([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)])


def hyperbolic_plane(sign: int = -1) -> QuadLattice:
    """U(sign): the hyperbolic plane scaled by ``sign``."""
    return QuadLattice([[0, sign], [sign, 0]])


def e8_gram() -> list[list[int]]:
    """Cartan matrix of E8 (positive definite, determinant 1)."""
    edges = [(0, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (1, 3)]
    g = [[2 if i == j else 0 for j in range(8)] for i in range(8)]
    for i, j in edges:
        g[i][j] = g[j][i] = -1
    return g


def direct_sum(*lattices: QuadLattice) -> QuadLattice:
    n = sum(L.rank for L in lattices)
    g = [[0] * n for _ in range(n)]
    off = 0
    for L in lattices:
        for i in range(L.rank):
            for j in range(L.rank):
                g[off + i][off + j] = L.gram[i][j]
        off += L.rank
    return QuadLattice(g, degenerate=any(L.degenerate for L in lattices))


@dataclass(frozen=True)
class SubLattice:
    """Sublattice of Z^n spanned by integer row vectors.

    ``ambient`` is the quadratic lattice on Z^n when there is one; Galois
    modules without an invariant form use ``ambient=None``.
    """

    basis: tuple[tuple[int, ...], ...]
    ambient_rank: int
    ambient: QuadLattice | None = None
    saturated: bool = False
    _hnf: tuple = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        basis = _as_int_rows(self.basis)
        object.__setattr__(self, "basis", basis)
        if self.ambient is not None and self.ambient.rank != self.ambient_rank:
            raise ValidationError("ambient rank mismatch")
        for b in basis:
            if len(b) != self.ambient_rank:
                raise ValidationError("basis vector has wrong length")
        if basis and linalg.rank(basis) != len(basis):
            raise ValidationError("sublattice basis is linearly dependent")

    @property
    def rank(self) -> int:
        return len(self.basis)

    def gram(self) -> list[list[int]]:
        if self.ambient is None:
            raise ValidationError("sublattice has no ambient form")
        G = self.ambient.gram
        BG = linalg.matmul([list(b) for b in self.basis], [list(r) for r in G])
        return linalg.matmul(BG, linalg.transpose([list(b) for b in self.basis])) if self.basis else []

    def as_lattice(self) -> QuadLattice:
        return QuadLattice(self.gram(), degenerate=True)

    def hnf(self):
        if self._hnf is None:
            object.__setattr__(self, "_hnf", tuple(map(tuple, linalg.hermite_normal_form(self.basis))))
        return self._hnf

    def same_span(self, other: "SubLattice") -> bool:
        return self.ambient_rank == other.ambient_rank and self.hnf() == other.hnf()

    def contains(self, v) -> bool:
        return linalg.solve_in_lattice(self.basis, list(v)) is not None

    def saturate(self) -> "SubLattice":
        if self.saturated:
            return self
        sat = linalg.saturation(self.basis, self.ambient_rank) if self.basis else []
        return SubLattice(sat, self.ambient_rank, self.ambient, saturated=True)

    def index_in_saturation(self) -> int:
        if not self.basis:
            return 1
        return reduce(lambda x, y: x * y, linalg.elementary_divisors(self.basis), 1)

    def __add__(self, other: "SubLattice") -> "SubLattice":
        rows = [list(b) for b in self.basis] + [list(b) for b in other.basis]
        H = linalg.hermite_normal_form(rows) if rows else []
        return SubLattice(H, self.ambient_rank, self.ambient)


@dataclass(frozen=True)
class FiniteAbelianGroup:
    invariant_factors: tuple[int, ...] = ()

    def __post_init__(self):
        f = tuple(int(x) for x in self.invariant_factors)
        for x in f:
            if x < 2:
                raise ValidationError(f"invariant factors must be >= 2, got {x}")
        for a, b in zip(f, f[1:]):
            if b % a:
                raise ValidationError(f"invariant factors must form a divisibility chain: {f}")
        object.__setattr__(self, "invariant_factors", f)

    @classmethod
    def from_diagonal(cls, entries) -> "FiniteAbelianGroup":
        """Group presented as a product of Z/d for the given d (any order)."""
        entries = [abs(int(d)) for d in entries]
        if any(d == 0 for d in entries):
            raise ValidationError("presentation has a free part")
        # normalise to a divisibility chain through the prime decomposition
        from sympy import factorint

        by_prime: dict[int, list[int]] = {}
        for d in entries:
            for p, e in factorint(d).items():
                by_prime.setdefault(p, []).append(e)
        length = max((len(v) for v in by_prime.values()), default=0)
        factors = [1] * length
        for p, exps in by_prime.items():
            exps = sorted(exps)
            exps = [0] * (length - len(exps)) + exps
            for i, e in enumerate(exps):
                factors[i] *= p ** e
        return cls(tuple(f for f in factors if f > 1))

    @property
    def order(self) -> int:
        out = 1
        for f in self.invariant_factors:
            out *= f
        return out

    def is_trivial(self) -> bool:
        return not self.invariant_factors

    def primary_part(self, p: int) -> "FiniteAbelianGroup":
        parts = []
        for f in self.invariant_factors:
            q = 1
            while f % p == 0:
                f //= p
                q *= p
            if q > 1:
                parts.append(q)
        return FiniteAbelianGroup(tuple(parts))

    def exponent(self) -> int:
        return self.invariant_factors[-1] if self.invariant_factors else 1

    def __str__(self):
        if not self.invariant_factors:
            return "0"
        return " + ".join(f"Z/{f}" for f in self.invariant_factors)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def _check_len(L: QuadLattice, v):
    if len(v) != L.rank:
        raise ValidationError(f"vector of length {len(v)} in a rank-{L.rank} lattice")


def bilinear(L: QuadLattice, v, w):
    """Q(v, w) = v^T gram w, exact in the common scalar mode of v and w."""
    _check_len(L, v)
    _check_len(L, w)
    common_mode(list(v) + list(w))
    G = L.gram
    total = 0
    for i, vi in enumerate(v):
        if not vi:
            continue
        row = G[i]
        acc = 0
        for j, wj in enumerate(w):
            g = row[j]
            if g and wj:
                acc = acc + g * wj
        if acc:
            total = total + vi * acc
    return total


def quadratic(L: QuadLattice, v):
    return bilinear(L, v, v)


def discriminant(L) -> int:
    """|det gram| of a lattice or of the restriction to a sublattice."""
    gram = L.gram() if isinstance(L, SubLattice) else L.gram
    if isinstance(L, SubLattice) and L.rank == 0:
        return 1
    d = linalg.det(gram)
    if d == 0:
        raise DegenerateLatticeError("discriminant of a degenerate lattice")
    return abs(int(d))


def orthogonal_complement(L: QuadLattice, S: SubLattice) -> SubLattice:
    """Saturated kernel of v -> (Q(v, s_i))_i."""
    if S.ambient_rank != L.rank:
        raise ValidationError("sublattice is not in this lattice")
    if not S.basis:
        return L.whole()
    rows = linalg.matmul([list(b) for b in S.basis], [list(r) for r in L.gram])
    K = linalg.integer_kernel(rows, L.rank)
    comp = SubLattice(K, L.rank, L, saturated=True)
    if K and S.basis:
        stacked = [list(b) for b in S.basis] + [list(k) for k in K]
        if linalg.rank(stacked) < len(stacked):
            warnings.warn("restriction of the form to the sublattice is degenerate; "
                          "the orthogonal complement is not complementary", stacklevel=2)
    return comp


def cokernel_of_sum(L: QuadLattice, S: SubLattice, T: SubLattice) -> FiniteAbelianGroup:
    """Invariant factors of L / (S + T)."""
    stacked = [list(b) for b in S.basis] + [list(b) for b in T.basis]
    if not stacked or linalg.rank(stacked) < L.rank:
        raise ValidationError("S + T does not have full rank in L")
    divisors = linalg.elementary_divisors(stacked)
    return FiniteAbelianGroup(tuple(d for d in divisors if d > 1))


def signature(L: QuadLattice) -> tuple[int, int]:
    """(positive, negative) inertia by symmetric Gaussian elimination over Q."""
    A = [[Fraction(x) for x in r] for r in L.gram]
    pos = neg = 0
    while A:
        n = len(A)
        p = next((i for i in range(n) if A[i][i]), None)
        if p is None:
            pair = next(((i, j) for i in range(n) for j in range(i + 1, n) if A[i][j]), None)
            if pair is None:
                raise DegenerateLatticeError("signature of a degenerate lattice")
            i, j = pair
            # congruence e_i -> e_i + e_j makes the diagonal entry 2*A[i][j]
            A[i] = [x + y for x, y in zip(A[i], A[j])]
            for r in A:
                r[i] = r[i] + r[j]
            p = i
        piv = A[p][p]
        if piv > 0:
            pos += 1
        else:
            neg += 1
        rest = [k for k in range(n) if k != p]
        A = [[A[i][j] - A[i][p] * A[p][j] / piv for j in rest] for i in rest]
    return pos, neg


def k3_period_lattice(d: int):
    """(H, h, P) for primitively polarized K3 surfaces of degree 2d.

    H = U(-1)^3 + E8^2 with coordinates (e, f) on the first hyperbolic
    plane, h = e + d f with Q(h) = -2d, and P = h^perp of rank 21.
    """
    if int(d) < 1:
        raise ValidationError("degree parameter d must be >= 1")
    d = int(d)
    U = hyperbolic_plane(-1)
    E8 = QuadLattice(e8_gram())
    H = direct_sum(U, U, U, E8, E8)
    h = [1, d] + [0] * 20
    basis = [[1, -d] + [0] * 20] + [[int(i == j) for j in range(22)] for i in range(2, 22)]
    P = SubLattice(basis, 22, H, saturated=True)
    return H, tuple(h), P


def primes_dividing(n: int) -> list[int]:
    from sympy import primefactors

    return sorted(primefactors(abs(int(n)))) if n else []


def content(v) -> int:
    g = 0
    for x in v:
        g = gcd(g, int(x))
    return g
