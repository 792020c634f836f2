"""P inside End(C+(P)), Hodge type (0,0), and Picard lattices from periods.

Conventions: tu(c) is left multiplication by c on H_1 = C+(P); u(c) is its
transpose.  Vectors of P are written in the orthogonal basis of the
Clifford context.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from itertools import combinations
from math import comb

import flint
import mpmath
import numpy as np

from . import clifford as cl
from . import linalg
from .clifford import CliffordContext, CliffordElement
from .config import DEFAULT_BINOMIAL_GUARD
from .densemat import ExactMatrix
from .exceptions import GuardExceeded, InvariantViolation, ValidationError
from .galois import GaloisModule
from .kuga_satake import K3Period, PolarizedTorus, i_action_matrix
from .lattice import QuadLattice, SubLattice, primes_dividing
from .scalars import FLOAT, rational_parts


class UnverifiedWarning(UserWarning):
    """A float-mode result that was not re-checked exactly."""


def u_map(c: CliffordElement, guard: int | None = None) -> np.ndarray:
    return cl.left_mult_matrix(c, guard).T.copy()


def tu_map(c: CliffordElement, guard: int | None = None) -> np.ndarray:
    return cl.left_mult_matrix(c, guard)


def p_embedding(ctx: CliffordContext, v, guard: int | None = None) -> np.ndarray:
    """Matrix of y -> v y e1 on C+."""
    vt = cl.vector_terms(ctx, v)
    e1 = {1: 1}
    return cl.operator_matrix(ctx, lambda y: cl._mul_terms(ctx, cl._mul_terms(ctx, vt, y), e1), guard)


def _as_exact(m):
    if isinstance(m, ExactMatrix):
        return m
    return ExactMatrix.from_entries(np.asarray(m, dtype=object).tolist())


def hodge_type_00(m, t: PolarizedTorus, eps=None) -> bool:
    """Whether m commutes with the complex structure of t."""
    c = t.complex_structure
    if isinstance(c, ExactMatrix):
        M = _as_exact(m)
        if M.shape != c.shape:
            raise ValidationError("matrix size does not match the torus")
        return (M @ c) == (c @ M)
    eps = t.period.eps if eps is None else eps
    M = np.array([[float(x) for x in row] for row in np.asarray(m, dtype=object)])
    C = np.array([[float(x) for x in row] for row in c])
    if M.shape != C.shape:
        raise ValidationError("matrix size does not match the torus")
    warnings.warn("hodge type decided in float mode", UnverifiedWarning, stacklevel=2)
    return bool(np.abs(M @ C - C @ M).max() <= float(eps) * 64 * len(C))


# ---------------------------------------------------------------------------
# Picard lattices
# ---------------------------------------------------------------------------

def _diag_ambient(ctx: CliffordContext) -> QuadLattice | None:
    if all(isinstance(q, int) for q in ctx.q):
        return QuadLattice([[q if i == j else 0 for j in range(ctx.n)] for i, q in enumerate(ctx.q)])
    return None


def _split_rows(rows):
    """Rational and sqrt(D) parts of each exact row, as separate rows."""
    out = []
    for row in rows:
        a = []
        b = []
        for x in row:
            pa, pb = rational_parts(x)
            a.append(pa)
            b.append(pb)
        if any(a):
            out.append(a)
        if any(b):
            out.append(b)
    return out


def _kernel_sublattice(rows, ctx: CliffordContext) -> SubLattice:
    n = ctx.n
    rows = _split_rows(rows)
    K = linalg.integer_kernel(rows, n) if rows else linalg.identity(n)
    return SubLattice(K, n, _diag_ambient(ctx), saturated=True)


def picard_direct(p: K3Period) -> SubLattice:
    """Integer kernel of v -> (Q(v, f1), Q(v, f2))."""
    if not p.exact:
        raise ValidationError("exact period required")
    ctx = p.context
    rows = [[q * f for q, f in zip(ctx.q, p.f1)], [q * f for q, f in zip(ctx.q, p.f2)]]
    return _kernel_sublattice(rows, ctx)


def picard_commutant(p: K3Period, guard: int | None = None) -> SubLattice:
    """{v : p_embedding(v) commutes with the complex structure}."""
    if not p.exact:
        raise ValidationError("exact period required")
    ctx = p.context
    c = i_action_matrix(p, guard=guard)
    cols = []
    for i in range(ctx.n):
        e = [0] * ctx.n
        e[i] = 1
        P = ExactMatrix.from_entries(p_embedding(ctx, e, guard).tolist())
        comm = (c @ P - P @ c).entries()
        cols.append(comm.ravel().tolist())
    rows = [list(r) for r in zip(*cols) if any(r)]
    return _kernel_sublattice(rows, ctx)


@dataclass
class PicardCandidates:
    lattice: SubLattice
    verified: bool
    residuals: list


def picard_relations(p: K3Period, quality_bits: int | None = None) -> PicardCandidates:
    """Integer relations among (q_i f1_i, q_i f2_i) found by LLL (float mode)."""
    ctx = p.context
    n = ctx.n
    prec = p.mode.precision_bits or mpmath.mp.prec
    bits = quality_bits if quality_bits is not None else max(20, prec // 2)
    with mpmath.workprec(prec):
        w1 = [mpmath.mpf(q) * f for q, f in zip(ctx.q, p.f1)]
        w2 = [mpmath.mpf(q) * f for q, f in zip(ctx.q, p.f2)]
        scale = mpmath.mpf(2) ** bits
        rows = []
        for i in range(n):
            row = [int(i == j) for j in range(n)]
            row.append(int(mpmath.nint(w1[i] * scale)))
            row.append(int(mpmath.nint(w2[i] * scale)))
            rows.append(row)
        R = linalg.lll_reduce(rows)
        found = []
        residuals = []
        limit = mpmath.mpf(2) ** (bits // 4)
        for r in R:
            v = r[:n]
            if not any(v) or max(abs(x) for x in v) > limit:
                continue
            r1 = abs(mpmath.fsum(a * b for a, b in zip(v, w1)))
            r2 = abs(mpmath.fsum(a * b for a, b in zip(v, w2)))
            if max(r1, r2) <= p.eps:
                found.append(v)
                residuals.append(float(max(r1, r2)))
    B = linalg.saturation(found, n) if found else []
    return PicardCandidates(SubLattice(B, n, _diag_ambient(ctx), saturated=True), False, residuals)


def picard_from_period(p: K3Period, cross_check: bool = True, guard: int | None = None) -> SubLattice:
    """Saturated Picard sublattice of the diagonal lattice.

    Exact periods use the direct kernel and, when the dense matrices fit the
    guard and ``cross_check`` is set, assert equality with the commutant
    route.  Float periods return LLL candidates with an UnverifiedWarning.
    """
    if p.mode.kind == FLOAT:
        res = picard_relations(p)
        warnings.warn("Picard lattice from float period is a candidate only", UnverifiedWarning,
                      stacklevel=2)
        return res.lattice
    direct = picard_direct(p)
    if cross_check:
        try:
            via = picard_commutant(p, guard)
        except GuardExceeded:
            return direct
        if not via.same_span(direct):
            raise InvariantViolation("commutant and direct Picard computations disagree")
    return direct


def picard_full(H: QuadLattice, h, p: K3Period, cross_check: bool = False) -> SubLattice:
    """Saturation of Z h + Pic(P) inside H.

    The period's context must come from CliffordContext.from_lattice(P), so
    that its orthogonal vectors are recorded in H-coordinates.
    """
    ctx = p.context
    if ctx.vectors is None or len(ctx.vectors[0]) != H.rank:
        raise ValidationError("period context must carry its vectors in H-coordinates")
    if p.mode.kind == FLOAT:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", UnverifiedWarning)
            inner = picard_from_period(p)
        warnings.warn("Picard lattice from float period is a candidate only", UnverifiedWarning,
                      stacklevel=2)
    else:
        inner = picard_from_period(p, cross_check=cross_check)
    V = [list(v) for v in ctx.vectors]
    rows = [list(h)] + [linalg.matmul([list(k)], V)[0] for k in inner.basis]
    B = linalg.saturation(rows, H.rank)
    return SubLattice(B, H.rank, H, saturated=True)


# ---------------------------------------------------------------------------
# endomorphism lattices
# ---------------------------------------------------------------------------

class EndoLattice:
    """Sublattice of square integer matrices, stored as flattened HNF rows."""

    def __init__(self, size: int, matrices=(), flat=None):
        self.size = int(size)
        if flat is None:
            flat = [np.asarray(m, dtype=object).ravel().tolist() for m in matrices]
        rows = [[int(x) for x in r] for r in flat]
        for r in rows:
            if len(r) != self.size * self.size:
                raise ValidationError("matrix has the wrong size")
        self.basis = linalg.hermite_normal_form(rows) if rows else []

    @property
    def rank(self) -> int:
        return len(self.basis)

    def matrices(self) -> list[list[list[int]]]:
        N = self.size
        return [[r[i * N:(i + 1) * N] for i in range(N)] for r in self.basis]

    def contains(self, m) -> bool:
        v = np.asarray(m, dtype=object).ravel().tolist()
        return linalg.solve_in_lattice(self.basis, v) is not None if self.basis else not any(v)

    def __repr__(self):
        return f"EndoLattice(size={self.size}, rank={self.rank})"


def commutant(c, guard: int | None = None) -> EndoLattice:
    """Integer matrices X with X c = c X."""
    C = c.entries() if isinstance(c, ExactMatrix) else np.asarray(c, dtype=object)
    N = C.shape[0]
    rows = []
    for i in range(N):
        for j in range(N):
            row = [0] * (N * N)
            # (X c - c X)_{ij} = sum_k X_ik c_kj - c_ik X_kj
            for k in range(N):
                row[i * N + k] += C[k, j]
                row[k * N + j] -= C[i, k]
            rows.append(row)
    rows = _split_rows(rows)
    K = linalg.integer_kernel(rows, N * N) if rows else linalg.identity(N * N)
    return EndoLattice(N, flat=K)


def wedge_family(ctx: CliffordContext, m, T, guard: int | None = None) -> EndoLattice:
    """Span of left multiplication by m ^ t for t in a basis of T."""
    basis = T.basis if isinstance(T, SubLattice) else T
    mats = []
    for t in basis:
        w = cl.wedge(ctx, m, list(t))
        mats.append(cl.left_mult_matrix(w, guard))
    N = ctx.dimension
    mats = [M for M in mats if any(x for x in M.ravel())]
    flat = [M.ravel().tolist() for M in mats]
    for r in flat:
        for x in r:
            if getattr(x, "denominator", 1) != 1:
                raise ValidationError("wedge family needs integral vectors")
    return EndoLattice(N, flat=[[int(x) for x in r] for r in flat])


def _rows(A):
    if isinstance(A, EndoLattice):
        return [list(r) for r in A.basis]
    if isinstance(A, SubLattice):
        return [list(r) for r in A.basis]
    return [list(np.asarray(r, dtype=object).ravel()) for r in A]


def rational_intersection_rank(A, B) -> int:
    a, b = _rows(A), _rows(B)
    if not a or not b:
        return 0
    return linalg.rank(a) + linalg.rank(b) - linalg.rank(a + b)


def disjointness_exclusion_primes(A, B) -> list[int]:
    """Primes where A/ell + B/ell fails to inject into the ambient lattice mod ell."""
    a, b = _rows(A), _rows(B)
    stacked = a + b
    if not stacked:
        return []
    if linalg.rank(stacked) < len(stacked):
        raise ValidationError("lattices intersect over Q (or a basis is dependent)")
    primes = set()
    for d in linalg.elementary_divisors(stacked):
        if d > 1:
            primes.update(primes_dividing(d))
    return sorted(primes)


# ---------------------------------------------------------------------------
# exterior powers
# ---------------------------------------------------------------------------

def compound_matrix(g, k: int) -> list[list[int]]:
    """Matrix of wedge^k g on the basis e_I, I ranging over k-subsets in lex order."""
    r = len(g)
    subsets = list(combinations(range(r), k))
    if k == 0:
        return [[1]]
    G = flint.fmpz_mat([list(row) for row in g])
    out = [[0] * len(subsets) for _ in subsets]
    for b, J in enumerate(subsets):
        for a, I in enumerate(subsets):
            sub = flint.fmpz_mat([[int(G[i, j]) for j in J] for i in I])
            out[a][b] = int(sub.det())
    return out


def top_wedge_twist(M: GaloisModule, k: int, guard: int = DEFAULT_BINOMIAL_GUARD) -> GaloisModule:
    """wedge^k of the module with the induced action."""
    r = M.rank
    if not 0 <= k <= r:
        raise ValidationError(f"need 0 <= k <= {r}")
    size = comb(r, k)
    if size > guard:
        raise GuardExceeded(f"wedge^{k} of rank {r} has rank {size} > {guard}")
    gens = [compound_matrix(g, k) for g in M.generators]
    return GaloisModule(size, gens, None, M.closure_bound)


def wedge_dual_twist(M: GaloisModule, guard: int = DEFAULT_BINOMIAL_GUARD) -> GaloisModule:
    """wedge^(r-1) T tensored with the determinant character."""
    r = M.rank
    W = top_wedge_twist(M, r - 1, guard)
    gens = []
    for g, w in zip(M.generators, W.generators):
        d = int(linalg.det([list(row) for row in g]))
        gens.append([[d * x for x in row] for row in w])
    return GaloisModule(W.rank, gens, None, M.closure_bound)
