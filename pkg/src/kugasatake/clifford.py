"""Sparse arithmetic in the even Clifford algebra C+(P).

The algebra is presented on an orthogonal basis e_1..e_n of the lattice with
e_i^2 = q_i and e_i e_j = -e_j e_i.  A basis monomial e_{i1}...e_{ik}
(i1 < ... < ik) is the bitmask with bits i1-1, ..., ik-1 set.  Products use
the symmetric difference of masks; the reordering sign is the parity of
popcount(suffix_parity(a) & b), and common bits contribute their norms.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations

import numpy as np

from . import linalg
from .config import dense_guard_rank
from .densemat import ExactMatrix
from .exceptions import GuardExceeded, ValidationError
from .lattice import QuadLattice, SubLattice
from .scalars import ScalarMode, common_mode, format_scalar, parse_scalar


def suffix_parity(a: int) -> int:
    """Mask whose bit k is the parity of the bits of ``a`` above k."""
    p = a >> 1
    p ^= p >> 1
    p ^= p >> 2
    p ^= p >> 4
    p ^= p >> 8
    p ^= p >> 16
    p ^= p >> 32
    return p


def reorder_sign(a: int, b: int) -> int:
    return -1 if (suffix_parity(a) & b).bit_count() & 1 else 1


def mask_of(subset) -> int:
    m = 0
    for i in subset:
        if i < 1:
            raise ValidationError(f"basis indices start at 1, got {i}")
        bit = 1 << (i - 1)
        if m & bit:
            raise ValidationError(f"repeated index {i} in subset")
        m |= bit
    return m


def subset_of(mask: int) -> tuple[int, ...]:
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


class CliffordContext:
    """Diagonal norms q_1..q_n, optionally tied to vectors of a lattice."""

    def __init__(self, q, ambient: QuadLattice | None = None, vectors=None, index: int | None = None):
        q = tuple(q)
        if not q:
            raise ValidationError("Clifford context needs rank >= 1")
        if any(not x for x in q):
            raise ValidationError("diagonal norms must be nonzero")
        self.q = q
        self.n = len(q)
        self.mode = common_mode(q)
        self.ambient = ambient
        self.vectors = None if vectors is None else tuple(tuple(int(x) for x in v) for v in vectors)
        self.index = index
        if self.vectors is not None:
            if len(self.vectors) != self.n:
                raise ValidationError("need one vector per diagonal norm")
            if ambient is not None:
                for i, v in enumerate(self.vectors):
                    for j in range(i, self.n):
                        val = ambient.pair(v, self.vectors[j])
                        expected = q[i] if i == j else 0
                        if val != expected:
                            raise ValidationError(
                                f"vectors are not an orthogonal basis with norms q ({i + 1}, {j + 1})")
        self._unit = all(x in (1, -1) for x in q)
        self._neg_mask = sum(1 << i for i, x in enumerate(q) if x == -1)
        self._metric_cache: dict[int, object] = {0: 1}
        self._basis = None
        self._index_of = None

    # -- constructors -----------------------------------------------------
    @classmethod
    def diagonal(cls, q) -> "CliffordContext":
        return cls(q)

    @classmethod
    def from_lattice(cls, L, negative_first: bool = True) -> "CliffordContext":
        """Orthogonal basis of a lattice (or sublattice) by rational
        symmetric elimination, scaled to primitive integral vectors.

        The vectors span a finite-index sublattice; its index is recorded.
        """
        if isinstance(L, SubLattice):
            if L.ambient is None:
                raise ValidationError("sublattice has no form")
            G = L.gram()
            B = [list(b) for b in L.basis]
            ambient = L.ambient
        else:
            G = [list(r) for r in L.gram]
            B = linalg.identity(L.rank)
            ambient = L
        T = _diagonalizing_rows(G)
        rows = [linalg.scale_to_integers(t) for t in T]
        vectors = linalg.matmul(rows, B)
        q = [ambient.pair(v, v) for v in vectors]
        order = list(range(len(q)))
        if negative_first:
            order.sort(key=lambda i: (q[i] > 0, i))
        vectors = [vectors[i] for i in order]
        q = [q[i] for i in order]
        index = abs(int(linalg.det([rows[i] for i in order])))
        return cls(q, ambient, vectors, index=index)

    # -- basic data -------------------------------------------------------
    @property
    def dimension(self) -> int:
        return 1 << (self.n - 1)

    def metric(self, common: int):
        """Product of q_i over the bits of ``common``."""
        val = self._metric_cache.get(common)
        if val is None:
            val = 1
            m, i = common, 0
            while m:
                if m & 1:
                    val = val * self.q[i]
                m >>= 1
                i += 1
            self._metric_cache[common] = val
        return val

    def basis_masks(self, guard: int | None = None) -> list[int]:
        """Even masks ordered by grade, then lexicographically by subset."""
        check_dense_guard(self.n, guard)
        if self._basis is None:
            masks = []
            for k in range(0, self.n + 1, 2):
                for sub in combinations(range(1, self.n + 1), k):
                    masks.append(mask_of(sub))
            self._basis = masks
            self._index_of = {m: i for i, m in enumerate(masks)}
        return self._basis

    def basis_index(self) -> dict[int, int]:
        self.basis_masks()
        return self._index_of

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, CliffordContext):
            return NotImplemented
        return self.q == other.q and self.vectors == other.vectors

    def __hash__(self):
        return hash((self.q, self.vectors))

    def __repr__(self):
        return f"CliffordContext(q={list(self.q)})"

    # -- element constructors ---------------------------------------------
    def element(self, terms) -> "CliffordElement":
        if isinstance(terms, dict):
            items = terms.items()
        else:
            items = terms
        out = {}
        for key, c in items:
            m = key if isinstance(key, int) else mask_of(key)
            if m.bit_length() > self.n:
                raise ValidationError(f"subset {subset_of(m)} exceeds rank {self.n}")
            if c:
                out[m] = out.get(m, 0) + c
        return CliffordElement(self, out)

    def scalar(self, c) -> "CliffordElement":
        return CliffordElement(self, {0: c} if c else {})

    def one(self) -> "CliffordElement":
        return self.scalar(1)

    def blade(self, *indices) -> "CliffordElement":
        return CliffordElement(self, {mask_of(indices): 1})


def check_dense_guard(n: int, guard: int | None = None):
    limit = dense_guard_rank(guard)
    if n > limit:
        raise GuardExceeded(f"rank {n} exceeds the dense guard {limit} "
                            f"(matrices of size 2^{n - 1}); raise KS_GUARD_RANK to override")


def _diagonalizing_rows(G):
    """Rational rows T with T G T^T diagonal and nonzero diagonal."""
    n = len(G)
    A = [[Fraction(x) for x in r] for r in G]
    T = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    out = []
    active = list(range(n))
    while active:
        p = next((i for i in active if A[i][i]), None)
        if p is None:
            pair = next(((i, j) for i in active for j in active if i < j and A[i][j]), None)
            if pair is None:
                raise ValidationError("form is degenerate; no orthogonal basis")
            i, j = pair
            # replace b_i by b_i + b_j, whose norm 2 A_ij is nonzero
            A[i] = [x + y for x, y in zip(A[i], A[j])]
            for r in A:
                r[i] = r[i] + r[j]
            T[i] = [x + y for x, y in zip(T[i], T[j])]
            p = i
        piv = A[p][p]
        out.append(T[p])
        active.remove(p)
        col = {i: A[i][p] / piv for i in active}
        for i in active:
            f = col[i]
            if f:
                T[i] = [x - f * y for x, y in zip(T[i], T[p])]
        # Schur complement on the remaining block
        for i in active:
            for j in active:
                A[i][j] = A[i][j] - col[i] * A[p][j]
        for i in active:
            A[i][p] = A[p][i] = 0
    return out


# ---------------------------------------------------------------------------
# sparse products
# ---------------------------------------------------------------------------

def _mul_terms(ctx: CliffordContext, ta: dict, tb: dict) -> dict:
    out: dict[int, object] = {}
    get = out.get
    items_b = list(tb.items())
    if ctx._unit:
        neg = ctx._neg_mask
        for ma, ca in ta.items():
            pa = suffix_parity(ma)
            for mb, cb in items_b:
                m = ma ^ mb
                c = ca * cb
                if ((pa & mb).bit_count() + (ma & mb & neg).bit_count()) & 1:
                    out[m] = get(m, 0) - c
                else:
                    out[m] = get(m, 0) + c
    else:
        metric = ctx.metric
        for ma, ca in ta.items():
            pa = suffix_parity(ma)
            for mb, cb in items_b:
                m = ma ^ mb
                c = ca * cb * metric(ma & mb)
                if (pa & mb).bit_count() & 1:
                    out[m] = get(m, 0) - c
                else:
                    out[m] = get(m, 0) + c
    return {m: c for m, c in out.items() if c}


class CliffordElement:
    """Element of C+(P): sparse map from even masks to nonzero scalars."""

    __slots__ = ("ctx", "terms")

    def __init__(self, ctx: CliffordContext, terms: dict):
        for m, c in terms.items():
            if m.bit_count() & 1:
                raise ValidationError(f"odd basis subset {subset_of(m)} in an even element")
        common_mode(list(terms.values()) + list(ctx.q))
        self.ctx = ctx
        self.terms = {m: c for m, c in terms.items() if c}

    @classmethod
    def _trusted(cls, ctx: CliffordContext, terms: dict) -> "CliffordElement":
        # terms already even, nonzero and in a common mode
        el = object.__new__(cls)
        el.ctx = ctx
        el.terms = terms
        return el

    def _same(self, other: "CliffordElement"):
        if self.ctx != other.ctx:
            raise ValidationError("Clifford elements from different contexts")

    @property
    def mode(self) -> ScalarMode:
        return common_mode(list(self.terms.values()))

    def __add__(self, other):
        if not isinstance(other, CliffordElement):
            other = self.ctx.scalar(other)
        self._same(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return CliffordElement(self.ctx, out)

    __radd__ = __add__

    def __neg__(self):
        return CliffordElement(self.ctx, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, CliffordElement):
            other = self.ctx.scalar(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, CliffordElement):
            return multiply(self, other)
        return CliffordElement(self.ctx, {m: c * other for m, c in self.terms.items()})

    def __rmul__(self, other):
        return CliffordElement(self.ctx, {m: other * c for m, c in self.terms.items()})

    def __eq__(self, other):
        if isinstance(other, CliffordElement):
            if self.ctx != other.ctx:
                return False
            return (self - other).is_zero()
        if other == 0 or isinstance(other, (int, Fraction)):
            return self == self.ctx.scalar(other)
        return NotImplemented

    __hash__ = None

    def is_zero(self) -> bool:
        return not self.terms

    def scalar_part(self):
        return self.terms.get(0, 0)

    def coefficient(self, subset):
        return self.terms.get(subset if isinstance(subset, int) else mask_of(subset), 0)

    def grade_part(self, k: int) -> "CliffordElement":
        return CliffordElement(self.ctx, {m: c for m, c in self.terms.items() if m.bit_count() == k})

    def coefficients(self, guard: int | None = None) -> list:
        """Coefficient vector in the canonical basis order."""
        masks = self.ctx.basis_masks(guard)
        idx = self.ctx.basis_index()
        vec = [0] * len(masks)
        for m, c in self.terms.items():
            vec[idx[m]] = c
        return vec

    def __len__(self):
        return len(self.terms)

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, key=lambda m: (m.bit_count(), subset_of(m))):
            c = self.terms[m]
            name = "".join(f"e{i}" for i in subset_of(m)) or "1"
            parts.append(f"({c})*{name}")
        return " + ".join(parts)

    # -- serialization ----------------------------------------------------
    def to_document(self) -> dict:
        terms = []
        for m in sorted(self.terms, key=lambda m: (m.bit_count(), subset_of(m))):
            terms.append({"subset": list(subset_of(m)), "coeff": format_scalar(self.terms[m])})
        doc = {"q": [format_scalar(x) for x in self.ctx.q], "terms": terms}
        mode = self.mode
        if mode.D is not None:
            doc["D"] = mode.D
        return doc


def element_from_document(doc: dict, ctx: CliffordContext | None = None) -> CliffordElement:
    try:
        D = doc.get("D")
        mode = ScalarMode("quadratic", D=int(D)) if D is not None else ScalarMode("rational")
        if ctx is None:
            q = [parse_scalar(x, ScalarMode("rational")) for x in doc["q"]]
            ctx = CliffordContext(q)
        terms = {}
        for t in doc["terms"]:
            m = mask_of(t["subset"])
            terms[m] = terms.get(m, 0) + parse_scalar(t["coeff"], mode)
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed Clifford element document: {exc}") from exc
    return ctx.element(terms)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def multiply(a: CliffordElement, b: CliffordElement) -> CliffordElement:
    a._same(b)
    common_mode([next(iter(a.terms.values()), 0), next(iter(b.terms.values()), 0)])
    return CliffordElement._trusted(a.ctx, _mul_terms(a.ctx, a.terms, b.terms))


def _check_vector(ctx: CliffordContext, v):
    if len(v) != ctx.n:
        raise ValidationError(f"vector of length {len(v)} in a rank-{ctx.n} context")


def embed_vector_product(ctx: CliffordContext, v, w) -> CliffordElement:
    """The even element v*w for vectors given in the orthogonal basis."""
    _check_vector(ctx, v)
    _check_vector(ctx, w)
    common_mode(list(v) + list(w))
    terms = {}
    s = 0
    for i in range(ctx.n):
        if v[i] and w[i]:
            s = s + v[i] * w[i] * ctx.q[i]
    if s:
        terms[0] = s
    for i in range(ctx.n):
        for j in range(i + 1, ctx.n):
            c = v[i] * w[j] - v[j] * w[i]
            if c:
                terms[(1 << i) | (1 << j)] = c
    return CliffordElement(ctx, terms)


def wedge(ctx: CliffordContext, v, w) -> CliffordElement:
    """(vw - wv)/2, the pure bivector part of v*w."""
    _check_vector(ctx, v)
    _check_vector(ctx, w)
    common_mode(list(v) + list(w))
    terms = {}
    for i in range(ctx.n):
        for j in range(i + 1, ctx.n):
            c = v[i] * w[j] - v[j] * w[i]
            if c:
                terms[(1 << i) | (1 << j)] = c
    return CliffordElement(ctx, terms)


def vector_terms(ctx: CliffordContext, v) -> dict:
    _check_vector(ctx, v)
    return {1 << i: x for i, x in enumerate(v) if x}


def iota(a: CliffordElement) -> CliffordElement:
    """Reversal anti-involution e_{i1}...e_{ik} -> e_{ik}...e_{i1}."""
    out = {}
    for m, c in a.terms.items():
        k = m.bit_count()
        out[m] = -c if (k * (k - 1) // 2) & 1 else c
    return CliffordElement(a.ctx, out)


def trace(a: CliffordElement):
    """Trace of x -> a*x on C+; only the scalar part contributes."""
    return a.ctx.dimension * a.scalar_part()


def left_mult_matrix(a: CliffordElement, guard: int | None = None) -> np.ndarray:
    """Matrix (object dtype) of x -> a*x; column j is the image of basis j."""
    ctx = a.ctx
    masks = ctx.basis_masks(guard)
    idx = ctx.basis_index()
    N = len(masks)
    M = np.zeros((N, N), dtype=object)
    for j, mb in enumerate(masks):
        for m, c in _mul_terms(ctx, a.terms, {mb: 1}).items():
            M[idx[m], j] = c
    return M


def operator_matrix(ctx: CliffordContext, fn, guard: int | None = None) -> np.ndarray:
    """Matrix of a linear map C+ -> C+ given on sparse terms by ``fn``."""
    masks = ctx.basis_masks(guard)
    idx = ctx.basis_index()
    N = len(masks)
    M = np.zeros((N, N), dtype=object)
    for j, mb in enumerate(masks):
        for m, c in fn({mb: 1}).items():
            if m not in idx:
                raise ValidationError("operator does not preserve the even subalgebra")
            M[idx[m], j] = c
    return M


def to_exact(M: np.ndarray) -> ExactMatrix:
    return ExactMatrix.from_entries(M.tolist())


def left_mult_exact(a: CliffordElement, guard: int | None = None) -> ExactMatrix:
    return to_exact(left_mult_matrix(a, guard))
