"""Finite matrix groups acting on lattices, their invariants and H^1.

Vectors are columns: g acts on x in Z^r by x -> g x.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from . import howell, linalg
from .config import DEFAULT_CLOSURE_BOUND
from .exceptions import GuardExceeded, InvariantViolation, ValidationError
from .lattice import FiniteAbelianGroup, QuadLattice, SubLattice

Matrix = tuple  # tuple of row tuples


def _freeze(M) -> Matrix:
    return tuple(tuple(int(x) for x in r) for r in M)


def _mul(A: Matrix, B: Matrix) -> Matrix:
    Bt = tuple(zip(*B))
    return tuple(tuple(sum(a * b for a, b in zip(row, col)) for col in Bt) for row in A)


def _identity(r: int) -> Matrix:
    return tuple(tuple(int(i == j) for j in range(r)) for i in range(r))


def _minus_identity(g: Matrix) -> list[list[int]]:
    return [[x - (i == j) for j, x in enumerate(row)] for i, row in enumerate(g)]


def group_closure(generators, bound: int = DEFAULT_CLOSURE_BOUND) -> list[Matrix]:
    """All products of the generators, identity first, in BFS order."""
    gens = [_freeze(g) for g in generators]
    if not gens:
        raise ValidationError("need at least one generator (pass the identity for the trivial group)")
    r = len(gens[0])
    for g in gens:
        if len(g) != r or any(len(row) != r for row in g):
            raise ValidationError("generators must be square matrices of one size")
    e = _identity(r)
    seen = {e: 0}
    order = [e]
    queue = deque([e])
    while queue:
        h = queue.popleft()
        for s in gens:
            x = _mul(h, s)
            if x not in seen:
                if len(order) >= bound:
                    raise GuardExceeded(f"group closure exceeds {bound} elements; "
                                        "the group may be infinite")
                seen[x] = len(order)
                order.append(x)
                queue.append(x)
    return order


class GaloisModule:
    """Z^rank with a finite group generated by integer matrices."""

    def __init__(self, rank: int, generators, gram=None, closure_bound: int = DEFAULT_CLOSURE_BOUND):
        self.rank = int(rank)
        gens = [_freeze(g) for g in generators] or [_identity(self.rank)]
        for g in gens:
            if len(g) != self.rank or any(len(row) != self.rank for row in g):
                raise ValidationError("generator size does not match the rank")
            if abs(linalg.det([list(r) for r in g])) != 1:
                raise ValidationError("generators must be invertible over Z")
        self.generators = tuple(gens)
        self.gram = None
        if gram is not None:
            L = gram if isinstance(gram, QuadLattice) else QuadLattice(gram)
            if L.rank != self.rank:
                raise ValidationError("gram size does not match the rank")
            G = L.gram
            for g in gens:
                if _mul(_mul(tuple(zip(*g)), G), g) != G:
                    raise ValidationError("generator does not preserve the form")
            self.gram = G
        self.closure_bound = closure_bound
        self._elements = None

    @property
    def lattice(self) -> QuadLattice | None:
        return QuadLattice(self.gram) if self.gram is not None else None

    def elements(self) -> list[Matrix]:
        if self._elements is None:
            self._elements = group_closure(self.generators, self.closure_bound)
        return self._elements

    @property
    def order(self) -> int:
        return len(self.elements())

    def stacked_difference(self) -> list[list[int]]:
        rows = []
        for g in self.generators:
            rows.extend(_minus_identity(g))
        return rows

    def is_stable(self, S: SubLattice) -> bool:
        try:
            self.restrict(S)
        except ValidationError:
            return False
        return True

    def restrict(self, S: SubLattice) -> "GaloisModule":
        """Action on a Gamma-stable sublattice in the coordinates of its basis."""
        B = [list(b) for b in S.basis]
        k = len(B)
        if k == 0:
            return GaloisModule(0, [()], None, self.closure_bound)
        gens = []
        for g in self.generators:
            cols = []
            for b in B:
                image = [sum(g[i][j] * b[j] for j in range(self.rank)) for i in range(self.rank)]
                c = linalg.solve_in_lattice(B, image)
                if c is None:
                    raise ValidationError("sublattice is not stable under the group")
                cols.append(c)
            gens.append([[cols[j][i] for j in range(k)] for i in range(k)])
        gram = None
        if self.gram is not None:
            gram = linalg.matmul(linalg.matmul(B, [list(r) for r in self.gram]), linalg.transpose(B))
            if linalg.det(gram) == 0:
                gram = None
        return GaloisModule(k, gens, gram, self.closure_bound)

    def acts_trivially_on(self, S: SubLattice) -> bool:
        for g in self.generators:
            for b in S.basis:
                image = tuple(sum(g[i][j] * b[j] for j in range(self.rank)) for i in range(self.rank))
                if image != tuple(b):
                    return False
        return True

    def to_document(self) -> dict:
        doc = {"rank": self.rank, "generators": [[list(r) for r in g] for g in self.generators]}
        if self.gram is not None:
            doc["gram"] = [list(r) for r in self.gram]
        return doc

    def __repr__(self):
        return f"GaloisModule(rank={self.rank}, generators={len(self.generators)})"


@dataclass(frozen=True)
class TorsionModule:
    modulus: int
    rank: int
    actions: tuple

    def __post_init__(self):
        acts = tuple(tuple(tuple(int(x) % self.modulus for x in r) for r in g) for g in self.actions)
        object.__setattr__(self, "actions", acts)
        for g in acts:
            if len(g) != self.rank:
                raise ValidationError("action size does not match the rank")
            if self.rank and self.modulus > 1:
                d = int(linalg.det([list(r) for r in g]))
                if _gcd(d, self.modulus) != 1:
                    raise ValidationError("action is not invertible modulo the modulus")

    @property
    def order(self) -> int:
        return self.modulus ** self.rank


def _gcd(a, b):
    from math import gcd

    return gcd(a, b)


def invariants(M: GaloisModule) -> SubLattice:
    """Saturated sublattice M^Gamma."""
    ambient = M.lattice
    if M.rank == 0:
        return SubLattice((), 0, None, saturated=True)
    K = linalg.integer_kernel(M.stacked_difference(), M.rank)
    return SubLattice(K, M.rank, ambient, saturated=True)


def reduce_mod(M, ell: int, n: int = 1) -> TorsionModule:
    """M / ell^n with the reduced action."""
    if n < 1 or ell < 2:
        raise ValidationError("need a prime ell and n >= 1")
    if isinstance(M, TorsionModule):
        return TorsionModule(ell ** n, M.rank, M.actions)
    return TorsionModule(ell ** n, M.rank, M.generators)


def torsion_invariant_order(T: TorsionModule) -> int:
    """|(Z/N)^r ^ Gamma| via the Howell form of the stacked g - I."""
    if T.rank == 0:
        return 1
    rows = []
    for g in T.actions:
        rows.extend(_minus_identity(g))
    return howell.kernel_size(rows, T.modulus, T.rank)


# ---------------------------------------------------------------------------
# first cohomology
# ---------------------------------------------------------------------------

def cocycle_lattice(M: GaloisModule):
    """Cocycles as vectors (c(s_1), ..., c(s_k)) on the generators.

    A cocycle is determined by its values on generators; propagating along
    the BFS tree of the closure gives c(g) as an integer matrix applied to
    the unknowns, and the cocycle identity c(g s) = c(g) + g c(s) for every
    element g and generator s cuts out the cocycle lattice.
    """
    r = M.rank
    gens = list(M.generators)
    k = len(gens)
    nvar = k * r
    elements = M.elements()
    # A[g]: r x nvar matrix with c(g) = A[g] x
    A = {elements[0]: [[0] * nvar for _ in range(r)]}
    queue = deque([elements[0]])
    constraints = []
    visited_edges = []
    while queue:
        h = queue.popleft()
        for si, s in enumerate(gens):
            x = _mul(h, s)
            # c(h s) = c(h) + h c(s); c(s) picks unknowns si*r .. si*r + r - 1
            val = [list(row) for row in A[h]]
            for i in range(r):
                for j in range(r):
                    if h[i][j]:
                        val[i][si * r + j] += h[i][j]
            if x not in A:
                A[x] = val
                queue.append(x)
            else:
                visited_edges.append((x, val))
    for x, val in visited_edges:
        for i in range(r):
            row = [a - b for a, b in zip(A[x][i], val[i])]
            if any(row):
                constraints.append(row)
    if constraints:
        Z = linalg.integer_kernel(constraints, nvar)
    else:
        Z = linalg.identity(nvar)
    return Z


def h1(M: GaloisModule) -> FiniteAbelianGroup:
    """H^1(Gamma, M) as cocycles on generators modulo coboundaries."""
    r = M.rank
    if r == 0:
        return FiniteAbelianGroup(())
    Z = cocycle_lattice(M)
    if not Z:
        return FiniteAbelianGroup(())
    gens = list(M.generators)
    # coboundary of the basis vector e_j: c(s) = s e_j - e_j
    Bd = []
    for j in range(r):
        vec = []
        for s in gens:
            vec.extend(s[i][j] - (i == j) for i in range(r))
        Bd.append(vec)
    Y = []
    for b in Bd:
        c = linalg.solve_in_lattice(Z, b)
        if c is None:
            raise InvariantViolation("coboundary is not a cocycle")
        Y.append(c)
    divs = linalg.elementary_divisors(Y) if any(any(row) for row in Y) else []
    if len(divs) != len(Z):
        raise InvariantViolation("H^1 of a finite group came out infinite")
    return FiniteAbelianGroup(tuple(d for d in divs if d > 1))


def h1_cyclic(sigma, order: int | None = None) -> FiniteAbelianGroup:
    """ker(N) / im(sigma - 1) for the cyclic group generated by sigma."""
    g = _freeze(sigma)
    r = len(g)
    if r == 0:
        return FiniteAbelianGroup(())
    powers = group_closure([g])
    if order is not None and len(powers) != order:
        raise ValidationError(f"sigma has order {len(powers)}, not {order}")
    Nrm = [[sum(p[i][j] for p in powers) for j in range(r)] for i in range(r)]
    K = linalg.integer_kernel(Nrm, r) if any(any(row) for row in Nrm) else linalg.identity(r)
    if not K:
        return FiniteAbelianGroup(())
    D = _minus_identity(g)
    images = [[D[i][j] for i in range(r)] for j in range(r)]
    Y = []
    for v in images:
        c = linalg.solve_in_lattice(K, v)
        if c is None:
            raise InvariantViolation("im(sigma - 1) is not inside ker(N)")
        Y.append(c)
    divs = linalg.elementary_divisors(Y) if any(any(row) for row in Y) else []
    if len(divs) != len(K):
        raise InvariantViolation("cyclic H^1 came out infinite")
    return FiniteAbelianGroup(tuple(d for d in divs if d > 1))


def module_from_document(doc: dict, closure_bound: int = DEFAULT_CLOSURE_BOUND):
    """Read {"rank", "gram"?, "generators", "pic_basis"?} into (module, pic)."""
    try:
        r = int(doc["rank"])
        gens = doc["generators"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed Galois setup document: {exc}") from exc
    gram = doc.get("gram")
    M = GaloisModule(r, gens, gram, closure_bound)
    pic = None
    if "pic_basis" in doc:
        pic = SubLattice(doc["pic_basis"], r, M.lattice)
    return M, pic
