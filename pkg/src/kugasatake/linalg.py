"""Exact integer and rational linear algebra.

Matrices are lists of row lists of Python ints (arbitrary precision).  No
modular shortcuts are used, so nothing can silently overflow.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm

import flint


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, s, t) with s*a + t*b = g = gcd(a, b) >= 0."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        return -a, -s0, -t0
    return a, s0, t0


def as_int_matrix(M) -> list[list[int]]:
    rows = [list(r) for r in M]
    out = []
    for r in rows:
        row = []
        for x in r:
            if isinstance(x, Fraction):
                if x.denominator != 1:
                    raise ValueError(f"non-integral entry {x}")
                x = x.numerator
            row.append(int(x))
        out.append(row)
    return out


def identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def transpose(M):
    return [list(c) for c in zip(*M)] if M else []


def matmul(A, B):
    if not A:
        return []
    Bt = transpose(B)
    if not Bt:
        return [[] for _ in A]
    return [[sum(x * y for x, y in zip(row, col)) for col in Bt] for row in A]


def matvec(A, v):
    return [sum(x * y for x, y in zip(row, v)) for row in A]


def scale_to_integers(row) -> list[int]:
    """Positive multiple of a rational row with coprime integer entries."""
    den = 1
    for x in row:
        den = lcm(den, Fraction(x).denominator)
    ints = [int(Fraction(x) * den) for x in row]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g > 1:
        ints = [x // g for x in ints]
    return ints


# ---------------------------------------------------------------------------
# Smith normal form
# ---------------------------------------------------------------------------

def smith_normal_form(M, transforms: bool = True):
    """Smith normal form with unimodular transforms.

    Returns ``(U, D, V)`` with ``U*M*V == D``; ``D`` is diagonal with
    nonnegative entries, each dividing the next (zeros last).  With
    ``transforms=False`` the transforms are returned as ``None``.
    """
    U, D, V, _ = _snf(M, left=transforms, right=transforms, right_inverse=False)
    return U, D, V


def _hnf_with_transform(A: list[list[int]]):
    """Row HNF ``H`` of ``A`` and unimodular ``T`` with ``T*A == H``."""
    m = len(A)
    n = len(A[0]) if m else 0
    aug = [list(A[i]) + [int(i == j) for j in range(m)] for i in range(m)]
    H = flint.fmpz_mat(aug).hnf() if m else None
    rows = [[int(x) for x in r] for r in H.tolist()] if m else []
    return [r[:n] for r in rows], [r[n:] for r in rows]


def _is_diagonal(A) -> bool:
    return all(not x or i == j for i, r in enumerate(A) for j, x in enumerate(r))


def _snf(M, left=True, right=True, right_inverse=False):
    A = as_int_matrix(M)
    m = len(A)
    n = len(A[0]) if m else 0
    U = identity(m)
    V = identity(n)
    if m and n:
        # alternate row and column Hermite forms until diagonal; HNF keeps
        # both the matrix and the transforms reduced
        while not _is_diagonal(A):
            A, T = _hnf_with_transform(A)
            U = matmul(T, U)
            if _is_diagonal(A):
                break
            At, T = _hnf_with_transform(transpose(A))
            A = transpose(At)
            V = matmul(V, transpose(T))
        U2, A, V2 = _diagonal_snf(A)
        U = matmul(U2, U)
        V = matmul(V, V2)
    Vi = None
    if right_inverse:
        Vi = _unimodular_inverse(V)
    return (U if left else None), A, (V if right else None), Vi


def _unimodular_inverse(V):
    n = len(V)
    if n == 0:
        return []
    inv = flint.fmpq_mat(flint.fmpz_mat(V)).inv()
    out = []
    for r in inv.tolist():
        row = []
        for x in r:
            if x.q != 1:
                raise AssertionError("transform is not unimodular")
            row.append(int(x.p))
        out.append(row)
    return out


def _diagonal_snf(A):
    """Smith form of a diagonal matrix with small 2x2 transforms."""
    m = len(A)
    n = len(A[0]) if m else 0
    k = min(m, n)
    U = identity(m)
    V = identity(n)
    d = [A[i][i] for i in range(k)]
    for i in range(k):
        if d[i] < 0:
            d[i] = -d[i]
            U[i] = [-x for x in U[i]]
    # zeros to the end
    order = sorted(range(k), key=lambda i: d[i] == 0)
    if order != list(range(k)):
        U = [U[i] for i in order] + U[k:]
        Vt = transpose(V)
        Vt = [Vt[i] for i in order] + Vt[k:]
        V = transpose(Vt)
        d = [d[i] for i in order]
    for i in range(k):
        for j in range(i + 1, k):
            a, b = d[i], d[j]
            if b == 0 or (a and b % a == 0):
                continue
            if a == 0:
                continue
            # [[a,0],[0,b]] -> [[g,0],[0,l]]
            g, s, t = xgcd(a, b)
            # row ops R = [[1,1],[-t*b/g, s*a/g]]... realised as
            # R = [[s, t], [-b/g, a/g]], C = [[1, -t*b/g], [1, s*a/g]]
            R = [[s, t], [-b // g, a // g]]
            C = [[1, -t * b // g], [1, s * a // g]]
            ri, rj = U[i], U[j]
            U[i] = [R[0][0] * x + R[0][1] * y for x, y in zip(ri, rj)]
            U[j] = [R[1][0] * x + R[1][1] * y for x, y in zip(ri, rj)]
            for row in V:
                x, y = row[i], row[j]
                row[i] = C[0][0] * x + C[1][0] * y
                row[j] = C[0][1] * x + C[1][1] * y
            l = a // g * b
            d[i], d[j] = g, l
            if d[j] < 0:
                d[j] = -d[j]
                U[j] = [-x for x in U[j]]
    D = [[0] * n for _ in range(m)]
    for i in range(k):
        D[i][i] = d[i]
    return U, D, V


def _negate_row(A, U, t):
    A[t] = [-x for x in A[t]]
    if U is not None:
        U[t] = [-x for x in U[t]]


def diagonal(D) -> list[int]:
    return [D[i][i] for i in range(min(len(D), len(D[0]) if D else 0))]


def elementary_divisors(M) -> list[int]:
    """Nonzero diagonal of the Smith form (units included)."""
    _, D, _, _ = _snf(M, left=False, right=False)
    return [d for d in diagonal(D) if d] if D else []


def _int_rows(M) -> list[list[int]]:
    return [scale_to_integers(r) for r in M]


def rank(M) -> int:
    rows = _int_rows(M)
    if not rows or not rows[0]:
        return 0
    return flint.fmpz_mat(rows).rank()


def _pivot_columns(R, nrows: int, ncols: int) -> list[int]:
    piv = []
    i = 0
    for j in range(ncols):
        if i < nrows and R[i, j] != 0:
            piv.append(j)
            i += 1
    return piv


def independent_rows(M) -> list[list[int]]:
    """Integer rows spanning the same Q-space as the rows of M (first ones kept)."""
    rows = _int_rows(M)
    if not rows or not rows[0]:
        return []
    # pivot columns of rref(M^T) mark a maximal independent set of rows
    T = flint.fmpz_mat(transpose(rows))
    R, _, r = T.rref()
    return [rows[j] for j in _pivot_columns(R, T.nrows(), T.ncols())[:r]]


def integer_kernel(M, ncols: int | None = None) -> list[list[int]]:
    """Basis (rows) of {x in Z^n : M x = 0}; always saturated.

    ``M`` may have rational entries; each row is scaled to integers first.
    A rational kernel from flint is LLL reduced and then saturated.
    """
    n = len(M[0]) if M else ncols
    if n is None:
        raise ValueError("cannot infer column count of an empty matrix")
    rows = independent_rows(M)
    if not rows:
        return identity(n)
    if len(rows) == n:
        return []
    X, nullity = flint.fmpz_mat(rows).nullspace()
    K = [[int(X[i, j]) for i in range(n)] for j in range(nullity)]
    return saturation(K, n)


def _nonzero_minor(B: list[list[int]], k: int) -> int:
    R, _, _ = flint.fmpz_mat(B).rref()
    cols = _pivot_columns(R, k, len(B[0]))[:k]
    return int(flint.fmpz_mat([[row[c] for c in cols] for row in B]).det())


def _saturate_at(B: list[list[int]], p: int) -> list[list[int]]:
    k, n = len(B), len(B[0])
    while True:
        X, nullity = flint.nmod_mat(B, p).transpose().nullspace()
        if nullity == 0:
            return B
        # echelon form of the left kernel: row j has a 1 at a pivot no other row touches,
        # so swapping B[pivot] for (v_j B)/p stays a basis of the larger lattice
        V = flint.nmod_mat([[int(X[i, j]) for i in range(k)] for j in range(nullity)], p).rref()[0]
        F = flint.fmpz_mat([[int(V[j, i]) for i in range(k)] for j in range(nullity)]) * flint.fmpz_mat(B)
        B = [list(r) for r in B]
        for j, piv in enumerate(_pivot_columns(V, nullity, k)):
            row = [int(F[j, c]) for c in range(n)]
            if any(x % p for x in row):
                raise AssertionError("p-saturation step produced a non-divisible row")
            B[piv] = [x // p for x in row]
        B = lll_reduce(B)


def saturation(B, n: int | None = None) -> list[list[int]]:
    """Basis of (Q-span of rows of B) intersected with Z^n.

    The index of the row lattice in its saturation divides every nonzero
    maximal minor, so only primes of one such minor need a mod-p pass.
    """
    rows = independent_rows(B)
    if not rows:
        return []
    rows = lll_reduce(rows)
    d = abs(_nonzero_minor(rows, len(rows)))
    for p, _ in flint.fmpz(d).factor():
        rows = _saturate_at(rows, int(p))
    return lll_reduce(rows)


def hermite_normal_form(B) -> list[list[int]]:
    """Row-style HNF with zero rows removed (canonical basis of the row span)."""
    if not B or not B[0]:
        return []
    H = flint.fmpz_mat(as_int_matrix(B)).hnf()
    rows = [[int(x) for x in r] for r in H.tolist()]
    return [r for r in rows if any(r)]


def same_lattice(B1, B2) -> bool:
    return hermite_normal_form(B1) == hermite_normal_form(B2)


def det(M):
    """Exact determinant (Bareiss) of an integer or rational square matrix."""
    n = len(M)
    if n == 0:
        return 1
    den = 1
    for r in M:
        for x in r:
            den = lcm(den, Fraction(x).denominator)
    A = [[int(Fraction(x) * den) for x in r] for r in M]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            p = next((i for i in range(k + 1, n) if A[i][k]), None)
            if p is None:
                return 0
            A[k], A[p] = A[p], A[k]
            sign = -sign
        akk = A[k][k]
        for i in range(k + 1, n):
            aik = A[i][k]
            row_i, row_k = A[i], A[k]
            A[i] = [0] * (k + 1) + [(akk * row_i[j] - aik * row_k[j]) // prev for j in range(k + 1, n)]
        prev = akk
    result = sign * A[n - 1][n - 1]
    if den == 1:
        return result
    return Fraction(result, den ** n)


def solve_in_lattice(B, v):
    """Integer coefficients c with c*B == v (B rows a basis), or None."""
    if not B:
        return [] if not any(v) else None
    k = len(B)
    # solve over Q via the k x k system restricted to independent columns
    M = transpose([list(r) for r in B])  # n x k
    aug = [list(map(Fraction, M[i])) + [Fraction(v[i])] for i in range(len(M))]
    m = len(aug)
    r = 0
    pivcols = []
    for c in range(k):
        p = next((i for i in range(r, m) if aug[i][c]), None)
        if p is None:
            return None
        aug[r], aug[p] = aug[p], aug[r]
        piv = aug[r][c]
        aug[r] = [x / piv for x in aug[r]]
        for i in range(m):
            if i != r and aug[i][c]:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[r])]
        pivcols.append(c)
        r += 1
    if any(aug[i][k] for i in range(r, m)):
        return None
    sol = [aug[i][k] for i in range(k)]
    if any(x.denominator != 1 for x in sol):
        return None
    return [int(x) for x in sol]


def extend_to_unimodular(B, n: int) -> list[list[int]]:
    """Rows completing a saturated basis B of a sublattice to a basis of Z^n.

    Returns the full n x n unimodular matrix whose first rows are B.
    """
    if not B:
        return identity(n)
    _, D, V, Vi = _snf(B, left=True, right=True, right_inverse=True)
    if any(d != 1 for d in diagonal(D)):
        raise ValueError("basis is not saturated")
    r = len(B)
    extra = [list(Vi[i]) for i in range(r, n)]
    full = [list(b) for b in B] + extra
    d = det(full)
    if abs(d) != 1:
        raise AssertionError("completion is not unimodular")
    return full


def lll_reduce(B) -> list[list[int]]:
    """LLL-reduced basis of the lattice spanned by the rows of B."""
    if not B:
        return []
    R = flint.fmpz_mat(as_int_matrix(B)).lll()
    return [[int(x) for x in r] for r in R.tolist()]
