"""Howell normal form over Z/N and the kernel / span counts built on it.

The Howell form is the canonical echelon form for row spans over Z/N: each
pivot divides N, entries above a pivot are reduced modulo it, and the rows
whose leading entries lie past column j span every element of the row span
vanishing in columns 0..j.  The last property is what makes kernels
computable by augmentation, which plain Smith forms over Z do not give.
"""

from __future__ import annotations

from math import gcd

from .linalg import xgcd


def _unit_normalizer(a: int, N: int) -> tuple[int, int]:
    """(g, u) with g = gcd(a, N) and u a unit mod N such that a*u = g mod N."""
    g = gcd(a, N)
    if g == N:
        return N, 1
    M = N // g
    u0 = pow((a // g) % M, -1, M)
    u = u0
    while gcd(u, N) != 1:
        u += M
    return g, u % N


def howell_form(A, N: int) -> list[list[int]]:
    """Howell normal form of the row span of ``A`` over Z/N (zero rows dropped)."""
    if N < 1:
        raise ValueError("modulus must be positive")
    rows = [[x % N for x in r] for r in A]
    if not rows:
        return []
    k = len(rows[0])
    r = 0
    for j in range(k):
        for i in range(r + 1, len(rows)):
            b = rows[i][j]
            if not b:
                continue
            a = rows[r][j] if r < len(rows) else 0
            g, s, t = xgcd(a, b)
            ra, ri = rows[r], rows[i]
            ag, bg = a // g, b // g
            rows[r] = [(s * x + t * y) % N for x, y in zip(ra, ri)]
            rows[i] = [(-bg * x + ag * y) % N for x, y in zip(ra, ri)]
        if r >= len(rows) or rows[r][j] == 0:
            continue
        g, u = _unit_normalizer(rows[r][j], N)
        if u != 1:
            rows[r] = [(u * x) % N for x in rows[r]]
        for i in range(r):
            q = rows[i][j] // g
            if q:
                rows[i] = [(x - q * y) % N for x, y in zip(rows[i], rows[r])]
        ann = [((N // g) * x) % N for x in rows[r]]
        if any(ann):
            rows.append(ann)
        r += 1
        if r >= len(rows):
            break
    return [row for row in rows[:r] if any(row)] + [row for row in rows[r:] if any(row)]


def _pivot(row) -> int:
    return next(j for j, x in enumerate(row) if x)


def span_size(A, N: int) -> int:
    """Number of elements in the row span of ``A`` over Z/N."""
    size = 1
    for row in howell_form(A, N):
        p = _pivot(row)
        size *= N // gcd(row[p], N)
    return size


def kernel(A, N: int, ncols: int | None = None) -> list[list[int]]:
    """Generators (Howell basis) of {x in (Z/N)^k : A x = 0}."""
    m = len(A)
    k = len(A[0]) if A else ncols
    if k is None:
        raise ValueError("cannot infer the number of unknowns")
    if m == 0:
        return [[int(i == j) % N for j in range(k)] for i in range(k)] if N > 1 else []
    aug = [[A[i][j] for i in range(m)] + [int(j == t) for t in range(k)] for j in range(k)]
    H = howell_form(aug, N)
    return [row[m:] for row in H if not any(row[:m])]


def kernel_size(A, N: int, ncols: int | None = None) -> int:
    K = kernel(A, N, ncols)
    return span_size(K, N) if K else 1


def image_size(A, N: int) -> int:
    """|A (Z/N)^k| for x -> A x, i.e. the span of the columns."""
    if not A or not A[0]:
        return 1
    cols = [list(c) for c in zip(*A)]
    return span_size(cols, N)


def reduce_matrix(A, N: int) -> list[list[int]]:
    return [[x % N for x in r] for r in A]
