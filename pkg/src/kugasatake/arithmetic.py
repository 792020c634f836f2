"""Neat congruence levels, finite-order certificates and the separation test."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import sympy

from .exceptions import ValidationError


@dataclass(frozen=True)
class NeatCertificate:
    n: int
    prime: int
    justification: str

    def to_document(self) -> dict:
        return {"n": self.n, "prime": self.prime, "justification": self.justification}


def neat_congruence_level(n: int) -> NeatCertificate:
    """Smallest prime ell with ell - 1 > n!.

    Eigenvalues of g = I mod ell lie in 1 + m for a splitting field of
    degree at most n! over Q_ell, whose ramification index is then below
    ell - 1, so 1 + m has no torsion.  The level is certified, not minimal.
    """
    if int(n) < 1:
        raise ValidationError("n must be >= 1")
    n = int(n)
    f = math.factorial(n)
    ell = int(sympy.nextprime(f + 1))
    assert ell - 1 > f
    return NeatCertificate(n, ell, f"{ell} - 1 > {n}! = {f}")


def congruence_membership(g, ell: int) -> bool:
    """g = I modulo ell, entry by entry."""
    return all((x - (i == j)) % ell == 0 for i, row in enumerate(g) for j, x in enumerate(row))


def _charpoly(g):
    x = sympy.Symbol("x")
    M = sympy.Matrix(g)
    return sympy.Poly(M.charpoly(x).as_expr(), x), x


def cyclotomic_orders(g) -> list[int] | None:
    """Orders d with Phi_d dividing the characteristic polynomial (with
    multiplicity), or None if it is not a product of cyclotomics."""
    P, x = _charpoly(g)
    n = P.degree()
    found = []
    for d in range(1, 2 * n * n + 3):
        if sympy.totient(d) > n:
            continue
        phi = sympy.Poly(sympy.cyclotomic_poly(d, x), x)
        while P.degree() >= phi.degree():
            q, r = sympy.div(P, phi)
            if not r.is_zero:
                break
            P = q
            found.append(d)
    if P.degree() != 0:
        return None
    return found


def has_finite_order(g) -> bool:
    """Characteristic polynomial is a product of cyclotomics and g is semisimple."""
    g = [[int(x) for x in row] for row in g]
    if not g:
        return True
    orders = cyclotomic_orders(g)
    if orders is None:
        return False
    x = sympy.Symbol("x")
    radical = sympy.Integer(1)
    for d in sorted(set(orders)):
        radical *= sympy.cyclotomic_poly(d, x)
    M = sympy.Matrix(g)
    poly = sympy.Poly(radical, x)
    acc = sympy.zeros(*M.shape)
    for c in poly.all_coeffs():
        acc = acc * M + c * sympy.eye(M.shape[0])
    return acc.is_zero_matrix


def finite_order(g) -> int | None:
    """lcm of the cyclotomic orders when g has finite order, else None."""
    if not has_finite_order(g):
        return None
    return math.lcm(*cyclotomic_orders(g)) if g else 1


# ---------------------------------------------------------------------------
# separation criterion
# ---------------------------------------------------------------------------

def _root2_bounds(k: int, bits: int) -> tuple[Fraction, Fraction]:
    """lo <= 2^(1/k) <= hi with hi - lo = 2^-bits."""
    if k == 1:
        return Fraction(2), Fraction(2)
    scale = 1 << bits
    # a = floor(2^(1/k) * scale) via integer k-th root of 2 * scale^k
    target = 2 * scale ** k
    a = sympy.integer_nthroot(target, k)[0]
    exact = a ** k == target
    lo = Fraction(a, scale)
    hi = lo if exact else Fraction(a + 1, scale)
    return lo, hi


def separation_sum_bounds(c, bits: int) -> tuple[Fraction, Fraction]:
    lo = hi = Fraction(0)
    for k, ck in enumerate(c, start=1):
        ck = Fraction(ck)
        l, h = _root2_bounds(k, bits)
        lo += l * k / ck
        hi += h * k / ck
    return lo, hi


def fujino_separation_check(dim: int, c, max_bits: int = 256):
    """Whether sum_k 2^(1/k) k / c(k) <= 1, with certified rounding.

    Returns True, False, or None when the enclosure still straddles 1 at
    ``max_bits`` of precision.
    """
    dim = int(dim)
    c = [Fraction(x) for x in c]
    if dim < 1:
        raise ValidationError("dim must be >= 1")
    if len(c) != dim:
        raise ValidationError(f"need {dim} values of c, got {len(c)}")
    if any(x <= 0 for x in c):
        raise ValidationError("c must be positive")
    bits = 32
    while True:
        lo, hi = separation_sum_bounds(c, bits)
        if hi <= 1:
            return True
        if lo > 1:
            return False
        if bits >= max_bits:
            return None
        bits *= 2
