"""Finite models of the Brauer-group bookkeeping at good and bad primes.

Setup: H is a lattice with a finite group action and invariant form, pic a
saturated Gamma-stable sublattice, T its orthogonal complement.  For a
prime power N = ell^n everything reduces to counting kernels over Z/N.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction

from sympy import primerange

from . import howell, linalg
from .exceptions import InvariantViolation, ValidationError
from .galois import (GaloisModule, TorsionModule, _minus_identity, reduce_mod,
                     torsion_invariant_order)
from .lattice import (FiniteAbelianGroup, SubLattice, discriminant, orthogonal_complement,
                      primes_dividing)


def valuation(x: int, ell: int) -> int:
    x = abs(int(x))
    if x == 0:
        raise ValueError("valuation of zero")
    v = 0
    while x % ell == 0:
        x //= ell
        v += 1
    return v


def _check_prime(ell: int):
    from sympy import isprime

    if not isprime(ell):
        raise ValidationError(f"{ell} is not prime")


def transcendental(H: GaloisModule, pic: SubLattice) -> SubLattice:
    if H.gram is None:
        raise ValidationError("module carries no form; pass T explicitly")
    return orthogonal_complement(H.lattice, pic)


def _stacked_basis(pic: SubLattice, T: SubLattice, r: int) -> list[list[int]]:
    S = [list(b) for b in pic.basis] + [list(b) for b in T.basis]
    if len(S) != r or linalg.rank(S) != r:
        raise ValidationError("pic + T must have full rank in H")
    return S


def _check_setup(H: GaloisModule, pic: SubLattice, T: SubLattice | None):
    if pic.ambient_rank != H.rank:
        raise ValidationError("pic is not a sublattice of H")
    if pic.basis and pic.index_in_saturation() != 1:
        raise ValidationError("pic must be saturated")
    if not H.is_stable(pic):
        raise ValidationError("pic is not stable under the group")
    if T is None:
        T = transcendental(H, pic)
    if not H.is_stable(T):
        raise ValidationError("T is not stable under the group")
    return T


def cokernel_group(H: GaloisModule, pic: SubLattice, T: SubLattice) -> FiniteAbelianGroup:
    S = _stacked_basis(pic, T, H.rank)
    return FiniteAbelianGroup(tuple(d for d in linalg.elementary_divisors(S) if d > 1))


def k_ell(H, pic, T, ell) -> FiniteAbelianGroup:
    """ell-primary part of K = H / (pic + T)."""
    return cokernel_group(H, pic, T).primary_part(ell)


def acts_trivially_on_k_ell(H: GaloisModule, pic: SubLattice, T: SubLattice, ell: int) -> bool:
    """(g - 1) H lands in pic + T after inverting primes other than ell."""
    S = _stacked_basis(pic, T, H.rank)
    St = linalg.transpose(S)  # columns are basis vectors
    inv = _rational_inverse(St)
    for g in H.generators:
        D = _minus_identity(g)
        for j in range(H.rank):
            col = [D[i][j] for i in range(H.rank)]
            coords = [sum(inv[i][k] * col[k] for k in range(H.rank)) for i in range(H.rank)]
            for c in coords:
                if c.denominator % ell == 0:
                    return False
    return True


def _rational_inverse(M):
    from flint import fmpq_mat

    n = len(M)
    inv = fmpq_mat(n, n, [x for r in M for x in r]).inv()
    return [[Fraction(int(inv[i, j].p), int(inv[i, j].q)) for j in range(n)] for i in range(n)]


# ---------------------------------------------------------------------------
# good primes
# ---------------------------------------------------------------------------

def brauer_model(H: GaloisModule, pic: SubLattice, ell: int, n: int = 1) -> TorsionModule:
    """(H / ell^n) / (pic / ell^n) with the induced action."""
    r = H.rank
    p = pic.rank
    if pic.ambient_rank != r:
        raise ValidationError("pic is not a sublattice of H")
    try:
        B = linalg.extend_to_unimodular([list(b) for b in pic.basis], r)
    except ValueError as exc:
        raise ValidationError("pic must be saturated") from exc
    Bc = linalg.transpose(B)
    Binv = [[int(x) for x in row] for row in _rational_inverse(Bc)]
    actions = []
    for g in H.generators:
        gn = linalg.matmul(linalg.matmul(Binv, [list(row) for row in g]), Bc)
        for i in range(p, r):
            if any(gn[i][j] for j in range(p)):
                raise ValidationError("pic is not stable under the group")
        actions.append([row[p:] for row in gn[p:]])
    return TorsionModule(ell ** n, r - p, tuple(tuple(map(tuple, a)) for a in actions))


def brauer_invariant_order(H, pic, ell, n=1) -> int:
    return torsion_invariant_order(brauer_model(H, pic, ell, n))


def _good_prime_row(H, pic, Tm, ell):
    t_inv = torsion_invariant_order(reduce_mod(Tm, ell, 1))
    b_inv = brauer_invariant_order(H, pic, ell, 1)
    return {
        "prime": ell,
        "T_invariant_order": t_inv,
        "brauer_invariant_order": b_inv,
        "isomorphism_holds": t_inv == b_inv,
        "brauer_invariants_vanish": t_inv == 1,
    }


def good_prime_sieve(H: GaloisModule, pic: SubLattice, T: SubLattice | None = None,
                     exclusions=(), M_mw: int = 1, check_primes=None, check_up_to: int = 20,
                     workers: int = 1) -> dict:
    """Excluded primes, ell_0 = their maximum, and a per-prime check for good ell."""
    if int(M_mw) < 1:
        raise ValidationError("Masser-Wustholz constant must be >= 1")
    T = _check_setup(H, pic, T)
    delta = discriminant(pic) if pic.rank else 1
    excluded = set(primes_dividing(delta)) | {int(x) for x in exclusions} | set(primes_dividing(int(M_mw)))
    for x in excluded:
        _check_prime(x)
    ell0 = max(excluded) if excluded else 1
    if check_primes is None:
        check_primes = [q for q in primerange(2, max(check_up_to, ell0 + 1) + 1) if q not in excluded]
    else:
        check_primes = sorted(int(q) for q in check_primes if int(q) not in excluded)
    Tm = H.restrict(T)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            rows = list(ex.map(lambda q: _good_prime_row(H, pic, Tm, q), check_primes))
    else:
        rows = [_good_prime_row(H, pic, Tm, q) for q in check_primes]
    return {
        "delta": delta,
        "excluded": sorted(excluded),
        "ell0": ell0,
        "checked": rows,
    }


# ---------------------------------------------------------------------------
# the four-term sequence
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SequenceReport:
    prime: int
    n: int
    K_order: int
    C_invariant_order: int
    H2_invariant_order: int
    pic_quotient_order: int
    T_invariant_order: int
    bound: int
    inequality_holds: bool
    injective: bool

    def to_document(self) -> dict:
        return asdict(self)


def four_term_check(H: GaloisModule, pic: SubLattice, T: SubLattice | None, ell: int, n: int) -> SequenceReport:
    """Orders in 0 -> K_ell -> pic/N + T/N -> H/N -> K_ell -> 0, N = ell^n."""
    _check_prime(ell)
    T = _check_setup(H, pic, T)
    if not H.acts_trivially_on(pic):
        raise ValidationError("the group must act trivially on pic (extend the base field first)")
    r = H.rank
    S = _stacked_basis(pic, T, r)
    K = k_ell(H, pic, T, ell)
    m = valuation(K.exponent(), ell) if not K.is_trivial() else 0
    if n < m:
        raise ValidationError(f"n = {n} is below the exponent m = {m} of K_ell")
    if not acts_trivially_on_k_ell(H, pic, T, ell):
        raise ValidationError("the group acts nontrivially on K_ell")
    N = ell ** n
    St = linalg.transpose(S)  # x in Z^r (pic coords then T coords) -> St x in H
    tor = howell.kernel_size(St, N, r)
    coker = N ** r // howell.image_size(St, N)
    if tor != K.order or coker != K.order:
        raise InvariantViolation(f"exactness failed: |Tor| = {tor}, |coker| = {coker}, |K_ell| = {K.order}")
    # order identity |K| |H/N| = |pic/N| |T/N| |K|
    if tor * N ** r != N ** pic.rank * N ** T.rank * coker:
        raise InvariantViolation("order identity of the four-term sequence fails")
    # injectivity of K_ell -> pic/N: no kernel vector with vanishing pic part
    p = pic.rank
    proj = [[int(i == j) for j in range(r)] for i in range(p)]
    injective = howell.kernel_size(St + proj, N, r) == 1
    if not injective:
        raise InvariantViolation("K_ell -> pic/ell^n is not injective")
    gens = H.generators
    h_rows = []
    c_rows = []
    for g in gens:
        D = _minus_identity(g)
        h_rows.extend(D)
        c_rows.extend(linalg.matmul(D, St))
    H_inv = howell.kernel_size(h_rows, N, r)
    C_inv = howell.kernel_size(c_rows, N, r) // tor
    Tm = H.restrict(T)
    T_inv = torsion_invariant_order(reduce_mod(Tm, ell, n)) if T.rank else 1
    pic_q = N ** p
    # split sequence 0 -> K -> pic/N + (T/N)^G -> C^G -> 0
    if K.order * C_inv != pic_q * T_inv:
        raise InvariantViolation("split short exact sequence fails to count")
    holds = H_inv <= K.order * C_inv
    return SequenceReport(ell, n, K.order, C_inv, H_inv, pic_q, T_inv, T_inv, holds, injective)


# ---------------------------------------------------------------------------
# bad primes
# ---------------------------------------------------------------------------

def stabilization_exponent(M: GaloisModule, ell: int):
    """Largest ell-valuation of the nonzero elementary divisors of stacked g - I.

    Returns None when g - I has a common kernel (free invariants), in which
    case the invariant orders grow without bound.
    """
    if M.rank == 0:
        return 0
    rows = M.stacked_difference()
    divs = linalg.elementary_divisors(rows) if any(any(r) for r in rows) else []
    if len(divs) < M.rank:
        return None
    return max((valuation(d, ell) for d in divs), default=0)


def invariant_order_sup(M: GaloisModule, ell: int):
    """sup_n |(M/ell^n)^Gamma| with its certificate (exponent e)."""
    e = stabilization_exponent(M, ell)
    if e is None:
        return math.inf, None
    n0 = max(e, 1)
    a = torsion_invariant_order(reduce_mod(M, ell, n0))
    b = torsion_invariant_order(reduce_mod(M, ell, n0 + 1))
    if a != b:
        raise InvariantViolation("invariant orders did not stabilize at the certified exponent")
    return a, e


def bad_prime_certificate(H: GaloisModule, pic: SubLattice, T: SubLattice | None, ell: int) -> dict:
    _check_prime(ell)
    T = _check_setup(H, pic, T)
    Tm = H.restrict(T)
    bound, e = invariant_order_sup(Tm, ell)
    K = k_ell(H, pic, T, ell)
    m = valuation(K.exponent(), ell) if not K.is_trivial() else 0
    rows = []
    if bound != math.inf:
        top = max(m, e, 1) + 1
        for n in range(max(m, 1), top + 1):
            rep = four_term_check(H, pic, T, ell, n)
            ratio = Fraction(rep.H2_invariant_order, rep.pic_quotient_order)
            if rep.T_invariant_order > bound:
                raise InvariantViolation("invariant order exceeded the certified supremum")
            rows.append({"n": n, "ratio": ratio, "ratio_le_bound": ratio <= bound})
    return {"prime": ell, "bound": bound, "exponent": e, "K_exponent": m, "checks": rows}


def bad_prime_bound(H: GaloisModule, pic: SubLattice, T: SubLattice | None, ell: int):
    """sup_n |(T/ell^n)^Gamma|, certified by elementary divisors.

    Returns math.inf when T has nonzero rational invariants.
    """
    cert = bad_prime_certificate(H, pic, T, ell)
    if not all(row["ratio_le_bound"] for row in cert["checks"]):
        raise InvariantViolation("ratio inequality fails below the bound")
    return cert["bound"]


def rank_one_bound(H: GaloisModule, pic: SubLattice, T: SubLattice | None, ell: int):
    """Bound computed on the top-wedge model of T, checked against the direct one."""
    from .correspondence import wedge_dual_twist

    if pic.rank != 1:
        raise ValidationError("rank_one_bound needs pic of rank 1")
    T = _check_setup(H, pic, T)
    direct = bad_prime_bound(H, pic, T, ell)
    W = wedge_dual_twist(H.restrict(T))
    via_wedge, _ = invariant_order_sup(W, ell)
    if via_wedge != direct:
        warnings.warn(f"wedge model bound {via_wedge} differs from the direct bound {direct}",
                      stacklevel=2)
    return via_wedge
