"""Kuga-Satake tori attached to K3-type periods.

A period is an orthonormal pair f1, f2 (Q(f1) = Q(f2) = -1, Q(f1, f2) = 0)
in P tensor R, written in the orthogonal basis of a CliffordContext.  The
torus is C+(P)_R / C+(P) with i acting as x -> -J x, J = f1 f2, polarized by
E(v, w) = tr(alpha iota(v) w) with alpha = +-e1 e2.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import mpmath
import numpy as np

from . import clifford as cl
from . import linalg
from .clifford import CliffordContext, CliffordElement
from .densemat import ExactMatrix
from .exceptions import InvariantViolation, ValidationError
from .scalars import FLOAT, ScalarMode, common_mode, format_scalar, parse_scalar, sign

DEFAULT_EPS = mpmath.mpf(2) ** -40


def _q_pair(ctx: CliffordContext, v, w):
    s = 0
    for qi, a, b in zip(ctx.q, v, w):
        if a and b:
            s = s + qi * a * b
    return s


class K3Period:
    """Orthonormal negative pair (f1, f2) spanning the period plane."""

    def __init__(self, context: CliffordContext, f1, f2, eps=None):
        f1, f2 = tuple(f1), tuple(f2)
        n = context.n
        if len(f1) != n or len(f2) != n:
            raise ValidationError(f"period vectors must have length {n}")
        if n < 2:
            raise ValidationError("period needs rank >= 2")
        self.mode = common_mode(list(f1) + list(f2) + list(context.q))
        self.context = context
        self.f1 = f1
        self.f2 = f2
        self.eps = None
        if self.mode.kind == FLOAT:
            self.eps = mpmath.mpf(eps) if eps is not None else DEFAULT_EPS
        elif eps is not None:
            raise ValidationError("tolerance only applies to float-mode periods")
        checks = {
            "Q(f1) = -1": _q_pair(context, f1, f1) + 1,
            "Q(f2) = -1": _q_pair(context, f2, f2) + 1,
            "Q(f1, f2) = 0": _q_pair(context, f1, f2),
        }
        for name, defect in checks.items():
            if not self._zero(defect):
                raise ValidationError(f"period violates {name} (defect {defect})")

    @property
    def exact(self) -> bool:
        return self.mode.kind != FLOAT

    def _zero(self, x) -> bool:
        if self.eps is None:
            return not x
        return abs(x) <= self.eps

    def pair(self, v, w):
        return _q_pair(self.context, v, w)

    def rotated(self, a, b) -> "K3Period":
        """(a f1 + b f2, -b f1 + a f2) for a^2 + b^2 = 1."""
        g1 = tuple(a * x + b * y for x, y in zip(self.f1, self.f2))
        g2 = tuple(-b * x + a * y for x, y in zip(self.f1, self.f2))
        return K3Period(self.context, g1, g2, self.eps)

    def flipped(self) -> "K3Period":
        return K3Period(self.context, self.f1, tuple(-x for x in self.f2), self.eps)

    def to_document(self) -> dict:
        doc = {
            "q": [format_scalar(x) for x in self.context.q],
            "f1": [format_scalar(x) for x in self.f1],
            "f2": [format_scalar(x) for x in self.f2],
        }
        if self.mode.D is not None:
            doc["D"] = self.mode.D
        if self.mode.kind == FLOAT:
            doc["precision"] = self.mode.precision_bits or mpmath.mp.prec
        return doc

    def __repr__(self):
        return f"K3Period(n={self.context.n}, mode={self.mode.kind})"


def period_from_document(doc: dict, context: CliffordContext | None = None) -> K3Period:
    """Read {"D"?, "precision"?, "q"?, "f1", "f2", "eps"?}.

    Without "q" the diagonal form (-1, -1, 1, ..., 1) is used.
    """
    if not isinstance(doc, dict) or "f1" not in doc or "f2" not in doc:
        raise ValidationError("period document needs 'f1' and 'f2'")
    if "D" in doc and "precision" in doc:
        raise ValidationError("period document cannot be both quadratic and float")
    if "D" in doc:
        mode = ScalarMode("quadratic", D=int(doc["D"]))
    elif "precision" in doc:
        mode = ScalarMode(FLOAT, precision_bits=int(doc["precision"]))
    else:
        mode = ScalarMode("rational")
    if not isinstance(doc["f1"], list) or not isinstance(doc["f2"], list):
        raise ValidationError("f1 and f2 must be arrays")
    rational = ScalarMode("rational")
    if context is None:
        if "q" in doc:
            q = [parse_scalar(x, rational) for x in doc["q"]]
            q = [int(x) if x.denominator == 1 else x for x in q]
        else:
            q = [-1, -1] + [1] * (len(doc["f1"]) - 2)
        context = CliffordContext(q)
    f1 = [parse_scalar(x, mode) for x in doc["f1"]]
    f2 = [parse_scalar(x, mode) for x in doc["f2"]]
    eps = doc.get("eps")
    if eps is not None:
        eps = parse_scalar(eps, ScalarMode(FLOAT, precision_bits=mode.precision_bits or 53))
    if mode.kind == FLOAT:
        with mpmath.workprec(mode.precision_bits):
            return K3Period(context, f1, f2, eps)
    return K3Period(context, f1, f2, eps)


def standard_period(n: int) -> K3Period:
    """f1 = e1, f2 = e2 for q = (-1, -1, 1, ..., 1)."""
    ctx = CliffordContext([-1, -1] + [1] * (n - 2))
    f1 = [0] * n
    f2 = [0] * n
    f1[0] = 1
    f2[1] = 1
    return K3Period(ctx, f1, f2)


@dataclass
class PolarizedTorus:
    rank: int
    complex_structure: object
    polarization: list
    period: K3Period
    alpha_sign: int
    J: CliffordElement
    verified: bool = True
    warnings: list = field(default_factory=list)

    @property
    def complex_dimension(self) -> int:
        return self.rank // 2

    def complex_structure_entries(self) -> np.ndarray:
        c = self.complex_structure
        return c.entries() if isinstance(c, ExactMatrix) else np.array(c, dtype=object)

    def to_document(self) -> dict:
        c = self.complex_structure_entries()
        return {
            "rank": self.rank,
            "complex_dimension": self.complex_dimension,
            "alpha_sign": self.alpha_sign,
            "complex_structure": [[format_scalar(x) for x in row] for row in c.tolist()],
            "polarization": [[str(int(x)) for x in row] for row in self.polarization],
            "polarization_type": polarization_type(self),
            "J": self.J.to_document(),
            "verified": self.verified,
            "warnings": list(self.warnings),
        }


def complex_structure(p: K3Period) -> CliffordElement:
    J = cl.embed_vector_product(p.context, p.f1, p.f2)
    sq = J * J + 1
    if p.exact:
        if not sq.is_zero():
            raise InvariantViolation("J^2 != -1 for a validated period")
    elif any(abs(c) > p.eps * 16 for c in sq.terms.values()):
        raise InvariantViolation("J^2 != -1 within tolerance")
    return J


def i_action_matrix(p: K3Period, J: CliffordElement | None = None, guard: int | None = None):
    """Matrix of multiplication by i, x -> -J x."""
    J = complex_structure(p) if J is None else J
    M = cl.left_mult_matrix(-J, guard)
    if p.exact:
        return cl.to_exact(M)
    return M


def polarization_form(ctx: CliffordContext, sign_: int = 1, guard: int | None = None) -> list[list[int]]:
    """Gram matrix of E(v, w) = tr(alpha iota(v) w), alpha = sign * e1 e2."""
    if sign_ not in (1, -1):
        raise ValidationError("alpha sign must be +1 or -1")
    if ctx.n < 2 or sign(ctx.q[0]) >= 0 or sign(ctx.q[1]) >= 0:
        raise ValidationError("e1, e2 must span a negative definite plane (q1, q2 < 0)")
    masks = ctx.basis_masks(guard)
    idx = ctx.basis_index()
    N = len(masks)
    alpha = {0b11: sign_}
    E = [[0] * N for _ in range(N)]
    dim = ctx.dimension
    for i, ma in enumerate(masks):
        k = ma.bit_count()
        s = -1 if (k * (k - 1) // 2) & 1 else 1
        left = cl._mul_terms(ctx, alpha, {ma: s})
        # only B = A xor {1,2} can give a scalar
        mb = ma ^ 0b11
        j = idx[mb]
        prod = cl._mul_terms(ctx, left, {mb: 1})
        E[i][j] = dim * prod.get(0, 0)
    for row in E:
        for x in row:
            if getattr(x, "denominator", 1) != 1:
                raise ValidationError("polarization is not integral; q values must be integers")
    return [[int(x) for x in row] for row in E]


def _riemann_form(E, c):
    """Matrix of (x, y) -> E(x, c y)."""
    if isinstance(c, ExactMatrix):
        return ExactMatrix.from_entries(E) @ c
    return np.array(E, dtype=object).dot(c)


def _float_pd(S, eps) -> bool:
    F = np.array([[float(x) for x in row] for row in S], dtype=float)
    if not np.allclose(F, F.T, atol=float(eps) * max(1.0, np.abs(F).max())):
        return False
    return bool(np.linalg.eigvalsh((F + F.T) / 2).min() > float(eps))


def choose_alpha_sign(p: K3Period, guard: int | None = None, c=None, E=None) -> int:
    """The sign of alpha for which E(x, c y) is positive definite."""
    ctx = p.context
    c = i_action_matrix(p, guard=guard) if c is None else c
    E = polarization_form(ctx, 1, guard) if E is None else E
    S = _riemann_form(E, c)
    if isinstance(S, ExactMatrix):
        s00 = S.entries()[0, 0]
        cand = sign(s00)
        if cand == 0:
            raise InvariantViolation("neither alpha sign gives a positive definite form")
        Sc = S if cand > 0 else -S
        if not Sc.is_positive_definite():
            raise InvariantViolation("neither alpha sign gives a positive definite form")
        return cand
    cand = 1 if S[0, 0] > 0 else -1
    if not _float_pd(S * cand, p.eps):
        raise InvariantViolation("neither alpha sign gives a positive definite form (float)")
    return cand


def kuga_satake_torus(p: K3Period, guard: int | None = None) -> PolarizedTorus:
    ctx = p.context
    cl.check_dense_guard(ctx.n, guard)
    J = complex_structure(p)
    c = i_action_matrix(p, J, guard)
    E1 = polarization_form(ctx, 1, guard)
    s = choose_alpha_sign(p, guard, c=c, E=E1)
    E = E1 if s > 0 else [[-x for x in row] for row in E1]
    t = PolarizedTorus(ctx.dimension, c, E, p, s, J, verified=p.exact)
    if not p.exact:
        t.warnings.append("float-mode period: Riemann relations checked within tolerance only")
    verify_torus(t)
    return t


def verify_torus(t: PolarizedTorus) -> None:
    """Assert c^2 = -I, E integral alternating, c^T E c = E and E c > 0."""
    E = t.polarization
    N = t.rank
    for i in range(N):
        if E[i][i] != 0:
            raise InvariantViolation("E is not alternating")
        for j in range(i + 1, N):
            if E[i][j] != -E[j][i]:
                raise InvariantViolation("E is not antisymmetric")
    c = t.complex_structure
    if isinstance(c, ExactMatrix):
        Ex = ExactMatrix.from_entries(E)
        if not (c @ c) == -ExactMatrix.identity(N):
            raise InvariantViolation("c^2 != -I")
        if not (c.T @ Ex @ c) == Ex:
            raise InvariantViolation("E(cx, cy) != E(x, y)")
        S = Ex @ c
        if not S.is_symmetric():
            raise InvariantViolation("E(x, cy) is not symmetric")
        if not S.is_positive_definite():
            raise InvariantViolation("E(x, cy) is not positive definite")
        return
    eps = t.period.eps
    F = np.array([[float(x) for x in row] for row in c], dtype=float)
    Ef = np.array(E, dtype=float)
    tol = float(eps) * 64 * N
    if np.abs(F @ F + np.eye(N)).max() > tol:
        raise InvariantViolation("c^2 != -I within tolerance")
    if np.abs(F.T @ Ef @ F - Ef).max() > tol * max(1.0, np.abs(Ef).max()):
        raise InvariantViolation("E(cx, cy) != E(x, y) within tolerance")
    if not _float_pd(Ef @ F, eps):
        raise InvariantViolation("E(x, cy) not positive definite within tolerance")


def polarization_type(t) -> list[int]:
    """Elementary divisors d1 | d2 | ... of the alternating form E."""
    E = t.polarization if isinstance(t, PolarizedTorus) else [list(r) for r in t]
    N = len(E)
    if N % 2:
        raise ValidationError("alternating form of odd size is degenerate")
    divs = linalg.elementary_divisors(E)
    if len(divs) != N:
        raise ValidationError("polarization is degenerate")
    divs = sorted(divs)
    pairs = divs[0::2]
    if pairs != divs[1::2]:
        raise InvariantViolation("alternating form does not have paired invariant factors")
    return [int(d) for d in pairs]


def dimension_report(n: int) -> tuple[int, int]:
    """(real dimension, complex dimension) of the Kuga-Satake torus in rank n."""
    if n < 2:
        raise ValidationError("rank must be >= 2")
    return 1 << (n - 1), 1 << (n - 2)


def metadata(p: K3Period) -> dict:
    """Data available without dense matrices: dimensions and sparse J."""
    J = complex_structure(p)
    real, cplx = dimension_report(p.context.n)
    return {
        "rank": p.context.n,
        "real_dimension": real,
        "complex_dimension": cplx,
        "J_terms": len(J.terms),
        "J": J.to_document(),
        "dense": False,
        "verified": p.exact,
    }
