"""Dense exact matrices over Q or Q(sqrt D).

A matrix is stored as ``(A + sqrt(D)*B) / den`` with ``A``, ``B`` integer
``flint.fmpz_mat`` and ``den`` a positive integer, so products of the
2^(n-1)-sized Clifford operators run in C while staying exact.
"""

from __future__ import annotations

import math
from fractions import Fraction

import flint
import numpy as np
from scipy.linalg import solve_triangular

from .exceptions import ScalarModeError
from .scalars import QuadraticNumber


class ExactMatrix:
    __slots__ = ("a", "b", "den", "D")

    def __init__(self, a: flint.fmpz_mat, b: flint.fmpz_mat | None, den: int = 1, D: int | None = None):
        if (b is None) != (D is None):
            raise ValueError("b and D must be given together")
        self.a = a
        self.b = b
        self.den = int(den)
        self.D = D

    # -- construction -----------------------------------------------------
    @classmethod
    def from_entries(cls, rows, D: int | None = None) -> "ExactMatrix":
        rows = [list(r) for r in rows]
        for r in rows:
            for x in r:
                if isinstance(x, QuadraticNumber):
                    if D is None:
                        D = x.D
                    elif D != x.D:
                        raise ScalarModeError(f"mixed Q(sqrt {D}) and Q(sqrt {x.D})")
                elif not isinstance(x, (int, Fraction)):
                    raise ScalarModeError(f"not an exact scalar: {x!r}")
        den = 1
        parts = []
        for r in rows:
            prow = []
            for x in r:
                if isinstance(x, QuadraticNumber):
                    pa, pb = x.a, x.b
                else:
                    pa, pb = Fraction(x), Fraction(0)
                den = math.lcm(den, pa.denominator, pb.denominator)
                prow.append((pa, pb))
            parts.append(prow)
        a = [[int(p[0] * den) for p in r] for r in parts]
        nrows = len(rows)
        ncols = len(rows[0]) if rows else 0
        A = flint.fmpz_mat(nrows, ncols, [x for r in a for x in r]) if nrows and ncols else flint.fmpz_mat(nrows, ncols)
        B = None
        if D is not None:
            b = [[int(p[1] * den) for p in r] for r in parts]
            B = flint.fmpz_mat(nrows, ncols, [x for r in b for x in r]) if nrows and ncols else flint.fmpz_mat(nrows, ncols)
        return cls(A, B, den, D)._normalized()

    @classmethod
    def identity(cls, n: int, D: int | None = None) -> "ExactMatrix":
        A = flint.fmpz_mat(n, n, [int(i == j) for i in range(n) for j in range(n)])
        return cls(A, flint.fmpz_mat(n, n) if D else None, 1, D)

    def _normalized(self) -> "ExactMatrix":
        if self.den == 1:
            return self
        g = self.den
        for x in self.a.entries():
            g = math.gcd(g, int(x))
            if g == 1:
                return self
        if self.b is not None:
            for x in self.b.entries():
                g = math.gcd(g, int(x))
                if g == 1:
                    return self
        if g == 1:
            return self
        b = None if self.b is None else _fdiv(self.b, g)
        return ExactMatrix(_fdiv(self.a, g), b, self.den // g, self.D)

    # -- shape / conversion ----------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return self.a.nrows(), self.a.ncols()

    def _lift(self, D):
        if D is None or self.D == D:
            return self
        if self.D is not None:
            raise ScalarModeError(f"mixed Q(sqrt {self.D}) and Q(sqrt {D})")
        r, c = self.shape
        return ExactMatrix(self.a, flint.fmpz_mat(r, c), self.den, D)

    def _common(self, other: "ExactMatrix"):
        D = self.D if self.D is not None else other.D
        if self.D is not None and other.D is not None and self.D != other.D:
            raise ScalarModeError(f"mixed Q(sqrt {self.D}) and Q(sqrt {other.D})")
        return self._lift(D), other._lift(D), D

    def entries(self) -> np.ndarray:
        """Object array of Fraction / QuadraticNumber entries."""
        r, c = self.shape
        out = np.empty((r, c), dtype=object)
        al = self.a.tolist()
        bl = self.b.tolist() if self.b is not None else None
        for i in range(r):
            for j in range(c):
                x = Fraction(int(al[i][j]), self.den)
                if bl is None:
                    out[i, j] = x if x.denominator != 1 else x.numerator
                else:
                    out[i, j] = QuadraticNumber(x, Fraction(int(bl[i][j]), self.den), self.D)
        return out

    def to_float(self) -> np.ndarray:
        r, c = self.shape
        al = self.a.tolist()
        out = np.array([[_ratio(int(x), self.den) for x in row] for row in al], dtype=float).reshape(r, c)
        if self.b is not None:
            bl = self.b.tolist()
            out = out + math.sqrt(self.D) * np.array(
                [[_ratio(int(x), self.den) for x in row] for row in bl], dtype=float).reshape(r, c)
        return out

    # -- algebra ----------------------------------------------------------
    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(self.a.transpose(), None if self.b is None else self.b.transpose(), self.den, self.D)

    @property
    def T(self):
        return self.transpose()

    def __neg__(self):
        return ExactMatrix(-self.a, None if self.b is None else -self.b, self.den, self.D)

    def __add__(self, other: "ExactMatrix"):
        x, y, D = self._common(other)
        den = math.lcm(x.den, y.den)
        fx, fy = den // x.den, den // y.den
        a = x.a * fx + y.a * fy
        b = None if D is None else x.b * fx + y.b * fy
        return ExactMatrix(a, b, den, D)._normalized()

    def __sub__(self, other: "ExactMatrix"):
        return self + (-other)

    def __matmul__(self, other: "ExactMatrix"):
        x, y, D = self._common(other)
        if D is None:
            return ExactMatrix(x.a * y.a, None, x.den * y.den)._normalized()
        a = x.a * y.a + (x.b * y.b) * D
        b = x.a * y.b + x.b * y.a
        return ExactMatrix(a, b, x.den * y.den, D)._normalized()

    def scale(self, k: int) -> "ExactMatrix":
        return ExactMatrix(self.a * k, None if self.b is None else self.b * k, self.den, self.D)._normalized()

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        if self.shape != other.shape:
            return False
        return (self - other).is_zero()

    __hash__ = None

    def is_zero(self) -> bool:
        if not self.a.is_zero():
            return False
        return self.b is None or self.b.is_zero()

    def is_symmetric(self) -> bool:
        return self == self.transpose()

    def is_antisymmetric(self) -> bool:
        return (self + self.transpose()).is_zero()

    def is_integral(self) -> bool:
        return self.den == 1 and (self.b is None or self.b.is_zero())

    # -- definiteness -----------------------------------------------------
    def leading_minor_signs(self, stop_at_nonpositive: bool = True) -> list[int]:
        """Signs of the leading principal minors (fraction-free Bareiss).

        Works over Z[sqrt D] after clearing the denominator; exact division
        uses the conjugate and the norm.
        """
        n, m = self.shape
        if n != m:
            raise ValueError("square matrix required")
        D = self.D
        A = np.array(self.a.tolist(), dtype=object).reshape(n, n)
        A = np.vectorize(int, otypes=[object])(A) if n else A
        B = None
        if D is not None:
            B = np.array(self.b.tolist(), dtype=object).reshape(n, n)
            B = np.vectorize(int, otypes=[object])(B) if n else B
        signs = []
        pa, pb = 1, 0
        for k in range(n):
            ca, cb = A[k, k], (B[k, k] if B is not None else 0)
            s = _zsqrt_sign(ca, cb, D)
            signs.append(s)
            if stop_at_nonpositive and s <= 0:
                break
            if k == n - 1:
                break
            if s == 0:
                raise ZeroDivisionError("zero leading minor; Bareiss without pivoting stops here")
            sa = A[k + 1:, k + 1:]
            col_a, row_a = A[k + 1:, k], A[k, k + 1:]
            if B is None:
                num = ca * sa - np.outer(col_a, row_a)
                A[k + 1:, k + 1:] = _exact_div(num, pa)
            else:
                sb = B[k + 1:, k + 1:]
                col_b, row_b = B[k + 1:, k], B[k, k + 1:]
                num_a = ca * sa + D * cb * sb - (np.outer(col_a, row_a) + D * np.outer(col_b, row_b))
                num_b = ca * sb + cb * sa - (np.outer(col_a, row_b) + np.outer(col_b, row_a))
                # divide by pa + pb sqrt(D)
                norm = pa * pa - D * pb * pb
                qa = num_a * pa - D * num_b * pb
                qb = num_b * pa - num_a * pb
                A[k + 1:, k + 1:] = _exact_div(qa, norm)
                B[k + 1:, k + 1:] = _exact_div(qb, norm)
            pa, pb = ca, cb
        return signs

    def positive_definite_by_minors(self) -> bool:
        n = self.shape[0]
        signs = self.leading_minor_signs()
        return len(signs) == n and all(s > 0 for s in signs)

    def congruence_certificate(self) -> bool:
        """Exact positive-definiteness certificate via an approximate inverse
        Cholesky factor.

        With ``X`` integral and lower triangular with nonzero diagonal, the
        exact product ``X S X^T`` is congruent to ``S``; if it is strictly
        diagonally dominant with positive diagonal (checked with rational
        bounds on sqrt(D)), ``S`` is positive definite.  A ``False`` result
        only means no certificate was found.
        """
        n = self.shape[0]
        if n == 0:
            return True
        F = self.to_float()
        if not np.all(np.isfinite(F)):
            return False
        try:
            L = np.linalg.cholesky(F)
        except np.linalg.LinAlgError:
            return False
        try:
            X = solve_triangular(L, np.eye(n), lower=True)
        except (np.linalg.LinAlgError, ValueError):
            return False
        big = np.max(np.abs(X))
        if not np.isfinite(big) or big == 0:
            return False
        shift = 40 - int(math.ceil(math.log2(big)))
        Xi = np.tril(np.rint(np.ldexp(X, shift)))
        if np.any(np.diag(Xi) == 0):
            return False
        Xm = flint.fmpz_mat(n, n, [int(v) for v in Xi.ravel()])
        Ma = Xm * self.a * Xm.transpose()
        rows_a = Ma.tolist()
        if self.b is None:
            for i in range(n):
                row = rows_a[i]
                diag = int(row[i])
                off = sum(abs(int(x)) for j, x in enumerate(row) if j != i)
                if diag <= off:
                    return False
            return True
        Mb = Xm * self.b * Xm.transpose()
        rows_b = Mb.tolist()
        k = 64
        r = math.isqrt(self.D << (2 * k))  # 2^k sqrt(D) lies in [r, r + 1)
        scale = 1 << k
        for i in range(n):
            ra, rb = rows_a[i], rows_b[i]
            # a*2^k + b*r is within |b| of 2^k (a + b sqrt D)
            da, db = int(ra[i]), int(rb[i])
            low = da * scale + db * r - abs(db)
            off = 0
            for j in range(n):
                if j != i:
                    bj = int(rb[j])
                    off += abs(int(ra[j]) * scale + bj * r) + abs(bj)
            if low <= off:
                return False
        return True

    def is_positive_definite(self, method: str = "auto") -> bool:
        if method == "minors":
            return self.positive_definite_by_minors()
        if method == "certificate":
            return self.is_symmetric() and self.congruence_certificate()
        if not self.is_symmetric():
            return False
        # the 1x1 leading minor is a free necessary condition
        if self.shape[0] and _zsqrt_sign(int(self.a[0, 0]), int(self.b[0, 0]) if self.b is not None else 0, self.D) <= 0:
            return False
        if self.congruence_certificate():
            return True
        return self.positive_definite_by_minors()


def _fdiv(M: flint.fmpz_mat, g: int) -> flint.fmpz_mat:
    r, c = M.nrows(), M.ncols()
    return flint.fmpz_mat(r, c, [int(x) // g for x in M.entries()])


def _ratio(num: int, den: int) -> float:
    try:
        return num / den
    except OverflowError:
        return float(Fraction(num, den))


def _zsqrt_sign(a: int, b: int, D: int | None) -> int:
    if D is None or b == 0:
        return (a > 0) - (a < 0)
    sa, sb = (a > 0) - (a < 0), (b > 0) - (b < 0)
    if sa == 0 or sa == sb:
        return sb
    diff = a * a - D * b * b
    return sa if diff > 0 else (-sa if diff < 0 else 0)


def _exact_div(num: np.ndarray, d: int) -> np.ndarray:
    q = num // d
    if np.any(q * d != num):
        raise ArithmeticError("inexact division in fraction-free elimination")
    return q
