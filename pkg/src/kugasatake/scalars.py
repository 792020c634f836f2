"""Scalar coefficients in three modes.

* rational: ``int`` / ``fractions.Fraction``
* quadratic: :class:`QuadraticNumber`, an element a + b*sqrt(D) of Q(sqrt D)
  with the positive real embedding of sqrt(D)
* float: ``mpmath.mpf`` at a declared working precision

Plain integers and fractions act as constants in every mode.  Mixing two
quadratic fields, or a quadratic number with a float, raises
:class:`ScalarModeError`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import mpmath

from .exceptions import ScalarModeError, ValidationError

RATIONAL = "rational"
QUADRATIC = "quadratic"
FLOAT = "float"


def is_squarefree(n: int) -> bool:
    if n < 1:
        return False
    k = 2
    while k * k <= n:
        if n % (k * k) == 0:
            return False
        k += 1
    return True


class QuadraticNumber:
    """Exact element a + b*sqrt(D) of a real quadratic field."""

    __slots__ = ("a", "b", "D")

    def __init__(self, a, b=0, D=2):
        if not isinstance(D, int) or D <= 1 or not is_squarefree(D):
            raise ValidationError(f"D must be a squarefree integer > 1, got {D!r}")
        self.a = Fraction(a)
        self.b = Fraction(b)
        self.D = D

    # -- coercion ---------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, QuadraticNumber):
            if other.D != self.D:
                raise ScalarModeError(
                    f"cannot mix Q(sqrt {self.D}) and Q(sqrt {other.D})")
            return other
        if isinstance(other, (int, Fraction)) or isinstance(other, Rational):
            return QuadraticNumber(other, 0, self.D)
        if isinstance(other, mpmath.mpf) or isinstance(other, float):
            raise ScalarModeError("cannot mix quadratic and float scalars")
        return NotImplemented

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadraticNumber(self.a + o.a, self.b + o.b, self.D)

    __radd__ = __add__

    def __neg__(self):
        return QuadraticNumber(-self.a, -self.b, self.D)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadraticNumber(self.a - o.a, self.b - o.b, self.D)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        if isinstance(other, int):
            return QuadraticNumber(self.a * other, self.b * other, self.D)
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadraticNumber(self.a * o.a + self.D * self.b * o.b,
                               self.a * o.b + self.b * o.a, self.D)

    __rmul__ = __mul__

    def conjugate(self) -> "QuadraticNumber":
        return QuadraticNumber(self.a, -self.b, self.D)

    def norm(self) -> Fraction:
        return self.a * self.a - self.D * self.b * self.b

    def inverse(self) -> "QuadraticNumber":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in quadratic field")
        return QuadraticNumber(self.a / n, -self.b / n, self.D)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result = QuadraticNumber(1, 0, self.D)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- order ------------------------------------------------------------
    def sign(self) -> int:
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        # opposite signs: compare a^2 with D b^2
        diff = self.a * self.a - self.D * self.b * self.b
        return sa if diff > 0 else (-sa if diff < 0 else 0)

    def __bool__(self):
        return self.a != 0 or self.b != 0

    def __eq__(self, other):
        try:
            o = self._coerce(other)
        except ScalarModeError:
            return False
        if o is NotImplemented:
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.D))

    def _cmp(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            raise TypeError("unorderable")
        return (self - o).sign()

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(self.D)

    def to_mpf(self):
        return mpmath.mpf(self.a.numerator) / self.a.denominator + (
            mpmath.mpf(self.b.numerator) / self.b.denominator) * mpmath.sqrt(self.D)

    def __repr__(self):
        return f"QuadraticNumber({self.a}, {self.b}, D={self.D})"

    def __str__(self):
        if self.b == 0:
            return str(self.a)
        return f"{self.a} + {self.b}*sqrt({self.D})"


@dataclass(frozen=True)
class ScalarMode:
    kind: str = RATIONAL
    D: int | None = None
    precision_bits: int | None = None

    def __post_init__(self):
        if self.kind not in (RATIONAL, QUADRATIC, FLOAT):
            raise ValidationError(f"unknown scalar mode {self.kind!r}")
        if self.kind == QUADRATIC and (self.D is None or self.D <= 1 or not is_squarefree(self.D)):
            raise ValidationError(f"quadratic mode needs squarefree D > 1, got {self.D}")
        if self.kind == FLOAT and (self.precision_bits is None or self.precision_bits < 2):
            raise ValidationError("float mode needs precision_bits >= 2")

    @property
    def exact(self) -> bool:
        return self.kind != FLOAT

    def coerce(self, x):
        """Bring ``x`` into this mode, refusing lossy or cross-mode moves."""
        if self.kind == RATIONAL:
            if isinstance(x, (int, Fraction)):
                return x
            if isinstance(x, QuadraticNumber) and x.b == 0:
                return x.a
            raise ScalarModeError(f"{x!r} is not rational")
        if self.kind == QUADRATIC:
            if isinstance(x, QuadraticNumber):
                if x.D != self.D:
                    raise ScalarModeError(f"expected Q(sqrt {self.D}), got Q(sqrt {x.D})")
                return x
            if isinstance(x, (int, Fraction)):
                return QuadraticNumber(x, 0, self.D)
            raise ScalarModeError(f"{x!r} is not in Q(sqrt {self.D})")
        if isinstance(x, QuadraticNumber):
            raise ScalarModeError("cannot mix quadratic and float scalars")
        if isinstance(x, Fraction):
            return mpmath.mpf(x.numerator) / x.denominator
        return mpmath.mpf(x)

    def zero(self):
        return self.coerce(0)

    def one(self):
        return self.coerce(1)


def mode_of(x) -> ScalarMode:
    if isinstance(x, QuadraticNumber):
        return ScalarMode(QUADRATIC, D=x.D)
    if isinstance(x, (mpmath.mpf, float)):
        return ScalarMode(FLOAT, precision_bits=mpmath.mp.prec)
    if isinstance(x, (int, Fraction)):
        return ScalarMode(RATIONAL)
    raise ScalarModeError(f"unsupported scalar {x!r}")


def common_mode(values) -> ScalarMode:
    """Mode shared by ``values``; integers/fractions adapt to the others."""
    found = None
    for x in values:
        m = mode_of(x)
        if m.kind == RATIONAL:
            continue
        if found is None:
            found = m
        elif found.kind != m.kind or found.D != m.D:
            raise ScalarModeError(f"mixed scalar modes {found} and {m}")
    return found or ScalarMode(RATIONAL)


def is_zero(x, eps=None) -> bool:
    if isinstance(x, mpmath.mpf):
        return abs(x) <= (eps if eps is not None else 0)
    return not x


def sign(x) -> int:
    if isinstance(x, QuadraticNumber):
        return x.sign()
    return (x > 0) - (x < 0)


def to_float(x) -> float:
    return float(x)


def rational_parts(x) -> tuple[Fraction, Fraction]:
    """Components (a, b) of x = a + b*sqrt(D); b = 0 for rationals."""
    if isinstance(x, QuadraticNumber):
        return x.a, x.b
    if isinstance(x, (int, Fraction)):
        return Fraction(x), Fraction(0)
    raise ScalarModeError(f"{x!r} has no exact rational parts")


# -- text encodings -------------------------------------------------------

def parse_rational(text) -> Fraction:
    if isinstance(text, bool):
        raise ValidationError(f"not a rational: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, str):
        try:
            return Fraction(text.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValidationError(f"not a rational: {text!r}") from exc
    raise ValidationError(f"not a rational: {text!r}")


def format_rational(x) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def parse_scalar(obj, mode: ScalarMode):
    if mode.kind == QUADRATIC:
        if isinstance(obj, (list, tuple)):
            if len(obj) != 2:
                raise ValidationError(f"quadratic scalar must be [a, b], got {obj!r}")
            return QuadraticNumber(parse_rational(obj[0]), parse_rational(obj[1]), mode.D)
        return QuadraticNumber(parse_rational(obj), 0, mode.D)
    if mode.kind == RATIONAL:
        return parse_rational(obj)
    with mpmath.workprec(mode.precision_bits):
        if isinstance(obj, str) and "/" in obj:
            q = parse_rational(obj)
            return mpmath.mpf(q.numerator) / q.denominator
        try:
            return mpmath.mpf(obj)
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"not a number: {obj!r}") from exc


def format_scalar(x):
    if isinstance(x, QuadraticNumber):
        return [format_rational(x.a), format_rational(x.b)]
    if isinstance(x, (int, Fraction)):
        return format_rational(x)
    if isinstance(x, mpmath.mpf):
        return mpmath.nstr(x, max(15, int(mpmath.mp.dps)), min_fixed=-mpmath.inf, max_fixed=mpmath.inf)
    raise ScalarModeError(f"unsupported scalar {x!r}")
