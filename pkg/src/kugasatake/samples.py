"""Random and fixed inputs for tests, demos and the self-test."""

from __future__ import annotations

import random
from fractions import Fraction

from .clifford import CliffordContext
from .kuga_satake import K3Period
from .scalars import QuadraticNumber


def _pair(q, v, w):
    return sum(qi * a * b for qi, a, b in zip(q, v, w))


def _reflect(q, x, v, qv):
    c = 2 * _pair(q, x, v) / Fraction(qv)
    return tuple(a - c * b for a, b in zip(x, v))


def random_context(rng: random.Random, n: int, max_q: int = 3) -> CliffordContext:
    q = [-1, -1] + [rng.randint(1, max_q) for _ in range(n - 2)]
    return CliffordContext(q)


def random_period(rng: random.Random, n: int, D: int | None = None, reflections: int = 2,
                  max_q: int = 3, context: CliffordContext | None = None) -> K3Period:
    """Start from (e1, e2) (or a sqrt(D) pair) and apply rational reflections.

    Reflections are isometries of the rational form, so the period relations
    are preserved exactly.
    """
    if context is None:
        context = random_context(rng, n, max_q)
        # the rational form may carry general negative norms; keep e1, e2 unit
    q = context.q
    f1 = [0] * n
    f2 = [0] * n
    f1[0] = 1
    f2[1] = 1
    if D is not None:
        # f1 = sqrt(D) e1 + b e3 needs -D + q3 b^2 = -1, so take q3 = D - 1
        if n < 3:
            raise ValueError("quadratic sample periods need rank >= 3")
        q = list(q)
        q[2] = D - 1
        context = CliffordContext(q)
        f1 = [QuadraticNumber(0, 1, D), 0, 1] + [0] * (n - 3)
    f1, f2 = tuple(f1), tuple(f2)
    for _ in range(reflections):
        while True:
            v = tuple(rng.randint(-2, 2) for _ in range(n))
            qv = _pair(q, v, v)
            if qv:
                break
        f1 = _reflect(q, f1, v, qv)
        f2 = _reflect(q, f2, v, qv)
    f1 = tuple(_tidy(x) for x in f1)
    f2 = tuple(_tidy(x) for x in f2)
    return K3Period(context, f1, f2)


def _tidy(x):
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    return x


def random_period_batch(seed: int, count: int, ranks=(3, 8), D_choices=(None,)) -> list[K3Period]:
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        n = rng.randint(*ranks)
        D = rng.choice(D_choices)
        out.append(random_period(rng, n, D=D))
    return out
