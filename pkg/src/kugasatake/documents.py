"""JSON encoding with rational strings; stable byte output."""

from __future__ import annotations

import json
import math
from fractions import Fraction
from pathlib import Path

import mpmath
import numpy as np

from . import linalg
from .exceptions import ValidationError
from .lattice import QuadLattice, SubLattice, discriminant, signature
from .scalars import QuadraticNumber, format_rational, format_scalar


def plain(obj):
    """Recursively convert to JSON-ready values (exact numbers as strings)."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, int):
        return obj
    if isinstance(obj, Fraction):
        return format_rational(obj)
    if isinstance(obj, (QuadraticNumber, mpmath.mpf)):
        return format_scalar(obj)
    if isinstance(obj, float):
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        return repr(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [plain(x) for x in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        seq = sorted(obj) if isinstance(obj, (set, frozenset)) else obj
        return [plain(x) for x in seq]
    if hasattr(obj, "to_document"):
        return plain(obj.to_document())
    raise TypeError(f"cannot encode {type(obj).__name__}")


def dumps(obj) -> str:
    return json.dumps(plain(obj), sort_keys=True, indent=2) + "\n"


def load(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path} is not valid JSON: {exc}") from exc


def write(path, obj) -> None:
    Path(path).write_text(dumps(obj))


def lattice_from_document(doc: dict) -> QuadLattice:
    try:
        gram = doc["gram"]
    except (KeyError, TypeError) as exc:
        raise ValidationError("lattice document needs 'gram'") from exc
    rank = doc.get("rank", len(gram))
    if rank != len(gram):
        raise ValidationError(f"rank {rank} does not match the gram size {len(gram)}")
    for row in gram:
        for x in row:
            if isinstance(x, bool) or not isinstance(x, (int, str)):
                raise ValidationError(f"gram entries must be integers, got {x!r}")
    gram = [[int(x) for x in row] for row in gram]
    return QuadLattice(gram)


def lattice_document(L: QuadLattice) -> dict:
    return {"rank": L.rank, "gram": [list(r) for r in L.gram]}


def sublattice_report(S: SubLattice) -> dict:
    # Hermite form: canonical generators, so equal lattices give equal reports
    if S.rank:
        S = SubLattice(linalg.hermite_normal_form([list(b) for b in S.basis]), S.ambient_rank, S.ambient)
    out = {"rank": S.rank, "generators": [list(b) for b in S.basis]}
    if S.ambient is not None:
        G = S.gram()
        out["gram"] = G
        if S.rank:
            try:
                out["discriminant"] = discriminant(S)
                out["signature"] = list(signature(QuadLattice(G)))
            except ValidationError:
                out["discriminant"] = 0
        else:
            out["discriminant"] = 1
    return out
