"""Command-line front end: ``kugasatake <command> ...``.

Exit codes: 0 ok, 1 validation error, 2 guard exceeded, 3 invariant violation.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from fractions import Fraction

from . import (arithmetic, brauer, clifford, correspondence, documents, kuga_satake, lattice,
               pipeline)
from .exceptions import InvariantViolation, KugaSatakeError, ValidationError
from .galois import module_from_document


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _emit(args, obj):
    text = documents.dumps(obj)
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _int_list(text: str) -> list[int]:
    if not text:
        return []
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise ValidationError(f"expected comma separated integers, got {text!r}") from exc


# -- commands ---------------------------------------------------------------

def cmd_lattice(args):
    if args.k3 is not None:
        H, h, P = lattice.k3_period_lattice(args.k3)
        return {
            "H": {"rank": H.rank, "discriminant": lattice.discriminant(H),
                  "signature": list(lattice.signature(H))},
            "h": list(h),
            "P": documents.sublattice_report(P),
        }
    if not args.file:
        raise ValidationError("give --file or --k3")
    L = documents.lattice_from_document(documents.load(args.file))
    out = {"rank": L.rank, "discriminant": lattice.discriminant(L),
           "signature": list(lattice.signature(L))}
    if args.sublattice:
        doc = documents.load(args.sublattice)
        S = lattice.SubLattice(doc["basis"] if isinstance(doc, dict) else doc, L.rank, L)
        T = lattice.orthogonal_complement(L, S)
        out["sublattice"] = documents.sublattice_report(S)
        out["complement"] = documents.sublattice_report(T)
        if S.rank + T.rank == L.rank:
            K = lattice.cokernel_of_sum(L, S, T)
            out["cokernel"] = list(K.invariant_factors)
    return out


def cmd_clifford(args):
    a = clifford.element_from_document(documents.load(args.a))
    if args.op == "multiply":
        if not args.b:
            raise ValidationError("multiply needs --b")
        b = clifford.element_from_document(documents.load(args.b), a.ctx)
        return (a * b).to_document()
    if args.op == "iota":
        return clifford.iota(a).to_document()
    if args.op == "trace":
        return {"trace": clifford.trace(a)}
    if args.op == "matrix":
        return {"matrix": clifford.left_mult_matrix(a, args.guard)}
    raise ValidationError(f"unknown clifford operation {args.op}")


def cmd_ks(args):
    if args.action == "dims":
        real, cplx = kuga_satake.dimension_report(args.n)
        return {"rank": args.n, "real_dimension": real, "complex_dimension": cplx}
    if not args.period:
        raise ValidationError("ks build needs --period")
    p = kuga_satake.period_from_document(documents.load(args.period))
    if args.metadata or p.context.n > clifford.dense_guard_rank(args.guard):
        return kuga_satake.metadata(p)
    return kuga_satake.kuga_satake_torus(p, args.guard).to_document()


def cmd_picard(args):
    doc = documents.load(args.period)
    if args.full:
        H, h, P = lattice.k3_period_lattice(args.degree)
        ctx = clifford.CliffordContext.from_lattice(P)
        p = kuga_satake.period_from_document(doc, ctx)
        S = correspondence.picard_full(H, h, p)
    else:
        p = kuga_satake.period_from_document(doc)
        S = correspondence.picard_from_period(p, cross_check=not args.no_cross_check, guard=args.guard)
    out = documents.sublattice_report(S)
    out["verified"] = p.exact
    return out


def cmd_brauer(args):
    H, pic = module_from_document(documents.load(args.setup))
    if pic is None:
        raise ValidationError("setup needs 'pic_basis'")
    if args.action == "sieve":
        return brauer.good_prime_sieve(H, pic, None, _int_list(args.exclude), args.mw,
                                       check_up_to=args.check_up_to, workers=args.threads)
    if args.prime is None:
        raise ValidationError(f"brauer {args.action} needs --prime")
    if args.action == "bound":
        cert = brauer.bad_prime_certificate(H, pic, None, args.prime)
        return cert
    if args.action == "check":
        return brauer.four_term_check(H, pic, None, args.prime, args.n).to_document()
    raise ValidationError(f"unknown brauer action {args.action}")


def cmd_neat(args):
    return arithmetic.neat_congruence_level(args.n).to_document()


def cmd_fujino(args):
    try:
        c = [Fraction(x) for x in args.c.split(",")]
    except (ValueError, ZeroDivisionError) as exc:
        raise ValidationError(f"bad --c {args.c!r}") from exc
    res = arithmetic.fujino_separation_check(args.dim, c)
    return {"dim": args.dim, "c": c, "separates": "indeterminate" if res is None else res}


def cmd_pipeline(args):
    cfg_doc = documents.load(args.config) if args.config else {}
    cfg = pipeline.PipelineConfig.from_document(cfg_doc)
    overrides = {}
    if args.threads is not None:
        overrides["threads"] = args.threads
    if args.guard is not None:
        overrides["guard"] = args.guard
    if overrides:
        from dataclasses import replace

        cfg = replace(cfg, **overrides)
    period = documents.load(args.period)
    setup = documents.load(args.setup) if args.setup else None
    return pipeline.run_pipeline(cfg, period, setup)


def cmd_selftest(args):
    fixture = None
    if args.e8_fixture:
        doc = documents.load(args.e8_fixture)
        fixture = doc["gram"] if isinstance(doc, dict) else doc
    ok, results = pipeline.selftest(fixture)
    print(f"selftest: {sum(r[1] for r in results)}/{len(results)} passed")
    if not ok:
        failed = [name for name, good, _ in results if not good]
        raise InvariantViolation(f"selftest failed: {', '.join(failed)}")
    return None


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="kugasatake", description="Kuga-Satake constructions at desk scale.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("lattice", help="discriminant, signature, complements")
    p.add_argument("--file", help="lattice document {'rank', 'gram'}")
    p.add_argument("--sublattice", help="JSON basis (list of rows or {'basis': ...})")
    p.add_argument("--k3", type=int, help="report the K3 lattice for degree 2d")
    p.add_argument("--out")
    p.set_defaults(func=cmd_lattice)

    p = sub.add_parser("clifford", help="arithmetic in the even Clifford algebra")
    p.add_argument("op", choices=["multiply", "iota", "trace", "matrix"])
    p.add_argument("--a", required=True, help="Clifford element document")
    p.add_argument("--b")
    p.add_argument("--guard", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_clifford)

    p = sub.add_parser("ks", help="Kuga-Satake torus")
    p.add_argument("action", choices=["build", "dims"])
    p.add_argument("--period")
    p.add_argument("--n", type=int, default=21)
    p.add_argument("--guard", type=int)
    p.add_argument("--metadata", action="store_true", help="skip dense matrices")
    p.add_argument("--out")
    p.set_defaults(func=cmd_ks)

    p = sub.add_parser("picard", help="Picard lattice of a period")
    p.add_argument("--period", required=True)
    p.add_argument("--full", action="store_true", help="saturate with h inside the K3 lattice")
    p.add_argument("--degree", type=int, default=1, help="d in Q(h) = -2d (with --full)")
    p.add_argument("--guard", type=int)
    p.add_argument("--no-cross-check", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_picard)

    p = sub.add_parser("brauer", help="good-prime sieve and bad-prime bounds")
    p.add_argument("action", choices=["sieve", "bound", "check"])
    p.add_argument("--setup", required=True, help="Galois setup document")
    p.add_argument("--mw", type=int, default=1, help="Masser-Wustholz constant M")
    p.add_argument("--exclude", default="", help="comma separated primes")
    p.add_argument("--prime", type=int)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--check-up-to", type=int, default=20)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_brauer)

    p = sub.add_parser("neat", help="neat congruence level for GL_n(Z)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_neat)

    p = sub.add_parser("fujino", help="separation inequality with certified rounding")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--c", required=True, help="comma separated rationals c(1..dim)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_fujino)

    p = sub.add_parser("pipeline", help="run everything and emit one report")
    p.add_argument("--period", required=True)
    p.add_argument("--setup")
    p.add_argument("--config")
    p.add_argument("--threads", type=int)
    p.add_argument("--guard", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("selftest", help="run the bundled checks")
    p.add_argument("--e8-fixture", help="replace the E8 Gram fixture")
    p.set_defaults(func=cmd_selftest)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            result = args.func(args)
    except KugaSatakeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (KeyError, TypeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ValidationError.exit_code
    if result is not None:
        _emit(args, result)
    return 0


if __name__ == "__main__":
    sys.exit(main())
