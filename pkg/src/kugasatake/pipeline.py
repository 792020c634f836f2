"""End-to-end orchestration: period -> Picard -> torus -> Galois bounds."""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from . import brauer, documents
from .config import DEFAULT_CLOSURE_BOUND, DEFAULT_GUARD_RANK
from .correspondence import UnverifiedWarning, picard_from_period
from .exceptions import KugaSatakeError, ValidationError
from .galois import module_from_document
from .kuga_satake import kuga_satake_torus, metadata, period_from_document


@dataclass(frozen=True)
class PipelineConfig:
    mode: str = "auto"
    D: int | None = None
    precision_bits: int | None = None
    guard: int = DEFAULT_GUARD_RANK
    closure_bound: int = DEFAULT_CLOSURE_BOUND
    eps: float | None = None
    threads: int = 1
    mw: int = 1
    exclusions: tuple = ()
    check_up_to: int = 20
    include_matrices: bool = False
    out: str | None = None
    extra: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.mode not in ("auto", "rational", "quadratic", "float"):
            raise ValidationError(f"unknown mode {self.mode!r}")
        if self.guard < 2:
            raise ValidationError("guard must be >= 2")
        if self.closure_bound < 1:
            raise ValidationError("closure bound must be >= 1")
        if self.threads < 1:
            raise ValidationError("threads must be >= 1")
        if self.mode == "float":
            if self.eps is not None and self.eps <= 0:
                raise ValidationError("eps must be positive in float mode")
            if self.precision_bits is not None and self.precision_bits < 2:
                raise ValidationError("precision must be at least 2 bits")
        if self.mode == "quadratic" and self.D is None:
            raise ValidationError("quadratic mode needs D")

    @classmethod
    def from_document(cls, doc: dict) -> "PipelineConfig":
        known = {f for f in cls.__dataclass_fields__ if f != "extra"}
        unknown = set(doc) - known
        if unknown:
            raise ValidationError(f"unknown config keys: {sorted(unknown)}")
        doc = dict(doc)
        if "exclusions" in doc:
            doc["exclusions"] = tuple(int(x) for x in doc["exclusions"])
        return cls(**doc)


class _Stage:
    def __init__(self, name):
        self.name = name

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc is None:
            return False
        if isinstance(exc, KugaSatakeError):
            if exc.stage is None:
                exc.stage = self.name
            return False
        if isinstance(exc, (ValueError, TypeError, KeyError, IndexError, ZeroDivisionError)):
            raise ValidationError(str(exc), stage=self.name) from exc
        return False


def _period_doc_with_config(doc: dict, config: PipelineConfig) -> dict:
    doc = dict(doc)
    if config.mode == "quadratic" and "D" not in doc:
        doc["D"] = config.D
    if config.mode == "float":
        doc.setdefault("precision", config.precision_bits or 128)
        if config.eps is not None:
            doc.setdefault("eps", str(config.eps))
    if config.mode == "rational" and ("D" in doc or "precision" in doc):
        raise ValidationError("rational mode given a quadratic or float period")
    return doc


def run_pipeline(config: PipelineConfig, period_doc: dict, setup_doc: dict | None = None) -> dict:
    report: dict = {"config": {
        "mode": config.mode, "guard": config.guard, "closure_bound": config.closure_bound,
        "mw": config.mw, "exclusions": sorted(config.exclusions),
    }}
    unverified = []
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", UnverifiedWarning)
        with _Stage("period"):
            p = period_from_document(_period_doc_with_config(period_doc, config))
            report["period"] = {"rank": p.context.n, "mode": p.mode.kind, "exact": p.exact}
        with _Stage("picard"):
            pic = picard_from_period(p, cross_check=True, guard=config.guard)
            pic_doc = documents.sublattice_report(pic)
            pic_doc["verified"] = p.exact
            report["picard"] = pic_doc
        with _Stage("kuga_satake"):
            if p.context.n <= config.guard:
                t = kuga_satake_torus(p, guard=config.guard)
                tdoc = {
                    "rank": t.rank,
                    "complex_dimension": t.complex_dimension,
                    "alpha_sign": t.alpha_sign,
                    "polarization_type": t.to_document()["polarization_type"],
                    "verified": t.verified,
                    "dense": True,
                }
                if config.include_matrices:
                    full = t.to_document()
                    tdoc["complex_structure"] = full["complex_structure"]
                    tdoc["polarization"] = full["polarization"]
                report["torus"] = tdoc
            else:
                report["torus"] = metadata(p)
        if setup_doc is not None:
            with _Stage("brauer"):
                report["brauer"] = _brauer_report(config, setup_doc)
    for w in caught:
        if issubclass(w.category, UnverifiedWarning):
            unverified.append(str(w.message))
    report["unverified"] = sorted(set(unverified))
    return report


def _brauer_report(config: PipelineConfig, setup_doc: dict) -> dict:
    H, pic = module_from_document(setup_doc, config.closure_bound)
    if pic is None:
        raise ValidationError("Galois setup needs 'pic_basis'")
    sieve = brauer.good_prime_sieve(H, pic, None, config.exclusions, config.mw,
                                    check_up_to=config.check_up_to, workers=config.threads)
    bad = sieve["excluded"]

    def one(ell):
        T = brauer.transcendental(H, pic)
        try:
            cert = brauer.bad_prime_certificate(H, pic, T, ell)
        except ValidationError as exc:
            return {"prime": ell, "error": str(exc)}
        bound = cert["bound"]
        return {
            "prime": ell,
            "bound": "inf" if bound == math.inf else bound,
            "exponent": cert["exponent"],
            "K_exponent": cert["K_exponent"],
            "checks": cert["checks"],
        }

    if config.threads > 1 and len(bad) > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as ex:
            rows = list(ex.map(one, bad))
    else:
        rows = [one(ell) for ell in bad]
    return {"sieve": sieve, "bad_primes": rows}


def render(report: dict) -> str:
    return documents.dumps(report)


# ---------------------------------------------------------------------------
# self-test
# ---------------------------------------------------------------------------

def selftest(e8_fixture=None, stream=None, float_mode: bool = True) -> tuple[bool, list[tuple[str, bool, str]]]:
    """Run the bundled checks; returns (all passed, [(name, ok, detail)])."""
    import random
    import sys

    from . import arithmetic, correspondence, galois, kuga_satake, lattice, samples
    from .clifford import CliffordContext

    out = stream or sys.stdout
    results = []

    def check(name, fn):
        try:
            ok, detail = fn()
        except KugaSatakeError as exc:
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append((name, bool(ok), detail))
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}", file=out)

    def e8():
        gram = e8_fixture if e8_fixture is not None else lattice.e8_gram()
        L = lattice.QuadLattice(gram)
        d = lattice.discriminant(L)
        sig = lattice.signature(L)
        even = all(L.gram[i][i] % 2 == 0 for i in range(L.rank))
        ok = d == 1 and sig == (8, 0) and even
        return ok, f"E8 unimodular even positive definite: disc={d}, signature={sig}, even={even}"

    def k3():
        res = []
        for d in (1, 2):
            H, h, P = lattice.k3_period_lattice(d)
            res.append(lattice.discriminant(P) == 2 * d and lattice.signature(P.as_lattice()) == (19, 2))
        return all(res), "discriminant(P) = 2d and signature (19, 2) for d = 1, 2"

    def tori():
        rng = random.Random(7)
        for _ in range(10):
            p = samples.random_period(rng, rng.randint(3, 6), D=rng.choice([None, 2]))
            kuga_satake.kuga_satake_torus(p)
        return True, "10 random tori pass the Riemann relations"

    def picard():
        rng = random.Random(11)
        for _ in range(10):
            p = samples.random_period(rng, rng.randint(3, 5), D=rng.choice([None, 2, 3]))
            a = correspondence.picard_direct(p)
            b = correspondence.picard_commutant(p)
            if not a.same_span(b):
                return False, "Picard routes disagree"
        return True, "commutant and direct Picard routes agree on 10 periods"

    def cohomology():
        a = galois.h1(galois.GaloisModule(1, [[[-1]]])).invariant_factors == (2,)
        b = galois.h1(galois.GaloisModule(2, [[[0, 1], [1, 0]]])).is_trivial()
        return a and b, "H^1(Z/2, Z_-) = Z/2 and H^1(Z/2, Z^2 swap) = 0"

    def bad_prime():
        H = galois.GaloisModule(2, [[[0, 1], [1, 0]]], [[0, -1], [-1, 0]])
        pic = lattice.SubLattice([[1, 1]], 2, H.lattice)
        b = brauer.bad_prime_bound(H, pic, None, 2)
        return b == 2, f"U(-1)/swap bound at 2 is {b}"

    def neat():
        levels = [arithmetic.neat_congruence_level(n).prime for n in (1, 2, 3)]
        return levels == [3, 5, 11], f"neat levels {levels}"

    def floating():
        import mpmath

        ctx = CliffordContext([-1, -1, 1])
        with mpmath.workprec(128):
            s = mpmath.sqrt(2)
            p = kuga_satake.K3Period(ctx, (s, 0, mpmath.mpf(1)), (0, mpmath.mpf(1), 0))
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", UnverifiedWarning)
            pic = correspondence.picard_from_period(p)
        n_unverified = sum(1 for w in caught if issubclass(w.category, UnverifiedWarning))
        return pic.rank == 0 and n_unverified >= 1, f"float Picard candidate rank {pic.rank}, {n_unverified} unverified warning(s)"

    check("e8_fixture", e8)
    check("k3_lattice", k3)
    check("riemann_relations", tori)
    check("picard_routes", picard)
    check("group_cohomology", cohomology)
    check("bad_prime_bound", bad_prime)
    check("neat_levels", neat)
    if float_mode:
        check("float_mode_flags", floating)
    return all(ok for _, ok, _ in results), results
