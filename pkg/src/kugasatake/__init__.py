"""Exact Kuga-Satake constructions and Galois/Brauer bookkeeping for K3-type lattices."""

from .exceptions import (DegenerateLatticeError, GuardExceeded, InvariantViolation,
                         KugaSatakeError, ScalarModeError, ValidationError)
from .scalars import FLOAT, QUADRATIC, RATIONAL, QuadraticNumber, ScalarMode
from .lattice import (FiniteAbelianGroup, QuadLattice, SubLattice, discriminant, e8_gram,
                      hyperbolic_plane, k3_period_lattice, orthogonal_complement, signature)
from .clifford import CliffordContext, CliffordElement, iota, left_mult_matrix, trace
from .kuga_satake import (K3Period, PolarizedTorus, kuga_satake_torus, period_from_document,
                          polarization_type)
from .correspondence import UnverifiedWarning, picard_from_period, picard_full
from .galois import GaloisModule, h1
from .brauer import bad_prime_bound, four_term_check, good_prime_sieve
from .arithmetic import fujino_separation_check, has_finite_order, neat_congruence_level
from .pipeline import PipelineConfig, run_pipeline, selftest

__version__ = "0.1.0"

__all__ = [
    "DegenerateLatticeError", "GuardExceeded", "InvariantViolation", "KugaSatakeError",
    "ScalarModeError", "ValidationError",
    "FLOAT", "QUADRATIC", "RATIONAL", "QuadraticNumber", "ScalarMode",
    "FiniteAbelianGroup", "QuadLattice", "SubLattice", "discriminant", "e8_gram",
    "hyperbolic_plane", "k3_period_lattice", "orthogonal_complement", "signature",
    "CliffordContext", "CliffordElement", "iota", "left_mult_matrix", "trace",
    "K3Period", "PolarizedTorus", "kuga_satake_torus", "period_from_document", "polarization_type",
    "UnverifiedWarning", "picard_from_period", "picard_full",
    "GaloisModule", "h1",
    "bad_prime_bound", "four_term_check", "good_prime_sieve",
    "fujino_separation_check", "has_finite_order", "neat_congruence_level",
    "PipelineConfig", "run_pipeline", "selftest",
]
