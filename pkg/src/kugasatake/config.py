import os

DEFAULT_GUARD_RANK = 13
DEFAULT_CLOSURE_BOUND = 10_000
DEFAULT_BINOMIAL_GUARD = 5_000


def dense_guard_rank(override: int | None = None) -> int:
    """Largest lattice rank whose 2^(n-1)-square matrices may be built.

    Explicit argument beats the KS_GUARD_RANK environment variable, which
    beats the default.
    """
    if override is not None:
        return int(override)
    env = os.environ.get("KS_GUARD_RANK")
    if env:
        try:
            return int(env)
        except ValueError:
            pass
    return DEFAULT_GUARD_RANK
