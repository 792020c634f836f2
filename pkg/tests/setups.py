"""Random finite group actions on lattices for the Galois and Brauer tests."""

import random

from kugasatake import linalg
from kugasatake.brauer import _rational_inverse
from kugasatake.galois import GaloisModule, invariants
from kugasatake.lattice import SubLattice


def random_unimodular(rng, r, steps=None):
    U = linalg.identity(r)
    for _ in range(steps if steps is not None else 2 * r):
        i, j = rng.sample(range(r), 2) if r > 1 else (0, 0)
        if i == j:
            continue
        c = rng.choice([-2, -1, 1, 2])
        for k in range(r):
            U[k][i] += c * U[k][j]
    return U


def unimodular_inverse(U):
    return [[int(x) for x in row] for row in _rational_inverse(U)]


def signed_permutation(rng, blocks, r):
    """Signed permutation preserving each block of coordinates."""
    g = [[0] * r for _ in range(r)]
    for block in blocks:
        image = block[:]
        rng.shuffle(image)
        for src, dst in zip(block, image):
            g[dst][src] = rng.choice([-1, 1])
    return g


def conjugate(g, U, Ui):
    return linalg.matmul(linalg.matmul(Ui, g), U)


def random_cyclic_module(rng, max_rank=6):
    r = rng.randint(1, max_rank)
    g = signed_permutation(rng, [list(range(r))], r)
    U = random_unimodular(rng, r)
    return conjugate(g, U, unimodular_inverse(U))


def _blocks(rng, r):
    coords = list(range(r))
    rng.shuffle(coords)
    blocks = []
    while coords:
        k = rng.randint(1, len(coords))
        blocks.append(sorted(coords[:k]))
        coords = coords[k:]
    return blocks


def random_stable_setup(rng, max_rank=6, trivial_on_pic=True, change_basis=True):
    """(H, pic) with Gamma preserving a diagonal form and pic inside H^Gamma.

    Returns None when the draw has no usable invariant sublattice.
    """
    r = rng.randint(2, max_rank)
    blocks = _blocks(rng, r)
    weights = [0] * r
    for b in blocks:
        w = rng.choice([1, -1, 2, 3])
        for i in b:
            weights[i] = w
    G = [[weights[i] if i == j else 0 for j in range(r)] for i in range(r)]
    gens = [signed_permutation(rng, blocks, r) for _ in range(rng.randint(1, 2))]
    M = GaloisModule(r, gens, G)
    inv = invariants(M)
    if inv.rank == 0:
        return None
    k = rng.randint(1, inv.rank)
    vecs = []
    for _ in range(k):
        coeffs = [rng.randint(-2, 2) for _ in inv.basis]
        vecs.append([sum(c * b[i] for c, b in zip(coeffs, inv.basis)) for i in range(r)])
    if linalg.rank(vecs) == 0:
        return None
    basis = linalg.saturation(vecs, r)
    gram = linalg.matmul(linalg.matmul(basis, G), linalg.transpose(basis))
    if linalg.det(gram) == 0:
        return None
    if change_basis:
        U = random_unimodular(rng, r)
        Ui = unimodular_inverse(U)
        gens = [conjugate(g, U, Ui) for g in gens]
        G = linalg.matmul(linalg.matmul(linalg.transpose(U), G), U)
        basis = [[sum(Ui[i][j] * v[j] for j in range(r)) for i in range(r)] for v in basis]
    H = GaloisModule(r, gens, G)
    pic = SubLattice(basis, r, H.lattice)
    return H, pic


def stable_setups(seed, count, **kw):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        s = random_stable_setup(rng, **kw)
        if s is not None:
            out.append(s)
    return out
