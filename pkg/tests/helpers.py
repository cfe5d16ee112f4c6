"""Memoized builders shared by the test modules."""

import itertools
from functools import lru_cache

import numpy as np

from psucentre.classalg import centre_mod_p, structure_constants
from psucentre.gfq import make_field_ctx
from psucentre.unitary import build_normalizer, build_psu, build_sylow, conjugacy_classes
from psucentre.zkncf import prime_power


@lru_cache(maxsize=None)
def field(q):
    return make_field_ctx(*prime_power(q))


@lru_cache(maxsize=None)
def psu(q):
    return build_psu(field(q))


@lru_cache(maxsize=None)
def normalizer(q):
    return build_normalizer(field(q))


@lru_cache(maxsize=None)
def sylow(q):
    return build_sylow(field(q))


@lru_cache(maxsize=None)
def classes(kind, q):
    return conjugacy_classes(psu(q) if kind == "G" else normalizer(q))


@lru_cache(maxsize=None)
def tensor(kind, q):
    H = psu(q) if kind == "G" else normalizer(q)
    return structure_constants(H, classes(kind, q))


@lru_cache(maxsize=None)
def centre(kind, q):
    return centre_mod_p(tensor(kind, q), field(q).p)


# -- random commutative algebras and brute-force oracles ------------------------

def tensor_algebras(A, B):
    """A (x) B with basis index i * dim B + j."""
    from psucentre.commalg import CommAlg
    sc = np.einsum("ikm,jln->ijklmn", A.sc, B.sc).reshape(A.dim * B.dim, A.dim * B.dim, A.dim * B.dim)
    return CommAlg(A.p, sc, np.kron(A.unit, B.unit))


def random_algebra(rng, p, max_dim=6):
    """A random commutative F_p-algebra of dimension <= max_dim, in a scrambled basis."""
    from psucentre import gfp
    from psucentre.commalg import change_basis, direct_product, monomial_algebra, polynomial_quotient

    def poly(d):
        return polynomial_quotient(list(rng.integers(0, p, size=d)) + [1], p)

    kind = rng.integers(0, 5)
    if kind == 0:
        A = poly(int(rng.integers(1, max_dim + 1)))
    elif kind == 1:
        a = int(rng.integers(1, max_dim))
        A = direct_product(poly(a), poly(int(rng.integers(1, max_dim - a + 1))))
    elif kind == 2:
        exps = [int(rng.integers(1, 4)), int(rng.integers(1, 3))]
        A = monomial_algebra(p, exps)
    elif kind == 3:
        A = tensor_algebras(poly(int(rng.integers(1, 3))), poly(int(rng.integers(1, 4))))
    else:
        a = int(rng.integers(1, 4))
        A = direct_product(monomial_algebra(p, [a]), poly(int(rng.integers(1, max_dim - a + 1))))
    d = A.dim
    while True:
        P = rng.integers(0, p, size=(d, d))
        if gfp.rank(P, p) == d:
            return change_basis(A, P)


def all_vectors(p, d):
    return np.array(list(itertools.product(range(p), repeat=d)), dtype=np.int64).reshape(-1, d)


def nilpotent_mask(A, X):
    """x^dim == 0, which characterizes nilpotents in dimension dim."""
    Y = X.copy()
    for _ in range(max(A.dim - 1, 0)):
        Y = A.mul_pairwise(Y, X)
    return ~Y.any(axis=1)


def span_mask(W, X, p):
    """Membership of each row of X in the row space of W."""
    from psucentre import gfp
    if len(W) == 0:
        return ~X.any(axis=1)
    R, piv = gfp.rref(W, p)
    return ~gfp.reduce_rows(X, R, piv, p).any(axis=1)


def brute_force_radical_agrees(A):
    """Radical from the library versus the set of nilpotents found by scanning A."""
    from psucentre.commalg import radical_basis
    X = all_vectors(A.p, A.dim)
    return bool(np.array_equal(span_mask(radical_basis(A).basis, X, A.p), nilpotent_mask(A, X)))


ACCEPTANCE = {}  # criterion number -> (passed, detail)


# -- report normalization for golden files ----------------------------------------

VOLATILE_METADATA = ("versions", "backend")


def normalize_report(report):
    """Drop the fields allowed to vary between machines and runs."""
    import copy
    r = copy.deepcopy(report)
    r.pop("timestamp", None)
    for run in r.get("runs", [r]):
        for k in VOLATILE_METADATA:
            run.get("metadata", {}).pop(k, None)
    return r
