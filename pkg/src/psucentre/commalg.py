"""Finite-dimensional commutative algebras over a prime field F_p.

An algebra is given by structure constants sc[i, j, k] (e_i e_j = sum_k
sc[i, j, k] e_k), a unit vector and optionally an augmentation functional.
Over F_p, x -> x^p is F_p-linear on a commutative algebra, so the
radical is the kernel of a power of that linear map; no extension of scalars
is needed, and radical dimensions are unchanged over the algebraic closure
because F_p is perfect.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import gfp


class AlgebraError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Subspace:
    """Row space of an RREF basis."""

    basis: np.ndarray
    pivots: tuple

    @classmethod
    def span(cls, rows, p: int, dim: int) -> "Subspace":
        rows = np.asarray(rows, dtype=np.int64).reshape(-1, dim)
        B, piv = gfp.row_space(rows, p)
        return cls(B, tuple(piv))

    @classmethod
    def zero(cls, dim: int) -> "Subspace":
        return cls(np.zeros((0, dim), dtype=np.int64), ())

    @property
    def dim(self) -> int:
        return len(self.basis)

    def contains(self, v, p: int) -> bool:
        v = np.asarray(v, dtype=np.int64).reshape(-1, self.basis.shape[1])
        return not gfp.reduce_rows(v, self.basis, list(self.pivots), p).any()

    def __eq__(self, other):
        return (isinstance(other, Subspace) and self.pivots == other.pivots
                and np.array_equal(self.basis, other.basis))

    __hash__ = None


@dataclass(frozen=True)
class LoewyProfile:
    """Dimensions of J^0, J^1, ... down to the first zero."""

    dims: tuple

    def __post_init__(self):
        d = tuple(int(x) for x in self.dims)
        object.__setattr__(self, "dims", d)
        if not d or d[-1] != 0:
            raise AlgebraError(f"profile must end in 0: {d}")
        if any(a <= b for a, b in zip(d, d[1:])):
            raise AlgebraError(f"profile must strictly decrease: {d}")

    @property
    def loewy_length(self) -> int:
        """Smallest n with J^n = 0."""
        return len(self.dims) - 1

    @property
    def top_dim(self) -> int:
        """Dimension of the last nonzero radical power."""
        return self.dims[-2] if len(self.dims) > 1 else 0

    def __iter__(self):
        return iter(self.dims)

    def __len__(self):
        return len(self.dims)

    def __getitem__(self, i):
        return self.dims[i]


@dataclass(frozen=True, eq=False)
class CommAlg:
    p: int
    sc: np.ndarray  # (d, d, d) int64 in [0, p)
    unit: np.ndarray
    aug: np.ndarray | None = None
    labels: tuple | None = None

    def __post_init__(self):
        sc = gfp.mod(self.sc, self.p)
        d = sc.shape[0]
        if sc.shape != (d, d, d):
            raise AlgebraError("structure constants must have shape (d, d, d)")
        object.__setattr__(self, "sc", sc)
        object.__setattr__(self, "unit", gfp.mod(self.unit, self.p).reshape(d))
        if self.aug is not None:
            object.__setattr__(self, "aug", gfp.mod(self.aug, self.p).reshape(d))

    @property
    def dim(self) -> int:
        return self.sc.shape[0]

    @cached_property
    def _flat(self) -> np.ndarray:
        d = self.dim
        return self.sc.reshape(d, d * d).astype(np.float64)

    # basic arithmetic ------------------------------------------------------------

    def left_matrices(self, X) -> np.ndarray:
        """For each row x of X, the matrix M with v @ M = x v; shape (n, d, d)."""
        d = self.dim
        X = np.asarray(X, dtype=np.float64).reshape(-1, d)
        return np.mod(X @ self._flat, self.p).reshape(-1, d, d)

    def mul(self, x, y) -> np.ndarray:
        x = np.asarray(x, dtype=np.int64)
        y = np.asarray(y, dtype=np.int64)
        return self.mul_pairwise(x.reshape(1, -1), y.reshape(1, -1))[0]

    def mul_pairwise(self, X, Y, chunk: int = 512) -> np.ndarray:
        """Row-wise products X[u] * Y[u]."""
        d = self.dim
        X = np.asarray(X, dtype=np.int64).reshape(-1, d)
        Y = np.asarray(Y, dtype=np.int64).reshape(-1, d)
        out = np.empty((len(X), d), dtype=np.int64)
        for s in range(0, len(X), chunk):
            L = self.left_matrices(X[s:s + chunk])
            out[s:s + chunk] = np.mod((Y[s:s + chunk, None, :].astype(np.float64) @ L)[:, 0, :], self.p)
        return out

    def mul_all(self, X, Y, chunk: int = 64) -> np.ndarray:
        """All products X[u] * Y[v], as rows (u-major)."""
        d = self.dim
        X = np.asarray(X, dtype=np.int64).reshape(-1, d)
        Y = np.asarray(Y, dtype=np.float64).reshape(-1, d)
        parts = []
        for s in range(0, len(X), chunk):
            L = self.left_matrices(X[s:s + chunk])
            parts.append(np.mod(Y @ L, self.p).reshape(-1, d).astype(np.int64))
        return np.vstack(parts) if parts else np.zeros((0, d), dtype=np.int64)

    def power(self, x, n: int) -> np.ndarray:
        result = self.unit.copy()
        base = np.asarray(x, dtype=np.int64) % self.p
        while n:
            if n & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            n >>= 1
        return result

    def augment(self, x) -> int:
        if self.aug is None:
            raise AlgebraError("no augmentation attached")
        return int(np.dot(np.asarray(x, dtype=np.int64), self.aug) % self.p)

    def basis(self) -> np.ndarray:
        return np.eye(self.dim, dtype=np.int64)

    @cached_property
    def frobenius(self) -> np.ndarray:
        """Matrix F with (x @ F) = x^p."""
        E = self.basis()
        Y = E.copy()
        for _ in range(self.p - 1):
            Y = self.mul_pairwise(Y, E)
        return Y

    # checks ----------------------------------------------------------------------

    def check(self, associativity: str = "auto", samples: int = 64, seed: int = 0) -> None:
        """Raise AlgebraError unless commutative, unital, associative (and aug multiplicative)."""
        if not np.array_equal(self.sc, self.sc.transpose(1, 0, 2)):
            raise AlgebraError("not commutative")
        E = self.basis()
        if not np.array_equal(self.mul_pairwise(np.broadcast_to(self.unit, E.shape), E), E):
            raise AlgebraError("unit is not an identity")
        d = self.dim
        if associativity == "auto":
            associativity = "full" if d <= 40 else "sampled"
        if associativity == "full":
            lhs = np.einsum("ijm,mkl->ijkl", self.sc, self.sc) % self.p
            rhs = np.einsum("jkm,iml->ijkl", self.sc, self.sc) % self.p
            if not np.array_equal(lhs, rhs):
                raise AlgebraError("not associative")
        elif associativity == "sampled":
            rng = np.random.default_rng(seed)
            X, Y, Z = (rng.integers(0, self.p, size=(samples, d)) for _ in range(3))
            if not np.array_equal(self.mul_pairwise(self.mul_pairwise(X, Y), Z),
                                  self.mul_pairwise(X, self.mul_pairwise(Y, Z))):
                raise AlgebraError("not associative")
        if self.aug is not None:
            if self.augment(self.unit) != 1 % self.p:
                raise AlgebraError("aug(unit) != 1")
            prod = np.einsum("ijk,k->ij", self.sc, self.aug) % self.p
            if not np.array_equal(prod, np.outer(self.aug, self.aug) % self.p):
                raise AlgebraError("augmentation is not multiplicative")

    # constructors ------------------------------------------------------------------

    @classmethod
    def from_products(cls, p: int, dim: int, product, unit, aug=None, labels=None) -> "CommAlg":
        """Build from a function product(i, j) -> length-dim coefficient vector."""
        sc = np.zeros((dim, dim, dim), dtype=np.int64)
        for i in range(dim):
            for j in range(dim):
                sc[i, j] = np.asarray(product(i, j), dtype=np.int64)
        return cls(p, sc, np.asarray(unit), None if aug is None else np.asarray(aug), labels)


def polynomial_quotient(coeffs, p: int) -> CommAlg:
    """F_p[x]/(f) for monic f given by coefficients (low degree first)."""
    f = [int(c) % p for c in coeffs]
    n = len(f) - 1
    if n < 1 or f[-1] != 1:
        raise AlgebraError("need a monic polynomial of degree >= 1")
    # x^k mod f for k < 2n - 1
    red = [np.eye(n, dtype=np.int64)[k] for k in range(n)]
    for k in range(n, 2 * n - 1):
        prev = red[-1]
        shifted = np.concatenate([[0], prev[:-1]])
        top = prev[-1]
        red.append((shifted - top * np.array(f[:n])) % p)
    sc = np.zeros((n, n, n), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            sc[i, j] = red[i + j]
    unit = np.zeros(n, dtype=np.int64)
    unit[0] = 1
    aug = None
    return CommAlg(p, sc, unit, aug)


def truncated_polynomial(p: int, n: int) -> CommAlg:
    """F_p[x]/x^n."""
    return polynomial_quotient([0] * n + [1], p)


def monomial_algebra(p: int, exps) -> CommAlg:
    """F_p[x_1..x_k]/(x_i^{e_i}) with monomial basis (lexicographic)."""
    import itertools
    exps = [int(e) for e in exps]
    mons = list(itertools.product(*[range(e) for e in exps]))
    pos = {m: i for i, m in enumerate(mons)}
    d = len(mons)
    sc = np.zeros((d, d, d), dtype=np.int64)
    for i, a in enumerate(mons):
        for j, b in enumerate(mons):
            c = tuple(x + y for x, y in zip(a, b))
            if all(x < e for x, e in zip(c, exps)):
                sc[i, j, pos[c]] = 1
    unit = np.zeros(d, dtype=np.int64)
    unit[pos[tuple([0] * len(exps))]] = 1
    return CommAlg(p, sc, unit)


def direct_product(A: CommAlg, B: CommAlg) -> CommAlg:
    if A.p != B.p:
        raise AlgebraError("characteristics differ")
    a, b = A.dim, B.dim
    d = a + b
    sc = np.zeros((d, d, d), dtype=np.int64)
    sc[:a, :a, :a] = A.sc
    sc[a:, a:, a:] = B.sc
    unit = np.concatenate([A.unit, B.unit])
    aug = None
    if A.aug is not None and B.aug is not None:
        aug = np.concatenate([A.aug, np.zeros(b, dtype=np.int64)])
    return CommAlg(A.p, sc, unit, aug)


def change_basis(A: CommAlg, P) -> CommAlg:
    """The same algebra in the basis given by the rows of the invertible matrix P."""
    p, d = A.p, A.dim
    P = gfp.mod(P, p)
    if gfp.rank(P, p) != d:
        raise AlgebraError("change of basis is singular")
    Pinv = _inverse(P, p)
    prods = A.mul_all(P, P)  # (d*d, d) in old coordinates
    sc = gfp.matmul(prods, Pinv, p).reshape(d, d, d)
    unit = gfp.matmul(A.unit.reshape(1, -1), Pinv, p)[0]
    aug = None if A.aug is None else gfp.matmul(P, A.aug.reshape(-1, 1), p)[:, 0]
    return CommAlg(p, sc, unit, aug)


def _inverse(P, p: int) -> np.ndarray:
    d = len(P)
    R, piv = gfp.rref(np.hstack([P, np.eye(d, dtype=np.int64)]), p)
    if piv[:d] != list(range(d)):
        raise AlgebraError("singular")
    return R[:, d:]


# radical and Loewy series ---------------------------------------------------------

def radical_basis(A: CommAlg) -> Subspace:
    """J(A) = ker(x -> x^(p^m)) with p^m >= dim A."""
    d, p = A.dim, A.p
    if d == 0:
        return Subspace.zero(0)
    Fm = A.frobenius
    power = p
    while power < d:
        Fm = gfp.matmul(Fm, A.frobenius, p)
        power *= p
    K = gfp.left_nullspace(Fm, p)
    return Subspace.span(K, p, d)


def ideal_closure(A: CommAlg, W: Subspace) -> Subspace:
    """Smallest ideal containing W."""
    p = A.p
    while W.dim:
        prods = A.mul_all(W.basis, A.basis())
        B, piv = gfp.row_space(prods, p, W=W.basis)
        if len(B) == W.dim:
            return W
        W = Subspace(B, tuple(piv))
    return W


def ideal_product(A: CommAlg, I: Subspace, J: Subspace) -> Subspace:
    """The ideal generated by all products u v, u in I, v in J."""
    d, p = A.dim, A.p
    if I.dim == 0 or J.dim == 0:
        return Subspace.zero(d)
    prods = A.mul_all(I.basis, J.basis)
    B, piv = gfp.row_space(prods, p)
    return ideal_closure(A, Subspace(B, tuple(piv)))


def radical_powers(A: CommAlg) -> list[Subspace]:
    """[J^1, J^2, ...] ending with the zero subspace."""
    J = radical_basis(A)
    out = [J]
    cur = J
    while cur.dim:
        cur = ideal_product(A, cur, J)
        if cur.dim >= out[-1].dim and cur.dim:
            raise AlgebraError("radical powers stopped decreasing")
        out.append(cur)
    return out


def loewy_profile(A: CommAlg) -> LoewyProfile:
    if A.dim == 0:
        return LoewyProfile((0,))
    return LoewyProfile((A.dim,) + tuple(S.dim for S in radical_powers(A)))


def semisimplicity_witness(A: CommAlg, J: Subspace) -> bool:
    """x^p in J implies x in J, i.e. A/J has no nonzero nilpotents."""
    p = A.p
    F = A.frobenius
    # x with x @ F in J: stack [F | J-test] via reduction
    d = A.dim
    if J.dim == d:
        return True
    # the map A -> A/J induced by F must be injective on A/J
    red = gfp.reduce_rows(F, J.basis, list(J.pivots), p)
    K = gfp.left_nullspace(red, p)
    return all(J.contains(k, p) for k in K)


# blocks --------------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class BlockDecomp:
    idempotents: list
    principal_index: int | None

    @property
    def n_blocks(self) -> int:
        return len(self.idempotents)


def is_idempotent(A: CommAlg, e) -> bool:
    e = np.asarray(e, dtype=np.int64) % A.p
    return np.array_equal(A.mul(e, e), e)


def block_decompose(A: CommAlg) -> BlockDecomp:
    """Primitive idempotents of A.

    The fixed points of x -> x^p form the span of the primitive idempotents
    (each local block contributes F_p 1_block by Hensel's lemma), so they can be
    split there directly: for b in that subalgebra and lam in F_p,
    1 - (b - lam)^(p-1) is the idempotent supported where b takes the value lam.
    """
    p, d = A.p, A.dim
    if d == 0:
        return BlockDecomp([], None)
    fixed = gfp.left_nullspace(gfp.mod(A.frobenius - np.eye(d, dtype=np.int64), p), p)
    want = len(fixed)
    idems = [A.unit.copy()]
    for b in Subspace.span(fixed, p, d).basis:
        if len(idems) == want:
            break
        nxt = []
        for e in idems:
            for lam in range(p):
                shifted = (b - lam * A.unit) % p
                f = (A.unit - A.power(shifted, p - 1)) % p
                part = A.mul(e, f)
                if part.any():
                    nxt.append(part)
        idems = nxt
    if len(idems) != want:
        raise AlgebraError("idempotent splitting did not separate all blocks")
    idems.sort(key=lambda v: tuple(v))
    _check_blocks(A, idems)
    principal = None
    if A.aug is not None:
        hits = [i for i, e in enumerate(idems) if A.augment(e) == 1]
        if len(hits) != 1:
            raise AlgebraError("augmentation does not pick out a unique block")
        principal = hits[0]
    return BlockDecomp(idems, principal)


def _check_blocks(A: CommAlg, idems) -> None:
    p = A.p
    total = np.zeros(A.dim, dtype=np.int64)
    for i, e in enumerate(idems):
        total = (total + e) % p
        for j, f in enumerate(idems):
            prod = A.mul(e, f)
            if i == j and not np.array_equal(prod, e):
                raise AlgebraError("block idempotent is not idempotent")
            if i != j and prod.any():
                raise AlgebraError("block idempotents not orthogonal")
    if not np.array_equal(total, A.unit):
        raise AlgebraError("block idempotents do not sum to 1")


def corner_algebra(A: CommAlg, e) -> CommAlg:
    """eA with unit e, in the RREF basis of the image of multiplication by e."""
    p = A.p
    e = np.asarray(e, dtype=np.int64) % p
    if not is_idempotent(A, e):
        raise AlgebraError("e is not idempotent")
    W, piv = gfp.row_space(A.left_matrices(e)[0], p)
    k = len(W)
    if k == 0:
        return CommAlg(p, np.zeros((0, 0, 0), dtype=np.int64), np.zeros(0, dtype=np.int64),
                       None if A.aug is None else np.zeros(0, dtype=np.int64))
    prods = A.mul_all(W, W)
    sc = gfp.coordinates(prods, W, piv, p).reshape(k, k, k)
    unit = gfp.coordinates(e.reshape(1, -1), W, piv, p)[0]
    aug = None if A.aug is None else gfp.matmul(W, A.aug.reshape(-1, 1), p)[:, 0]
    return CommAlg(p, sc, unit, aug)


def principal_block(A: CommAlg) -> tuple[CommAlg, BlockDecomp]:
    bd = block_decompose(A)
    if bd.principal_index is None:
        raise AlgebraError("augmentation needed for the principal block")
    return corner_algebra(A, bd.idempotents[bd.principal_index]), bd
