"""Closed-form model of the centre of the integral group ring of N, the Sylow
normalizer in PSU(3, q).

The class-sum basis is indexed by coset labels, written as discrete logs of
canonical coset representatives (log base a fixed generator of F_{q^2}^x):

* ``D_x`` for x in F_{q^2}^x / Gamma (D at log 0 is the identity),
* ``T_x`` for x in Psi / Gamma (T at log 0 is T_1),
* ``U_y`` for y in F_{q^2}^x / L.

Only q is needed to build the multiplication table: x in Psi iff its log is a
multiple of q - 1, Gamma is the subgroup of logs divisible by
(q^2 - 1)/gamma, and products of representatives are sums of logs.  The
table is assembled block by block (DD, DT, DU, TT, TU, UU); inside a block
each case is a boolean mask over the index grid, and the masks are required
to partition the grid, so an unhandled or doubly handled pair is an error.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import gfp
from .commalg import CommAlg
from .gfq import FieldCtx, prime_factors, special_elements

MAX_DENSE = 400


class CaseAnalysisError(AssertionError):
    """A pair of labels matched no product rule, or more than one."""


def prime_power(q: int) -> tuple[int, int]:
    """(p, r) with q = p^r; raises ValueError otherwise."""
    if q < 2:
        raise ValueError(f"{q} is not a prime power")
    fs = prime_factors(q)
    if len(fs) != 1:
        raise ValueError(f"{q} is not a prime power")
    p = fs[0]
    r = round(math.log(q, p))
    while p ** r < q:
        r += 1
    while p ** r > q:
        r -= 1
    if p ** r != q:
        raise ValueError(f"{q} is not a prime power")
    return p, r


def gamma_of(q: int) -> int:
    return math.gcd(3, q + 1)


@dataclass(frozen=True, order=True)
class BasisLabel:
    kind: str  # "D", "T" or "U"
    log: int

    def __str__(self):
        return f"{self.kind}[{self.log}]"


def reps(q: int) -> list[BasisLabel]:
    """Labels in basis order: D over F^x/Gamma, T over Psi/Gamma, U over F^x/L."""
    prime_power(q)
    g = gamma_of(q)
    per = (q * q - 1) // g
    out = [BasisLabel("D", e) for e in range(per)]
    out += [BasisLabel("T", (q - 1) * j) for j in range((q + 1) // g)]
    out += [BasisLabel("U", e) for e in range(g)]
    return out


def n_classes(q: int) -> int:
    g = gamma_of(q)
    return (q * q + q) // g + g


def class_size(q: int, label: BasisLabel) -> int:
    g = gamma_of(q)
    if label.kind == "D":
        if label.log == 0:
            return 1
        return q ** 2 if label.log % (q - 1) == 0 else q ** 3
    if label.kind == "T":
        return q - 1 if label.log == 0 else q * q * (q - 1)
    if label.kind == "U":
        return q * (q * q - 1) // g
    raise ValueError(f"bad label kind {label.kind!r}")


def lmn(q: int) -> tuple[int, int, int]:
    if gamma_of(q) != 3:
        raise ValueError("l, m, n are defined only when 3 divides q + 1")
    k = (q + 1) // 3
    return k * k - 1, (q * q - q - 2) // 9, k * k


def lmn_bruteforce(F: FieldCtx) -> tuple[int, int, int]:
    """Exhaustive counts with t the generator (log 1, a non-cube)."""
    if F.gamma != 3:
        raise ValueError("l, m, n are defined only when 3 divides q + 1")

    def in_L(x):
        return x != 0 and F.dlog(x) % 3 == 0

    t = F.elem(1)
    Lset = [x for x in range(1, F.order) if in_L(x)]
    l = sum(1 for v in Lset if in_L(F.sub(1, v)))
    m = sum(1 for v in Lset if in_L(F.sub(t, v)))
    n = sum(1 for v in Lset if in_L(F.sub(t, F.div(v, t))))
    return l, m, n


def psi_cube_fact(F: FieldCtx) -> bool:
    """For z in Psi: z^3 = 1 iff z in Gamma.  (Used for products inside Psi.)"""
    for z in range(1, F.order):
        if F.pow(z, F.q + 1) != 1:
            continue
        in_gamma = F.dlog(z) % (F.n_units // F.gamma) == 0
        if (F.pow(z, 3) == 1) != in_gamma:
            return False
    return True


# -- multiplication table ------------------------------------------------------

class _Builder:
    def __init__(self, q: int):
        self.q = q
        self.g = gamma_of(q)
        self.per = (q * q - 1) // self.g  # period of logs modulo Gamma
        self.nD = self.per
        self.nT = (q + 1) // self.g
        self.nU = self.g
        self.parts: list[tuple] = []

    # label indices from canonical logs
    def iD(self, e):
        return np.asarray(e)

    def iT(self, e):
        return self.nD + np.asarray(e) // (self.q - 1)

    def iU(self, e):
        return self.nD + self.nT + np.asarray(e)

    def cat(self, e):
        """0: in Gamma, 1: in Psi - Gamma, 2: outside Psi (e canonical mod Gamma)."""
        e = np.asarray(e)
        return np.where(e == 0, 0, np.where(e % (self.q - 1) == 0, 1, 2)).astype(np.int8)

    def emit(self, I, J, K, c):
        # int32 indices keep the q = 64 table (about 1.7e7 entries) affordable
        I, J, K = (np.asarray(a, dtype=np.int32).ravel() for a in (I, J, K))
        c = np.broadcast_to(np.asarray(c, dtype=np.int64), I.shape).ravel()
        K = np.broadcast_to(K, I.shape).ravel()
        self.parts.append((I, J, K, c))

    def emit_sum_u(self, I, J, c):
        for e in range(self.g):
            self.emit(I, J, np.full(len(I), self.iU(e)), c)

    def partition(self, name, masks, shape):
        hits = np.zeros(shape, dtype=np.int8)
        for m in masks:
            hits += m
        if (hits != 1).any():
            bad = np.argwhere(hits != 1)[0]
            raise CaseAnalysisError(f"{name}: cell {tuple(bad)} matched {hits[tuple(bad)]} rules")


def _build_entries(q: int):
    b = _Builder(q)
    q2, q3 = q * q, q ** 3
    g, per = b.g, b.per
    dlogs = np.arange(b.nD, dtype=np.int32)
    tlogs = (q - 1) * np.arange(b.nT, dtype=np.int32)
    ulogs = np.arange(b.nU, dtype=np.int32)
    idD = b.iD(0)
    idT1 = b.iT(0)

    # D x D
    X, Y = np.meshgrid(dlogs, dlogs, indexing="ij")
    S = (X + Y) % per
    cx, cy, cs = b.cat(X), b.cat(Y), b.cat(S)
    I, J = b.iD(X), b.iD(Y)
    rules = {
        "x identity": cx == 0,
        "y identity": (cy == 0) & (cx != 0),
        "out*out -> out": (cx == 2) & (cy == 2) & (cs == 2),
        "out*out -> psi-gamma": (cx == 2) & (cy == 2) & (cs == 1),
        "out*out -> gamma": (cx == 2) & (cy == 2) & (cs == 0),
        "psi*out": ((cx == 1) & (cy == 2) | (cx == 2) & (cy == 1)) & (cs == 2),
        "psi*psi -> psi-gamma": (cx == 1) & (cy == 1) & (cs == 1),
        "psi*psi -> gamma": (cx == 1) & (cy == 1) & (cs == 0),
    }
    b.partition("DD", rules.values(), X.shape)
    m = rules["x identity"]
    b.emit(I[m], J[m], b.iD(Y[m]), 1)
    m = rules["y identity"]
    b.emit(I[m], J[m], b.iD(X[m]), 1)
    m = rules["out*out -> out"]
    b.emit(I[m], J[m], b.iD(S[m]), q3)
    m = rules["out*out -> psi-gamma"]
    b.emit(I[m], J[m], b.iD(S[m]), q3)
    b.emit(I[m], J[m], b.iT(S[m]), q3)
    m = rules["out*out -> gamma"]
    b.emit(I[m], J[m], idD, q3)
    b.emit(I[m], J[m], idT1, q3)
    b.emit_sum_u(I[m], J[m], q3)
    m = rules["psi*out"]
    b.emit(I[m], J[m], b.iD(S[m]), q2)
    m = rules["psi*psi -> psi-gamma"]
    b.emit(I[m], J[m], b.iD(S[m]), 1)
    b.emit(I[m], J[m], b.iT(S[m]), q + 1)
    m = rules["psi*psi -> gamma"]
    b.emit(I[m], J[m], idD, q2)
    b.emit_sum_u(I[m], J[m], q)

    # D x T and T x D
    X, Y = np.meshgrid(dlogs, tlogs, indexing="ij")
    S = (X + Y) % per
    cx, cy, cs = b.cat(X), b.cat(Y), b.cat(S)
    rules = {
        "x identity": cx == 0,
        "T1, x out": (cx == 2) & (cy == 0),
        "T1, x psi": (cx == 1) & (cy == 0),
        "Ty, x out": (cx == 2) & (cy == 1) & (cs == 2),
        "Ty, x psi, xy not gamma": (cx == 1) & (cy == 1) & (cs == 1),
        "Ty, x psi, xy gamma": (cx == 1) & (cy == 1) & (cs == 0),
    }
    b.partition("DT", rules.values(), X.shape)
    DI, TJ = b.iD(X), b.iT(Y)
    for flip in (False, True):
        I, J = (TJ, DI) if flip else (DI, TJ)
        m = rules["x identity"]
        b.emit(I[m], J[m], b.iT(Y[m]), 1)
        m = rules["T1, x out"]
        b.emit(I[m], J[m], b.iD(X[m]), q - 1)
        m = rules["T1, x psi"]
        b.emit(I[m], J[m], b.iT(X[m]), 1)
        m = rules["Ty, x out"]
        b.emit(I[m], J[m], b.iD(S[m]), q2 * (q - 1))
        m = rules["Ty, x psi, xy not gamma"]
        b.emit(I[m], J[m], b.iD(S[m]), q2 - 1)
        b.emit(I[m], J[m], b.iT(S[m]), q2 - q - 1)
        m = rules["Ty, x psi, xy gamma"]
        b.emit(I[m], J[m], idT1, q2)
        b.emit_sum_u(I[m], J[m], q * (q - 1))

    # D x U and U x D
    X, Y = np.meshgrid(dlogs, ulogs, indexing="ij")
    cx = b.cat(X)
    rules = {"x identity": cx == 0, "x out": cx == 2, "x psi": cx == 1}
    b.partition("DU", rules.values(), X.shape)
    DI, UJ = b.iD(X), b.iU(Y)
    for flip in (False, True):
        I, J = (UJ, DI) if flip else (DI, UJ)
        m = rules["x identity"]
        b.emit(I[m], J[m], b.iU(Y[m]), 1)
        m = rules["x out"]
        b.emit(I[m], J[m], b.iD(X[m]), q * (q2 - 1) // g)
        m = rules["x psi"]
        b.emit(I[m], J[m], b.iD(X[m]), (q2 - 1) // g)
        b.emit(I[m], J[m], b.iT(X[m]), (q2 - 1) // g)

    # T x T
    X, Y = np.meshgrid(tlogs, tlogs, indexing="ij")
    S = (X + Y) % per
    cx, cy, cs = b.cat(X), b.cat(Y), b.cat(S)
    rules = {
        "T1 T1": (cx == 0) & (cy == 0),
        "Tx T1": (cx == 1) & (cy == 0),
        "T1 Ty": (cx == 0) & (cy == 1),
        "Tx Ty, xy gamma": (cx == 1) & (cy == 1) & (cs == 0),
        "Tx Ty, xy not gamma": (cx == 1) & (cy == 1) & (cs == 1),
    }
    b.partition("TT", rules.values(), X.shape)
    I, J = b.iT(X), b.iT(Y)
    m = rules["T1 T1"]
    b.emit(I[m], J[m], idD, q - 1)
    b.emit(I[m], J[m], idT1, q - 2)
    for key, Z in (("Tx T1", X), ("T1 Ty", Y)):
        m = rules[key]
        b.emit(I[m], J[m], b.iD(Z[m]), q - 1)
        b.emit(I[m], J[m], b.iT(Z[m]), q - 2)
    m = rules["Tx Ty, xy gamma"]
    b.emit(I[m], J[m], idD, q2 * (q - 1))
    b.emit(I[m], J[m], idT1, q2 * (q - 2))
    b.emit_sum_u(I[m], J[m], q * (q - 1) ** 2)
    m = rules["Tx Ty, xy not gamma"]
    b.emit(I[m], J[m], b.iD(S[m]), (q - 1) * (q2 - q - 1))
    b.emit(I[m], J[m], b.iT(S[m]), q * (q - 1) ** 2 + 1)

    # T x U and U x T
    X, Y = np.meshgrid(tlogs, ulogs, indexing="ij")
    cx = b.cat(X)
    rules = {"T1": cx == 0, "Tx": cx == 1}
    b.partition("TU", rules.values(), X.shape)
    TI, UJ = b.iT(X), b.iU(Y)
    for flip in (False, True):
        I, J = (UJ, TI) if flip else (TI, UJ)
        m = rules["T1"]
        b.emit(I[m], J[m], b.iU(Y[m]), q - 1)
        m = rules["Tx"]
        c = (q2 - 1) * (q - 1) // g
        b.emit(I[m], J[m], b.iD(X[m]), c)
        b.emit(I[m], J[m], b.iT(X[m]), c)

    # U x U
    X, Y = np.meshgrid(ulogs, ulogs, indexing="ij")
    I, J = b.iU(X), b.iU(Y)
    size_u = q * (q2 - 1) // g
    if g == 1:
        rules = {"U1 U1": np.ones(X.shape, dtype=bool)}
        b.partition("UU", rules.values(), X.shape)
        b.emit(I, J, idD, size_u)
        b.emit(I, J, idT1, size_u)
        b.emit(I, J, b.iU(X), q * (q2 - 2))
    else:
        l, mm, n = lmn(q)
        rules = {"Ux Ux": X == Y, "Ux Uy": X != Y}
        b.partition("UU", rules.values(), X.shape)
        m = rules["Ux Ux"]
        b.emit(I[m], J[m], idD, size_u)
        b.emit(I[m], J[m], idT1, size_u)
        b.emit(I[m], J[m], b.iU(X[m]), q * l)
        b.emit(I[m], J[m], b.iU((X[m] + 1) % 3), q * mm)
        b.emit(I[m], J[m], b.iU((X[m] + 2) % 3), q * mm)
        m = rules["Ux Uy"]
        b.emit(I[m], J[m], b.iU(3 - X[m] - Y[m]), q * n)
        b.emit(I[m], J[m], b.iU(X[m]), q * mm)
        b.emit(I[m], J[m], b.iU(Y[m]), q * mm)

    n = b.nD + b.nT + b.nU
    key = np.concatenate([(I.astype(np.int64) * n + J) * n + K for I, J, K, _ in b.parts])
    C = np.concatenate([c for *_, c in b.parts])
    b.parts.clear()
    # merge duplicates (none expected, but sums are the honest combination)
    order = np.argsort(key, kind="stable")
    key, C = key[order], C[order]
    del order
    uniq, start = np.unique(key, return_index=True)
    C = np.add.reduceat(C, start)
    keep = C != 0
    uniq, C = uniq[keep], C[keep]
    return uniq // (n * n), (uniq // n) % n, uniq % n, C


@dataclass(eq=False)
class ZkNModel:
    q: int
    p: int
    r: int
    gamma: int
    labels: list
    sizes: np.ndarray
    entries: tuple  # (i, j, k, coefficient) arrays, sorted by (i, j, k)
    lmn: tuple | None = None
    noncube_log: int | None = None
    meta: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return len(self.labels)

    @cached_property
    def index(self) -> dict:
        return {lab: i for i, lab in enumerate(self.labels)}

    def product(self, a, b) -> dict:
        """Coefficients of label a times label b, keyed by label."""
        i = self.index[a] if isinstance(a, BasisLabel) else int(a)
        j = self.index[b] if isinstance(b, BasisLabel) else int(b)
        I, J, K, C = self.entries
        n = self.dim
        key = I * n + J
        lo, hi = np.searchsorted(key, [i * n + j, i * n + j + 1])
        return {self.labels[int(k)]: int(c) for k, c in zip(K[lo:hi], C[lo:hi])}

    def dense(self) -> np.ndarray:
        n = self.dim
        if n > MAX_DENSE:
            raise MemoryError(f"dense table of dimension {n} refused (max {MAX_DENSE})")
        m = np.zeros((n, n, n), dtype=np.int64)
        I, J, K, C = self.entries
        m[I, J, K] = C
        return m

    def sparse_left(self):
        """Per-label left multiplication matrices as scipy CSR (rows j, cols k)."""
        from scipy import sparse
        n = self.dim
        I, J, K, C = self.entries
        bounds = np.searchsorted(I, np.arange(n + 1))
        return [sparse.csr_matrix((C[a:b], (J[a:b], K[a:b])), shape=(n, n))
                for a, b in zip(bounds[:-1], bounds[1:])]

    def checksum(self) -> str:
        h = hashlib.sha256()
        for a in self.entries:
            h.update(np.ascontiguousarray(a, dtype="<i8").tobytes())
        return h.hexdigest()[:16]

    def algebra(self, p: int | None = None) -> CommAlg:
        p = p or self.p
        unit = np.zeros(self.dim, dtype=np.int64)
        unit[0] = 1
        return CommAlg(p, self.dense() % p, unit, self.sizes % p,
                       labels=tuple(str(l) for l in self.labels))


def mult_table(q: int) -> ZkNModel:
    p, r = prime_power(q)
    g = gamma_of(q)
    labels = reps(q)
    sizes = np.array([class_size(q, lab) for lab in labels], dtype=np.int64)
    if len(labels) != n_classes(q):
        raise CaseAnalysisError("label count disagrees with the class count")
    if int(sizes.sum()) != q ** 3 * (q * q - 1) // g:
        raise CaseAnalysisError("class sizes do not sum to |N|")
    entries = _build_entries(q)
    return ZkNModel(q=q, p=p, r=r, gamma=g, labels=labels, sizes=sizes, entries=entries,
                    lmn=lmn(q) if g == 3 else None, noncube_log=1 if g == 3 else None)


# -- identities over Z -------------------------------------------------------------

def check_model(model: ZkNModel, associativity: bool = True) -> dict:
    """Commutativity, unit, augmentation and (optionally) associativity over Z."""
    I, J, K, C = model.entries
    n = model.dim
    s = model.sizes
    out = {}
    fwd = {(int(i), int(j), int(k)): int(c) for i, j, k, c in zip(I, J, K, C)} if n <= 60 else None
    if fwd is not None:
        out["commutative"] = all(fwd.get((j, i, k)) == c for (i, j, k), c in fwd.items())
    else:
        a = np.lexsort((K, I, J))
        out["commutative"] = bool(np.array_equal(J[a], I) and np.array_equal(I[a], J)
                                  and np.array_equal(K[a], K) and np.array_equal(C[a], C))
    unit_rows = I == 0
    out["unital"] = bool(np.array_equal(J[unit_rows], np.arange(n)) and np.array_equal(K[unit_rows], np.arange(n))
                         and (C[unit_rows] == 1).all())
    # every partial sum is bounded by |N|^2; int64 is exact below 2^63
    dt = np.int64 if int(s.sum()) ** 2 < 2**63 else object
    eps = np.zeros((n, n), dtype=dt)
    np.add.at(eps, (I, J), C.astype(dt) * s[K].astype(dt))
    out["augmentation"] = bool((eps == np.outer(s.astype(dt), s.astype(dt))).all())
    if associativity:
        out["associative"] = associative_sparse(model)
    return out


def associative_sparse(model: ZkNModel) -> bool:
    """(b_i b_j) b_k == b_i (b_j b_k) for all i, j, k, exactly over Z.

    With L_i[j, k] = m[i, j, k], for each i the product L_i F (F the table
    flattened over its last two indices) must equal T L_i (T the table stacked
    over its first two) after regrouping indices.  Coefficients are bounded by q^3 and sums by |N|^2, so float64
    sparse products are exact for q <= 16.
    """
    from scipy import sparse
    n = model.dim
    I, J, K, C = model.entries
    # stacked table T[(j*n + k), l] = m[j, k, l]
    T = sparse.csr_matrix((C.astype(np.float64), (I * n + J, K)), shape=(n * n, n))
    # flat table F[t, (k*n + l)] = m[t, k, l]
    Fm = sparse.csr_matrix((C.astype(np.float64), (I, J * n + K)), shape=(n, n * n))
    left = model.sparse_left()
    for i in range(n):
        Li = left[i].astype(np.float64)
        # sum_t m[i,j,t] m[t,k,l]  -> (j, k*n + l)
        lhs = (Li @ Fm).tocsr()
        # sum_t m[j,k,t] m[i,t,l]  -> ((j,k), l) -> reshape to (j, k*n + l)
        rhs = (T @ Li).tocoo()
        rhs = sparse.csr_matrix((rhs.data, (rhs.row // n, (rhs.row % n) * n + rhs.col)), shape=(n, n * n))
        diff = lhs - rhs
        diff.eliminate_zeros()
        if diff.nnz:
            return False
    return True


# -- Loewy structure ----------------------------------------------------------------

def loewy_closed(q: int) -> tuple[int, int, int]:
    g = gamma_of(q)
    d = (q * q + q) // g + g
    return d, d - 1, (q + 1) // g - 1


def closed_bases(model: ZkNModel) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form spanning sets of J and J^2 (rows over F_p)."""
    n, p = model.dim, model.p
    idx = model.index
    J = []
    for lab in model.labels:
        v = np.zeros(n, dtype=np.int64)
        if lab.kind == "D" and lab.log == 0:
            continue
        if lab.kind == "T" and lab.log == 0:
            v[idx[lab]] = 1
            v[0] = 1
        else:
            v[idx[lab]] = 1
        J.append(v)
    J2 = []
    for lab in model.labels:
        if lab.kind == "T" and lab.log != 0:
            v = np.zeros(n, dtype=np.int64)
            v[idx[lab]] = 1
            v[idx[BasisLabel("D", lab.log)]] = 1
            J2.append(v)
    return np.array(J, dtype=np.int64).reshape(-1, n) % p, np.array(J2, dtype=np.int64).reshape(-1, n) % p


# -- presentation --------------------------------------------------------------------

def presentation(q: int, p: int | None = None, model: ZkNModel | None = None) -> dict:
    """Generators, relations, and a check that they present Z(F_p N).

    T -> T_1 + Id, X_n -> U_n, Y_m -> D_m (m != 1, since D_1 = 1).  Every
    relation must map to 0, and the normal monomials
    {1, T, X_n, Y_m, Y_m T (m in Psi/Gamma - 1)} must map to a basis; every
    other monomial reduces to these using the relations, so the quotient has
    the same dimension and the induced map is an isomorphism.
    """
    model = model or mult_table(q)
    p = p or model.p
    if q % p:
        raise ValueError("p must divide q")
    A = model.algebra(p)
    n = A.dim
    g = model.gamma
    ginv = pow(g, -1, p)
    idx = model.index

    def vec(label):
        v = np.zeros(n, dtype=np.int64)
        v[idx[label]] = 1
        return v

    one = vec(BasisLabel("D", 0))
    T = (vec(BasisLabel("T", 0)) + one) % p
    X = {lab.log: vec(lab) for lab in model.labels if lab.kind == "U"}
    Y = {lab.log: vec(lab) for lab in model.labels if lab.kind == "D" and lab.log}
    psi = {e for e in Y if e % (q - 1) == 0}
    per = (q * q - 1) // g
    sc = A.sc

    def mul(u, v):
        # operands here have one or two nonzero coordinates
        out = np.zeros(n, dtype=np.int64)
        for i in np.flatnonzero(u):
            for j in np.flatnonzero(v):
                out += u[i] * v[j] * sc[i, j]
        return out % p

    rels = []

    def rel(text, value):
        rels.append({"relation": text, "vanishes": not np.asarray(value).any()})

    rel("T^2", mul(T, T))
    for a in X:
        rel(f"T X[{a}]", mul(T, X[a]))
    for m in Y:
        if m not in psi:
            rel(f"T Y[{m}]", mul(T, Y[m]))
    for a in X:
        for b in X:
            if a <= b:
                rel(f"X[{a}] X[{b}]", mul(X[a], X[b]))
    for a in X:
        for m in Y:
            if m not in psi:
                rel(f"X[{a}] Y[{m}]", mul(X[a], Y[m]))
    for m in Y:
        for m2 in Y:
            if m <= m2 and (m not in psi or m2 not in psi):
                rel(f"Y[{m}] Y[{m2}]", mul(Y[m], Y[m2]))
    for a in X:
        for m in sorted(psi):
            rel(f"X[{a}] Y[{m}] + (1/{g}) Y[{m}] T",
                (mul(X[a], Y[m]) + ginv * mul(Y[m], T)) % p)
    for m in sorted(psi):
        for m2 in sorted(psi):
            if m <= m2:
                s = (m + m2) % per
                delta = 1 if s == 0 else 0
                val = mul(Y[m], Y[m2])
                if not delta:
                    val = (val - mul(Y[s], T)) % p
                rel(f"Y[{m}] Y[{m2}] - {1 - delta} Y[{s}] T", val)

    normal = [one, T] + [X[a] for a in sorted(X)] + [Y[m] for m in sorted(Y)]
    normal += [mul(Y[m], T) for m in sorted(psi)]
    rk = gfp.rank(np.array(normal), p)
    return {
        "q": q, "p": p,
        "generators": ["T"] + [f"X[{a}]" for a in sorted(X)] + [f"Y[{m}]" for m in sorted(Y)],
        "images": {"T": "T[0] + D[0]", "X[n]": "U[n]", "Y[m]": "D[m]"},
        "relations": rels,
        "all_vanish": all(r["vanishes"] for r in rels),
        "normal_monomials": len(normal),
        "rank_of_images": rk,
        "dimension": n,
        "verified": all(r["vanishes"] for r in rels) and rk == n == len(normal),
    }


# -- crosscheck against brute force ----------------------------------------------------

def label_element(F: FieldCtx, label: BasisLabel):
    """Representative matrix of the class labelled ``label``."""
    from .unitary import param_matrix
    sp = special_elements(F)
    if label.kind == "D":
        return param_matrix(F, F.elem(label.log), 0, 0)
    if label.kind == "T":
        x = F.elem(label.log)
        return param_matrix(F, x, 0, F.mul(x, sp.omega))
    y = F.elem(label.log)
    return param_matrix(F, 1, y, F.mul(F.mul(y, F.bar(y)), sp.tau))


def crosscheck(F: FieldCtx, threads: int | None = None, max_mismatches: int = 10) -> dict:
    """Compare the closed-form table with brute-force structure constants of N."""
    from .classalg import check_tensor, structure_constants
    from .unitary import build_normalizer, conjugacy_classes

    model = mult_table(F.q)
    N = build_normalizer(F)
    cd = conjugacy_classes(N)
    st = structure_constants(N, cd, threads=threads)
    check_tensor(st)
    perm = []
    for lab in model.labels:
        e = N.lookup_matrix(label_element(F, lab))
        if e < 0:
            raise AssertionError(f"representative of {lab} is not in N")
        perm.append(int(cd.class_of[e]))
    perm = np.array(perm)
    bijective = len(set(perm.tolist())) == model.dim == cd.n_classes
    report = {"q": F.q, "n_labels": model.dim, "n_classes": int(cd.n_classes),
              "bijection": bool(bijective), "sizes_match": False, "mismatches": [],
              "pairs_compared": 0, "match": False}
    if not bijective:
        return report
    report["sizes_match"] = bool(np.array_equal(cd.sizes[perm], model.sizes))
    brute = st.m[np.ix_(perm, perm, perm)]
    closed = model.dense()
    n = model.dim
    bad = []
    for i in range(n):
        for j in range(i, n):
            if not np.array_equal(brute[i, j], closed[i, j]):
                bad.append({"pair": [str(model.labels[i]), str(model.labels[j])],
                            "closed_form": _vec(model, closed[i, j]),
                            "brute_force": _vec(model, brute[i, j])})
    report["pairs_compared"] = n * (n + 1) // 2
    report["mismatch_count"] = len(bad)
    report["mismatches"] = bad[:max_mismatches]
    report["match"] = report["sizes_match"] and not bad
    return report


def _vec(model, v):
    return {str(model.labels[k]): int(c) for k, c in enumerate(v) if c}
