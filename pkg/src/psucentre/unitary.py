"""PSU(3,q), the Sylow normalizer N = S x| C, and conjugacy classes.

Matrices act on column vectors of F_{q^2}^3 and preserve the hermitian form
with Gram matrix antidiag(1, 1, 1).  A group element is the scalar class of
such a matrix of determinant 1; it is stored as the lexicographically
smallest of its gamma scalar multiples (see :func:`canonical`).  Whole groups
are uint8 arrays of shape (n, 9) sorted by packed canonical key, so an
element's index is its rank in key order.

G is enumerated from the Bruhat decomposition G = B u S w B, where
B = N is the upper-triangular subgroup, S its unipotent radical and w the
antidiagonal Weyl element.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .gfq import Cosets, FieldCtx, coset_label_logs, special_elements
from .kernels import MatrixKit

log = logging.getLogger(__name__)

#: Default cap on enumerated group orders (the q = 8 group needs ``allow_big``).
DEFAULT_BUDGET = 2_000_000
BIG_BUDGET = 6_000_000


class BudgetExceeded(RuntimeError):
    pass


class GroupError(ValueError):
    pass


Mat = tuple  # 9 field codes, row major


# -- scalar matrix helpers ---------------------------------------------------

def mat_mul(F: FieldCtx, A: Mat, B: Mat) -> Mat:
    out = []
    for i in range(3):
        for j in range(3):
            s = 0
            for k in range(3):
                s = F.add(s, F.mul(A[3 * i + k], B[3 * k + j]))
            out.append(s)
    return tuple(out)


def mat_inv(F: FieldCtx, A: Mat) -> Mat:
    """Inverse of a matrix preserving the form: J * conj(A)^T * J."""
    return tuple(F.bar(A[3 * (2 - j) + (2 - i)]) for i in range(3) for j in range(3))


def det(F: FieldCtx, A: Mat) -> int:
    a, b, c, d, e, f, g, h, i = A
    m = F.mul
    t1 = m(a, F.sub(m(e, i), m(f, h)))
    t2 = m(b, F.sub(m(d, i), m(f, g)))
    t3 = m(c, F.sub(m(d, h), m(e, g)))
    return F.add(F.sub(t1, t2), t3)


def preserves_form(F: FieldCtx, A: Mat) -> bool:
    """conj(A)^T J A == J."""
    Ab = tuple(F.bar(x) for x in A)
    AbT = tuple(Ab[3 * j + i] for i in range(3) for j in range(3))
    J = (0, 0, 1, 0, 1, 0, 1, 0, 0)
    return mat_mul(F, mat_mul(F, AbT, J), A) == J


def scalar_group(F: FieldCtx) -> list[int]:
    """{mu : mu^3 = mu^(q+1) = 1}, the scalars of SU(3, q); order gamma."""
    return [F.elem(e * (F.n_units // F.gamma)) for e in range(F.gamma)]


def canonical(F: FieldCtx, A: Mat) -> Mat:
    return min(tuple(F.mul(lam, x) for x in A) for lam in scalar_group(F))


IDENTITY: Mat = (1, 0, 0, 0, 1, 0, 0, 0, 1)


@dataclass(frozen=True, order=True)
class GroupElem:
    """Canonical projective 3x3 matrix; equality is entry equality."""

    mat: Mat

    def array(self) -> np.ndarray:
        return np.array(self.mat, dtype=np.uint8)

    def rows(self) -> list[list[int]]:
        return [list(self.mat[3 * i:3 * i + 3]) for i in range(3)]

    def __str__(self):
        return "[" + "; ".join(" ".join(map(str, r)) for r in self.rows()) + "]"


@dataclass(frozen=True)
class ParamQ:
    a: int
    b: int
    c: int


def in_Q(F: FieldCtx, a: int, b: int, c: int) -> bool:
    """b bar(b) + a bar(c) + c bar(a) == 0 with a != 0."""
    if a == 0:
        return False
    s = F.add(F.mul(b, F.bar(b)), F.add(F.mul(a, F.bar(c)), F.mul(c, F.bar(a))))
    return s == 0


def param_matrix(F: FieldCtx, a: int, b: int, c: int) -> Mat:
    """The upper-triangular matrix M(a, b, c) (not canonicalized)."""
    ab = F.bar(a)
    return (
        a, b, c,
        0, F.div(ab, a), F.neg(F.div(F.bar(b), a)),
        0, 0, F.inv(ab),
    )


def param_to_elem(F: FieldCtx, pq: ParamQ) -> GroupElem:
    if not in_Q(F, pq.a, pq.b, pq.c):
        raise GroupError(f"{pq} is not in Q")
    return GroupElem(canonical(F, param_matrix(F, pq.a, pq.b, pq.c)))


def param_inverse(F: FieldCtx, pq: ParamQ) -> ParamQ:
    """M(a,b,c)^-1 = M(1/a, -b/bar(a), bar(c))."""
    return ParamQ(F.inv(pq.a), F.neg(F.div(pq.b, F.bar(pq.a))), F.bar(pq.c))


def param_product(F: FieldCtx, s: ParamQ, t: ParamQ) -> ParamQ:
    """M(a,b,c) M(x,y,z) = M(ax, ay + b bar(x)/x, az - b bar(y)/x + c/bar(x))."""
    a, b, c = s.a, s.b, s.c
    x, y, z = t.a, t.b, t.c
    m, d = F.mul, F.div
    second = F.add(m(a, y), d(m(b, F.bar(x)), x))
    third = F.add(F.sub(m(a, z), d(m(b, F.bar(y)), x)), d(c, F.bar(x)))
    return ParamQ(m(a, x), second, third)


def trace_solutions(F: FieldCtx, a: int) -> dict[int, list[int]]:
    """c grouped by the value a bar(c) + c bar(a) (a trace, lies in F_q)."""
    out: dict[int, list[int]] = {}
    ab = F.bar(a)
    for c in range(F.order):
        v = F.add(F.mul(a, F.bar(c)), F.mul(c, ab))
        out.setdefault(v, []).append(c)
    return out


def q_params(F: FieldCtx, a: int):
    """All (b, c) with (a, b, c) in Q."""
    sols = trace_solutions(F, a)
    for b in range(F.order):
        need = F.neg(F.mul(b, F.bar(b)))
        for c in sols[need]:
            yield b, c


def unipotent(F: FieldCtx, b: int) -> Mat:
    """M(1, b, c) for the smallest c completing (1, b, c) to a point of Q."""
    need = F.neg(F.mul(b, F.bar(b)))
    c = min(trace_solutions(F, 1)[need])
    return param_matrix(F, 1, b, c)


def weyl(F: FieldCtx) -> Mat:
    return (0, 0, 1, 0, F.neg(1), 0, 1, 0, 0)


# -- quadric -------------------------------------------------------------------

def normalize_point(F: FieldCtx, v) -> tuple[int, int, int]:
    for x in v:
        if x:
            s = F.inv(x)
            return tuple(F.mul(s, y) for y in v)
    raise GroupError("zero vector")


def isotropic(F: FieldCtx, v) -> bool:
    h = F.add(F.add(F.mul(v[0], F.bar(v[2])), F.mul(v[1], F.bar(v[1]))),
              F.mul(v[2], F.bar(v[0])))
    return h == 0


def unitary_quadric(F: FieldCtx) -> list[tuple[int, int, int]]:
    """Isotropic points of PG(2, q^2), normalized; (1, 0, 0) first."""
    pts = []
    Q = F.order
    for v0 in (1,):
        for v1 in range(Q):
            for v2 in range(Q):
                if isotropic(F, (v0, v1, v2)):
                    pts.append((v0, v1, v2))
    for v1 in (1,):
        for v2 in range(Q):
            if isotropic(F, (0, v1, v2)):
                pts.append((0, v1, v2))
    if isotropic(F, (0, 0, 1)):
        pts.append((0, 0, 1))
    pts.sort(key=lambda v: (v != (1, 0, 0), v))
    return pts


def act(F: FieldCtx, A: Mat, v) -> tuple[int, int, int]:
    w = []
    for i in range(3):
        s = 0
        for k in range(3):
            s = F.add(s, F.mul(A[3 * i + k], v[k]))
        w.append(s)
    return normalize_point(F, w)


# -- group contexts ---------------------------------------------------------------

@dataclass(eq=False)
class GroupCtx:
    """An enumerated subgroup of PSU(3, q)."""

    name: str
    field: FieldCtx
    kit: MatrixKit
    elements: np.ndarray  # (n, 9) uint8, sorted by key
    keys: np.ndarray  # (n,) uint64, increasing
    generators: np.ndarray  # (g, 9) uint8
    meta: dict = field(default_factory=dict)

    @property
    def order(self) -> int:
        return len(self.elements)

    @cached_property
    def index(self):
        return self.kit.make_index(self.keys)

    @cached_property
    def identity_index(self) -> int:
        return int(self.lookup_matrix(IDENTITY))

    def elem(self, i: int) -> GroupElem:
        return GroupElem(tuple(int(x) for x in self.elements[i]))

    def lookup_matrix(self, A: Mat) -> int:
        k = self.kit.keys(np.array(A, dtype=np.uint8).reshape(1, 9))
        return int(self.index.lookup(k)[0])

    def lookup(self, mats: np.ndarray) -> np.ndarray:
        return self.index.lookup(self.kit.keys(mats))

    def mul(self, x: GroupElem, y: GroupElem) -> GroupElem:
        return GroupElem(canonical(self.field, mat_mul(self.field, x.mat, y.mat)))

    def inverse_indices(self, idx: np.ndarray) -> np.ndarray:
        return self.lookup(inverse_rows(self.field, self.elements[idx]))

    def conjugate_indices(self, idx: np.ndarray, s: np.ndarray, s_inv: np.ndarray) -> np.ndarray:
        """Indices of s^-1 x s for x = elements[idx]."""
        return self.kit.transform_index(self.elements[idx], s_inv, s, self.index)

    def right_multiply_indices(self, r: np.ndarray) -> np.ndarray:
        return self.kit.transform_index(self.elements, None, r, self.index)

    def contains(self, A: Mat) -> bool:
        return self.lookup_matrix(A) >= 0


def inverse_rows(F: FieldCtx, X: np.ndarray) -> np.ndarray:
    """Row-wise inverses J conj(X)^T J of unitary matrices."""
    bar = F.tables.bar
    X = np.asarray(X, dtype=np.uint8).reshape(-1, 9)
    perm = [3 * (2 - j) + (2 - i) for i in range(3) for j in range(3)]
    return bar[X[:, perm]]


def _kit(F: FieldCtx, backend=None) -> MatrixKit:
    if F.order > 128:
        raise BudgetExceeded(f"matrix groups need q^2 <= 128 (got {F.order})")
    return MatrixKit(F.tables, scalar_group(F), backend=backend)


def psu_order(q: int) -> int:
    import math
    g = math.gcd(3, q + 1)
    return q**3 * (q * q - 1) * (q**3 + 1) // g


def normalizer_order(q: int) -> int:
    import math
    return q**3 * (q * q - 1) // math.gcd(3, q + 1)


def _borel_rows(F: FieldCtx) -> np.ndarray:
    rows = []
    for e in coset_label_logs(F, Cosets.MOD_GAMMA):
        a = F.elem(e)
        for b, c in q_params(F, a):
            rows.append(param_matrix(F, a, b, c))
    return np.array(rows, dtype=np.uint8).reshape(-1, 9)


def _unipotent_rows(F: FieldCtx) -> np.ndarray:
    return np.array([param_matrix(F, 1, b, c) for b, c in q_params(F, 1)],
                    dtype=np.uint8).reshape(-1, 9)


def borel_generators(F: FieldCtx) -> list[Mat]:
    """d_g, unipotents over an F_p-basis of F_{q^2}, centre elements over an F_p-basis of F_q."""
    om = special_elements(F).omega
    gens = [param_matrix(F, F.gen, 0, 0)]
    gens += [unipotent(F, F.elem(i)) for i in range(2 * F.r)]
    gq = F.elem(F.q + 1)  # generates F_q^x
    gens += [param_matrix(F, 1, 0, F.mul(F.pow(gq, i), om)) for i in range(F.r)]
    return gens


def _finish(name, F, kit, rows, gens, meta) -> GroupCtx:
    keys = kit.keys(rows)
    order = np.argsort(keys, kind="stable")
    keys = keys[order]
    if len(keys) > 1 and not (keys[1:] > keys[:-1]).all():
        raise GroupError(f"{name}: duplicate elements in enumeration")
    elements = kit.unpack(keys)
    return GroupCtx(name=name, field=F, kit=kit, elements=elements, keys=keys,
                    generators=np.array(gens, dtype=np.uint8).reshape(-1, 9), meta=meta)


def build_normalizer(F: FieldCtx, backend=None) -> GroupCtx:
    """N = N_G(S) as the upper-triangular subgroup, order q^3 (q^2 - 1) / gamma."""
    kit = _kit(F, backend)
    rows = _borel_rows(F)
    N = _finish(f"N(PSU(3,{F.q}))", F, kit, rows, borel_generators(F), {"kind": "normalizer"})
    if N.order != normalizer_order(F.q):
        raise GroupError(f"|N| = {N.order}, expected {normalizer_order(F.q)}")
    return N


def build_psu(F: FieldCtx, budget: int = DEFAULT_BUDGET, backend=None) -> GroupCtx:
    """G = PSU(3, q) enumerated as B u S w B."""
    want = psu_order(F.q)
    if want > budget:
        raise BudgetExceeded(f"|PSU(3,{F.q})| = {want} exceeds budget {budget}")
    kit = _kit(F, backend)
    B = _borel_rows(F)
    Uw = kit.matmul(_unipotent_rows(F), np.array(weyl(F), dtype=np.uint8))
    parts = [B]
    for u in Uw:
        parts.append(kit.matmul(np.broadcast_to(u, B.shape), B))
    rows = np.concatenate(parts)
    gens = borel_generators(F) + [weyl(F)]
    G = _finish(f"PSU(3,{F.q})", F, kit, rows, gens, {"kind": "psu"})
    if G.order != want:
        raise GroupError(f"|G| = {G.order}, expected {want}")
    return G


def build_sylow(F: FieldCtx, backend=None) -> GroupCtx:
    """S = {M(1, b, c)}, the unipotent radical of N; order q^3."""
    kit = _kit(F, backend)
    gens = borel_generators(F)[1:]
    S = _finish(f"S(PSU(3,{F.q}))", F, kit, _unipotent_rows(F), gens, {"kind": "sylow"})
    if S.order != F.q ** 3:
        raise GroupError(f"|S| = {S.order}, expected {F.q ** 3}")
    return S


def point_permutations(F: FieldCtx, mats, points) -> np.ndarray:
    """Permutation images (one row per matrix) of the given projective points."""
    pos = {v: i for i, v in enumerate(points)}
    out = np.empty((len(mats), len(points)), dtype=np.int64)
    for r, A in enumerate(mats):
        A = tuple(int(x) for x in A)
        for i, v in enumerate(points):
            out[r, i] = pos[act(F, A, v)]
    return out


def _orbit(perms: np.ndarray, start: int) -> set[int]:
    seen = {start}
    todo = [start]
    while todo:
        x = todo.pop()
        for row in perms:
            y = int(row[x])
            if y not in seen:
                seen.add(y)
                todo.append(y)
    return seen


def check_quadric_action(G: GroupCtx, N: GroupCtx) -> dict:
    """Double transitivity on the quadric, and N as the stabilizer of (1, 0, 0).

    G is transitive (orbit of point 0 under its generators) and N, which
    fixes point 0, is transitive on the other q^3 points; together these give
    double transitivity.  Since every element of N fixes point 0 and
    |G| / |quadric| = |N|, N is the full stabilizer.
    """
    F = G.field
    pts = unitary_quadric(F)
    if len(pts) != F.q ** 3 + 1:
        raise GroupError(f"quadric has {len(pts)} points, expected {F.q ** 3 + 1}")
    gperm = point_permutations(F, G.generators, pts)
    nperm = point_permutations(F, N.generators, pts)
    transitive = len(_orbit(gperm, 0)) == len(pts)
    fixes = bool((nperm[:, 0] == 0).all())
    # every element of N, not just the generators, is upper triangular
    fixes_all = bool((N.elements[:, [3, 6]] == 0).all())
    two = len(pts) == 1 or len(_orbit(nperm, 1)) == len(pts) - 1
    stab = fixes and fixes_all and G.order == len(pts) * N.order
    faithful = len({tuple(r) for r in gperm}) == len(gperm)
    return {"points": len(pts), "transitive": transitive, "doubly_transitive": transitive and two,
            "normalizer_is_stabilizer": stab, "generators_act_faithfully": faithful}


def trivial_intersection(G: GroupCtx, S: GroupCtx, samples: int | None = 64, seed: int = 0) -> bool:
    """S meets S^g only in 1 for the sampled g outside N (all g when samples is None)."""
    rng = np.random.default_rng(seed)
    outside = np.flatnonzero((G.elements[:, 3] != 0) | (G.elements[:, 6] != 0))
    pick = outside if samples is None or samples >= len(outside) else rng.choice(outside, samples, replace=False)
    sinv_all = inverse_rows(G.field, G.elements[pick])
    for g, gi in zip(G.elements[pick], sinv_all):
        hits = G.kit.transform_index(S.elements, gi, g, S.index)
        if int((hits >= 0).sum()) != 1:
            return False
    return True


# -- conjugacy classes --------------------------------------------------------------

@dataclass(eq=False)
class ClassData:
    class_of: np.ndarray  # class index per element index
    rep_index: np.ndarray  # element index of each class representative
    sizes: np.ndarray
    inverse_class: np.ndarray
    reps: list = field(default_factory=list)

    @property
    def n_classes(self) -> int:
        return len(self.sizes)

    def members(self, k: int) -> np.ndarray:
        return np.flatnonzero(self.class_of == k)


def _bfs_classes(order, identity, conj_step, n_gens):
    """Orbit partition under conjugation by the generators.

    ``conj_step(idx, s)`` returns indices of the conjugates of ``idx`` by the
    s-th generator.  Returns a class label per element, in discovery order.
    """
    label = np.full(order, -1, dtype=np.int64)
    nxt, start = 0, 0
    while True:
        free = np.flatnonzero(label[start:] < 0)
        if not len(free):
            break
        seed = start + int(free[0])
        start = seed
        label[seed] = nxt
        frontier = np.array([seed], dtype=np.int64)
        while len(frontier):
            found = []
            for s in range(n_gens):
                img = conj_step(frontier, s)
                if (img < 0).any():
                    raise GroupError("conjugate fell outside the group")
                img = img[label[img] < 0]
                if len(img):
                    img = np.unique(img)
                    label[img] = nxt
                    found.append(img)
            frontier = np.unique(np.concatenate(found)) if found else found
            if isinstance(frontier, list):
                break
        nxt += 1
    return label


def _normalize_classes(label, identity, inverse_of_reps):
    """Reorder: identity first, then by (size, smallest element index)."""
    n_cls = int(label.max()) + 1
    sizes = np.bincount(label, minlength=n_cls)
    first = np.full(n_cls, len(label), dtype=np.int64)
    np.minimum.at(first, label, np.arange(len(label)))
    id_cls = label[identity]
    order = sorted(range(n_cls), key=lambda c: (c != id_cls, sizes[c], first[c]))
    remap = np.empty(n_cls, dtype=np.int64)
    remap[order] = np.arange(n_cls)
    class_of = remap[label]
    rep_index = first[order]
    sizes = sizes[order]
    inv_rep = inverse_of_reps(rep_index)
    inverse_class = class_of[inv_rep]
    return class_of, rep_index, sizes, inverse_class


def conjugacy_classes(group) -> ClassData:
    """Conjugacy classes of a black-box group (GroupCtx or TableGroup)."""
    if isinstance(group, GroupCtx):
        gens = group.generators
        gens_inv = inverse_rows(group.field, gens)

        def step(idx, s):
            return group.conjugate_indices(idx, gens[s], gens_inv[s])

        label = _bfs_classes(group.order, group.identity_index, step, len(gens))
        class_of, rep_index, sizes, inv = _normalize_classes(
            label, group.identity_index, group.inverse_indices)
        reps = [group.elem(int(i)) for i in rep_index]
    else:
        label = _bfs_classes(group.order, group.identity_index, group.conjugate_indices,
                             len(group.generators))
        class_of, rep_index, sizes, inv = _normalize_classes(
            label, group.identity_index, group.inverse_indices)
        reps = [int(i) for i in rep_index]
    cd = ClassData(class_of=class_of, rep_index=rep_index, sizes=sizes,
                   inverse_class=inv, reps=reps)
    check_classes(cd, group.order)
    return cd


def check_classes(cd: ClassData, order: int) -> None:
    if int(cd.sizes.sum()) != order:
        raise GroupError("class sizes do not sum to the group order")
    if any(order % int(s) for s in cd.sizes):
        raise GroupError("a class size does not divide the group order")
    if cd.sizes[0] != 1:
        raise GroupError("class 0 is not the identity class")
    if not np.array_equal(cd.inverse_class[cd.inverse_class], np.arange(cd.n_classes)):
        raise GroupError("inverse_class is not an involution")


class TableGroup:
    """A finite group given by its Cayley table (elements are 0..n-1)."""

    def __init__(self, table, generators, name="table group"):
        self.table = np.asarray(table, dtype=np.int64)
        self.name = name
        n = len(self.table)
        ident = [e for e in range(n) if (self.table[e] == np.arange(n)).all()]
        if len(ident) != 1:
            raise GroupError("no unique identity")
        self.identity_index = ident[0]
        self.inverse = np.argmax(self.table == self.identity_index, axis=1)
        self.generators = list(generators)

    @property
    def order(self) -> int:
        return len(self.table)

    def inverse_indices(self, idx):
        return self.inverse[np.asarray(idx)]

    def conjugate_indices(self, idx, s):
        g = self.generators[s]
        return self.table[self.table[self.inverse[g], idx], g]

    def right_multiply_indices(self, r):
        return self.table[:, r]

    def mul(self, x, y):
        return int(self.table[x, y])


def permutation_group(perms, name="permutation group") -> TableGroup:
    """Close a set of permutations (tuples) under composition."""
    perms = [tuple(p) for p in perms]
    n = len(perms[0])
    ident = tuple(range(n))
    elems = [ident]
    seen = {ident: 0}
    i = 0
    while i < len(elems):
        for g in perms:
            h = tuple(elems[i][g[k]] for k in range(n))
            if h not in seen:
                seen[h] = len(elems)
                elems.append(h)
        i += 1
    m = len(elems)
    table = np.empty((m, m), dtype=np.int64)
    for a, x in enumerate(elems):
        for b, y in enumerate(elems):
            table[a, b] = seen[tuple(x[y[k]] for k in range(n))]
    gens = [seen[g] for g in perms]
    return TableGroup(table, gens, name=name)


def cyclic_group(n: int) -> TableGroup:
    xs = np.arange(n)
    return TableGroup((xs[:, None] + xs[None, :]) % n, [1 % n], name=f"C{n}")
