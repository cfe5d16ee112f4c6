"""Class-sum structure constants and the centre of a group algebra.

For classes C_0..C_{n-1} with representatives z_k,

    m[i, j, k] = #{(x, y) in C_i x C_j : x y = z_k}.

Fixing z_k and sweeping g over the whole group, the pair
(class(g), class(g z_k)) runs over (class(x^-1), class(y)) for each
factorization z_k = x y exactly once, so one sweep per class gives a whole
(n x n) slice.  Sweeps for different k are independent and run on a thread
pool; the compiled kernel drops the GIL.
"""

from __future__ import annotations

import csv
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .commalg import CommAlg
from .unitary import ClassData, GroupCtx

log = logging.getLogger(__name__)

THREADS_ENV = "PSUCENTRE_THREADS"


class TensorError(AssertionError):
    pass


def default_threads() -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        return max(1, int(env))
    return max(1, min(8, os.cpu_count() or 1))


@dataclass(frozen=True, eq=False)
class StructTensor:
    m: np.ndarray  # (n, n, n) int64
    class_sizes: np.ndarray
    inverse_class: np.ndarray
    labels: tuple = ()

    @property
    def n_classes(self) -> int:
        return len(self.class_sizes)

    @property
    def group_order(self) -> int:
        return int(self.class_sizes.sum())

    def product(self, i: int, j: int) -> np.ndarray:
        return self.m[i, j]

    def checksum(self) -> str:
        import hashlib
        h = hashlib.sha256()
        h.update(np.ascontiguousarray(self.m, dtype="<i8").tobytes())
        return h.hexdigest()[:16]


def _sweep_matrix_group(G: GroupCtx, cd: ClassData, k: int) -> np.ndarray:
    counts, missing = G.kit.sweep_counts(G.elements, G.elements[cd.rep_index[k]], G.index,
                                         cd.class_of, cd.n_classes)
    if missing:
        raise TensorError(f"{missing} products left the group while sweeping class {k}")
    return counts


def _sweep_generic(group, cd: ClassData, k: int) -> np.ndarray:
    img = np.asarray(group.right_multiply_indices(int(cd.rep_index[k])))
    n = cd.n_classes
    flat = cd.class_of * n + cd.class_of[img]
    return np.bincount(flat, minlength=n * n).reshape(n, n)


def structure_constants(group, cd: ClassData, threads: int | None = None,
                        progress=None) -> StructTensor:
    """Exact structure constants of the class sums of ``group``."""
    n = cd.n_classes
    sweep = _sweep_matrix_group if isinstance(group, GroupCtx) else _sweep_generic
    threads = threads or default_threads()
    m = np.zeros((n, n, n), dtype=np.int64)
    inv = cd.inverse_class

    def work(k):
        counts = sweep(group, cd, k)
        m[:, :, k] = counts[inv, :]
        if progress:
            progress(k, n)

    if threads == 1 or n == 1:
        for k in range(n):
            work(k)
    else:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            list(ex.map(work, range(n)))
    labels = tuple(str(r) for r in cd.reps)
    return StructTensor(m=m, class_sizes=np.asarray(cd.sizes, dtype=np.int64),
                        inverse_class=np.asarray(inv, dtype=np.int64), labels=labels)


def structure_constants_reference(group, cd: ClassData) -> StructTensor:
    """Double loop over all ordered pairs (x, y); quadratic in |G|, for small groups."""
    n = cd.n_classes
    order = group.order
    target = np.full(order, -1, dtype=np.int64)
    target[cd.rep_index] = np.arange(n)
    m = np.zeros((n, n, n), dtype=np.int64)
    for x in range(order):
        if isinstance(group, GroupCtx):
            xy = group.kit.transform_index(group.elements, group.elements[x], None, group.index)
        else:
            xy = group.table[x]
        hit = target[xy] >= 0
        ys = np.flatnonzero(hit)
        np.add.at(m, (cd.class_of[x], cd.class_of[ys], target[xy[ys]]), 1)
    return StructTensor(m=m, class_sizes=np.asarray(cd.sizes, dtype=np.int64),
                        inverse_class=np.asarray(cd.inverse_class, dtype=np.int64),
                        labels=tuple(str(r) for r in cd.reps))


def check_tensor(st: StructTensor, associativity: bool | None = None) -> dict:
    """Check the class-sum identities; raises TensorError naming the first failure."""
    m = st.m
    s = st.class_sizes
    inv = st.inverse_class
    n = st.n_classes
    checks = {}
    checks["nonnegative"] = bool((m >= 0).all())
    checks["symmetry"] = bool(np.array_equal(m, m.transpose(1, 0, 2)))
    checks["inversion"] = bool(np.array_equal(m[np.ix_(inv, inv, inv)], m))
    # m[i,j,k] |k| == m[k, inv j, i] |i|
    lhs = m * s[None, None, :]
    rhs = np.einsum("kji->ijk", m[:, inv, :]) * s[:, None, None]
    checks["scaling"] = bool(np.array_equal(lhs, rhs))
    checks["row_sums"] = bool(np.array_equal((m * s[None, None, :]).sum(axis=2), np.outer(s, s)))
    checks["identity"] = bool(np.array_equal(m[0], np.eye(n, dtype=np.int64)))
    if associativity is None:
        associativity = n <= 30
    if associativity:
        checks["associativity"] = _associative_int(m)
    for name, ok in checks.items():
        if not ok:
            raise TensorError(f"structure constants fail the {name} identity")
    return checks


def _associative_int(m: np.ndarray) -> bool:
    # (b_i b_j) b_k vs b_i (b_j b_k) over Z
    lhs = np.einsum("ijt,tkl->ijkl", m, m)
    rhs = np.einsum("jkt,itl->ijkl", m, m)
    return bool(np.array_equal(lhs, rhs))


def centre_mod_p(st: StructTensor, p: int) -> CommAlg:
    """Z(F_p G) in the class-sum basis, with augmentation |C_i| mod p."""
    n = st.n_classes
    unit = np.zeros(n, dtype=np.int64)
    unit[0] = 1
    return CommAlg(p, st.m % p, unit, st.class_sizes % p, labels=st.labels)


def dump_constants(st: StructTensor, path) -> int:
    """CSV of the nonzero entries; returns the number of rows written."""
    rows = 0
    with open(path, "w", newline="") as fh:
        for i, lab in enumerate(st.labels or [str(i) for i in range(st.n_classes)]):
            fh.write(f"# class {i}: size={int(st.class_sizes[i])} rep={lab}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["i", "j", "k", "m"])
        for i, j, k in zip(*np.nonzero(st.m)):
            w.writerow([int(i), int(j), int(k), int(st.m[i, j, k])])
            rows += 1
    return rows
