"""Tensoring with k[X]/X^p and the Loewy-layer invariant it produces.

If J^n(A) != 0 = J^(n+1)(A) for a commutative F_p-algebra A, then in
A[X]/X^p the radical is J(A) + X A, its (n+p-1)-th power is J^n(A) X^(p-1)
and its (n+p)-th power vanishes.  Two algebras whose centres differ in n or
in dim J^n therefore have tensor centres with different Loewy data.
"""

from __future__ import annotations

import numpy as np

from . import gfp
from .commalg import AlgebraError, CommAlg, LoewyProfile


def tensor_truncated(A: CommAlg, p: int | None = None) -> CommAlg:
    """A[X]/X^p with basis a_i X^j, index i * p + j."""
    p = p or A.p
    if p != A.p:
        raise AlgebraError("truncation degree must equal the characteristic")
    d = A.dim
    n = d * p
    sc = np.zeros((n, n, n), dtype=np.int64)
    for j1 in range(p):
        for j2 in range(p - j1):
            j = j1 + j2
            # (a_i X^j1)(a_k X^j2) = sum_l sc[i,k,l] a_l X^j
            sc[j1::p, j2::p, j::p] = A.sc
    unit = np.zeros(n, dtype=np.int64)
    unit[0::p] = A.unit
    aug = None
    if A.aug is not None:
        aug = np.zeros(n, dtype=np.int64)
        aug[0::p] = A.aug  # X -> 0
    return CommAlg(A.p, sc, unit, aug)


def predicted_tensor_profile(profile: LoewyProfile, p: int) -> tuple[int, int]:
    """(Loewy length, dimension of the last nonzero power) of A[X]/X^p."""
    dims = tuple(profile)
    if not dims or dims[0] == 0:
        raise AlgebraError("empty profile")
    n = len(dims) - 2  # J^n != 0 = J^(n+1)
    return n + p, dims[n]


def distinguishable(a: LoewyProfile, b: LoewyProfile, p: int) -> bool:
    """True when the tensor centres differ in Loewy length or in their last layer."""
    return predicted_tensor_profile(a, p) != predicted_tensor_profile(b, p)


def cartan_scale(C, d: int) -> np.ndarray:
    """Cartan matrix of A tensor a local algebra of dimension d."""
    C = np.asarray(C, dtype=np.int64)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise ValueError("Cartan matrix must be square")
    if d < 1:
        raise ValueError("d must be positive")
    return C * d


def p_rank(C, p: int) -> int:
    return gfp.rank(gfp.mod(C, p), p)
