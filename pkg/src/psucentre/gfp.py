"""Exact linear algebra over a prime field F_p.

Matrices are int64 NumPy arrays with entries in [0, p).  Products go through
float64 BLAS, which is exact while every partial sum stays below 2^53; the
helpers check that bound before trusting it.
"""

from __future__ import annotations

import numpy as np

_EXACT = float(2 ** 52)


def mod(M, p: int) -> np.ndarray:
    return np.mod(np.asarray(M, dtype=np.int64), p)


def matmul(A, B, p: int) -> np.ndarray:
    """(A @ B) mod p, exactly."""
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    inner = A.shape[-1] if A.ndim else 1
    if inner * (p - 1) ** 2 < _EXACT:
        return np.mod(A.astype(np.float64) @ B.astype(np.float64), p).astype(np.int64)
    return np.mod(A @ B, p)  # pragma: no cover - only for huge inner dimensions


def inv_mod(x: int, p: int) -> int:
    return pow(int(x), -1, p)


def rref(M, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form, with zero rows dropped, and pivot columns."""
    A = mod(M, p).copy()
    if A.ndim != 2:
        raise ValueError("rref needs a 2-d array")
    rows, cols = A.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(A[r:, c])
        if not len(nz):
            continue
        k = r + int(nz[0])
        if k != r:
            A[[r, k]] = A[[k, r]]
        if A[r, c] != 1:
            A[r] = (A[r] * inv_mod(A[r, c], p)) % p
        col = A[:, c].copy()
        col[r] = 0
        hit = np.flatnonzero(col)
        if len(hit):
            A[hit] = (A[hit] - np.outer(col[hit], A[r])) % p
        pivots.append(c)
        r += 1
    return A[:r], pivots


def rank(M, p: int) -> int:
    M = np.asarray(M)
    if M.size == 0:
        return 0
    return len(rref(M, p)[1])


def nullspace(M, p: int) -> np.ndarray:
    """Basis (as rows) of {x : M @ x = 0}."""
    M = np.asarray(M, dtype=np.int64)
    cols = M.shape[1]
    if M.shape[0] == 0:
        return np.eye(cols, dtype=np.int64)
    R, piv = rref(M, p)
    free = [c for c in range(cols) if c not in set(piv)]
    out = np.zeros((len(free), cols), dtype=np.int64)
    for t, f in enumerate(free):
        out[t, f] = 1
        for i, c in enumerate(piv):
            out[t, c] = (-R[i, f]) % p
    return out


def left_nullspace(M, p: int) -> np.ndarray:
    """Basis (as rows) of {x : x @ M = 0}."""
    return nullspace(np.asarray(M).T, p)


def reduce_rows(X, W: np.ndarray, piv: list[int], p: int) -> np.ndarray:
    """Residues of the rows of X modulo the row space of the RREF matrix W."""
    X = mod(X, p)
    if len(piv) == 0:
        return X
    return np.mod(X - matmul(X[:, piv], W, p), p)


def coordinates(X, W: np.ndarray, piv: list[int], p: int) -> np.ndarray:
    """Coordinates of rows of X in the RREF basis W; raises if some row is outside."""
    X = mod(X, p)
    if reduce_rows(X, W, piv, p).any():
        raise ValueError("vector not in subspace")
    return X[:, piv].copy()


def solve(A, b, p: int) -> np.ndarray | None:
    """One solution x of A @ x = b, or None."""
    A = mod(A, p)
    b = mod(b, p).reshape(-1, 1)
    R, piv = rref(np.hstack([A, b]), p)
    n = A.shape[1]
    if piv and piv[-1] == n:
        return None
    x = np.zeros(n, dtype=np.int64)
    for i, c in enumerate(piv):
        x[c] = R[i, n]
    return x


def row_space(M, p: int, W: np.ndarray | None = None, chunk: int = 4096,
              seed: int = 0) -> tuple[np.ndarray, list[int]]:
    """RREF basis of span(rows of W and M), built chunk by chunk.

    Each chunk is reduced against the basis found so far, so the cost tracks
    the rank rather than the number of input rows.  Large residual blocks are
    compressed by random F_p combinations; the final verification pass makes
    the result exact regardless of the random draw.
    """
    M = mod(M, p)
    cols = M.shape[1] if M.ndim == 2 else (W.shape[1] if W is not None else 0)
    rng = np.random.default_rng(seed)
    if W is None or len(W) == 0:
        basis, piv = np.zeros((0, cols), dtype=np.int64), []
    else:
        basis, piv = rref(W, p)
    pending = M
    while len(pending):
        compressed = False
        for s in range(0, len(pending), chunk):
            res = reduce_rows(pending[s:s + chunk], basis, piv, p)
            res = res[res.any(axis=1)]
            if not len(res):
                continue
            if len(res) > cols + 8:
                C = rng.integers(0, p, size=(cols + 8, len(res)))
                res = matmul(C, res, p)
                compressed = True
            basis, piv = rref(np.vstack([basis, res]), p)
        if not compressed:
            break
        res = np.vstack([reduce_rows(pending[s:s + chunk], basis, piv, p)
                         for s in range(0, len(pending), chunk)])
        pending = res[res.any(axis=1)]
    return basis, piv
