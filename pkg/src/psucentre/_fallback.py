"""Pure NumPy versions of the routines in ``_kernels.pyx``.

Same signatures and results; used when the extension is not built or when
``PSUCENTRE_BACKEND=numpy`` is set.
"""

import numpy as np

CHUNK = 1 << 18


class KeyIndex:
    """Sorted-array map from canonical key to element index."""

    def __init__(self, keys):
        keys = np.ascontiguousarray(keys, dtype=np.uint64)
        self._order = np.argsort(keys, kind="stable")
        self._sorted = keys[self._order]
        self.size = len(keys)

    def lookup(self, keys):
        keys = np.asarray(keys, dtype=np.uint64)
        if self.size == 0:
            return np.full(len(keys), -1, dtype=np.int64)
        pos = np.searchsorted(self._sorted, keys)
        pos = np.minimum(pos, self.size - 1)
        hit = self._sorted[pos] == keys
        return np.where(hit, self._order[pos], -1).astype(np.int64)


def _mat3(a, b, mul, add, xor_add):
    # a, b: (n, 9) int arrays (b may have one row)
    out = np.empty((max(len(a), len(b)), 9), dtype=np.uint8)
    for i in range(3):
        for j in range(3):
            t0 = mul[a[:, 3 * i], b[:, j]]
            t1 = mul[a[:, 3 * i + 1], b[:, 3 + j]]
            t2 = mul[a[:, 3 * i + 2], b[:, 6 + j]]
            if xor_add:
                out[:, 3 * i + j] = t0 ^ t1 ^ t2
            else:
                out[:, 3 * i + j] = add[add[t0, t1], t2]
    return out


def matmul(A, B, mul, add, xor_add):
    a = np.asarray(A, dtype=np.uint8).reshape(-1, 9)
    b = np.asarray(B, dtype=np.uint8).reshape(-1, 9)
    if len(b) != 1 and len(b) != len(a):
        raise ValueError("shape mismatch")
    out = np.empty((len(a), 9), dtype=np.uint8)
    for s in range(0, len(a), CHUNK):
        bb = b if len(b) == 1 else b[s:s + CHUNK]
        out[s:s + CHUNK] = _mat3(a[s:s + CHUNK], bb, mul, add, xor_add)
    return out


def _canon_keys(m, scal, mul, bits):
    shifts = np.array([bits * (8 - t) for t in range(9)], dtype=np.uint64)
    best = None
    for lam in scal:
        scaled = mul[lam][m].astype(np.uint64)
        key = np.bitwise_or.reduce(scaled << shifts, axis=1)
        best = key if best is None else np.minimum(best, key)
    return best


def transform_keys(X, L, R, mul, add, xor_add, scal, bits):
    x = np.asarray(X, dtype=np.uint8).reshape(-1, 9)
    out = np.empty(len(x), dtype=np.uint64)
    left = None if L is None else np.asarray(L, dtype=np.uint8).reshape(1, 9)
    right = None if R is None else np.asarray(R, dtype=np.uint8).reshape(1, 9)
    for s in range(0, len(x), CHUNK):
        m = x[s:s + CHUNK]
        if left is not None:
            m = _mat3(np.broadcast_to(left, (len(m), 9)), m, mul, add, xor_add)
        if right is not None:
            m = _mat3(m, right, mul, add, xor_add)
        out[s:s + CHUNK] = _canon_keys(m, scal, mul, bits)
    return out


def transform_index(X, L, R, mul, add, xor_add, scal, bits, index):
    return index.lookup(transform_keys(X, L, R, mul, add, xor_add, scal, bits))


def sweep_counts(X, R, mul, add, xor_add, scal, bits, index, classid, nclass):
    classid = np.asarray(classid, dtype=np.int64)
    idx = transform_index(X, None, R, mul, add, xor_add, scal, bits, index)
    found = idx >= 0
    flat = classid[found] * nclass + classid[idx[found]]
    counts = np.bincount(flat, minlength=nclass * nclass).reshape(nclass, nclass)
    return counts.astype(np.int64), int((~found).sum())
