# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for 3x3 matrices over a small finite field.

A matrix is 9 uint8 field codes, row major.  Products use the field's
multiplication and addition tables; canonical keys pack the
lexicographically smallest scalar multiple into one uint64, entry 0 in
the most significant position.
"""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint8_t, uint64_t, int64_t

cnp.import_array()

cdef uint64_t EMPTY = 0xFFFFFFFFFFFFFFFFULL


cdef inline void _mat3(const uint8_t* a, const uint8_t* b, uint8_t* c,
                       const uint8_t[:, ::1] mul, const uint8_t[:, ::1] add,
                       bint xor_add) noexcept nogil:
    cdef int i, j
    cdef uint8_t s
    for i in range(3):
        for j in range(3):
            if xor_add:
                s = (mul[a[3 * i], b[j]] ^ mul[a[3 * i + 1], b[3 + j]]
                     ^ mul[a[3 * i + 2], b[6 + j]])
            else:
                s = add[add[mul[a[3 * i], b[j]], mul[a[3 * i + 1], b[3 + j]]],
                        mul[a[3 * i + 2], b[6 + j]]]
            c[3 * i + j] = s


cdef inline uint64_t _canon_key(const uint8_t* m, const uint8_t[::1] scal,
                                const uint8_t[:, ::1] mul, int bits) noexcept nogil:
    cdef uint64_t best = EMPTY, key
    cdef int s, t
    cdef uint8_t lam
    for s in range(scal.shape[0]):
        lam = scal[s]
        key = 0
        for t in range(9):
            key = (key << bits) | mul[lam, m[t]]
        if key < best:
            best = key
    return best


cdef inline uint64_t _slot(uint64_t key, int shift) noexcept nogil:
    return (key * 0x9E3779B97F4A7C15ULL) >> shift


cdef class KeyIndex:
    """Open-addressing hash map from canonical key to element index."""

    cdef uint64_t[::1] slots
    cdef int64_t[::1] values
    cdef int shift
    cdef uint64_t mask
    cdef readonly Py_ssize_t size

    def __init__(self, keys):
        cdef const uint64_t[::1] k = np.ascontiguousarray(keys, dtype=np.uint64)
        cdef Py_ssize_t n = k.shape[0], i
        cdef int logsize = 4
        while (1 << logsize) < 2 * n:
            logsize += 1
        self.shift = 64 - logsize
        self.mask = (1ULL << logsize) - 1
        self.slots = np.full(1 << logsize, EMPTY, dtype=np.uint64)
        self.values = np.full(1 << logsize, -1, dtype=np.int64)
        self.size = n
        cdef uint64_t h
        with nogil:
            for i in range(n):
                h = _slot(k[i], self.shift)
                while self.slots[h] != EMPTY and self.slots[h] != k[i]:
                    h = (h + 1) & self.mask
                self.slots[h] = k[i]
                self.values[h] = i

    cdef inline int64_t find(self, uint64_t key) noexcept nogil:
        cdef uint64_t h = _slot(key, self.shift)
        while True:
            if self.slots[h] == key:
                return self.values[h]
            if self.slots[h] == EMPTY:
                return -1
            h = (h + 1) & self.mask

    def lookup(self, keys):
        cdef const uint64_t[::1] k = np.ascontiguousarray(keys, dtype=np.uint64)
        out = np.empty(k.shape[0], dtype=np.int64)
        cdef int64_t[::1] o = out
        cdef Py_ssize_t i
        with nogil:
            for i in range(k.shape[0]):
                o[i] = self.find(k[i])
        return out


def matmul(A, B, mul, add, bint xor_add):
    """Row-wise products A[i] @ B[i]; B may be a single matrix."""
    cdef const uint8_t[:, ::1] a = np.ascontiguousarray(A, dtype=np.uint8).reshape(-1, 9)
    cdef const uint8_t[:, ::1] b = np.ascontiguousarray(B, dtype=np.uint8).reshape(-1, 9)
    cdef const uint8_t[:, ::1] mt = mul
    cdef const uint8_t[:, ::1] at = add
    cdef Py_ssize_t n = a.shape[0], i
    cdef bint bcast = b.shape[0] == 1
    if not bcast and b.shape[0] != n:
        raise ValueError("shape mismatch")
    out = np.empty((n, 9), dtype=np.uint8)
    cdef uint8_t[:, ::1] o = out
    with nogil:
        for i in range(n):
            _mat3(&a[i, 0], &b[0 if bcast else i, 0], &o[i, 0], mt, at, xor_add)
    return out


cdef void _transform(const uint8_t[:, ::1] x, const uint8_t[::1] left,
                     const uint8_t[::1] right, bint has_left, bint has_right,
                     const uint8_t[:, ::1] mt, const uint8_t[:, ::1] at,
                     bint xor_add, const uint8_t[::1] scal, int bits,
                     uint64_t[::1] out) noexcept nogil:
    cdef uint8_t t1[9]
    cdef uint8_t t2[9]
    cdef const uint8_t* src
    cdef Py_ssize_t i
    cdef int j
    for i in range(x.shape[0]):
        src = &x[i, 0]
        if has_left:
            _mat3(&left[0], src, t1, mt, at, xor_add)
            src = t1
        if has_right:
            _mat3(src, &right[0], t2, mt, at, xor_add)
            src = t2
        out[i] = _canon_key(src, scal, mt, bits)


def transform_keys(X, L, R, mul, add, bint xor_add, scal, int bits):
    """Canonical keys of L @ X[i] @ R (L or R may be None)."""
    cdef const uint8_t[:, ::1] x = np.ascontiguousarray(X, dtype=np.uint8).reshape(-1, 9)
    cdef uint8_t[::1] dummy = np.zeros(9, dtype=np.uint8)
    cdef const uint8_t[::1] left = dummy if L is None else np.ascontiguousarray(L, dtype=np.uint8).reshape(9)
    cdef const uint8_t[::1] right = dummy if R is None else np.ascontiguousarray(R, dtype=np.uint8).reshape(9)
    cdef bint hl = L is not None, hr = R is not None
    out = np.empty(x.shape[0], dtype=np.uint64)
    cdef uint64_t[::1] o = out
    cdef const uint8_t[:, ::1] mt = mul
    cdef const uint8_t[:, ::1] at = add
    cdef const uint8_t[::1] sc = scal
    with nogil:
        _transform(x, left, right, hl, hr, mt, at, xor_add, sc, bits, o)
    return out


def transform_index(X, L, R, mul, add, bint xor_add, scal, int bits, KeyIndex index):
    """Element indices of canonical L @ X[i] @ R; -1 where absent."""
    keys = transform_keys(X, L, R, mul, add, xor_add, scal, bits)
    cdef uint64_t[::1] k = keys
    out = np.empty(k.shape[0], dtype=np.int64)
    cdef int64_t[::1] o = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(k.shape[0]):
            o[i] = index.find(k[i])
    return out


def sweep_counts(X, R, mul, add, bint xor_add, scal, int bits, KeyIndex index,
                 classid, int nclass):
    """counts[c(g), c(g @ R)] over every row g of X.

    Returns a (nclass, nclass) int64 table and the number of products
    that were not found in ``index`` (nonzero means a broken group).
    """
    cdef const uint8_t[:, ::1] x = np.ascontiguousarray(X, dtype=np.uint8).reshape(-1, 9)
    cdef const uint8_t[::1] right = np.ascontiguousarray(R, dtype=np.uint8).reshape(9)
    cdef const int64_t[::1] cid = np.ascontiguousarray(classid, dtype=np.int64)
    cdef const uint8_t[:, ::1] mt = mul
    cdef const uint8_t[:, ::1] at = add
    cdef const uint8_t[::1] sc = scal
    counts = np.zeros((nclass, nclass), dtype=np.int64)
    cdef int64_t[:, ::1] cnt = counts
    cdef uint8_t t[9]
    cdef Py_ssize_t i
    cdef int64_t j, missing = 0
    with nogil:
        for i in range(x.shape[0]):
            _mat3(&x[i, 0], &right[0], t, mt, at, xor_add)
            j = index.find(_canon_key(t, sc, mt, bits))
            if j < 0:
                missing += 1
            else:
                cnt[cid[i], cid[j]] += 1
    return counts, missing
