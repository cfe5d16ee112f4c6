"""Backend selection for the matrix kernels.

The compiled extension ``_kernels`` is used when importable; otherwise,
or when the environment variable ``PSUCENTRE_BACKEND=numpy`` is set, the
NumPy implementation in ``_fallback`` is used.  Both expose the same
functions, so :class:`MatrixKit` can be bound to either one explicitly.
"""

from __future__ import annotations

import os

import numpy as np

from . import _fallback

try:
    from . import _kernels as _compiled
except ImportError:  # pragma: no cover - depends on the build
    _compiled = None

BACKENDS = {"numpy": _fallback}
if _compiled is not None:
    BACKENDS["cython"] = _compiled


def default_backend() -> str:
    want = os.environ.get("PSUCENTRE_BACKEND", "").strip().lower()
    if want:
        if want not in BACKENDS:
            raise RuntimeError(f"backend {want!r} unavailable (have {sorted(BACKENDS)})")
        return want
    return "cython" if "cython" in BACKENDS else "numpy"


class MatrixKit:
    """Kernel calls bound to one field's tables and scalar subgroup."""

    def __init__(self, tables, scalars, backend: str | None = None):
        self.backend = backend or default_backend()
        self.impl = BACKENDS[self.backend]
        self.mul = np.ascontiguousarray(tables.mul)
        self.add = np.ascontiguousarray(tables.add)
        self.xor_add = bool(np.array_equal(
            self.add, np.bitwise_xor.outer(np.arange(len(self.add)), np.arange(len(self.add)))))
        self.scal = np.ascontiguousarray(scalars, dtype=np.uint8)
        order = len(self.mul)
        self.bits = max(1, (order - 1).bit_length())
        if 9 * self.bits > 64:
            raise ValueError(f"matrices over a field of order {order} do not pack into 64 bits")

    def matmul(self, A, B):
        return self.impl.matmul(A, B, self.mul, self.add, self.xor_add)

    def keys(self, X, left=None, right=None):
        return self.impl.transform_keys(X, left, right, self.mul, self.add,
                                        self.xor_add, self.scal, self.bits)

    def make_index(self, keys):
        return self.impl.KeyIndex(keys)

    def transform_index(self, X, left, right, index):
        return self.impl.transform_index(X, left, right, self.mul, self.add,
                                         self.xor_add, self.scal, self.bits, index)

    def sweep_counts(self, X, right, index, classid, nclass):
        return self.impl.sweep_counts(X, right, self.mul, self.add, self.xor_add,
                                      self.scal, self.bits, index, classid, nclass)

    def unpack(self, keys) -> np.ndarray:
        """Inverse of the key packing: (n, 9) uint8 matrices."""
        keys = np.asarray(keys, dtype=np.uint64).reshape(-1)
        mask = np.uint64((1 << self.bits) - 1)
        out = np.empty((len(keys), 9), dtype=np.uint8)
        for t in range(9):
            out[:, t] = (keys >> np.uint64(self.bits * (8 - t))) & mask
        return out
