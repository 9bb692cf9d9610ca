"""Backend selection for the hot sparse x dense product.

The compiled extension is used when it imports; otherwise the scipy path
runs. Both accumulate each output row in CSR order.
"""

from __future__ import annotations

import contextlib

import numpy as np
import scipy.sparse as sp

try:
    from folksim import _kernels as _ext
except ImportError:  # pragma: no cover - depends on build
    _ext = None

_BACKENDS = ("cython", "python") if _ext is not None else ("python",)
_backend = _BACKENDS[0]


def available_backends() -> tuple[str, ...]:
    return _BACKENDS


def get_backend() -> str:
    return _backend


def set_backend(name: str) -> None:
    global _backend
    if name not in _BACKENDS:
        raise ValueError(f"backend {name!r} not available; choose from {_BACKENDS}")
    _backend = name


@contextlib.contextmanager
def use_backend(name: str):
    prev = _backend
    set_backend(name)
    try:
        yield
    finally:
        set_backend(prev)


def as_csr_float(m) -> sp.csr_matrix:
    m = sp.csr_matrix(m, dtype=np.float64)
    m.sort_indices()
    return m


def csr_dense(a: sp.csr_matrix, dense: np.ndarray, threads: int = 1) -> np.ndarray:
    """Return ``a @ dense`` as a C-contiguous float64 array."""
    dense = np.ascontiguousarray(dense, dtype=np.float64)
    if a.shape[1] != dense.shape[0]:
        raise ValueError(f"shape mismatch: {a.shape} @ {dense.shape}")
    if _backend == "cython":
        return _ext.csr_dense_matmul(
            np.ascontiguousarray(a.indptr, dtype=np.int64),
            np.ascontiguousarray(a.indices, dtype=np.int64),
            np.ascontiguousarray(a.data, dtype=np.float64),
            dense,
            int(threads),
        )
    return np.ascontiguousarray(a @ dense)
