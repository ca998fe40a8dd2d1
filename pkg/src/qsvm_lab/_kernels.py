"""Hot inner loops: controlled single-qubit updates and k-means assignment.

Each kernel exists twice, a numba ``@njit`` version and a pure-numpy
version with identical semantics.  ``QSVM_LAB_DISABLE_NUMBA=1`` (read once at
import) selects the numpy path; so does a missing numba install.
"""
from __future__ import annotations

import os
from functools import lru_cache

import numpy as np

_FLAG = os.environ.get("QSVM_LAB_DISABLE_NUMBA", "").strip().lower()

try:
    if _FLAG in ("1", "true", "yes", "on"):
        raise ImportError("numba disabled by QSVM_LAB_DISABLE_NUMBA")
    from numba import njit
except ImportError:
    njit = None

USE_NUMBA = njit is not None


# ---------------------------------------------------------------------------
# controlled 2x2 update on axis 0 of a (2**n, ncols) complex array
# ---------------------------------------------------------------------------

def _apply_1q_py(amps, m00, m01, m10, m11, target, ctrl_mask, ctrl_value):
    dim, ncols = amps.shape
    tbit = 1 << target
    for i in range(dim):
        if i & tbit:
            continue
        if (i & ctrl_mask) != ctrl_value:
            continue
        j = i | tbit
        for c in range(ncols):
            a = amps[i, c]
            b = amps[j, c]
            amps[i, c] = m00 * a + m01 * b
            amps[j, c] = m10 * a + m11 * b


@lru_cache(maxsize=512)
def _pair_indices(dim: int, target: int, ctrl_mask: int, ctrl_value: int):
    idx = np.arange(dim, dtype=np.int64)
    keep = ((idx >> target) & 1 == 0) & ((idx & ctrl_mask) == ctrl_value)
    lo = idx[keep]
    return lo, lo | (1 << target)


def _apply_1q_numpy(amps, m00, m01, m10, m11, target, ctrl_mask, ctrl_value):
    lo, hi = _pair_indices(amps.shape[0], target, ctrl_mask, ctrl_value)
    a = amps[lo]
    b = amps[hi]
    amps[lo] = m00 * a + m01 * b
    amps[hi] = m10 * a + m11 * b


# ---------------------------------------------------------------------------
# nearest-center assignment
# ---------------------------------------------------------------------------

def _assign_py(X, centers):
    n, d = X.shape
    k = centers.shape[0]
    labels = np.empty(n, dtype=np.int64)
    sse = 0.0
    for i in range(n):
        best = 0
        best_d = np.inf
        for c in range(k):
            acc = 0.0
            for f in range(d):
                diff = X[i, f] - centers[c, f]
                acc += diff * diff
            if acc < best_d:
                best_d = acc
                best = c
        labels[i] = best
        sse += best_d
    return labels, sse


def _assign_numpy(X, centers):
    diff = X[:, None, :] - centers[None, :, :]
    d2 = np.einsum("nkd,nkd->nk", diff, diff)
    labels = np.argmin(d2, axis=1).astype(np.int64)
    return labels, float(d2[np.arange(X.shape[0]), labels].sum())


if USE_NUMBA:
    _apply_1q_jit = njit(cache=True)(_apply_1q_py)
    _assign_jit = njit(cache=True)(_assign_py)


def apply_1q(amps: np.ndarray, mat: np.ndarray, target: int,
             ctrl_mask: int = 0, ctrl_value: int = 0) -> None:
    """Apply ``mat`` to qubit ``target`` of ``amps`` in place.

    Only basis rows with ``(row & ctrl_mask) == ctrl_value`` are touched.
    ``amps`` must be C-contiguous complex128 of shape ``(2**n, ncols)``.
    """
    m00, m01, m10, m11 = (complex(x) for x in mat.ravel())
    if USE_NUMBA:
        _apply_1q_jit(amps, m00, m01, m10, m11, target, ctrl_mask, ctrl_value)
    else:
        _apply_1q_numpy(amps, m00, m01, m10, m11, target, ctrl_mask, ctrl_value)


def assign_nearest(X: np.ndarray, centers: np.ndarray) -> tuple[np.ndarray, float]:
    """Index of the nearest center per row (ties to the lower index), and the SSE."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    centers = np.ascontiguousarray(centers, dtype=np.float64)
    if USE_NUMBA:
        labels, sse = _assign_jit(X, centers)
        return labels, float(sse)
    return _assign_numpy(X, centers)


# exposed for the benchmark and the cross-path tests
numpy_apply_1q = _apply_1q_numpy
numpy_assign = _assign_numpy
jit_apply_1q = _apply_1q_jit if USE_NUMBA else None
jit_assign = _assign_jit if USE_NUMBA else None
