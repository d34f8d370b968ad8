"""NumPy fallback for the transducer kernels.

Both functions take integer transition/output tables of shape
``(n_states, n_symbols)``; state and symbol ids are row/column indices.
"""
from __future__ import annotations

import numpy as np


def act_batch(delta: np.ndarray, lam: np.ndarray, states: np.ndarray,
              words: np.ndarray) -> np.ndarray:
    """Apply the state sequence ``states`` (left to right) to every row of ``words``."""
    words = np.asarray(words, dtype=np.int64)
    n, length = words.shape
    nsym = lam.shape[1]
    # column-major working copy and flat tables keep every lookup a contiguous take()
    cols = np.ascontiguousarray(words.T)
    lam_flat = np.ascontiguousarray(lam, dtype=np.int64).ravel()
    next_row = np.ascontiguousarray(delta, dtype=np.int64).ravel() * nsym
    idx = np.empty(n, dtype=np.int64)
    for q0 in states:
        q = np.full(n, int(q0) * nsym, dtype=np.int64)
        for col in range(length):
            np.add(q, cols[col], out=idx)
            lam_flat.take(idx, out=cols[col])
            next_row.take(idx, out=q)
    return np.ascontiguousarray(cols.T)


def composite_children(delta: np.ndarray, lam: np.ndarray, comp: np.ndarray):
    """Output letter and successor tuple of a composite state, for every input letter."""
    nsym = lam.shape[1]
    a = np.arange(nsym, dtype=np.int64)
    nxt = np.empty((nsym, len(comp)), dtype=np.int64)
    for i, q in enumerate(comp):
        nxt[:, i] = delta[q, a]
        a = lam[q, a]
    return a, nxt


def affine_batch(T: np.ndarray, c: np.ndarray, k: int, words: np.ndarray) -> np.ndarray:
    """Rows of ``words @ T + c`` reduced mod ``k`` (``T`` upper triangular)."""
    length = words.shape[1]
    if k * k * max(length, 1) < 2**62:
        return (words @ T + c) % k
    obj = (words.astype(object) @ T.astype(object) + c.astype(object)) % k
    return obj.astype(np.int64)
