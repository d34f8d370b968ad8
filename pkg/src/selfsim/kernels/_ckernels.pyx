# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled transducer kernels; same contract as ``_pykernels``."""

import numpy as np
cimport numpy as cnp

cnp.import_array()

ctypedef cnp.int64_t i64


def act_batch(const i64[:, ::1] delta, const i64[:, ::1] lam,
              const i64[::1] states, const i64[:, ::1] words):
    cdef Py_ssize_t n = words.shape[0], length = words.shape[1]
    cdef Py_ssize_t nst = states.shape[0]
    cdef Py_ssize_t row, col, s
    cdef i64 q, a
    out_arr = np.array(words, dtype=np.int64, copy=True)
    cdef i64[:, ::1] out = out_arr
    with nogil:
        for s in range(nst):
            for row in range(n):
                q = states[s]
                for col in range(length):
                    a = out[row, col]
                    out[row, col] = lam[q, a]
                    q = delta[q, a]
    return out_arr


def composite_children(const i64[:, ::1] delta, const i64[:, ::1] lam,
                       const i64[::1] comp):
    cdef Py_ssize_t nsym = lam.shape[1], length = comp.shape[0]
    cdef Py_ssize_t x, i
    cdef i64 a, q
    out_arr = np.empty(nsym, dtype=np.int64)
    nxt_arr = np.empty((nsym, length), dtype=np.int64)
    cdef i64[::1] out = out_arr
    cdef i64[:, ::1] nxt = nxt_arr
    with nogil:
        for x in range(nsym):
            a = x
            for i in range(length):
                q = comp[i]
                nxt[x, i] = delta[q, a]
                a = lam[q, a]
            out[x] = a
    return out_arr, nxt_arr


def affine_batch(const i64[:, ::1] T, const i64[::1] c, i64 k, const i64[:, ::1] words):
    cdef Py_ssize_t n = words.shape[0], length = words.shape[1]
    cdef Py_ssize_t row, i, j
    cdef i64 acc
    if k >= 3037000499:
        # a single product of residues no longer fits in 64 bits
        from ._pykernels import affine_batch as exact_batch
        return exact_batch(np.asarray(T), np.asarray(c), k, np.asarray(words))
    # reduce once per entry when the unreduced sum cannot overflow
    cdef bint lazy = k < 3037000499 and k * k * (length + 1) < (1 << 62)
    out_arr = np.empty((n, length), dtype=np.int64)
    cdef i64[:, ::1] out = out_arr
    with nogil:
        for row in range(n):
            for j in range(length):
                acc = c[j]
                if lazy:
                    for i in range(j + 1):
                        acc = acc + words[row, i] * T[i, j]
                else:
                    for i in range(j + 1):
                        acc = (acc + words[row, i] * T[i, j]) % k
                out[row, j] = acc % k
    return out_arr
