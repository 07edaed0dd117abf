# cython: language_level=3
"""Compiled twins of the functions in ``_kernels_py``."""
import numpy as np

from libc.stdint cimport int64_t, uint8_t


def pack_fixed(values, Py_ssize_t width):
    cdef int64_t[::1] vals = np.ascontiguousarray(values, dtype=np.int64)
    cdef Py_ssize_t n = vals.shape[0]
    out_arr = np.zeros(n * width, dtype=np.uint8)
    cdef uint8_t[::1] out = out_arr
    cdef Py_ssize_t i, b
    cdef int64_t v
    for i in range(n):
        v = vals[i]
        for b in range(width):
            out[i * width + width - 1 - b] = (v >> b) & 1
    return out_arr


def unpack_fixed(bits, Py_ssize_t width):
    cdef uint8_t[::1] bv = np.ascontiguousarray(bits, dtype=np.uint8)
    cdef Py_ssize_t nbits = bv.shape[0]
    if width == 0:
        return np.zeros(0, dtype=np.int64)
    if nbits % width:
        raise ValueError(f"{nbits} bits is not a multiple of width {width}")
    cdef Py_ssize_t n = nbits // width
    out_arr = np.zeros(n, dtype=np.int64)
    cdef int64_t[::1] out = out_arr
    cdef Py_ssize_t i, b
    cdef int64_t v
    for i in range(n):
        v = 0
        for b in range(width):
            v = (v << 1) | bv[i * width + b]
        out[i] = v
    return out_arr


def pointer_walk(f_a, f_b, int64_t start, Py_ssize_t steps):
    cdef int64_t[::1] fa = np.ascontiguousarray(f_a, dtype=np.int64)
    cdef int64_t[::1] fb = np.ascontiguousarray(f_b, dtype=np.int64)
    out_arr = np.empty(steps + 1, dtype=np.int64)
    cdef int64_t[::1] out = out_arr
    cdef int64_t v = start
    cdef Py_ssize_t i
    out[0] = v
    for i in range(steps):
        if i % 2 == 0:
            v = fa[v]
        else:
            v = fb[v]
        out[i + 1] = v
    return out_arr


cdef void _walk(Py_ssize_t lvl, int64_t node, bint a_ok, bint b_ok, int64_t *pos,
                const int64_t[::1] ptrs, const int64_t[::1] off, const int64_t[::1] ar,
                const uint8_t[::1] own, const uint8_t[::1] lv,
                uint8_t[::1] alice, uint8_t[::1] bob) noexcept nogil:
    # depth-first over the tree; paths are visited in index order
    cdef int64_t d, target
    cdef bint match
    if lvl == ar.shape[0]:
        alice[pos[0]] = a_ok and lv[pos[0]] == 1
        bob[pos[0]] = b_ok
        pos[0] += 1
        return
    target = ptrs[off[lvl] + node]
    for d in range(ar[lvl]):
        match = d == target
        if own[lvl] == 0:
            _walk(lvl + 1, node * ar[lvl] + d, a_ok and match, b_ok, pos,
                  ptrs, off, ar, own, lv, alice, bob)
        else:
            _walk(lvl + 1, node * ar[lvl] + d, a_ok, b_ok and match, pos,
                  ptrs, off, ar, own, lv, alice, bob)


def disj_membership(ptrs, offsets, arities, owners, leaves):
    cdef const int64_t[::1] p_arr = np.ascontiguousarray(ptrs, dtype=np.int64)
    cdef const int64_t[::1] off = np.ascontiguousarray(offsets, dtype=np.int64)
    cdef const int64_t[::1] ar = np.ascontiguousarray(arities, dtype=np.int64)
    cdef const uint8_t[::1] own = np.ascontiguousarray(owners, dtype=np.uint8)
    cdef const uint8_t[::1] lv = np.ascontiguousarray(leaves, dtype=np.uint8)
    cdef int64_t total = 1
    cdef Py_ssize_t lvl
    for lvl in range(ar.shape[0]):
        total *= ar[lvl]
    if lv.shape[0] < total:
        raise ValueError("fewer leaves than paths")
    alice_arr = np.zeros(total, dtype=np.uint8)
    bob_arr = np.zeros(total, dtype=np.uint8)
    cdef uint8_t[::1] alice = alice_arr
    cdef uint8_t[::1] bob = bob_arr
    cdef int64_t pos = 0
    with nogil:
        _walk(0, 0, True, True, &pos, p_arr, off, ar, own, lv, alice, bob)
    return alice_arr, bob_arr
