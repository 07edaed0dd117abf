"""Pure-Python (numpy) versions of the hot kernels.

These are the reference implementations; ``_kernels.pyx`` mirrors them
function for function and the test-suite checks both agree.
"""
import numpy as np


def pack_fixed(values, width):
    """Encode non-negative ints as concatenated fixed-width big-endian bits."""
    values = np.asarray(values, dtype=np.int64)
    if width == 0:
        return np.zeros(0, dtype=np.uint8)
    shifts = np.arange(width - 1, -1, -1, dtype=np.int64)
    return ((values[:, None] >> shifts) & 1).astype(np.uint8).ravel()


def unpack_fixed(bits, width):
    """Inverse of :func:`pack_fixed`."""
    bits = np.asarray(bits, dtype=np.uint8)
    if width == 0:
        return np.zeros(0, dtype=np.int64)
    if bits.size % width:
        raise ValueError(f"{bits.size} bits is not a multiple of width {width}")
    weights = np.int64(1) << np.arange(width - 1, -1, -1, dtype=np.int64)
    return bits.reshape(-1, width).astype(np.int64) @ weights


def pointer_walk(f_a, f_b, start, steps):
    """Vertices v_1..v_{steps+1} of the alternating walk starting in V_A."""
    path = [int(start)]
    v = int(start)
    for i in range(steps):
        v = int(f_a[v]) if i % 2 == 0 else int(f_b[v])
        path.append(v)
    return np.array(path, dtype=np.int64)


def disj_membership(ptrs, offsets, arities, owners, leaves):
    """Membership masks of every root-to-leaf path for the two players.

    ``ptrs[offsets[l]:offsets[l+1]]`` holds the pointer of each node on
    level ``l`` (top level first).  A path belongs to a player's set when it
    follows every pointer that player owns; Alice additionally requires the
    leaf bit to be 1.
    """
    arities = np.asarray(arities, dtype=np.int64)
    n_levels = arities.size
    total = int(np.prod(arities)) if n_levels else 1
    p = np.arange(total, dtype=np.int64)
    alice = np.asarray(leaves, dtype=np.uint8)[:total] == 1
    bob = np.ones(total, dtype=bool)
    stride = total
    for lvl in range(n_levels):
        node = p // stride
        stride //= int(arities[lvl])
        digit = (p // stride) % arities[lvl]
        level_ptrs = np.asarray(ptrs[offsets[lvl]:offsets[lvl + 1]], dtype=np.int64)
        ok = digit == level_ptrs[node]
        if owners[lvl] == 0:
            alice &= ok
        else:
            bob &= ok
    return alice.astype(np.uint8), bob.astype(np.uint8)
