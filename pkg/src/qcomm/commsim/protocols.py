"""Protocols for S_k and pointer jumping with exact bit accounting.

Each protocol keeps the two players' knowledge apart: a receiver learns
something only by parsing the bits of a message with a ``BitReader``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .. import kernels
from .problems import ALICE, BOB, PjInstance, SkInstance, parity, width
from .transcript import BitReader, PublicCoins, Transcript, other


@dataclass
class ProtocolResult:
    output: int
    transcript: Transcript
    aborted: bool = False
    degenerate: bool = False
    outputter: str = ""
    info: dict = field(default_factory=dict)

    @property
    def total_bits(self) -> int:
        return self.transcript.total_bits


def _enc(value: int, w: int) -> np.ndarray:
    return kernels.pack_fixed(np.array([value]), w)


# -- S_k ---------------------------------------------------------------------

def sk_protocol_right_start(inst: SkInstance) -> ProtocolResult:
    """P_k names the pointer, then each level's holder names the next one.

    Message i carries the pointer of tree depth i (``ceil(log2 arity)``
    bits); Alice receives Bob's level-1 index last and outputs her bit.
    """
    tr = Transcript(first_sender=inst.pointer_holder)
    known = {ALICE: 0, BOB: 0}  # node index on the current depth, per player
    for idx in range(inst.k):
        s = inst.owner(idx)
        a = inst.arities[idx]
        w = width(a)
        node = known[s]
        ptr = int(inst.levels[idx][node])
        msg = tr.send(s, [("pointer", w, _enc(ptr, w))])
        rd = BitReader(msg)
        got = rd.int(w)
        rd.done()
        known[s] = node * a + ptr
        known[other(s)] = node * a + got
    return ProtocolResult(int(inst.leaves[known[ALICE]]), tr, outputter=ALICE)


def sk_protocol_wrong_start(inst: SkInstance) -> ProtocolResult:
    """k messages started by the player not holding ``a``.

    The first message is empty, messages 2..k name the pointers of levels
    k..2, and the last one (sent by Alice, who holds level 2) also carries
    the n bits of the selected level-1 instance.  Bob outputs.  For k = 1
    Alice just sends all n bits.
    """
    first = other(inst.pointer_holder)
    tr = Transcript(first_sender=first)
    n_leaf = inst.arities[-1]
    if inst.k == 1:
        msg = tr.send(ALICE, [("bits", n_leaf, inst.leaf_bits(0))])
        rd = BitReader(msg)
        bits = rd.take(n_leaf)
        rd.done()
        return ProtocolResult(int(bits[int(inst.levels[0][0])]), tr, outputter=BOB)
    tr.send(first, [])
    node = 0
    for idx in range(inst.k - 1):
        s = inst.owner(idx)
        a = inst.arities[idx]
        w = width(a)
        ptr = int(inst.levels[idx][node])
        segs = [("pointer", w, _enc(ptr, w))]
        if idx == inst.k - 2:
            segs.append(("bits", n_leaf, inst.leaf_bits(node * a + ptr)))
        rd = BitReader(tr.send(s, segs))
        node = node * a + rd.int(w)
        bits = rd.take(n_leaf) if idx == inst.k - 2 else None
        rd.done()
    # Bob now holds the n bits of level-1 node ``node`` and his own index
    return ProtocolResult(int(bits[int(inst.levels[-1][node])]), tr, outputter=BOB)


# -- pointer jumping ------------------------------------------------------------

def _owns(player: str, t: int) -> bool:
    """v_t lies in V_A (Alice's domain) iff t is odd."""
    return (t % 2 == 1) == (player == ALICE)


def _own_fn(inst: PjInstance, player: str) -> np.ndarray:
    return inst.f_a if player == ALICE else inst.f_b


def pj_det_protocol(inst: PjInstance, k: int) -> ProtocolResult:
    """Alice starts; message t names v_{t+1}; the last receiver finishes."""
    if k < 1:
        raise ValueError("k must be >= 1")
    w = width(inst.n)
    tr = Transcript(first_sender=ALICE)
    # v_1 is public; each player's furthest fully known vertex
    known = {ALICE: (1, inst.v1), BOB: (1, inst.v1)}
    for t in range(1, k + 1):
        s = ALICE if t % 2 == 1 else BOB
        idx, v = known[s]
        assert idx == t and _owns(s, t)
        nxt = int(_own_fn(inst, s)[v])
        rd = BitReader(tr.send(s, [("vertex", w, _enc(nxt, w))]))
        known[other(s)] = (t + 1, rd.int(w))
        rd.done()
        known[s] = (t + 1, nxt)
    r = other(ALICE if k % 2 == 1 else BOB)
    idx, v = known[r]
    g = int(_own_fn(inst, r)[v])
    return ProtocolResult(parity(g), tr, outputter=r, info={"vertex": g})


def iterated_log(n: float, j: int) -> float:
    """``log^(j) n`` with ``log^(0) n = n`` and ``log^(j) n = log2(max(log^(j-1) n, 1))``."""
    x = float(n)
    for _ in range(j):
        x = math.log2(max(x, 1.0))
    return x


def log_star(n: float) -> int:
    """Least j with ``log^(j) n <= 1``."""
    j, x = 0, float(n)
    while x > 1:
        x = math.log2(x)
        j += 1
    return j


def log_k_term(k: int) -> int:
    """``ceil(log2 k)``, at least 1."""
    return max(1, math.ceil(math.log2(k))) if k > 1 else 1


def prefix_schedule(n: int, k: int) -> list[int]:
    """Prefix lengths ell_0, ..., ell_{ceil(k/2)}, clamped to [1, ceil(log2 n)].

    ``ell_i = ceil(log^(ceil(k/2) - i) n) + 3 ceil(log2 k)``; once the depth
    reaches 0 the prefix is the full name.
    """
    w = width(n)
    half = math.ceil(k / 2)
    out = []
    for i in range(half + 1):
        j = half - i
        base = w if j <= 0 else math.ceil(iterated_log(n, j) - 1e-12)
        out.append(min(max(base + 3 * log_k_term(k), 1), w))
    return out


def sample_size(n: int, k: int, eps: float) -> tuple[int, bool]:
    """``|S_0| = min(ceil(delta n), n)`` with ``delta = (4/k) ln(1/eps)``; flag when clamped."""
    delta = 4.0 / k * math.log(1.0 / eps)
    m = math.ceil(delta * n - 1e-9)
    return min(m, n), m >= n


def nw_budget(n: int, k: int, eps: float) -> float:
    """``k log2 n + (n/k) ln(1/eps) (log^(ceil(k/2)) n + 3 log2 k)``."""
    return (k * math.log2(n)
            + n / k * math.log(1 / eps) * (iterated_log(n, math.ceil(k / 2)) + 3 * math.log2(k)))


def pj_nw_protocol(inst: PjInstance, k: int, eps: float, coins: PublicCoins) -> ProtocolResult:
    """Randomised k-round protocol for pointer jumping in which Bob starts.

    Round 1: Bob sends the top ell_0 bits of f_B(v) for a public random set
    S_0 of vertices.  Afterwards the sender of round r names v_r.  The first
    time Alice's v_r (r even, r <= k/2) falls in S_0 she knows a prefix of
    v_{r+1}; from then on each message also carries, for every vertex u
    whose name starts with the known prefix of the next-but-one vertex, the
    top ell_{i+1} bits of the sender's function at u.  When a prefix reaches
    the full name the receiver is two steps ahead and the players only
    forward their furthest vertex.  Without a hit by round k/2 the run
    aborts and outputs 0.

    For k < 4 there is no admissible hit round; Bob then sends all of f_B.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    n, w = inst.n, width(inst.n)
    goal = k + 2
    tr = Transcript(first_sender=BOB)
    # each player's furthest fully known vertex (index, name)
    reach = {ALICE: (1, inst.v1), BOB: (1, inst.v1)}
    info: dict = {"hit_round": None}

    def advance(p):
        t, v = reach[p]
        while t < goal and _owns(p, t):
            v = int(_own_fn(inst, p)[v])
            t += 1
        reach[p] = (t, v)

    advance(ALICE)
    degenerate = False
    if k < 4:
        degenerate = True
        rd = BitReader(tr.send(BOB, [("f_b", n * w, kernels.pack_fixed(inst.f_b, w))]))
        fb = rd.ints(n, w)
        rd.done()
        t, v = reach[ALICE]
        while t < goal:  # Alice now knows both functions
            v = int(inst.f_a[v]) if t % 2 == 1 else int(fb[v])
            t += 1
        reach[ALICE] = (t, v)
        mode = "done"
    else:
        ells = prefix_schedule(n, k)
        m, degenerate = sample_size(n, k, eps)
        s0 = coins.sample(n, m)
        l0 = ells[0]
        rd = BitReader(tr.send(BOB, [("prefixes", m * l0,
                                      kernels.pack_fixed(inst.f_b[s0] >> (w - l0), l0))]))
        table0 = dict(zip(s0.tolist(), rd.ints(m, l0).tolist()))
        rd.done()
        in_s0 = set(s0.tolist())
        mode = "search"
        stage = 0
        pref = {ALICE: None, BOB: None}  # (index, bits, value) of a known prefix
    info["degenerate"] = degenerate

    for r in range(2, k + 1):
        s = ALICE if r % 2 == 0 else BOB
        o = other(s)
        if mode == "search" and r > k / 2:
            mode = "aborted"
        if mode in ("done", "aborted"):
            tr.send(s, [])
            continue
        t, v = reach[s]
        if mode == "forward":
            rd = BitReader(tr.send(s, [("vertex", w, _enc(v, w))]))
            reach[o] = (t, rd.int(w))
            rd.done()
            advance(o)
        else:
            # search and narrowing rounds: the sender names v_r first
            assert t == r
            hit = mode == "search" and s == ALICE and v in in_s0
            segs = [("vertex", w, _enc(v, w))]
            if hit:
                info["hit_round"] = r
                pref[s] = (r + 1, l0, table0[v])
                stage = 0
            if hit or mode == "narrow":
                j, ell, p = pref[s]
                assert j == r + 1
                if ell == w:
                    # the prefix is the whole name: jump ahead and forward
                    reach[s] = (r + 1, p)
                    advance(s)
                    segs.append(("vertex", w, _enc(reach[s][1], w)))
                else:
                    nxt_ell = ells[stage + 1]
                    lo, hi = p << (w - ell), min(n, (p + 1) << (w - ell))
                    vals = _own_fn(inst, s)[lo:hi] >> (w - nxt_ell)
                    segs.append(("table", (hi - lo) * nxt_ell, kernels.pack_fixed(vals, nxt_ell)))
            rd = BitReader(tr.send(s, segs))
            got = rd.int(w)
            reach[o] = (r, got)
            advance(o)
            if mode == "search" and s == ALICE and got in in_s0:
                mode, stage = "narrow", 0
                ell = l0
                if ell == w:
                    reach[o] = (r + 2, rd.int(w))
                    advance(o)
                    mode = "forward"
                    ell = None
            elif mode == "narrow":
                ell = ells[stage]
            else:
                ell = None
            if mode == "narrow":
                # receiver computed v_{r+1} itself; locate it in the sender's table
                nxt_ell = ells[stage + 1]
                vr1 = reach[o][1]
                assert reach[o][0] == r + 1
                p = vr1 >> (w - ell)
                lo, hi = p << (w - ell), min(n, (p + 1) << (w - ell))
                table = rd.ints(hi - lo, nxt_ell)
                entry = int(table[vr1 - lo])
                if nxt_ell == w:
                    reach[o] = (r + 2, entry)
                    advance(o)
                    mode = "forward"
                else:
                    pref[o] = (r + 2, nxt_ell, entry)
                    stage += 1
            rd.done()
        if reach[o][0] >= goal:
            mode = "done"

    if mode == "aborted":
        return ProtocolResult(0, tr, aborted=True, degenerate=degenerate, info=info)
    done_by = [p for p in (ALICE, BOB) if reach[p][0] >= goal]
    if not done_by:
        raise RuntimeError("protocol ended without either player knowing g_k")
    p = done_by[0]
    info["vertex"] = reach[p][1]
    return ProtocolResult(parity(reach[p][1]), tr, degenerate=degenerate, outputter=p, info=info)
