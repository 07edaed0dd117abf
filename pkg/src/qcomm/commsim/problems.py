"""Problem instances: the nested index problem S_k, pointer jumping and DISJ.

An S_k instance is stored as a complete tree.  ``levels[0]`` is the root
pointer ``a`` (level k), ``levels[i]`` holds one pointer per node on level
``k - i``, and the last entry holds Bob's indices for the level-1 index
instances.  ``leaves`` are Alice's bits, ``n`` per level-1 node.  Level j is
held by Alice when j is even and by Bob when j is odd.  All indices are
0-based.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .. import kernels
from ..core import rng_from

ALICE, BOB = "alice", "bob"


def width(n: int) -> int:
    """Bits in a fixed-width vertex/index name, ``ceil(log2 n)``."""
    return max(0, (int(n) - 1).bit_length())


def parity(value: int) -> int:
    return bin(int(value)).count("1") & 1


def holder(level: int) -> str:
    """Player holding the pointer of the given level (level 1 is Bob's index)."""
    return ALICE if level % 2 == 0 else BOB


@dataclass(frozen=True, eq=False)
class SkInstance:
    n: int
    k: int
    levels: tuple
    leaves: np.ndarray
    arities: tuple = ()
    padded: bool = False

    def __post_init__(self):
        if self.k < 1 or self.n < 1:
            raise ValueError("S_k needs k >= 1 and n >= 1")
        ar = tuple(self.arities) or (self.n,) * self.k
        if len(ar) != self.k or len(self.levels) != self.k:
            raise ValueError("levels/arities do not match k")
        levels = tuple(np.asarray(lv, dtype=np.int64) for lv in self.levels)
        nodes = 1
        for lv, a in zip(levels, ar):
            if lv.shape != (nodes,):
                raise ValueError(f"level has {lv.shape} pointers, expected {nodes}")
            if lv.size and (lv.min() < 0 or lv.max() >= a):
                raise ValueError("pointer out of range")
            nodes *= a
        leaves = np.asarray(self.leaves, dtype=np.uint8)
        if leaves.shape != (nodes,) or np.any(leaves > 1):
            raise ValueError("leaves must be a 0/1 array with one bit per path")
        object.__setattr__(self, "arities", ar)
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "leaves", leaves)

    def level_number(self, idx: int) -> int:
        return self.k - idx

    def owner(self, idx: int) -> str:
        return holder(self.level_number(idx))

    @property
    def pointer_holder(self) -> str:
        """P_k, the player holding ``a``."""
        return self.owner(0)

    def leaf_bits(self, node: int) -> np.ndarray:
        a = self.arities[-1]
        return self.leaves[node * a:(node + 1) * a]

    def __eq__(self, other):
        return (isinstance(other, SkInstance) and self.k == other.k and self.n == other.n
                and self.arities == other.arities
                and all(np.array_equal(x, y) for x, y in zip(self.levels, other.levels))
                and np.array_equal(self.leaves, other.leaves))

    # recursive (external) form -------------------------------------------
    def to_nested(self) -> dict:
        def node(idx, c):
            if idx == self.k - 1:
                return {"alice_bits": self.leaf_bits(c).tolist(),
                        "bob_index": int(self.levels[idx][c])}
            a = self.arities[idx]
            return {"pointer": int(self.levels[idx][c]),
                    "subinstances": [node(idx + 1, c * a + j) for j in range(a)]}
        return node(0, 0)

    @classmethod
    def from_nested(cls, n: int, k: int, root: dict) -> "SkInstance":
        levels: list[list[int]] = [[] for _ in range(k)]
        leaves: list[int] = []
        frontier = [root]
        for idx in range(k):
            nxt = []
            for nd in frontier:
                if idx == k - 1:
                    if len(nd["alice_bits"]) != n:
                        raise ValueError("alice_bits must have length n")
                    levels[idx].append(nd["bob_index"])
                    leaves.extend(nd["alice_bits"])
                else:
                    if len(nd["subinstances"]) != n:
                        raise ValueError("each level needs n sub-instances")
                    levels[idx].append(nd["pointer"])
                    nxt.extend(nd["subinstances"])
            frontier = nxt
        return cls(n, k, tuple(levels), np.array(leaves, dtype=np.uint8))


def sk_eval(inst: SkInstance) -> int:
    c = 0
    for a, lv in zip(inst.arities, inst.levels):
        c = c * a + int(lv[c])
    return int(inst.leaves[c])


def random_sk(n: int, k: int, seed=None) -> SkInstance:
    rng = rng_from(seed)
    levels = tuple(rng.integers(0, n, size=n ** i) for i in range(k))
    leaves = rng.integers(0, 2, size=n ** k).astype(np.uint8)
    return SkInstance(n, k, levels, leaves)


def all_sk(n: int, k: int) -> Iterator[SkInstance]:
    """Every S_k instance of width n (feasible only for tiny n, k)."""
    ptr_sizes = [n ** i for i in range(k)]
    ptr_space = itertools.product(*[itertools.product(range(n), repeat=s) for s in ptr_sizes])
    for ptrs in ptr_space:
        for leaves in itertools.product((0, 1), repeat=n ** k):
            yield SkInstance(n, k, tuple(np.array(p) for p in ptrs),
                             np.array(leaves, dtype=np.uint8))


def pad_to_even(inst: SkInstance) -> SkInstance:
    """Prepend a forced single-child level so the depth becomes even."""
    if inst.k % 2 == 0:
        return inst
    return SkInstance(inst.n, inst.k + 1, (np.zeros(1, dtype=np.int64),) + inst.levels,
                      inst.leaves, (1,) + inst.arities, padded=True)


# -- pointer jumping ----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PjInstance:
    """Alice holds ``f_a: V_A -> V_B``, Bob ``f_b: V_B -> V_A``; v_1 is vertex 0 of V_A."""

    n: int
    f_a: np.ndarray
    f_b: np.ndarray

    def __post_init__(self):
        fa = np.asarray(self.f_a, dtype=np.int64)
        fb = np.asarray(self.f_b, dtype=np.int64)
        for f in (fa, fb):
            if f.shape != (self.n,) or (f.size and (f.min() < 0 or f.max() >= self.n)):
                raise ValueError("pointer function out of range")
        object.__setattr__(self, "f_a", fa)
        object.__setattr__(self, "f_b", fb)

    @property
    def v1(self) -> int:
        return 0


@dataclass(frozen=True)
class PjValue:
    vertex: int
    side: str
    bit: int


def pj_path(inst: PjInstance, steps: int) -> np.ndarray:
    """``v_1, ..., v_{steps+1}`` with ``v_t = f^(t-1)(v_1)``."""
    return kernels.pointer_walk(inst.f_a, inst.f_b, inst.v1, steps)


def pj_eval(inst: PjInstance, k: int) -> PjValue:
    """``g_k = f^(k+1)(v_1)`` and ``f_k`` = XOR of the bits of its name."""
    v = int(pj_path(inst, k + 1)[-1])
    side = "A" if (k + 1) % 2 == 0 else "B"
    return PjValue(v, side, parity(v))


def random_pj(n: int, seed=None) -> PjInstance:
    rng = rng_from(seed)
    return PjInstance(n, rng.integers(0, n, size=n), rng.integers(0, n, size=n))


def all_pj(n: int) -> Iterator[PjInstance]:
    for fa in itertools.product(range(n), repeat=n):
        for fb in itertools.product(range(n), repeat=n):
            yield PjInstance(n, np.array(fa), np.array(fb))


# -- set disjointness --------------------------------------------------------

@dataclass(frozen=True)
class DisjInstance:
    universe: int
    set_a: frozenset
    set_b: frozenset

    def __post_init__(self):
        a, b = frozenset(int(x) for x in self.set_a), frozenset(int(x) for x in self.set_b)
        if any(not 0 <= x < self.universe for x in a | b):
            raise ValueError("set element outside the universe")
        object.__setattr__(self, "set_a", a)
        object.__setattr__(self, "set_b", b)

    @property
    def intersection(self) -> frozenset:
        return self.set_a & self.set_b


def disj_eval(inst: DisjInstance) -> bool:
    """True iff the two sets intersect."""
    return bool(inst.intersection)


# -- JSON instance files ------------------------------------------------------

def instance_to_json(inst) -> dict:
    if isinstance(inst, SkInstance):
        if inst.padded:
            raise ValueError("padded instances are internal; serialise the original")
        return {"type": "sk", "n": inst.n, "k": inst.k, "instance": inst.to_nested()}
    if isinstance(inst, PjInstance):
        return {"type": "pj", "n": inst.n, "f_a": inst.f_a.tolist(), "f_b": inst.f_b.tolist()}
    if isinstance(inst, DisjInstance):
        return {"type": "disj", "universe": inst.universe,
                "set_a": sorted(inst.set_a), "set_b": sorted(inst.set_b)}
    raise TypeError(f"cannot serialise {type(inst).__name__}")


def instance_from_json(data: dict):
    kind = data.get("type")
    try:
        if kind == "sk":
            return SkInstance.from_nested(int(data["n"]), int(data["k"]), data["instance"])
        if kind == "pj":
            return PjInstance(int(data["n"]), np.array(data["f_a"]), np.array(data["f_b"]))
        if kind == "disj":
            return DisjInstance(int(data["universe"]), frozenset(data["set_a"]),
                                frozenset(data["set_b"]))
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed {kind} instance: {exc}") from exc
    raise ValueError(f"unknown instance type {kind!r}")


def load_instance(path):
    with open(path) as fh:
        return instance_from_json(json.load(fh))


def dump_instance(inst, path):
    with open(path, "w") as fh:
        json.dump(instance_to_json(inst), fh, indent=2)
        fh.write("\n")
