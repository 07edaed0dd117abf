"""S_k to set disjointness, and the one-message classical simulation check."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .. import kernels
from ..core import rng_from
from .problems import ALICE, DisjInstance, SkInstance, disj_eval, pad_to_even, sk_eval


@dataclass
class Reduction:
    disj: DisjInstance
    sk_value: int
    disj_value: bool
    intersection_size: int
    padded: bool

    def certificate(self) -> dict:
        return {"sk_value": self.sk_value, "disj_value": self.disj_value,
                "intersection_size": self.intersection_size, "padded": self.padded}

    @property
    def consistent(self) -> bool:
        return self.intersection_size <= 1 and self.disj_value == bool(self.sk_value)


def sk_to_disj(inst: SkInstance) -> Reduction:
    """Each root-to-leaf path of the instance tree is one universe element.

    Alice's set holds the paths that follow every pointer she owns and end
    in a 1-leaf; Bob's set holds the paths that follow every pointer he
    owns.  Only the path that follows all pointers can be in both, and it is
    there exactly when the instance evaluates to 1.  Odd depth is first
    padded with a one-child level, which leaves the paths unchanged.
    """
    padded = pad_to_even(inst)
    ptrs = np.concatenate(padded.levels)
    offsets = np.concatenate([[0], np.cumsum([lv.size for lv in padded.levels])]).astype(np.int64)
    owners = np.array([0 if padded.owner(i) == ALICE else 1 for i in range(padded.k)],
                      dtype=np.int64)
    arities = np.array(padded.arities, dtype=np.int64)
    alice, bob = kernels.disj_membership(ptrs.astype(np.int64), offsets, arities, owners,
                                         padded.leaves)
    universe = int(np.prod(arities))
    d = DisjInstance(universe, frozenset(np.flatnonzero(alice).tolist()),
                     frozenset(np.flatnonzero(bob).tolist()))
    return Reduction(d, sk_eval(inst), disj_eval(d), len(d.intersection), padded.padded)


# -- one-message simulation ---------------------------------------------------------

MAX_TABLE = 1 << 18


@dataclass
class DemoReport:
    n: int
    k: int
    ell1: int
    alphabet: int
    distances: list  # per channel, averaged over the coordinate j and its value
    bound: float

    @property
    def avg_stat_distance(self) -> float:
        return float(np.mean(self.distances)) if self.distances else 0.0

    @property
    def max_distance(self) -> float:
        return max(self.distances, default=0.0)

    @property
    def max_ratio(self) -> float:
        return self.max_distance / self.bound if self.bound > 0 else 0.0

    @property
    def holds(self) -> bool:
        return self.max_distance <= self.bound + 1e-8


def random_message_channel(n_inputs: int, n_msgs: int, rng, kind: str) -> np.ndarray:
    """Row-stochastic ``(inputs, messages)`` matrix."""
    if kind == "dirichlet":
        return rng.dirichlet(np.full(n_msgs, 0.3), size=n_inputs)
    if kind == "function":
        c = np.zeros((n_inputs, n_msgs))
        c[np.arange(n_inputs), rng.integers(0, n_msgs, size=n_inputs)] = 1
        return c
    raise ValueError(f"unknown channel kind {kind!r}")


def prefix_channel(n: int, alphabet: int, ell1: int) -> np.ndarray:
    """Deterministic channel sending the first ell1 binary coordinates (alphabet 2)."""
    ys = np.array(list(itertools.product(range(alphabet), repeat=n)))
    m = (ys[:, :ell1] @ (1 << np.arange(ell1 - 1, -1, -1))) if ell1 else np.zeros(len(ys), int)
    c = np.zeros((len(ys), 1 << ell1))
    c[np.arange(len(ys)), m % (1 << ell1)] = 1
    return c


def simulation_distance(channel: np.ndarray, n: int, alphabet: int) -> float:
    """Average over j and y of the l1 distance between the true joint law of
    (M, Y) given Y_j = y and the simulated one, where M is drawn from its
    marginal and Y from P(Y | M, Y_j = y) (uniform when that is undefined).
    """
    ys = np.array(list(itertools.product(range(alphabet), repeat=n)))
    p_m = channel.mean(axis=0)
    total = 0.0
    for j in range(n):
        for y in range(alphabet):
            rows = ys[:, j] == y
            true = np.zeros_like(channel)
            true[rows] = channel[rows] / rows.sum()  # P(Y | Y_j = y) C(m | Y)
            col = true.sum(axis=0)
            cond = np.where(col > 0, true / np.where(col > 0, col, 1),
                            rows[:, None] / rows.sum())
            sim = cond * p_m
            total += np.abs(true - sim).sum()
    return total / (n * alphabet)


def classical_round_reduction_demo(n: int, k: int, ell1: int, trials: int, seed,
                                   alphabet: int = 2) -> DemoReport:
    """Check the one-message simulation bound ``(2 ell1 / n)^{1/2}`` exactly.

    Bob's part of an S_k instance is modelled by n independent uniform
    coordinates over ``alphabet`` symbols; his first message is an ell1-bit
    output of a random channel.  Channels cycle through the deterministic
    "first ell1 coordinates" map, random functions and Dirichlet noise.
    """
    if k < 2:
        raise ValueError("the reduction needs k >= 2")
    if n < 1 or ell1 < 0 or alphabet < 2:
        raise ValueError("need n >= 1, ell1 >= 0, alphabet >= 2")
    if alphabet ** n * (1 << ell1) > MAX_TABLE or ell1 > 10:
        raise ValueError(f"parameter space too large: {alphabet}^{n} inputs x 2^{ell1} messages")
    rng = rng_from(seed)
    n_in, n_msg = alphabet ** n, 1 << ell1
    dists = []
    for t in range(trials):
        if t == 0 and alphabet == 2 and ell1 <= n:
            ch = prefix_channel(n, alphabet, ell1)
        else:
            ch = random_message_channel(n_in, n_msg, rng, "function" if t % 2 else "dirichlet")
        dists.append(float(simulation_distance(ch, n, alphabet)))
    return DemoReport(n, k, ell1, alphabet, dists, math.sqrt(2 * ell1 / n))
