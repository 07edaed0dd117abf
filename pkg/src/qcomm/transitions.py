"""Purifications, optimal local unitaries and the average-encoding bounds."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import TOL, as_density, partial_trace, random_density, rng_from
from .metrics import (
    LN2, SLACK, ZERO_EIG, as_distribution, cq_state, hellinger, mutual_information,
    relative_entropy, trace_distance, trace_norm, von_neumann_entropy,
)


@dataclass(frozen=True)
class Purification:
    """Pure state on system (x) ancilla; ``state`` has length ``sys_dim * anc_dim``."""

    state: np.ndarray
    sys_dim: int
    anc_dim: int

    @property
    def dims(self) -> tuple[int, int]:
        return (self.sys_dim, self.anc_dim)

    @property
    def coefficients(self) -> np.ndarray:
        return np.asarray(self.state).reshape(self.sys_dim, self.anc_dim)

    def reduced(self) -> np.ndarray:
        c = self.coefficients
        return c @ c.conj().T

    def padded(self, anc_dim: int) -> "Purification":
        """Embed the ancilla into a larger space with zero amplitudes."""
        if anc_dim < self.anc_dim:
            raise ValueError("cannot shrink the ancilla")
        c = np.zeros((self.sys_dim, anc_dim), dtype=complex)
        c[:, :self.anc_dim] = self.coefficients
        return Purification(c.ravel(), self.sys_dim, anc_dim)

    def apply_ancilla(self, u) -> "Purification":
        """Return ``(I (x) U)|phi>``."""
        c = self.coefficients @ np.asarray(u).T
        return Purification(c.ravel(), self.sys_dim, self.anc_dim)


def purify(rho, anc_dim: int | None = None, tol: float = ZERO_EIG) -> Purification:
    """Canonical purification ``sum_i sqrt(l_i) |e_i>|i>`` over the support.

    The ancilla has dimension ``rank(rho)`` unless a larger ``anc_dim`` is
    requested.
    """
    rho = as_density(rho)
    evals, evecs = np.linalg.eigh(rho)
    supp = evals > tol
    rank = int(supp.sum())
    coeff = evecs[:, supp] * np.sqrt(evals[supp])
    phi = Purification(np.ascontiguousarray(coeff).ravel(), rho.shape[0], rank)
    if anc_dim is not None and anc_dim > rank:
        phi = phi.padded(anc_dim)
    return phi


def _aligned(phi1: Purification, phi2: Purification, min_anc: int = 1):
    if phi1.sys_dim != phi2.sys_dim:
        raise ValueError(f"system dims differ: {phi1.sys_dim} vs {phi2.sys_dim}")
    m = max(phi1.anc_dim, phi2.anc_dim, min_anc)
    return phi1.padded(m), phi2.padded(m)


def overlap(phi1: Purification, phi2: Purification) -> complex:
    return complex(np.vdot(phi1.state, phi2.state))


def uhlmann_unitary(phi1: Purification, phi2: Purification) -> np.ndarray:
    """Ancilla unitary ``U`` maximising ``|<phi1|(I (x) U)|phi2>|``.

    With coefficient matrices ``A1, A2`` the overlap is ``Tr(U M)`` for
    ``M = A2^T conj(A1)``; the polar part of ``M`` gives the optimum
    ``||M||_t``.  Purifications with different ancilla sizes are padded to
    the larger one first.
    """
    phi1, phi2 = _aligned(phi1, phi2)
    m = phi2.coefficients.T @ phi1.coefficients.conj()
    w, _, vh = np.linalg.svd(m)
    return vh.conj().T @ w.conj().T


@dataclass
class LocalTransition:
    phi1: Purification
    phi2_prime: Purification
    unitary: np.ndarray
    h_states: float
    h_reduced: float
    trace_states: float
    trace_reduced: float

    @property
    def h_equal(self) -> bool:
        return abs(self.h_states - self.h_reduced) <= SLACK

    @property
    def intermediate_bound(self) -> float:
        return 2 * math.sqrt(2) * self.h_reduced

    @property
    def trace_bound(self) -> float:
        return 2 * math.sqrt(self.trace_reduced)

    @property
    def trace_bound_holds(self) -> bool:
        return (self.trace_states <= self.intermediate_bound + SLACK
                and self.intermediate_bound <= self.trace_bound + SLACK)

    @property
    def ratio(self) -> float:
        """Observed ``trace_states / (2 ||rho1 - rho2||_t^{1/2})``."""
        return self.trace_states / self.trace_bound if self.trace_bound > 0 else 0.0


def _check_purifies(phi: Purification, rho, name: str):
    if phi.sys_dim != rho.shape[0] or np.linalg.norm(phi.reduced() - rho) > TOL:
        raise ValueError(f"{name} does not purify the given state")


def local_transition(rho1, rho2, phi1: Purification, phi2: Purification) -> LocalTransition:
    """Rotate ``phi2`` on its ancilla so it is as close as possible to ``phi1``.

    Both purifications are first padded to a common ancilla of dimension at
    least the system dimension.
    """
    rho1, rho2 = as_density(rho1), as_density(rho2)
    _check_purifies(phi1, rho1, "phi1")
    _check_purifies(phi2, rho2, "phi2")
    phi1, phi2 = _aligned(phi1, phi2, min_anc=phi1.sys_dim)
    u = uhlmann_unitary(phi1, phi2)
    phi2p = phi2.apply_ancilla(u)
    ov = min(1.0, abs(overlap(phi1, phi2p)) ** 2)
    p1 = np.outer(phi1.state, phi1.state.conj())
    p2 = np.outer(phi2p.state, phi2p.state.conj())
    return LocalTransition(
        phi1=phi1,
        phi2_prime=phi2p,
        unitary=u,
        h_states=math.sqrt(max(0.0, 1 - math.sqrt(ov))),
        h_reduced=hellinger(rho1, rho2),
        trace_states=trace_norm(p1 - p2),
        trace_reduced=trace_distance(rho1, rho2),
    )


# -- average encoding ---------------------------------------------------------

@dataclass
class Encoding:
    """Map from labels to states, with a prior over the labels."""

    labels: list
    probs: np.ndarray
    states: list

    def __post_init__(self):
        self.probs = as_distribution(self.probs)
        self.states = [as_density(s) for s in self.states]
        if not (len(self.labels) == len(self.probs) == len(self.states)):
            raise ValueError("labels, probs and states must have equal length")
        if len({s.shape for s in self.states}) != 1:
            raise ValueError("all encoded states must have the same dimension")

    @property
    def dim(self) -> int:
        return self.states[0].shape[0]

    def mean_state(self) -> np.ndarray:
        if all(np.array_equal(s, self.states[0]) for s in self.states):
            return np.array(self.states[0])
        return sum(p * s for p, s in zip(self.probs, self.states))

    def joint_state(self) -> np.ndarray:
        """Classical-quantum state with X as factor 0 and Q as factor 1."""
        return cq_state(self.probs, self.states)


def encoding_information(e: Encoding) -> float:
    """``I(Q:X)`` through the block structure: ``sum_x p_x S(rho_x || rho_bar)``."""
    bar = e.mean_state()
    total = 0.0
    for p, s in zip(e.probs, e.states):
        if p > 0:
            total += p * relative_entropy(s, bar)
    return total


@dataclass
class AverageEncodingReport:
    mutual_info: float
    avg_trace_dist: float
    avg_h_sq: float
    trace_rhs: float
    hellinger_rhs: float
    bound1_holds: bool
    bound2_holds: bool


def average_encoding_report(e: Encoding) -> AverageEncodingReport:
    bar = e.mean_state()
    info = encoding_information(e)
    avg_t = float(sum(p * trace_distance(bar, s) for p, s in zip(e.probs, e.states)))
    avg_h2 = float(sum(p * hellinger(bar, s) ** 2 for p, s in zip(e.probs, e.states)))
    t_rhs = math.sqrt(2 * LN2 * info)
    h_rhs = LN2 / 2 * info
    return AverageEncodingReport(float(info), avg_t, avg_h2, t_rhs, float(h_rhs),
                                 bool(avg_t <= t_rhs + SLACK), bool(avg_h2 <= h_rhs + SLACK))


def holevo_information(e: Encoding) -> float:
    """``S(rho_bar) - sum_x p_x S(rho_x)``, an independent route to I(Q:X)."""
    return von_neumann_entropy(e.mean_state()) - float(
        sum(p * von_neumann_entropy(s) for p, s in zip(e.probs, e.states)))


def joint_information(e: Encoding) -> float:
    return mutual_information(e.joint_state(), (len(e.states), e.dim), (0,), (1,))


def random_encoding(n_labels: int, dim: int, seed=None, prior: str = "random",
                    ranks: Sequence[int] | None = None) -> Encoding:
    """Random encoding for property tests.

    ``prior`` is ``uniform``, ``geometric`` (p_x proportional to 2^-x) or
    ``random`` (Dirichlet(1)).
    """
    rng = rng_from(seed)
    if prior == "uniform":
        probs = np.full(n_labels, 1 / n_labels)
    elif prior == "geometric":
        probs = 0.5 ** np.arange(n_labels)
        probs /= probs.sum()
    elif prior == "random":
        probs = rng.dirichlet(np.ones(n_labels))
    else:
        raise ValueError(f"unknown prior {prior!r}")
    if ranks is None:
        ranks = rng.integers(1, dim + 1, size=n_labels)
    states = [random_density(dim, int(r), rng) for r in ranks]
    return Encoding(list(range(n_labels)), probs, states)


def partial_trace_check(phi: Purification, rho) -> float:
    """Frobenius distance between the purified state's reduction and ``rho``."""
    return float(np.linalg.norm(partial_trace(np.outer(phi.state, phi.state.conj()),
                                              phi.dims, [0]) - np.asarray(rho)))
