"""Distances and information measures between quantum states.

All logarithms are base 2.  Trace distance here is the unnormalised trace
norm ``||rho1 - rho2||_t`` (range ``[0, 2]``); fidelity is the squared
version ``F = ||sqrt(rho1) sqrt(rho2)||_t^2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import Povm, TOL, measure_povm, partial_trace, permute_factors

LN2 = math.log(2)
ZERO_EIG = 1e-12       # eigenvalues below this count as exactly zero
SUPPORT_WEIGHT = 1e-9  # weight of rho1 outside supp(rho2) that forces +inf
SLACK = 1e-8


def _square(a) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    return a


def _same_dims(r1, r2):
    r1, r2 = _square(r1), _square(r2)
    if r1.shape != r2.shape:
        raise ValueError(f"dimension mismatch: {r1.shape} vs {r2.shape}")
    return r1, r2


def entropy_terms(p) -> float:
    """Shannon entropy in bits of a (possibly noisy) probability vector."""
    p = np.asarray(p, dtype=float)
    p = p[p > ZERO_EIG]
    return float(-(p * np.log2(p)).sum())


def binary_entropy(p: float) -> float:
    return entropy_terms([p, 1 - p])


def as_distribution(p) -> np.ndarray:
    p = np.asarray(p, dtype=float).ravel()
    if np.any(p < -1e-12):
        raise ValueError("distribution has negative entries")
    p = np.clip(p, 0, None)
    if abs(p.sum() - 1) > TOL:
        raise ValueError(f"distribution sums to {p.sum():.12g}")
    return p


def trace_norm(a) -> float:
    """Sum of singular values."""
    return float(np.linalg.svd(_square(a), compute_uv=False).sum())


def trace_distance(r1, r2) -> float:
    r1, r2 = _same_dims(r1, r2)
    return trace_norm(r1 - r2)


def _root_factor(rho) -> np.ndarray:
    """``A`` with ``A A^dagger = rho`` spanning only eigenvalues above ZERO_EIG.

    Eigenvalues at the level of eigensolver noise would otherwise enter the
    square root at ~1e-8 and spoil fidelities of rank-deficient states.
    """
    evals, evecs = np.linalg.eigh(rho)
    keep = evals > ZERO_EIG
    return evecs[:, keep] * np.sqrt(evals[keep])


def fidelity(r1, r2) -> float:
    """``||sqrt(r1) sqrt(r2)||_t^2``, computed as ``||A1^dagger A2||_t^2`` for
    root factors ``A_i A_i^dagger = r_i`` (same singular values)."""
    r1, r2 = _same_dims(r1, r2)
    if np.array_equal(r1, r2):
        return 1.0
    a1, a2 = _root_factor(r1), _root_factor(r2)
    if a1.size == 0 or a2.size == 0:
        return 0.0
    f = float(np.linalg.svd(a1.conj().T @ a2, compute_uv=False).sum()) ** 2
    return float(min(max(f, 0.0), 1.0))


def hellinger(r1, r2) -> float:
    return math.sqrt(max(0.0, 1.0 - math.sqrt(fidelity(r1, r2))))


def von_neumann_entropy(rho) -> float:
    return entropy_terms(np.linalg.eigvalsh(_square(rho)))


def relative_entropy(r1, r2) -> float:
    """``S(r1 || r2)`` in bits; ``math.inf`` when supp(r1) is not inside supp(r2)."""
    r1, r2 = _same_dims(r1, r2)
    if np.array_equal(r1, r2):
        return 0.0
    mu, vecs = np.linalg.eigh(r2)
    weights = np.einsum("ij,jk,ki->i", vecs.conj().T, r1, vecs).real
    outside = mu < ZERO_EIG
    if np.any(weights[outside] > SUPPORT_WEIGHT):
        return math.inf
    inside = ~outside
    cross = float((weights[inside] * np.log2(mu[inside])).sum())
    return max(0.0, -von_neumann_entropy(r1) - cross)


def _groups(dims, group_a, group_b):
    a = sorted(set(group_a))
    b = sorted(set(range(len(dims))) - set(a)) if group_b is None else sorted(set(group_b))
    if not a or not b or set(a) & set(b):
        raise ValueError(f"need two disjoint non-empty factor groups, got {a} and {b}")
    if max(a + b) >= len(dims):
        raise ValueError("factor group out of range for layout")
    return a, b


def marginals(rho, dims: Sequence[int], group_a, group_b=None):
    """Return ``(rho_AB, rho_A, rho_B, dims_AB)`` for two factor groups.

    ``rho_AB`` keeps the union of both groups in ascending factor order.
    """
    a, b = _groups(dims, group_a, group_b)
    keep = sorted(a + b)
    rho_ab = partial_trace(rho, dims, keep)
    sub = [dims[i] for i in keep]
    ia = [keep.index(i) for i in a]
    ib = [keep.index(i) for i in b]
    return rho_ab, partial_trace(rho_ab, sub, ia), partial_trace(rho_ab, sub, ib), (keep, ia, ib, sub)


def product_of_marginals(rho, dims: Sequence[int], group_a, group_b=None):
    """``rho_A (x) rho_B`` laid out in the same factor order as ``rho_AB``."""
    rho_ab, rho_a, rho_b, (keep, ia, ib, sub) = marginals(rho, dims, group_a, group_b)
    prod = np.kron(rho_a, rho_b)
    # prod has factors ordered ia + ib; move them back to ascending order
    current = ia + ib
    order = [current.index(i) for i in range(len(keep))]
    prod_dims = [sub[i] for i in current]
    return rho_ab, permute_factors(prod, prod_dims, order)


def mutual_information(rho, dims: Sequence[int], group_a=(0,), group_b=None) -> float:
    """``I(A:B) = S(A) + S(B) - S(AB)``; factors outside both groups are traced out."""
    rho_ab, rho_a, rho_b, _ = marginals(rho, dims, group_a, group_b)
    return von_neumann_entropy(rho_a) + von_neumann_entropy(rho_b) - von_neumann_entropy(rho_ab)


def mutual_information_relative(rho, dims, group_a=(0,), group_b=None) -> float:
    """Same quantity computed as ``S(rho_AB || rho_A (x) rho_B)``."""
    rho_ab, prod = product_of_marginals(rho, dims, group_a, group_b)
    return relative_entropy(rho_ab, prod)


def informational_distance(rho, dims: Sequence[int], group_a=(0,), group_b=None) -> float:
    """``D(A:B) = h(rho_AB, rho_A (x) rho_B)``."""
    rho_ab, prod = product_of_marginals(rho, dims, group_a, group_b)
    return hellinger(rho_ab, prod)


@dataclass
class MetricReport:
    value: float
    components: dict = field(default_factory=dict)


def classical_fidelity(p, q) -> float:
    p, q = as_distribution(p), as_distribution(q)
    return float(np.sqrt(p * q).sum() ** 2)


def kl_divergence(p, q) -> float:
    p, q = as_distribution(p), as_distribution(q)
    mask = p > 0
    if np.any(q[mask] <= 0):
        return math.inf
    return float((p[mask] * np.log2(p[mask] / q[mask])).sum())


def classical_metrics(p, q) -> MetricReport:
    """Fidelity, Hellinger, KL and l1 distance of two distributions.

    ``value`` is the Hellinger distance.
    """
    p, q = as_distribution(p), as_distribution(q)
    if p.shape != q.shape:
        raise ValueError(f"length mismatch: {p.size} vs {q.size}")
    f = classical_fidelity(p, q)
    h = math.sqrt(max(0.0, 1 - math.sqrt(f)))
    return MetricReport(h, {
        "fidelity": f,
        "hellinger": h,
        "kl": kl_divergence(p, q),
        "l1": float(np.abs(p - q).sum()),
    })


def fano_bound(p_correct: float) -> float:
    """Lower bound ``1 - H(p)`` on I(X:Y) for a uniform bit X guessed with success p."""
    if not 0 <= p_correct <= 1:
        raise ValueError(f"p_correct must be in [0, 1], got {p_correct}")
    return 1 - binary_entropy(p_correct)


# -- inequality checks --------------------------------------------------------

@dataclass
class InequalityCheck:
    """Outcome of one inequality evaluation.

    ``lhs >= rhs`` is the orientation for every tag; for a chain
    ``a <= b <= c`` the worst link is reported and all terms sit in ``terms``.
    """

    tag: str
    lhs: float
    rhs: float
    slack: float
    holds: bool
    terms: dict = field(default_factory=dict)


def _ge(tag, lhs, rhs, **terms):
    slack = math.inf if lhs == math.inf else lhs - rhs
    return InequalityCheck(tag, lhs, rhs, slack, slack >= -SLACK, terms)


def _chain(tag, values, names):
    links = [(values[i + 1], values[i]) for i in range(len(values) - 1)]
    slacks = [hi - lo for hi, lo in links]
    worst = int(np.argmin(slacks))
    hi, lo = links[worst]
    return InequalityCheck(tag, hi, lo, slacks[worst], slacks[worst] >= -SLACK,
                           dict(zip(names, values)))


def _relative_vs_trace(r1, r2):
    return _ge("relative-vs-trace", relative_entropy(r1, r2),
               trace_distance(r1, r2) ** 2 / (2 * LN2))


def _relative_vs_hellinger(r1, r2):
    return _ge("relative-vs-hellinger", relative_entropy(r1, r2),
               2 / LN2 * hellinger(r1, r2) ** 2)


def _fuchs_vdg(r1, r2):
    f = fidelity(r1, r2)
    half = trace_distance(r1, r2) / 2
    return _chain("fuchs-vdg", [1 - math.sqrt(f), half, math.sqrt(max(0.0, 1 - f))],
                  ["one_minus_sqrt_f", "half_trace", "sqrt_one_minus_f"])


def _hellinger_sandwich(r1, r2):
    h = hellinger(r1, r2)
    return _chain("hellinger-sandwich", [h * h, trace_distance(r1, r2) / 2, math.sqrt(2) * h],
                  ["h_squared", "half_trace", "sqrt2_h"])


def _quasi_triangle(r1, r2, r3):
    h12, h13, h32 = hellinger(r1, r2), hellinger(r1, r3), hellinger(r3, r2)
    return _chain("quasi-triangle",
                  [h12 ** 2, (h13 + h32) ** 2, 2 * h13 ** 2 + 2 * h32 ** 2],
                  ["h12_sq", "sum_sq", "two_sum_sq"])


def _triangle_trace(r1, r2, r3):
    return _ge("triangle-trace", trace_distance(r1, r3) + trace_distance(r3, r2),
               trace_distance(r1, r2))


def _triangle_hellinger(r1, r2, r3):
    return _ge("triangle-hellinger", hellinger(r1, r3) + hellinger(r3, r2), hellinger(r1, r2))


def _trace_monotonicity(channel, r1, r2):
    return _ge("trace-monotonicity", trace_norm(r1 - r2),
               trace_norm(channel(r1) - channel(r2)))


def _hellinger_monotonicity(channel, r1, r2):
    return _ge("hellinger-monotonicity", hellinger(r1, r2),
               hellinger(channel(r1), channel(r2)))


def _fidelity_measurement(povm: Povm, r1, r2):
    p, q = measure_povm(povm, r1), measure_povm(povm, r2)
    p, q = np.clip(p, 0, None), np.clip(q, 0, None)
    return _ge("fidelity-measurement", float(np.sqrt(p * q).sum() ** 2), fidelity(r1, r2))


def _informational_vs_mutual(rho, dims, group_a=(0,), group_b=None):
    return _ge("informational-vs-mutual",
               math.sqrt(max(0.0, mutual_information(rho, dims, group_a, group_b))),
               informational_distance(rho, dims, group_a, group_b))


INEQUALITIES = {
    "relative-vs-trace": _relative_vs_trace,
    "relative-vs-hellinger": _relative_vs_hellinger,
    "fuchs-vdg": _fuchs_vdg,
    "hellinger-sandwich": _hellinger_sandwich,
    "quasi-triangle": _quasi_triangle,
    "triangle-trace": _triangle_trace,
    "triangle-hellinger": _triangle_hellinger,
    "trace-monotonicity": _trace_monotonicity,
    "hellinger-monotonicity": _hellinger_monotonicity,
    "fidelity-measurement": _fidelity_measurement,
    "informational-vs-mutual": _informational_vs_mutual,
}


def check_inequality(tag: str, *inputs) -> InequalityCheck:
    try:
        fn = INEQUALITIES[tag]
    except KeyError:
        raise ValueError(f"unknown inequality {tag!r}; known: {sorted(INEQUALITIES)}") from None
    return fn(*inputs)


# -- classical-quantum states ---------------------------------------------------

def cq_state(probs, states) -> np.ndarray:
    """Block-diagonal ``sum_x p_x |x><x| (x) rho_x``; X is factor 0."""
    probs = as_distribution(probs)
    states = [np.asarray(s, dtype=complex) for s in states]
    m, d = len(states), states[0].shape[0]
    out = np.zeros((m * d, m * d), dtype=complex)
    for x, (p, s) in enumerate(zip(probs, states)):
        out[x * d:(x + 1) * d, x * d:(x + 1) * d] = p * s
    return out


def helstrom_povm(r0, r1) -> Povm:
    """Optimal measurement for two equiprobable states: project onto the
    positive part of ``r0 - r1`` (outcome 0) and its complement."""
    evals, evecs = np.linalg.eigh(np.asarray(r0) - np.asarray(r1))
    pos = evecs[:, evals > 0]
    p = pos @ pos.conj().T
    return Povm((p, np.eye(p.shape[0]) - p))


def helstrom_error(r0, r1) -> float:
    """Error of the Helstrom measurement for a uniform prior."""
    povm = helstrom_povm(r0, r1)
    return 0.5 * (measure_povm(povm, r0)[1] + measure_povm(povm, r1)[0])
