"""Seeded randomized property suites for the distance and information bounds.

Trial ``i`` of a suite run with seed ``s`` draws everything from
``SeedSequence([s, i])``, so any single trial can be replayed.  A suite
returns one ``SuiteResult`` per inequality tag.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import __version__
from .core import (
    apply_channel, partial_trace, permute_factors, projector, random_channel, random_density,
    random_povm, random_pure, random_unitary,
)
from .commsim.experiment import threads
from .metrics import (
    SLACK, check_inequality, cq_state, fidelity, hellinger, helstrom_error,
    informational_distance, mutual_information, mutual_information_relative, product_of_marginals,
    trace_norm,
)
from .transitions import (
    average_encoding_report, holevo_information, local_transition, purify, random_encoding,
    uhlmann_unitary, overlap,
)


@dataclass
class Check:
    tag: str
    slack: float          # >= -tol means the check passed
    tol: float = SLACK

    @property
    def ok(self) -> bool:
        return self.slack >= -self.tol


def _ineq(tag, *inputs) -> Check:
    c = check_inequality(tag, *inputs)
    return Check(tag, c.slack)


def _eq(tag, a, b, tol=SLACK) -> Check:
    return Check(tag, -abs(a - b), tol)


def _le(tag, a, b, tol=SLACK) -> Check:
    """``a <= b``."""
    return Check(tag, b - a, tol)


@dataclass
class SuiteResult:
    inequality: str
    trials: int
    max_violation: float
    worst_case_seed: list
    min_slack: float
    violations: int

    def to_dict(self) -> dict:
        return {"inequality": self.inequality, "trials": self.trials,
                "max_violation": self.max_violation, "worst_case_seed": self.worst_case_seed,
                "min_slack": self.min_slack, "violations": self.violations}


# -- samplers ---------------------------------------------------------------------

def random_pair(rng, dims=(2, 8)):
    d = int(rng.integers(dims[0], dims[1] + 1))
    r1, r2 = (int(x) for x in rng.integers(1, d + 1, size=2))
    return random_density(d, r1, rng), random_density(d, r2, rng)


def random_tripartite(rng, lo=2, hi=3):
    dims = tuple(int(x) for x in rng.integers(lo, hi + 1, size=3))
    total = int(np.prod(dims))
    return random_density(total, int(rng.integers(1, total + 1)), rng), dims


def pure_with_overlap(dim: int, overlap_sq: float, rng):
    """Two pure states with ``|<a|b>|^2 = overlap_sq`` in a random basis."""
    u = random_unitary(dim, rng)
    a = u[:, 0]
    b = math.sqrt(overlap_sq) * u[:, 0] + math.sqrt(1 - overlap_sq) * u[:, 1]
    return a, b


def helstrom_scenario(eps: float, dim: int, rng):
    """Boolean encoding whose Helstrom measurement errs with probability ``eps``.

    ``rho_x = (1 - 2 eps) sigma_x + 2 eps tau`` for orthogonal pure sigma_0,
    sigma_1 and a common random tau.
    """
    if not 0 <= eps <= 0.5 or dim < 2:
        raise ValueError("need 0 <= eps <= 1/2 and dim >= 2")
    u = random_unitary(dim, rng)
    tau = random_density(dim, None, rng)
    mu = 2 * eps
    return [(1 - mu) * projector(u[:, x]) + mu * tau for x in (0, 1)]


# -- trial functions --------------------------------------------------------------

def _t_relative_entropy(rng):
    r1, r2 = random_pair(rng)
    return [_ineq("relative-vs-trace", r1, r2), _ineq("relative-vs-hellinger", r1, r2)]


def _t_distances(rng):
    r1, r2 = random_pair(rng)
    return [_ineq("fuchs-vdg", r1, r2), _ineq("hellinger-sandwich", r1, r2)]


def _t_pure_trace(rng):
    d = int(rng.integers(2, 9))
    a, b = random_pure(d, rng), random_pure(d, rng)
    closed = 2 * math.sqrt(max(0.0, 1 - abs(np.vdot(a, b)) ** 2))
    return [_eq("pure-trace-closed-form", closed, trace_norm(projector(a) - projector(b)), 1e-9)]


def _t_monotonicity(rng):
    din, dout = (int(x) for x in rng.integers(2, 5, size=2))
    ch = random_channel(din, dout, max(int(rng.integers(1, 4)), -(-din // dout)), rng)
    r1, r2 = random_density(din, None, rng), random_density(din, int(rng.integers(1, din + 1)), rng)
    return [_ineq("trace-monotonicity", ch, r1, r2), _ineq("hellinger-monotonicity", ch, r1, r2)]


def _t_measurement(rng):
    r1, r2 = random_pair(rng, (2, 6))
    povm = random_povm(r1.shape[0], int(rng.integers(2, 5)), rng)
    return [_ineq("fidelity-measurement", povm, r1, r2)]


def _t_triangle(rng):
    d = int(rng.integers(2, 7))
    rs = [random_density(d, int(rng.integers(1, d + 1)), rng) for _ in range(3)]
    return [_ineq(tag, *rs) for tag in ("quasi-triangle", "triangle-trace", "triangle-hellinger")]


def _t_jozsa(rng):
    d = int(rng.integers(2, 6))
    r1 = random_density(d, int(rng.integers(1, d + 1)), rng)
    r2 = random_density(d, int(rng.integers(1, d + 1)), rng)
    p1, p2 = purify(r1, d), purify(r2, d)
    p2 = p2.apply_ancilla(random_unitary(p2.anc_dim, rng))  # arbitrary purification
    u = uhlmann_unitary(p1, p2)
    achieved = abs(overlap(p1, p2.apply_ancilla(u))) ** 2
    unit = np.linalg.norm(u.conj().T @ u - np.eye(u.shape[0]))
    return [_eq("jozsa-overlap", achieved, fidelity(r1, r2)), _le("jozsa-unitary", unit, 0.0, 1e-9)]


def _t_local_transition(rng):
    d = int(rng.integers(2, 5))
    r1 = random_density(d, int(rng.integers(1, d + 1)), rng)
    r2 = random_density(d, int(rng.integers(1, d + 1)), rng)
    anc = d + int(rng.integers(0, 2))
    p1 = purify(r1, anc).apply_ancilla(random_unitary(anc, rng))
    p2 = purify(r2, anc).apply_ancilla(random_unitary(anc, rng))
    lt = local_transition(r1, r2, p1, p2)
    return [_eq("local-transition-h", lt.h_states, lt.h_reduced),
            _le("local-transition-intermediate", lt.trace_states, lt.intermediate_bound),
            _le("local-transition-trace", lt.trace_states, lt.trace_bound)]


PRIORS = ("uniform", "geometric", "random")


def _t_average_encoding(rng, trial=0):
    labels = int(rng.integers(2, 9))
    e = random_encoding(labels, int(rng.integers(1, 9)), rng, prior=PRIORS[trial % 3])
    rep = average_encoding_report(e)
    return [_le("average-encoding-trace", rep.avg_trace_dist, rep.trace_rhs),
            _le("average-encoding-hellinger", rep.avg_h_sq, rep.hellinger_rhs),
            _eq("encoding-information-holevo", rep.mutual_info, holevo_information(e))]


def _t_informational(rng):
    rho, dims = random_tripartite(rng)
    dx, dy, dz = dims
    rho_xy = partial_trace(rho, dims, [0, 1])
    d_xy = informational_distance(rho_xy, (dx, dy), (0,), (1,))
    d_yx = informational_distance(permute_factors(rho_xy, (dx, dy), [1, 0]), (dy, dx), (0,), (1,))
    ch = random_channel(dx * dy, None, 2, rng)
    _, prod = product_of_marginals(rho_xy, (dx, dy), (0,), (1,))
    h_t = hellinger(apply_channel(ch, rho_xy), apply_channel(ch, prod))
    d_xyz = informational_distance(rho, dims, (0, 1), (2,))
    d_xz = informational_distance(partial_trace(rho, dims, [0, 2]), (dx, dz), (0,), (1,))
    return [_eq("inf-distance-symmetry", d_xy, d_yx, 1e-9),
            _le("inf-distance-range-low", 0.0, d_xy), _le("inf-distance-range-high", d_xy, 1.0),
            _le("inf-distance-channel", h_t, d_xy),
            _le("inf-distance-monotone", d_xz, d_xyz),
            _ineq("informational-vs-mutual", rho_xy, (dx, dy), (0,), (1,)),
            _ineq("informational-vs-mutual", rho, dims, (0, 1), (2,))]


def _t_block_diagonal(rng):
    m, d = (int(x) for x in rng.integers(2, 5, size=2))
    probs = rng.dirichlet(np.ones(m))
    states = [random_density(d, int(rng.integers(1, d + 1)), rng) for _ in range(m)]
    bar = sum(p * s for p, s in zip(probs, states))
    rhs = float(sum(p * hellinger(s, bar) ** 2 for p, s in zip(probs, states)))
    dist = informational_distance(cq_state(probs, states), (m, d), (1,), (0,))
    return [_eq("block-diagonal-identity", dist ** 2, rhs)]


HELSTROM_EPS = (0.05, 0.1, 0.2)


def _t_helstrom(rng, trial=0):
    eps = HELSTROM_EPS[trial % len(HELSTROM_EPS)]
    d = int(rng.integers(2, 7))
    r0, r1 = helstrom_scenario(eps, d, rng)
    dist = informational_distance(cq_state([0.5, 0.5], [r0, r1]), (2, d), (1,), (0,))
    return [_eq("helstrom-error", helstrom_error(r0, r1), eps),
            _le("block-diagonal-helstrom", 1 / 8 - eps / 2, dist ** 2)]


def _t_mi_chain(rng):
    rho, dims = random_tripartite(rng)
    i_x_yz = mutual_information(rho, dims, (0,), (1, 2))
    rho_xy = partial_trace(rho, dims, [0, 1])
    rho_yz = partial_trace(rho, dims, [1, 2])
    i_x_y = mutual_information(rho_xy, dims[:2], (0,), (1,))
    i_xy_z = mutual_information(rho, dims, (0, 1), (2,))
    i_y_z = mutual_information(rho_yz, dims[1:], (0,), (1,))
    return [_eq("mi-chain", i_x_yz, i_x_y + i_xy_z - i_y_z),
            _le("mi-strong-subadditivity", i_x_y, i_x_yz),
            _le("mi-nonnegative", 0.0, i_x_yz, 1e-9),
            _eq("mi-relative-entropy", i_x_yz, mutual_information_relative(rho, dims, (0,), (1, 2)))]


# trial function, default trial count, whether it wants the trial index
SUITES = {
    "relative-entropy": (_t_relative_entropy, 1000, False),
    "distances": (_t_distances, 1000, False),
    "pure-trace": (_t_pure_trace, 200, False),
    "monotonicity": (_t_monotonicity, 300, False),
    "measurement": (_t_measurement, 300, False),
    "triangle": (_t_triangle, 300, False),
    "jozsa": (_t_jozsa, 200, False),
    "local-transition": (_t_local_transition, 200, False),
    "average-encoding": (_t_average_encoding, 300, True),
    "informational-distance": (_t_informational, 300, False),
    "block-diagonal": (_t_block_diagonal, 100, False),
    "helstrom": (_t_helstrom, 30, True),
    "mi-chain": (_t_mi_chain, 300, False),
}


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, trial]))


def run_suite(name: str, trials: int | None = None, seed: int = 0) -> list[SuiteResult]:
    if name not in SUITES:
        raise KeyError(name)
    fn, default, wants_index = SUITES[name]
    trials = default if trials is None else trials

    def one(i):
        rng = trial_rng(seed, i)
        return fn(rng, i) if wants_index else fn(rng)

    with ThreadPoolExecutor(max_workers=threads()) as pool:
        per_trial = list(pool.map(one, range(trials)))
    agg: dict = {}
    for i, checks in enumerate(per_trial):
        for c in checks:
            a = agg.setdefault(c.tag, {"n": 0, "min": math.inf, "worst": None, "bad": 0})
            a["n"] += 1
            a["bad"] += 0 if c.ok else 1
            if c.slack < a["min"]:
                a["min"], a["worst"] = c.slack, [seed, i]
    return [SuiteResult(tag, a["n"], max(0.0, -a["min"]) if math.isfinite(a["min"]) else 0.0,
                        a["worst"] or [seed, 0], a["min"] if math.isfinite(a["min"]) else None,
                        a["bad"])
            for tag, a in agg.items()]


def suite_report(names, trials: int | None, seed: int) -> dict:
    results = []
    for name in names:
        results.extend(r.to_dict() | {"suite": name} for r in run_suite(name, trials, seed))
    return {"version": __version__,
            "config": {"suites": list(names), "trials": trials, "seed": seed},
            "results": results,
            "violations": sum(r["violations"] for r in results)}


def helstrom_trend(eps_values=(0.2, 0.1, 0.05, 0.01, 0.001), dim: int = 2, seed: int = 0) -> list:
    """``(eps, D(Q:X))`` pairs as eps shrinks, for logging only."""
    out = []
    for i, eps in enumerate(eps_values):
        r0, r1 = helstrom_scenario(eps, dim, trial_rng(seed, i))
        d = informational_distance(cq_state([0.5, 0.5], [r0, r1]), (2, dim), (1,), (0,))
        out.append((eps, d))
    return out
