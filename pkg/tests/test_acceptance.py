"""Acceptance checks, one test per criterion.

Each test carries a ``criterion`` marker; ``conftest.py`` prints one
PASS/FAIL line per criterion at the end of the run.
"""
import itertools
import math
import time

import numpy as np
import pytest

from qcomm.commsim.problems import (
    all_pj, all_sk, holder, random_pj, random_sk, width,
)
from qcomm.commsim.protocols import (
    nw_budget, pj_det_protocol, pj_nw_protocol, sk_protocol_right_start,
    sk_protocol_wrong_start,
)
from qcomm.commsim.reduction import (
    classical_round_reduction_demo, random_message_channel, simulation_distance, sk_to_disj,
)
from qcomm.commsim.transcript import PublicCoins
from qcomm import qprotosim as qp
from qcomm.suites import random_pair, run_suite, trial_rng
from qcomm.transitions import Encoding, average_encoding_report
from qcomm.core import random_density

SEED = 7


def _clean(results):
    bad = {r.inequality: (r.violations, r.max_violation, r.worst_case_seed)
           for r in results if r.violations}
    assert not bad, bad


def _tags(results):
    return {r.inequality: r for r in results}


# -- independent oracles ---------------------------------------------------------

def sk_oracle(inst):
    node = inst.to_nested()
    while "pointer" in node:
        node = node["subinstances"][node["pointer"]]
    return node["alice_bits"][node["bob_index"]]


def pj_oracle(f_a, f_b, k):
    v = 0
    for t in range(k + 1):
        v = int(f_a[v]) if t % 2 == 0 else int(f_b[v])
    return bin(v).count("1") % 2


def disj_oracle(inst):
    """Sets of path indices, built by walking every path of the tree."""
    a_set, b_set = set(), set()
    for p, path in enumerate(itertools.product(range(inst.n), repeat=inst.k)):
        node, alice_ok, bob_ok = 0, True, True
        for depth, digit in enumerate(path):
            follows = int(inst.levels[depth][node]) == digit
            if holder(inst.k - depth) == "alice":
                alice_ok &= follows
            else:
                bob_ok &= follows
            node = node * inst.n + digit
        if alice_ok and inst.leaves[p] == 1:
            a_set.add(p)
        if bob_ok:
            b_set.add(p)
    return a_set, b_set


def simulation_oracle(channel, n, alphabet):
    """Loop form of the averaged joint l1 distance between (M, Y | Y_j = y)
    and its one-message simulation."""
    ys = list(itertools.product(range(alphabet), repeat=n))
    n_msg = channel.shape[1]
    p_m = [sum(channel[i, m] for i in range(len(ys))) / len(ys) for m in range(n_msg)]
    total = 0.0
    for j in range(n):
        for y in range(alphabet):
            rows = [i for i, v in enumerate(ys) if v[j] == y]
            for m in range(n_msg):
                mass = sum(channel[i, m] for i in rows) / len(rows)
                for i in rows:
                    true = channel[i, m] / len(rows)
                    cond = true / mass if mass > 0 else 1 / len(rows)
                    total += abs(true - p_m[m] * cond)
    return total / (n * alphabet)


# -- criteria ---------------------------------------------------------------------

@pytest.mark.criterion(1, "relative entropy vs trace distance and Hellinger, 1000 pairs")
def test_relative_entropy_bounds(request):
    t0 = time.perf_counter()
    res = run_suite("relative-entropy", 1000, SEED)
    elapsed = time.perf_counter() - t0
    tags = _tags(res)
    assert set(tags) == {"relative-vs-trace", "relative-vs-hellinger"}
    assert all(r.trials == 1000 for r in res)
    _clean(res)
    assert elapsed < 60
    request.node.criterion_note = f"{elapsed:.1f} s"


@pytest.mark.criterion(2, "Fuchs-van de Graaf, Hellinger sandwich, pure-state trace distance")
def test_distance_sandwiches():
    res = run_suite("distances", 1000, SEED)
    assert {r.inequality for r in res} == {"fuchs-vdg", "hellinger-sandwich"}
    _clean(res)
    # both suites draw the same pair first from the same per-trial stream
    for i in (0, 1, 500, 999):
        a = random_pair(trial_rng(SEED, i))
        b = random_pair(trial_rng(SEED, i))
        assert all(np.array_equal(x, y) for x, y in zip(a, b))
    pure = run_suite("pure-trace", 200, SEED)
    assert pure[0].trials == 200
    _clean(pure)
    assert pure[0].max_violation <= 1e-9


@pytest.mark.criterion(3, "Uhlmann unitary attains the fidelity, 200 pairs")
def test_jozsa_uhlmann():
    res = run_suite("jozsa", 200, SEED)
    tags = _tags(res)
    assert tags["jozsa-overlap"].trials == 200
    assert tags["jozsa-overlap"].max_violation <= 1e-8
    assert tags["jozsa-unitary"].max_violation <= 1e-9
    _clean(res)


@pytest.mark.criterion(4, "local transition: h equality and trace bound, 200 pairs")
def test_local_transition():
    res = run_suite("local-transition", 200, SEED)
    tags = _tags(res)
    assert tags["local-transition-h"].max_violation <= 1e-8
    assert tags["local-transition-trace"].max_violation <= 1e-8
    _clean(res)


@pytest.mark.criterion(5, "average encoding bounds, 300 encodings, constant encoding 0 = 0")
def test_average_encoding():
    res = run_suite("average-encoding", 300, SEED)
    tags = _tags(res)
    assert tags["average-encoding-trace"].trials == 300
    _clean(res)
    rng = np.random.default_rng(SEED)
    for d in (1, 2, 5):
        s = random_density(d, None, rng)
        rep = average_encoding_report(Encoding([0, 1, 2], [0.5, 0.3, 0.2], [s, s, s]))
        assert rep.mutual_info == 0.0 and rep.avg_trace_dist == 0.0 and rep.avg_h_sq == 0.0
        assert rep.trace_rhs == 0.0 and rep.hellinger_rhs == 0.0


@pytest.mark.criterion(6, "informational distance properties and block-diagonal items")
def test_informational_distance():
    inf = run_suite("informational-distance", 300, SEED)
    assert len(inf) == 6 and all(r.trials >= 300 for r in inf)
    _clean(inf)
    _clean(run_suite("block-diagonal", 100, SEED))
    hel = _tags(run_suite("helstrom", 30, SEED))
    assert hel["block-diagonal-helstrom"].violations == 0
    assert hel["block-diagonal-helstrom"].max_violation <= 1e-8
    assert hel["helstrom-error"].violations == 0


@pytest.mark.criterion(7, "deterministic protocols exact, with exact bit counts")
def test_deterministic_protocols():
    for k in (1, 2, 3):
        for inst in all_sk(2, k):
            want = sk_oracle(inst)
            r = sk_protocol_right_start(inst)
            assert r.output == want and r.total_bits == k * width(2)
            r = sk_protocol_wrong_start(inst)
            assert r.output == want and r.total_bits == (k - 1) * width(2) + 2
    for n in (2, 3):
        insts = list(all_pj(n))
        for k in (1, 2, 3):
            for inst in insts:
                r = pj_det_protocol(inst, k)
                assert r.output == pj_oracle(inst.f_a, inst.f_b, k)
                assert r.total_bits == k * width(n)
    for i in range(1000):
        ss = np.random.SeedSequence([SEED, i])
        n, k = 3 + i % 4, 2 + i % 3
        inst = random_sk(n, k, ss)
        want = sk_oracle(inst)
        r = sk_protocol_right_start(inst)
        assert r.output == want and r.total_bits == k * width(n)
        r = sk_protocol_wrong_start(inst)
        assert r.output == want and r.total_bits == (k - 1) * width(n) + n
        n, k = 16 + 7 * (i % 20), 1 + i % 9
        pj = random_pj(n, ss)
        r = pj_det_protocol(pj, k)
        assert r.output == pj_oracle(pj.f_a, pj.f_b, k) and r.total_bits == k * width(n)


@pytest.mark.criterion(8, "randomized pointer jumping at n=4096, k=12, eps=0.2, 2000 trials")
def test_randomized_pointer_jumping(request):
    n, k, eps, trials = 4096, 12, 0.2, 2000
    t0 = time.perf_counter()
    aborts, max_bits, wrong = 0, 0, 0
    for i in range(trials):
        inst = random_pj(n, np.random.SeedSequence([SEED, i, 0]))
        r = pj_nw_protocol(inst, k, eps, PublicCoins(np.random.SeedSequence([SEED, i, 1])))
        assert r.transcript.is_consistent()
        if r.aborted:
            aborts += 1
        elif r.output != pj_oracle(inst.f_a, inst.f_b, k):
            wrong += 1
        max_bits = max(max_bits, r.total_bits)
    elapsed = time.perf_counter() - t0
    budget = nw_budget(n, k, eps)
    rate = aborts / trials
    const = max_bits / budget
    request.node.criterion_note = (f"abort rate {rate:.4f}, measured constant {const:.3f}, "
                                   f"{elapsed:.1f} s")
    print(f"pj-nw: abort rate {rate:.4f}, max bits {max_bits}, budget {budget:.1f}, "
          f"constant {const:.3f}")
    assert wrong == 0
    assert rate <= eps + 3 * math.sqrt(eps * (1 - eps) / trials)
    assert max_bits <= 10 * budget
    assert elapsed < 120


@pytest.mark.criterion(9, "S_k to DISJ reduction, exhaustive n=2,k=2 and 500 padded n=4,k=3")
def test_disj_reduction():
    for inst in all_sk(2, 2):
        red = sk_to_disj(inst)
        assert red.disj.universe == 4
        assert red.intersection_size <= 1
        assert bool(red.intersection_size) == (sk_oracle(inst) == 1)
        a, b = disj_oracle(inst)
        assert red.disj.set_a == a and red.disj.set_b == b
    for i in range(500):
        inst = random_sk(4, 3, np.random.SeedSequence([SEED, i]))
        red = sk_to_disj(inst)
        assert red.padded and red.disj.universe == 64
        a, b = disj_oracle(inst)
        assert red.disj.set_a == a and red.disj.set_b == b
        assert bool(a & b) == (sk_oracle(inst) == 1) == red.disj_value


@pytest.mark.criterion(10, "quantum information accounting on the bundled demos")
def test_quantum_accounting():
    for name, make in qp.DEMOS.items():
        res = qp.run_qprotocol(make())
        assert res.prefix_info, name
        for _, sent, info in res.prefix_info:
            assert info <= 2 * sent + 1e-6, name
    sd = qp.run_qprotocol(qp.superdense_schedule())
    assert sd.qubits_sent["alice->bob"] == 1
    assert abs(qp.info_account(sd).I_X_B - 2.0) <= 1e-6
    for n in (2, 3):
        for m in range(n + 1):
            ra = qp.random_access_demo(n, m)
            assert ra.prefix_ok and ra.info <= 2 * m + 1e-6
            assert ra.lhs <= ra.rhs + 1e-6
    for c in (1, 2, 3, 7):
        ss = qp.safe_storage_transform([(c, 1), (1, c)])
        assert ss.total == 2 * c
        assert qp.replay_padded(ss)


@pytest.mark.criterion(11, "one-message simulation distance within sqrt(2 l1 / n)")
def test_classical_round_reduction():
    worst = 0.0
    for n in range(1, 9):
        for ell1 in range(0, 4):
            rep = classical_round_reduction_demo(n, 2, ell1, 50, [SEED, n, ell1])
            assert len(rep.distances) == 50
            assert rep.max_distance <= math.sqrt(2 * ell1 / n) + 1e-8
            worst = max(worst, rep.max_ratio)
    rng = np.random.default_rng(SEED)
    for n, ell1, kind in [(3, 2, "dirichlet"), (4, 1, "function"), (5, 3, "dirichlet")]:
        ch = random_message_channel(2 ** n, 2 ** ell1, rng, kind)
        assert simulation_distance(ch, n, 2) == pytest.approx(simulation_oracle(ch, n, 2),
                                                              abs=1e-12)
    assert worst <= 1.0
