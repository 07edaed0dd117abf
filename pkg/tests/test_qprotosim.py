import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qcomm import qprotosim as qp
from qcomm.core import random_unitary
from qcomm.metrics import binary_entropy


def test_empty_schedule_leaves_state():
    s = qp.QSchedule(2, ["alice", "bob"], {"X": (0,)}, [])
    res = qp.run_qprotocol(s, "1")
    assert np.allclose(res.final.amplitudes, [0, 0, 1, 0])
    assert res.qubits_sent == {"alice->bob": 0, "bob->alice": 0}
    assert qp.info_account(qp.run_qprotocol(s)).I_X_B == pytest.approx(0.0, abs=1e-12)


def test_send_flips_owner_only():
    u = random_unitary(4, 0)
    s = qp.QSchedule(2, ["alice", "alice"], {}, [qp.LocalUnitary("alice", (0, 1), u),
                                                  qp.Send((1,), "alice", "bob")])
    before = qp.run_qprotocol(qp.QSchedule(2, ["alice", "alice"], {},
                                           [qp.LocalUnitary("alice", (0, 1), u)]))
    after = qp.run_qprotocol(s)
    assert np.allclose(before.final.amplitudes, after.final.amplitudes)
    assert after.final.owners == ["alice", "bob"]
    assert after.qubits_sent["alice->bob"] == 1


def test_ownership_enforced():
    s = qp.QSchedule(2, ["alice", "bob"], {}, [qp.LocalUnitary("alice", (0, 1), qp.CNOT)])
    with pytest.raises(qp.OwnershipError):
        qp.run_qprotocol(s)
    s = qp.QSchedule(2, ["alice", "bob"], {}, [qp.Send((1,), "alice", "bob")])
    with pytest.raises(qp.OwnershipError):
        qp.run_qprotocol(s)
    s = qp.QSchedule(2, ["alice", "bob"], {}, [qp.Measure("alice", (1,))])
    with pytest.raises(qp.OwnershipError):
        qp.run_qprotocol(s)


def test_input_register_is_control_only():
    s = qp.QSchedule(2, ["alice", "alice"], {"X": (0,)}, [qp.LocalUnitary("alice", (0,), qp.H)])
    with pytest.raises(qp.OwnershipError):
        qp.run_qprotocol(s)
    # CNOT with X as control is fine; with X as target it is not
    qp.run_qprotocol(qp.send_bit_schedule())
    s = qp.QSchedule(2, ["alice", "alice"], {"X": (1,)}, [qp.LocalUnitary("alice", (0, 1), qp.CNOT)])
    with pytest.raises(qp.OwnershipError):
        qp.run_qprotocol(s)


def test_size_cap():
    with pytest.raises(qp.SizeError):
        qp.QSchedule(qp.MAX_QUBITS + 1, ["alice"] * (qp.MAX_QUBITS + 1), {}, [])


def test_declared_lengths_checked():
    with pytest.raises(ValueError):
        qp.QSchedule(2, ["alice", "alice"], {}, [qp.Send((1,), "alice", "bob")], declared=[2])


def test_send_bit_information():
    res = qp.run_qprotocol(qp.send_bit_schedule())
    assert qp.info_account(res).I_X_B == pytest.approx(1.0, abs=1e-9)
    assert qp.prefix_bound_holds(res)
    assert [p[1] for p in res.prefix_info] == [0, 0, 1]


def test_superdense_decodes_and_saturates():
    sched = qp.superdense_schedule()
    for x in ("00", "01", "10", "11"):
        res = qp.run_qprotocol(sched, x, track_info=False)
        dist = res.outcome_distribution([2, 3])
        assert dist.get(x, 0.0) == pytest.approx(1.0, abs=1e-12)
    res = qp.run_qprotocol(sched)
    acc = qp.info_account(res)
    assert acc.I_X_B == pytest.approx(2.0, abs=1e-6)
    assert res.qubits_sent["alice->bob"] == 1
    assert acc.chain_holds and qp.prefix_bound_holds(res)
    # before the send Bob holds half a Bell pair and learns nothing
    assert res.prefix_info[2][2] == pytest.approx(0.0, abs=1e-9)


def test_random_access_examples():
    for n in (2, 3):
        full = qp.random_access_demo(n, n)
        assert full.success == pytest.approx([1.0] * n)
        assert full.lhs == pytest.approx(n) and full.info_bound_check
        blind = qp.random_access_demo(n, 0)
        assert blind.success == pytest.approx([0.5] * n) and blind.lhs == pytest.approx(0)
    qrac = qp.random_access_demo(2, 1)
    p = 0.5 + 1 / (2 * math.sqrt(2))
    assert qrac.success == pytest.approx([p, p], abs=1e-9)
    assert qrac.lhs == pytest.approx(2 * (1 - binary_entropy(p)))
    assert qrac.info_bound_check and qrac.prefix_ok
    q3 = qp.random_access_demo(3, 1)
    assert q3.success == pytest.approx([0.5 + 1 / (2 * math.sqrt(3))] * 3, abs=1e-9)
    with pytest.raises(qp.SizeError):
        qp.random_access_demo(4, 1)


def test_safe_storage_example():
    for c in (2, 5):
        ss = qp.safe_storage_transform([(c, 1), (1, c)])
        assert ss.declared == (c, c) and ss.total == 2 * c
        assert ss.within_bound and qp.replay_padded(ss)
    s = qp.send_bit_schedule()
    assert qp.safe_storage_transform(s) is s
    with pytest.raises(ValueError):
        qp.safe_storage_transform([(1, 2), (3,)])


@settings(max_examples=50, deadline=None)
@given(st.lists(st.lists(st.integers(0, 9), min_size=3, max_size=3), min_size=1, max_size=6))
def test_safe_storage_cost_bound(rows):
    ss = qp.safe_storage_transform(rows)
    assert ss.total <= ss.rounds * ss.original_cost
    assert all(d >= r[i] for r in rows for i, d in enumerate(ss.declared))
    assert qp.replay_padded(ss)


def test_padding_round_trip():
    bits = np.array([1, 0, 1], dtype=np.uint8)
    padded = qp.pad_message(bits, 5)
    assert padded.tolist() == [1, 0, 1, qp.BLANK, qp.BLANK]
    assert np.array_equal(qp.unpad_message(padded), bits)
    with pytest.raises(ValueError):
        qp.pad_message(bits, 2)


def test_measurement_keeps_norm_and_branches():
    res = qp.run_qprotocol(qp.superdense_schedule())
    assert sum(b.prob for b in res.branches) == pytest.approx(1.0)
    for b in res.branches:
        assert np.linalg.norm(b.state.amplitudes) == pytest.approx(1.0, abs=1e-9)


def test_schedule_json_round_trip(tmp_path):
    sched = qp.superdense_schedule()
    path = tmp_path / "sd.json"
    path.write_text(json.dumps(qp.schedule_to_json(sched)))
    back = qp.load_schedule(path)
    a, b = qp.run_qprotocol(sched), qp.run_qprotocol(back)
    assert qp.info_account(a).I_X_B == pytest.approx(qp.info_account(b).I_X_B)
    assert back.declared == [1]


def test_block_diagonal_helper():
    assert qp.is_block_diagonal(qp.CNOT, [0], 2)
    assert not qp.is_block_diagonal(qp.CNOT, [1], 2)
    assert not qp.is_block_diagonal(qp.H, [0], 1)


def test_sampling_mode_is_seeded():
    res = qp.run_qprotocol(qp.random_access_schedule(2, 1, 0)[0], "10", track_info=False)
    a = res.sample([2], 1000, seed=4)
    assert a == res.sample([2], 1000, seed=4)
    assert sum(a.values()) == 1000
    assert a.get("1", 0) / 1000 == pytest.approx(0.5 + 1 / (2 * math.sqrt(2)), abs=0.06)
