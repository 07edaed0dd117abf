"""Small state-vector simulator for two-party quantum protocols.

Qubit 0 is the most significant tensor factor.  Every qubit has an owner;
a ``Send`` step only changes owners.  Classical inputs live in the ``X``
register and may only act as controls: a unitary touching X must be block
diagonal in X's computational basis.  Measurements keep every outcome, so a
run ends in an ensemble of ``(probability, QState)`` branches.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .core import TOL
from .metrics import binary_entropy, mutual_information

ALICE, BOB = "alice", "bob"
MAX_QUBITS = 14
INFO_SLACK = 1e-6

H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
X_GATE = np.array([[0, 1], [1, 0]], dtype=complex)
Z_GATE = np.diag([1, -1]).astype(complex)
S_DAG = np.diag([1, -1j])
CNOT = np.eye(4, dtype=complex)[[0, 1, 3, 2]]


class OwnershipError(ValueError):
    pass


class SizeError(ValueError):
    pass


@dataclass
class QState:
    amplitudes: np.ndarray
    owners: list
    registers: dict = field(default_factory=dict)

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        nq = len(self.owners)
        if nq > MAX_QUBITS:
            raise SizeError(f"{nq} qubits exceeds the cap of {MAX_QUBITS}")
        if self.amplitudes.shape != (1 << nq,):
            raise ValueError("amplitude vector does not match the number of qubits")
        if abs(np.vdot(self.amplitudes, self.amplitudes).real - 1) > TOL:
            raise ValueError("state is not normalised")
        if any(o not in (ALICE, BOB) for o in self.owners):
            raise ValueError("owners must be 'alice' or 'bob'")

    @property
    def n_qubits(self) -> int:
        return len(self.owners)

    def held_by(self, player: str) -> list[int]:
        return [q for q, o in enumerate(self.owners) if o == player]

    def copy(self) -> "QState":
        return QState(self.amplitudes.copy(), list(self.owners), dict(self.registers))


def _tensor(psi, nq):
    return psi.reshape((2,) * nq) if nq else psi.reshape(())


def apply_on(psi: np.ndarray, nq: int, qubits, u) -> np.ndarray:
    qubits = list(qubits)
    t = np.moveaxis(_tensor(psi, nq), qubits, range(len(qubits)))
    shape = t.shape
    t = (np.asarray(u) @ t.reshape(1 << len(qubits), -1)).reshape(shape)
    return np.moveaxis(t, range(len(qubits)), qubits).reshape(-1)


def reduced_density(psi: np.ndarray, nq: int, keep) -> np.ndarray:
    """Reduced state on ``keep`` (factor order as listed)."""
    keep = list(keep)
    t = np.moveaxis(_tensor(psi, nq), keep, range(len(keep)))
    a = t.reshape(1 << len(keep), -1)
    return a @ a.conj().T


def is_block_diagonal(u: np.ndarray, positions: list[int], n: int) -> bool:
    """True when ``u`` on n qubits preserves the basis value of the qubits at ``positions``."""
    idx = np.arange(1 << n)
    key = np.zeros(1 << n, dtype=np.int64)
    for p in positions:
        key = key * 2 + ((idx >> (n - 1 - p)) & 1)
    mask = key[:, None] != key[None, :]
    return bool(np.all(np.abs(np.asarray(u)[mask]) <= TOL))


# -- schedule ------------------------------------------------------------------

@dataclass(frozen=True)
class LocalUnitary:
    owner: str
    qubits: tuple
    matrix: np.ndarray


@dataclass(frozen=True)
class Send:
    qubits: tuple
    sender: str
    receiver: str


@dataclass(frozen=True)
class Measure:
    owner: str
    qubits: tuple


@dataclass
class QSchedule:
    n_qubits: int
    owners: list
    registers: dict
    steps: list
    prep: list = field(default_factory=list)  # (qubits, matrix): input-independent entanglement
    declared: list | None = None              # qubits per message

    def __post_init__(self):
        if self.n_qubits > MAX_QUBITS:
            raise SizeError(f"{self.n_qubits} qubits exceeds the cap of {MAX_QUBITS}")
        if len(self.owners) != self.n_qubits:
            raise ValueError("need one owner per qubit")
        sizes = [len(s.qubits) for s in self.steps if isinstance(s, Send)]
        if self.declared is None:
            self.declared = sizes
        elif list(self.declared) != sizes:
            raise ValueError(f"message sizes {sizes} differ from declared {list(self.declared)}")
        xs = set(self.registers.get("X", ()))
        for qubits, _ in self.prep:
            if xs & set(qubits):
                raise ValueError("preparation may not touch the input register")

    @property
    def x_qubits(self) -> list[int]:
        return list(self.registers.get("X", ()))


@dataclass
class Branch:
    prob: float
    state: QState
    outcomes: tuple = ()


@dataclass
class RunResult:
    branches: list
    qubits_sent: dict
    prefix_info: list  # (step index, qubits sent alice->bob so far, I(X:Bob))

    @property
    def final(self):
        return self.branches[0].state if len(self.branches) == 1 else self.branches

    def outcome_distribution(self, qubits) -> dict:
        """Distribution of the computational-basis values of ``qubits`` over all branches."""
        out: dict = {}
        for br in self.branches:
            rho = reduced_density(br.state.amplitudes, br.state.n_qubits, qubits)
            for i, p in enumerate(np.real(np.diag(rho))):
                if p * br.prob > 1e-15:
                    key = format(i, f"0{len(qubits)}b") if qubits else ""
                    out[key] = out.get(key, 0.0) + float(p * br.prob)
        return out

    def sample(self, qubits, shots: int, seed=None) -> dict:
        """Seeded counts of ``shots`` draws from :meth:`outcome_distribution`."""
        dist = self.outcome_distribution(qubits)
        keys = sorted(dist)
        p = np.array([dist[k] for k in keys])
        counts = np.random.default_rng(seed).multinomial(shots, p / p.sum())
        return {k: int(c) for k, c in zip(keys, counts) if c}


def initial_state(schedule: QSchedule, input_mode="uniform") -> QState:
    """``input_mode`` is ``"uniform"`` or a tuple/str of X bits for a basis input."""
    nq = schedule.n_qubits
    xs = schedule.x_qubits
    psi = np.zeros(1 << nq, dtype=complex)
    psi[0] = 1
    if input_mode == "uniform":
        for q in xs:
            psi = apply_on(psi, nq, [q], H)
    else:
        bits = [int(b) for b in input_mode]
        if len(bits) != len(xs):
            raise ValueError(f"basis input needs {len(xs)} bits")
        for q, b in zip(xs, bits):
            if b:
                psi = apply_on(psi, nq, [q], X_GATE)
    for qubits, m in schedule.prep:
        psi = apply_on(psi, nq, qubits, m)
    return QState(psi, list(schedule.owners), dict(schedule.registers))


def _step_unitary(br: Branch, step: LocalUnitary, xs: list[int]) -> None:
    st = br.state
    bad = [q for q in step.qubits if st.owners[q] != step.owner]
    if bad:
        raise OwnershipError(f"{step.owner} does not hold qubits {bad}")
    m = np.asarray(step.matrix, dtype=complex)
    d = 1 << len(step.qubits)
    if m.shape != (d, d) or np.linalg.norm(m.conj().T @ m - np.eye(d)) > TOL:
        raise ValueError("step matrix is not a unitary of the right size")
    pos = [i for i, q in enumerate(step.qubits) if q in xs]
    if pos and not is_block_diagonal(m, pos, len(step.qubits)):
        raise OwnershipError("unitaries may use the input register only as a control")
    st.amplitudes = apply_on(st.amplitudes, st.n_qubits, step.qubits, m)


def _step_measure(br: Branch, step: Measure) -> list[Branch]:
    st = br.state
    bad = [q for q in step.qubits if st.owners[q] != step.owner]
    if bad:
        raise OwnershipError(f"{step.owner} does not hold qubits {bad}")
    nq = st.n_qubits
    out = []
    for bits in itertools.product((0, 1), repeat=len(step.qubits)):
        t = _tensor(st.amplitudes, nq)
        proj = np.zeros_like(t)
        idx = [slice(None)] * nq
        for q, b in zip(step.qubits, bits):
            idx[q] = b
        proj[tuple(idx)] = t[tuple(idx)]
        psi = proj.reshape(-1)
        p = float(np.vdot(psi, psi).real)
        if p > 1e-15:
            s = QState(psi / math.sqrt(p), list(st.owners), dict(st.registers))
            out.append(Branch(br.prob * p, s, br.outcomes + (bits,)))
    return out


def run_qprotocol(schedule: QSchedule, input_mode="uniform", track_info: bool = True) -> RunResult:
    """Evolve the schedule exactly.  With ``track_info`` the Bob-side
    information about X is recorded after every step."""
    xs = schedule.x_qubits
    branches = [Branch(1.0, initial_state(schedule, input_mode))]
    sent = {"alice->bob": 0, "bob->alice": 0}
    prefix = []
    if track_info and xs:
        prefix.append((0, 0, info_account(branches, xs).I_X_B))
    for i, step in enumerate(schedule.steps, start=1):
        if isinstance(step, LocalUnitary):
            for br in branches:
                _step_unitary(br, step, xs)
        elif isinstance(step, Send):
            if step.sender == step.receiver:
                raise ValueError("sender and receiver must differ")
            for br in branches:
                bad = [q for q in step.qubits if br.state.owners[q] != step.sender]
                if bad:
                    raise OwnershipError(f"{step.sender} does not hold qubits {bad}")
                for q in step.qubits:
                    br.state.owners[q] = step.receiver
            key = "alice->bob" if step.sender == ALICE else "bob->alice"
            sent[key] += len(step.qubits)
        elif isinstance(step, Measure):
            branches = [b for br in branches for b in _step_measure(br, step)]
        else:
            raise TypeError(f"unknown step {step!r}")
        if track_info and xs:
            prefix.append((i, sent["alice->bob"], info_account(branches, xs).I_X_B))
    return RunResult(branches, sent, prefix)


# -- information accounting ----------------------------------------------------------

@dataclass
class InfoAccount:
    I_X_B: float
    per_coordinate: list

    @property
    def chain_holds(self) -> bool:
        return sum(self.per_coordinate) <= self.I_X_B + INFO_SLACK


def _dephase_first(rho: np.ndarray, dx: int) -> np.ndarray:
    d = rho.shape[0] // dx
    t = rho.reshape(dx, d, dx, d)
    out = np.zeros_like(t)
    for i in range(dx):
        out[i, :, i, :] = t[i, :, i, :]
    return out.reshape(dx * d, dx * d)


def info_account(state, x_qubits=None) -> InfoAccount:
    """I(X : Bob's qubits) with X dephased, plus I(X_i : Bob's qubits) per bit.

    ``state`` is a QState, a RunResult or a list of branches.
    """
    if isinstance(state, RunResult):
        branches = state.branches
    elif isinstance(state, QState):
        branches = [Branch(1.0, state)]
    else:
        branches = list(state)
    st0 = branches[0].state
    if x_qubits is None:
        if "X" not in st0.registers:
            raise ValueError("register map has no X register")
        x_qubits = st0.registers["X"]
    xs = list(x_qubits)
    bob = [q for q in st0.held_by(BOB) if q not in xs]
    for br in branches:
        if br.state.held_by(BOB) != st0.held_by(BOB):
            raise ValueError("branches disagree about ownership")

    def mi(group):
        keep = group + bob
        if len(keep) > 12:
            raise SizeError("X and Bob's qubits together exceed 12 qubits")
        rho = sum(br.prob * reduced_density(br.state.amplitudes, br.state.n_qubits, keep)
                  for br in branches)
        dx = 1 << len(group)
        rho = _dephase_first(rho, dx)
        if not bob:
            return 0.0
        return max(0.0, mutual_information(rho, (dx, 1 << len(bob)), (0,), (1,)))

    return InfoAccount(mi(xs), [mi([q]) for q in xs])


def prefix_bound_holds(result: RunResult) -> bool:
    """I(X : Bob) <= 2 * (qubits Alice sent to Bob) after every step."""
    return all(info <= 2 * sent + INFO_SLACK for _, sent, info in result.prefix_info)


# -- safe storage -----------------------------------------------------------------------

BLANK = 2  # padding symbol outside {0, 1}


@dataclass
class SafeStorage:
    branches: list        # per-branch message lengths
    declared: tuple       # fixed length of each round after the transform
    original_cost: int    # worst-case total of the variable-length protocol

    @property
    def rounds(self) -> int:
        return len(self.declared)

    @property
    def total(self) -> int:
        return sum(self.declared)

    @property
    def within_bound(self) -> bool:
        return self.total <= self.rounds * self.original_cost


def safe_storage_transform(branches) -> SafeStorage | QSchedule:
    """Fix every round's length to its maximum over the branches.

    ``branches`` lists, for each measurement outcome, the message lengths of
    the k rounds.  A ``QSchedule`` already has fixed lengths and is returned
    unchanged.
    """
    if isinstance(branches, QSchedule):
        return branches
    rows = [tuple(int(x) for x in b) for b in branches]
    if not rows or len({len(r) for r in rows}) != 1 or any(x < 0 for r in rows for x in r):
        raise ValueError("branches must be equal-length lists of non-negative lengths")
    declared = tuple(max(col) for col in zip(*rows))
    return SafeStorage(rows, declared, max(sum(r) for r in rows))


def pad_message(bits, length: int) -> np.ndarray:
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.size > length:
        raise ValueError("message longer than its fixed length")
    return np.concatenate([bits, np.full(length - bits.size, BLANK, dtype=np.uint8)])


def unpad_message(symbols) -> np.ndarray:
    symbols = np.asarray(symbols, dtype=np.uint8)
    return symbols[symbols != BLANK]


def replay_padded(ss: SafeStorage, seed=0) -> bool:
    """Send random payloads of every branch through the padded schedule and
    check the receiver recovers each message exactly."""
    rng = np.random.default_rng(seed)
    for row in ss.branches:
        for length, fixed in zip(row, ss.declared):
            msg = rng.integers(0, 2, size=length).astype(np.uint8)
            padded = pad_message(msg, fixed)
            if padded.size != fixed or not np.array_equal(unpad_message(padded), msg):
                return False
    return True


# -- bundled demos ------------------------------------------------------------------------

def send_bit_schedule() -> QSchedule:
    """Alice copies her input bit onto a fresh qubit and sends it."""
    return QSchedule(2, [ALICE, ALICE], {"X": (0,), "M": (1,)},
                     [LocalUnitary(ALICE, (0, 1), CNOT), Send((1,), ALICE, BOB)])


def superdense_schedule() -> QSchedule:
    """Shared Bell pair on qubits 2 (Alice) and 3 (Bob); two input bits, one qubit sent."""
    bell_prep = CNOT @ np.kron(H, np.eye(2))
    cz = np.diag([1, 1, 1, -1]).astype(complex)
    steps = [
        LocalUnitary(ALICE, (1, 2), CNOT),   # x2 -> X on Alice's half
        LocalUnitary(ALICE, (0, 2), cz),     # x1 -> Z on Alice's half
        Send((2,), ALICE, BOB),
        LocalUnitary(BOB, (2, 3), CNOT),
        LocalUnitary(BOB, (2,), H),
        Measure(BOB, (2, 3)),
    ]
    return QSchedule(4, [ALICE, ALICE, ALICE, BOB], {"X": (0, 1), "E": (2, 3)}, steps,
                     prep=[((2, 3), bell_prep)])


def _prep_unitary(vec) -> np.ndarray:
    """A unitary whose first column is ``vec``."""
    vec = np.asarray(vec, dtype=complex)
    q, _ = np.linalg.qr(np.column_stack([vec, np.eye(len(vec))[:, 1:]]))
    i = int(np.argmax(np.abs(vec)))
    return q * (vec[i] / q[i, 0])


def _bloch_state(r) -> np.ndarray:
    x, y, z = r
    theta = math.acos(max(-1.0, min(1.0, z)))
    phi = math.atan2(y, x)
    return np.array([math.cos(theta / 2), np.exp(1j * phi) * math.sin(theta / 2)])


def _controlled_family(unitaries) -> np.ndarray:
    return np.block([[u if i == j else np.zeros_like(u) for j in range(len(unitaries))]
                     for i, u in enumerate(unitaries)])


READOUT = {0: np.eye(2, dtype=complex), 1: H, 2: H @ S_DAG}  # measure Z, X, Y


def random_access_schedule(n: int, m: int, index: int) -> tuple[QSchedule, int | None]:
    """Schedule in which Bob tries to learn bit ``index`` of Alice's n bits
    from m qubits.  Returns the schedule and the qubit Bob reads (None for a
    blind guess of 0)."""
    xs = tuple(range(n))
    if m >= n:
        msg = tuple(range(n, 2 * n))
        steps = [LocalUnitary(ALICE, (i, n + i), CNOT) for i in range(n)]
        steps += [Send(msg, ALICE, BOB), Measure(BOB, (n + index,))]
        return QSchedule(2 * n, [ALICE] * (2 * n), {"X": xs, "M": msg}, steps), n + index
    if m == 0:
        return QSchedule(n, [ALICE] * n, {"X": xs}, []), None
    if m == 1 and n in (2, 3):
        # quantum random access code: Bloch vectors at the cube (square) corners
        us = []
        for x in itertools.product((0, 1), repeat=n):
            signs = [(-1) ** b for b in x] + [0] * (3 - n)
            if n == 2:
                r = (signs[1] / math.sqrt(2), 0.0, signs[0] / math.sqrt(2))
            else:
                r = (signs[1] / math.sqrt(3), signs[2] / math.sqrt(3), signs[0] / math.sqrt(3))
            us.append(_prep_unitary(_bloch_state(r)))
        q = n
        basis = {0: 0, 1: 1, 2: 2}[index]
        steps = [LocalUnitary(ALICE, xs + (q,), _controlled_family(us)),
                 Send((q,), ALICE, BOB),
                 LocalUnitary(BOB, (q,), READOUT[basis]),
                 Measure(BOB, (q,))]
        return QSchedule(n + 1, [ALICE] * (n + 1), {"X": xs, "M": (q,)}, steps), q
    if m < n:
        # send the first m bits; guess the rest
        msg = tuple(range(n, n + m))
        steps = [LocalUnitary(ALICE, (i, n + i), CNOT) for i in range(m)]
        steps.append(Send(msg, ALICE, BOB))
        if index < m:
            steps.append(Measure(BOB, (n + index,)))
            return QSchedule(n + m, [ALICE] * (n + m), {"X": xs, "M": msg}, steps), n + index
        return QSchedule(n + m, [ALICE] * (n + m), {"X": xs, "M": msg}, steps), None
    raise ValueError("unsupported parameters")


@dataclass
class RandomAccessReport:
    n: int
    m: int
    success: list
    info: float
    prefix_ok: bool

    @property
    def lhs(self) -> float:
        return float(sum(1 - binary_entropy(p) for p in self.success))

    @property
    def rhs(self) -> float:
        return 2.0 * self.m

    @property
    def info_bound_check(self) -> bool:
        return self.lhs <= self.rhs + INFO_SLACK


def random_access_demo(n: int, m: int) -> RandomAccessReport:
    """Run every (x, i) pair exactly and plug the success rates into the
    ``sum_i (1 - H(eps_i)) <= 2m`` chain."""
    if n not in (2, 3) or not 0 <= m <= n:
        raise SizeError("random access demo supports n in {2, 3} and 0 <= m <= n")
    success = []
    info, prefix_ok = 0.0, True
    for i in range(n):
        sched, readq = random_access_schedule(n, m, i)
        full = run_qprotocol(sched, "uniform")
        prefix_ok &= prefix_bound_holds(full)
        info = max(info, info_account(full).I_X_B)
        hits = 0.0
        for x in itertools.product((0, 1), repeat=n):
            if readq is None:
                hits += 1.0 if x[i] == 0 else 0.0
                continue
            res = run_qprotocol(sched, x, track_info=False)
            hits += res.outcome_distribution([readq]).get(str(x[i]), 0.0)
        success.append(hits / 2 ** n)
    return RandomAccessReport(n, m, success, info, prefix_ok)


# -- JSON schedules --------------------------------------------------------------------

def _mat_to_json(m) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m, dtype=complex)]


def _mat_from_json(rows) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in rows], dtype=complex)


def schedule_to_json(s: QSchedule) -> dict:
    steps = []
    for st in s.steps:
        if isinstance(st, LocalUnitary):
            steps.append({"kind": "unitary", "owner": st.owner, "qubits": list(st.qubits),
                          "matrix": _mat_to_json(st.matrix)})
        elif isinstance(st, Send):
            steps.append({"kind": "send", "qubits": list(st.qubits), "from": st.sender,
                          "to": st.receiver})
        else:
            steps.append({"kind": "measure", "owner": st.owner, "qubits": list(st.qubits)})
    return {"qubits": s.n_qubits, "owners": list(s.owners),
            "registers": {k: list(v) for k, v in s.registers.items()},
            "prep": [{"qubits": list(q), "matrix": _mat_to_json(m)} for q, m in s.prep],
            "steps": steps, "declared": list(s.declared)}


def schedule_from_json(d: dict) -> QSchedule:
    steps = []
    for st in d["steps"]:
        kind = st.get("kind")
        if kind == "unitary":
            steps.append(LocalUnitary(st["owner"], tuple(st["qubits"]), _mat_from_json(st["matrix"])))
        elif kind == "send":
            steps.append(Send(tuple(st["qubits"]), st["from"], st["to"]))
        elif kind == "measure":
            steps.append(Measure(st["owner"], tuple(st["qubits"])))
        else:
            raise ValueError(f"unknown step kind {kind!r}")
    return QSchedule(int(d["qubits"]), list(d["owners"]),
                     {k: tuple(v) for k, v in d.get("registers", {}).items()}, steps,
                     [(tuple(p["qubits"]), _mat_from_json(p["matrix"])) for p in d.get("prep", [])],
                     d.get("declared"))


def load_schedule(path) -> QSchedule:
    with open(path) as fh:
        return schedule_from_json(json.load(fh))


DEMOS = {"send-bit": send_bit_schedule, "superdense": superdense_schedule}
