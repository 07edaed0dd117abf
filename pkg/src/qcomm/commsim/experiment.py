"""Seeded Monte-Carlo and exhaustive runs of the protocols."""
from __future__ import annotations

import csv
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .problems import all_pj, all_sk, pj_eval, random_pj, random_sk, sk_eval, width
from .protocols import (
    nw_budget, pj_det_protocol, pj_nw_protocol, sk_protocol_right_start,
    sk_protocol_wrong_start,
)
from .transcript import PublicCoins

PROTOCOLS = ("sk-det", "sk-wrong-start", "pj-det", "pj-nw")

CSV_COLUMNS = ["protocol", "n", "k", "eps", "trials", "seed", "error_rate", "abort_rate",
               "mean_bits", "max_bits", "budget_formula_bits", "measured_constant"]


@dataclass
class ExperimentReport:
    protocol: str
    n: int
    k: int
    eps: float | None
    trials: int
    seed: int
    exhaustive: bool
    error_rate: float
    abort_rate: float
    mean_bits: float
    max_bits: int
    per_round_bits: list
    budget_formula_bits: float
    measured_constant: float
    degenerate: bool

    def to_dict(self) -> dict:
        return asdict(self)


def threads() -> int:
    try:
        return max(1, int(os.environ.get("QCOMM_THREADS", "1")))
    except ValueError:
        return 1


def budget(protocol: str, n: int, k: int, eps: float | None) -> float:
    w = width(n)
    if protocol in ("sk-det", "pj-det"):
        return float(k * w)
    if protocol == "sk-wrong-start":
        return float((k - 1) * w + n)
    return nw_budget(n, k, eps)


def _run(protocol, inst, k, eps, coin_seed):
    """Return (correct, aborted, round_bits, degenerate)."""
    if protocol == "sk-det":
        r, truth = sk_protocol_right_start(inst), sk_eval(inst)
    elif protocol == "sk-wrong-start":
        r, truth = sk_protocol_wrong_start(inst), sk_eval(inst)
    elif protocol == "pj-det":
        r, truth = pj_det_protocol(inst, k), pj_eval(inst, k).bit
    else:
        r = pj_nw_protocol(inst, k, eps, PublicCoins(coin_seed))
        truth = pj_eval(inst, k).bit
    if not r.transcript.is_consistent():
        raise RuntimeError(f"{protocol}: transcript lengths disagree with declarations")
    return r.output == truth, r.aborted, r.transcript.per_round_bits, r.degenerate


def experiment(protocol: str, n: int, k: int, eps: float | None = None, trials: int = 100,
               seed: int = 0, exhaustive: bool = False) -> ExperimentReport:
    """Run a protocol on random (or all) instances.

    Trial i draws its instance from ``SeedSequence([seed, i, 0])`` and its
    public coins from ``SeedSequence([seed, i, 1])``, so the report does not
    depend on the number of worker threads.
    """
    if protocol not in PROTOCOLS:
        raise ValueError(f"unknown protocol {protocol!r}; choose from {', '.join(PROTOCOLS)}")
    if n < 2 or k < 1:
        raise ValueError("need n >= 2 and k >= 1")
    if protocol == "pj-nw" and (eps is None or not 0 < eps < 1):
        raise ValueError("pj-nw needs eps in (0, 1)")
    is_sk = protocol.startswith("sk")
    if exhaustive:
        insts = list(all_sk(n, k) if is_sk else all_pj(n))
        trials = len(insts)
        make = insts.__getitem__
    else:
        def make(i):
            ss = np.random.SeedSequence([seed, i, 0])
            return random_sk(n, k, ss) if is_sk else random_pj(n, ss)

    def job(i):
        return _run(protocol, make(i), k, eps, np.random.SeedSequence([seed, i, 1]))

    with ThreadPoolExecutor(max_workers=threads()) as pool:
        results = list(pool.map(job, range(trials)))
    correct = np.array([c for c, _, _, _ in results], dtype=bool)
    aborted = np.array([a for _, a, _, _ in results], dtype=bool)
    rounds = np.array([rb for _, _, rb, _ in results], dtype=float)
    totals = rounds.sum(axis=1) if trials else np.zeros(0)
    b = budget(protocol, n, k, eps)
    max_bits = int(totals.max()) if trials else 0
    return ExperimentReport(
        protocol=protocol, n=n, k=k, eps=eps, trials=trials, seed=seed, exhaustive=exhaustive,
        error_rate=float((~correct).mean()) if trials else 0.0,
        abort_rate=float(aborted.mean()) if trials else 0.0,
        mean_bits=float(totals.mean()) if trials else 0.0,
        max_bits=max_bits,
        per_round_bits=rounds.mean(axis=0).tolist() if trials else [],
        budget_formula_bits=b,
        measured_constant=max_bits / b if b > 0 else 0.0,
        degenerate=any(d for _, _, _, d in results),
    )


def _fmt(x) -> str:
    if isinstance(x, float):
        return format(x, ".12g")
    if x is None:
        return ""
    return str(x)


def write_csv(reports, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in reports:
        d = r.to_dict()
        w.writerow([_fmt(d[c]) for c in CSV_COLUMNS])
