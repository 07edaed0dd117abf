"""qcomm: quantum-information inequality checks and two-party protocol simulation.

Exit codes: 0 success, 1 a checked property failed, 2 usage error.
"""
from __future__ import annotations

import argparse
import io
import json
import sys

from . import __version__
from .commsim.experiment import PROTOCOLS, experiment, write_csv
from .commsim.problems import (
    SkInstance, dump_instance, instance_to_json, load_instance, random_pj, random_sk,
)
from .commsim.reduction import sk_to_disj
from . import qprotosim as qp
from .suites import SUITES, suite_report

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _emit(text: str, out: str | None) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def cmd_verify(args) -> int:
    names = sorted(SUITES) if args.suite == "all" else [args.suite]
    if names[0] not in SUITES:
        raise UsageError(f"unknown suite {args.suite!r}; known: all, {', '.join(sorted(SUITES))}")
    if args.trials is not None and args.trials < 1:
        raise UsageError("--trials must be positive")
    report = suite_report(names, args.trials, args.seed)
    report["command"] = "verify"
    _emit(_dumps(report), args.out)
    return EXIT_OK if report["violations"] == 0 else EXIT_VIOLATION


def cmd_simulate(args) -> int:
    if not args.exhaustive and args.seed is None:
        raise UsageError("--seed is required for randomized runs")
    try:
        rep = experiment(args.protocol, args.n, args.k, args.eps, args.trials,
                         args.seed if args.seed is not None else 0, args.exhaustive)
    except ValueError as e:
        raise UsageError(str(e)) from e
    if rep.degenerate:
        print(f"warning: degenerate parameters for {args.protocol} (sample covers every vertex "
              "or k < 4); the run is correct but the budget comparison is not meaningful",
              file=sys.stderr)
    if args.format == "csv":
        buf = io.StringIO()
        write_csv([rep], buf)
        _emit(buf.getvalue(), args.out)
    else:
        d = rep.to_dict()
        d["version"] = __version__
        d["command"] = "simulate"
        _emit(_dumps(d), args.out)
    return EXIT_OK if rep.error_rate <= rep.abort_rate else EXIT_VIOLATION


def cmd_reduce(args) -> int:
    try:
        inst = load_instance(args.instance)
    except (OSError, ValueError, json.JSONDecodeError) as e:
        raise UsageError(f"cannot read instance: {e}") from e
    if not isinstance(inst, SkInstance):
        raise UsageError("reduce needs an S_k instance file")
    red = sk_to_disj(inst)
    out = instance_to_json(red.disj)
    out["certificate"] = red.certificate()
    out["version"] = __version__
    _emit(_dumps(out), args.out)
    return EXIT_OK if red.consistent else EXIT_VIOLATION


def cmd_instance(args) -> int:
    if args.type == "sk":
        inst = random_sk(args.n, args.k, args.seed)
    else:
        inst = random_pj(args.n, args.seed)
    if args.out in (None, "-"):
        sys.stdout.write(_dumps(instance_to_json(inst)))
    else:
        dump_instance(inst, args.out)
    return EXIT_OK


def _schedule_report(name, sched) -> dict:
    res = qp.run_qprotocol(sched)
    acc = qp.info_account(res)
    return {"demo": name, "qubits_sent": res.qubits_sent, "I_X_B": acc.I_X_B,
            "per_coordinate": acc.per_coordinate,
            "prefix": [{"step": s, "sent": n, "I_X_B": i} for s, n, i in res.prefix_info],
            "prefix_bound_holds": qp.prefix_bound_holds(res), "chain_holds": acc.chain_holds}


def cmd_qdemo(args) -> int:
    reports = []
    if args.schedule:
        try:
            sched = qp.load_schedule(args.schedule)
        except (OSError, ValueError, KeyError, json.JSONDecodeError) as e:
            raise UsageError(f"cannot read schedule: {e}") from e
        reports.append(_schedule_report(args.schedule, sched))
    demos = ["send-bit", "superdense", "random-access", "safe-storage"] if args.demo == "all" \
        else ([args.demo] if args.demo else [])
    ok = all(r["prefix_bound_holds"] and r["chain_holds"] for r in reports)
    for name in demos:
        if name in qp.DEMOS:
            r = _schedule_report(name, qp.DEMOS[name]())
            ok &= r["prefix_bound_holds"] and r["chain_holds"]
        elif name == "random-access":
            r = {"demo": name, "cases": []}
            for n in (2, 3):
                for m in range(n + 1):
                    ra = qp.random_access_demo(n, m)
                    r["cases"].append({"n": n, "m": m, "success": ra.success, "lhs": ra.lhs,
                                       "rhs": ra.rhs, "I_X_B": ra.info,
                                       "holds": ra.info_bound_check and ra.prefix_ok})
                    ok &= ra.info_bound_check and ra.prefix_ok
        elif name == "safe-storage":
            c = args.c
            ss = qp.safe_storage_transform([(c, 1), (1, c)])
            r = {"demo": name, "branches": ss.branches, "declared": list(ss.declared),
                 "total": ss.total, "bound": ss.rounds * ss.original_cost,
                 "replay_ok": qp.replay_padded(ss)}
            ok &= ss.within_bound and r["replay_ok"]
        else:
            raise UsageError(f"unknown demo {name!r}")
        reports.append(r)
    if not reports:
        raise UsageError("give --demo or --schedule")
    _emit(_dumps({"version": __version__, "command": "qdemo",
                  "config": {"demo": args.demo, "schedule": args.schedule, "c": args.c},
                  "reports": reports, "ok": ok}), args.out)
    return EXIT_OK if ok else EXIT_VIOLATION


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qcomm", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"qcomm {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="run a randomized property suite")
    v.add_argument("--suite", required=True, help="suite id or 'all'")
    v.add_argument("--trials", type=int, default=None, help="trials (default: per-suite)")
    v.add_argument("--seed", type=int, required=True)
    v.add_argument("--out", default=None)
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("simulate", help="run a protocol experiment")
    s.add_argument("--protocol", required=True, choices=PROTOCOLS)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--eps", type=float, default=None)
    s.add_argument("--trials", type=int, default=100)
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--exhaustive", action="store_true")
    s.add_argument("--format", choices=("csv", "json"), default="csv")
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_simulate)

    r = sub.add_parser("reduce", help="turn an S_k instance file into a DISJ instance")
    r.add_argument("instance")
    r.add_argument("--out", default=None)
    r.set_defaults(func=cmd_reduce)

    g = sub.add_parser("instance", help="write a random instance file")
    g.add_argument("--type", choices=("sk", "pj"), required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--k", type=int, default=1)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--out", default=None)
    g.set_defaults(func=cmd_instance)

    q = sub.add_parser("qdemo", help="run quantum demo protocols with information accounting")
    q.add_argument("--demo", choices=("all", "send-bit", "superdense", "random-access",
                                      "safe-storage"), default=None)
    q.add_argument("--schedule", default=None, help="JSON schedule file")
    q.add_argument("--c", type=int, default=3, help="long message length for safe-storage")
    q.add_argument("--out", default=None)
    q.set_defaults(func=cmd_qdemo)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"qcomm: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
