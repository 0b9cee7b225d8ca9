"""Command-line interface.

Exit codes: 0 on success, 1 on usage or I/O errors (bad flags, unreadable or
malformed input files), 2 on invariant violations (invalid quantum objects,
failed verification, a benchmark trial breaking an uncertainty bound).
Counterexamples are dumped as JSON next to the requested output.
"""
from __future__ import annotations

import argparse
import json
import sys

from .bench import BenchConfig, EurValidityError, run_bench, run_mub_scan, single_report
from .divergences import parse_divergence
from .errors import ConsistencyError, SchemaError, ValidationError
from .quantum import (
    STATE_ENSEMBLES,
    RngStream,
    random_density_matrix,
    random_full_rank_povm,
)
from .serialize import load_density_matrix, load_povm, save_json
from .verify import TAU_KINDS, draw_tau, verify_theorem1, verify_theorem2

USAGE_EXIT = 1
INVARIANT_EXIT = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2; usage errors are 1 here
        self.print_usage(sys.stderr)
        self.exit(USAGE_EXIT, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return value


def _seed(text: str) -> int:
    value = int(text)
    if not (0 <= value < 2**64):
        raise argparse.ArgumentTypeError(f"seed must fit in 64 unsigned bits, got {text!r}")
    return value


def _divergence_id(text: str) -> str:
    try:
        parse_divergence(text)
    except ValidationError as exc:
        raise argparse.ArgumentTypeError(str(exc))
    return text


def _add_bench_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--trials", type=_positive_int, default=100_000)
    sub.add_argument("--seed", type=_seed, default=0, help="64-bit master seed")
    sub.add_argument("--out", required=True, help="per-trial CSV path")
    sub.add_argument("--threads", type=_positive_int, default=None,
                     help="worker processes (default: all cores)")
    sub.add_argument("--eur3-no-log", action="store_true",
                     help="subtract the raw eur3 overlap instead of its log")
    sub.add_argument("--state-ensemble", choices=STATE_ENSEMBLES, default="uniform-spectrum")
    sub.add_argument("--gap-tol", type=float, default=1e-9,
                     help="strictness tolerance for negative-gap counting, in bits")


def _build_parser() -> _Parser:
    parser = _Parser(prog="retroq", description=__doc__.splitlines()[0])
    subs = parser.add_subparsers(dest="command", required=True)

    pvm = subs.add_parser("bench-pvm", help="random rank-one PVM gap benchmark")
    pvm.add_argument("--d", type=_positive_int, required=True)
    _add_bench_flags(pvm)

    povm = subs.add_parser("bench-povm", help="random rank-one POVM gap benchmark")
    povm.add_argument("--d", type=_positive_int, required=True)
    povm.add_argument("--n", type=_positive_int, required=True, help="outcomes (n >= d)")
    _add_bench_flags(povm)

    scan = subs.add_parser("mub-scan", help="(p, theta) sweep of the MUB counterexample family")
    scan.add_argument("--d", type=_positive_int, required=True, help="prime dimension")
    scan.add_argument("--p-step", type=float, default=0.01)
    scan.add_argument("--theta-step", type=float, default=1.0, help="degrees")
    scan.add_argument("--out", required=True)
    scan.add_argument("--basis-index", type=int, default=0)
    scan.add_argument("--eur3-no-log", action="store_true")

    ver = subs.add_parser("verify", help="Monte-Carlo check of the minimum-change theorems")
    ver.add_argument("--divergence", type=_divergence_id, required=True,
                     help='e.g. "umegaki", "sandwiched:2", "trace"')
    ver.add_argument("--d", type=_positive_int, required=True)
    ver.add_argument("--candidates", type=_positive_int, default=1000)
    ver.add_argument("--instances", type=_positive_int, default=20)
    ver.add_argument("--seed", type=_seed, default=0)
    ver.add_argument("--out", default=None, help="write the JSON report here instead of stdout")

    single = subs.add_parser("single", help="full report for explicit state/POVM JSON files")
    single.add_argument("--state", required=True)
    single.add_argument("--povm-m", required=True)
    single.add_argument("--povm-n", required=True)
    single.add_argument("--eur3-no-log", action="store_true")
    single.add_argument("--out", default=None)
    return parser


def _emit(payload: dict, out: str | None) -> None:
    if out:
        save_json(payload, out)
    else:
        json.dump(payload, sys.stdout, indent=2)
        sys.stdout.write("\n")


def _cmd_bench(args, mode: str) -> int:
    cfg = BenchConfig(
        mode=mode,
        d=args.d,
        n=getattr(args, "n", None),
        trials=args.trials,
        master_seed=args.seed,
        threads=args.threads,
        out=args.out,
        eur3_no_log=args.eur3_no_log,
        state_ensemble=args.state_ensemble,
        gap_tol=args.gap_tol,
    )
    counts = run_bench(cfg)
    summary = {"mode": mode, "d": cfg.d, "n": cfg.outcomes, "master_seed": cfg.master_seed,
               "state_ensemble": cfg.state_ensemble, "csv": cfg.out}
    summary.update(counts.to_jsonable())
    _emit(summary, None)
    return 0


def _cmd_mub_scan(args) -> int:
    rows = run_mub_scan(args.d, args.p_step, args.theta_step, args.out,
                        basis_index=args.basis_index, eur3_no_log=args.eur3_no_log)
    negative = sum(1 for row in rows if row[2] < -1e-9)
    _emit({"d": args.d, "points": len(rows), "negative_gap_points": negative,
           "csv": args.out}, None)
    return 0


def _cmd_verify(args) -> int:
    reports = []
    failed = False
    for i in range(args.instances):
        stream = RngStream(args.seed, i)
        gen = stream.generator()
        gamma = random_density_matrix(args.d, gen, ensemble="hilbert-schmidt")
        povm = random_full_rank_povm(args.d, args.d, gen)
        tau = draw_tau(args.d, gen, TAU_KINDS[i % len(TAU_KINDS)])
        if args.divergence == "trace":
            report = verify_theorem2(gamma, povm, tau, args.candidates, stream)
        else:
            report = verify_theorem1(gamma, povm, tau, args.divergence, args.candidates, stream)
        failed = failed or not report.passed
        reports.append(report.to_jsonable())
    payload = {"divergence": args.divergence, "d": args.d, "instances": args.instances,
               "candidates_per_instance": args.candidates, "master_seed": args.seed,
               "passed": not failed, "reports": reports}
    _emit(payload, args.out)
    return INVARIANT_EXIT if failed else 0


def _cmd_single(args) -> int:
    gamma = load_density_matrix(args.state)
    povm_m = load_povm(args.povm_m)
    povm_n = load_povm(args.povm_n)
    report = single_report(gamma, povm_m, povm_n, eur3_no_log=args.eur3_no_log)
    _emit(report, args.out)
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "bench-pvm":
            return _cmd_bench(args, "bench-pvm")
        if args.command == "bench-povm":
            return _cmd_bench(args, "bench-povm")
        if args.command == "mub-scan":
            return _cmd_mub_scan(args)
        if args.command == "verify":
            return _cmd_verify(args)
        return _cmd_single(args)
    except EurValidityError as exc:
        dump = (getattr(args, "out", None) or "retroq") + ".counterexample.json"
        save_json(exc.counterexample, dump)
        print(f"invariant violation: {exc} (counterexample written to {dump})", file=sys.stderr)
        return INVARIANT_EXIT
    except SchemaError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    except (ValidationError, ConsistencyError) as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return INVARIANT_EXIT
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return USAGE_EXIT


if __name__ == "__main__":
    sys.exit(main())
