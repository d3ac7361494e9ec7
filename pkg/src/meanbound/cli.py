"""Command-line surface: bound computation, envelope estimation, table
precomputation, and the simulation harness.

Every subcommand is a thin adapter over the library; no numerical logic
lives here. Exit codes: 0 success, 2 validation error, 3 unwritable
output path.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from meanbound.classical import (
    BoundResult,
    anderson_ucb,
    clopper_pearson_ucb,
    hoeffding_ucb,
    lower_bound_via_negation,
    maurer_pontil_ucb,
    student_t_ucb,
)
from meanbound.core import Sample, SupportInterval
from meanbound.envelopes import anderson_envelope, cached_beta_n, estimate_beta_n
from meanbound.newbound import BoundRequest, bound_table, new_bound
from meanbound.ordering import AndersonT, L2T, MeanT
from meanbound.simharness import (
    histogram_to_csv,
    load_spec,
    lognormal_skew_demo,
    rows_to_csv,
    run_experiment,
)
from meanbound._rng import child_seed

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_UNWRITABLE = 3

METHODS = ("new-anderson", "new-l2", "new-mean", "anderson", "hoeffding",
           "maurer-pontil", "student-t", "clopper-pearson")
ENVELOPE_METHODS = ("anderson", "new-anderson")
NEW_METHODS = ("new-anderson", "new-l2", "new-mean")

BETA_HEADER = "n,alpha,mc_samples,seed,beta_n"


class _ValidationError(ValueError):
    pass


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="meanbound",
        description="Confidence bounds on the mean of bounded-support data.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    b = sub.add_parser("bound", help="compute one confidence bound")
    b.add_argument("--method", required=True, choices=METHODS)
    b.add_argument("--alpha", type=float, default=0.05)
    b.add_argument("--side", choices=("upper", "lower"), default="upper")
    b.add_argument("--data", help="file of one value per line (default stdin)")
    b.add_argument("--support", nargs=2, type=float, metavar=("A", "B"),
                   help="two-ended support interval")
    b.add_argument("--upper", type=float, metavar="B",
                   help="upper end of a one-ended support")
    b.add_argument("--mc-samples", type=int, default=10_000)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--safe-epsilon", type=float, default=None)
    b.add_argument("--beta-mc", type=int, default=1_000_000,
                   help="draws for the envelope estimate (envelope methods)")
    b.add_argument("--json", action="store_true",
                   help="print a single-line machine-readable record")
    b.set_defaults(func=cmd_bound)

    bn = sub.add_parser("beta-n", help="estimate the envelope constant")
    bn.add_argument("--n", type=int, required=True)
    bn.add_argument("--alpha", type=float, default=0.05)
    bn.add_argument("--mc", type=int, default=1_000_000)
    bn.add_argument("--seed", type=int, default=0)
    bn.add_argument("--out", required=True)
    bn.set_defaults(func=cmd_beta_n)

    t = sub.add_parser("table", help="precompute a bound table on a level grid")
    t.add_argument("--kind", required=True, choices=("anderson", "l2", "mean"))
    t.add_argument("--n", type=int, required=True)
    t.add_argument("--alpha", type=float, default=0.05)
    t.add_argument("--support", nargs=2, type=float, metavar=("A", "B"))
    t.add_argument("--upper", type=float, metavar="B")
    t.add_argument("--mc-samples", type=int, default=10_000)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--beta-mc", type=int, default=1_000_000)
    t.add_argument("--binary", action="store_true",
                   help="two-point lattice grid (kind mean only)")
    t.add_argument("--t-min", type=float)
    t.add_argument("--t-max", type=float)
    t.add_argument("--t-count", type=int, default=51)
    t.add_argument("--out", required=True)
    t.set_defaults(func=cmd_table)

    s = sub.add_parser("simulate", help="run an experiment config")
    s.add_argument("--config", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_simulate)

    d = sub.add_parser("demo-lognormal",
                       help="histogram of the lognormal sample mean")
    d.add_argument("--n", type=int, required=True)
    d.add_argument("--trials", type=int, default=10_000)
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--bins", type=int, default=40)
    d.add_argument("--out", required=True)
    d.set_defaults(func=cmd_demo_lognormal)
    return parser


def _read_values(path: str | None) -> list[float]:
    if path is None:
        text = sys.stdin.read()
    else:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise _ValidationError(f"cannot read --data file: {exc}") from exc
    values = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        try:
            values.append(float(body))
        except ValueError as exc:
            raise _ValidationError(
                f"malformed data line {lineno}: {line!r}") from exc
    if not values:
        raise _ValidationError("no data values provided")
    return values


def _parse_support(args) -> SupportInterval:
    if args.support is not None and args.upper is not None:
        raise _ValidationError("--support and --upper are mutually exclusive")
    if args.support is not None:
        return SupportInterval(args.support[0], args.support[1])
    if args.upper is not None:
        return SupportInterval(None, args.upper)
    raise _ValidationError("one of --support A B or --upper B is required")


def _check_alpha(alpha: float) -> float:
    if not 0.0 < alpha < 1.0:
        raise _ValidationError(f"--alpha must be in (0, 1), got {alpha}")
    return alpha


def _envelope_for(n: int, alpha: float, beta_mc: int, seed: int):
    est = cached_beta_n(n, alpha, beta_mc, child_seed(seed, 1))
    return anderson_envelope(n, est.value, alpha)


def cmd_bound(args) -> int:
    alpha = _check_alpha(args.alpha)
    if args.safe_epsilon is not None and args.method not in NEW_METHODS:
        raise _ValidationError(
            "--safe-epsilon applies only to the new-* methods")
    x = Sample(_read_values(args.data))
    method = args.method
    support = None
    if method in ("student-t", "clopper-pearson"):
        if args.support is not None or args.upper is not None:
            support = _parse_support(args)
    else:
        support = _parse_support(args)

    envelope = None
    if method in ENVELOPE_METHODS:
        envelope = _envelope_for(x.n, alpha, args.beta_mc, args.seed)

    if method in NEW_METHODS:
        ordering = {"new-anderson": lambda: AndersonT(envelope),
                    "new-l2": L2T, "new-mean": MeanT}[method]()
        result = new_bound(BoundRequest(
            x=x, support=support, alpha=alpha, ordering=ordering,
            mc_samples=args.mc_samples, seed=args.seed, side=args.side,
            safe_epsilon=args.safe_epsilon))
    elif args.side == "lower":
        if method in ("student-t", "clopper-pearson"):
            result = lower_bound_via_negation(method, x, support, alpha)
        else:
            result = lower_bound_via_negation(method, x, support, alpha,
                                              envelope=envelope)
    elif method == "hoeffding":
        result = hoeffding_ucb(x, support, alpha)
    elif method == "maurer-pontil":
        result = maurer_pontil_ucb(x, support, alpha)
    elif method == "student-t":
        result = student_t_ucb(x, alpha)
    elif method == "clopper-pearson":
        result = clopper_pearson_ucb(x, alpha)
    else:
        result = anderson_ucb(x, support, envelope)
    _print_result(result, x.n, args.json)
    return EXIT_OK


def _json_ready(value):
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    return value


def _print_result(result: BoundResult, n: int, as_json: bool) -> None:
    if as_json:
        record = {
            "schema_version": 1,
            "value": result.value,
            "method": result.method,
            "side": result.side,
            "alpha": result.alpha,
            "n": n,
            "diagnostics": {k: _json_ready(v)
                            for k, v in sorted(result.diagnostics.items())},
        }
        print(json.dumps(record, sort_keys=True))
        return
    print(f"value {result.value:.6f}")
    print(f"method {result.method}")
    print(f"side {result.side}")
    print(f"alpha {result.alpha}")
    print(f"n {n}")
    for key in sorted(result.diagnostics):
        if key != "n":
            print(f"{key} {_json_ready(result.diagnostics[key])}")


def _write_out(path: str, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")


def cmd_beta_n(args) -> int:
    alpha = _check_alpha(args.alpha)
    if args.n < 1:
        raise _ValidationError(f"--n must be >= 1, got {args.n}")
    if args.mc < 1:
        raise _ValidationError(f"--mc must be >= 1, got {args.mc}")
    est = estimate_beta_n(args.n, alpha, args.mc, args.seed)
    row = f"{est.n},{est.alpha!r},{est.mc_samples},{est.seed},{est.value!r}"
    _write_out(args.out, BETA_HEADER + "\n" + row + "\n")
    print(f"beta_n {est.value:.6f}")
    return EXIT_OK


def cmd_table(args) -> int:
    alpha = _check_alpha(args.alpha)
    if args.n < 1:
        raise _ValidationError(f"--n must be >= 1, got {args.n}")
    support = _parse_support(args)
    envelope = None
    if args.kind == "anderson":
        envelope = _envelope_for(args.n, alpha, args.beta_mc, args.seed)
    if args.binary:
        if not support.is_two_ended:
            raise _ValidationError("--binary needs a two-ended --support")
        a, b = support.lower, support.upper
        grid = a + (b - a) * np.arange(args.n + 1) / args.n
    else:
        if args.t_min is None or args.t_max is None:
            raise _ValidationError(
                "--t-min and --t-max are required without --binary")
        if not args.t_min <= args.t_max:
            raise _ValidationError("--t-min must be <= --t-max")
        if args.t_count < 1:
            raise _ValidationError("--t-count must be >= 1")
        grid = np.linspace(args.t_min, args.t_max, args.t_count)
    table = bound_table(grid, args.n, support, alpha, kind=args.kind,
                        mc_samples=args.mc_samples, seed=args.seed,
                        envelope=envelope, binary=args.binary)
    _write_out(args.out, table.to_csv())
    print(f"rows {table.t_values.size}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    try:
        spec = load_spec(args.config)
    except OSError as exc:
        raise _ValidationError(f"cannot read --config file: {exc}") from exc
    rows = run_experiment(spec)
    _write_out(args.out, rows_to_csv(rows))
    print(f"rows {len(rows)}")
    return EXIT_OK


def cmd_demo_lognormal(args) -> int:
    rows = lognormal_skew_demo(args.n, trials=args.trials, seed=args.seed,
                               bins=args.bins)
    _write_out(args.out, histogram_to_csv(rows))
    print(f"rows {len(rows)}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNWRITABLE


if __name__ == "__main__":
    sys.exit(main())
