"""``geomoments`` command line.

Exit codes: 0 success, 1 data error (unreadable or degenerate input),
2 usage or scope error (flag combination no engine supports).
"""

from __future__ import annotations

import argparse
import sys

from .dataio import DataError, generate, read_csv, write_csv, write_result
from .engines import DEFAULT_EPSILON, compute_moments
from .geometry import GeometryError
from .models import BernoulliModel, FixedSizeModel, ModelError
from .oracle import DEFAULT_SAMPLES, ORACLE_MAX_N, ScopeError, check_scope, monte_carlo_moments, oracle_moments

EXIT_OK, EXIT_DATA, EXIT_USAGE = 0, 1, 2
MEASURES = ("bbox", "hull", "centroid", "mpd", "sed")


class UsageError(Exception):
    pass


def _flags(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k != "func" and v is not None}


def _load(args):
    data = read_csv(args.input)
    if args.dist == "fixed":
        if args.s is None:
            if getattr(args, "all_s", False):
                return data, FixedSizeModel(data.n)
            raise UsageError("--dist fixed needs --s N" + (" or --all-s" if hasattr(args, "all_s") else ""))
        return data, FixedSizeModel(args.s)
    if args.s is not None:
        raise UsageError("--s applies to --dist fixed only")
    if data.probs is not None:
        return data, BernoulliModel(data.probs)
    if args.prob is None:
        raise DataError(f"{args.input} has no prob column; pass --prob P")
    return data, BernoulliModel.uniform(data.n, args.prob)


def _add_input(p: argparse.ArgumentParser, s_help: str = "subset size (fixed-size model)"):
    p.add_argument("--input", required=True, help="CSV with header x1,...,xd[,prob]")
    p.add_argument("--measure", required=True, choices=MEASURES)
    p.add_argument("--dist", required=True, choices=("bernoulli", "fixed"))
    p.add_argument("--s", type=int, help=s_help)
    p.add_argument("--prob", type=float, help="inclusion probability when the file has no prob column")
    p.add_argument("--out", default="-", help="output path, '-' for stdout")
    p.add_argument("--format", default="json", choices=("json", "csv"))


def cmd_moments(args) -> int:
    if args.epsilon is not None and args.method != "approx":
        raise UsageError("--epsilon applies to --method approx only")
    if args.all_s and args.s is not None:
        raise UsageError("--s and --all-s are mutually exclusive")
    data, dist = _load(args)
    eps = args.epsilon if args.epsilon is not None else (DEFAULT_EPSILON if args.method == "approx" else None)
    if args.method == "approx":
        args.epsilon = eps
    res = compute_moments(data.coords, args.measure, dist, args.method, eps, args.all_s)
    write_result(res, args.format, args.out, _flags(args))
    return EXIT_OK


def cmd_oracle(args) -> int:
    data, dist = _load(args)
    if data.n > ORACLE_MAX_N:
        raise UsageError(f"oracle enumerates all subsets; n = {data.n} exceeds the cap of {ORACLE_MAX_N}")
    check_scope(args.measure, dist, data.dim)
    res = oracle_moments(data.coords, dist, args.measure)
    write_result(res, args.format, args.out, _flags(args))
    return EXIT_OK


def cmd_sample(args) -> int:
    if args.samples < 2:
        raise UsageError("--samples must be at least 2")
    data, dist = _load(args)
    check_scope(args.measure, dist, data.dim)
    res = monte_carlo_moments(data.coords, dist, args.measure, args.samples, args.seed)
    write_result(res, args.format, args.out, _flags(args))
    return EXIT_OK


def cmd_gen(args) -> int:
    if args.n < 1 or args.d < 1:
        raise UsageError("--n and --d must be positive")
    data = generate(args.kind, args.n, args.d, args.seed, k=args.k, spread=args.spread, prob=args.prob)
    write_csv(data, args.out)
    return EXIT_OK


def cmd_bench(args) -> int:
    from .bench import BenchConfig, run_suite

    cfg = BenchConfig(repeats=args.repeats, samples=args.samples, seed=args.seed, quick=args.quick)
    run_suite(args.suite, args.out, cfg)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="geomoments", description="Moments of geometric measures on random subsets")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("moments", help="analytic engines")
    _add_input(p)
    p.add_argument("--all-s", action="store_true", help="emit the per-s table (bbox fixed, centroid, mpd)")
    p.add_argument("--method", default="exact", choices=("exact", "approx"))
    p.add_argument("--epsilon", type=float, help=f"approximation parameter (default {DEFAULT_EPSILON})")
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("oracle", help=f"full enumeration, n <= {ORACLE_MAX_N}")
    _add_input(p)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("sample", help="Monte Carlo sampling baseline")
    _add_input(p)
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("gen", help="synthetic point sets")
    p.add_argument("--kind", default="uniform-cube", choices=("uniform-cube", "clustered"))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--k", type=int, default=5, help="clusters (clustered)")
    p.add_argument("--spread", type=float, default=0.05, help="cluster standard deviation (clustered)")
    p.add_argument("--prob", type=float, help="attach a constant prob column")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="timing and error grids")
    p.add_argument("--suite", required=True, choices=("mpd-vs-n", "mpd-vs-s", "mpd-vs-eps", "mpd-vs-d", "bbox-vs-n"))
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--quick", action="store_true", help="small grid for smoke runs")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors with code 2
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (UsageError, ScopeError) as err:
        print(f"geomoments: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, GeometryError, ModelError, FileNotFoundError, OSError) as err:
        print(f"geomoments: {err}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
