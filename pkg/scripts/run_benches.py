#!/usr/bin/env python3
"""Run every bench suite into results/<suite>/ (runs.csv, summary.csv).

    python3 scripts/run_benches.py            # full grids, ~tens of minutes
    python3 scripts/run_benches.py --quick    # small grids, under a minute
"""

import argparse
from pathlib import Path

from geomoments.bench import SUITES, BenchConfig, run_suite


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="results")
    ap.add_argument("--suite", action="append", choices=SUITES, help="repeatable; default all")
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--samples", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--quick", action="store_true")
    args = ap.parse_args()
    cfg = BenchConfig(repeats=args.repeats, samples=args.samples, seed=args.seed, quick=args.quick)
    for name in args.suite or SUITES:
        run_suite(name, Path(args.out) / name, cfg)


if __name__ == "__main__":
    main()
