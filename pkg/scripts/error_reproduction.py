#!/usr/bin/env python3
"""Relative error of the WSPD approximation against the exact engine on
uniform-cube data, over a grid of eps and seeds (mean and variance at s).

    python3 scripts/error_reproduction.py --n 2000 --d 3 --s 420
"""

import argparse

import numpy as np

from geomoments.dataio import generate
from geomoments.mpd import mpd_approx_moments, mpd_exact_moments


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=2000)
    ap.add_argument("--d", type=int, default=3)
    ap.add_argument("--s", type=int, default=420)
    ap.add_argument("--seeds", type=int, default=3)
    ap.add_argument("--eps", type=float, nargs="+", default=[0.5, 0.25, 0.1, 0.05])
    args = ap.parse_args()
    print(f"{'eps':>6} {'seed':>4} {'err_mean':>9} {'err_var':>9}")
    for eps in args.eps:
        errs = []
        for seed in range(args.seeds):
            pts = generate("uniform-cube", args.n, args.d, seed).coords
            ex = mpd_exact_moments(pts, args.s)
            ap_ = mpd_approx_moments(pts, eps, args.s)
            em = abs(ap_.mean - ex.mean) / ex.mean
            ev = abs(ap_.variance - ex.variance) / ex.variance
            errs.append((em, ev))
            print(f"{eps:>6.2f} {seed:>4d} {em:>9.2%} {ev:>9.2%}")
        m = np.mean(errs, axis=0)
        print(f"{eps:>6.2f} mean {m[0]:>9.2%} {m[1]:>9.2%}")


if __name__ == "__main__":
    main()
