"""Timing and error grids: exact and approximate engines against the sampling
baseline, on synthetic data.

Each suite writes ``runs.csv`` (one row per grid cell and method) and
``summary.csv`` into the output directory and prints the summary. Engine
timings are medians over ``repeats`` runs of the engine call alone; the
sampling baseline is timed once per cell. Every row carries the shell
commands that rebuild its input and rerun the cell.
"""

from __future__ import annotations

import csv
import statistics
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from .bbox import expected_bbox_area_2d_bernoulli
from .dataio import generate
from .models import BernoulliModel, FixedSizeModel
from .mpd import mpd_approx_moments, mpd_exact_moments
from .oracle import monte_carlo_moments

SUITES = ("mpd-vs-n", "mpd-vs-s", "mpd-vs-eps", "mpd-vs-d", "bbox-vs-n")

FIELDS = [
    "suite", "data", "n", "d", "s", "epsilon", "method", "seconds",
    "mean", "variance", "rel_err_mean", "rel_err_var", "command",
]


@dataclass
class BenchConfig:
    repeats: int = 3
    samples: int = 1000
    seed: int = 0
    quick: bool = False
    kind: str = "uniform-cube"
    bbox_prob: float = 0.5


def time_call(fn: Callable, repeats: int = 3):
    """``(median seconds, last result)``."""
    times, out = [], None
    for _ in range(max(1, repeats)):
        start = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - start)
    return statistics.median(times), out


def _rel(value, ref):
    if value is None or ref is None or ref == 0:
        return ""
    return abs(value - ref) / abs(ref)


def _commands(cfg, n, d, s, method=None, eps=None, measure="mpd", dist="fixed", prob=None):
    gen = f"geomoments gen --kind {cfg.kind} --n {n} --d {d} --seed {cfg.seed} --out pts.csv"
    if prob is not None:
        gen += f" --prob {prob}"
    run = f"geomoments moments --input pts.csv --measure {measure} --dist {dist}"
    if s is not None:
        run += f" --s {s}"
    if method == "sample":
        run = run.replace("geomoments moments", "geomoments sample") + f" --samples {cfg.samples} --seed {cfg.seed}"
    elif method == "approx":
        run += f" --method approx --epsilon {eps}"
    return f"{gen} && {run}"


def _mpd_cell(suite, cfg, n, d, s, eps_list, sample=True, exact=True):
    pts = generate(cfg.kind, n, d, cfg.seed).coords
    rows = []
    ref = None
    if exact:
        t, ref = time_call(lambda: mpd_exact_moments(pts, s), cfg.repeats)
        rows.append(_row(suite, cfg, n, d, s, None, "exact", t, ref.mean, ref.variance, None))
    for eps in eps_list:
        t, res = time_call(lambda: mpd_approx_moments(pts, eps, s), cfg.repeats)
        rows.append(_row(suite, cfg, n, d, s, eps, "approx", t, res.mean, res.variance, ref))
    if sample:
        t, res = time_call(lambda: monte_carlo_moments(pts, FixedSizeModel(s), "mpd", cfg.samples, cfg.seed), 1)
        rows.append(_row(suite, cfg, n, d, s, None, "sample", t, res.mean, res.variance, ref))
    return rows


def _row(suite, cfg, n, d, s, eps, method, seconds, mean, var, ref, **cmd):
    return {
        "suite": suite,
        "data": cfg.kind,
        "n": n,
        "d": d,
        "s": "" if s is None else s,
        "epsilon": "" if eps is None else eps,
        "method": method,
        "seconds": seconds,
        "mean": mean,
        "variance": "" if var is None else var,
        "rel_err_mean": _rel(mean, None if ref is None else ref.mean),
        "rel_err_var": _rel(var, None if ref is None else ref.variance),
        "command": _commands(cfg, n, d, s, method, eps, **cmd),
    }


def suite_rows(name: str, cfg: BenchConfig) -> list[dict]:
    rows: list[dict] = []
    if name == "mpd-vs-n":
        ks = range(4) if cfg.quick else range(16)
        for k in ks:
            rows += _mpd_cell(name, cfg, 420 + 500 * k, 3, 420, [0.5])
    elif name == "mpd-vs-s":
        n = 1000 if cfg.quick else 4000
        for s in range(420, n + 1, 500):
            rows += _mpd_cell(name, cfg, n, 3, s, [0.5])
    elif name == "mpd-vs-eps":
        n, s = (500, 200) if cfg.quick else (2000, 500)
        eps = [round(0.05 + 0.05 * k, 2) for k in range(19)]
        rows += _mpd_cell(name, cfg, n, 3, s, eps, sample=False)
    elif name == "mpd-vs-d":
        n, s = (500, 200) if cfg.quick else (2000, 500)
        for d in range(2, 7):
            rows += _mpd_cell(name, cfg, n, d, s, [0.5])
    elif name == "bbox-vs-n":
        sizes = [500, 1000, 2000] if cfg.quick else [1000, 2000, 4000, 8000, 16000]
        for n in sizes:
            pts = generate(cfg.kind, n, 2, cfg.seed).coords
            dist = BernoulliModel.uniform(n, cfg.bbox_prob)
            cmd = {"measure": "bbox", "dist": "bernoulli", "prob": cfg.bbox_prob}
            t, ref = time_call(lambda: expected_bbox_area_2d_bernoulli(pts, dist), cfg.repeats)
            rows.append(_row(name, cfg, n, 2, None, None, "exact", t, ref.mean, None, None, **cmd))
            t, res = time_call(lambda: monte_carlo_moments(pts, dist, "bbox", cfg.samples, cfg.seed), 1)
            rows.append(_row(name, cfg, n, 2, None, None, "sample", t, res.mean, None, ref, **cmd))
    else:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    return rows


def summarize(rows: list[dict]) -> list[dict]:
    out = []
    for method in dict.fromkeys(r["method"] for r in rows):
        sel = [r for r in rows if r["method"] == method]
        errs_m = [r["rel_err_mean"] for r in sel if r["rel_err_mean"] != ""]
        errs_v = [r["rel_err_var"] for r in sel if r["rel_err_var"] != ""]
        out.append(
            {
                "method": method,
                "cells": len(sel),
                "median_seconds": statistics.median(r["seconds"] for r in sel),
                "max_seconds": max(r["seconds"] for r in sel),
                "max_rel_err_mean": max(errs_m) if errs_m else "",
                "max_rel_err_var": max(errs_v) if errs_v else "",
            }
        )
    return out


def _write(path: Path, rows: list[dict], fields) -> None:
    with path.open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=fields)
        w.writeheader()
        w.writerows(rows)


def run_suite(name: str, out_dir, cfg: BenchConfig | None = None) -> tuple[list[dict], list[dict]]:
    cfg = cfg or BenchConfig()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = suite_rows(name, cfg)
    summary = summarize(rows)
    _write(out / "runs.csv", rows, FIELDS)
    _write(out / "summary.csv", summary, list(summary[0]))
    print(f"suite {name}: {len(rows)} runs -> {out / 'runs.csv'}")
    for r in summary:
        em = "" if r["max_rel_err_mean"] == "" else f"{r['max_rel_err_mean']:.2e}"
        ev = "" if r["max_rel_err_var"] == "" else f"{r['max_rel_err_var']:.2e}"
        print(f"  {r['method']:<7} cells={r['cells']:<3} median={r['median_seconds']:.4f}s "
              f"max={r['max_seconds']:.4f}s err_mean={em:<9} err_var={ev}")
    return rows, summary


__all__ = ["BenchConfig", "SUITES", "run_suite", "suite_rows", "summarize", "time_call"]
