"""CSV ingest, synthetic point generators and result serialization.

Input CSV: header ``x1,...,xd`` optionally followed by ``prob``; one point per
row. Generators use numpy's PCG64 bit generator (``default_rng(seed)``), so a
seed fixes the stream on every platform numpy supports.

JSON results carry the fields, in this order::

    measure, distribution, method, n, d, s?, epsilon?, samples?, seed?,
    mean, variance?, per_s?, elapsed_ms, flags?

Optional fields are omitted when unset. ``per_s`` rows are ``[s, mean,
variance]`` or ``[s, mean]`` for mean-only engines. Floats are written with
``repr`` and read back bit-exactly.
"""

from __future__ import annotations

import csv
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .geometry import GeneralPositionError, PointSet
from .models import BernoulliModel, MomentResult


class DataError(ValueError):
    """Malformed input file; the message names the offending row/column."""


@dataclass(frozen=True)
class Dataset:
    points: PointSet
    probs: Optional[np.ndarray] = None
    source: str = ""
    seed: Optional[int] = None
    params: dict = field(default_factory=dict)

    @property
    def coords(self) -> np.ndarray:
        return self.points.coords

    @property
    def n(self) -> int:
        return self.points.n

    @property
    def dim(self) -> int:
        return self.points.dim

    def bernoulli(self) -> BernoulliModel:
        if self.probs is None:
            raise DataError(f"{self.source or 'dataset'} has no prob column")
        return BernoulliModel(self.probs)


def _parse_float(text: str, row: int, col: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise DataError(f"row {row}, column {col}: cannot parse {text!r} as a number") from None
    if not math.isfinite(value):
        raise DataError(f"row {row}, column {col}: non-finite value {text!r}")
    return value


def read_csv(path) -> Dataset:
    """Rows are numbered from 1 (the first data row); the header is row 0."""
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        has_prob = bool(header) and header[-1] == "prob"
        names = header[:-1] if has_prob else header
        expected = [f"x{i + 1}" for i in range(len(names))]
        if not names or names != expected:
            raise DataError(f"{path}: header must be x1,...,xd[,prob]; got {','.join(header)}")
        coords, probs = [], []
        for row, fields in enumerate(reader, start=1):
            if not fields or all(not f.strip() for f in fields):
                continue
            if len(fields) != len(header):
                raise DataError(f"row {row}: expected {len(header)} columns, found {len(fields)}")
            coords.append([_parse_float(f, row, c) for f, c in zip(fields, names)])
            if has_prob:
                p = _parse_float(fields[-1], row, "prob")
                if not 0.0 < p < 1.0:
                    raise DataError(f"row {row}, column prob: {p!r} is not inside (0, 1)")
                probs.append(p)
    if not coords:
        raise DataError(f"{path}: no data rows")
    arr = np.array(coords, dtype=np.float64)
    try:
        points = PointSet(arr, check="coords")
    except GeneralPositionError as err:
        i, j = err.rows
        axis = int(np.argmax(arr[i] == arr[j]))
        raise GeneralPositionError(
            f"{path}: rows {i + 1} and {j + 1} share coordinate x{axis + 1} = {float(arr[i, axis])!r}"
            " (general position requires distinct coordinates)",
            (i + 1, j + 1),
        ) from None
    prob_arr = np.array(probs, dtype=np.float64) if has_prob else None
    if prob_arr is not None:
        prob_arr.setflags(write=False)
    return Dataset(points, prob_arr, source=str(path))


def write_csv(dataset: Dataset, path) -> None:
    d = dataset.dim
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([f"x{i + 1}" for i in range(d)] + (["prob"] if dataset.probs is not None else []))
        for k, row in enumerate(dataset.coords):
            extra = [repr(float(dataset.probs[k]))] if dataset.probs is not None else []
            w.writerow([repr(float(v)) for v in row] + extra)


# -- generators ---------------------------------------------------------------------


def _break_ties(coords: np.ndarray, rng: np.random.Generator, scale: float = 1e-9) -> np.ndarray:
    for axis in range(coords.shape[1]):
        while True:
            col = coords[:, axis]
            order = np.argsort(col, kind="stable")
            dup = np.nonzero(np.diff(col[order]) == 0)[0]
            if not dup.size:
                break
            hit = order[dup + 1]
            coords[hit, axis] += rng.uniform(-scale, scale, size=hit.shape[0])
    return coords


def generate(kind: str, n: int, d: int, seed: int = 0, k: int = 5, spread: float = 0.05, prob=None) -> Dataset:
    """``uniform-cube``: i.i.d. uniform on ``[0, 1]^d``. ``clustered``: ``k``
    Gaussian blobs of standard deviation ``spread`` around uniform centres.
    ``prob`` (a float) attaches a constant Bernoulli column."""
    if n < 1 or d < 1:
        raise ValueError("generate needs n >= 1 and d >= 1")
    rng = np.random.default_rng(seed)
    if kind == "uniform-cube":
        coords = rng.random((n, d))
        params = {}
    elif kind == "clustered":
        centres = rng.random((k, d))
        label = rng.integers(0, k, size=n)
        coords = centres[label] + spread * rng.standard_normal((n, d))
        params = {"k": k, "spread": spread}
    else:
        raise ValueError(f"unknown generator {kind!r}; use uniform-cube or clustered")
    coords = _break_ties(coords, rng)
    probs = None if prob is None else np.full(n, float(prob))
    return Dataset(PointSet(coords, check="coords"), probs, source=kind, seed=seed, params=params)


# -- results ------------------------------------------------------------------------


def result_dict(result: MomentResult, flags: Optional[dict] = None) -> dict:
    out: dict = {
        "measure": result.measure,
        "distribution": result.distribution,
        "method": result.method,
        "n": int(result.n),
        "d": int(result.d),
    }
    if result.s is not None:
        out["s"] = int(result.s)
    if result.epsilon is not None:
        out["epsilon"] = float(result.epsilon)
    if result.samples is not None:
        out["samples"] = int(result.samples)
    if result.seed is not None:
        out["seed"] = int(result.seed)
    out["mean"] = float(result.mean)
    if result.variance is not None and not math.isnan(result.variance):
        out["variance"] = float(result.variance)
    if result.per_s is not None:
        rows = []
        for s, mean, var in result.per_s:
            row = [int(s), float(mean)]
            if not math.isnan(var):
                row.append(float(var))
            rows.append(row)
        out["per_s"] = rows
    out["elapsed_ms"] = float(result.elapsed_ms)
    if flags:
        out["flags"] = flags
    return out


def _csv_rows(result: MomentResult):
    meta = [result.measure, result.distribution, result.method, result.n, result.d]
    eps = "" if result.epsilon is None else repr(float(result.epsilon))
    samples = "" if result.samples is None else result.samples
    seed = "" if result.seed is None else result.seed
    tail = [eps, samples, seed]
    if result.per_s is None:
        var = "" if result.variance is None or math.isnan(result.variance) else repr(float(result.variance))
        s = "" if result.s is None else result.s
        yield meta + [s, repr(float(result.mean)), var] + tail
        return
    for s, mean, var in result.per_s:
        yield meta + [int(s), repr(float(mean)), "" if math.isnan(var) else repr(float(var))] + tail


CSV_HEADER = ["measure", "distribution", "method", "n", "d", "s", "mean", "variance", "epsilon", "samples", "seed"]


def write_result(result: MomentResult, fmt: str, path, flags: Optional[dict] = None) -> None:
    """``fmt`` is ``json`` or ``csv``; ``path`` of ``-`` writes to stdout."""
    if fmt == "json":
        text = json.dumps(result_dict(result, flags), indent=2) + "\n"
    elif fmt == "csv":
        lines = [",".join(CSV_HEADER)]
        lines += [",".join(str(v) for v in row) for row in _csv_rows(result)]
        text = "\n".join(lines) + "\n"
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def read_result(path) -> MomentResult:
    """Inverse of ``write_result(..., "json", ...)`` (flags are dropped)."""
    data = json.loads(Path(path).read_text())
    per_s = None
    if "per_s" in data:
        per_s = np.array([row + [math.nan] * (3 - len(row)) for row in data["per_s"]], dtype=np.float64)
    return MomentResult(
        mean=data["mean"],
        variance=data.get("variance"),
        per_s=per_s,
        method=data["method"],
        measure=data["measure"],
        distribution=data["distribution"],
        n=data["n"],
        d=data["d"],
        s=data.get("s"),
        epsilon=data.get("epsilon"),
        samples=data.get("samples"),
        seed=data.get("seed"),
        elapsed_ms=data["elapsed_ms"],
    )
