"""Ground truth: direct measure evaluation, full enumeration, Monte Carlo.

The enumeration oracle weighs every subset by its exact probability and is
limited to ``n <= 20``. The Monte Carlo "sampling method" is the baseline
ecologists use: draw subsets, evaluate, report sample mean and variance.
"""

from __future__ import annotations

import enum
import itertools
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy.spatial import ConvexHull
from scipy.spatial.distance import pdist

from .geometry import GeometryError, PointSet, coords_of
from .models import (
    BernoulliModel,
    DistributionSpec,
    FixedSizeModel,
    ModelError,
    MomentResult,
    check_distribution,
    sample_masks,
)

ORACLE_MAX_N = 20
DEFAULT_SAMPLES = 1000
_MC_BATCH = 250


class MeasureKind(str, enum.Enum):
    BBOX = "bbox"
    HULL = "hull"
    CENTROID = "centroid"
    MPD = "mpd"
    SED = "sed"


class ScopeError(ValueError):
    """A measure/distribution/method combination outside the supported scope."""


def check_scope(kind: MeasureKind, dist: DistributionSpec, d: int, allow_bernoulli_mpd: bool = False):
    kind = MeasureKind(kind)
    if kind is MeasureKind.CENTROID and isinstance(dist, BernoulliModel):
        raise ScopeError("centroid distance is defined for the fixed-size model only")
    if kind is MeasureKind.MPD and isinstance(dist, BernoulliModel) and not allow_bernoulli_mpd:
        raise ScopeError("MPD requires the fixed-size model")
    if kind is MeasureKind.SED and d != 2:
        raise ScopeError(f"smallest enclosing disk is planar; got d = {d}")
    if kind is MeasureKind.HULL and d > 3:
        raise ScopeError(f"oracle hull volume supports d <= 3; got d = {d}")


# -- measures ---------------------------------------------------------------


def bbox_volume(pts: np.ndarray) -> float:
    if pts.shape[0] <= 1:
        return 0.0
    return float(np.prod(pts.max(axis=0) - pts.min(axis=0)))


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _hull_area_2d(pts: np.ndarray) -> float:
    # Andrew's monotone chain, then shoelace.
    order = sorted(map(tuple, pts))
    lower: list = []
    for p in order:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in reversed(order):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    ring = lower[:-1] + upper[:-1]
    area = 0.0
    for (x0, y0), (x1, y1) in zip(ring, ring[1:] + ring[:1]):
        area += x0 * y1 - x1 * y0
    return abs(area) / 2.0


def hull_volume(pts: np.ndarray) -> float:
    m, d = pts.shape
    if m <= d:
        return 0.0
    if d == 1:
        return float(pts.max() - pts.min())
    if d == 2:
        return _hull_area_2d(pts)
    if d == 3:
        return float(ConvexHull(pts).volume)
    raise GeometryError(f"oracle hull volume supports d <= 3; got d = {d}")


def centroid_sq_distance(pts: np.ndarray) -> float:
    if pts.shape[0] == 0:
        return 0.0
    c = pts.mean(axis=0)
    return float(((pts - c) ** 2).sum() / pts.shape[0])


def mean_pairwise_distance(pts: np.ndarray, allow_small: bool = False) -> float:
    m = pts.shape[0]
    if m < 2:
        if allow_small:
            return 0.0
        raise ModelError("MPD needs at least two points")
    return float(pdist(pts).sum() * 2.0 / (m * (m - 1)))


def _disk_from(boundary: list) -> tuple[np.ndarray, float]:
    if not boundary:
        return np.zeros(2), -1.0
    if len(boundary) == 1:
        return np.asarray(boundary[0], dtype=float), 0.0
    if len(boundary) == 2:
        a, b = (np.asarray(v, dtype=float) for v in boundary)
        c = (a + b) / 2.0
        return c, float(np.linalg.norm(a - c))
    a, b, c = (np.asarray(v, dtype=float) for v in boundary)
    bx, by = b - a
    cx, cy = c - a
    den = 2.0 * (bx * cy - by * cx)
    bb, cc = bx * bx + by * by, cx * cx + cy * cy
    ux = (cy * bb - by * cc) / den
    uy = (bx * cc - cx * bb) / den
    return a + np.array([ux, uy]), math.hypot(ux, uy)


def _inside(center, radius, p) -> bool:
    return math.hypot(p[0] - center[0], p[1] - center[1]) <= radius * (1.0 + 1e-12) + 1e-15


def minidisk(pts: np.ndarray) -> tuple[np.ndarray, float]:
    """Smallest enclosing disk: Welzl's incremental algorithm unrolled into
    three nested loops, over a fixed-seed shuffle (expected linear time)."""
    order = np.random.default_rng(0x5EED).permutation(pts.shape[0])
    P = [tuple(p) for p in pts[order]]
    if not P:
        return np.zeros(2), 0.0
    center, r = _disk_from([P[0]])
    for i in range(1, len(P)):
        if _inside(center, r, P[i]):
            continue
        center, r = _disk_from([P[i]])
        for j in range(i):
            if _inside(center, r, P[j]):
                continue
            center, r = _disk_from([P[i], P[j]])
            for k in range(j):
                if not _inside(center, r, P[k]):
                    center, r = _disk_from([P[i], P[j], P[k]])
    return center, r


def sed_diameter(pts: np.ndarray) -> float:
    if pts.shape[0] <= 1:
        return 0.0
    return 2.0 * minidisk(pts)[1]


def eval_measure(kind: MeasureKind, pts, allow_small: bool = False) -> float:
    """Evaluate a measure on one explicit subset (an ``(m, d)`` array)."""
    pts = np.asarray(pts, dtype=np.float64)
    if pts.ndim != 2:
        raise GeometryError("subset must be an (m, d) array")
    kind = MeasureKind(kind)
    if kind is MeasureKind.BBOX:
        return bbox_volume(pts)
    if kind is MeasureKind.HULL:
        return hull_volume(pts)
    if kind is MeasureKind.CENTROID:
        return centroid_sq_distance(pts)
    if kind is MeasureKind.MPD:
        return mean_pairwise_distance(pts, allow_small=allow_small)
    if pts.shape[1] != 2:
        raise GeometryError("smallest enclosing disk is planar")
    return sed_diameter(pts)


# -- enumeration ------------------------------------------------------------


def subset_masks(n: int) -> np.ndarray:
    """Membership matrix of all ``2**n`` subsets; row ``m`` is bitmask ``m``."""
    m = np.arange(1 << n, dtype=np.int64)
    return (m[:, None] >> np.arange(n, dtype=np.int64)) & 1 == 1


def subset_value_table(points, kind, only_size: int | None = None) -> np.ndarray:
    """``M(Q)`` for every subset ``Q``, indexed by bitmask. Degenerate subsets
    (too small for the measure) evaluate to 0. With ``only_size`` the
    per-subset measures (hull, SED) skip subsets of any other size."""
    kind = MeasureKind(kind)
    coords = coords_of(points)
    n, d = coords.shape
    if n > ORACLE_MAX_N:
        raise ModelError(f"oracle enumerates subsets; n = {n} exceeds the cap of {ORACLE_MAX_N}")
    masks = subset_masks(n)
    size = masks.sum(axis=1)
    if kind is MeasureKind.BBOX:
        hi = np.where(masks[:, :, None], coords[None], -np.inf).max(axis=1)
        lo = np.where(masks[:, :, None], coords[None], np.inf).min(axis=1)
        with np.errstate(invalid="ignore"):
            vol = np.prod(hi - lo, axis=1)
        return np.where(size >= 2, vol, 0.0)
    if kind is MeasureKind.CENTROID:
        w = masks.astype(np.float64)
        sq = w @ (coords**2).sum(axis=1)
        lin = w @ coords
        with np.errstate(invalid="ignore", divide="ignore"):
            val = sq / size - (lin**2).sum(axis=1) / size**2
        return np.where(size >= 1, val, 0.0)
    if kind is MeasureKind.MPD:
        w = masks.astype(np.float64)
        dist = np.sqrt(((coords[:, None, :] - coords[None, :, :]) ** 2).sum(axis=-1))
        total = np.einsum("mi,ij,mj->m", w, dist, w)
        with np.errstate(invalid="ignore", divide="ignore"):
            val = total / (size * (size - 1.0))
        return np.where(size >= 2, val, 0.0)
    check_scope(kind, FixedSizeModel(0), d)
    out = np.zeros(1 << n)
    for m in range(1 << n):
        if only_size is not None and size[m] != only_size:
            continue
        if size[m] > (1 if kind is MeasureKind.SED else d):
            out[m] = eval_measure(kind, coords[masks[m]])
    return out


def subset_probabilities(n: int, dist: DistributionSpec) -> np.ndarray:
    """``P[S = Q]`` for every bitmask ``Q``."""
    masks = subset_masks(n)
    if isinstance(dist, FixedSizeModel):
        hit = masks.sum(axis=1) == dist.s
        return np.where(hit, 1.0 / math.comb(n, dist.s), 0.0)
    p = dist.probs
    return np.prod(np.where(masks, p, 1.0 - p), axis=1)


def moments_from_table(values: np.ndarray, weights: np.ndarray) -> tuple[float, float, bool]:
    m1 = float(np.dot(weights, values))
    # two-pass form: no cancellation between E[M^2] and E[M]^2
    var = float(np.dot(weights, (values - m1) ** 2))
    return m1, var, False


def oracle_moments(
    points,
    dist: DistributionSpec,
    kind,
    allow_bernoulli_mpd: bool = False,
    table: np.ndarray | None = None,
) -> MomentResult:
    """Exact mean and variance by enumerating every subset.

    ``table`` may carry a precomputed :func:`subset_value_table` so several
    distributions can share one pass over the subsets.
    """
    kind = MeasureKind(kind)
    coords = coords_of(points)
    n, d = coords.shape
    if n > ORACLE_MAX_N:
        raise ModelError(f"oracle enumerates subsets; n = {n} exceeds the cap of {ORACLE_MAX_N}")
    check_distribution(dist, n)
    check_scope(kind, dist, d, allow_bernoulli_mpd)
    if kind is MeasureKind.MPD and isinstance(dist, FixedSizeModel) and dist.s < 2:
        raise ModelError("MPD needs s >= 2")
    start = time.perf_counter()
    if table is None:
        only = dist.s if isinstance(dist, FixedSizeModel) else None
        table = subset_value_table(coords, kind, only_size=only)
    mean, var, clamped = moments_from_table(table, subset_probabilities(n, dist))
    return MomentResult(
        mean=mean,
        variance=var,
        method="oracle",
        measure=kind.value,
        distribution=dist.name,
        n=n,
        d=d,
        s=dist.s if isinstance(dist, FixedSizeModel) else None,
        elapsed_ms=(time.perf_counter() - start) * 1e3,
        clamped=clamped,
    )


def oracle_per_s(points, kind, table: np.ndarray | None = None) -> np.ndarray:
    """Fixed-size oracle rows ``(s, mean, variance)`` for every ``s in 0..n``."""
    coords = coords_of(points)
    n = coords.shape[0]
    if table is None:
        table = subset_value_table(coords, kind)
    size = subset_masks(n).sum(axis=1)
    rows = np.zeros((n + 1, 3))
    for s in range(n + 1):
        w = np.where(size == s, 1.0 / math.comb(n, s), 0.0)
        mean, var, _ = moments_from_table(table, w)
        rows[s] = (s, mean, var)
    return rows


# -- Monte Carlo ------------------------------------------------------------


def _worker_count() -> int:
    raw = os.environ.get("GEOMOMENTS_THREADS", "0").strip() or "0"
    try:
        k = int(raw)
    except ValueError:
        k = 0
    return k if k > 0 else (os.cpu_count() or 1)


def _batch_stats(coords, dist, kind, rng, count, table):
    n = coords.shape[0]
    masks = sample_masks(n, dist, rng, count)
    values = np.empty(count)
    if table is not None:
        keys = masks.astype(np.int64) @ (np.int64(1) << np.arange(n, dtype=np.int64))
        values = table[keys]
    else:
        for r in range(count):
            values[r] = eval_measure(kind, coords[masks[r]], allow_small=True)
    mean = float(values.mean())
    m2 = float(((values - mean) ** 2).sum())
    return count, mean, m2


def _merge(a, b):
    # Chan et al. pairwise combination of (count, mean, M2).
    na, ma, sa = a
    nb, mb, sb = b
    n = na + nb
    delta = mb - ma
    return n, ma + delta * nb / n, sa + sb + delta * delta * na * nb / n


def monte_carlo_moments(
    points,
    dist: DistributionSpec,
    kind,
    num_samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
    table: np.ndarray | None = None,
    workers: int | None = None,
    allow_bernoulli_mpd: bool = False,
) -> MomentResult:
    """Sample mean and unbiased sample variance over ``num_samples`` draws.

    Draws are split into fixed batches seeded by ``SeedSequence(seed).spawn``,
    so the result depends only on ``seed``, never on the worker count. For small
    ``n`` a :func:`subset_value_table` can replace per-draw evaluation; the
    draws, and hence the estimate, are unchanged.
    """
    kind = MeasureKind(kind)
    coords = coords_of(points)
    n, d = coords.shape
    if num_samples < 2:
        raise ModelError("need at least two samples")
    check_distribution(dist, n)
    check_scope(kind, dist, d, allow_bernoulli_mpd)
    if kind is MeasureKind.MPD and isinstance(dist, FixedSizeModel) and dist.s < 2:
        raise ModelError("MPD needs s >= 2")
    start = time.perf_counter()
    sizes = [_MC_BATCH] * (num_samples // _MC_BATCH)
    if num_samples % _MC_BATCH:
        sizes.append(num_samples % _MC_BATCH)
    seeds = np.random.SeedSequence(seed).spawn(len(sizes))
    jobs = [(np.random.default_rng(ss), size) for ss, size in zip(seeds, sizes)]
    workers = workers or _worker_count()
    if workers > 1 and table is None and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda job: _batch_stats(coords, dist, kind, job[0], job[1], None), jobs))
    else:
        parts = [_batch_stats(coords, dist, kind, rng, size, table) for rng, size in jobs]
    total = parts[0]
    for part in parts[1:]:
        total = _merge(total, part)
    count, mean, m2 = total
    return MomentResult(
        mean=mean,
        variance=m2 / (count - 1),
        method="sample",
        measure=kind.value,
        distribution=dist.name,
        n=n,
        d=d,
        s=dist.s if isinstance(dist, FixedSizeModel) else None,
        samples=num_samples,
        seed=seed,
        elapsed_ms=(time.perf_counter() - start) * 1e3,
    )


__all__ = [
    "MeasureKind",
    "ScopeError",
    "eval_measure",
    "oracle_moments",
    "monte_carlo_moments",
    "minidisk",
    "subset_value_table",
    "oracle_per_s",
    "PointSet",
]
