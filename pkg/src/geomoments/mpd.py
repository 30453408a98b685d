"""Mean pairwise distance under the fixed-size model: exact moments for every
``s`` from one ``O(n^2)`` pass, and the WSPD approximation.

Both engines reduce to four aggregates over a pairwise "distance" ``delta``
(exact or ball distance)::

    D1 = sum_{p<q} delta,  D2 = sum_{p<q} delta^2,
    W_p = sum_{q != p} delta(p, q),  SUMSQ = sum_p W_p^2

``MPD(S)^2 (s(s-1))^2`` is a sum over ordered pairs of ordered pairs of
selected points; splitting by how many indices coincide gives

    identical pair          4 * D2                       (2 distinct points)
    one shared point        4 * Sum2, Sum2 = SUMSQ - 2 D2   (3 distinct)
    all four distinct       Sum1 = 4 D1^2 - 4 D2 - 4 Sum2  (4 distinct)

and a block with ``j`` distinct points is selected with probability
``C(n-j, s-j)/C(n, s)``.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .geometry import coords_of
from .models import ModelError, MomentResult, clamp_variance_rows, inclusion_ratio
from .wspd import build_split_tree, sum_per_point, wspd_pairs

_BLOCK_ELEMS = 1 << 19  # entries per distance block, independent of n


@dataclass(frozen=True)
class PairAggregates:
    n: int
    d1: float
    d2: float
    sumsq: float

    @property
    def sqp(self) -> float:
        return 2.0 * self.d2

    @property
    def sum2(self) -> float:
        return self.sumsq - 2.0 * self.d2

    @property
    def sum1(self) -> float:
        return 4.0 * self.d1 * self.d1 - 4.0 * self.d2 - 4.0 * self.sum2

    def moments(self, s) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``(mean, second moment, variance)`` at each ``s`` (arrays)."""
        s = np.asarray(s, dtype=np.float64)
        n = self.n
        rho2 = inclusion_ratio(n, 2, s)
        rho3 = inclusion_ratio(n, 3, s) if n >= 3 else np.zeros_like(s)
        rho4 = inclusion_ratio(n, 4, s) if n >= 4 else np.zeros_like(s)
        pairs = s * (s - 1.0)
        mean = 2.0 * self.d1 * rho2 / pairs
        second = (self.sum1 * rho4 + 4.0 * self.sum2 * rho3 + 4.0 * self.d2 * rho2) / (pairs * pairs)
        var, _ = clamp_variance_rows(second - mean * mean, second)
        return mean, second, var


def exact_aggregates(points) -> PairAggregates:
    """One blocked pass over all point pairs."""
    coords = coords_of(points)
    n = coords.shape[0]
    w = np.zeros(n)
    d1 = 0.0
    d2 = 0.0
    rows = max(1, min(n, _BLOCK_ELEMS // max(n, 1)))
    for lo in range(0, n, rows):
        hi = min(n, lo + rows)
        dist2 = cdist(coords[lo:hi], coords, "sqeuclidean")
        dist = np.sqrt(dist2)
        w[lo:hi] = dist.sum(axis=1)
        d1 += float(dist.sum())
        d2 += float(dist2.sum())
    return PairAggregates(n, d1 / 2.0, d2 / 2.0, float(np.dot(w, w)))


def _check(n: int, s: int | None):
    if n < 2:
        raise ModelError("mean pairwise distance needs n >= 2")
    s = n if s is None else int(s)
    if not 2 <= s <= n:
        raise ModelError(f"subset size {s} outside 2..{n}")
    return s


def _result(agg_mean, agg_var, n, d, s, method, eps, start):
    sizes = np.arange(2, n + 1)
    mean, _, _ = agg_mean.moments(sizes)
    if agg_var is None:
        var = np.full_like(mean, np.nan)
    else:
        _, _, var = agg_var.moments(sizes)
        var[-1] = 0.0  # s = n is deterministic
    rows = np.column_stack([sizes, mean, var])
    return MomentResult(
        mean=float(mean[s - 2]),
        variance=None if agg_var is None else float(var[s - 2]),
        per_s=rows,
        method=method,
        measure="mpd",
        distribution="fixed",
        n=n,
        d=d,
        s=s,
        epsilon=eps,
        elapsed_ms=(time.perf_counter() - start) * 1e3,
    )


def mpd_exact_moments(points, s: int | None = None) -> MomentResult:
    """Exact mean and variance for ``s = 2..n``; headline row ``s`` (default ``n``)."""
    coords = coords_of(points)
    n, d = coords.shape
    s = _check(n, s)
    start = time.perf_counter()
    agg = exact_aggregates(coords)
    return _result(agg, agg, n, d, s, "exact", None, start)


def ball_aggregates(points, z: float, tree=None) -> PairAggregates:
    """Aggregates over ``delta_ball`` from a WSPD with separation ``z``; no
    point pair is ever visited."""
    coords = coords_of(points)
    tree = build_split_tree(coords) if tree is None else tree
    pairs = wspd_pairs(tree, z)
    weight = pairs.weight
    d1 = float(np.dot(weight, pairs.delta))
    d2 = float(np.dot(weight, pairs.delta * pairs.delta))
    per_point, _ = sum_per_point(tree, pairs)
    return PairAggregates(coords.shape[0], d1, d2, float(np.dot(per_point, per_point)))


def mpd_approx_moments(points, eps: float = 0.5, s: int | None = None, variance: bool = True) -> MomentResult:
    """WSPD approximation: the mean uses separation ``4/eps`` (so it lies in
    ``[(1 - eps) E, E]``), the variance uses ``8/eps``. ``variance=False``
    skips the second decomposition and reports the mean only."""
    if not 0.0 < eps < 1.0:
        raise ModelError(f"epsilon must lie in (0, 1); got {eps}")
    coords = coords_of(points)
    n, d = coords.shape
    s = _check(n, s)
    start = time.perf_counter()
    tree = build_split_tree(coords)
    agg_mean = ball_aggregates(coords, 4.0 / eps, tree)
    if not variance:
        return _result(agg_mean, None, n, d, s, "approx", float(eps), start)
    agg_var = ball_aggregates(coords, 8.0 / eps, tree)
    return _result(agg_mean, agg_var, n, d, s, "approx", float(eps), start)
