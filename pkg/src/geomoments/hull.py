"""Expected convex-hull volume from signed origin simplices.

With an origin ``O`` outside the hull of ``P``, the hull volume of any subset
is the total volume of simplices ``conv(O, F)`` over its upper facets minus
that over its lower facets. A ``d``-subset ``Z`` spans an upper facet of
``CH(S)`` exactly when ``Z`` is selected and every other selected point lies
on ``O``'s side of the hyperplane through ``Z``; it spans a lower facet when
they all lie on the far side. Summing over all candidate ``Z`` gives the
expectation by linearity.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass

import numpy as np

from .geometry import REL_TOL, GeneralPositionError, GeometryError, coords_of
from .models import BernoulliModel, FixedSizeModel, ModelError, MomentResult, binom_ratio

MAX_DIM = 3
_CHUNK = 20_000


def choose_origin(points) -> np.ndarray:
    """A point strictly below-left of the bounding box (hence outside the
    hull), shifted per axis by an irrational fraction of the box extent so it
    does not fall on any hyperplane spanned by the data by accident."""
    coords = coords_of(points)
    lo = coords.min(axis=0)
    extent = coords.max(axis=0) - lo
    scale = np.where(extent > 0, extent, 1.0)
    frac = np.modf(np.sqrt(2.0) * np.arange(1, coords.shape[1] + 1))[0]
    return lo - scale * (1.0 + 0.5 * frac)


@dataclass(frozen=True)
class FacetCandidate:
    members: tuple[int, ...]
    volume: float  # volume of conv(O, Z)
    same_side: np.ndarray  # indices on the origin's side
    far_side: np.ndarray

    @property
    def n_same(self) -> int:
        return int(self.same_side.shape[0])

    @property
    def n_far(self) -> int:
        return int(self.far_side.shape[0])


def _normals(simplex: np.ndarray) -> np.ndarray:
    """Generalised cross product of the ``d-1`` edge vectors of each facet in
    an ``(m, d, d)`` batch: ``(x - z_0) . normal`` equals
    ``det[z_1 - z_0, ..., z_{d-1} - z_0, x - z_0]``."""
    m, _, d = simplex.shape
    edges = simplex[:, 1:, :] - simplex[:, :1, :]  # (m, d-1, d)
    if d == 1:
        return np.ones((m, 1))
    if d == 2:
        return np.stack([-edges[:, 0, 1], edges[:, 0, 0]], axis=1)
    if d == 3:
        return np.cross(edges[:, 0, :], edges[:, 1, :])
    out = np.empty((m, d))
    for i in range(d):
        minor = np.delete(edges, i, axis=2)
        out[:, i] = (-1) ** (d - 1 + i) * np.linalg.det(minor)
    return out


def _facet_batches(coords: np.ndarray, origin: np.ndarray):
    """Yield ``(members, volume, side)`` chunks, with ``side[m, j]`` = +1 when
    point ``j`` is on the origin's side of facet ``m``, -1 on the far side and
    0 for the facet's own vertices."""
    n, d = coords.shape
    combos = itertools.combinations(range(n), d)
    scale = float(np.max(np.abs(coords - origin))) or 1.0
    while True:
        chunk = np.array(list(itertools.islice(combos, _CHUNK)), dtype=np.intp).reshape(-1, d)
        if chunk.shape[0] == 0:
            return
        simplex = coords[chunk]
        normal = _normals(simplex)
        base = simplex[:, 0, :]
        o_side = np.einsum("md,md->m", origin - base, normal)
        volume = np.abs(o_side) / math.factorial(d)
        raw = np.einsum("mjd,md->mj", coords[None, :, :] - base[:, None, :], normal)
        tol = REL_TOL * np.linalg.norm(normal, axis=1) * scale
        own = np.zeros_like(raw, dtype=bool)
        np.put_along_axis(own, chunk, True, axis=1)
        flat = (np.abs(raw) <= tol[:, None]) & ~own
        if flat.any() or np.any(np.abs(o_side) <= tol):
            m, j = np.argwhere(flat)[0] if flat.any() else (int(np.argmax(np.abs(o_side) <= tol)), -1)
            rows = tuple(int(i) for i in chunk[m]) + ((int(j),) if j >= 0 else ())
            raise GeneralPositionError(f"points {rows} lie on a common hyperplane", rows)
        side = np.where(own, 0, np.where(raw * o_side[:, None] > 0, 1, -1)).astype(np.int8)
        yield chunk, volume, side


def facet_candidates(points, origin=None):
    """Every candidate facet with its origin-simplex volume and side sets."""
    coords = coords_of(points)
    origin = choose_origin(coords) if origin is None else np.asarray(origin, dtype=np.float64)
    for members, volume, side in _facet_batches(coords, origin):
        for m in range(members.shape[0]):
            yield FacetCandidate(
                tuple(int(i) for i in members[m]),
                float(volume[m]),
                np.nonzero(side[m] == 1)[0],
                np.nonzero(side[m] == -1)[0],
            )


def facet_probability(fc: FacetCandidate, dist, n: int) -> tuple[float, float]:
    """``(P[upper facet], P[lower facet])`` of a candidate."""
    d = len(fc.members)
    if isinstance(dist, FixedSizeModel):
        s = dist.s
        if s < d:
            return 0.0, 0.0
        return binom_ratio(fc.n_same, s - d, n, s), binom_ratio(fc.n_far, s - d, n, s)
    p = dist.probs
    sel = float(np.prod(p[list(fc.members)]))
    return sel * float(np.prod(1.0 - p[fc.far_side])), sel * float(np.prod(1.0 - p[fc.same_side]))


# -- aggregation ------------------------------------------------------------


def _side_counts_generic(coords, origin):
    """Volume-weighted histograms over same-side / far-side counts."""
    n, d = coords.shape
    up = np.zeros(n + 1)
    low = np.zeros(n + 1)
    for _, volume, side in _facet_batches(coords, origin):
        np.add.at(up, (side == 1).sum(axis=1), volume)
        np.add.at(low, (side == -1).sum(axis=1), volume)
    return up, low


def _bernoulli_generic(coords, origin, probs):
    log_q = np.log1p(-probs)
    total = 0.0
    for members, volume, side in _facet_batches(coords, origin):
        sel = np.prod(probs[members], axis=1)
        far = np.exp((side == -1) @ log_q)
        same = np.exp((side == 1) @ log_q)
        total += float(np.sum(volume * sel * (far - same)))
    return total


def _radial_sweep(coords, origin):
    """Planar fast path: for each pivot ``i`` sort the others by angle, then
    every directed line ``i -> j`` (``j > i``) reads its left-side count off
    the sorted order. Yields ``(i, js, start, stop, order)`` per pivot, where
    ``order[start:stop]`` (cyclically) are the points left of ``i -> j``."""
    n = coords.shape[0]
    tol = 1e-12
    for i in range(n - 1):
        others = np.delete(np.arange(n), i)
        rel = coords[others] - coords[i]
        theta = np.arctan2(rel[:, 1], rel[:, 0])
        order = np.argsort(theta, kind="stable")
        th = theta[order]
        idx = others[order]
        doubled = np.concatenate([th, th + 2.0 * np.pi])
        pos = np.searchsorted(th, theta, side="right")  # first index past j itself
        stop = np.searchsorted(doubled, theta + np.pi, side="left")
        stop_hi = np.searchsorted(doubled, theta + np.pi, side="right")
        ties = np.searchsorted(th, theta, side="left")
        if np.any(stop != stop_hi) or np.any(pos - ties != 1) or np.any(np.abs(np.diff(doubled)) < tol):
            raise GeneralPositionError(f"collinear triple through point {i}", (i,))
        keep = others > i
        js = others[keep]
        yield i, js, pos[keep], stop[keep], idx


def _hull_2d_radial(coords, origin, probs=None):
    n = coords.shape[0]
    up = np.zeros(n + 1)
    low = np.zeros(n + 1)
    total = 0.0
    log_q = None if probs is None else np.log1p(-probs)
    for i, js, start, stop, idx in _radial_sweep(coords, origin):
        left = stop - start  # strictly left of i -> j
        right = (n - 2) - left
        a = coords[i] - origin
        b = coords[js] - origin
        cross_o = (coords[js, 0] - coords[i, 0]) * (origin[1] - coords[i, 1]) - (
            coords[js, 1] - coords[i, 1]
        ) * (origin[0] - coords[i, 0])
        volume = np.abs(a[0] * b[:, 1] - a[1] * b[:, 0]) / 2.0
        o_left = cross_o > 0
        same = np.where(o_left, left, right)
        far = (n - 2) - same
        if probs is None:
            np.add.at(up, same, volume)
            np.add.at(low, far, volume)
            continue
        cum = np.concatenate([[0.0], np.cumsum(np.concatenate([log_q[idx], log_q[idx]]))])
        log_left = cum[stop] - cum[start]
        log_all = float(log_q.sum() - log_q[i]) - log_q[js]
        log_right = log_all - log_left
        log_same = np.where(o_left, log_left, log_right)
        log_far = np.where(o_left, log_right, log_left)
        sel = probs[i] * probs[js]
        total += float(np.sum(volume * sel * (np.exp(log_far) - np.exp(log_same))))
    return (up, low) if probs is None else total


def _check(coords):
    n, d = coords.shape
    if d > MAX_DIM:
        raise GeometryError(f"hull engine supports d <= {MAX_DIM}; got d = {d}")
    if n < 1:
        raise ModelError("empty point set")


def hull_fixed_per_s(points, origin=None, method: str = "auto") -> np.ndarray:
    """Mean hull volume for every ``s in 0..n`` under the fixed-size model."""
    coords = coords_of(points)
    _check(coords)
    n, d = coords.shape
    origin = choose_origin(coords) if origin is None else np.asarray(origin, dtype=np.float64)
    if d == 2 and method in ("auto", "radial"):
        up, low = _hull_2d_radial(coords, origin)
    else:
        up, low = _side_counts_generic(coords, origin)
    diff = up - low
    m = np.arange(n + 1)
    means = np.zeros(n + 1)
    for s in range(d + 1, n + 1):
        means[s] = float(np.dot(diff, binom_ratio(m, s - d, n, s)))
    return means


def expected_hull_volume(points, dist, origin=None, method: str = "auto") -> MomentResult:
    """Mean hull volume; fixed-size results carry the full per-``s`` table."""
    coords = coords_of(points)
    _check(coords)
    n, d = coords.shape
    origin = choose_origin(coords) if origin is None else np.asarray(origin, dtype=np.float64)
    start = time.perf_counter()
    if isinstance(dist, FixedSizeModel):
        if dist.s > n:
            raise ModelError(f"subset size {dist.s} exceeds n = {n}")
        means = hull_fixed_per_s(coords, origin, method)
        rows = np.column_stack([np.arange(n + 1), means, np.full(n + 1, math.nan)])[1:]
        return MomentResult(
            mean=float(means[dist.s]),
            per_s=rows,
            measure="hull",
            distribution="fixed",
            n=n,
            d=d,
            s=dist.s,
            elapsed_ms=(time.perf_counter() - start) * 1e3,
        )
    if not isinstance(dist, BernoulliModel):
        dist = BernoulliModel(dist)
    if dist.n != n:
        raise ModelError(f"{dist.n} probabilities for {n} points")
    if n <= d:
        mean = 0.0  # no full-dimensional subset; skip the telescoping round-off
    elif d == 2 and method in ("auto", "radial"):
        mean = _hull_2d_radial(coords, origin, dist.probs)
    else:
        mean = _bernoulli_generic(coords, origin, dist.probs)
    return MomentResult(
        mean=float(mean),
        measure="hull",
        distribution="bernoulli",
        n=n,
        d=d,
        elapsed_ms=(time.perf_counter() - start) * 1e3,
    )
