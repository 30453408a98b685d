"""Expected diameter of the smallest enclosing disk of a random planar subset.

The smallest enclosing disk is either the diametral disk of two selected
points containing every other selected point, or the circumdisk of an acute
selected triangle containing every other selected point. These events are
disjoint, so the expectation is a sum over candidate disks.

For the three-point candidates fix a pair ``(p, q)`` and rotate so that
``p, q`` sit on the vertical axis symmetric about the origin. Every disk
through ``p`` and ``q`` has its centre ``(c, 0)`` on the horizontal axis, and
a point ``t = (x, y)`` lies inside it exactly when

    c > key(t) = (x^2 + y^2 - h^2) / (2x)   for x > 0
    c < key(t)                              for x < 0

(``h = |pq|/2``), where ``key(t)`` is also the centre of the circumdisk of
``p, q, t``. Sorting the keys therefore gives every inside count by binary
search.
"""

from __future__ import annotations

import time

import numpy as np

from .geometry import GeneralPositionError, GeometryError, coords_of
from .models import BernoulliModel, FixedSizeModel, ModelError, MomentResult, binom_ratio

_TOL = 1e-10


def _frame(coords: np.ndarray, i: int, j: int):
    """``(x, y, h)``: coordinates of every point in the frame of pair ``(i, j)``."""
    p, q = coords[i], coords[j]
    m = (p + q) / 2.0
    u = (q - p) / np.linalg.norm(q - p)
    rel = coords - m
    y = rel @ u
    x = rel @ np.array([u[1], -u[0]])
    return x, y, float(np.linalg.norm(q - p)) / 2.0


def _log_pibar(dist, n: int):
    if isinstance(dist, FixedSizeModel):
        return None
    return np.log1p(-dist.probs)


def _as_model(dist, n: int):
    if isinstance(dist, FixedSizeModel):
        if dist.s > n:
            raise ModelError(f"subset size {dist.s} exceeds n = {n}")
        return dist
    if not isinstance(dist, BernoulliModel):
        dist = BernoulliModel(dist)
    if dist.n != n:
        raise ModelError(f"{dist.n} probabilities for {n} points")
    return dist


# -- two-point candidates --------------------------------------------------------


def _two_point(coords: np.ndarray, dist) -> tuple[float, float]:
    """``(sum of diam * P, sum of P)`` over all diametral-disk candidates."""
    n = coords.shape[0]
    if n < 2:
        return 0.0, 0.0
    ii, jj = np.triu_indices(n, 1)
    log_q = _log_pibar(dist, n)
    total = 0.0
    mass = 0.0
    step = max(1, 200_000 // n)
    for lo in range(0, ii.shape[0], step):
        a, b = ii[lo : lo + step], jj[lo : lo + step]
        mid = (coords[a] + coords[b]) / 2.0
        r2 = np.sum((coords[a] - coords[b]) ** 2, axis=1) / 4.0
        d2 = np.sum((coords[None, :, :] - mid[:, None, :]) ** 2, axis=2)
        own = np.zeros_like(d2, dtype=bool)
        rows = np.arange(a.shape[0])
        own[rows, a] = True
        own[rows, b] = True
        gap = d2 - r2[:, None]
        edge = (np.abs(gap) <= _TOL * r2[:, None]) & ~own
        if edge.any():
            k, t = np.argwhere(edge)[0]
            raise GeneralPositionError(
                f"point {t} lies on the diametral circle of points {a[k]} and {b[k]}", (int(a[k]), int(b[k]), int(t))
            )
        inside = (gap < 0) & ~own
        diam = 2.0 * np.sqrt(r2)
        if isinstance(dist, FixedSizeModel):
            if dist.s < 2:
                return 0.0, 0.0
            prob = binom_ratio(inside.sum(axis=1), dist.s - 2, n, dist.s)
        else:
            outside = ~inside & ~own
            prob = dist.probs[a] * dist.probs[b] * np.exp(outside.astype(np.float64) @ log_q)
        total += float(np.dot(diam, prob))
        mass += float(np.sum(prob))
    return total, mass


def two_point_contribution(points, dist) -> float:
    coords = coords_of(points)
    _check_planar(coords)
    return _two_point(coords, _as_model(dist, coords.shape[0]))[0]


# -- three-point candidates ------------------------------------------------------


def _sweep(coords: np.ndarray, i: int, j: int, dist, log_q, first: int = 0, validate: bool = False):
    """``(sum of diam * P, sum of P)`` over the circumdisks of ``p_i, p_j, t``
    with ``t >= first``."""
    n = coords.shape[0]
    x, y, h = _frame(coords, i, j)
    others = np.ones(n, dtype=bool)
    others[[i, j]] = False
    idx = np.nonzero(others)[0]
    x, y = x[idx], y[idx]
    scale = max(h, float(np.max(np.abs(x))), float(np.max(np.abs(y))))
    if np.any(np.abs(x) <= _TOL * scale):
        t = int(idx[np.argmin(np.abs(x))])
        raise GeneralPositionError(f"points {i}, {j}, {t} are collinear", (i, j, t))
    key = (x * x + y * y - h * h) / (2.0 * x)
    plus = x > 0

    order = np.argsort(key, kind="stable")
    sk = key[order]
    close = np.abs(np.diff(sk)) <= _TOL * (np.abs(sk[1:]) + h)
    if close.any():
        k = int(np.argmax(close))
        rows = (i, j, int(idx[order[k]]), int(idx[order[k + 1]]))
        raise GeneralPositionError(f"points {rows} are concyclic", rows)

    kp, km = key[plus], key[~plus]
    op, om = np.argsort(kp), np.argsort(km)
    kp, km = kp[op], km[om]
    below_plus = np.searchsorted(kp, key, side="left")  # l+ points strictly inside
    above_minus = km.shape[0] - np.searchsorted(km, key, side="right")  # l- points inside
    inside = below_plus + above_minus

    acute = (np.abs(y) < h) & (x * x + y * y > h * h)
    use = acute & (idx >= first)
    if validate:
        _validate_sweep(x, y, h, key, plus, inside)
    if not use.any():
        return 0.0, 0.0
    diam = 2.0 * np.sqrt(key * key + h * h)
    if isinstance(dist, FixedSizeModel):
        if dist.s < 3:
            return 0.0, 0.0
        prob = binom_ratio(inside, dist.s - 3, n, dist.s)
    else:
        lq = log_q[idx]
        cum_p = np.concatenate([[0.0], np.cumsum(lq[plus][op])])
        cum_m = np.concatenate([[0.0], np.cumsum(lq[~plus][om])])
        log_inside = cum_p[below_plus] + (cum_m[-1] - cum_m[km.shape[0] - above_minus])
        log_out = float(lq.sum()) - log_inside - lq
        prob = dist.probs[i] * dist.probs[j] * dist.probs[idx] * np.exp(log_out)
    return float(np.dot(diam[use], prob[use])), float(np.sum(prob[use]))


def _validate_sweep(x, y, h, key, plus, inside):
    """Recompute containment along the sweep. Counted as closed disks (the
    candidate on its own boundary is inside), the inside set only grows on the
    right of the pair line and only shrinks on the left."""
    order = np.argsort(key)
    c = key[order]
    gap = (x[None, :] - c[:, None]) ** 2 + y[None, :] ** 2 - (c * c + h * h)[:, None]
    strict = gap < 0
    rows = np.arange(c.shape[0])
    strict[rows, order] = False
    if np.any(strict.sum(axis=1) != inside[order]):
        raise AssertionError("sweep inside counts disagree with direct containment")
    closed = strict.copy()
    closed[rows, order] = True
    step = np.diff(closed.astype(np.int8), axis=0)
    if np.any(step[:, plus] < 0) or np.any(step[:, ~plus] > 0):
        raise AssertionError("inside sets along the sweep are not monotone")


def triple_sweep_F(p: int, q: int, points, dist, validate: bool = False) -> float:
    """``F(p, q)``: summed ``diam * P[circumdisk of p, q, t is the SED]`` over
    every third point ``t``. Obtuse triangles contribute nothing."""
    coords = coords_of(points)
    _check_planar(coords)
    dist = _as_model(dist, coords.shape[0])
    if p == q:
        raise ValueError("p and q must differ")
    return _sweep(coords, p, q, dist, _log_pibar(dist, coords.shape[0]), validate=validate)[0]


def _check_planar(coords):
    if coords.shape[1] != 2:
        raise GeometryError(f"smallest enclosing disk is implemented for d = 2; got d = {coords.shape[1]}")


def sed_candidates(points, dist, validate: bool = False) -> tuple[float, float]:
    """``(expected diameter, total candidate probability)``; each candidate
    disk is visited once, triples through their two smallest indices."""
    coords = coords_of(points)
    _check_planar(coords)
    n = coords.shape[0]
    dist = _as_model(dist, n)
    total, mass = _two_point(coords, dist)
    log_q = _log_pibar(dist, n)
    for i in range(n - 2):
        for j in range(i + 1, n - 1):
            f, m = _sweep(coords, i, j, dist, log_q, first=j + 1, validate=validate)
            total += f
            mass += m
    return total, mass


def expected_sed_diameter(points, dist, validate: bool = False) -> MomentResult:
    coords = coords_of(points)
    _check_planar(coords)
    n = coords.shape[0]
    dist = _as_model(dist, n)
    start = time.perf_counter()
    mean, _ = sed_candidates(coords, dist, validate)
    fixed = isinstance(dist, FixedSizeModel)
    return MomentResult(
        mean=mean,
        method="exact",
        measure="sed",
        distribution=dist.name,
        n=n,
        d=2,
        s=dist.s if fixed else None,
        elapsed_ms=(time.perf_counter() - start) * 1e3,
    )


def no_candidate_probability(dist, n: int) -> float:
    """``P[|S| <= 1]``: the mass not covered by any candidate disk."""
    if isinstance(dist, FixedSizeModel):
        return 1.0 if dist.s <= 1 else 0.0
    q = 1.0 - dist.probs
    none = float(np.prod(q))
    one = float(sum(dist.probs[k] * np.prod(np.delete(q, k)) for k in range(n)))
    return none + one


__all__ = [
    "expected_sed_diameter",
    "no_candidate_probability",
    "sed_candidates",
    "triple_sweep_F",
    "two_point_contribution",
]
