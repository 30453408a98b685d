"""Expected bounding-box volume.

The box volume expands as ``prod_i (max_i - min_i) = prod_i (max_i x + max_i (-x))``,
so the expectation is the sum, over all ``2^d`` sign patterns, of
``E[prod_i max_{p in S} sign_i * p_i]`` on the reflected point set. Each such
max-product term is evaluated by one of two engines:

* planar Bernoulli: the ``O(n log n)`` sweep with a product tree;
* any ``d <= 4``, either model: enumeration of concise sets (subsets of at
  most ``d`` points in which every member is the maximum in some coordinate).
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .geometry import GeometryError, coords_of
from .models import BernoulliModel, FixedSizeModel, ModelError, MomentResult, binom_ratio
from .product_tree import ProductTree

MAX_DIM = 4
_CHUNK = 4096


def _probs(points_n: int, probs) -> np.ndarray:
    if isinstance(probs, BernoulliModel):
        probs = probs.probs
    p = np.asarray(probs, dtype=np.float64).reshape(-1)
    if p.shape[0] != points_n:
        raise ModelError(f"{p.shape[0]} probabilities for {points_n} points")
    if not np.all((p > 0) & (p < 1)):
        raise ModelError("inclusion probabilities must lie strictly inside (0, 1)")
    return p


def _centred(coords: np.ndarray) -> np.ndarray:
    """Shift to the bounding-box centre. Box volume is translation invariant,
    and near the origin the signed corner terms stay comparable in size to
    the result instead of cancelling."""
    if coords.shape[0] == 0:
        return coords
    return coords - (coords.max(axis=0) + coords.min(axis=0)) / 2.0


def _pibar_above(keys: np.ndarray, probs: np.ndarray) -> np.ndarray:
    """``pibar`` of the points with a strictly larger key, for every point."""
    order = np.argsort(-keys, kind="stable")
    q = 1.0 - probs[order]
    above = np.concatenate(([1.0], np.cumprod(q)[:-1]))
    out = np.empty_like(above)
    out[order] = above
    return out


def max_max_2d(coords: np.ndarray, probs: np.ndarray, scheme: str = "scaled") -> float:
    """``E[max_{p in S} p_x * max_{q in S} q_y]`` under the Bernoulli model.

    Sum over ``p`` of ``A(p) B(p) + C(p)``: ``A`` and the ``pibar`` prefixes
    come from sorted sweeps, ``B`` and ``C`` from a product tree marked in
    increasing ``x``.
    """
    x, y = coords[:, 0], coords[:, 1]
    n = x.shape[0]
    if n == 0:
        return 0.0
    pibar_x = _pibar_above(x, probs)
    pibar_y = _pibar_above(y, probs)
    a = x * probs * pibar_x
    if scheme == "quotient":
        tree = ProductTree(y, y * probs * pibar_y, probs, scheme="quotient")
    else:
        tree = ProductTree(y, y * probs, probs, scheme="scaled")
    total = 0.0
    for idx in np.argsort(x, kind="stable"):
        idx = int(idx)
        tree.addmark(idx)
        b, marked_above, unmarked_above = tree._suffix(idx)
        if scheme == "quotient":
            # pibar(P_x^+ u P_y^+) = pibar(P_x^+) pibar(P_y^+) / pibar(P_x^+ n P_y^+)
            pibar_union = pibar_x[idx] * pibar_y[idx] / unmarked_above
        else:
            pibar_union = pibar_x[idx] * marked_above
        c = x[idx] * y[idx] * probs[idx] * pibar_union
        total += a[idx] * b + c
    return total


def corner_term_2d(points, probs, x_max: bool = True, y_max: bool = True, scheme: str = "scaled") -> float:
    """``E[f(x) * g(y)]`` with ``f, g`` each the max or the min over ``S``.

    Minima are reflected maxima, ``min x = -max(-x)``, so every corner reuses
    :func:`max_max_2d`.
    """
    coords = coords_of(points)
    if coords.shape[1] != 2:
        raise GeometryError("corner terms are planar")
    p = _probs(coords.shape[0], probs)
    sx = 1.0 if x_max else -1.0
    sy = 1.0 if y_max else -1.0
    return sx * sy * max_max_2d(coords * np.array([sx, sy]), p, scheme=scheme)


def expected_bbox_area_2d_bernoulli(points, probs, scheme: str = "scaled") -> MomentResult:
    coords = coords_of(points)
    if coords.shape[1] != 2:
        raise GeometryError("the product-tree engine is planar; use expected_bbox_volume_dd_bernoulli")
    p = _probs(coords.shape[0], probs)
    start = time.perf_counter()
    coords = _centred(coords)
    mean = (
        corner_term_2d(coords, p, True, True, scheme)
        - corner_term_2d(coords, p, True, False, scheme)
        - corner_term_2d(coords, p, False, True, scheme)
        + corner_term_2d(coords, p, False, False, scheme)
    )
    return MomentResult(
        mean=mean,
        method="exact",
        measure="bbox",
        distribution="bernoulli",
        n=coords.shape[0],
        d=2,
        elapsed_ms=(time.perf_counter() - start) * 1e3,
    )


# -- concise sets -------------------------------------------------------------


@dataclass(frozen=True)
class ConciseSet:
    members: tuple[int, ...]
    argmax: tuple[int, ...]  # point index attaining the max, per dimension
    maxima: np.ndarray
    dominating: np.ndarray  # indices of P^+(H)

    @property
    def k(self) -> int:
        return len(self.members)


def _check_dim(d: int) -> None:
    if d > MAX_DIM:
        raise GeometryError(f"concise-set enumeration is capped at d <= {MAX_DIM}; got d = {d}")


def _concise_batches(coords: np.ndarray, k: int) -> Iterator[tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]]:
    """Yield ``(members, argmax, maxima, exceed)`` for the concise k-sets, in
    chunks; ``exceed[m, j]`` flags point ``j`` in ``P^+`` of set ``m``."""
    n, d = coords.shape
    combos = itertools.combinations(range(n), k)
    while True:
        chunk = np.array(list(itertools.islice(combos, _CHUNK)), dtype=np.intp).reshape(-1, k)
        if chunk.shape[0] == 0:
            return
        pts = coords[chunk]  # (m, k, d)
        am = pts.argmax(axis=1)  # (m, d) position within the set
        covered = np.zeros((chunk.shape[0], k), dtype=bool)
        np.put_along_axis(covered, am, True, axis=1)
        keep = covered.all(axis=1)
        if not keep.any():
            continue
        chunk, pts, am = chunk[keep], pts[keep], am[keep]
        maxima = np.take_along_axis(pts, am[:, None, :], axis=1)[:, 0, :]
        exceed = (coords[None, :, :] > maxima[:, None, :]).any(axis=2)
        yield chunk, np.take_along_axis(chunk, am, axis=1), maxima, exceed


def enumerate_concise_sets(points, max_k: int | None = None) -> Iterator[ConciseSet]:
    coords = coords_of(points)
    n, d = coords.shape
    _check_dim(d)
    max_k = d if max_k is None else min(max_k, d)
    for k in range(1, min(max_k, n) + 1):
        for members, argmax, maxima, exceed in _concise_batches(coords, k):
            for m in range(members.shape[0]):
                yield ConciseSet(
                    tuple(int(i) for i in members[m]),
                    tuple(int(i) for i in argmax[m]),
                    maxima[m].copy(),
                    np.nonzero(exceed[m])[0],
                )


def xp_bernoulli(coords: np.ndarray, probs: np.ndarray) -> float:
    """``E[prod_i max_{p in S} p_i]`` as the sum of concise-set contributions."""
    n, d = coords.shape
    log_pibar = np.log1p(-probs)
    total = 0.0
    for k in range(1, min(d, n) + 1):
        for members, _, maxima, exceed in _concise_batches(coords, k):
            sel = np.prod(probs[members], axis=1)
            excl = np.exp(exceed @ log_pibar)
            total += float(np.sum(np.prod(maxima, axis=1) * sel * excl))
    return total


def sign_patterns(d: int) -> np.ndarray:
    return np.array(list(itertools.product((1.0, -1.0), repeat=d)))


def expected_bbox_volume_dd_bernoulli(points, probs) -> MomentResult:
    coords = coords_of(points)
    n, d = coords.shape
    _check_dim(d)
    p = _probs(n, probs)
    start = time.perf_counter()
    coords = _centred(coords)
    mean = sum(xp_bernoulli(coords * signs, p) for signs in sign_patterns(d))
    return MomentResult(
        mean=float(mean),
        method="exact",
        measure="bbox",
        distribution="bernoulli",
        n=n,
        d=d,
        elapsed_ms=(time.perf_counter() - start) * 1e3,
    )


def contribution_table(coords: np.ndarray) -> np.ndarray:
    """``SUM[k, g]``: summed max-products of concise k-sets that leave exactly
    ``g`` other points below all of their maxima."""
    n, d = coords.shape
    table = np.zeros((d + 1, n + 1))
    for k in range(1, min(d, n) + 1):
        for _, _, maxima, exceed in _concise_batches(coords, k):
            g = n - k - exceed.sum(axis=1)
            np.add.at(table[k], g, np.prod(maxima, axis=1))
    return table


def bbox_fixed_per_s(coords: np.ndarray) -> np.ndarray:
    """Mean box volume for every ``s in 0..n`` under the fixed-size model."""
    n, d = coords.shape
    coords = _centred(coords)
    table = np.zeros((d + 1, n + 1))
    for signs in sign_patterns(d):
        table += contribution_table(coords * signs)
    means = np.zeros(n + 1)
    g = np.arange(n + 1)
    for s in range(1, n + 1):
        acc = 0.0
        for k in range(1, min(d, s) + 1):
            acc += float(np.dot(table[k], binom_ratio(g, s - k, n, s)))
        means[s] = acc
    means[:2] = 0.0
    return means


def expected_bbox_volume_dd_fixed(points, s: int | None = None) -> MomentResult:
    """Mean box volume for all subset sizes; the headline value is at ``s``
    (default ``n``)."""
    coords = coords_of(points)
    n, d = coords.shape
    _check_dim(d)
    if n < 1:
        raise ModelError("empty point set")
    s = n if s is None else int(s)
    if not 0 <= s <= n:
        raise ModelError(f"subset size {s} outside 0..{n}")
    start = time.perf_counter()
    means = bbox_fixed_per_s(coords)
    rows = np.column_stack([np.arange(n + 1), means, np.full(n + 1, math.nan)])[1:]
    return MomentResult(
        mean=float(means[s]),
        per_s=rows,
        method="exact",
        measure="bbox",
        distribution="fixed",
        n=n,
        d=d,
        s=s,
        elapsed_ms=(time.perf_counter() - start) * 1e3,
    )


def expected_bbox_volume(points, dist) -> MomentResult:
    coords = coords_of(points)
    if isinstance(dist, FixedSizeModel):
        return expected_bbox_volume_dd_fixed(coords, dist.s)
    if coords.shape[1] == 2:
        return expected_bbox_area_2d_bernoulli(coords, dist)
    return expected_bbox_volume_dd_bernoulli(coords, dist)
