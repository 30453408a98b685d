"""One entry point per (measure, model, method) with the scope rules.

Supported combinations:

========  =====================  ==============  ==========
measure   models                 methods         per-s table
========  =====================  ==============  ==========
bbox      bernoulli, fixed       exact           fixed
hull      bernoulli, fixed       exact           no
centroid  fixed                  exact           yes
mpd       fixed                  exact, approx   yes
sed       bernoulli, fixed; d=2  exact           no
========  =====================  ==============  ==========
"""

from __future__ import annotations

from .bbox import MAX_DIM as BBOX_MAX_DIM
from .bbox import expected_bbox_volume, expected_bbox_volume_dd_fixed
from .centroid import centroid_moments
from .geometry import coords_of
from .hull import MAX_DIM as HULL_MAX_DIM
from .hull import expected_hull_volume
from .models import BernoulliModel, FixedSizeModel, ModelError
from .mpd import mpd_approx_moments, mpd_exact_moments
from .oracle import MeasureKind, ScopeError
from .sed import expected_sed_diameter

DEFAULT_EPSILON = 0.5
PER_S_MEASURES = ("bbox", "centroid", "mpd")


def check_engine_scope(measure, dist, d: int, method: str = "exact", all_s: bool = False) -> None:
    """Raise :class:`ScopeError` for combinations no engine covers."""
    kind = MeasureKind(measure)
    fixed = isinstance(dist, FixedSizeModel)
    if kind in (MeasureKind.CENTROID, MeasureKind.MPD) and not fixed:
        raise ScopeError(f"{kind.value} requires the fixed-size model (--dist fixed)")
    if method not in ("exact", "approx"):
        raise ScopeError(f"unknown method {method!r}")
    if method == "approx" and kind is not MeasureKind.MPD:
        raise ScopeError("the approximation method exists for mpd only")
    if all_s and not (fixed and kind.value in PER_S_MEASURES):
        raise ScopeError("--all-s needs a fixed-size engine with a per-s table (bbox, centroid, mpd)")
    if kind is MeasureKind.SED and d != 2:
        raise ScopeError(f"sed is implemented for d = 2 only; got d = {d}")
    if kind is MeasureKind.BBOX and d > BBOX_MAX_DIM:
        raise ScopeError(f"bbox supports d <= {BBOX_MAX_DIM}; got d = {d}")
    if kind is MeasureKind.HULL and d > HULL_MAX_DIM:
        raise ScopeError(f"hull supports d <= {HULL_MAX_DIM}; got d = {d}")


def compute_moments(points, measure, dist, method: str = "exact", epsilon: float | None = None, all_s: bool = False):
    """Dispatch to the analytic engine. For fixed-size ``dist`` the headline
    row is ``dist.s``; the per-s table is kept only when ``all_s``."""
    coords = coords_of(points)
    n, d = coords.shape
    check_engine_scope(measure, dist, d, method, all_s)
    kind = MeasureKind(measure)
    if isinstance(dist, FixedSizeModel) and dist.s > n:
        raise ModelError(f"subset size {dist.s} exceeds n = {n}")
    if isinstance(dist, BernoulliModel) and dist.n != n:
        raise ModelError(f"{dist.n} probabilities for {n} points")
    s = dist.s if isinstance(dist, FixedSizeModel) else None
    if kind is MeasureKind.BBOX:
        res = expected_bbox_volume_dd_fixed(coords, s) if s is not None else expected_bbox_volume(coords, dist)
    elif kind is MeasureKind.HULL:
        res = expected_hull_volume(coords, dist)
    elif kind is MeasureKind.CENTROID:
        if s < 1:
            raise ModelError("centroid distance needs s >= 1")
        res = centroid_moments(coords, s)
    elif kind is MeasureKind.MPD:
        if method == "approx":
            res = mpd_approx_moments(coords, DEFAULT_EPSILON if epsilon is None else epsilon, s)
        else:
            res = mpd_exact_moments(coords, s)
    else:
        res = expected_sed_diameter(coords, dist)
    if not all_s and res.per_s is not None:
        res.per_s = None
    return res
