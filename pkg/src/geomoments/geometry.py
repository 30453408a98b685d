"""Geometric primitives shared by the moment engines and the oracle.

Points are plain float64 numpy vectors; a point set is an ``(n, d)`` array
wrapped in :class:`PointSet`, which checks general position on construction.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

REL_TOL = 1e-9

# Above this many (k+1)-subsets the affine check samples instead of enumerating.
_FULL_CHECK_BUDGET = 200_000
_FULL_CHECK_MAX_N = 64
_SAMPLED_CHECKS = 20_000


class GeometryError(ValueError):
    pass


class GeneralPositionError(GeometryError):
    """Input violates general position; ``rows`` lists offending point indices."""

    def __init__(self, message: str, rows: tuple[int, ...] = ()):
        super().__init__(message)
        self.rows = rows


def as_coords(points) -> np.ndarray:
    arr = np.asarray(points, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1) if arr.size else arr.reshape(0, 1)
    if arr.ndim != 2 or arr.shape[1] < 1:
        raise GeometryError(f"expected an (n, d) array of coordinates, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        bad = tuple(int(i) for i in np.nonzero(~np.isfinite(arr).all(axis=1))[0])
        raise GeometryError(f"non-finite coordinates in rows {bad}")
    return arr


@dataclass(frozen=True)
class PointSet:
    """``n`` points in ``R^d``.

    ``check`` controls the general-position test: ``"full"`` (default) runs
    the shared-coordinate and affine-degeneracy checks, ``"coords"`` only the
    shared-coordinate check, ``"none"`` skips both.
    """

    coords: np.ndarray
    check: str = field(default="full", compare=False)

    def __post_init__(self):
        arr = as_coords(self.coords)
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "coords", arr)
        if self.check == "full":
            check_general_position(arr)
        elif self.check == "coords":
            check_distinct_coordinates(arr)
        elif self.check != "none":
            raise ValueError(f"unknown check mode {self.check!r}")

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    @property
    def dim(self) -> int:
        return self.coords.shape[1]

    def __len__(self) -> int:
        return self.n

    def subset(self, idx) -> np.ndarray:
        return self.coords[np.asarray(idx, dtype=np.intp)]


def coords_of(points) -> np.ndarray:
    if isinstance(points, PointSet):
        return points.coords
    return as_coords(points)


def check_distinct_coordinates(coords: np.ndarray) -> None:
    for axis in range(coords.shape[1]):
        col = coords[:, axis]
        order = np.argsort(col, kind="stable")
        same = np.nonzero(np.diff(col[order]) == 0)[0]
        if same.size:
            i, j = sorted((int(order[same[0]]), int(order[same[0] + 1])))
            raise GeneralPositionError(
                f"rows {i} and {j} share coordinate x{axis + 1} = {float(col[i])!r}", (i, j)
            )


def _relative_simplex_measure(simplices: np.ndarray) -> np.ndarray:
    """k-volume of each k-simplex in a ``(m, k+1, d)`` batch, divided by its
    longest edge to the k-th power (scale-free degeneracy score)."""
    base = simplices[:, :1, :]
    edges = simplices[:, 1:, :] - base
    gram = np.einsum("mid,mjd->mij", edges, edges)
    k = edges.shape[1]
    det = np.clip(np.linalg.det(gram), 0.0, None)
    vol = np.sqrt(det) / math.factorial(k)
    diffs = simplices[:, :, None, :] - simplices[:, None, :, :]
    longest = np.sqrt((diffs**2).sum(axis=-1)).max(axis=(1, 2))
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(longest > 0, vol / longest**k, 0.0)


def check_general_position(coords: np.ndarray, seed: int = 0) -> None:
    """Raise :class:`GeneralPositionError` if two points share a coordinate or
    ``k+1`` points lie on a common ``(k-1)``-flat for some ``k <= d``.

    Affine checks enumerate every subset when ``n <= 64`` and the subset count
    is within budget; otherwise a seeded random sample of subsets is tested.
    """
    check_distinct_coordinates(coords)
    n, d = coords.shape
    rng = np.random.default_rng(seed)
    for k in range(2, d + 1):
        if n < k + 1:
            break
        total = math.comb(n, k + 1)
        if n <= _FULL_CHECK_MAX_N and total <= _FULL_CHECK_BUDGET:
            idx = np.array(list(itertools.combinations(range(n), k + 1)), dtype=np.intp)
        else:
            draws = rng.integers(0, n, size=(_SAMPLED_CHECKS, k + 1))
            draws.sort(axis=1)
            idx = draws[(np.diff(draws, axis=1) > 0).all(axis=1)]
        for start in range(0, idx.shape[0], 20_000):
            chunk = idx[start : start + 20_000]
            score = _relative_simplex_measure(coords[chunk])
            bad = np.nonzero(score < REL_TOL)[0]
            if bad.size:
                rows = tuple(int(r) for r in chunk[bad[0]])
                raise GeneralPositionError(
                    f"rows {rows} are affinely dependent ({k + 1} points on a {k - 1}-flat)", rows
                )


def euclidean_distance(p, q) -> float:
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape:
        raise GeometryError(f"dimension mismatch: {p.shape} vs {q.shape}")
    return float(math.sqrt(float(np.dot(p - q, p - q))))


def simplex_volume(vertices) -> float:
    """Volume of the simplex spanned by ``d+1`` points in ``R^d``."""
    v = np.asarray(vertices, dtype=np.float64)
    if v.ndim != 2 or v.shape[0] != v.shape[1] + 1:
        raise GeometryError(f"need d+1 vertices in R^d, got shape {v.shape}")
    d = v.shape[1]
    return abs(float(np.linalg.det(v[1:] - v[0]))) / math.factorial(d)


@dataclass(frozen=True)
class Disk:
    center: tuple[float, float]
    radius: float

    def __post_init__(self):
        if not self.radius >= 0:
            raise GeometryError(f"negative radius {self.radius}")

    @property
    def diameter(self) -> float:
        return 2.0 * self.radius


def diametral_disk(p, q) -> Disk:
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != (2,) or q.shape != (2,):
        raise GeometryError("diametral_disk is planar")
    if np.array_equal(p, q):
        raise GeometryError("diametral disk of coincident points")
    c = (p + q) / 2.0
    return Disk((float(c[0]), float(c[1])), euclidean_distance(p, q) / 2.0)


def circumdisk(p, q, t) -> Disk:
    p, q, t = (np.asarray(v, dtype=np.float64) for v in (p, q, t))
    if p.shape != (2,) or q.shape != (2,) or t.shape != (2,):
        raise GeometryError("circumdisk is planar")
    b = q - p
    c = t - p
    cross = b[0] * c[1] - b[1] * c[0]
    scale = max(float(np.dot(b, b)), float(np.dot(c, c)))
    if abs(cross) <= REL_TOL * scale:
        raise GeneralPositionError("collinear triple has no circumdisk")
    bb = float(np.dot(b, b))
    cc = float(np.dot(c, c))
    ux = (c[1] * bb - b[1] * cc) / (2.0 * cross)
    uy = (b[0] * cc - c[0] * bb) / (2.0 * cross)
    return Disk((float(p[0] + ux), float(p[1] + uy)), math.hypot(ux, uy))


def disk_contains(disk: Disk, p, closed: bool = True) -> bool:
    """Containment test. Points within the relative tolerance of the boundary
    resolve to ``closed``; callers that need to detect such ties use
    :func:`disk_side`."""
    side = disk_side(disk, p)
    if side == 0:
        return closed
    return side < 0


def disk_side(disk: Disk, p) -> int:
    """-1 inside, +1 outside, 0 on the boundary (within tolerance)."""
    dx = float(p[0]) - disk.center[0]
    dy = float(p[1]) - disk.center[1]
    dist = math.hypot(dx, dy)
    if abs(dist - disk.radius) <= REL_TOL * max(disk.radius, 1e-300):
        return 0
    return -1 if dist < disk.radius else 1
