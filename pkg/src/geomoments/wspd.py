"""Fair split tree and well-separated pair decomposition.

Every node owns a contiguous slice ``perm[start:stop]`` of a preorder point
permutation, so ``P[v]`` is a view and sizes are ``stop - start``. Node balls
circumscribe the node's bounding box. Two nodes are well separated for factor
``z`` when balls of the larger radius ``r`` around both centres are at least
``z * r`` apart.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import coords_of


@dataclass(frozen=True)
class SplitTree:
    coords: np.ndarray
    perm: np.ndarray  # preorder leaf order
    start: np.ndarray
    stop: np.ndarray
    lc: np.ndarray  # -1 at leaves
    rc: np.ndarray
    parent: np.ndarray  # -1 at the root
    depth: np.ndarray
    center: np.ndarray
    radius: np.ndarray
    leaf: np.ndarray  # node[p]: leaf of point p

    @property
    def n(self) -> int:
        return int(self.coords.shape[0])

    @property
    def size(self) -> np.ndarray:
        return self.stop - self.start

    @property
    def num_nodes(self) -> int:
        return int(self.lc.shape[0])

    def points(self, v: int) -> np.ndarray:
        return self.perm[self.start[v] : self.stop[v]]

    def is_leaf(self, v: int) -> bool:
        return bool(self.lc[v] < 0)

    def ancestors(self, v: int) -> list[int]:
        out = []
        while v >= 0:
            out.append(int(v))
            v = int(self.parent[v])
        return out


def build_split_tree(points) -> SplitTree:
    """Split each box at the midpoint of its longest side (lowest axis on
    ties) until every node holds one point. Nodes are numbered in preorder."""
    coords = coords_of(points)
    n, d = coords.shape
    if n < 1:
        raise ValueError("split tree needs at least one point")
    m = 2 * n - 1
    start = np.empty(m, dtype=np.intp)
    stop = np.empty(m, dtype=np.intp)
    lc = np.full(m, -1, dtype=np.intp)
    rc = np.full(m, -1, dtype=np.intp)
    parent = np.full(m, -1, dtype=np.intp)
    depth = np.zeros(m, dtype=np.intp)
    center = np.empty((m, d))
    radius = np.empty(m)
    perm = np.empty(n, dtype=np.intp)
    leaf = np.empty(n, dtype=np.intp)

    next_id = 0
    next_slot = 0
    # (indices, parent, side) with side 0 = left child, 1 = right child
    stack = [(np.arange(n, dtype=np.intp), -1, 0)]
    while stack:
        idx, par, side = stack.pop()
        v = next_id
        next_id += 1
        parent[v] = par
        if par >= 0:
            depth[v] = depth[par] + 1
            (lc if side == 0 else rc)[par] = v
        pts = coords[idx]
        lo = pts.min(axis=0)
        hi = pts.max(axis=0)
        center[v] = (lo + hi) / 2.0
        radius[v] = float(np.linalg.norm(hi - lo)) / 2.0
        start[v] = next_slot
        stop[v] = next_slot + idx.shape[0]
        if idx.shape[0] == 1:
            perm[next_slot] = idx[0]
            leaf[idx[0]] = v
            next_slot += 1
            continue
        axis = int(np.argmax(hi - lo))
        mid = (lo[axis] + hi[axis]) / 2.0
        go_left = pts[:, axis] < mid
        if go_left.all() or not go_left.any():
            raise ValueError("split tree needs pairwise distinct points")
        stack.append((idx[~go_left], v, 1))
        stack.append((idx[go_left], v, 0))
    return SplitTree(coords, perm, start, stop, lc, rc, parent, depth, center, radius, leaf)


@dataclass(frozen=True)
class WSPair:
    a: int
    b: int
    size_a: int
    size_b: int
    delta: float


@dataclass(frozen=True)
class WSPairs:
    """The decomposition as parallel arrays (``a``, ``b`` are node ids)."""

    tree: SplitTree = field(repr=False)
    z: float
    a: np.ndarray
    b: np.ndarray
    delta: np.ndarray

    def __len__(self) -> int:
        return int(self.a.shape[0])

    def __iter__(self):
        size = self.tree.size
        for a, b, dl in zip(self.a, self.b, self.delta):
            yield WSPair(int(a), int(b), int(size[a]), int(size[b]), float(dl))

    @property
    def weight(self) -> np.ndarray:
        """``|A| |B|`` per pair, as floats."""
        size = self.tree.size.astype(np.float64)
        return size[self.a] * size[self.b]

    def cover_count(self) -> int:
        size = self.tree.size
        return int(np.sum(size[self.a] * size[self.b]))


def ball_distance(tree: SplitTree, a, b) -> np.ndarray:
    gap = np.linalg.norm(tree.center[a] - tree.center[b], axis=-1)
    return np.maximum(0.0, gap - tree.radius[a] - tree.radius[b])


def well_separated(tree: SplitTree, a, b, z: float) -> np.ndarray:
    r = np.maximum(tree.radius[a], tree.radius[b])
    gap = np.linalg.norm(tree.center[a] - tree.center[b], axis=-1)
    return gap - 2.0 * r >= z * r


def wspd_pairs(tree: SplitTree, z: float) -> WSPairs:
    """Start from the two children of every internal node; a pair that is not
    well separated is replaced by splitting its node of larger radius (the
    first node on ties). Level-synchronous, so the output order is fixed."""
    if not z >= 1.0:
        raise ValueError(f"separation factor must be >= 1; got {z}")
    internal = np.nonzero(tree.lc >= 0)[0]
    a = tree.lc[internal]
    b = tree.rc[internal]
    out_a, out_b = [], []
    while a.shape[0]:
        sep = well_separated(tree, a, b, z)
        out_a.append(a[sep])
        out_b.append(b[sep])
        a, b = a[~sep], b[~sep]
        split_a = tree.radius[a] >= tree.radius[b]
        sa, sb = a[split_a], b[split_a]
        ta, tb = a[~split_a], b[~split_a]
        a = np.concatenate([tree.lc[sa], tree.rc[sa], ta, ta])
        b = np.concatenate([sb, sb, tree.lc[tb], tree.rc[tb]])
    pa = np.concatenate(out_a) if out_a else np.empty(0, dtype=np.intp)
    pb = np.concatenate(out_b) if out_b else np.empty(0, dtype=np.intp)
    return WSPairs(tree, float(z), pa, pb, ball_distance(tree, pa, pb))


def _push_down(tree: SplitTree, ms: np.ndarray) -> np.ndarray:
    """``SUM[v] = SUM[parent] + ms[v]``, one level at a time."""
    total = ms.copy()
    for level in range(1, int(tree.depth.max()) + 1):
        nodes = np.nonzero(tree.depth == level)[0]
        total[nodes] += total[tree.parent[nodes]]
    return total


def sum_per_point(tree: SplitTree, pairs: WSPairs) -> tuple[np.ndarray, np.ndarray]:
    """Per point ``p``: ``SUM(p) = sum over pairs (A, B), A containing p, of
    |B| * delta_ball`` and the same with ``delta_ball^2``. Each pair counts
    from both of its sides."""
    if pairs.tree is not tree:
        raise ValueError("pair list was generated from a different split tree")
    size = tree.size.astype(np.float64)
    ms1 = np.zeros(tree.num_nodes)
    ms2 = np.zeros(tree.num_nodes)
    d1 = pairs.delta
    d2 = d1 * d1
    np.add.at(ms1, pairs.a, size[pairs.b] * d1)
    np.add.at(ms1, pairs.b, size[pairs.a] * d1)
    np.add.at(ms2, pairs.a, size[pairs.b] * d2)
    np.add.at(ms2, pairs.b, size[pairs.a] * d2)
    return _push_down(tree, ms1)[tree.leaf], _push_down(tree, ms2)[tree.leaf]


def pointwise_delta(tree: SplitTree, pairs: WSPairs) -> np.ndarray:
    """Dense ``delta_ball(p, q)`` matrix (diagonal 0). For tests on small n."""
    n = tree.n
    out = np.zeros((n, n))
    for a, b, dl in zip(pairs.a, pairs.b, pairs.delta):
        pa, pb = tree.points(a), tree.points(b)
        out[np.ix_(pa, pb)] = dl
        out[np.ix_(pb, pa)] = dl
    return out
