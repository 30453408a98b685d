"""Mean and variance of the mean squared distance to the centroid, fixed-size
model, every subset size at once.

For a subset ``S`` of size ``s``::

    CD(S) = A/s - B/s^2,   A = sum_{p in S} |p|^2,   B = |sum_{p in S} p|^2

so ``CD`` and ``CD^2`` are polynomials in ``A`` and ``B``. Every moment that
appears (``E[A]``, ``E[B]``, ``E[A^2]``, ``E[AB]``, ``E[B^2]``) is a sum over
tuples of point indices drawn from ``S``. A tuple whose indices take ``j``
distinct values lies in ``S`` with probability ``C(n-j, s-j)/C(n, s)``, so
each moment is ``sum_j c_j * rho_j(s)`` where ``c_j`` collects the tuples with
exactly ``j`` distinct points.

The ``c_j`` are derived mechanically: for every set partition of the tuple
positions the unrestricted sum (positions in a block forced equal, blocks
free) is one ``einsum`` over the coordinate matrix, and Moebius inversion on
the partition lattice turns those into sums over tuples with exactly that
coincidence pattern. ``B^2`` has four positions, hence the fifteen patterns.
"""

from __future__ import annotations

import math
import time
from functools import lru_cache

import numpy as np

from .geometry import coords_of
from .models import ModelError, MomentResult, clamp_variance_rows, inclusion_ratio

# A term is a product of factors x[u, i] * x[v, i], one feature letter per
# factor; u, v are tuple positions. |p|^2 is the factor (p, p).
TERMS = {
    "A": (1, ((0, 0),)),
    "B": (2, ((0, 1),)),
    "AA": (2, ((0, 0), (1, 1))),
    "AB": (3, ((0, 0), (1, 2))),
    "BB": (4, ((0, 1), (2, 3))),
}


@lru_cache(maxsize=None)
def set_partitions(k: int) -> tuple[tuple[tuple[int, ...], ...], ...]:
    """All set partitions of ``range(k)`` (blocks sorted by first element)."""
    if k == 0:
        return ((),)
    out = []
    for part in set_partitions(k - 1):
        out.append(part + ((k - 1,),))
        for b in range(len(part)):
            blocks = list(part)
            blocks[b] = blocks[b] + (k - 1,)
            out.append(tuple(blocks))
    return tuple(out)


def _block_of(part) -> dict[int, int]:
    return {pos: b for b, block in enumerate(part) for pos in block}


def _refines(fine, coarse) -> bool:
    where = _block_of(coarse)
    return all(len({where[pos] for pos in block}) == 1 for block in fine)


def _moebius(fine, coarse) -> int:
    """Moebius function of the partition lattice for ``fine <= coarse``."""
    where = _block_of(coarse)
    counts = [0] * len(coarse)
    for block in fine:
        counts[where[block[0]]] += 1
    return math.prod((-1) ** (c - 1) * math.factorial(c - 1) for c in counts)


@lru_cache(maxsize=None)
def coincidence_table(k: int) -> tuple[tuple[int, tuple[tuple[int, int], ...]], ...]:
    """For each partition ``sigma`` of ``k`` positions, the pairs
    ``(j, mu)`` such that ``c_j += mu * F(sigma)``; this is the tabulated
    expansion ``c_j = sum_{|pi| = j} sum_{sigma >= pi} mu(pi, sigma) F(sigma)``."""
    parts = set_partitions(k)
    rows = []
    for sigma in parts:
        acc: dict[int, int] = {}
        for pi in parts:
            if _refines(pi, sigma):
                acc[len(pi)] = acc.get(len(pi), 0) + _moebius(pi, sigma)
        rows.append((parts.index(sigma), tuple(sorted((j, m) for j, m in acc.items() if m))))
    return tuple(rows)


def _unrestricted_sum(x: np.ndarray, factors, part) -> float:
    where = _block_of(part)
    letters = "abcdefgh"
    features = "ijkl"
    specs, operands = [], []
    for f, (u, v) in enumerate(factors):
        specs.append(letters[where[u]] + features[f])
        specs.append(letters[where[v]] + features[f])
        operands += [x, x]
    return float(np.einsum(",".join(specs) + "->", *operands, optimize="greedy"))


def distinct_coefficients(x: np.ndarray, term: str) -> np.ndarray:
    """``c_j`` (index ``j = 0..4``) for one of the :data:`TERMS`."""
    k, factors = TERMS[term]
    parts = set_partitions(k)
    coeff = np.zeros(5)
    for sigma_idx, contributions in coincidence_table(k):
        if not contributions:
            continue
        f = _unrestricted_sum(x, factors, parts[sigma_idx])
        for j, mu in contributions:
            coeff[j] += mu * f
    return coeff


def centroid_per_s(points) -> np.ndarray:
    """Rows ``(s, mean, variance)`` for ``s = 1..n``."""
    coords = coords_of(points)
    n = coords.shape[0]
    if n < 1:
        raise ModelError("empty point set")
    # CD is translation invariant; centring keeps the expansion well conditioned.
    x = coords - coords.mean(axis=0)
    coeff = {t: distinct_coefficients(x, t) for t in TERMS}
    s = np.arange(1, n + 1, dtype=np.float64)
    rho = np.stack([inclusion_ratio(n, j, s) if j <= n else np.zeros_like(s) for j in range(5)])

    def expect(term):
        return coeff[term] @ rho

    mean = expect("A") / s - expect("B") / s**2
    second = expect("AA") / s**2 - 2.0 * expect("AB") / s**3 + expect("BB") / s**4
    var, _ = clamp_variance_rows(second - mean**2, second)
    mean[0] = 0.0
    var[0] = 0.0
    var[-1] = 0.0
    return np.column_stack([s, mean, var])


def centroid_moments(points, s: int | None = None) -> MomentResult:
    """Exact ``E[CD(S)]`` and ``V[CD(S)]`` for all ``s``; the headline row is
    ``s`` (default ``n``)."""
    coords = coords_of(points)
    n, d = coords.shape
    start = time.perf_counter()
    rows = centroid_per_s(coords)
    s = n if s is None else int(s)
    if not 1 <= s <= n:
        raise ModelError(f"subset size {s} outside 1..{n}")
    return MomentResult(
        mean=float(rows[s - 1, 1]),
        variance=float(rows[s - 1, 2]),
        per_s=rows,
        measure="centroid",
        distribution="fixed",
        n=n,
        d=d,
        s=s,
        elapsed_ms=(time.perf_counter() - start) * 1e3,
    )
