"""Random-subset distributions, selection probabilities and result containers."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
from scipy.special import gammaln

VARIANCE_CLAMP = 1e-9


class ModelError(ValueError):
    pass


@dataclass(frozen=True)
class BernoulliModel:
    """Each point ``i`` is kept independently with probability ``probs[i]``."""

    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=np.float64).reshape(-1).copy()
        if not np.all((p > 0.0) & (p < 1.0)):
            bad = np.nonzero(~((p > 0.0) & (p < 1.0)))[0]
            raise ModelError(
                f"inclusion probabilities must lie strictly inside (0, 1); offending rows {bad.tolist()}"
            )
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    @classmethod
    def uniform(cls, n: int, prob: float) -> "BernoulliModel":
        return cls(np.full(n, prob))

    @property
    def n(self) -> int:
        return self.probs.shape[0]

    @property
    def name(self) -> str:
        return "bernoulli"


@dataclass(frozen=True)
class FixedSizeModel:
    """A uniformly random subset of exactly ``s`` points."""

    s: int

    def __post_init__(self):
        if int(self.s) != self.s or self.s < 0:
            raise ModelError(f"subset size must be a natural number, got {self.s!r}")
        object.__setattr__(self, "s", int(self.s))

    @property
    def name(self) -> str:
        return "fixed"


DistributionSpec = Union[BernoulliModel, FixedSizeModel]


def check_distribution(dist: DistributionSpec, n: int) -> None:
    if isinstance(dist, BernoulliModel):
        if dist.n != n:
            raise ModelError(f"{dist.n} probabilities for {n} points")
    elif isinstance(dist, FixedSizeModel):
        if dist.s > n:
            raise ModelError(f"subset size {dist.s} exceeds n = {n}")
    else:
        raise TypeError(f"not a distribution: {dist!r}")


def pi_product(model: BernoulliModel, idx) -> float:
    idx = np.asarray(idx, dtype=np.intp).reshape(-1)
    return float(np.prod(model.probs[idx]))


def pibar_product(model: BernoulliModel, idx) -> float:
    idx = np.asarray(idx, dtype=np.intp).reshape(-1)
    return float(np.prod(1.0 - model.probs[idx]))


def inclusion_ratio(n: int, k: int, s) -> np.ndarray | float:
    """``C(n-k, s-k) / C(n, s)``: probability that ``k`` fixed points all land
    in a uniform ``s``-subset. Telescoping product, vectorised over ``s``."""
    if not 0 <= k <= n:
        raise ModelError(f"need 0 <= k <= n, got k={k}, n={n}")
    s_arr = np.asarray(s, dtype=np.float64)
    out = np.ones_like(s_arr)
    for i in range(k):
        out = out * (s_arr - i) / (n - i)
    out = np.where(s_arr >= k, out, 0.0)
    if np.ndim(s) == 0:
        return float(out)
    return out


def log_binom(n, k):
    n = np.asarray(n, dtype=np.float64)
    k = np.asarray(k, dtype=np.float64)
    return gammaln(n + 1.0) - gammaln(k + 1.0) - gammaln(n - k + 1.0)


def binom_ratio(m, j, n: int, s: int):
    """``C(m, j) / C(n, s)`` for arrays ``m`` (and ``j``), zero where ``j`` is
    out of ``[0, m]``. Evaluated in log space, so it neither overflows for
    large ``n`` nor loses relative precision on the ratios that matter."""
    m = np.asarray(m, dtype=np.float64)
    j = np.asarray(j, dtype=np.float64)
    valid = (j >= 0) & (j <= m)
    mm = np.where(valid, m, 0.0)
    jj = np.where(valid, j, 0.0)
    out = np.where(valid, np.exp(log_binom(mm, jj) - log_binom(n, s)), 0.0)
    if out.ndim == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class BinomialTable:
    """Inclusion ratios ``C(n-k, s-k)/C(n, s)`` for ``k <= 4`` and every
    ``s in 0..n``; row ``k`` is indexed by ``s``."""

    n: int
    ratios: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        s = np.arange(self.n + 1)
        kmax = min(4, self.n)
        rows = np.zeros((5, self.n + 1))
        for k in range(kmax + 1):
            rows[k] = inclusion_ratio(self.n, k, s)
        rows.setflags(write=False)
        object.__setattr__(self, "ratios", rows)

    def __call__(self, k: int, s: int) -> float:
        if not 0 <= k <= 4:
            raise ModelError(f"k must be in 0..4, got {k}")
        if not 0 <= s <= self.n:
            raise ModelError(f"s must be in 0..{self.n}, got {s}")
        return float(self.ratios[k, s])


def sample_subset(n: int, dist: DistributionSpec, rng: np.random.Generator) -> np.ndarray:
    """One random index set (sorted)."""
    if isinstance(dist, BernoulliModel):
        return np.nonzero(rng.random(n) < dist.probs)[0]
    if dist.s > n:
        raise ModelError(f"subset size {dist.s} exceeds n = {n}")
    return np.sort(rng.choice(n, size=dist.s, replace=False, shuffle=False))


def sample_masks(n: int, dist: DistributionSpec, rng: np.random.Generator, count: int) -> np.ndarray:
    """``count`` independent draws as a boolean ``(count, n)`` membership matrix."""
    if isinstance(dist, BernoulliModel):
        return rng.random((count, n)) < dist.probs
    s = dist.s
    masks = np.zeros((count, n), dtype=bool)
    if s == 0:
        return masks
    if s >= n:
        masks[:] = True
        return masks
    keys = rng.random((count, n))
    chosen = np.argpartition(keys, s - 1, axis=1)[:, :s]
    np.put_along_axis(masks, chosen, True, axis=1)
    return masks


@dataclass
class MomentResult:
    """Mean and (optionally) variance of a measure, plus run metadata.

    ``per_s`` rows are ``(s, mean, variance)`` with variance ``nan`` when the
    engine is mean-only.
    """

    mean: float
    variance: Optional[float] = None
    per_s: Optional[np.ndarray] = None
    method: str = "exact"
    measure: str = ""
    distribution: str = ""
    n: int = 0
    d: int = 0
    s: Optional[int] = None
    epsilon: Optional[float] = None
    samples: Optional[int] = None
    seed: Optional[int] = None
    elapsed_ms: float = 0.0
    clamped: bool = False

    def row(self, s: int) -> tuple[float, Optional[float]]:
        if self.per_s is None:
            raise KeyError("result has no per-s table")
        hit = np.nonzero(self.per_s[:, 0] == s)[0]
        if not hit.size:
            raise KeyError(f"no row for s={s}")
        mean, var = self.per_s[hit[0], 1], self.per_s[hit[0], 2]
        return float(mean), (None if math.isnan(var) else float(var))


def clamp_variance(var: float) -> tuple[float, bool]:
    """Clamp round-off negatives; anything below ``-1e-9`` (relative to 1) is left
    visible so callers notice a real defect."""
    if var < 0.0 and var >= -VARIANCE_CLAMP:
        return 0.0, True
    return var, False


def clamp_variance_rows(var: np.ndarray, scale: np.ndarray | float = 1.0) -> tuple[np.ndarray, bool]:
    tol = VARIANCE_CLAMP * np.maximum(np.asarray(scale, dtype=np.float64), 1.0)
    small = (var < 0.0) & (var >= -tol)
    return np.where(small, 0.0, var), bool(small.any())
