"""Augmented balanced search tree over y-sorted points with ``addmark`` and a
weighted product-sum suffix query, both ``O(log n)``.

Each node keeps three aggregates over its leaves (in increasing y):

* ``sproduct``: sum over marked leaves ``q`` of ``weight(q)`` times the
  product of the ``factor`` of every leaf above ``q`` inside the node;
* ``iproduct``: product of leaf factors;
* ``uproduct``: product of ``1 - pi`` over unmarked leaves.

Merge rule: ``s = s_l * i_r + s_r``, ``i = i_l * i_r``, ``u = u_l * u_r``.

Two leaf factor schemes give the same query values:

``"quotient"``
    weight ``D(q) = q_y pi(q) pibar(P_y^+(q))``; unmarked leaves carry
    ``1/(1 - pi)``, marked leaves 1. Values blow up like ``1/pibar`` on large
    inputs.
``"scaled"``
    weight ``q_y pi(q)``; marked leaves carry ``1 - pi``, unmarked leaves 1.
    Every stored quantity stays bounded by ``max |q_y|``; the bounding-box
    engine uses this one.
"""

from __future__ import annotations

import numpy as np

from .geometry import GeneralPositionError

SCHEMES = ("quotient", "scaled")


class ProductTree:
    def __init__(self, ys, weights, probs, scheme: str = "quotient"):
        ys = np.asarray(ys, dtype=np.float64)
        weights = np.asarray(weights, dtype=np.float64)
        probs = np.asarray(probs, dtype=np.float64)
        if scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {scheme!r}")
        if not (ys.shape == weights.shape == probs.shape) or ys.ndim != 1:
            raise ValueError("ys, weights and probs must be 1-D arrays of equal length")
        n = ys.shape[0]
        order = np.argsort(ys, kind="stable")
        if n > 1 and np.any(np.diff(ys[order]) == 0):
            k = int(np.nonzero(np.diff(ys[order]) == 0)[0][0])
            raise GeneralPositionError("duplicate y-coordinate", (int(order[k]), int(order[k + 1])))
        self.n = n
        self.scheme = scheme
        self.order = order
        self.leaf_of = np.empty(n, dtype=np.intp)
        self.leaf_of[order] = np.arange(n)
        self.weights = weights[order]
        self.probs = probs[order]
        if scheme == "quotient":
            self.unmarked_factor = 1.0 / (1.0 - self.probs)
            self.marked_factor = np.ones(n)
        else:
            self.unmarked_factor = np.ones(n)
            self.marked_factor = 1.0 - self.probs
        self.marked = np.zeros(n, dtype=bool)
        size = 1
        while size < max(n, 1):
            size *= 2
        self.size = size
        self.s = np.zeros(2 * size)
        self.i = np.ones(2 * size)
        self.u = np.ones(2 * size)
        self.i[size : size + n] = self.unmarked_factor
        self.u[size : size + n] = 1.0 - self.probs
        lo = size
        while lo > 1:
            hi = lo
            lo //= 2
            left = np.arange(hi, 2 * hi, 2)
            right = left + 1
            parent = left // 2
            self.s[parent] = self.s[left] * self.i[right] + self.s[right]
            self.i[parent] = self.i[left] * self.i[right]
            self.u[parent] = self.u[left] * self.u[right]
        self.visits = 0

    # -- updates ----------------------------------------------------------

    def addmark(self, idx: int) -> None:
        if not 0 <= idx < self.n:
            raise KeyError(f"unknown point {idx}")
        k = int(self.leaf_of[idx])
        if self.marked[k]:
            raise ValueError(f"point {idx} is already marked")
        self.marked[k] = True
        v = self.size + k
        self.s[v] = self.weights[k]
        self.i[v] = self.marked_factor[k]
        self.u[v] = 1.0
        s, i, u = self.s, self.i, self.u
        v //= 2
        while v >= 1:
            self.visits += 1
            lc, rc = 2 * v, 2 * v + 1
            s[v] = s[lc] * i[rc] + s[rc]
            i[v] = i[lc] * i[rc]
            u[v] = u[lc] * u[rc]
            v //= 2

    # -- queries ----------------------------------------------------------

    def _suffix(self, idx: int) -> tuple[float, float, float]:
        # Walk from the leaf up; every right sibling lies strictly above it in
        # y, and siblings met lower down sit further left in the suffix.
        if not 0 <= idx < self.n:
            raise KeyError(f"unknown point {idx}")
        v = self.size + int(self.leaf_of[idx])
        acc_s, acc_i, acc_u = 0.0, 1.0, 1.0
        s, i, u = self.s, self.i, self.u
        while v > 1:
            self.visits += 1
            if v % 2 == 0:
                r = v + 1
                acc_s = acc_s * i[r] + s[r]
                acc_i *= i[r]
                acc_u *= u[r]
            v //= 2
        return acc_s, acc_i, acc_u

    def query(self, idx: int) -> float:
        """Sum over marked ``q`` above ``idx`` of ``weight(q)`` times the
        factors of all leaves above ``q``."""
        return self._suffix(idx)[0]

    def suffix_product(self, idx: int) -> float:
        """Product of leaf factors strictly above ``idx``."""
        return self._suffix(idx)[1]

    def complement_query(self, idx: int) -> float:
        """``pibar`` of the unmarked points strictly above ``idx``."""
        return self._suffix(idx)[2]

    # -- diagnostics --------------------------------------------------------

    @property
    def root(self) -> tuple[float, float, float]:
        return float(self.s[1]), float(self.i[1]), float(self.u[1])

    def recompute(self) -> tuple[float, float, float]:
        """Root aggregates folded directly from the leaves, for consistency checks."""
        acc_s, acc_i, acc_u = 0.0, 1.0, 1.0
        for k in range(self.n):
            if self.marked[k]:
                ls, li, lu = self.weights[k], self.marked_factor[k], 1.0
            else:
                ls, li, lu = 0.0, self.unmarked_factor[k], 1.0 - self.probs[k]
            acc_s = acc_s * li + ls
            acc_i *= li
            acc_u *= lu
        return acc_s, acc_i, acc_u
