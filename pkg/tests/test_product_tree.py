import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from geomoments.geometry import GeneralPositionError
from geomoments.product_tree import ProductTree


def direct_query(ys, weights, probs, marked, idx, scheme):
    """Brute-force suffix sum over marked points above ``idx``."""
    above = ys > ys[idx]
    total = 0.0
    for q in np.nonzero(above & marked)[0]:
        higher = ys > ys[q]
        if scheme == "quotient":
            # D(q) / pibar(unmarked points above q)
            total += weights[q] / np.prod(1.0 - probs[higher & ~marked])
        else:
            total += weights[q] * np.prod(1.0 - probs[higher & marked])
    return total


@given(st.integers(1, 64), st.integers(0, 2**31), st.sampled_from(["quotient", "scaled"]))
def test_query_matches_direct(n, seed, scheme):
    rng = np.random.default_rng(seed)
    ys = rng.permutation(n).astype(float) + rng.random(n) * 0.5
    probs = rng.uniform(0.05, 0.95, n)
    weights = rng.random(n)
    tree = ProductTree(ys, weights, probs, scheme=scheme)
    marked = np.zeros(n, dtype=bool)
    for idx in rng.permutation(n)[: rng.integers(0, n + 1)]:
        tree.addmark(int(idx))
        marked[idx] = True
        for p in range(n):
            want = direct_query(ys, weights, probs, marked, p, scheme)
            assert tree.query(p) == pytest.approx(want, rel=1e-12, abs=1e-12)


def test_root_matches_recompute():
    rng = np.random.default_rng(4)
    ys, w, p = rng.random(20), rng.random(20), rng.uniform(0.1, 0.9, 20)
    tree = ProductTree(ys, w, p)
    for i in (3, 7, 11):
        tree.addmark(i)
    assert np.allclose(tree.root, tree.recompute(), rtol=1e-13)


def test_complement_query():
    ys = np.array([0.1, 0.4, 0.2, 0.9])
    p = np.array([0.5, 0.25, 0.1, 0.2])
    tree = ProductTree(ys, np.ones(4), p)
    tree.addmark(1)
    # unmarked above y=0.1: index 2 (0.2) and 3 (0.9)
    assert tree.complement_query(0) == pytest.approx(0.9 * 0.8)


def test_errors():
    tree = ProductTree([0.1, 0.2], [1.0, 1.0], [0.5, 0.5])
    tree.addmark(0)
    with pytest.raises(ValueError):
        tree.addmark(0)
    with pytest.raises(KeyError):
        tree.addmark(5)
    with pytest.raises(GeneralPositionError):
        ProductTree([0.1, 0.1], [1.0, 1.0], [0.5, 0.5])


def test_logarithmic_work():
    n = 1024
    rng = np.random.default_rng(0)
    tree = ProductTree(rng.random(n), rng.random(n), rng.uniform(0.1, 0.9, n), scheme="scaled")
    tree.visits = 0
    tree.addmark(5)
    tree.query(17)
    assert tree.visits <= 2 * 11


def test_scaled_scheme_stays_finite_where_quotient_scheme_overflows():
    n = 4000
    rng = np.random.default_rng(1)
    ys, w, p = rng.random(n), rng.random(n), np.full(n, 0.9)
    with np.errstate(over="ignore", invalid="ignore"):
        quotient = ProductTree(ys, w, p, scheme="quotient")
    scaled = ProductTree(ys, w, p, scheme="scaled")
    assert not np.isfinite(quotient.root[1])
    assert np.all(np.isfinite(scaled.root))
