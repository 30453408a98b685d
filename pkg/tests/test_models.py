import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from geomoments.models import (
    BernoulliModel,
    BinomialTable,
    FixedSizeModel,
    ModelError,
    MomentResult,
    binom_ratio,
    check_distribution,
    clamp_variance,
    inclusion_ratio,
    pibar_product,
    pi_product,
    sample_masks,
    sample_subset,
)


@pytest.mark.parametrize("p", [0.0, 1.0, -0.1, 1.5])
def test_bernoulli_rejects_boundary(p):
    with pytest.raises(ModelError):
        BernoulliModel([0.5, p])


def test_fixed_size_validation():
    with pytest.raises(ModelError):
        FixedSizeModel(-1)
    with pytest.raises(ModelError):
        check_distribution(FixedSizeModel(5), 4)
    with pytest.raises(ModelError):
        check_distribution(BernoulliModel([0.5]), 2)


def test_products():
    m = BernoulliModel([0.5, 0.25, 0.1])
    assert pi_product(m, [0, 1]) == pytest.approx(0.125)
    assert pibar_product(m, [1, 2]) == pytest.approx(0.75 * 0.9)
    assert pi_product(m, []) == 1.0


@given(st.integers(1, 60), st.data())
def test_inclusion_ratio_matches_comb(n, data):
    k = data.draw(st.integers(0, min(n, 4)))
    s = data.draw(st.integers(0, n))
    want = math.comb(n - k, s - k) / math.comb(n, s) if s >= k else 0.0
    assert inclusion_ratio(n, k, s) == pytest.approx(want, rel=1e-13, abs=1e-300)


@given(st.integers(1, 200), st.data())
def test_binom_ratio_matches_comb(n, data):
    s = data.draw(st.integers(0, n))
    m = data.draw(st.integers(0, n))
    j = data.draw(st.integers(-1, n))
    want = math.comb(m, j) / math.comb(n, s) if 0 <= j <= m else 0.0
    assert binom_ratio(m, j, n, s) == pytest.approx(want, rel=1e-10, abs=1e-300)


def test_binom_ratio_large_n_no_overflow():
    # C(9418, 4198) / C(9420, 4200) = s (s-1) / (n (n-1))
    assert binom_ratio(9418, 4198, 9420, 4200) == pytest.approx(4200 * 4199 / (9420 * 9419), rel=1e-10)


def test_binomial_table():
    t = BinomialTable(6)
    assert t(2, 4) == pytest.approx(math.comb(4, 2) / math.comb(6, 4))
    assert t(3, 2) == 0.0
    with pytest.raises(ModelError):
        t(5, 2)


def test_clamp_variance():
    assert clamp_variance(-1e-12) == (0.0, True)
    assert clamp_variance(-1e-3) == (-1e-3, False)
    assert clamp_variance(0.2) == (0.2, False)


def test_sample_subset_sizes():
    rng = np.random.default_rng(0)
    assert sample_subset(10, FixedSizeModel(4), rng).shape == (4,)
    masks = sample_masks(10, FixedSizeModel(4), rng, 50)
    assert np.all(masks.sum(axis=1) == 4)


def test_sample_masks_bernoulli_rate():
    rng = np.random.default_rng(1)
    m = sample_masks(3, BernoulliModel([0.1, 0.5, 0.9]), rng, 20_000)
    assert np.allclose(m.mean(axis=0), [0.1, 0.5, 0.9], atol=0.02)


def test_fixed_masks_uniform_over_points():
    rng = np.random.default_rng(2)
    m = sample_masks(8, FixedSizeModel(3), rng, 40_000)
    assert np.allclose(m.mean(axis=0), 3 / 8, atol=0.01)


def test_moment_result_row():
    r = MomentResult(mean=1.0, per_s=np.array([[2, 1.0, 0.5], [3, 2.0, math.nan]]))
    assert r.row(2) == (1.0, 0.5)
    assert r.row(3) == (2.0, None)
    with pytest.raises(KeyError):
        r.row(4)
