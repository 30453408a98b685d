import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.spatial.distance import pdist, squareform

from conftest import FROZEN_PLANAR_S4, FROZEN_SPATIAL_S4, PLANAR, SPATIAL, rel_err
from geomoments.models import ModelError
from geomoments.mpd import ball_aggregates, exact_aggregates, mpd_approx_moments, mpd_exact_moments
from geomoments.oracle import oracle_per_s, subset_value_table


def test_frozen_values():
    for pts, frozen in ((PLANAR, FROZEN_PLANAR_S4), (SPATIAL, FROZEN_SPATIAL_S4)):
        r = mpd_exact_moments(pts, 4)
        mean, var = frozen["mpd"]
        assert rel_err(r.mean, mean) < 1e-12 and rel_err(r.variance, var) < 1e-10


def test_aggregates_match_direct_recomputation():
    pts = np.random.default_rng(0).random((40, 3))
    dist = squareform(pdist(pts))
    agg = exact_aggregates(pts)
    assert agg.d1 == pytest.approx(dist.sum() / 2, rel=1e-12)
    assert agg.d2 == pytest.approx((dist**2).sum() / 2, rel=1e-12)
    assert agg.sumsq == pytest.approx(float((dist.sum(1) ** 2).sum()), rel=1e-12)
    assert agg.sqp == 2 * agg.d2 and agg.sum1 >= 0 and agg.sum2 >= 0


def test_two_points():
    r = mpd_exact_moments([[0.0, 0.0], [3.0, 4.0]], 2)
    assert r.mean == pytest.approx(5.0) and r.variance == 0.0
    a = mpd_approx_moments([[0.0, 0.0], [3.0, 4.0]], 0.5, 2)
    assert a.mean == pytest.approx(5.0) and a.variance == pytest.approx(0.0, abs=1e-12)


def test_hand_example():
    r = mpd_exact_moments([[0.0, 0.0], [1.0, 1e-9], [3.0, 2e-9]], 2)
    assert r.mean == pytest.approx(2.0, rel=1e-9)
    assert r.variance == pytest.approx(2.0 / 3.0, rel=1e-9)


@given(st.integers(0, 2**31), st.integers(2, 12), st.sampled_from([1, 2, 3, 6]))
def test_exact_matches_oracle_for_all_s(seed, n, d):
    pts = np.random.default_rng(seed).random((n, d))
    got = mpd_exact_moments(pts).per_s
    want = oracle_per_s(pts, "mpd", subset_value_table(pts, "mpd"))[2:]
    assert np.allclose(got[:, 1], want[:, 1], rtol=1e-9, atol=1e-14)
    assert np.allclose(got[:, 2], want[:, 2], rtol=1e-8, atol=1e-13)
    assert got[-1, 2] == 0.0


@given(st.integers(0, 2**31), st.integers(2, 80), st.sampled_from([2, 3]), st.sampled_from([0.1, 0.5, 0.9]))
def test_approx_sandwich_for_every_s(seed, n, d, eps):
    pts = np.random.default_rng(seed).random((n, d))
    exact = mpd_exact_moments(pts).per_s
    approx = mpd_approx_moments(pts, eps).per_s
    assert np.all(approx[:, 1] <= exact[:, 1] * (1 + 1e-12))
    assert np.all(approx[:, 1] >= (1 - eps) * exact[:, 1] * (1 - 1e-12))


@given(st.integers(0, 2**31), st.integers(4, 80), st.sampled_from([0.2, 0.5]))
def test_approx_second_moment_below_exact(seed, n, eps):
    pts = np.random.default_rng(seed).random((n, 2))
    sizes = np.arange(2, n + 1)
    _, exact2, _ = exact_aggregates(pts).moments(sizes)
    _, approx2, _ = ball_aggregates(pts, 8.0 / eps).moments(sizes)
    assert np.all(approx2 <= exact2 * (1 + 1e-12))


def test_mean_converges_as_eps_shrinks():
    pts = np.random.default_rng(3).random((300, 2))
    exact = mpd_exact_moments(pts, 100).mean
    means = [mpd_approx_moments(pts, eps, 100, variance=False).mean for eps in (0.5, 0.2, 0.05)]
    assert means[0] <= means[1] <= means[2] <= exact
    assert rel_err(means[2], exact) < 0.01


def test_mean_only_mode():
    r = mpd_approx_moments(np.random.default_rng(4).random((30, 2)), 0.5, 10, variance=False)
    assert r.variance is None and np.all(np.isnan(r.per_s[:, 2]))


def test_input_errors():
    pts = np.random.default_rng(5).random((6, 2))
    with pytest.raises(ModelError):
        mpd_exact_moments(pts[:1])
    with pytest.raises(ModelError):
        mpd_exact_moments(pts, 7)
    with pytest.raises(ModelError):
        mpd_exact_moments(pts, 1)
    for eps in (0.0, 1.0, -0.1):
        with pytest.raises(ModelError):
            mpd_approx_moments(pts, eps)
