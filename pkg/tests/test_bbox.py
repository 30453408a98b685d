import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import FROZEN_BERNOULLI, FROZEN_PLANAR_S4, FROZEN_SPATIAL_S4, PLANAR, PLANAR_PROBS, SPATIAL, rel_err
from geomoments.bbox import (
    corner_term_2d,
    enumerate_concise_sets,
    expected_bbox_area_2d_bernoulli,
    expected_bbox_volume,
    expected_bbox_volume_dd_bernoulli,
    expected_bbox_volume_dd_fixed,
    max_max_2d,
)
from geomoments.geometry import GeometryError
from geomoments.models import BernoulliModel, FixedSizeModel
from geomoments.oracle import oracle_moments, oracle_per_s, subset_probabilities, subset_value_table


def test_frozen_values():
    assert rel_err(expected_bbox_area_2d_bernoulli(PLANAR, PLANAR_PROBS).mean, FROZEN_BERNOULLI["bbox"]) < 1e-12
    assert rel_err(expected_bbox_volume_dd_fixed(PLANAR, 4).mean, FROZEN_PLANAR_S4["bbox"][0]) < 1e-12
    assert rel_err(expected_bbox_volume_dd_fixed(SPATIAL, 4).mean, FROZEN_SPATIAL_S4["bbox"][0]) < 1e-12


def test_single_point_has_zero_area():
    assert expected_bbox_area_2d_bernoulli([[0.3, 0.4]], [0.5]).mean == pytest.approx(0.0, abs=1e-16)


def test_two_points_hand_value():
    pts = np.array([[0.0, 0.0], [2.0, 3.0]])
    got = expected_bbox_area_2d_bernoulli(pts, [0.5, 0.4]).mean
    assert got == pytest.approx(6.0 * 0.5 * 0.4)


def test_max_max_matches_enumeration():
    rng = np.random.default_rng(8)
    pts, p = rng.random((9, 2)) + 0.5, rng.uniform(0.1, 0.9, 9)
    masks = (np.arange(2**9)[:, None] >> np.arange(9)) & 1 == 1
    w = subset_probabilities(9, BernoulliModel(p))
    vals = np.array([pts[m, 0].max() * pts[m, 1].max() if m.any() else 0.0 for m in masks])
    for scheme in ("quotient", "scaled"):
        assert max_max_2d(pts, p, scheme) == pytest.approx(float(w @ vals), rel=1e-12)


def test_corner_term_min_min():
    rng = np.random.default_rng(9)
    pts, p = rng.random((7, 2)), rng.uniform(0.1, 0.9, 7)
    masks = (np.arange(2**7)[:, None] >> np.arange(7)) & 1 == 1
    w = subset_probabilities(7, BernoulliModel(p))
    vals = np.array([pts[m, 0].min() * pts[m, 1].min() if m.any() else 0.0 for m in masks])
    assert corner_term_2d(pts, p, False, False) == pytest.approx(float(w @ vals), rel=1e-12)


def test_concise_sets_cover_each_maximum():
    pts = np.random.default_rng(2).random((6, 3))
    for cs in enumerate_concise_sets(pts):
        assert set(cs.argmax) == set(cs.members)
        sub = pts[list(cs.members)]
        assert np.allclose(cs.maxima, sub.max(axis=0))
        assert all(np.any(pts[j] > cs.maxima) for j in cs.dominating)


@given(st.integers(0, 2**31), st.integers(1, 9), st.sampled_from([2, 3]))
def test_bernoulli_engines_match_oracle(seed, n, d):
    rng = np.random.default_rng(seed)
    pts, p = rng.random((n, d)), rng.uniform(0.05, 0.95, n)
    want = oracle_moments(pts, BernoulliModel(p), "bbox").mean
    assert expected_bbox_volume_dd_bernoulli(pts, p).mean == pytest.approx(want, rel=1e-9, abs=1e-15)
    if d == 2:
        for scheme in ("quotient", "scaled"):
            got = expected_bbox_area_2d_bernoulli(pts, p, scheme).mean
            assert got == pytest.approx(want, rel=1e-9, abs=1e-15)


@given(st.integers(0, 2**31), st.integers(2, 9), st.sampled_from([2, 3, 4]))
def test_fixed_engine_matches_oracle_for_all_s(seed, n, d):
    pts = np.random.default_rng(seed).random((n, d))
    got = expected_bbox_volume_dd_fixed(pts).per_s
    want = oracle_per_s(pts, "bbox", subset_value_table(pts, "bbox"))[1:]
    assert np.allclose(got[:, 1], want[:, 1], rtol=1e-9, atol=1e-15)


def test_translation_invariance():
    pts = np.random.default_rng(5).random((8, 2))
    p = np.full(8, 0.4)
    a = expected_bbox_volume(pts, BernoulliModel(p)).mean
    b = expected_bbox_volume(pts + 1000.0, BernoulliModel(p)).mean
    assert b == pytest.approx(a, rel=1e-9)


def test_scale_equivariance():
    pts = np.random.default_rng(6).random((8, 3))
    a = expected_bbox_volume_dd_fixed(pts, 5).mean
    assert expected_bbox_volume_dd_fixed(2.0 * pts, 5).mean == pytest.approx(8.0 * a, rel=1e-12)


def test_monotone_in_s():
    means = expected_bbox_volume_dd_fixed(np.random.default_rng(3).random((10, 2))).per_s[:, 1]
    assert np.all(np.diff(means) >= -1e-15)


def test_dimension_cap():
    with pytest.raises(GeometryError):
        expected_bbox_volume_dd_fixed(np.random.default_rng(0).random((6, 5)), 3)


def test_dispatch():
    r = expected_bbox_volume(PLANAR, FixedSizeModel(4))
    assert r.distribution == "fixed" and r.s == 4 and r.per_s.shape == (7, 3)
