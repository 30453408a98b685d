import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import FROZEN_PLANAR_S4, FROZEN_SPATIAL_S4, PLANAR, SPATIAL, rel_err
from geomoments.centroid import centroid_moments, centroid_per_s, coincidence_table, set_partitions
from geomoments.models import ModelError
from geomoments.oracle import oracle_per_s


def test_partition_counts():
    assert [len(set_partitions(k)) for k in range(6)] == [1, 1, 2, 5, 15, 52]


def test_coincidence_table_inverts_unrestricted_sums():
    # with every factor equal to one, F(sigma) = n^{|sigma|} and c_j must be the
    # number of k-tuples over n symbols with exactly j distinct values
    for k in range(1, 5):
        parts = set_partitions(k)
        n = 7
        coeff = np.zeros(k + 1)
        for idx, contrib in coincidence_table(k):
            for j, mu in contrib:
                coeff[j] += mu * n ** len(parts[idx])
        for j in range(1, k + 1):
            blocks = sum(1 for p in parts if len(p) == j)
            assert coeff[j] == blocks * math.perm(n, j)


def test_frozen_values():
    for pts, frozen in ((PLANAR, FROZEN_PLANAR_S4), (SPATIAL, FROZEN_SPATIAL_S4)):
        r = centroid_moments(pts, 4)
        mean, var = frozen["centroid"]
        assert rel_err(r.mean, mean) < 1e-12 and rel_err(r.variance, var) < 1e-10


def test_two_points():
    pts = np.array([[0.0, 0.0], [2.0, 0.0]])
    rows = centroid_per_s(pts)
    assert rows[0].tolist() == [1.0, 0.0, 0.0]
    assert rows[1, 1] == pytest.approx(1.0) and rows[1, 2] == 0.0


@given(st.integers(0, 2**31), st.integers(1, 12), st.sampled_from([1, 2, 3, 5]))
def test_matches_oracle_for_all_s(seed, n, d):
    pts = np.random.default_rng(seed).random((n, d))
    got = centroid_per_s(pts)
    want = oracle_per_s(pts, "centroid")[1:]
    assert np.allclose(got[:, 1], want[:, 1], rtol=1e-9, atol=1e-14)
    assert np.allclose(got[:, 2], want[:, 2], rtol=1e-9, atol=1e-14)


def test_translation_and_scale():
    pts = np.random.default_rng(1).random((10, 3))
    a = centroid_per_s(pts)
    b = centroid_per_s(3.0 * pts + 50.0)
    assert np.allclose(b[:, 1], 9.0 * a[:, 1], rtol=1e-9)
    assert np.allclose(b[:, 2], 81.0 * a[:, 2], rtol=1e-7, atol=1e-14)


def test_full_set_is_deterministic():
    pts = np.random.default_rng(2).random((30, 2))
    rows = centroid_per_s(pts)
    assert rows[-1, 2] == 0.0
    assert rows[-1, 1] == pytest.approx(float(((pts - pts.mean(0)) ** 2).sum(1).mean()), rel=1e-12)
    assert np.all(rows[:, 2] >= 0.0)


def test_rejects_bad_s():
    with pytest.raises(ModelError):
        centroid_moments(PLANAR, 0)
