import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import FROZEN_BERNOULLI, FROZEN_PLANAR_S4, PLANAR, PLANAR_PROBS, rel_err
from geomoments.geometry import GeneralPositionError, GeometryError
from geomoments.models import BernoulliModel, FixedSizeModel
from geomoments.oracle import oracle_moments
from geomoments.sed import (
    expected_sed_diameter,
    no_candidate_probability,
    sed_candidates,
    triple_sweep_F,
)


def test_frozen_values():
    assert rel_err(expected_sed_diameter(PLANAR, BernoulliModel(PLANAR_PROBS)).mean, FROZEN_BERNOULLI["sed"]) < 1e-12
    assert rel_err(expected_sed_diameter(PLANAR, FixedSizeModel(4)).mean, FROZEN_PLANAR_S4["sed"][0]) < 1e-12


def test_two_points_deterministic():
    assert expected_sed_diameter([[0.0, 0.0], [3.0, 4.0]], FixedSizeModel(2)).mean == pytest.approx(5.0)


def test_near_right_triangle():
    # the angle at the origin is just under 90 degrees, so the circumdisk wins
    # by a hair over the hypotenuse disk
    pts = np.array([[0.0, 0.0], [4.0, 0.001], [0.0, 3.0]])
    got = expected_sed_diameter(pts, FixedSizeModel(3)).mean
    assert got == pytest.approx(5.0, rel=1e-3)
    assert got == pytest.approx(oracle_moments(pts, FixedSizeModel(3), "sed").mean, rel=1e-12)
    assert got > np.hypot(4.0, 3.0 - 0.001)


def test_equilateral_triangle_uses_circumdisk():
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, np.sqrt(3) / 2 + 1e-9]])
    assert expected_sed_diameter(pts, FixedSizeModel(3)).mean == pytest.approx(2 / np.sqrt(3), rel=1e-6)


def test_obtuse_triangle_contributes_nothing():
    pts = np.array([[0.0, 0.0], [4.0, 0.0], [2.0, 0.5]])
    assert triple_sweep_F(0, 1, pts, FixedSizeModel(3)) == 0.0
    assert expected_sed_diameter(pts, FixedSizeModel(3)).mean == pytest.approx(4.0)


@given(st.integers(0, 2**31), st.integers(2, 10))
def test_fixed_matches_oracle(seed, n):
    rng = np.random.default_rng(seed)
    pts = rng.random((n, 2))
    s = int(rng.integers(2, n + 1))
    dist = FixedSizeModel(s)
    mean, mass = sed_candidates(pts, dist, validate=True)
    assert mean == pytest.approx(oracle_moments(pts, dist, "sed").mean, rel=1e-9)
    assert mass == pytest.approx(1.0, abs=1e-9)


@given(st.integers(0, 2**31), st.integers(1, 10))
def test_bernoulli_matches_oracle(seed, n):
    rng = np.random.default_rng(seed)
    pts, p = rng.random((n, 2)), rng.uniform(0.05, 0.95, n)
    dist = BernoulliModel(p)
    mean, mass = sed_candidates(pts, dist, validate=True)
    assert mean == pytest.approx(oracle_moments(pts, dist, "sed").mean, rel=1e-9, abs=1e-15)
    assert mass == pytest.approx(1.0 - no_candidate_probability(dist, n), abs=1e-9)


def test_scale_equivariance():
    pts = np.random.default_rng(2).random((12, 2))
    dist = FixedSizeModel(5)
    a = expected_sed_diameter(pts, dist).mean
    assert expected_sed_diameter(3.5 * pts, dist).mean == pytest.approx(3.5 * a, rel=1e-12)


def test_concyclic_points_rejected():
    ang = np.array([0.1, 1.3, 2.9, 4.4])
    pts = np.column_stack([np.cos(ang), np.sin(ang)])
    with pytest.raises(GeneralPositionError):
        expected_sed_diameter(pts, FixedSizeModel(3))


def test_planar_only():
    with pytest.raises(GeometryError):
        expected_sed_diameter(np.random.default_rng(0).random((5, 3)), FixedSizeModel(3))
