import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from geomoments.geometry import (
    GeneralPositionError,
    GeometryError,
    PointSet,
    check_general_position,
    circumdisk,
    diametral_disk,
    disk_contains,
    disk_side,
    euclidean_distance,
    simplex_volume,
)


def test_pointset_basic():
    ps = PointSet([[0.0, 0.1], [1.0, 2.0], [3.0, 0.5]])
    assert ps.n == 3 and ps.dim == 2 and len(ps) == 3
    with pytest.raises(ValueError):
        ps.coords[0, 0] = 5.0


def test_pointset_single_point():
    assert PointSet([[0.3, 0.7]]).n == 1


@pytest.mark.parametrize("bad", [[[0.0, math.nan]], [[math.inf, 1.0]]])
def test_rejects_non_finite(bad):
    with pytest.raises(GeometryError):
        PointSet(bad)


def test_shared_coordinate_names_both_rows():
    with pytest.raises(GeneralPositionError) as exc:
        PointSet([[0.0, 1.0], [2.0, 3.0], [0.0, 4.0]])
    assert exc.value.rows == (0, 2)


def test_collinear_triple_rejected():
    with pytest.raises(GeneralPositionError) as exc:
        check_general_position(np.array([[0.0, 0.0], [1.0, 1.1], [2.0, 2.2], [0.5, 3.0]]))
    assert set(exc.value.rows) == {0, 1, 2}


def test_coplanar_quadruple_rejected():
    pts = np.array([[0, 0, 0.0], [1, 0.1, 0.2], [0.3, 1, 0.4], [1.3, 1.1, 0.6], [0.2, 0.5, 2.0]])
    with pytest.raises(GeneralPositionError):
        check_general_position(pts)


def test_sampled_check_on_large_input():
    check_general_position(np.random.default_rng(0).random((200, 3)))


def test_distance_and_simplex():
    assert euclidean_distance([0, 0], [3, 4]) == 5.0
    assert simplex_volume([[0, 0], [1, 0], [0, 1]]) == pytest.approx(0.5)
    assert simplex_volume([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]]) == pytest.approx(1 / 6)


def test_circumdisk_equilateral():
    d = circumdisk([0, 0], [1, 0], [0.5, math.sqrt(3) / 2])
    assert d.diameter == pytest.approx(2 / math.sqrt(3))


def test_circumdisk_collinear_raises():
    with pytest.raises(GeneralPositionError):
        circumdisk([0, 0], [1, 1], [2, 2])


def test_disk_boundary_conventions():
    d = diametral_disk([0, 0], [2, 0])
    assert disk_side(d, (0.0, 0.0)) == 0
    assert disk_contains(d, (0.0, 0.0)) and not disk_contains(d, (0.0, 0.0), closed=False)
    assert disk_side(d, (1.0, 0.5)) == -1 and disk_side(d, (3.0, 0.0)) == 1


@given(st.integers(0, 10_000))
def test_circumdisk_passes_through_vertices(seed):
    p, q, t = np.random.default_rng(seed).random((3, 2))
    d = circumdisk(p, q, t)
    for v in (p, q, t):
        assert math.hypot(v[0] - d.center[0], v[1] - d.center[1]) == pytest.approx(d.radius, rel=1e-7)
