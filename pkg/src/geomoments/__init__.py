"""Exact and approximate moments of geometric measures on random subsets of a
point set, under the Bernoulli and the fixed-size sampling models."""

from .bbox import expected_bbox_area_2d_bernoulli, expected_bbox_volume, expected_bbox_volume_dd_fixed
from .centroid import centroid_moments
from .dataio import Dataset, generate, read_csv, write_result
from .engines import compute_moments
from .geometry import GeneralPositionError, GeometryError, PointSet
from .hull import expected_hull_volume
from .models import BernoulliModel, FixedSizeModel, ModelError, MomentResult
from .mpd import mpd_approx_moments, mpd_exact_moments
from .oracle import MeasureKind, ScopeError, monte_carlo_moments, oracle_moments
from .product_tree import ProductTree
from .sed import expected_sed_diameter
from .wspd import build_split_tree, sum_per_point, wspd_pairs

__version__ = "0.1.0"

__all__ = [
    "BernoulliModel",
    "Dataset",
    "FixedSizeModel",
    "GeneralPositionError",
    "GeometryError",
    "MeasureKind",
    "ModelError",
    "MomentResult",
    "PointSet",
    "ProductTree",
    "ScopeError",
    "build_split_tree",
    "centroid_moments",
    "compute_moments",
    "expected_bbox_area_2d_bernoulli",
    "expected_bbox_volume",
    "expected_bbox_volume_dd_fixed",
    "expected_hull_volume",
    "expected_sed_diameter",
    "generate",
    "monte_carlo_moments",
    "mpd_approx_moments",
    "mpd_exact_moments",
    "oracle_moments",
    "read_csv",
    "sum_per_point",
    "write_result",
    "wspd_pairs",
]
