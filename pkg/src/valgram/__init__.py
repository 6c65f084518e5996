"""phi-covariograms of convex polygons: evaluation, determination results,
counterexample constructions and chord-length statistics."""

from .covariogram import (
    CovGrid,
    core,
    cov_at,
    cov_grid,
    covariogram,
    inscribed_parallelogram,
    radial_derivative,
)
from .determination import (
    covariograms_equal,
    curvature_info,
    length_pair_from_cov,
    recover_scale,
    symmetry_test_and_reconstruct,
    synisothesis_check,
)
from .geometry import Polygon, Segment, convex_hull, difference_body, intersect, minkowski_sum
from .valuations import DiskBall, FullPlane, PolygonBall, StripBall, Valuation, per_B

__version__ = "0.1.0"
