from .core import BoundarySample, NeighborhoodClass, Reach, ShapeKind
from .segment import ArcSegment, LineSegment
from .domain import (
    BoundarySampling,
    Domain,
    boundary_sample,
    catalog,
    horseshoe_tips,
    inside,
    sample_boundary_arrays,
)
from .projection import (
    BoundaryLocator,
    boundary_distance,
    delta_neighborhood_test,
    normal_coordinates,
    project_nu2,
    project_points,
    rho_map,
)
from .reach import estimate_reach, rolling_ball_margin
from .grid import GridDiscretization, sample_nodes
from .canvas import Canvas, render_preview

__all__ = [
    "ArcSegment",
    "BoundaryLocator",
    "BoundarySample",
    "BoundarySampling",
    "Canvas",
    "Domain",
    "GridDiscretization",
    "LineSegment",
    "NeighborhoodClass",
    "Reach",
    "ShapeKind",
    "boundary_distance",
    "boundary_sample",
    "catalog",
    "delta_neighborhood_test",
    "estimate_reach",
    "horseshoe_tips",
    "inside",
    "normal_coordinates",
    "project_nu2",
    "project_points",
    "render_preview",
    "rho_map",
    "rolling_ball_margin",
    "sample_boundary_arrays",
    "sample_nodes",
]
