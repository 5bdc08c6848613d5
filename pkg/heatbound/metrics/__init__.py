from .distance import (
    DistanceField,
    MetricEstimate,
    MetricMethod,
    RefinementStudy,
    distance_field,
    euclidean_distance,
    geodesic_distance,
    geodesic_refinement,
    grid_tolerance,
)
from .visibility import reflex_corners, shortest_polygon_path, visibility_distance, visibility_path
from .mollifier import MollifierKernel, mollifier_constant, multi_indices
from .riemannian import (
    SANDWICH_COLUMNS,
    CorollaryCheck,
    RegularityCheck,
    SandwichRow,
    check_corollary_euclidean,
    check_corollary_lipschitz,
    check_corollary_projection,
    check_test_function_regularity,
    finsler_scaling_bound,
    mollified_distance_function,
    penult_lower,
    riemannian_type_estimate,
    sample_pairs,
    sandwich_factor,
    sandwich_rows,
    witness_values,
)

__all__ = [
    "CorollaryCheck",
    "DistanceField",
    "MetricEstimate",
    "MetricMethod",
    "MollifierKernel",
    "RefinementStudy",
    "RegularityCheck",
    "SANDWICH_COLUMNS",
    "SandwichRow",
    "check_corollary_euclidean",
    "check_corollary_lipschitz",
    "check_corollary_projection",
    "check_test_function_regularity",
    "distance_field",
    "euclidean_distance",
    "finsler_scaling_bound",
    "geodesic_distance",
    "geodesic_refinement",
    "grid_tolerance",
    "mollified_distance_function",
    "mollifier_constant",
    "multi_indices",
    "penult_lower",
    "reflex_corners",
    "riemannian_type_estimate",
    "sample_pairs",
    "sandwich_factor",
    "sandwich_rows",
    "shortest_polygon_path",
    "visibility_distance",
    "visibility_path",
    "witness_values",
]
