from .heat_bounds import *
from .errors import *

__version__ = "0.1.0"
__all__ = [
    "BoundParameters",
    "BoundReport",
    "Domain",
    "FreeKernel",
    "GridDiscretization",
    "Scenario",
    "SpectralHeatKernel",
    "assemble_polyharmonic",
    "bound_contrast",
    "boundary_sample",
    "conequiv_backward",
    "conequiv_forward",
    "estimate_reach",
    "fit_decay_constant",
    "free_kernel_fourier",
    "gaussian_bound_rhs",
    "geodesic_distance",
    "heat_kernel_eval",
    "list_catalog",
    "mollifier_constant",
    "project_nu2",
    "riemannian_type_estimate",
    "run_scenario",
    "sigma_m",
    "spectral_decompose",
    "verify_bound",
    "HeatboundError",
    "ConfigurationError",
    "GeometryError",
    "ReachError",
    "ProjectionError",
    "DisconnectedError",
    "QuadratureError",
    "BudgetExceededError",
]
