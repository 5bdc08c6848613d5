from .bounds import (
    BoundParameters,
    BoundReport,
    FreeKernel,
    bound_contrast,
    conequiv_backward,
    conequiv_forward,
    fit_decay_constant,
    free_kernel_fourier,
    gaussian_bound_rhs,
    sigma_m,
    verify_bound,
)
from .cli import Scenario, list_catalog, run_scenario
from .geometry import Domain, GridDiscretization, boundary_sample, estimate_reach, project_nu2
from .metrics import geodesic_distance, mollifier_constant, riemannian_type_estimate
from .operators import SpectralHeatKernel, assemble_polyharmonic, heat_kernel_eval, spectral_decompose

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
]
