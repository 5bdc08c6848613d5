from .params import RATIO_COLUMNS, BoundParameters, BoundReport, RatioSample
from .gaussian import (
    conequiv_backward,
    conequiv_forward,
    decay_argument,
    gaussian_bound_rhs,
    sharp_decay_constant,
    sigma_m,
    sigma_m_exact,
)
from .free_kernel import (
    QUADRATURE_FLOOR,
    DecayFit,
    fit_decay_constant,
    free_kernel_fourier,
    free_kernel_mass,
    free_kernel_origin,
    free_kernel_samples,
)
from .verify import (
    BOUND_KINDS,
    ContrastReport,
    FreeKernel,
    MetricPair,
    PairDistance,
    bound_contrast,
    free_pairs,
    kernel_values,
    metric_pairs,
    tip_pairs,
    verify_bound,
)

__all__ = [
    "BOUND_KINDS",
    "BoundParameters",
    "BoundReport",
    "ContrastReport",
    "DecayFit",
    "FreeKernel",
    "MetricPair",
    "PairDistance",
    "QUADRATURE_FLOOR",
    "RATIO_COLUMNS",
    "RatioSample",
    "bound_contrast",
    "conequiv_backward",
    "conequiv_forward",
    "decay_argument",
    "fit_decay_constant",
    "free_kernel_fourier",
    "free_kernel_mass",
    "free_kernel_origin",
    "free_kernel_samples",
    "free_pairs",
    "gaussian_bound_rhs",
    "kernel_values",
    "metric_pairs",
    "sharp_decay_constant",
    "sigma_m",
    "sigma_m_exact",
    "tip_pairs",
    "verify_bound",
]
