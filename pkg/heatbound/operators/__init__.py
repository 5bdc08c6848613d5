from .core import EllipticFormSpec, SymbolSpec, order_indices
from .assembly import PolyharmonicOperator, assemble_polyharmonic
from .spectral import (
    DENSE_EIGEN_BUDGET,
    OnDiagonalScan,
    SpectralHeatKernel,
    heat_kernel_eval,
    kernel_diagonal,
    kernel_matrix,
    log_times,
    on_diagonal_scan,
    resolved_regime,
    spectral_decompose,
)
from .twisted import (
    FormPerturbation,
    GrowthSample,
    GrowthScan,
    operator_spectrum,
    power_norm,
    ramp_phi,
    twisted_form_perturbation,
    twisted_growth_scan,
    twisted_semigroup_norm,
)
from .symbol import ConvexityCheck, ellipticity_constants, quadratic_form, strong_convexity_check
from .snapshot import SpectrumDiff, diff_spectra, load_snapshot, spectrum_snapshot, write_snapshot

__all__ = [
    "ConvexityCheck",
    "DENSE_EIGEN_BUDGET",
    "EllipticFormSpec",
    "FormPerturbation",
    "GrowthSample",
    "GrowthScan",
    "OnDiagonalScan",
    "PolyharmonicOperator",
    "SpectralHeatKernel",
    "SpectrumDiff",
    "SymbolSpec",
    "assemble_polyharmonic",
    "diff_spectra",
    "ellipticity_constants",
    "heat_kernel_eval",
    "kernel_diagonal",
    "kernel_matrix",
    "load_snapshot",
    "log_times",
    "on_diagonal_scan",
    "operator_spectrum",
    "order_indices",
    "power_norm",
    "quadratic_form",
    "ramp_phi",
    "resolved_regime",
    "spectral_decompose",
    "spectrum_snapshot",
    "strong_convexity_check",
    "twisted_form_perturbation",
    "twisted_growth_scan",
    "twisted_semigroup_norm",
    "write_snapshot",
]
