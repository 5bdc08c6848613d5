import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import linalg, sparse

from ..errors import BudgetExceededError, ConfigurationError
from ..geometry import GridDiscretization
from .assembly import PolyharmonicOperator

logger = logging.getLogger(__name__)

DENSE_EIGEN_BUDGET = 4000
# e^{-(lam_n - lam_0) t} below 1e-16
_TRUNCATION_EXPONENT = -math.log(1e-16)
STENCIL_CONSTANT = 1.0

OperatorLike = Union[PolyharmonicOperator, np.ndarray, sparse.spmatrix]


@dataclass(frozen=True, eq=False)
class SpectralHeatKernel:
    """Eigenpairs of a discrete operator; eigenvectors are scaled by h^{-N/2}
    so that sum_x phi_n(x) phi_k(x) h^N = delta_nk."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    spacing: float
    m: int
    N: int
    grid: Optional[GridDiscretization] = None

    @property
    def node_count(self) -> int:
        return len(self.eigenvalues)

    @property
    def cell_volume(self) -> float:
        return self.spacing ** self.N

    def active_modes(self, t: float) -> int:
        cutoff = self.eigenvalues[0] + _TRUNCATION_EXPONENT / t
        return int(np.searchsorted(self.eigenvalues, cutoff, side="right"))

    def weights(self, t: float) -> Tuple[np.ndarray, int]:
        _require_time(t)
        count = self.active_modes(t)
        return np.exp(-self.eigenvalues[:count] * t), count

    def gram(self) -> np.ndarray:
        return self.eigenvectors.T @ self.eigenvectors * self.cell_volume

    def residuals(self, matrix: OperatorLike) -> np.ndarray:
        dense = _dense(matrix)
        vectors = self.eigenvectors
        diff = dense @ vectors - vectors * self.eigenvalues[None, :]
        return np.linalg.norm(diff, axis=0) / np.linalg.norm(vectors, axis=0)

    def semigroup(self, t: float) -> np.ndarray:
        """e^{-Ht} as a matrix acting on node values."""
        w, count = self.weights(t)
        phi = self.eigenvectors[:, :count]
        return (phi * w[None, :]) @ phi.T * self.cell_volume


def _require_time(t: float) -> None:
    if not t > 0:
        raise ConfigurationError("heat kernel time must be positive.")


def _dense(matrix: OperatorLike) -> np.ndarray:
    if isinstance(matrix, PolyharmonicOperator):
        return matrix.dense()
    if sparse.issparse(matrix):
        return matrix.toarray()
    return np.asarray(matrix, dtype=float)


def spectral_decompose(operator: OperatorLike, budget: int = DENSE_EIGEN_BUDGET) -> SpectralHeatKernel:
    if isinstance(operator, PolyharmonicOperator):
        spacing, m, N, grid = operator.spacing, operator.m, operator.dimension, operator.grid
    else:
        spacing, m, N, grid = 1.0, 1, 1, None

    dense = _dense(operator)
    size = dense.shape[0]
    if dense.ndim != 2 or dense.shape[1] != size:
        raise ConfigurationError("spectral_decompose requires a square matrix.")
    if size > budget:
        raise BudgetExceededError(
            f"{size} nodes exceed the dense eigensolver budget of {budget}; use a coarser grid."
        )
    if not np.allclose(dense, dense.T, rtol=0.0, atol=1e-12 * max(1.0, np.abs(dense).max())):
        raise ConfigurationError("spectral_decompose requires a symmetric matrix.")

    values, vectors = linalg.eigh(dense)
    vectors = vectors / math.sqrt(spacing ** N)
    kernel = SpectralHeatKernel(values, vectors, spacing, m, N, grid)
    logger.debug(
        "eigendecomposition of %d x %d: lambda in [%.6g, %.6g]",
        size, size, values[0], values[-1],
    )
    return kernel


def heat_kernel_eval(spec: SpectralHeatKernel, t: float, x: int, y: int) -> float:
    w, count = spec.weights(t)
    phi = spec.eigenvectors
    return float(np.sum(w * phi[x, :count] * phi[y, :count]))


def kernel_matrix(spec: SpectralHeatKernel, t: float) -> np.ndarray:
    """K(t, x, y) for all node pairs."""
    w, count = spec.weights(t)
    phi = spec.eigenvectors[:, :count]
    return (phi * w[None, :]) @ phi.T


def kernel_diagonal(spec: SpectralHeatKernel, t: float) -> np.ndarray:
    w, count = spec.weights(t)
    return (spec.eigenvectors[:, :count] ** 2) @ w


def resolved_regime(spec: SpectralHeatKernel, stencil_constant: float = STENCIL_CONSTANT) -> Tuple[float, float]:
    """Times where the discrete kernel stands in for the continuum one:
    t >= 10 c h^{2m} and lam_min t <= 30."""
    t_min = 10.0 * stencil_constant * spec.spacing ** (2 * spec.m)
    t_max = 30.0 / spec.eigenvalues[0]
    return t_min, t_max


@dataclass(frozen=True)
class OnDiagonalScan:
    times: Tuple[float, ...]
    scaled_sup: Tuple[float, ...]

    @property
    def spread(self) -> float:
        return max(self.scaled_sup) / min(self.scaled_sup)


def on_diagonal_scan(spec: SpectralHeatKernel, times: Sequence[float]) -> OnDiagonalScan:
    """sup_x K(t, x, x) t^{N/2m} for each t."""
    if not times:
        raise ConfigurationError("on_diagonal_scan needs at least one time.")
    exponent = spec.N / (2.0 * spec.m)
    values: List[float] = []
    for t in times:
        values.append(float(kernel_diagonal(spec, t).max()) * t ** exponent)
    scan = OnDiagonalScan(tuple(float(t) for t in times), tuple(values))
    logger.info("on-diagonal scan over %d times: spread %.4g", len(values), scan.spread)
    return scan


def log_times(t_min: float, t_max: float, count: int) -> List[float]:
    if not 0 < t_min < t_max:
        raise ConfigurationError("time window must satisfy 0 < t_min < t_max.")
    return [float(t) for t in np.geomspace(t_min, t_max, count)]
