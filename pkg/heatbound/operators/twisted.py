import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..errors import BudgetExceededError, ConfigurationError
from .assembly import PolyharmonicOperator
from .spectral import SpectralHeatKernel, spectral_decompose

logger = logging.getLogger(__name__)

OVERFLOW_GUARD = 200.0
POWER_TOL = 1e-8
POWER_MAX_ITER = 5000


@lru_cache(maxsize=8)
def operator_spectrum(operator: PolyharmonicOperator) -> SpectralHeatKernel:
    return spectral_decompose(operator)


def ramp_phi(operator: PolyharmonicOperator, beta: float, axis: int = 0) -> np.ndarray:
    """tanh(beta x_axis)/beta: |phi'| <= 1 and |phi''| <= beta."""
    if not beta > 0:
        raise ConfigurationError("ramp steepness beta must be positive.")
    x = operator.grid.points[:, axis]
    return np.tanh(beta * x) / beta


def _weights(phi: np.ndarray, alpha: float) -> np.ndarray:
    span = float(phi.max() - phi.min()) if phi.size else 0.0
    if abs(alpha) * span > OVERFLOW_GUARD:
        raise BudgetExceededError(
            f"alpha * range(phi) = {abs(alpha) * span:.4g} exceeds the overflow guard {OVERFLOW_GUARD:g}."
        )
    # centring phi leaves the similarity unchanged and keeps e^{alpha phi} near 1
    return np.exp(alpha * (phi - 0.5 * (phi.max() + phi.min())))


def power_norm(matrix: np.ndarray, tol: float = POWER_TOL, max_iter: int = POWER_MAX_ITER, seed: int = 0) -> float:
    """Operator 2-norm by power iteration on M^T M."""
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(matrix.shape[1])
    x /= np.linalg.norm(x)
    previous = 1.0
    for _ in range(max_iter):
        x = matrix.T @ (matrix @ x)
        value = float(np.linalg.norm(x))
        if value == 0.0:
            return 0.0
        x /= value
        if abs(value - previous) / previous < tol:
            return math.sqrt(value)
        previous = value
    logger.warning("power iteration did not reach %.1g in %d steps; using the SVD norm", tol, max_iter)
    return float(np.linalg.norm(matrix, 2))


def twisted_semigroup_norm(operator: PolyharmonicOperator, phi, alpha: float, t: float) -> float:
    """|| e^{-H_{alpha phi} t} || with H_{alpha phi} = D H D^{-1}, D = diag(e^{alpha phi})."""
    if not t > 0:
        raise ConfigurationError("semigroup time must be positive.")
    phi = np.asarray(phi, dtype=float)
    if phi.shape != (operator.node_count,):
        raise ConfigurationError("phi must have one value per grid node.")
    if not np.all(np.isfinite(phi)):
        raise ConfigurationError("phi must be bounded on the nodes.")
    d = _weights(phi, alpha)
    semigroup = operator_spectrum(operator).semigroup(t)
    return power_norm(d[:, None] * semigroup / d[None, :])


@dataclass(frozen=True)
class GrowthSample:
    alpha: float
    beta: float
    t: float
    norm: float


@dataclass(frozen=True)
class GrowthScan:
    samples: Tuple[GrowthSample, ...]
    k_order: float
    k_four: float
    m: int

    @property
    def finite(self) -> bool:
        return math.isfinite(self.k_order) and math.isfinite(self.k_four)

    def bound(self, sample: GrowthSample, exponent: int, k: Optional[float] = None) -> float:
        if k is None:
            k = self.k_four if exponent == 4 else self.k_order
        try:
            return math.exp(k * _growth_weight(sample, exponent))
        except OverflowError:
            return math.inf

    def violations(self, k: float, exponent: int) -> Tuple[GrowthSample, ...]:
        """Samples with norm > exp[k(1 + alpha^p + beta^p) t], compared in log space."""
        return tuple(
            s for s in self.samples
            if s.norm > 0 and math.log(s.norm) > k * _growth_weight(s, exponent) + 1e-12
        )

    def held_out_k(self, exponent: int) -> float:
        """k fitted on every time but the last; samples at the last time are left to test it."""
        last = max(s.t for s in self.samples)
        fit = [s for s in self.samples if s.t < last]
        if not fit:
            raise ConfigurationError("a held-out growth fit needs at least two distinct times.")
        return _required_k(fit, exponent)


def _growth_weight(sample: GrowthSample, exponent: int) -> float:
    return (1.0 + sample.alpha ** exponent + sample.beta ** exponent) * sample.t


def _required_k(samples: Sequence[GrowthSample], exponent: int) -> float:
    needed = [math.log(s.norm) / _growth_weight(s, exponent) for s in samples if s.norm > 0]
    return max([0.0] + needed)


def twisted_growth_scan(
    operator: PolyharmonicOperator,
    alphas: Sequence[float],
    betas: Sequence[float],
    times: Sequence[float],
) -> GrowthScan:
    """Smallest k with norm <= exp[k(1 + alpha^p + beta^p) t] over the scan,
    for p = 2m and p = 4."""
    samples: List[GrowthSample] = []
    for beta in betas:
        phi = ramp_phi(operator, beta)
        for alpha in alphas:
            for t in times:
                value = twisted_semigroup_norm(operator, phi, alpha, t)
                samples.append(GrowthSample(float(alpha), float(beta), float(t), value))
    scan = GrowthScan(
        samples=tuple(samples),
        k_order=_required_k(samples, 2 * operator.m),
        k_four=_required_k(samples, 4),
        m=operator.m,
    )
    logger.info("twisted growth scan: k(2m)=%.6g, k(4)=%.6g over %d samples", scan.k_order, scan.k_four, len(samples))
    return scan


@dataclass(frozen=True)
class FormPerturbation:
    epsilon: float
    c_epsilon: float
    samples: int


def twisted_form_perturbation(
    operator: PolyharmonicOperator,
    phi,
    alpha: float,
    beta: float,
    samples: int = 64,
    epsilon: float = 0.5,
    seed: int = 0,
) -> FormPerturbation:
    """Smallest c with |Q_{alpha phi}(f) - Q(f)| <= eps Q(f) + c (1 + alpha^2m + beta^2m) ||f||^2
    over random node functions and the lowest modes."""
    if not epsilon > 0:
        raise ConfigurationError("epsilon must be positive.")
    if samples < 1:
        raise ConfigurationError("form perturbation needs at least one sample.")
    phi = np.asarray(phi, dtype=float)
    d = _weights(phi, alpha)
    rng = np.random.default_rng(seed)

    modes = operator_spectrum(operator).eigenvectors[:, : min(samples, operator.node_count)]
    trials = np.hstack((modes, rng.standard_normal((operator.node_count, samples))))
    matrix = operator.matrix
    scale = 1.0 + alpha ** (2 * operator.m) + beta ** (2 * operator.m)

    worst = 0.0
    for f in trials.T:
        q = operator.quadratic_form(f)
        twisted = float(f @ (d * (matrix @ (f / d)))) * operator.spacing ** operator.dimension
        excess = abs(twisted - q) - epsilon * q
        worst = max(worst, excess / (scale * operator.norm_squared(f)))
    logger.debug("form perturbation alpha=%.3g beta=%.3g: c_eps=%.6g", alpha, beta, worst)
    return FormPerturbation(float(epsilon), float(worst), trials.shape[1])
