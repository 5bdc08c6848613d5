import logging
import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
from scipy import integrate, special

from ..errors import ConfigurationError, QuadratureError

logger = logging.getLogger(__name__)

QUADRATURE_FLOOR = 1e-13
DEFAULT_WINDOW = (10.0, 40.0)
# e^{-u^{2m}} is below e^{-45} past this frequency
_CUTOFF_EXPONENT = 45.0
_MASS_WINDOW_END = 110.0


def _check(m: int, N: int, t: float) -> None:
    if m < 1:
        raise ConfigurationError("free kernel requires m >= 1.")
    if N != 1:
        raise ConfigurationError("free kernel quadrature is implemented for N = 1 only.")
    if not t > 0:
        raise ConfigurationError("t must be positive.")


def _cutoff(m: int) -> float:
    return _CUTOFF_EXPONENT ** (1.0 / (2 * m))


def free_kernel_origin(m: int, t: float = 1.0) -> float:
    """K(t, 0, 0) = Gamma(1 + 1/2m) / (pi t^{1/2m})."""
    return special.gamma(1.0 + 1.0 / (2 * m)) / math.pi * t ** (-1.0 / (2 * m))


def _unit_time_kernel(m: int, s: float) -> float:
    """(1/pi) int_0^inf e^{-u^{2m}} cos(u s) du."""
    profile = lambda u: math.exp(-(u ** (2 * m)))
    upper = _cutoff(m)
    if s == 0.0:
        value, _ = integrate.quad(profile, 0.0, upper, epsabs=1e-16, epsrel=1e-13, limit=200)
    else:
        value, _ = integrate.quad(profile, 0.0, upper, weight="cos", wvar=s, epsabs=1e-16, epsrel=1e-13, limit=400)
    return value / math.pi


def free_kernel_fourier(m: int, N: int, t: float, d: float) -> float:
    """K(t, 0, d) = (1/2pi) int e^{-xi^{2m} t} cos(xi d) dxi, via the scaling
    K(t, 0, d) = t^{-1/2m} K(1, 0, d t^{-1/2m})."""
    _check(m, N, t)
    scale = t ** (-1.0 / (2 * m))
    value = scale * _unit_time_kernel(m, abs(d) * scale)
    if abs(value) < QUADRATURE_FLOOR * free_kernel_origin(m, t):
        raise QuadratureError(
            f"amplitude below quadrature floor at m={m}, t={t:g}, d={d:g} (|K| = {abs(value):.3g})."
        )
    return value


def free_kernel_mass(m: int, t: float = 1.0) -> float:
    """int K(t, 0, x) dx over |x| <= L with L at decay argument 110; the x
    integral is done first, leaving (2/pi) int e^{-u^{2m}} sin(uL)/u du."""
    _check(m, 1, t)
    reach = _MASS_WINDOW_END ** ((2 * m - 1) / (2.0 * m))
    integrand = lambda u: math.exp(-(u ** (2 * m))) * reach * np.sinc(u * reach / math.pi)
    value, _ = integrate.quad(integrand, 0.0, _cutoff(m), epsabs=1e-14, epsrel=1e-13, limit=1000)
    return 2.0 * value / math.pi


@dataclass(frozen=True)
class DecayFit:
    m: int
    c2: float
    window: Tuple[float, float]
    points: int
    residual: float


def fit_decay_constant(
    m: int,
    window: Tuple[float, float] = DEFAULT_WINDOW,
    t: float = 1.0,
    samples: int = 1200,
) -> DecayFit:
    """Least-squares decay rate of the envelope of |K(t, 0, d)| against
    X = d^{2m/(2m-1)} t^{-1/(2m-1)} after removing the X^{-(m-1)/(2m)} prefactor.
    For m >= 2 the kernel oscillates, so only local maxima of |K| enter the fit."""
    lo, hi = window
    if not 0 < lo < hi:
        raise ConfigurationError("fit window must satisfy 0 < lo < hi.")
    xs = np.linspace(lo, hi, samples)
    # invert X -> d at fixed t
    d = (xs * t ** (1.0 / (2 * m - 1))) ** ((2 * m - 1) / (2.0 * m))
    values = np.abs([free_kernel_fourier(m, 1, t, float(v)) for v in d])

    if m == 1:
        picks = np.arange(samples)
    else:
        inner = np.arange(1, samples - 1)
        picks = inner[(values[inner] >= values[inner - 1]) & (values[inner] >= values[inner + 1])]
        if picks.size < 3:
            raise ConfigurationError(f"window {window} holds only {picks.size} envelope extrema; widen it.")

    x = xs[picks]
    y = np.log(values[picks]) + (m - 1) / (2.0 * m) * np.log(x)
    slope, intercept = np.polyfit(x, y, 1)
    residual = float(np.max(np.abs(y - (slope * x + intercept))))
    fit = DecayFit(m=m, c2=float(-slope), window=(float(lo), float(hi)), points=int(picks.size), residual=residual)
    logger.info("free kernel m=%d: fitted c2=%.8g from %d points in %s", m, fit.c2, fit.points, fit.window)
    return fit


def free_kernel_samples(m: int, times: Sequence[float], distances: Sequence[float]) -> np.ndarray:
    """Rows (t, d, K) over the grid times x distances, skipping points below the floor."""
    rows = []
    for t in times:
        for d in distances:
            try:
                rows.append((float(t), float(d), free_kernel_fourier(m, 1, t, d)))
            except QuadratureError:
                logger.debug("skipping t=%g d=%g below the quadrature floor", t, d)
    return np.asarray(rows, dtype=float).reshape(-1, 3)
