import math
from typing import Union

import numpy as np
from mpmath import mp

from ..errors import ConfigurationError
from .params import BoundParameters

ArrayLike = Union[float, np.ndarray]

SIGMA_DPS = 50


def sigma_m_exact(m: int, dps: int = SIGMA_DPS) -> mp.mpf:
    """(2m-1) (2m)^{-2m/(2m-1)} sin(pi/(4m-2)) at ``dps`` digits."""
    if m < 1:
        raise ConfigurationError("sigma_m requires m >= 1.")
    with mp.workdps(dps):
        two_m = mp.mpf(2 * m)
        return (two_m - 1) * two_m ** (-two_m / (two_m - 1)) * mp.sin(mp.pi / (2 * two_m - 2))


def sigma_m(m: int) -> float:
    return float(sigma_m_exact(m))


def sharp_decay_constant(m: int, mu: float = 1.0, epsilon: float = 0.0) -> float:
    """(sigma_m - epsilon) mu^{-1/(2m-1)}."""
    if mu < 1.0:
        raise ConfigurationError("mu must be at least 1.")
    sigma = sigma_m(m)
    if not 0 <= epsilon < sigma:
        raise ConfigurationError("epsilon must lie in [0, sigma_m).")
    return (sigma - epsilon) * mu ** (-1.0 / (2 * m - 1))


def decay_argument(d: ArrayLike, t: ArrayLike, m: int) -> ArrayLike:
    """d^{2m/(2m-1)} t^{-1/(2m-1)}."""
    p = 2.0 * m / (2 * m - 1)
    return np.power(d, p) * np.power(t, -1.0 / (2 * m - 1))


def gaussian_bound_rhs(
    params: BoundParameters,
    d: ArrayLike,
    t: ArrayLike,
    metric_exponent_active: bool = True,
) -> ArrayLike:
    """c1 t^{-N/2m} exp[-c2 d^{2m/(2m-1)} t^{-1/(2m-1)} + k t]; with the metric
    term switched off this is the on-diagonal shape c1 t^{-N/2m} e^{kt}."""
    t_arr = np.asarray(t, dtype=float)
    d_arr = np.asarray(d, dtype=float)
    if np.any(t_arr <= 0):
        raise ConfigurationError("t must be positive.")
    if np.any(d_arr < 0):
        raise ConfigurationError("d must be non-negative.")
    exponent = params.k * t_arr
    if metric_exponent_active:
        exponent = exponent - params.c2 * decay_argument(d_arr, t_arr, params.m)
    value = params.c1 * np.power(t_arr, -params.N / (2.0 * params.m)) * np.exp(exponent)
    return float(value) if value.ndim == 0 else value


def conequiv_forward(c2: float, epsilon: float, T: float, m: int) -> float:
    """k = (c2 - eps) T^{-2m/(2m-1)} + 1."""
    if not 0 < epsilon < c2:
        raise ConfigurationError("conequiv_forward requires 0 < epsilon < c2.")
    if not T > 0:
        raise ConfigurationError("T must be positive.")
    if math.isinf(T):
        return 1.0
    return (c2 - epsilon) * T ** (-2.0 * m / (2 * m - 1)) + 1.0


def conequiv_backward(k: float, epsilon: float, m: int) -> float:
    """T = (eps/k)^{(2m-1)/(2m)}."""
    if not k > 0 or not epsilon > 0:
        raise ConfigurationError("conequiv_backward requires k > 0 and epsilon > 0.")
    return (epsilon / k) ** ((2 * m - 1) / (2.0 * m))
