import logging
import math
from collections import defaultdict
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Dict, List, Tuple

import numpy as np
from scipy import integrate

from ..errors import ConfigurationError, QuadratureError

logger = logging.getLogger(__name__)

MultiIndex = Tuple[int, ...]
# sum of coeff * z**e * u**f with u = 1 / (1 - |z|^2)
Polynomial = Dict[Tuple[MultiIndex, int], float]

MAX_QUADRATURE_LEVEL = 512
QUADRATURE_RTOL = 1e-6
BALL_RULE_POINTS = 33


def _shift(e: MultiIndex, axis: int, step: int) -> MultiIndex:
    return tuple(v + step if i == axis else v for i, v in enumerate(e))


def _differentiate(poly: Polynomial, axis: int) -> Polynomial:
    # d/dz_i (g * z^e u^f) with g = exp(-u) and du/dz_i = 2 z_i u^2
    out: Dict[Tuple[MultiIndex, int], float] = defaultdict(float)
    for (e, f), c in poly.items():
        if e[axis]:
            out[(_shift(e, axis, -1), f)] += c * e[axis]
        if f:
            out[(_shift(e, axis, 1), f + 1)] += 2.0 * f * c
        out[(_shift(e, axis, 1), f + 2)] -= 2.0 * c
    return {key: value for key, value in out.items() if value != 0.0}


@lru_cache(maxsize=64)
def derivative_polynomial(j: MultiIndex) -> Tuple[Tuple[Tuple[MultiIndex, int], float], ...]:
    poly: Polynomial = {(tuple(0 for _ in j), 0): 1.0}
    for axis, count in enumerate(j):
        for _ in range(count):
            poly = _differentiate(poly, axis)
    return tuple(sorted(poly.items()))


def multi_indices(order: int, dimension: int) -> List[MultiIndex]:
    return [j for j in product(range(order + 1), repeat=dimension) if sum(j) == order]


def _bump_normalization(dimension: int) -> float:
    if dimension == 1:
        mass, _ = integrate.quad(lambda z: math.exp(-1.0 / (1.0 - z * z)), -1.0, 1.0, epsabs=0.0, epsrel=1e-13)
    else:
        radial, _ = integrate.quad(
            lambda rho: rho * math.exp(-1.0 / (1.0 - rho * rho)), 0.0, 1.0, epsabs=0.0, epsrel=1e-13
        )
        mass = 2.0 * math.pi * radial
    return 1.0 / mass


def _axis_rule(per_half: int) -> Tuple[np.ndarray, np.ndarray]:
    # composite Gauss-Legendre split at 0, where odd derivatives change sign
    x, w = np.polynomial.legendre.leggauss(per_half)
    nodes = np.concatenate((0.5 * (x - 1.0), 0.5 * (x + 1.0)))
    return nodes, np.concatenate((0.5 * w, 0.5 * w))


def _tensor_rule(nodes: np.ndarray, weights: np.ndarray, dimension: int) -> Tuple[np.ndarray, np.ndarray]:
    if dimension == 1:
        return nodes[:, None], weights
    gx, gy = np.meshgrid(nodes, nodes, indexing="ij")
    wx, wy = np.meshgrid(weights, weights, indexing="ij")
    return np.column_stack((gx.ravel(), gy.ravel())), (wx * wy).ravel()


@dataclass(frozen=True)
class MollifierKernel:
    """Exponential bump c*exp(-1/(1-|z|^2)) on the unit ball with its
    derivative integrals and the constant K = sup_j (int |D^j k|)^(1/|j|)."""

    m: int
    dimension: int
    normalization: float
    derivative_integrals: Tuple[Tuple[MultiIndex, float], ...]
    K_const: float
    quadrature_level: int

    def profile(self, z) -> np.ndarray:
        return self.derivative((0,) * self.dimension, z)

    def derivative(self, j: MultiIndex, z) -> np.ndarray:
        pts = np.asarray(z, dtype=float).reshape(-1, self.dimension)
        r2 = np.einsum("ij,ij->i", pts, pts)
        inside = r2 < 1.0
        values = np.zeros(len(pts))
        if not np.any(inside):
            return values
        p = pts[inside]
        u = 1.0 / (1.0 - r2[inside])
        total = np.zeros(len(p))
        for (e, f), c in derivative_polynomial(tuple(j)):
            term = np.full(len(p), c)
            for axis, power in enumerate(e):
                if power:
                    term *= p[:, axis] ** power
            total += term * u ** f
        values[inside] = self.normalization * np.exp(-u) * total
        return values

    def mass(self, per_half: int = 128) -> float:
        nodes, weights = _tensor_rule(*_axis_rule(per_half), self.dimension)
        return float(np.dot(weights, self.profile(nodes)))

    def ball_rule(self, points: int = BALL_RULE_POINTS) -> Tuple[np.ndarray, np.ndarray]:
        """Nodes in the unit ball with weights w*k(xi), renormalised to sum 1."""
        return _ball_rule(self, points)

    def integral(self, j: MultiIndex) -> float:
        for index, value in self.derivative_integrals:
            if index == tuple(j):
                return value
        raise ConfigurationError(f"no derivative integral for multi-index {tuple(j)}.")


@lru_cache(maxsize=16)
def _ball_rule(kernel: MollifierKernel, points: int) -> Tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(points)
    nodes, weights = _tensor_rule(x, w, kernel.dimension)
    keep = np.einsum("ij,ij->i", nodes, nodes) < 1.0
    nodes, weights = nodes[keep], weights[keep] * kernel.profile(nodes[keep])
    return nodes, weights / weights.sum()


def _absolute_integrals(normalization: float, dimension: int, indices: List[MultiIndex], per_half: int) -> np.ndarray:
    unit = MollifierKernel(1, dimension, normalization, (), 0.0, per_half)
    nodes, weights = _tensor_rule(*_axis_rule(per_half), dimension)
    return np.array([np.dot(weights, np.abs(unit.derivative(j, nodes))) for j in indices])


@lru_cache(maxsize=16)
def mollifier_constant(m: int, N: int, quadrature_points: int = 32) -> MollifierKernel:
    if m < 1:
        raise ConfigurationError("mollifier_constant requires m >= 1.")
    if N not in (1, 2):
        raise ConfigurationError("mollifier_constant supports N in {1, 2}.")
    if quadrature_points < 8:
        raise ConfigurationError("quadrature_points must be at least 8.")

    normalization = _bump_normalization(N)
    indices = [j for order in range(1, m) for j in multi_indices(order, N)]
    if not indices:
        return MollifierKernel(m, N, normalization, (), 0.0, quadrature_points)

    level = quadrature_points
    previous = _absolute_integrals(normalization, N, indices, level)
    while True:
        if 2 * level > MAX_QUADRATURE_LEVEL:
            raise QuadratureError(
                f"mollifier integrals did not converge to {QUADRATURE_RTOL:g} by {level} points per half-axis."
            )
        level *= 2
        current = _absolute_integrals(normalization, N, indices, level)
        change = np.max(np.abs(current - previous) / np.abs(current))
        logger.debug("mollifier m=%d N=%d level %d: rel change %.3g", m, N, level, change)
        if change <= QUADRATURE_RTOL:
            break
        previous = current

    table = tuple((j, float(v)) for j, v in zip(indices, current))
    K = max(v ** (1.0 / sum(j)) for j, v in table)
    logger.info("mollifier constant K_{%d,%d} = %.8g (level %d)", m, N, K, level)
    return MollifierKernel(m, N, normalization, table, float(K), level)
