from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy import linalg

from ..errors import ConfigurationError
from .core import SymbolSpec, order_indices

CONVEXITY_TOLERANCE = 1e-10


@dataclass(frozen=True)
class ConvexityCheck:
    convex: bool
    min_eigenvalue: float
    witness: Optional[np.ndarray] = None

    def __bool__(self) -> bool:
        return self.convex


def strong_convexity_check(symbol: SymbolSpec) -> ConvexityCheck:
    """Gamma must be positive semi-definite; otherwise the eigenvector of its
    most negative eigenvalue is returned as the violating zeta."""
    values, vectors = linalg.eigh(symbol.gamma())
    lowest = float(values[0])
    if lowest >= -CONVEXITY_TOLERANCE:
        return ConvexityCheck(True, lowest)
    return ConvexityCheck(False, lowest, vectors[:, 0])


def unit_directions(N: int, samples: int = 720) -> np.ndarray:
    if N == 1:
        return np.array([[1.0], [-1.0]])
    angles = np.linspace(0.0, 2.0 * np.pi, samples, endpoint=False)
    return np.column_stack((np.cos(angles), np.sin(angles)))


def ellipticity_constants(symbol: SymbolSpec, samples: int = 720) -> Tuple[float, float]:
    """(lam, mu) with lam |xi|^{2m} <= a(xi) <= mu |xi|^{2m} on sampled unit xi."""
    values = symbol.evaluate(unit_directions(symbol.N, samples))
    return float(values.min()), float(values.max())


def quadratic_form(symbol: SymbolSpec, zeta) -> float:
    zeta = np.asarray(zeta, dtype=float)
    if zeta.shape != (len(order_indices(symbol.m, symbol.N)),):
        raise ConfigurationError("zeta must have one entry per order-m multi-index.")
    return float(zeta @ symbol.gamma() @ zeta)
