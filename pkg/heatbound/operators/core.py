import math
from dataclasses import dataclass
from itertools import product
from typing import Dict, List, Mapping, Sequence, Tuple

import numpy as np

from ..errors import ConfigurationError

MultiIndex = Tuple[int, ...]


def order_indices(order: int, dimension: int) -> List[MultiIndex]:
    # descending lexicographic, e.g. (2,0), (1,1), (0,2)
    indices = [k for k in product(range(order + 1), repeat=dimension) if sum(k) == order]
    return sorted(indices, reverse=True)


def _factorial(k: MultiIndex) -> int:
    return math.prod(math.factorial(v) for v in k)


@dataclass(frozen=True)
class EllipticFormSpec:
    m: int
    N: int
    lam: float = 1.0
    mu: float = 1.0
    c_shift: float = 0.0
    d_shift: float = 0.0
    homogeneous: bool = True

    def __post_init__(self) -> None:
        if self.m < 1:
            raise ConfigurationError("m must be at least 1.")
        if self.N not in (1, 2):
            raise ConfigurationError("N must be 1 or 2.")
        if not 0 < self.lam <= self.mu:
            raise ConfigurationError("Garding constants require 0 < lam <= mu.")
        if self.c_shift < 0 or self.d_shift < 0:
            raise ConfigurationError("c_shift and d_shift must be non-negative.")
        if self.homogeneous and (self.c_shift or self.d_shift):
            raise ConfigurationError("a homogeneous form has c_shift = d_shift = 0.")

    @classmethod
    def polyharmonic(cls, m: int, N: int, scale: float = 1.0) -> "EllipticFormSpec":
        return cls(m=m, N=N, lam=scale, mu=scale)

    @classmethod
    def for_symbol(cls, symbol: "SymbolSpec") -> "EllipticFormSpec":
        from .symbol import ellipticity_constants

        lam, mu = ellipticity_constants(symbol)
        if not lam > 0:
            raise ConfigurationError("symbol is not elliptic: lam <= 0 on the unit sphere.")
        return cls(m=symbol.m, N=symbol.N, lam=lam, mu=mu)


@dataclass(frozen=True)
class SymbolSpec:
    """Constant coefficients a_k, |k| = 2m, of a(xi) = sum (2m)!/k! a_k xi^k."""

    m: int
    N: int
    coefficients: Tuple[Tuple[MultiIndex, float], ...]

    def __post_init__(self) -> None:
        if self.m < 1 or self.N not in (1, 2):
            raise ConfigurationError("SymbolSpec requires m >= 1 and N in {1, 2}.")
        for k, _ in self.coefficients:
            if len(k) != self.N or sum(k) != 2 * self.m or min(k) < 0:
                raise ConfigurationError(f"coefficient index {k} is not of order {2 * self.m}.")

    @classmethod
    def from_mapping(cls, m: int, N: int, coefficients: Mapping[MultiIndex, float]) -> "SymbolSpec":
        table = tuple(sorted((tuple(int(v) for v in k), float(a)) for k, a in coefficients.items() if a != 0.0))
        return cls(m, N, table)

    @classmethod
    def polyharmonic(cls, m: int, N: int) -> "SymbolSpec":
        # |xi|^{2m} = sum_{|l|=m} m!/l! xi^{2l}
        coefficients: Dict[MultiIndex, float] = {}
        for l in order_indices(m, N):
            k = tuple(2 * v for v in l)
            coefficients[k] = math.factorial(m) / _factorial(l) * _factorial(k) / math.factorial(2 * m)
        return cls.from_mapping(m, N, coefficients)

    @classmethod
    def from_gamma(cls, m: int, N: int, gamma: Sequence[Sequence[float]]) -> "SymbolSpec":
        """Coefficients from a form matrix over order-m indices; entries must
        depend on p + q only."""
        indices = order_indices(m, N)
        gamma = np.asarray(gamma, dtype=float)
        if gamma.shape != (len(indices), len(indices)):
            raise ConfigurationError(f"gamma must be {len(indices)}x{len(indices)} for m={m}, N={N}.")
        coefficients: Dict[MultiIndex, float] = {}
        for (i, p), (j, q) in product(enumerate(indices), repeat=2):
            k = tuple(a + b for a, b in zip(p, q))
            value = float(gamma[i, j])
            if k in coefficients and abs(coefficients[k] - value) > 1e-12:
                raise ConfigurationError(f"gamma entries for index {k} disagree; not induced by a symbol.")
            coefficients[k] = value
        return cls.from_mapping(m, N, coefficients)

    def coefficient(self, k: MultiIndex) -> float:
        return dict(self.coefficients).get(tuple(k), 0.0)

    def gamma(self) -> np.ndarray:
        indices = order_indices(self.m, self.N)
        table = dict(self.coefficients)
        size = len(indices)
        matrix = np.zeros((size, size))
        for (i, p), (j, q) in product(enumerate(indices), repeat=2):
            matrix[i, j] = table.get(tuple(a + b for a, b in zip(p, q)), 0.0)
        return matrix

    def evaluate(self, xi) -> np.ndarray:
        xi = np.asarray(xi, dtype=float).reshape(-1, self.N)
        total = np.zeros(len(xi))
        for k, a in self.coefficients:
            weight = math.factorial(2 * self.m) / _factorial(k)
            total += weight * a * np.prod(xi ** np.asarray(k), axis=1)
        return total
