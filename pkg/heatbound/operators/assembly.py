import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy import sparse

from ..errors import ConfigurationError
from ..geometry import GridDiscretization

logger = logging.getLogger(__name__)

SUPPORTED_ORDERS = (1, 2)


@dataclass(frozen=True, eq=False)
class PolyharmonicOperator:
    """Dirichlet (-Laplace)^m on a masked grid, times ``scale``."""

    grid: GridDiscretization
    m: int
    matrix: sparse.csr_matrix
    scale: float = 1.0

    @property
    def spacing(self) -> float:
        return self.grid.spacing

    @property
    def dimension(self) -> int:
        return self.grid.dimension

    @property
    def node_count(self) -> int:
        return self.matrix.shape[0]

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def quadratic_form(self, f) -> float:
        f = np.asarray(f, dtype=float)
        return float(f @ (self.matrix @ f)) * self.spacing ** self.dimension

    def norm_squared(self, f) -> float:
        f = np.asarray(f, dtype=float)
        return float(f @ f) * self.spacing ** self.dimension


def _half_offsets(dimension: int) -> Tuple[Tuple[int, ...], ...]:
    return ((1,),) if dimension == 1 else ((1, 0), (0, 1))


def _laplacian_rows(grid: GridDiscretization) -> sparse.csr_matrix:
    """Integer 2N-point stencil -(sum of neighbours) + 2N*u on nodes, with
    unlinked neighbours read as zero."""
    n = grid.node_count
    rows, cols, _ = grid.stencil_pairs(_half_offsets(grid.dimension))
    ones = -np.ones(len(rows))
    off = sparse.coo_matrix((ones, (rows, cols)), shape=(n, n))
    diagonal = sparse.identity(n, format="coo") * (2 * grid.dimension)
    return (off + off.T + diagonal).tocsr()


def _exterior_rows(grid: GridDiscretization) -> sparse.csr_matrix:
    """Stencil rows at lattice points next to the domain, where the extended
    function vanishes: each row sums the node neighbours."""
    axes = np.eye(grid.dimension, dtype=np.int64)
    offsets = np.vstack((axes, -axes))
    candidates = (grid.coords[:, None, :] + offsets[None, :, :]).reshape(-1, grid.dimension)
    exterior = candidates[grid.lookup(candidates) < 0]
    if exterior.size == 0:
        return sparse.csr_matrix((0, grid.node_count))
    exterior = np.unique(exterior, axis=0)

    rows, cols = [], []
    for offset in offsets:
        ids = grid.lookup(exterior + offset)
        hit = np.flatnonzero(ids >= 0)
        rows.append(hit)
        cols.append(ids[hit])
    rows, cols = np.concatenate(rows), np.concatenate(cols)

    # opposite neighbours on both sides of an exterior point couple across a gap
    for axis in axes:
        left = grid.lookup(exterior - axis)
        right = grid.lookup(exterior + axis)
        both = np.flatnonzero((left >= 0) & (right >= 0))
        if both.size:
            logger.warning(
                "%d exterior points touch nodes on both sides; refine the grid so gaps span two cells.",
                both.size,
            )
            break

    data = -np.ones(len(rows))
    return sparse.coo_matrix((data, (rows, cols)), shape=(len(exterior), grid.node_count)).tocsr()


def assemble_polyharmonic(grid: GridDiscretization, m: int, scale: float = 1.0) -> PolyharmonicOperator:
    if m not in SUPPORTED_ORDERS:
        raise ConfigurationError(f"assemble_polyharmonic supports m in {SUPPORTED_ORDERS}, got {m}.")
    if grid.node_count == 0:
        raise ConfigurationError("cannot assemble an operator on an empty grid.")
    if not scale > 0:
        raise ConfigurationError("operator scale must be positive.")

    h = grid.spacing
    interior = _laplacian_rows(grid)
    if m == 1:
        matrix = interior * (scale / h ** 2)
    else:
        extended = sparse.vstack((interior, _exterior_rows(grid))).tocsr()
        # integer stencil product, so the transpose matches exactly
        matrix = (extended.T @ extended).tocsr() * (scale / h ** 4)

    logger.debug(
        "assembled m=%d operator on %d nodes (%d nonzeros, h=%.4g)",
        m, matrix.shape[0], matrix.nnz, h,
    )
    return PolyharmonicOperator(grid=grid, m=m, matrix=matrix.tocsr(), scale=float(scale))
