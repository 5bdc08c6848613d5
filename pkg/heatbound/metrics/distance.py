import logging
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import List, Sequence, Tuple

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import dijkstra

from ..errors import ConfigurationError, DisconnectedError, GeometryError
from ..geometry import Domain, GridDiscretization
from ..geometry.domain import _as_points
from .visibility import visibility_distance

logger = logging.getLogger(__name__)

# half of the 16-neighbour stencil; the other half follows by symmetry
_STENCIL_2D: Tuple[Tuple[int, int], ...] = (
    (1, 0), (0, 1), (1, 1), (1, -1), (1, 2), (2, 1), (1, -2), (2, -1),
)
_STENCIL_1D: Tuple[Tuple[int], ...] = ((1,),)
_ATTACH_RADIUS = 3


class MetricMethod(Enum):
    EUCLIDEAN = "euclidean"
    GEODESIC_GRID = "geodesic_grid"
    GEODESIC_VISIBILITY = "geodesic_visibility"
    MOLLIFIED_TEST_FUNCTION = "mollified_test_function"
    PENULT_FORMULA = "penult_formula"


def grid_tolerance(distance: float, spacing: float) -> float:
    return 0.03 * distance + 2.0 * spacing


@dataclass(frozen=True)
class MetricEstimate:
    lower: float
    upper: float
    method: MetricMethod
    spacing: float = 0.0

    @property
    def tolerance(self) -> float:
        return grid_tolerance(self.upper, self.spacing)

    def __post_init__(self) -> None:
        if self.lower > self.upper + grid_tolerance(self.upper, self.spacing) + 1e-12:
            raise GeometryError(
                f"Metric bracket is inverted: lower={self.lower:.6g} > upper={self.upper:.6g}."
            )


def euclidean_distance(x: Sequence[float], y: Sequence[float]) -> float:
    return float(np.linalg.norm(np.asarray(y, dtype=float) - np.asarray(x, dtype=float)))


@lru_cache(maxsize=8)
def grid_graph(grid: GridDiscretization) -> sparse.csr_matrix:
    offsets = _STENCIL_2D if grid.dimension == 2 else _STENCIL_1D
    rows, cols, which = grid.stencil_pairs(offsets)
    lengths = grid.spacing * np.linalg.norm(np.asarray(offsets, dtype=float), axis=1)
    weights = lengths[which]
    n = grid.node_count
    graph = sparse.coo_matrix(
        (np.concatenate((weights, weights)), (np.concatenate((rows, cols)), np.concatenate((cols, rows)))),
        shape=(n, n),
    ).tocsr()
    logger.debug("grid graph: %d nodes, %d edges", n, len(weights))
    return graph


def _attachments(grid: GridDiscretization, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Candidate nodes within 3h of each point whose connecting segment stays
    in the closure. Returns (ids, lengths) of shape (M, C); invalid ids are -1."""
    span = np.arange(-_ATTACH_RADIUS, _ATTACH_RADIUS + 1)
    window = np.stack(np.meshgrid(*([span] * grid.dimension), indexing="ij"), axis=-1).reshape(-1, grid.dimension)
    base = np.rint((points - grid.origin) / grid.spacing).astype(np.int64)
    lattice = base[:, None, :] + window[None, :, :]
    flat = lattice.reshape(-1, grid.dimension)
    ids = grid.lookup(flat).reshape(len(points), len(window))

    node_pos = grid.origin + grid.spacing * lattice
    lengths = np.linalg.norm(node_pos - points[:, None, :], axis=2)
    valid = (ids >= 0) & (lengths <= _ATTACH_RADIUS * grid.spacing + 1e-12)

    rows, cols = np.nonzero(valid)
    if rows.size:
        ok = grid.linked(points[rows], node_pos[rows, cols])
        valid[rows[~ok], cols[~ok]] = False
    ids = np.where(valid, ids, -1)
    return ids, np.where(valid, lengths, np.inf)


class DistanceField:
    """d_g(source, .) on the closure: grid shortest paths from the source,
    read back at arbitrary points through the nodes visible from them."""

    def __init__(self, grid: GridDiscretization, source) -> None:
        self.grid = grid
        self.source = _as_points(source, grid.dimension)[0]
        ids, lengths = _attachments(grid, self.source[None, :])
        present = ids[0] >= 0
        if not np.any(present):
            raise DisconnectedError("disconnected: source sees no grid node.")

        n = grid.node_count
        graph = grid_graph(grid)
        column = sparse.coo_matrix(
            (lengths[0][present], (ids[0][present], np.zeros(int(present.sum()), dtype=np.int64))),
            shape=(n, 1),
        )
        augmented = sparse.bmat([[graph, column], [column.T, None]], format="csr")
        dist = dijkstra(augmented, directed=False, indices=n)
        self.node_distances = dist[:n]

    def distances(self, points) -> np.ndarray:
        pts = _as_points(points, self.grid.dimension)
        ids, lengths = _attachments(self.grid, pts)
        through = np.where(ids >= 0, self.node_distances[np.maximum(ids, 0)] + lengths, np.inf)
        values = through.min(axis=1)

        # a straight chord inside the closure is itself a geodesic
        direct = np.linalg.norm(pts - self.source, axis=1)
        seen = self.straight_visible(pts)
        values[seen] = direct[seen]
        return values

    def straight_visible(self, points: np.ndarray) -> np.ndarray:
        step = 0.5 * self.grid.spacing
        offsets = points - self.source
        count = max(2, int(math.ceil(np.linalg.norm(offsets, axis=1).max() / step)) + 1)
        s = np.linspace(0.0, 1.0, count)
        samples = self.source + s[None, :, None] * offsets[:, None, :]
        inside = self.grid.domain.contains(samples.reshape(-1, self.grid.dimension), margin=-1e-9 * self.grid.spacing)
        return inside.reshape(len(points), count).all(axis=1)

    def distance(self, point) -> float:
        value = float(self.distances(point)[0])
        if not math.isfinite(value):
            raise DisconnectedError("disconnected: point unreachable from the source.")
        return value


@lru_cache(maxsize=64)
def _cached_field(grid: GridDiscretization, source: Tuple[float, ...]) -> DistanceField:
    return DistanceField(grid, np.asarray(source))


def distance_field(grid: GridDiscretization, source) -> DistanceField:
    point = grid.require_inside(source, "source")
    return _cached_field(grid, tuple(float(v) for v in point))


def geodesic_distance(domain: Domain, grid: GridDiscretization, x, y) -> MetricEstimate:
    if grid.domain != domain:
        raise ConfigurationError("grid was built for a different domain.")
    x = grid.require_inside(x, "x")
    y = grid.require_inside(y, "y")
    h = grid.spacing
    d0 = euclidean_distance(x, y)

    if domain.segment_inside(x, y, step=0.25 * h):
        return MetricEstimate(d0, d0, MetricMethod.EUCLIDEAN, h)
    if domain.kind.polygonal:
        exact = visibility_distance(domain, x, y)
        return MetricEstimate(d0, max(exact, d0), MetricMethod.GEODESIC_VISIBILITY, h)

    upper = distance_field(grid, x).distance(y)
    return MetricEstimate(d0, max(upper, d0), MetricMethod.GEODESIC_GRID, h)


@dataclass(frozen=True)
class RefinementStudy:
    spacings: Tuple[float, ...]
    values: Tuple[float, ...]
    ratio: float
    extrapolated: float


def geodesic_refinement(domain: Domain, x, y, spacings: Sequence[float]) -> RefinementStudy:
    """Grid geodesic at several spacings (coarse to fine) with a first-order
    Richardson estimate and the observed refinement ratio."""
    if len(spacings) < 2:
        raise ConfigurationError("refinement needs at least two spacings.")
    values: List[float] = []
    for h in spacings:
        grid = GridDiscretization.build(domain, h)
        values.append(distance_field(grid, x).distance(y))
    if len(values) >= 3 and values[-2] != values[-1]:
        ratio = (values[-3] - values[-2]) / (values[-2] - values[-1])
    else:
        ratio = values[-2] / values[-1]
    scale = spacings[-2] / spacings[-1]
    extrapolated = values[-1] + (values[-1] - values[-2]) / (scale - 1.0)
    logger.info("geodesic refinement %s -> ratio %.4g", values, ratio)
    return RefinementStudy(tuple(spacings), tuple(values), float(ratio), float(extrapolated))
