import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..errors import ConfigurationError, GeometryError
from .domain import Domain, _as_points

logger = logging.getLogger(__name__)

MIN_GRID_NODES = 25
MAX_DRAWS_PER_PAIR = 500
_NODE_MARGIN = 1e-9


@dataclass(frozen=True, eq=False)
class GridDiscretization:
    """Lattice origin + i*h restricted to the open domain.

    ``index`` maps lattice coordinates to node ids (-1 outside); ``coords``
    maps node ids back to lattice coordinates.
    """

    domain: Domain
    spacing: float
    origin: np.ndarray
    shape: Tuple[int, ...]
    coords: np.ndarray
    index: np.ndarray = field(repr=False)

    @classmethod
    def build(cls, domain: Domain, spacing: float, min_nodes: int = MIN_GRID_NODES) -> "GridDiscretization":
        if not spacing > 0:
            raise ConfigurationError("grid spacing must be positive.")
        lo, hi = domain.bounding_box
        counts = tuple(int(math.floor((hi[d] - lo[d]) / spacing + 1e-9)) + 1 for d in range(len(lo)))
        axes = [lo[d] + spacing * np.arange(counts[d]) for d in range(len(lo))]
        mesh = np.meshgrid(*axes, indexing="ij")
        points = np.column_stack([m.ravel() for m in mesh])
        mask = domain.contains(points, margin=_NODE_MARGIN * spacing).reshape(counts)

        index = np.full(counts, -1, dtype=np.int64)
        coords = np.argwhere(mask)
        index[tuple(coords.T)] = np.arange(len(coords))
        if len(coords) < min_nodes:
            raise ConfigurationError(
                f"grid has {len(coords)} nodes; at least {min_nodes} required. Decrease the spacing."
            )
        logger.debug("grid on %s: h=%.4g, %d nodes", domain.kind.value, spacing, len(coords))
        return cls(domain, float(spacing), lo.astype(float), counts, coords, index)

    @classmethod
    def with_divisions(cls, domain: Domain, divisions: int) -> "GridDiscretization":
        if divisions < 4:
            raise ConfigurationError("grid divisions must be at least 4.")
        return cls.build(domain, domain.diameter / divisions)

    @property
    def dimension(self) -> int:
        return self.domain.dimension

    @property
    def node_count(self) -> int:
        return len(self.coords)

    @property
    def points(self) -> np.ndarray:
        return self.origin + self.spacing * self.coords

    def node_id(self, lattice: Sequence[int]) -> int:
        key = tuple(int(v) for v in lattice)
        if any(not 0 <= v < n for v, n in zip(key, self.shape)):
            return -1
        return int(self.index[key])

    def lookup(self, lattice: np.ndarray) -> np.ndarray:
        """Vectorised node ids for integer lattice coordinates, -1 off-grid."""
        lattice = np.asarray(lattice, dtype=np.int64)
        valid = np.ones(len(lattice), dtype=bool)
        for d, n in enumerate(self.shape):
            valid &= (lattice[:, d] >= 0) & (lattice[:, d] < n)
        ids = np.full(len(lattice), -1, dtype=np.int64)
        if np.any(valid):
            ids[valid] = self.index[tuple(lattice[valid].T)]
        return ids

    def nearest_node(self, point) -> int:
        pts = _as_points(point, self.dimension)
        lattice = np.rint((pts[0] - self.origin) / self.spacing).astype(np.int64)
        node = self.node_id(lattice)
        if node >= 0:
            return node
        dist = np.linalg.norm(self.points - pts[0], axis=1)
        return int(np.argmin(dist))

    def linked(self, a: np.ndarray, b: np.ndarray, checks: int = 3) -> np.ndarray:
        """Whether the straight segments between node positions a[i] and b[i]
        stay in the closure of the domain."""
        ok = np.ones(len(a), dtype=bool)
        for k in range(1, checks + 1):
            frac = k / (checks + 1)
            ok &= self.domain.contains(a + frac * (b - a), margin=-_NODE_MARGIN * self.spacing)
        return ok

    def stencil_pairs(self, offsets: Sequence[Tuple[int, ...]]) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """All (i, j, offset_index) with node j = node i + offset and a linked
        connecting segment."""
        rows: List[np.ndarray] = []
        cols: List[np.ndarray] = []
        which: List[np.ndarray] = []
        pts = self.points
        for k, offset in enumerate(offsets):
            target = self.lookup(self.coords + np.asarray(offset, dtype=np.int64))
            present = np.flatnonzero(target >= 0)
            if present.size == 0:
                continue
            ok = self.linked(pts[present], pts[target[present]])
            rows.append(present[ok])
            cols.append(target[present][ok])
            which.append(np.full(int(ok.sum()), k))
        if not rows:
            empty = np.zeros(0, dtype=np.int64)
            return empty, empty, empty
        return np.concatenate(rows), np.concatenate(cols), np.concatenate(which)

    def require_inside(self, point, label: str = "point") -> np.ndarray:
        pts = _as_points(point, self.dimension)
        if not bool(self.domain.contains(pts, margin=-_NODE_MARGIN * self.spacing)[0]):
            raise GeometryError(f"{label} {pts[0].tolist()} lies outside the closure of the domain.")
        return pts[0]


def sample_nodes(grid: GridDiscretization, count: int, seed: int, min_separation: Optional[float] = None) -> List[Tuple[int, int]]:
    """Seeded random node pairs, rejecting pairs closer than ``min_separation``."""
    rng = np.random.default_rng(seed)
    separation = 4.0 * grid.spacing if min_separation is None else min_separation
    pts = grid.points
    pairs: List[Tuple[int, int]] = []
    attempts = 0
    while len(pairs) < count and attempts < MAX_DRAWS_PER_PAIR * count:
        attempts += 1
        i, j = (int(v) for v in rng.integers(0, grid.node_count, size=2))
        if np.linalg.norm(pts[i] - pts[j]) < separation:
            continue
        pairs.append((i, j))
    if len(pairs) < count:
        raise ConfigurationError("could not draw enough separated sample pairs.")
    return pairs
