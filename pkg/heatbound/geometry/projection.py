import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple

import numpy as np
from scipy.spatial import cKDTree

from ..errors import ConfigurationError, ProjectionError
from .core import BoundarySample, NeighborhoodClass, Reach
from .domain import Domain, _as_points, sample_boundary_arrays

logger = logging.getLogger(__name__)

_LOCATOR_SAMPLES = 4096
_NEWTON_STEPS = 12


@dataclass(frozen=True)
class NearestBoundary:
    feet: np.ndarray
    distances: np.ndarray
    segments: np.ndarray
    params: np.ndarray


class BoundaryLocator:
    """Nearest boundary points: k-d tree seed over dense samples, then
    parametric Newton steps on the seed segment and its two neighbours."""

    def __init__(self, domain: Domain, samples: int = _LOCATOR_SAMPLES) -> None:
        self.domain = domain
        self.sampling = sample_boundary_arrays(domain, samples)
        self._tree = cKDTree(self.sampling.points)

    def nearest(self, points) -> NearestBoundary:
        pts = _as_points(points, self.domain.dimension)
        if self.domain.dimension == 1:
            return self._nearest_interval(pts)

        _, seed = self._tree.query(pts)
        seed_segments = self.sampling.segments[seed]
        seed_params = self.sampling.params[seed]

        best_feet = self.sampling.points[seed].copy()
        best_dist = np.linalg.norm(pts - best_feet, axis=1)
        best_segments = seed_segments.copy()
        best_params = seed_params.copy()

        for index in np.unique(seed_segments):
            mask = seed_segments == index
            prev_index, next_index = self.domain.segment_neighbors(int(index))
            candidates = [(int(index), seed_params[mask])]
            if prev_index != index:
                candidates.append((prev_index, np.ones(mask.sum())))
            if next_index != index:
                candidates.append((next_index, np.zeros(mask.sum())))
            for candidate, start in candidates:
                s = self._newton(candidate, pts[mask], start)
                feet = self.domain.segments[candidate].point(s)
                dist = np.linalg.norm(pts[mask] - feet, axis=1)
                better = dist < best_dist[mask]
                rows = np.flatnonzero(mask)[better]
                best_feet[rows] = feet[better]
                best_dist[rows] = dist[better]
                best_segments[rows] = candidate
                best_params[rows] = s[better]

        return NearestBoundary(best_feet, best_dist, best_segments, best_params)

    def _newton(self, index: int, pts: np.ndarray, s: np.ndarray) -> np.ndarray:
        segment = self.domain.segments[index]
        closed = self.domain.segment_closed(index)
        s = np.array(s, dtype=float)
        for _ in range(_NEWTON_STEPS):
            gamma = segment.point(s)
            d1 = segment.d1(s)
            d2 = segment.d2(s)
            diff = gamma - pts
            grad = np.einsum("ij,ij->i", diff, d1)
            hess = np.einsum("ij,ij->i", d1, d1) + np.einsum("ij,ij->i", diff, d2)
            hess = np.where(hess > 0, hess, np.einsum("ij,ij->i", d1, d1))
            s = s - grad / hess
            s = np.mod(s, 1.0) if closed else np.clip(s, 0.0, 1.0)
        return s

    def _nearest_interval(self, pts: np.ndarray) -> NearestBoundary:
        ends = self.sampling.points[:, 0]
        gaps = np.abs(pts[:, :1] - ends[None, :])
        which = np.argmin(gaps, axis=1)
        return NearestBoundary(
            feet=ends[which][:, None],
            distances=gaps[np.arange(len(pts)), which],
            segments=which,
            params=np.zeros(len(pts)),
        )


@lru_cache(maxsize=16)
def boundary_locator(domain: Domain) -> BoundaryLocator:
    return BoundaryLocator(domain)


def boundary_distance(domain: Domain, points) -> np.ndarray:
    return boundary_locator(domain).nearest(points).distances


def project_points(domain: Domain, reach: Reach, points) -> np.ndarray:
    pts = _as_points(points, domain.dimension)
    result = pts.copy()
    outside = ~domain.contains(pts)
    if not np.any(outside):
        return result
    nearest = boundary_locator(domain).nearest(pts[outside])
    too_far = nearest.distances >= reach.r
    if np.any(too_far):
        worst = float(nearest.distances[too_far].max())
        raise ProjectionError(
            f"Point at distance {worst:.6g} is outside tubular neighborhood of radius {reach.r:.6g}."
        )
    result[outside] = nearest.feet
    return result


def project_nu2(domain: Domain, reach: Reach, z) -> np.ndarray:
    return project_points(domain, reach, z)[0]


def rho_map(sample: BoundarySample, u: float) -> np.ndarray:
    return sample.point + u * sample.normal


def delta_neighborhood_test(domain: Domain, z, delta: float) -> NeighborhoodClass:
    if not delta > 0:
        raise ConfigurationError("delta must be positive.")
    distance = float(boundary_distance(domain, z)[0])
    if distance < delta:
        return NeighborhoodClass.IN_BOUNDARY_DELTA
    if bool(domain.contains(z)[0]):
        return NeighborhoodClass.IN_OMEGA_DELTA
    return NeighborhoodClass.NEITHER


def normal_coordinates(domain: Domain, z) -> Tuple[np.ndarray, float]:
    """Return (p, u) with z = p + u n(p), u > 0 inside the domain."""
    pts = _as_points(z, domain.dimension)
    locator = boundary_locator(domain)
    nearest = locator.nearest(pts)
    foot = nearest.feet[0]
    sign = 1.0 if bool(domain.contains(pts)[0]) else -1.0
    return foot, sign * float(nearest.distances[0])
