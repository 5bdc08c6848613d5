from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ..errors import GeometryError


def _as_params(s) -> np.ndarray:
    return np.atleast_1d(np.asarray(s, dtype=float))


@dataclass(frozen=True)
class LineSegment:
    start: Tuple[float, float]
    end: Tuple[float, float]

    def __post_init__(self) -> None:
        if np.hypot(self.end[0] - self.start[0], self.end[1] - self.start[1]) == 0.0:
            raise GeometryError("Degenerate boundary segment: zero-length derivative.")

    @property
    def length(self) -> float:
        return float(np.hypot(self.end[0] - self.start[0], self.end[1] - self.start[1]))

    def point(self, s) -> np.ndarray:
        s = _as_params(s)[:, None]
        p0 = np.asarray(self.start, dtype=float)
        p1 = np.asarray(self.end, dtype=float)
        return p0 + s * (p1 - p0)

    def d1(self, s) -> np.ndarray:
        s = _as_params(s)
        delta = np.asarray(self.end, dtype=float) - np.asarray(self.start, dtype=float)
        return np.tile(delta, (s.size, 1))

    def d2(self, s) -> np.ndarray:
        return np.zeros((_as_params(s).size, 2))


@dataclass(frozen=True)
class ArcSegment:
    """Circular arc c + R(cos(phi0 + s*sweep), sin(phi0 + s*sweep)), s in [0, 1].

    A positive sweep runs counter-clockwise; the domain is always on the left.
    """

    center: Tuple[float, float]
    radius: float
    phi0: float
    sweep: float

    def __post_init__(self) -> None:
        if self.radius <= 0 or self.sweep == 0:
            raise GeometryError("Degenerate boundary segment: zero-length derivative.")

    @property
    def length(self) -> float:
        return float(self.radius * abs(self.sweep))

    def _angles(self, s) -> np.ndarray:
        return self.phi0 + _as_params(s) * self.sweep

    def point(self, s) -> np.ndarray:
        phi = self._angles(s)
        c = np.asarray(self.center, dtype=float)
        return c + self.radius * np.column_stack((np.cos(phi), np.sin(phi)))

    def d1(self, s) -> np.ndarray:
        phi = self._angles(s)
        scale = self.radius * self.sweep
        return scale * np.column_stack((-np.sin(phi), np.cos(phi)))

    def d2(self, s) -> np.ndarray:
        phi = self._angles(s)
        scale = -self.radius * self.sweep**2
        return scale * np.column_stack((np.cos(phi), np.sin(phi)))


def inward_normals(d1: np.ndarray) -> np.ndarray:
    speed = np.linalg.norm(d1, axis=1)
    if np.any(speed == 0.0):
        raise GeometryError("Degenerate boundary segment: zero-length derivative.")
    return np.column_stack((-d1[:, 1], d1[:, 0])) / speed[:, None]


def signed_curvature(d1: np.ndarray, d2: np.ndarray) -> np.ndarray:
    speed = np.linalg.norm(d1, axis=1)
    cross = d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]
    return cross / speed**3
