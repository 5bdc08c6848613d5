from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from ..errors import ConfigurationError, ReachError


class ShapeKind(Enum):
    INTERVAL = "interval"
    SQUARE = "square"
    DISC = "disc"
    ANNULUS = "annulus"
    L_SHAPE = "l_shape"
    HORSESHOE = "horseshoe"

    @classmethod
    def from_name(cls, name: str) -> "ShapeKind":
        key = name.lower().strip().replace("-", "_")
        if key in {"interval", "segment"}:
            return cls.INTERVAL
        if key in {"square", "box"}:
            return cls.SQUARE
        if key in {"disc", "disk", "ball"}:
            return cls.DISC
        if key in {"annulus", "ring"}:
            return cls.ANNULUS
        if key in {"l_shape", "lshape", "l"}:
            return cls.L_SHAPE
        if key in {"horseshoe", "horse_shoe"}:
            return cls.HORSESHOE
        raise ConfigurationError(f"Unknown shape: {name}")

    @property
    def polygonal(self) -> bool:
        return self in {ShapeKind.SQUARE, ShapeKind.L_SHAPE}


class NeighborhoodClass(Enum):
    IN_OMEGA_DELTA = "in_omega_delta"
    IN_BOUNDARY_DELTA = "in_boundary_delta"
    NEITHER = "neither"


@dataclass(frozen=True)
class BoundarySample:
    point: np.ndarray
    normal: np.ndarray
    arc_param: Tuple[int, float]
    curvature: float


@dataclass(frozen=True)
class Reach:
    r: float
    certified_samples: int
    tol: float
    failure_witness: Optional[Tuple[np.ndarray, float, np.ndarray]] = None

    def __post_init__(self) -> None:
        if not self.r > 0:
            raise ReachError("no positive reach: reach must be positive.")
