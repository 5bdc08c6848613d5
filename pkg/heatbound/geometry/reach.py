import logging
import math
from typing import Optional, Tuple

import numpy as np
from scipy.spatial import cKDTree

from ..errors import ConfigurationError, ReachError
from .core import Reach
from .domain import BoundarySampling, Domain, sample_boundary_arrays

logger = logging.getLogger(__name__)

MIN_REACH_SAMPLES = 64
DEFAULT_REACH_SAMPLES = 2048
_KINK_TOLERANCE = 1e-6


def default_tolerance(domain: Domain) -> float:
    return 1e-3 * domain.diameter


def _violation(
    sampling: BoundarySampling, tree: cKDTree, r: float, slack: float
) -> Optional[Tuple[np.ndarray, float, np.ndarray]]:
    own = np.arange(len(sampling))
    for sign in (1.0, -1.0):
        centers = sampling.points + sign * r * sampling.normals
        dist, idx = tree.query(centers, k=2)
        # the touching sample p itself sits at distance r; skip it
        nearest = np.where(idx[:, 0] == own, dist[:, 1], dist[:, 0])
        partner = np.where(idx[:, 0] == own, idx[:, 1], idx[:, 0])
        bad = np.flatnonzero(nearest < r - slack)
        if bad.size:
            i = int(bad[np.argmin(nearest[bad])])
            return sampling.points[i], sign * r, sampling.points[int(partner[i])]
    return None


def estimate_reach(
    domain: Domain, samples: int = DEFAULT_REACH_SAMPLES, tol: Optional[float] = None
) -> Reach:
    if samples < MIN_REACH_SAMPLES:
        raise ConfigurationError(f"estimate_reach requires samples >= {MIN_REACH_SAMPLES}.")
    tol = default_tolerance(domain) if tol is None else float(tol)
    if not tol > 0:
        raise ConfigurationError("estimate_reach tolerance must be positive.")

    kinks = domain.junction_kinks()
    if kinks and max(kinks) > _KINK_TOLERANCE:
        raise ReachError(
            f"no positive reach: {domain.kind.value} has a boundary corner "
            f"(tangent turns by {max(kinks):.3g} rad)."
        )

    sampling = sample_boundary_arrays(domain, samples)
    if np.max(np.abs(sampling.curvature)) > 1.0 / tol:
        raise ReachError("no positive reach: curvature unbounded on boundary samples.")

    tree = cKDTree(sampling.points)
    slack = 0.5 * tol
    lo, hi = 0.0, 0.5 * domain.diameter
    if _violation(sampling, tree, tol, slack) is not None:
        raise ReachError("no positive reach: rolling balls fail at the tolerance scale.")
    lo = tol
    if _violation(sampling, tree, hi, slack) is None:
        lo = hi
    while hi - lo > 0.25 * tol:
        mid = 0.5 * (lo + hi)
        if _violation(sampling, tree, mid, slack) is None:
            lo = mid
        else:
            hi = mid

    witness = _violation(sampling, tree, lo + tol, slack)
    logger.debug(
        "reach of %s: r=%.6g (tol %.3g, %d samples)", domain.kind.value, lo, tol, len(sampling)
    )
    return Reach(r=lo, certified_samples=len(sampling), tol=tol, failure_witness=witness)


def rolling_ball_margin(domain: Domain, reach: Reach, samples: int = DEFAULT_REACH_SAMPLES) -> float:
    """min over samples p, q != p of |q - (p +- r n(p))| - r."""
    sampling = sample_boundary_arrays(domain, samples)
    tree = cKDTree(sampling.points)
    own = np.arange(len(sampling))
    margin = math.inf
    for sign in (1.0, -1.0):
        centers = sampling.points + sign * reach.r * sampling.normals
        dist, idx = tree.query(centers, k=2)
        nearest = np.where(idx[:, 0] == own, dist[:, 1], dist[:, 0])
        margin = min(margin, float(np.min(nearest)) - reach.r)
    return margin
