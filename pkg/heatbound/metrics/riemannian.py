import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed

from ..errors import ConfigurationError, DisconnectedError, ProjectionError, QuadratureError
from ..geometry import Domain, GridDiscretization, Reach, project_points, sample_boundary_arrays
from ..geometry.domain import _as_points
from ..geometry.grid import MAX_DRAWS_PER_PAIR
from .distance import (
    MetricEstimate,
    MetricMethod,
    distance_field,
    euclidean_distance,
    geodesic_distance,
    grid_tolerance,
)
from .mollifier import MollifierKernel

logger = logging.getLogger(__name__)

Pair = Tuple[np.ndarray, np.ndarray]

SANDWICH_COLUMNS = (
    "domain", "m", "beta", "x1", "x2", "y1", "y2", "d0",
    "dg_lower", "dg_upper", "dmb_lower", "sandwich_factor", "pass",
)


def _check_beta(kernel: MollifierKernel, reach: Reach, beta: float) -> None:
    if not beta > 0:
        raise ConfigurationError("beta must be positive.")
    if kernel.K_const > 0 and not beta > kernel.K_const / reach.r:
        raise ConfigurationError(
            f"beta={beta:.6g} must exceed K/r = {kernel.K_const / reach.r:.6g}."
        )


def witness_values(
    domain: Domain,
    reach: Reach,
    grid: GridDiscretization,
    kernel: MollifierKernel,
    beta: float,
    x,
    centers,
) -> np.ndarray:
    """f_{m,beta,x} at each centre: the geodesic distance from x, read through
    the projection onto the closure and averaged with k_{K/beta}."""
    _check_beta(kernel, reach, beta)
    field = distance_field(grid, x)
    centers = _as_points(centers, domain.dimension)
    K = kernel.K_const

    if K == 0.0:
        values = field.distances(project_points(domain, reach, centers))
    else:
        delta = K / beta
        nodes, weights = kernel.ball_rule()
        pts = (centers[:, None, :] + delta * nodes[None, :, :]).reshape(-1, domain.dimension)
        try:
            feet = project_points(domain, reach, pts)
        except ProjectionError as exc:
            raise QuadratureError(f"quadrature point leaves the tube of radius {reach.r:.6g}: {exc}") from exc
        dist = field.distances(feet).reshape(len(centers), len(weights))
        values = (1.0 - K / (beta * reach.r)) * (dist @ weights)

    if not np.all(np.isfinite(values)):
        raise DisconnectedError("disconnected: test function undefined at a centre.")
    return values


def mollified_distance_function(
    domain: Domain,
    reach: Reach,
    grid: GridDiscretization,
    kernel: MollifierKernel,
    beta: float,
    x,
    y,
) -> float:
    grid.require_inside(x, "x")
    return float(witness_values(domain, reach, grid, kernel, beta, x, y)[0])


def penult_lower(dg: MetricEstimate, K: float, r: float, beta: float) -> float:
    """(1 - K/(beta r)) d_g - 2K/beta on a certified lower value of d_g."""
    # the grid overestimates d_g; only upper - tolerance is a certified lower value
    certified = dg.upper if dg.method is not MetricMethod.GEODESIC_GRID else max(dg.lower, dg.upper - dg.tolerance)
    return certified * (1.0 - K / (beta * r)) - 2.0 * K / beta


def riemannian_type_estimate(
    domain: Domain,
    reach: Reach,
    grid: GridDiscretization,
    kernel: MollifierKernel,
    m: int,
    beta: float,
    x,
    y,
) -> MetricEstimate:
    if m != kernel.m:
        raise ConfigurationError(f"kernel was built for m={kernel.m}, not m={m}.")
    dg = geodesic_distance(domain, grid, x, y)
    if m == 1:
        return MetricEstimate(dg.upper, dg.upper, dg.method, grid.spacing)

    K, r = kernel.K_const, reach.r
    if beta < 4.0 * K / r * (1.0 - 1e-12):
        raise ConfigurationError(f"beta={beta:.6g} is below 4K/r = {4.0 * K / r:.6g}.")

    values = witness_values(domain, reach, grid, kernel, beta, x, np.vstack((x, y)))
    # any unit-slope linear function is admissible, so |y - x| is always a witness
    candidates = {
        MetricMethod.MOLLIFIED_TEST_FUNCTION: float(values[1] - values[0]),
        MetricMethod.EUCLIDEAN: dg.lower,
        MetricMethod.PENULT_FORMULA: penult_lower(dg, K, r, beta),
    }
    method = max(candidates, key=candidates.get)
    logger.debug("d_{%d,%.4g} bracket [%.6g, %.6g] via %s", m, beta, candidates[method], dg.upper, method.value)
    return MetricEstimate(candidates[method], dg.upper, method, grid.spacing)


def finsler_scaling_bound(mu: float, m: int, d_m_beta: float) -> float:
    if mu < 1.0:
        raise ConfigurationError("finsler_scaling_bound requires mu >= 1.")
    if m < 1:
        raise ConfigurationError("m must be at least 1.")
    return mu ** (-1.0 / (2 * m)) * d_m_beta


def sandwich_factor(kernel: MollifierKernel, reach: Reach, beta: float) -> float:
    return 1.0 - math.sqrt(kernel.K_const / (beta * reach.r))


@dataclass(frozen=True)
class RegularityCheck:
    max_gradient: float
    max_second: float
    beta: float
    targets: int

    @property
    def passed(self) -> bool:
        return self.max_gradient <= 1.0 + 1e-3 and self.max_second <= 1.05 * self.beta


def check_test_function_regularity(
    domain: Domain,
    reach: Reach,
    grid: GridDiscretization,
    kernel: MollifierKernel,
    beta: float,
    x,
    targets,
    step: Optional[float] = None,
) -> RegularityCheck:
    """Central differences of f_{m,beta,x}: gradient norm and second
    directional derivatives along the axes and diagonals."""
    targets = _as_points(targets, domain.dimension)
    step = 0.1 * kernel.K_const / beta if step is None else step
    if not step > 0:
        raise ConfigurationError("finite-difference step must be positive.")

    n = domain.dimension
    axes = np.eye(n)
    directions = axes if n == 1 else np.vstack((axes, np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2.0)))
    shifted = [targets]
    for e in directions:
        shifted.extend((targets + step * e, targets - step * e))
    values = witness_values(domain, reach, grid, kernel, beta, x, np.vstack(shifted))
    values = values.reshape(1 + 2 * len(directions), len(targets))

    center = values[0]
    plus, minus = values[1::2], values[2::2]
    gradient = (plus[:n] - minus[:n]) / (2.0 * step)
    second = np.abs(plus - 2.0 * center + minus) / step ** 2
    return RegularityCheck(
        max_gradient=float(np.max(np.linalg.norm(gradient, axis=0))),
        max_second=float(np.max(second)),
        beta=float(beta),
        targets=len(targets),
    )


@dataclass(frozen=True)
class CorollaryCheck:
    name: str
    samples: int
    violations: int
    worst_margin: float

    @property
    def passed(self) -> bool:
        return self.violations == 0


def _require_planar(domain: Domain) -> None:
    if domain.dimension != 2:
        raise ConfigurationError("corollary checks sample planar neighbourhoods; use a 2D domain.")


def _summarise(name: str, margins: np.ndarray) -> CorollaryCheck:
    margins = np.asarray(margins, dtype=float)
    worst = float(margins.min()) if margins.size else math.inf
    check = CorollaryCheck(name, int(margins.size), int(np.sum(margins < 0)), worst)
    logger.info("%s: %d samples, %d violations, worst margin %.4g", name, check.samples, check.violations, worst)
    return check


def _near_boundary_points(domain: Domain, reach: Reach, rng: np.random.Generator, count: int, low: float, high: float) -> np.ndarray:
    sampling = sample_boundary_arrays(domain, 4096)
    picks = rng.integers(0, len(sampling), size=count)
    u = rng.uniform(low, high, size=count)
    return sampling.points[picks] + u[:, None] * sampling.normals[picks]


def check_corollary_lipschitz(
    domain: Domain,
    reach: Reach,
    grid: GridDiscretization,
    x,
    delta: float,
    samples: int = 200,
    seed: int = 0,
    separation: Optional[float] = None,
) -> CorollaryCheck:
    """Slope of d_x = d_g(x, nu_2 .) between nearby points of the delta
    neighbourhood is at most 1/(1 - delta/r)."""
    _require_planar(domain)
    if not 0 < delta < reach.r:
        raise ConfigurationError("delta must lie in (0, r).")
    rng = np.random.default_rng(seed)
    h = grid.spacing
    sep = 6.0 * h if separation is None else separation
    z = _near_boundary_points(domain, reach, rng, samples, -0.9 * delta, min(reach.r, 0.5 * domain.diameter))
    angles = rng.uniform(0.0, 2.0 * math.pi, size=samples)
    w = z + sep * np.column_stack((np.cos(angles), np.sin(angles)))
    keep = domain.contains(z, margin=-0.95 * delta) & domain.contains(w, margin=-0.95 * delta)
    z, w = z[keep], w[keep]

    field = distance_field(grid, x)
    dz = field.distances(project_points(domain, reach, z))
    dw = field.distances(project_points(domain, reach, w))
    slope = np.abs(dz - dw) / sep
    bound = 1.0 / (1.0 - delta / reach.r)
    return _summarise("lipschitz", bound + grid_tolerance(sep, h) / sep - slope)


def check_corollary_projection(
    domain: Domain,
    reach: Reach,
    grid: GridDiscretization,
    delta: float,
    sources: int = 8,
    per_source: int = 25,
    seed: int = 0,
) -> CorollaryCheck:
    """d_g(x, nu_2 z) <= (1/delta - 1/r)^-1 for z in B(x; delta)."""
    _require_planar(domain)
    if not 0 < delta < reach.r:
        raise ConfigurationError("delta must lie in (0, r).")
    rng = np.random.default_rng(seed)
    xs = _near_boundary_points(domain, reach, rng, 4 * sources, 0.1 * delta, 0.9 * delta)
    xs = xs[grid.domain.contains(xs)][:sources]
    bound = 1.0 / (1.0 / delta - 1.0 / reach.r)
    tol = grid_tolerance(bound, grid.spacing)

    margins: List[float] = []
    for x in xs:
        radius = delta * np.sqrt(rng.uniform(0.0, 1.0, size=per_source))
        angles = rng.uniform(0.0, 2.0 * math.pi, size=per_source)
        z = x + radius[:, None] * np.column_stack((np.cos(angles), np.sin(angles)))
        values = distance_field(grid, x).distances(project_points(domain, reach, z))
        margins.extend(bound + tol - values)
    return _summarise("projection", np.asarray(margins))


def check_corollary_euclidean(
    domain: Domain,
    reach: Reach,
    grid: GridDiscretization,
    pairs: Sequence[Pair],
) -> CorollaryCheck:
    """|y - x| >= 2r d_g / (2r + d_g) for pairs with d_g < 2r."""
    r = reach.r
    margins: List[float] = []
    for x, y in pairs:
        dg = geodesic_distance(domain, grid, x, y)
        if dg.upper >= 2.0 * r:
            continue
        floor = 2.0 * r * dg.upper / (2.0 * r + dg.upper)
        margins.append(dg.lower - floor + dg.tolerance)
    return _summarise("euclidean", np.asarray(margins))


def sample_pairs(
    grid: GridDiscretization,
    count: int,
    seed: int,
    max_separation: Optional[float] = None,
) -> List[Pair]:
    """Seeded node pairs at least 4h apart, optionally at most ``max_separation``."""
    rng = np.random.default_rng(seed)
    pts = grid.points
    low = 4.0 * grid.spacing
    pairs: List[Pair] = []
    attempts = 0
    while len(pairs) < count:
        attempts += 1
        if attempts > MAX_DRAWS_PER_PAIR * count:
            raise ConfigurationError("could not draw enough separated sample pairs.")
        i = int(rng.integers(0, grid.node_count))
        if max_separation is None:
            j = int(rng.integers(0, grid.node_count))
        else:
            near = np.flatnonzero(np.linalg.norm(pts - pts[i], axis=1) <= max_separation)
            j = int(near[rng.integers(0, near.size)])
        if np.linalg.norm(pts[i] - pts[j]) < low:
            continue
        pairs.append((pts[i].copy(), pts[j].copy()))
    return pairs


@dataclass(frozen=True)
class SandwichRow:
    domain: str
    m: int
    beta: float
    x: Tuple[float, ...]
    y: Tuple[float, ...]
    d0: float
    dg_lower: float
    dg_upper: float
    dmb_lower: float
    sandwich_factor: float
    tolerance: float

    @property
    def passed(self) -> bool:
        low_ok = self.sandwich_factor * (self.dg_upper - self.tolerance) <= self.dmb_lower
        high_ok = self.dmb_lower <= self.dg_upper + self.tolerance
        return bool(low_ok and high_ok)

    def to_row(self) -> Dict[str, object]:
        x2 = self.x[1] if len(self.x) > 1 else 0.0
        y2 = self.y[1] if len(self.y) > 1 else 0.0
        return {
            "domain": self.domain,
            "m": self.m,
            "beta": f"{self.beta:.10g}",
            "x1": f"{self.x[0]:.10g}",
            "x2": f"{x2:.10g}",
            "y1": f"{self.y[0]:.10g}",
            "y2": f"{y2:.10g}",
            "d0": f"{self.d0:.10g}",
            "dg_lower": f"{self.dg_lower:.10g}",
            "dg_upper": f"{self.dg_upper:.10g}",
            "dmb_lower": f"{self.dmb_lower:.10g}",
            "sandwich_factor": f"{self.sandwich_factor:.10g}",
            "pass": str(self.passed).lower(),
        }


def _sandwich_pair(domain, reach, grid, kernel, m, betas, x, y) -> List[SandwichRow]:
    dg = geodesic_distance(domain, grid, x, y)
    rows = []
    for beta in betas:
        estimate = riemannian_type_estimate(domain, reach, grid, kernel, m, beta, x, y)
        factor = sandwich_factor(kernel, reach, beta)
        rows.append(
            SandwichRow(
                domain=domain.kind.value,
                m=m,
                beta=float(beta),
                x=tuple(float(v) for v in x),
                y=tuple(float(v) for v in y),
                d0=euclidean_distance(x, y),
                dg_lower=dg.lower,
                dg_upper=dg.upper,
                dmb_lower=estimate.lower,
                sandwich_factor=factor,
                tolerance=dg.tolerance,
            )
        )
    return rows


def sandwich_rows(
    domain: Domain,
    reach: Reach,
    grid: GridDiscretization,
    kernel: MollifierKernel,
    m: int,
    betas: Sequence[float],
    pairs: Sequence[Pair],
    threads: int = 1,
) -> List[SandwichRow]:
    if not betas:
        raise ConfigurationError("sandwich sweep needs at least one beta.")
    if threads > 1:
        # one distance field per source, built before the workers share them
        for x, _ in pairs:
            distance_field(grid, x)
        chunks = Parallel(n_jobs=threads, prefer="threads")(
            delayed(_sandwich_pair)(domain, reach, grid, kernel, m, betas, x, y) for x, y in pairs
        )
    else:
        chunks = [_sandwich_pair(domain, reach, grid, kernel, m, betas, x, y) for x, y in pairs]
    rows = [row for chunk in chunks for row in chunk]
    failed = sum(not row.passed for row in rows)
    logger.info("sandwich sweep: %d rows, %d failed", len(rows), failed)
    return rows
