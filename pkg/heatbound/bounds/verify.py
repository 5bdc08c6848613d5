import logging
import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from joblib import Parallel, delayed

from ..errors import ConfigurationError, QuadratureError
from ..geometry import GridDiscretization
from ..metrics import distance_field
from ..operators import SpectralHeatKernel, kernel_diagonal, resolved_regime
from .free_kernel import free_kernel_fourier
from .gaussian import decay_argument
from .params import BoundParameters, BoundReport, RatioSample

logger = logging.getLogger(__name__)

BOUND_KINDS = ("euclidean", "riemannian", "sharp")
# discrete kernel values below this fraction of the diagonal are rounding noise
_SPECTRAL_FLOOR = 1e-13
_BISECTION_STEPS = 80
_C2_CEILING = 1e3


@dataclass(frozen=True)
class PairDistance:
    """A sample pair and the metric distance between its members. For a
    spectral kernel x and y are node ids; for the free kernel x = 0 and y = d."""

    x: Union[int, float]
    y: Union[int, float]
    distance: float


@dataclass(frozen=True)
class MetricPair:
    x: int
    y: int
    euclidean: float
    geodesic: float

    def as_distance(self, metric: str) -> PairDistance:
        if metric == "euclidean":
            return PairDistance(self.x, self.y, self.euclidean)
        if metric == "riemannian":
            return PairDistance(self.x, self.y, self.geodesic)
        raise ConfigurationError(f"unknown metric '{metric}'.")


@dataclass(frozen=True)
class FreeKernel:
    """The heat kernel of (-d^2/dx^2)^m on the whole line."""

    m: int
    N: int = 1


KernelSource = Union[SpectralHeatKernel, FreeKernel]


def free_pairs(distances: Sequence[float]) -> List[PairDistance]:
    return [PairDistance(0.0, float(d), float(d)) for d in distances]


def metric_pairs(grid: GridDiscretization, node_pairs: Sequence[Tuple[int, int]]) -> List[MetricPair]:
    """Euclidean and grid-geodesic distances for node pairs, one field per source."""
    pts = grid.points
    by_source: Dict[int, List[int]] = defaultdict(list)
    for i, j in node_pairs:
        by_source[int(i)].append(int(j))
    geodesic: Dict[Tuple[int, int], float] = {}
    for i, targets in by_source.items():
        values = distance_field(grid, pts[i]).distances(pts[targets])
        for j, value in zip(targets, values):
            geodesic[(i, j)] = float(value)
    result = []
    for i, j in node_pairs:
        d0 = float(np.linalg.norm(pts[j] - pts[i]))
        result.append(MetricPair(int(i), int(j), d0, max(geodesic[(int(i), int(j))], d0)))
    return result


def tip_pairs(grid: GridDiscretization, tips: Tuple[np.ndarray, np.ndarray], radius: float) -> List[Tuple[int, int]]:
    """Node pairs with one member within ``radius`` of each tip."""
    pts = grid.points
    near_a = np.flatnonzero(np.linalg.norm(pts - tips[0], axis=1) <= radius)
    near_b = np.flatnonzero(np.linalg.norm(pts - tips[1], axis=1) <= radius)
    if near_a.size == 0 or near_b.size == 0:
        raise ConfigurationError(f"no grid node within {radius:g} of a tip; refine the grid.")
    return [(int(i), int(j)) for i in near_a for j in near_b]


def _spectral_values(spec: SpectralHeatKernel, pairs: Sequence[PairDistance], t: float) -> np.ndarray:
    w, count = spec.weights(t)
    xs = np.asarray([int(p.x) for p in pairs])
    ys = np.asarray([int(p.y) for p in pairs])
    phi = spec.eigenvectors
    values = np.einsum("ij,ij,j->i", phi[xs, :count], phi[ys, :count], w)
    floor = _SPECTRAL_FLOOR * float(kernel_diagonal(spec, t).max())
    return np.where(np.abs(values) < floor, np.nan, values)


def _free_values(source: FreeKernel, pairs: Sequence[PairDistance], t: float) -> np.ndarray:
    values = np.empty(len(pairs))
    for k, pair in enumerate(pairs):
        try:
            values[k] = free_kernel_fourier(source.m, source.N, t, pair.distance)
        except QuadratureError:
            values[k] = np.nan
    return values


def kernel_values(
    source: KernelSource,
    metric_field: Sequence[PairDistance],
    times: Sequence[float],
    threads: int = 1,
) -> np.ndarray:
    """|times| x |pairs| kernel values; NaN marks samples below the quadrature
    or rounding floor, which verification skips."""
    evaluate = _spectral_values if isinstance(source, SpectralHeatKernel) else _free_values
    if threads > 1:
        rows = Parallel(n_jobs=threads, prefer="threads")(
            delayed(evaluate)(source, metric_field, float(t)) for t in times
        )
    else:
        rows = [evaluate(source, metric_field, float(t)) for t in times]
    return np.vstack(rows)


def _source_shape(source: KernelSource) -> Tuple[int, int]:
    return source.m, source.N


def _check_times(source: KernelSource, times: Sequence[float]) -> None:
    if not times:
        raise ConfigurationError("verification needs at least one time.")
    if any(not t > 0 for t in times):
        raise ConfigurationError("verification times must be positive.")
    if isinstance(source, SpectralHeatKernel):
        t_min, t_max = resolved_regime(source)
        outside = [t for t in times if not t_min <= t <= t_max]
        if outside:
            raise ConfigurationError(
                f"times {outside} fall outside the resolved regime [{t_min:.4g}, {t_max:.4g}]."
            )


def _log_ratio_terms(params: BoundParameters, t: np.ndarray, d: np.ndarray, values: np.ndarray, active: bool):
    """log|K| + (N/2m) log t - kt and the decay argument, so that
    log(ratio) = base + c2 * X."""
    base = np.log(np.abs(values)) + params.N / (2.0 * params.m) * np.log(t) - params.k * t
    X = decay_argument(d, t, params.m) if active else np.zeros_like(d)
    return base, X


def _fit_c2(base: np.ndarray, X: np.ndarray, c1: float) -> float:
    """Largest c2 with max(base + c2 X) <= log c1, by bisection."""
    target = math.log(c1)
    worst = lambda c2: float(np.max(base + c2 * X))
    if worst(0.0) > target:
        return 0.0
    hi = 1.0
    while worst(hi) <= target:
        if hi >= _C2_CEILING:
            return hi
        hi *= 2.0
    lo = 0.0
    for _ in range(_BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        if worst(mid) <= target:
            lo = mid
        else:
            hi = mid
    return lo


def verify_bound(
    kernel_source: KernelSource,
    metric_field: Sequence[PairDistance],
    params: BoundParameters,
    times: Sequence[float],
    bound: str = "euclidean",
    metric_exponent_active: bool = True,
    window: Optional[Tuple[float, float]] = None,
    threads: int = 1,
) -> BoundReport:
    """Checks |K(t,x,y)| <= c1 t^{-N/2m} exp[-c2 X + kt] over pairs x times.

    Never raises on violation; the report says which sample was worst."""
    if bound not in BOUND_KINDS:
        raise ConfigurationError(f"bound must be one of {', '.join(BOUND_KINDS)}.")
    if not metric_field:
        raise ConfigurationError("verification needs at least one sample pair.")
    if _source_shape(kernel_source) != (params.m, params.N):
        raise ConfigurationError("bound parameters do not match the kernel's m and N.")
    params.require_kernel_regime()
    _check_times(kernel_source, times)

    values = kernel_values(kernel_source, metric_field, times, threads=threads)
    t_grid = np.repeat(np.asarray(times, dtype=float)[:, None], len(metric_field), axis=1)
    d_grid = np.repeat(np.asarray([p.distance for p in metric_field], dtype=float)[None, :], len(times), axis=0)
    keep = np.isfinite(values)
    if window is not None:
        X = decay_argument(d_grid, t_grid, params.m)
        keep &= (X >= window[0]) & (X <= window[1])
    if not np.any(keep):
        raise ConfigurationError("no sample survives the quadrature floor and window.")

    pair_grid = np.repeat(np.arange(len(metric_field))[None, :], len(times), axis=0)
    t, d, v, owner = t_grid[keep], d_grid[keep], values[keep], pair_grid[keep]
    base, X = _log_ratio_terms(params, t, d, v, metric_exponent_active)
    log_ratio = base + params.c2 * X
    worst = int(np.argmax(log_ratio))
    max_log_ratio = float(log_ratio[worst])
    with np.errstate(over="ignore", under="ignore"):
        max_ratio = float(np.exp(max_log_ratio))
        envelope = np.exp(params.k * t - params.c2 * X) * np.power(t, -params.N / (2.0 * params.m))

    samples = [
        RatioSample(index=k, t=float(t[k]), d=float(d[k]), value=float(v[k]), envelope=float(envelope[k]), pair=int(owner[k]))
        for k in range(len(v))
    ]
    report = BoundReport(
        bound=bound,
        max_ratio=max_ratio,
        fitted_c1=max_ratio,
        fitted_c2=_fit_c2(base, X, params.c1) if metric_exponent_active else params.c2,
        c1=params.c1,
        k=params.k,
        samples_checked=len(samples),
        violating_sample=worst if max_log_ratio > math.log(params.c1) else None,
        window=tuple(float(w) for w in window) if window else None,
        samples=samples,
        max_log_ratio=max_log_ratio,
    )
    logger.info(
        "%s bound: %d samples, max ratio %.6g (c1=%.4g), fitted c2 %.6g",
        bound, report.samples_checked, report.max_ratio, params.c1, report.fitted_c2,
    )
    return report


@dataclass
class ContrastReport:
    """Euclidean versus geodesic bound at pairs straddling a narrow gap.

    Each metric gets its own minimal c1 from all samples; looseness is
    c1 * envelope / |K| at the tip samples, i.e. how far the bound overshoots."""

    euclidean: BoundReport
    riemannian: BoundReport
    euclidean_looseness: float
    riemannian_looseness: float
    tip_samples: int

    @property
    def contrast(self) -> float:
        return self.euclidean_looseness / self.riemannian_looseness

    def to_dict(self) -> Dict[str, object]:
        return {
            "euclidean": self.euclidean.to_dict(),
            "riemannian": self.riemannian.to_dict(),
            "euclidean_looseness": self.euclidean_looseness,
            "riemannian_looseness": self.riemannian_looseness,
            "contrast": self.contrast,
            "tip_samples": self.tip_samples,
        }


def _tip_looseness(report: BoundReport, first_tip: int) -> float:
    worst = 0.0
    for sample in report.samples:
        if sample.pair >= first_tip:
            worst = max(worst, report.fitted_c1 * sample.envelope / abs(sample.value))
    return worst


def bound_contrast(
    kernel: SpectralHeatKernel,
    bulk: Sequence[MetricPair],
    tips: Sequence[MetricPair],
    params: BoundParameters,
    times: Sequence[float],
    threads: int = 1,
) -> ContrastReport:
    if not tips:
        raise ConfigurationError("bound contrast needs at least one tip pair.")
    pairs = list(bulk) + list(tips)
    reports = {}
    looseness = {}
    for metric in ("euclidean", "riemannian"):
        distances = [pair.as_distance(metric) for pair in pairs]
        report = verify_bound(kernel, distances, params, times, bound=metric, threads=threads)
        reports[metric] = report
        looseness[metric] = _tip_looseness(report, len(bulk))
    if looseness["riemannian"] <= 0:
        raise ConfigurationError("every tip sample fell below the rounding floor.")
    result = ContrastReport(
        euclidean=reports["euclidean"],
        riemannian=reports["riemannian"],
        euclidean_looseness=looseness["euclidean"],
        riemannian_looseness=looseness["riemannian"],
        tip_samples=len(tips) * len(times),
    )
    logger.info("bound contrast %.4g over %d tip samples", result.contrast, result.tip_samples)
    return result
