import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..bounds import (
    RATIO_COLUMNS,
    BoundParameters,
    BoundReport,
    FreeKernel,
    bound_contrast,
    fit_decay_constant,
    free_pairs,
    metric_pairs,
    sharp_decay_constant,
    sigma_m,
    tip_pairs,
    verify_bound,
)
from ..errors import BudgetExceededError, ConfigurationError, HeatboundError
from ..geometry import GridDiscretization, Reach, estimate_reach, horseshoe_tips, render_preview, sample_nodes
from ..metrics import (
    SANDWICH_COLUMNS,
    check_corollary_euclidean,
    check_corollary_lipschitz,
    check_corollary_projection,
    distance_field,
    euclidean_distance,
    geodesic_distance,
    mollifier_constant,
    riemannian_type_estimate,
    sample_pairs,
    sandwich_rows,
    visibility_distance,
)
from ..operators import (
    SpectralHeatKernel,
    assemble_polyharmonic,
    heat_kernel_eval,
    log_times,
    on_diagonal_scan,
    resolved_regime,
    spectral_decompose,
    twisted_growth_scan,
    write_snapshot,
)
from ..reports import write_csv, write_json
from .schema import BoundSpec, Scenario

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_SCHEMA = 2
EXIT_BUDGET = 3

COMPARE_COLUMNS = ("x1", "x2", "y1", "y2", "euclidean", "geodesic_grid", "visibility", "riemannian", "pass")
_IDENTITY_RTOL = 1e-9
_SEMIGROUP_RTOL = 1e-8


@dataclass
class CheckResult:
    stage: str
    name: str
    passed: bool
    detail: str = ""


@dataclass
class RunResult:
    scenario: str
    checks: List[CheckResult] = field(default_factory=list)
    files: List[Path] = field(default_factory=list)
    exit_code: int = EXIT_OK
    error: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.exit_code == EXIT_OK


def _fmt(value: float) -> str:
    return f"{value:.10g}"


def _coords(point: np.ndarray) -> Tuple[float, float]:
    values = [float(v) for v in np.ravel(point)]
    return values[0], values[1] if len(values) > 1 else 0.0


class _ScenarioRun:
    """State shared between the stages of one run; the grid, reach and
    spectrum are built on first use."""

    def __init__(self, scenario: Scenario, out_dir: Path, threads: int) -> None:
        self.scenario = scenario
        self.out_dir = out_dir
        self.threads = max(1, threads)
        self.result = RunResult(scenario.name)
        self._grid: Optional[GridDiscretization] = None
        self._reach: Optional[Reach] = None
        self._spectrum: Optional[SpectralHeatKernel] = None
        self._operator = None

    # -- shared objects ------------------------------------------------------

    @property
    def domain(self):
        return self.scenario.domain

    @property
    def grid(self) -> GridDiscretization:
        if self._grid is None:
            if self.scenario.grid is None:
                raise ConfigurationError("this stage needs a 'grid' block.")
            self._grid = self.scenario.grid.build(self.domain)
            logger.info("grid: h=%.4g, %d nodes", self._grid.spacing, self._grid.node_count)
        return self._grid

    @property
    def reach(self) -> Reach:
        if self._reach is None:
            self._reach = estimate_reach(self.domain)
            logger.info("reach of %s: %.6g", self.domain.kind.value, self._reach.r)
        return self._reach

    @property
    def operator(self):
        if self._operator is None:
            self._operator = assemble_polyharmonic(self.grid, self.scenario.m)
        return self._operator

    @property
    def spectrum(self) -> SpectralHeatKernel:
        if self._spectrum is None:
            self._spectrum = spectral_decompose(self.operator)
        return self._spectrum

    def point_pairs(self) -> List[Tuple[np.ndarray, np.ndarray]]:
        spec = self.scenario.pairs
        pairs = [(np.asarray(x, dtype=float), np.asarray(y, dtype=float)) for x, y in spec.explicit]
        if spec.count:
            pairs.extend(sample_pairs(self.grid, spec.count, spec.seed, spec.max_separation))
        if not pairs:
            raise ConfigurationError("this stage needs sample 'pairs'.")
        return pairs

    def node_pairs(self) -> List[Tuple[int, int]]:
        spec = self.scenario.pairs
        pairs = [(self.grid.nearest_node(x), self.grid.nearest_node(y)) for x, y in spec.explicit]
        if spec.count:
            pairs.extend(sample_nodes(self.grid, spec.count, spec.seed))
        if not pairs:
            raise ConfigurationError("this stage needs sample 'pairs'.")
        return pairs

    def times(self, bound: Optional[BoundSpec] = None) -> List[float]:
        values = list(bound.times) if bound is not None and bound.times else list(self.scenario.times)
        if not values:
            raise ConfigurationError("this stage needs 'times'.")
        return values

    # -- bookkeeping ---------------------------------------------------------

    def path(self, suffix: str) -> Path:
        return self.out_dir / f"{self.scenario.name}-{suffix}"

    def record(self, stage: str, name: str, passed: bool, detail: str = "") -> None:
        self.result.checks.append(CheckResult(stage, name, bool(passed), detail))
        log = logger.info if passed else logger.warning
        log("%s/%s: %s %s", stage, name, "pass" if passed else "FAIL", detail)

    def wrote(self, path: Path) -> None:
        self.result.files.append(path)

    # -- stages --------------------------------------------------------------

    def geometry(self) -> None:
        stage = self.scenario.geometry
        preview = self.path("domain.txt")
        preview.parent.mkdir(parents=True, exist_ok=True)
        preview.write_text(render_preview(self.domain, stage.preview_columns) + "\n", encoding="utf-8")
        self.wrote(preview)

        summary: Dict[str, object] = {"domain": self.domain.to_dict(), "diameter": self.domain.diameter}
        if stage.reach:
            r = self.reach.r
            summary["reach"] = r
            summary["reach_tol"] = self.reach.tol
            if stage.expected_reach is not None:
                error = abs(r - stage.expected_reach)
                allowed = stage.reach_tolerance * stage.expected_reach
                self.record("geometry", "reach", error <= allowed, f"r={r:.6g}, expected {stage.expected_reach:.6g}")
        if self.scenario.grid is not None:
            summary["spacing"] = self.grid.spacing
            summary["nodes"] = self.grid.node_count
        self.wrote(write_json(self.path("geometry.json"), summary))

    def metrics(self) -> None:
        stage = self.scenario.metrics
        if stage.compare:
            self._compare_metrics()
        betas = list(stage.betas)
        if stage.beta_multiples:
            kernel = mollifier_constant(self.scenario.m, self.domain.dimension)
            if kernel.K_const == 0:
                raise ConfigurationError("beta_multiples need K > 0; give absolute 'betas' for m = 1.")
            betas.extend(multiple * kernel.K_const / self.reach.r for multiple in stage.beta_multiples)
        if betas:
            self._sandwich(betas)
        for name in stage.corollaries:
            self._corollary(name, stage.delta)

    def _compare_metrics(self) -> None:
        grid, domain, m = self.grid, self.domain, self.scenario.m
        rows = []
        worst = 0.0
        for x, y in self.point_pairs():
            d0 = euclidean_distance(x, y)
            values = {"euclidean": d0, "geodesic_grid": distance_field(grid, x).distance(y)}
            if domain.kind.polygonal:
                values["visibility"] = visibility_distance(domain, x, y)
            if m == 1:
                # d_{1,beta} is the geodesic distance itself
                values["riemannian"] = geodesic_distance(domain, grid, x, y).upper
            else:
                kernel = mollifier_constant(m, domain.dimension)
                beta = 4.0 * kernel.K_const / self.reach.r
                values["riemannian"] = riemannian_type_estimate(domain, self.reach, grid, kernel, m, beta, x, y).lower
            spread = max(abs(v - d0) for v in values.values()) / max(d0, 1.0)
            worst = max(worst, spread)
            x1, x2 = _coords(x)
            y1, y2 = _coords(y)
            row = {"x1": _fmt(x1), "x2": _fmt(x2), "y1": _fmt(y1), "y2": _fmt(y2)}
            row.update({key: _fmt(value) for key, value in values.items()})
            row["pass"] = str(spread <= _IDENTITY_RTOL).lower()
            rows.append(row)
        self.wrote(write_csv(self.path("metrics.csv"), COMPARE_COLUMNS, rows))
        self.record("metrics", "metrics-coincide", worst <= _IDENTITY_RTOL, f"worst relative spread {worst:.3g}")

    def _sandwich(self, betas: List[float]) -> None:
        kernel = mollifier_constant(self.scenario.m, self.domain.dimension)
        rows = sandwich_rows(
            self.domain, self.reach, self.grid, kernel, self.scenario.m, betas, self.point_pairs(), threads=self.threads
        )
        self.wrote(write_csv(self.path("sandwich.csv"), SANDWICH_COLUMNS, [row.to_row() for row in rows]))
        failed = sum(not row.passed for row in rows)
        self.record("metrics", "sandwich", failed == 0, f"{len(rows)} rows, {failed} violations")

    def _corollary(self, name: str, delta: Optional[float]) -> None:
        delta = 0.5 * self.reach.r if delta is None else delta
        if name == "euclidean":
            check = check_corollary_euclidean(self.domain, self.reach, self.grid, self.point_pairs())
        elif name == "lipschitz":
            x = self.point_pairs()[0][0]
            check = check_corollary_lipschitz(self.domain, self.reach, self.grid, x, delta, seed=self.scenario.pairs.seed or 0)
        else:
            check = check_corollary_projection(self.domain, self.reach, self.grid, delta, seed=self.scenario.pairs.seed or 0)
        self.record(
            "metrics",
            f"corollary-{name}",
            check.passed,
            f"{check.samples} samples, {check.violations} violations, worst margin {check.worst_margin:.3g}",
        )

    def operators(self) -> None:
        stage = self.scenario.operators
        spec = self.spectrum
        self.wrote(write_snapshot(spec, self.path("spectrum.json"), modes=stage.snapshot_modes))
        t_min, t_max = resolved_regime(spec)

        if stage.eigenvalue is not None:
            expected, rtol = stage.eigenvalue
            lowest = float(spec.eigenvalues[0])
            self.record(
                "operators", "lowest-eigenvalue", abs(lowest - expected) <= rtol * abs(expected),
                f"lambda_0={lowest:.8g}, expected {expected:.8g}",
            )

        for check in stage.point_checks:
            i = self.grid.nearest_node(check["x"])
            j = self.grid.nearest_node(check["y"])
            value = heat_kernel_eval(spec, check["t"], i, j)
            expected = check["expected"]
            self.record(
                "operators", f"kernel-t{check['t']:g}", abs(value - expected) <= check["rtol"] * abs(expected),
                f"K={value:.8g}, expected {expected:.8g}",
            )

        if stage.semigroup is not None:
            t, s = stage.semigroup
            composed = spec.semigroup(t) @ spec.semigroup(s)
            direct = spec.semigroup(t + s)
            error = float(np.max(np.abs(composed - direct)))
            scale = max(1.0, float(np.max(np.abs(direct))))
            self.record("operators", "semigroup", error <= _SEMIGROUP_RTOL * scale, f"max deviation {error:.3g}")

        if stage.on_diagonal is not None:
            upper = stage.on_diagonal["t_max"] or t_max
            times = log_times(t_min, upper, int(stage.on_diagonal["count"]))
            scan = on_diagonal_scan(spec, times)
            rows = [{"t": _fmt(t), "scaled_sup": _fmt(v)} for t, v in zip(scan.times, scan.scaled_sup)]
            self.wrote(write_csv(self.path("on-diagonal.csv"), ("t", "scaled_sup"), rows))
            self.record(
                "operators", "on-diagonal", scan.spread < stage.on_diagonal["max_spread"],
                f"spread {scan.spread:.4g} over t in [{t_min:.3g}, {upper:.3g}]",
            )

        if stage.twisted is not None:
            scan = twisted_growth_scan(self.operator, stage.twisted["alphas"], stage.twisted["betas"], stage.twisted["times"])
            exponent = 2 * self.scenario.m
            if stage.twisted_k is not None:
                k, source = stage.twisted_k, "configured"
            else:
                k, source = scan.held_out_k(exponent), "fitted before the last time"
            rows = [
                {
                    "alpha": _fmt(sample.alpha), "beta": _fmt(sample.beta), "t": _fmt(sample.t),
                    "norm": _fmt(sample.norm), "bound": _fmt(scan.bound(sample, exponent, k)),
                }
                for sample in scan.samples
            ]
            self.wrote(write_csv(self.path("twisted.csv"), ("alpha", "beta", "t", "norm", "bound"), rows))
            self.wrote(
                write_json(
                    self.path("twisted.json"),
                    {"k": k, "k_source": source, "k_order": scan.k_order, "k_four": scan.k_four, "m": scan.m, "samples": len(rows)},
                )
            )
            above = scan.violations(k, exponent)
            self.record(
                "operators", "twisted-growth", scan.finite and not above,
                f"k={k:.6g} ({source}), {len(above)} of {len(rows)} samples above the bound",
            )

    def bounds(self) -> None:
        for index, bound in enumerate(self.scenario.bounds):
            label = f"{bound.check}-{index}"
            if bound.check == "sharpness":
                self._sharpness(bound, label)
            elif bound.check == "verify":
                self._verify(bound, label)
            else:
                self._contrast(bound, label)

    def _write_report(self, report: BoundReport, label: str) -> None:
        self.wrote(write_json(self.path(f"{label}.json"), report.to_dict()))
        self.wrote(write_csv(self.path(f"{label}-ratios.csv"), RATIO_COLUMNS, report.ratio_rows()))

    def _sharpness(self, bound: BoundSpec, label: str) -> None:
        m = self.scenario.m
        window = bound.window or (10.0, 40.0)
        fit = fit_decay_constant(m, window)
        expected = bound.expected if bound.expected is not None else sigma_m(m)
        error = abs(fit.c2 - expected)
        self.record("bounds", label, error <= bound.rtol * expected, f"fitted c2={fit.c2:.8g}, expected {expected:.8g}")

        # the sharp envelope itself, with c1 fitted over the same window
        epsilon = float(bound.params.get("epsilon", 0.0))
        params = BoundParameters(c1=1.0, c2=sharp_decay_constant(m, epsilon=epsilon), m=m, N=1, epsilon=epsilon)
        xs = np.linspace(window[0], window[1], 200)
        distances = xs ** ((2 * m - 1) / (2.0 * m))
        report = verify_bound(
            FreeKernel(m), free_pairs(distances), params, [1.0], bound="sharp", window=window, threads=self.threads
        )
        payload = report.to_dict()
        payload.update({"fit_c2": fit.c2, "fit_points": fit.points, "sigma_m": sigma_m(m)})
        self.wrote(write_json(self.path(f"{label}.json"), payload))
        self.wrote(write_csv(self.path(f"{label}-ratios.csv"), RATIO_COLUMNS, report.ratio_rows()))

    def _verify(self, bound: BoundSpec, label: str) -> None:
        m = self.scenario.m
        if bound.source == "free":
            source = FreeKernel(m)
            pairs = free_pairs(bound.distances)
            N = 1
        else:
            source = self.spectrum
            pairs = [pair.as_distance(bound.metric) for pair in metric_pairs(self.grid, self.node_pairs())]
            N = self.domain.dimension
        params = BoundParameters.from_dict(bound.params, m, N)
        report = verify_bound(
            source, pairs, params, self.times(bound), bound=bound.metric, window=bound.window, threads=self.threads
        )
        self._write_report(report, label)
        detail = f"max ratio {report.max_ratio:.6g} against c1={params.c1:.6g}, fitted c2 {report.fitted_c2:.6g}"
        if bound.expect == "pass":
            self.record("bounds", label, report.passed, detail)
        elif bound.expect == "fail":
            self.record("bounds", label, not report.passed, detail)
        else:
            logger.info("bounds/%s: %s", label, detail)

    def _contrast(self, bound: BoundSpec, label: str) -> None:
        grid = self.grid
        radius = bound.tip_radius if bound.tip_radius is not None else 1.5 * grid.spacing
        tips = horseshoe_tips(self.domain, bound.tip_inset)
        params = BoundParameters.from_dict(bound.params, self.scenario.m, self.domain.dimension)
        spec = self.scenario.pairs
        bulk = metric_pairs(grid, sample_nodes(grid, spec.count, spec.seed)) if spec.count else []
        tip = metric_pairs(grid, tip_pairs(grid, tips, radius))
        report = bound_contrast(self.spectrum, bulk, tip, params, self.times(bound), threads=self.threads)
        self.wrote(write_json(self.path(f"{label}.json"), report.to_dict()))
        self.record(
            "bounds", label, report.contrast > bound.min_contrast,
            f"euclidean/riemannian looseness {report.contrast:.4g} (needs > {bound.min_contrast:g})",
        )


def run_scenario(scenario: Scenario, out_dir: Optional[Path] = None, threads: int = 1) -> RunResult:
    """Runs the enabled stages in order and writes their reports.

    Exit codes: 0 every enabled check passed, 1 some check failed or a
    numerical error stopped the run, 2 invalid configuration, 3 budget."""
    target = Path(out_dir or scenario.output_dir or "heatbound-out")
    run = _ScenarioRun(scenario, target, threads)
    result = run.result
    try:
        for stage in scenario.stages:
            logger.info("stage %s", stage)
            getattr(run, stage)()
    except BudgetExceededError as exc:
        result.error = str(exc)
        result.exit_code = EXIT_BUDGET
        logger.error("budget exceeded: %s", exc)
        return result
    except ConfigurationError as exc:
        result.error = str(exc)
        result.exit_code = EXIT_SCHEMA
        logger.error("configuration error: %s", exc)
        return result
    except HeatboundError as exc:
        result.error = str(exc)
        result.exit_code = EXIT_FAILED
        logger.error("%s: %s", type(exc).__name__, exc)
        return result

    if not all(check.passed for check in result.checks):
        result.exit_code = EXIT_FAILED
    return result
