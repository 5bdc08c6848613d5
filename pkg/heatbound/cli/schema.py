import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import List, Mapping, Optional, Tuple, Union

from ..errors import ConfigurationError
from ..geometry import Domain, GridDiscretization

STAGES = ("geometry", "metrics", "operators", "bounds")
BOUND_CHECKS = ("sharpness", "verify", "contrast")
_EXPECTATIONS = ("pass", "fail", None)


def _number(payload: Mapping[str, object], key: str, default: Optional[float] = None) -> Optional[float]:
    value = payload.get(key, default)
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigurationError(f"'{key}' must be a number.")
    return float(value)


def _integer(payload: Mapping[str, object], key: str, default: Optional[int] = None) -> Optional[int]:
    value = payload.get(key, default)
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigurationError(f"'{key}' must be an integer.")
    return value


def _numbers(payload: Mapping[str, object], key: str) -> Tuple[float, ...]:
    value = payload.get(key, [])
    if not isinstance(value, list):
        raise ConfigurationError(f"'{key}' must be a list of numbers.")
    if any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in value):
        raise ConfigurationError(f"'{key}' must be a list of numbers.")
    return tuple(float(v) for v in value)


def _block(payload: Mapping[str, object], key: str) -> Mapping[str, object]:
    value = payload.get(key) or {}
    if not isinstance(value, Mapping):
        raise ConfigurationError(f"'{key}' must be an object.")
    return value


def _point(payload: Mapping[str, object], key: str) -> Tuple[float, ...]:
    value = payload.get(key)
    if isinstance(value, list):
        return _numbers(payload, key)
    return (_number(payload, key),)


def _window(payload: Mapping[str, object], key: str) -> Optional[Tuple[float, float]]:
    values = _numbers(payload, key)
    if not values:
        return None
    if len(values) != 2 or not 0 <= values[0] < values[1]:
        raise ConfigurationError(f"'{key}' must be [lo, hi] with 0 <= lo < hi.")
    return values[0], values[1]


@dataclass(frozen=True)
class GridSpec:
    spacing: Optional[float] = None
    divisions: Optional[int] = None

    @classmethod
    def from_dict(cls, payload: Mapping[str, object]) -> "GridSpec":
        spacing = _number(payload, "spacing")
        divisions = _integer(payload, "divisions")
        if (spacing is None) == (divisions is None):
            raise ConfigurationError("grid needs exactly one of 'spacing' or 'divisions'.")
        if spacing is not None and not spacing > 0:
            raise ConfigurationError("grid spacing must be positive.")
        return cls(spacing=spacing, divisions=divisions)

    def build(self, domain: Domain) -> GridDiscretization:
        if self.divisions is not None:
            return GridDiscretization.with_divisions(domain, self.divisions)
        return GridDiscretization.build(domain, self.spacing)


@dataclass(frozen=True)
class PairSpec:
    count: int = 0
    seed: Optional[int] = None
    explicit: Tuple[Tuple[Tuple[float, ...], Tuple[float, ...]], ...] = ()
    max_separation: Optional[float] = None

    @classmethod
    def from_dict(cls, payload: Mapping[str, object]) -> "PairSpec":
        count = _integer(payload, "count", 0)
        seed = _integer(payload, "seed")
        raw = payload.get("explicit", [])
        if not isinstance(raw, list):
            raise ConfigurationError("'explicit' must be a list of [x, y] point pairs.")
        explicit = []
        for item in raw:
            if not (isinstance(item, list) and len(item) == 2):
                raise ConfigurationError("each explicit pair must be [x, y].")
            points = [p if isinstance(p, list) else [p] for p in item]
            if any(isinstance(v, bool) or not isinstance(v, (int, float)) for p in points for v in p):
                raise ConfigurationError("explicit pair coordinates must be numbers.")
            explicit.append(tuple(tuple(float(v) for v in p) for p in points))
        if count < 0:
            raise ConfigurationError("pair count must be non-negative.")
        if count and seed is None:
            raise ConfigurationError("random pair sampling requires a 'seed'.")
        return cls(
            count=count,
            seed=seed,
            explicit=tuple(explicit),
            max_separation=_number(payload, "max_separation"),
        )

    @property
    def empty(self) -> bool:
        return self.count == 0 and not self.explicit


@dataclass(frozen=True)
class GeometryStage:
    reach: bool = False
    expected_reach: Optional[float] = None
    reach_tolerance: float = 1e-3
    preview_columns: int = 40

    @classmethod
    def from_dict(cls, payload: Mapping[str, object]) -> "GeometryStage":
        expected = _number(payload, "expected_reach")
        return cls(
            reach=bool(payload.get("reach", expected is not None)),
            expected_reach=expected,
            reach_tolerance=_number(payload, "reach_tolerance", 1e-3),
            preview_columns=_integer(payload, "preview_columns", 40),
        )


@dataclass(frozen=True)
class MetricsStage:
    betas: Tuple[float, ...] = ()
    beta_multiples: Tuple[float, ...] = ()
    compare: bool = False
    corollaries: Tuple[str, ...] = ()
    delta: Optional[float] = None

    @classmethod
    def from_dict(cls, payload: Mapping[str, object]) -> "MetricsStage":
        corollaries = payload.get("corollaries", [])
        if not isinstance(corollaries, list) or any(c not in ("lipschitz", "projection", "euclidean") for c in corollaries):
            raise ConfigurationError("'corollaries' must list lipschitz, projection or euclidean.")
        return cls(
            betas=_numbers(payload, "betas"),
            beta_multiples=_numbers(payload, "beta_multiples"),
            compare=bool(payload.get("compare", False)),
            corollaries=tuple(corollaries),
            delta=_number(payload, "delta"),
        )


@dataclass(frozen=True)
class OperatorsStage:
    point_checks: Tuple[Mapping[str, object], ...] = ()
    semigroup: Optional[Tuple[float, float]] = None
    eigenvalue: Optional[Tuple[float, float]] = None
    on_diagonal: Optional[Mapping[str, Optional[float]]] = None
    twisted: Optional[Mapping[str, Tuple[float, ...]]] = None
    twisted_k: Optional[float] = None
    snapshot_modes: int = 0

    @classmethod
    def from_dict(cls, payload: Mapping[str, object]) -> "OperatorsStage":
        raw_points = payload.get("point_checks", [])
        if not isinstance(raw_points, list):
            raise ConfigurationError("'point_checks' must be a list.")
        points = []
        for item in raw_points:
            if not isinstance(item, Mapping):
                raise ConfigurationError("each point check must be an object.")
            if any(key not in item for key in ("t", "x", "y", "expected")):
                raise ConfigurationError("point checks need t, x, y and expected.")
            entry = {key: _number(item, key) for key in ("t", "expected")}
            entry["x"] = _point(item, "x")
            entry["y"] = _point(item, "y")
            entry["rtol"] = _number(item, "rtol", 0.01)
            points.append(entry)

        semigroup = _numbers(payload, "semigroup")
        if semigroup and len(semigroup) != 2:
            raise ConfigurationError("'semigroup' must be [t, s].")
        eigenvalue = _numbers(payload, "eigenvalue")
        if eigenvalue and len(eigenvalue) != 2:
            raise ConfigurationError("'eigenvalue' must be [expected, rtol].")

        on_diagonal = None
        if "on_diagonal" in payload:
            block = _block(payload, "on_diagonal")
            on_diagonal = {
                "t_max": _number(block, "t_max"),
                "count": _integer(block, "count", 12),
                "max_spread": _number(block, "max_spread", 2.0),
            }
        twisted = None
        twisted_k = None
        if "twisted" in payload:
            block = _block(payload, "twisted")
            twisted = {key: _numbers(block, key) for key in ("alphas", "betas", "times")}
            if not all(twisted.values()):
                raise ConfigurationError("'twisted' needs alphas, betas and times.")
            twisted_k = _number(block, "k")
            if twisted_k is None and len(set(twisted["times"])) < 2:
                raise ConfigurationError("'twisted' without a fixed k needs two distinct times to hold one out.")
        return cls(
            point_checks=tuple(points),
            semigroup=semigroup or None,
            eigenvalue=eigenvalue or None,
            on_diagonal=on_diagonal,
            twisted=twisted,
            twisted_k=twisted_k,
            snapshot_modes=_integer(payload, "snapshot_modes", 0),
        )


@dataclass(frozen=True)
class BoundSpec:
    check: str
    metric: str = "euclidean"
    source: str = "spectral"
    params: Mapping[str, object] = field(default_factory=dict)
    window: Optional[Tuple[float, float]] = None
    expected: Optional[float] = None
    rtol: float = 0.05
    expect: Optional[str] = None
    times: Tuple[float, ...] = ()
    distances: Tuple[float, ...] = ()
    tip_inset: float = 0.15
    tip_radius: Optional[float] = None
    min_contrast: float = 10.0

    @classmethod
    def from_dict(cls, payload: Mapping[str, object]) -> "BoundSpec":
        check = payload.get("check")
        if check not in BOUND_CHECKS:
            raise ConfigurationError(f"bound 'check' must be one of {', '.join(BOUND_CHECKS)}.")
        expect = payload.get("expect")
        if expect not in _EXPECTATIONS:
            raise ConfigurationError("bound 'expect' must be 'pass' or 'fail'.")
        metric = str(payload.get("metric", "euclidean"))
        if metric not in ("euclidean", "riemannian"):
            raise ConfigurationError("bound 'metric' must be euclidean or riemannian.")
        source = str(payload.get("source", "spectral"))
        if source not in ("spectral", "free"):
            raise ConfigurationError("bound 'source' must be spectral or free.")
        params = _block(payload, "params")
        if check == "verify" and "c2" not in params:
            raise ConfigurationError("verify bounds need params.c2.")
        return cls(
            check=check,
            metric=metric,
            source=source,
            params=dict(params),
            window=_window(payload, "window"),
            expected=_number(payload, "expected"),
            rtol=_number(payload, "rtol", 0.05),
            expect=expect,
            times=_numbers(payload, "times"),
            distances=_numbers(payload, "distances"),
            tip_inset=_number(payload, "tip_inset", 0.15),
            tip_radius=_number(payload, "tip_radius"),
            min_contrast=_number(payload, "min_contrast", 10.0),
        )


@dataclass(frozen=True)
class Scenario:
    name: str
    domain: Domain
    grid: Optional[GridSpec]
    m: int = 1
    description: str = ""
    stages: Tuple[str, ...] = STAGES
    pairs: PairSpec = PairSpec()
    times: Tuple[float, ...] = ()
    geometry: GeometryStage = GeometryStage()
    metrics: MetricsStage = MetricsStage()
    operators: OperatorsStage = OperatorsStage()
    bounds: Tuple[BoundSpec, ...] = ()
    output_dir: Optional[str] = None

    @classmethod
    def from_dict(cls, payload: Mapping[str, object]) -> "Scenario":
        if not isinstance(payload, Mapping):
            raise ConfigurationError("scenario must be a JSON object.")
        if "name" not in payload or "domain" not in payload:
            raise ConfigurationError("scenario must include 'name' and 'domain'.")
        stages = payload.get("stages", list(STAGES))
        if not isinstance(stages, list) or any(stage not in STAGES for stage in stages):
            raise ConfigurationError(f"'stages' must list stages among {', '.join(STAGES)}.")
        ordered = tuple(stage for stage in STAGES if stage in stages)

        m = _integer(payload, "m", 1)
        if m not in (1, 2):
            raise ConfigurationError("scenario 'm' must be 1 or 2.")
        raw_bounds = payload.get("bounds", [])
        if not isinstance(raw_bounds, list):
            raise ConfigurationError("'bounds' must be a list.")

        domain = Domain.from_dict(_block(payload, "domain"))
        grid = GridSpec.from_dict(_block(payload, "grid")) if "grid" in payload else None
        needs_grid = {"metrics", "operators"} & set(ordered) or any(
            b.get("check") in ("verify", "contrast") and b.get("source", "spectral") == "spectral"
            for b in raw_bounds
            if isinstance(b, Mapping)
        )
        if needs_grid and grid is None:
            raise ConfigurationError("scenario stages need a 'grid' block.")

        times = _numbers(payload, "times")
        if any(not t > 0 for t in times):
            raise ConfigurationError("scenario times must be positive.")

        return cls(
            name=str(payload["name"]),
            domain=domain,
            grid=grid,
            m=m,
            description=str(payload.get("description", "")),
            stages=ordered,
            pairs=PairSpec.from_dict(_block(payload, "pairs")),
            times=times,
            geometry=GeometryStage.from_dict(_block(payload, "geometry")),
            metrics=MetricsStage.from_dict(_block(payload, "metrics")),
            operators=OperatorsStage.from_dict(_block(payload, "operators")),
            bounds=tuple(BoundSpec.from_dict(b) if isinstance(b, Mapping) else _bad_bound() for b in raw_bounds),
            output_dir=payload.get("output_dir"),
        )


def _bad_bound() -> BoundSpec:
    raise ConfigurationError("each bound entry must be an object.")


def load_scenario(path: Union[str, Path]) -> Scenario:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigurationError(f"cannot read scenario {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"scenario {path} is not valid JSON: {exc}") from exc
    return Scenario.from_dict(payload)


def bundled_scenarios() -> List[str]:
    folder = resources.files("heatbound.cli").joinpath("scenarios")
    return sorted(entry.name[: -len(".json")] for entry in folder.iterdir() if entry.name.endswith(".json"))


def resolve_scenario(reference: Union[str, Path]) -> Scenario:
    """A path to a scenario file, or the name of a bundled scenario."""
    path = Path(reference)
    if path.exists() or str(reference) not in bundled_scenarios():
        return load_scenario(path)
    entry = resources.files("heatbound.cli").joinpath("scenarios", f"{reference}.json")
    return Scenario.from_dict(json.loads(entry.read_text(encoding="utf-8")))
