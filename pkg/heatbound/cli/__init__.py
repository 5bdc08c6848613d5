from .schema import (
    BoundSpec,
    GeometryStage,
    GridSpec,
    MetricsStage,
    OperatorsStage,
    PairSpec,
    Scenario,
    bundled_scenarios,
    load_scenario,
    resolve_scenario,
)
from .runner import CheckResult, RunResult, run_scenario
from .main import list_catalog, main

__all__ = [
    "BoundSpec",
    "CheckResult",
    "GeometryStage",
    "GridSpec",
    "MetricsStage",
    "OperatorsStage",
    "PairSpec",
    "RunResult",
    "Scenario",
    "bundled_scenarios",
    "list_catalog",
    "load_scenario",
    "main",
    "resolve_scenario",
    "run_scenario",
]
