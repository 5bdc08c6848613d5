import json

import pytest

from heatbound import ConfigurationError
from heatbound.cli import Scenario, bundled_scenarios, list_catalog, load_scenario, main, resolve_scenario, run_scenario
from heatbound.geometry.canvas import FILL
from heatbound.reports import read_csv_body


def _scenario(**overrides):
    payload = {
        "name": "adhoc",
        "domain": {"shape": "square", "params": {"side": 2.0}},
        "grid": {"spacing": 0.1},
        "stages": ["geometry"],
    }
    payload.update(overrides)
    return Scenario.from_dict(payload)


def test_list_catalog_names_shapes_and_scenarios():
    listing = list_catalog()
    assert "horseshoe" in listing
    assert "sharpness-m2" in listing
    assert listing == list_catalog()


def test_list_catalog_previews():
    assert FILL in list_catalog(previews=True)


def test_main_list_exits_cleanly(capsys):
    assert main(["list"]) == 0
    assert "annulus" in capsys.readouterr().out


def test_bundled_scenarios_are_sorted():
    names = bundled_scenarios()
    assert names == sorted(names)
    assert "convex-identity" in names


@pytest.mark.parametrize("name", bundled_scenarios())
def test_every_bundled_scenario_parses(name):
    assert resolve_scenario(name).name == name


def test_load_scenario_rejects_malformed_json(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    with pytest.raises(ConfigurationError):
        load_scenario(bad)


def test_load_scenario_rejects_a_missing_file(tmp_path):
    with pytest.raises(ConfigurationError):
        load_scenario(tmp_path / "absent.json")


@pytest.mark.parametrize(
    "overrides",
    [
        {"m": 3},
        {"stages": ["geometry", "plotting"]},
        {"stages": ["metrics"], "grid": None},
        {"pairs": {"count": 5}},
        {"pairs": {"explicit": [[["a", 0], [0, 0]]]}},
        {"pairs": {"explicit": [[[True, 0], [0, 0]]]}},
        {"times": [0.1, -1.0]},
        {"bounds": [{"check": "verify", "params": {"c1": 1.0}}]},
        {"bounds": [{"check": "sharpness", "window": [5, 1]}]},
        {"grid": {"spacing": 0.1, "divisions": 10}},
    ],
)
def test_scenario_schema_errors(overrides):
    with pytest.raises(ConfigurationError):
        _scenario(**overrides)


def test_main_rejects_a_bad_config_file(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"name": "bad"}), encoding="utf-8")
    assert main(["run", "--config", str(bad), "--out-dir", str(tmp_path)]) == 2


def test_main_rejects_a_non_numeric_pair_coordinate(tmp_path):
    bad = tmp_path / "pairs.json"
    payload = {
        "name": "pairs",
        "domain": {"shape": "square"},
        "grid": {"spacing": 0.1},
        "stages": ["metrics"],
        "pairs": {"explicit": [[["a", 0.0], [0.0, 0.0]]]},
        "metrics": {"compare": True},
    }
    bad.write_text(json.dumps(payload), encoding="utf-8")
    assert main(["run", "--config", str(bad), "--out-dir", str(tmp_path)]) == 2


def test_main_rejects_zero_threads(tmp_path):
    assert main(["run", "--config", "convex-identity", "--threads", "0", "--out-dir", str(tmp_path)]) == 2


def test_convex_identity_reports_are_reproducible(tmp_path):
    scenario = resolve_scenario("convex-identity")
    first = run_scenario(scenario, out_dir=tmp_path / "first")
    second = run_scenario(scenario, out_dir=tmp_path / "second")
    assert first.exit_code == second.exit_code == 0
    assert [check.name for check in first.checks] == ["metrics-coincide"]

    names = sorted(path.name for path in first.files)
    assert names == ["convex-identity-domain.txt", "convex-identity-geometry.json", "convex-identity-metrics.csv"]
    body = read_csv_body(tmp_path / "first" / "convex-identity-metrics.csv")
    assert body == read_csv_body(tmp_path / "second" / "convex-identity-metrics.csv")
    assert body.startswith("x1,x2,y1,y2,euclidean,geodesic_grid,visibility,riemannian,pass")
    assert body.count("\n") == 21


def test_main_runs_a_bundled_scenario(tmp_path):
    assert main(["run", "--config", "convex-identity", "--out-dir", str(tmp_path)]) == 0
    assert (tmp_path / "convex-identity-metrics.csv").exists()


@pytest.mark.parametrize("name", ["sharpness-m1", "sharpness-m2"])
def test_sharpness_scenarios_pass(tmp_path, name):
    result = run_scenario(resolve_scenario(name), out_dir=tmp_path)
    assert result.exit_code == 0, result.checks
    payload = json.loads((tmp_path / f"{name}-sharpness-0.json").read_text(encoding="utf-8"))
    assert payload["fit_points"] > 0


def test_interval_heat_kernel_scenario_passes(tmp_path):
    result = run_scenario(resolve_scenario("interval-heat-kernel"), out_dir=tmp_path)
    assert result.exit_code == 0, result.checks
    checks = {check.name: check for check in result.checks}
    assert {"kernel-t1", "semigroup", "verify-0", "verify-1"} <= set(checks)
    # verify-1 expects the c2 = 0.30 bound to break, so the check passes when it does
    assert checks["verify-1"].passed
    assert (tmp_path / "interval-heat-kernel-spectrum.json").exists()
    assert (tmp_path / "interval-heat-kernel-verify-1-ratios.csv").exists()


def test_a_grid_too_fine_for_the_eigensolver_exits_with_budget_code(tmp_path):
    scenario = _scenario(grid={"spacing": 0.02}, stages=["operators"])
    result = run_scenario(scenario, out_dir=tmp_path)
    assert result.exit_code == 3
    assert "coarser grid" in result.error


def test_a_configured_growth_constant_is_checked_against_every_sample(tmp_path):
    twisted = {"alphas": [0.5, 1.0], "betas": [1.0], "times": [0.5, 1.0]}
    generous = _scenario(grid={"spacing": 0.1}, stages=["operators"], operators={"twisted": dict(twisted, k=1.0)})
    assert run_scenario(generous, out_dir=tmp_path / "generous").exit_code == 0

    # far below -lambda_1, so even the decaying norms sit above the bound
    tiny = _scenario(grid={"spacing": 0.1}, stages=["operators"], operators={"twisted": dict(twisted, k=-100.0)})
    result = run_scenario(tiny, out_dir=tmp_path / "tiny")
    assert result.exit_code == 1
    assert [check.passed for check in result.checks] == [False]
    assert "4 of 4 samples" in result.checks[0].detail

    payload = json.loads((tmp_path / "tiny" / "adhoc-twisted.json").read_text(encoding="utf-8"))
    assert payload["k"] == -100.0
    assert payload["k_source"] == "configured"


def test_held_out_growth_fit_needs_two_times():
    with pytest.raises(ConfigurationError, match="two distinct times"):
        _scenario(stages=["operators"], operators={"twisted": {"alphas": [1.0], "betas": [1.0], "times": [0.5]}})


def test_missing_pairs_at_run_time_is_a_configuration_error(tmp_path):
    scenario = _scenario(stages=["metrics"], metrics={"compare": True})
    result = run_scenario(scenario, out_dir=tmp_path)
    assert result.exit_code == 2
    assert "pairs" in result.error


def test_a_wrong_expected_reach_fails_the_run(tmp_path):
    scenario = Scenario.from_dict(
        {
            "name": "wrong-reach",
            "domain": {"shape": "annulus", "params": {"r_in": 1.0, "r_out": 2.0}},
            "stages": ["geometry"],
            "geometry": {"expected_reach": 0.7, "reach_tolerance": 0.01},
        }
    )
    result = run_scenario(scenario, out_dir=tmp_path)
    assert result.exit_code == 1
    assert [check.passed for check in result.checks] == [False]


def test_reach_of_a_cornered_domain_stops_the_run(tmp_path):
    result = run_scenario(_scenario(geometry={"reach": True}), out_dir=tmp_path)
    assert result.exit_code == 1
    assert "no positive reach" in result.error


@pytest.mark.slow
@pytest.mark.parametrize("name", ["reach-oracle", "twisted-square", "horseshoe-sandwich"])
def test_slow_bundled_scenarios_pass(tmp_path, name):
    result = run_scenario(resolve_scenario(name), out_dir=tmp_path)
    assert result.exit_code == 0, (result.error, result.checks)
    assert result.checks
