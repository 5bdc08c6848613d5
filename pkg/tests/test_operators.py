import json
import math

import numpy as np
import pytest

from heatbound import BudgetExceededError, ConfigurationError
from heatbound.geometry import Domain, GridDiscretization
from heatbound.operators import (
    EllipticFormSpec,
    SymbolSpec,
    assemble_polyharmonic,
    diff_spectra,
    ellipticity_constants,
    heat_kernel_eval,
    kernel_diagonal,
    kernel_matrix,
    load_snapshot,
    log_times,
    on_diagonal_scan,
    order_indices,
    power_norm,
    quadratic_form,
    ramp_phi,
    resolved_regime,
    spectral_decompose,
    spectrum_snapshot,
    strong_convexity_check,
    twisted_form_perturbation,
    twisted_growth_scan,
    twisted_semigroup_norm,
    write_snapshot,
)

# clamped beam: first root of cos(k) cosh(k) = 1 is k = 4.730040745, lambda = k^4
CLAMPED_BEAM_LOWEST = 4.730040744862704 ** 4


@pytest.fixture(scope="module")
def unit_square_operator():
    grid = GridDiscretization.build(Domain.square(1.0), 0.1)
    return assemble_polyharmonic(grid, 1)


def test_order_indices_are_descending():
    assert order_indices(2, 2) == [(2, 0), (1, 1), (0, 2)]
    assert order_indices(1, 1) == [(1,)]


def test_polyharmonic_symbol_is_the_power_of_the_norm():
    symbol = SymbolSpec.polyharmonic(2, 2)
    xi = np.array([[1.0, 0.0], [0.6, 0.8], [2.0, 1.0]])
    np.testing.assert_allclose(symbol.evaluate(xi), np.sum(xi ** 2, axis=1) ** 2)
    assert ellipticity_constants(symbol) == pytest.approx((1.0, 1.0))
    spec = EllipticFormSpec.for_symbol(symbol)
    assert (spec.lam, spec.mu) == pytest.approx((1.0, 1.0))


def test_polyharmonic_symbol_is_strongly_convex():
    check = strong_convexity_check(SymbolSpec.polyharmonic(2, 2))
    assert check
    assert check.witness is None
    assert check.min_eigenvalue >= 0.0


def test_identity_form_is_strongly_convex():
    symbol = SymbolSpec.from_gamma(1, 2, np.eye(2))
    assert strong_convexity_check(symbol).convex
    np.testing.assert_allclose(symbol.gamma(), np.eye(2))


def test_indefinite_form_yields_a_witness():
    symbol = SymbolSpec.from_gamma(1, 2, [[1.0, 2.0], [2.0, 1.0]])
    check = strong_convexity_check(symbol)
    assert not check
    assert check.min_eigenvalue == pytest.approx(-1.0)
    assert quadratic_form(symbol, check.witness) == pytest.approx(-1.0)


def test_gamma_must_come_from_a_symbol():
    # (2,0)+(0,2) and (1,1)+(1,1) both give index (2,2)
    with pytest.raises(ConfigurationError, match="not induced by a symbol"):
        SymbolSpec.from_gamma(2, 2, np.eye(3))


@pytest.mark.parametrize(
    "kwargs",
    [
        {"m": 0, "N": 1},
        {"m": 1, "N": 3},
        {"m": 1, "N": 1, "lam": 2.0, "mu": 1.0},
        {"m": 1, "N": 1, "c_shift": 0.5},
        {"m": 1, "N": 1, "d_shift": -1.0, "homogeneous": False},
    ],
)
def test_elliptic_form_validation(kwargs):
    with pytest.raises(ConfigurationError):
        EllipticFormSpec(**kwargs)


def test_interval_laplacian_matches_the_difference_spectrum(interval_grid, interval_kernel):
    h = interval_grid.spacing
    assert interval_grid.node_count == 199
    assert interval_kernel.eigenvalues[0] == pytest.approx(4.0 / h ** 2 * math.sin(h / 2.0) ** 2, rel=1e-10)
    assert interval_kernel.eigenvalues[0] == pytest.approx(1.0, rel=1e-4)
    np.testing.assert_allclose(interval_kernel.gram(), np.eye(199), atol=1e-10)


def test_quadratic_form_of_an_eigenfunction(interval_grid, interval_kernel):
    operator = assemble_polyharmonic(interval_grid, 1)
    f = interval_kernel.eigenvectors[:, 2]
    assert operator.quadratic_form(f) == pytest.approx(interval_kernel.eigenvalues[2] * operator.norm_squared(f))
    assert operator.norm_squared(f) == pytest.approx(1.0)
    assert np.max(interval_kernel.residuals(operator)[:10]) < 1e-8


def test_clamped_beam_lowest_eigenvalue():
    grid = GridDiscretization.build(Domain.interval(0.0, 1.0), 0.005)
    spec = spectral_decompose(assemble_polyharmonic(grid, 2))
    assert spec.m == 2 and spec.N == 1
    assert spec.eigenvalues[0] == pytest.approx(CLAMPED_BEAM_LOWEST, rel=0.05)
    assert spec.eigenvalues[0] < CLAMPED_BEAM_LOWEST

    t_min, _ = resolved_regime(spec)
    scan = on_diagonal_scan(spec, log_times(t_min, 1e-3, 8))
    assert len(scan.scaled_sup) == 8
    assert scan.spread < 1.5


def test_bilaplacian_on_the_disc_is_symmetric_positive():
    grid = GridDiscretization.build(Domain.disc(1.0), 0.2)
    operator = assemble_polyharmonic(grid, 2)
    dense = operator.dense()
    np.testing.assert_array_equal(dense, dense.T)
    assert spectral_decompose(operator).eigenvalues[0] > 0


def test_assembly_rejects_bad_arguments(interval_grid):
    with pytest.raises(ConfigurationError):
        assemble_polyharmonic(interval_grid, 3)
    with pytest.raises(ConfigurationError):
        assemble_polyharmonic(interval_grid, 1, scale=0.0)


def test_spectral_decompose_of_a_small_matrix():
    spec = spectral_decompose(np.array([[2.0, 1.0], [1.0, 2.0]]))
    np.testing.assert_allclose(spec.eigenvalues, [1.0, 3.0])
    assert spec.node_count == 2


def test_spectral_decompose_guards():
    with pytest.raises(ConfigurationError):
        spectral_decompose(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(BudgetExceededError, match="coarser grid"):
        spectral_decompose(np.eye(5), budget=4)


def test_heat_kernel_at_the_midpoint(interval_grid, interval_kernel):
    # (2/pi) sum_n e^{-n^2} sin^2(n pi/2)
    reference = 2.0 / math.pi * sum(math.exp(-(n ** 2)) for n in range(1, 40, 2))
    assert reference == pytest.approx(0.234256, abs=1e-4)
    mid = interval_grid.nearest_node(math.pi / 2)
    assert heat_kernel_eval(interval_kernel, 1.0, mid, mid) == pytest.approx(reference, rel=1e-3)


def test_heat_kernel_requires_positive_time(interval_kernel):
    with pytest.raises(ConfigurationError):
        heat_kernel_eval(interval_kernel, 0.0, 0, 0)


def test_semigroup_identity(interval_kernel):
    composed = interval_kernel.semigroup(0.5) @ interval_kernel.semigroup(0.25)
    direct = interval_kernel.semigroup(0.75)
    np.testing.assert_allclose(composed, direct, atol=1e-8 * np.abs(direct).max())


def test_kernel_matrix_is_symmetric_with_the_diagonal(interval_kernel):
    matrix = kernel_matrix(interval_kernel, 0.2)
    np.testing.assert_allclose(matrix, matrix.T, atol=1e-12)
    np.testing.assert_allclose(np.diag(matrix), kernel_diagonal(interval_kernel, 0.2), rtol=0, atol=1e-12)


def test_resolved_regime(interval_grid, interval_kernel):
    t_min, t_max = resolved_regime(interval_kernel)
    assert t_min == pytest.approx(10.0 * interval_grid.spacing ** 2)
    assert t_max == pytest.approx(30.0 / interval_kernel.eigenvalues[0])


def test_log_times():
    times = log_times(0.01, 1.0, 3)
    assert times == pytest.approx([0.01, 0.1, 1.0])
    with pytest.raises(ConfigurationError):
        log_times(1.0, 0.5, 3)


def test_power_norm_of_a_diagonal_matrix():
    assert power_norm(np.diag([3.0, 1.0, 0.5])) == pytest.approx(3.0, rel=1e-6)


def test_untwisted_norm_is_the_ground_state_decay(unit_square_operator):
    spec = spectral_decompose(unit_square_operator)
    phi = ramp_phi(unit_square_operator, 1.0)
    value = twisted_semigroup_norm(unit_square_operator, phi, 0.0, 0.1)
    assert value == pytest.approx(math.exp(-spec.eigenvalues[0] * 0.1), rel=1e-6)
    assert value <= 1.0


def test_constant_weight_is_a_scalar_similarity(unit_square_operator):
    flat = np.full(unit_square_operator.node_count, 3.0)
    twisted = twisted_semigroup_norm(unit_square_operator, flat, 2.0, 0.1)
    plain = twisted_semigroup_norm(unit_square_operator, flat, 0.0, 0.1)
    assert twisted == pytest.approx(plain, rel=1e-12)


def test_twisting_overflow_guard(unit_square_operator):
    phi = ramp_phi(unit_square_operator, 1.0)
    with pytest.raises(BudgetExceededError, match="overflow guard"):
        twisted_semigroup_norm(unit_square_operator, phi, 500.0, 0.1)


def test_twisted_norm_validates_inputs(unit_square_operator):
    with pytest.raises(ConfigurationError):
        twisted_semigroup_norm(unit_square_operator, np.zeros(3), 1.0, 0.1)
    with pytest.raises(ConfigurationError):
        twisted_semigroup_norm(unit_square_operator, np.zeros(unit_square_operator.node_count), 1.0, 0.0)
    with pytest.raises(ConfigurationError):
        ramp_phi(unit_square_operator, 0.0)


def test_ramp_is_one_lipschitz(unit_square_operator):
    phi = ramp_phi(unit_square_operator, 2.0)
    x = unit_square_operator.grid.points[:, 0]
    order = np.argsort(x)
    slopes = np.diff(phi[order]) / np.maximum(np.diff(x[order]), 1e-12)
    assert np.all(slopes <= 1.0 + 1e-12)


def test_twisted_growth_k_fitted_early_covers_the_last_time(unit_square_operator):
    scan = twisted_growth_scan(unit_square_operator, [0.5, 1.0, 2.0], [0.5, 2.0], [0.5, 1.0])
    assert scan.finite
    assert len(scan.samples) == 12
    k = scan.held_out_k(2)
    assert k >= 0.0
    assert scan.violations(k, 2) == ()
    assert scan.violations(k + 1.0, 4) == ()


def test_twisted_growth_rejects_a_k_below_the_spectral_floor(unit_square_operator):
    # the norm is at least the spectral radius exp(-lambda_1 t), and 1 + alpha^2 + beta^2 >= 1.5 here
    scan = twisted_growth_scan(unit_square_operator, [0.5, 1.0], [0.5, 1.0], [0.5, 1.0])
    lowest = float(np.min(spectral_decompose(unit_square_operator).eigenvalues))
    assert scan.violations(-2.0 * lowest, 2) == scan.samples
    assert scan.bound(scan.samples[0], 2, -2.0 * lowest) < scan.samples[0].norm
    assert scan.bound(scan.samples[0], 2, 1e6) == math.inf


def test_held_out_growth_fit_needs_two_times(unit_square_operator):
    scan = twisted_growth_scan(unit_square_operator, [1.0], [1.0], [0.5])
    with pytest.raises(ConfigurationError):
        scan.held_out_k(2)


def test_form_perturbation_vanishes_without_twist(unit_square_operator):
    phi = ramp_phi(unit_square_operator, 1.0)
    untwisted = twisted_form_perturbation(unit_square_operator, phi, 0.0, 1.0, samples=8)
    assert untwisted.c_epsilon == 0.0
    assert untwisted.samples == 16

    twisted = twisted_form_perturbation(unit_square_operator, phi, 2.0, 1.0, samples=8)
    assert math.isfinite(twisted.c_epsilon)
    assert twisted.c_epsilon >= 0.0


def test_snapshot_round_trip_and_diff(tmp_path, interval_kernel):
    path = write_snapshot(interval_kernel, tmp_path / "spectrum.json", modes=5)
    payload = load_snapshot(path)
    assert payload == spectrum_snapshot(interval_kernel, modes=5)
    assert payload["node_count"] == 199
    assert not diff_spectra(payload, json.loads(path.read_text())).has_changes()

    shifted = dict(payload, eigenvalues=payload["eigenvalues"][:4] + [payload["eigenvalues"][4] * 1.01, 99.0])
    diff = diff_spectra(payload, shifted)
    assert diff.has_changes()
    assert [index for index, _, _ in diff.changed_modes] == [4]
    assert diff.added_modes == [5]


def test_snapshot_requires_metadata(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text(json.dumps({"eigenvalues": [1.0]}))
    with pytest.raises(ConfigurationError, match="missing"):
        load_snapshot(path)
