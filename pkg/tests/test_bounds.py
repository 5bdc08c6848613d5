import math

import numpy as np
import pytest
from scipy import special

from heatbound import ConfigurationError, QuadratureError
from heatbound.bounds import (
    RATIO_COLUMNS,
    BoundParameters,
    FreeKernel,
    bound_contrast,
    conequiv_backward,
    conequiv_forward,
    decay_argument,
    fit_decay_constant,
    free_kernel_fourier,
    free_kernel_mass,
    free_kernel_origin,
    free_kernel_samples,
    free_pairs,
    gaussian_bound_rhs,
    kernel_values,
    metric_pairs,
    sharp_decay_constant,
    sigma_m,
    sigma_m_exact,
    tip_pairs,
    verify_bound,
)
from heatbound.geometry import Domain, GridDiscretization, horseshoe_tips, sample_nodes
from heatbound.operators import assemble_polyharmonic, spectral_decompose

DAVIES_C2 = 1.0 / (4.0 * 1.05)


def gaussian(t, d):
    return math.exp(-d * d / (4.0 * t)) / math.sqrt(4.0 * math.pi * t)


def symmetric_pairs(grid, steps):
    mid = grid.nearest_node(math.pi / 2)
    return metric_pairs(grid, [(mid - k, mid + k) for k in steps])


def test_sigma_values():
    assert sigma_m(1) == pytest.approx(0.25, abs=1e-15)
    assert sigma_m(2) == pytest.approx(0.2362349, abs=1e-7)
    assert sigma_m(3) == pytest.approx(5.0 * 6.0 ** (-1.2) * math.sin(math.pi / 10.0), rel=1e-14)
    assert abs(float(sigma_m_exact(2, dps=80)) - sigma_m(2)) < 1e-16


def test_sigma_requires_positive_order():
    with pytest.raises(ConfigurationError):
        sigma_m(0)


def test_sharp_decay_constant():
    assert sharp_decay_constant(1) == pytest.approx(0.25)
    assert sharp_decay_constant(2, mu=16.0, epsilon=0.01) == pytest.approx((sigma_m(2) - 0.01) / 16.0 ** (1.0 / 3.0))
    with pytest.raises(ConfigurationError):
        sharp_decay_constant(1, epsilon=0.25)
    with pytest.raises(ConfigurationError):
        sharp_decay_constant(1, mu=0.5)


def test_decay_argument():
    assert decay_argument(2.0, 1.0, 1) == pytest.approx(4.0)
    assert decay_argument(8.0, 8.0, 2) == pytest.approx(16.0 / 2.0)


def test_gaussian_envelope_matches_the_heat_kernel():
    params = BoundParameters(c1=1.0 / math.sqrt(4.0 * math.pi), c2=0.25, m=1, N=1)
    assert gaussian_bound_rhs(params, 2.0, 1.0) == pytest.approx(0.103777, abs=1e-6)
    assert gaussian_bound_rhs(params, 2.0, 1.0) == pytest.approx(gaussian(1.0, 2.0), rel=1e-12)


def test_gaussian_envelope_on_the_diagonal():
    params = BoundParameters(c1=2.0, c2=0.3, m=2, N=2, k=0.5)
    expected = 2.0 * 2.0 ** (-0.5) * math.exp(1.0)
    assert gaussian_bound_rhs(params, 0.0, 2.0) == pytest.approx(expected)
    assert gaussian_bound_rhs(params, 5.0, 2.0, metric_exponent_active=False) == pytest.approx(expected)


def test_gaussian_envelope_vanishes_at_small_times():
    params = BoundParameters(c1=1.0, c2=0.25, m=1, N=1, k=3.0)
    values = gaussian_bound_rhs(params, 1.0, np.array([1e-1, 1e-2, 1e-3]))
    assert np.all(np.diff(values) < 0)
    assert values[-1] < 1e-100


def test_gaussian_envelope_rejects_bad_arguments():
    params = BoundParameters(c1=1.0, c2=0.25, m=1, N=1)
    with pytest.raises(ConfigurationError):
        gaussian_bound_rhs(params, 1.0, 0.0)
    with pytest.raises(ConfigurationError):
        gaussian_bound_rhs(params, -1.0, 1.0)


@pytest.mark.parametrize(
    "c2, epsilon, T, m, expected",
    [(0.25, 0.05, 1.0, 1, 1.2), (1.0, 0.5, 0.5, 2, 0.5 * 0.5 ** (-4.0 / 3.0) + 1.0), (0.25, 0.05, math.inf, 1, 1.0)],
)
def test_conequiv_forward(c2, epsilon, T, m, expected):
    assert conequiv_forward(c2, epsilon, T, m) == pytest.approx(expected)


def test_conequiv_forward_examples():
    assert conequiv_forward(1.0, 0.5, 0.5, 2) == pytest.approx(2.2599, abs=1e-4)
    assert conequiv_forward(0.25, 0.05, 1e6, 1) == pytest.approx(1.0, abs=1e-6)
    with pytest.raises(ConfigurationError):
        conequiv_forward(0.25, 0.25, 1.0, 1)


@pytest.mark.parametrize(
    "k, epsilon, m, expected",
    [(0.3, 0.3, 2, 1.0), (2.0, 0.05, 1, 0.15811), (1.0, 0.1, 2, 0.17783)],
)
def test_conequiv_backward(k, epsilon, m, expected):
    assert conequiv_backward(k, epsilon, m) == pytest.approx(expected, abs=1e-5)


@pytest.mark.parametrize("m", [1, 2])
def test_conequiv_inequalities_on_a_grid(m):
    t, d = np.meshgrid(np.linspace(0.01, 3.0, 50), np.linspace(0.01, 3.0, 50))
    X = decay_argument(d, t, m)

    # forward: (c2 - eps) X <= (k - 1) t wherever t/d >= T
    for c2, epsilon, T in [(0.25, 0.05, 1.0), (1.0, 0.5, 0.5), (0.3, 0.1, 2.0)]:
        k = conequiv_forward(c2, epsilon, T, m)
        region = t / d >= T
        assert np.any(region)
        assert np.all(((c2 - epsilon) * X <= (k - 1.0) * t * (1.0 + 1e-12))[region])

    # backward: k t <= eps X wherever t/d <= T
    for k, epsilon in [(2.0, 0.05), (1.0, 0.1), (0.5, 0.5)]:
        T = conequiv_backward(k, epsilon, m)
        region = t / d <= T
        assert np.any(region)
        assert np.all((k * t <= epsilon * X * (1.0 + 1e-12))[region])


def test_bound_parameters_validation():
    with pytest.raises(ConfigurationError):
        BoundParameters(c1=0.0, c2=0.25, m=1, N=1)
    with pytest.raises(ConfigurationError):
        BoundParameters(c1=1.0, c2=0.25, m=1, N=3)
    with pytest.raises(ConfigurationError):
        BoundParameters(c1=1.0, c2=0.25, m=1, N=1, mu=0.5)
    with pytest.raises(ConfigurationError, match="c2"):
        BoundParameters.from_dict({"c1": 1.0}, m=1, N=1)
    params = BoundParameters.from_dict({"c2": 0.2, "k": 1}, m=2, N=1)
    assert (params.c1, params.k, params.T) == (1.0, 1.0, math.inf)
    assert params.with_constants(c1=3.0).c1 == 3.0


def test_free_kernel_for_second_order_is_the_gaussian():
    for t in (0.5, 1.0, 2.0):
        for d in np.linspace(0.0, 6.0, 20):
            assert free_kernel_fourier(1, 1, t, float(d)) == pytest.approx(gaussian(t, d), rel=1e-9, abs=1e-12)
    assert free_kernel_fourier(1, 1, 1.0, 2.0) == pytest.approx(0.1037769, abs=1e-7)


def test_free_kernel_origin_for_fourth_order():
    assert free_kernel_origin(2) == pytest.approx(special.gamma(1.25) / math.pi, rel=1e-14)
    assert free_kernel_origin(2) == pytest.approx(0.288514, abs=1e-6)
    assert free_kernel_fourier(2, 1, 1.0, 0.0) == pytest.approx(free_kernel_origin(2), abs=1e-8)
    assert free_kernel_fourier(2, 1, 16.0, 0.0) == pytest.approx(free_kernel_origin(2, 16.0), rel=1e-9)


def test_free_kernel_of_fourth_order_changes_sign():
    values = [free_kernel_fourier(2, 1, 1.0, d) for d in np.linspace(3.0, 8.0, 40)]
    assert min(values) < 0 < max(values)


@pytest.mark.parametrize("m", [1, 2])
def test_free_kernel_has_unit_mass(m):
    assert free_kernel_mass(m) == pytest.approx(1.0, abs=1e-8)


def test_free_kernel_floor_and_guards():
    with pytest.raises(QuadratureError, match="quadrature floor"):
        free_kernel_fourier(1, 1, 1.0, 20.0)
    with pytest.raises(ConfigurationError):
        free_kernel_fourier(1, 2, 1.0, 1.0)
    with pytest.raises(ConfigurationError):
        free_kernel_fourier(1, 1, 0.0, 1.0)


def test_free_kernel_samples_skip_the_floor():
    rows = free_kernel_samples(1, [1.0], [0.0, 2.0, 20.0])
    assert rows.shape == (2, 3)
    assert rows[1, 2] == pytest.approx(gaussian(1.0, 2.0), rel=1e-9)


def test_fitted_decay_of_the_gaussian():
    fit = fit_decay_constant(1)
    assert fit.c2 == pytest.approx(0.25, abs=1e-6)
    assert fit.points == 1200
    assert fit.residual < 1e-6


def test_fitted_decay_of_fourth_order_is_sigma():
    fit = fit_decay_constant(2, (10.0, 40.0))
    assert fit.points >= 3
    assert fit.c2 == pytest.approx(sigma_m(2), rel=0.05)


def test_fit_window_validation():
    with pytest.raises(ConfigurationError):
        fit_decay_constant(1, (40.0, 10.0))
    with pytest.raises(ConfigurationError, match="widen"):
        fit_decay_constant(2, (10.0, 10.5), samples=20)


def test_free_gaussian_meets_the_sharp_bound():
    c1 = (1.0 + 1e-9) / math.sqrt(4.0 * math.pi)
    params = BoundParameters(c1=c1, c2=0.25, m=1, N=1)
    distances = np.linspace(0.0, 6.0, 25)
    report = verify_bound(FreeKernel(1), free_pairs(distances), params, [0.5, 1.0, 2.0], bound="sharp")
    assert report.passed
    assert report.violating_sample is None
    assert report.fitted_c1 == pytest.approx(1.0 / math.sqrt(4.0 * math.pi), rel=1e-9)
    assert report.fitted_c2 == pytest.approx(0.25, abs=1e-6)
    assert report.samples_checked == 75


def test_window_restricts_the_samples():
    params = BoundParameters(c1=1.0, c2=0.25, m=1, N=1)
    distances = np.linspace(0.5, 6.0, 12)
    everything = verify_bound(FreeKernel(1), free_pairs(distances), params, [1.0])
    windowed = verify_bound(FreeKernel(1), free_pairs(distances), params, [1.0], window=(10.0, 40.0))
    assert windowed.samples_checked < everything.samples_checked
    assert all(10.0 <= s.d ** 2 <= 40.0 for s in windowed.samples)
    assert windowed.to_dict()["window"] == [10.0, 40.0]


def test_verify_bound_reports_the_worst_sample():
    params = BoundParameters(c1=0.1, c2=0.25, m=1, N=1)
    report = verify_bound(FreeKernel(1), free_pairs([0.0, 1.0, 2.0]), params, [1.0])
    assert not report.passed
    assert report.violating_sample == 0
    assert report.samples[0].ratio == pytest.approx(report.max_ratio)
    payload = report.to_dict()
    assert payload["pass"] is False
    assert payload["samples"] == 3
    rows = report.ratio_rows()
    assert set(rows[0]) == set(RATIO_COLUMNS)
    assert rows[2]["pair"] == 2


def test_verify_bound_reports_a_violation_beyond_float_range():
    params = BoundParameters(c1=1.0, c2=100.0, m=1, N=1)
    report = verify_bound(FreeKernel(1), free_pairs([10.0]), params, [1.0])
    assert not report.passed
    assert report.max_ratio == math.inf
    assert report.max_log_ratio == pytest.approx(math.log(report.samples[0].value) + 1e4, rel=1e-9)
    assert report.violating_sample == 0
    assert report.samples[0].ratio == math.inf
    payload = report.to_dict()
    assert payload["pass"] is False
    assert payload["max_log_ratio"] > 709.0
    assert report.ratio_rows()[0]["ratio"] == "inf"


def test_verify_bound_guards(interval_kernel):
    params = BoundParameters(c1=1.0, c2=0.25, m=1, N=1)
    with pytest.raises(ConfigurationError):
        verify_bound(FreeKernel(1), free_pairs([1.0]), params, [1.0], bound="triangle")
    with pytest.raises(ConfigurationError):
        verify_bound(FreeKernel(1), [], params, [1.0])
    with pytest.raises(ConfigurationError):
        verify_bound(FreeKernel(2), free_pairs([1.0]), params, [1.0])
    with pytest.raises(ConfigurationError, match="resolved regime"):
        verify_bound(interval_kernel, free_pairs([1.0]), params, [100.0])
    with pytest.raises(ConfigurationError):
        verify_bound(FreeKernel(1), free_pairs([50.0]), params, [1.0])


def test_interval_kernel_meets_the_davies_bound(interval_grid, interval_kernel):
    pairs = [pair.as_distance("euclidean") for pair in symmetric_pairs(interval_grid, range(5, 100, 10))]
    params = BoundParameters(c1=1.0, c2=DAVIES_C2, m=1, N=1)
    report = verify_bound(interval_kernel, pairs, params, [0.05, 0.1, 0.2, 0.3, 0.5])
    assert report.passed
    assert report.max_ratio < 1.0 / math.sqrt(4.0 * math.pi) + 1e-3
    assert report.fitted_c2 >= DAVIES_C2


def test_interval_kernel_outgrows_a_steeper_decay(interval_grid, interval_kernel):
    params = BoundParameters(c1=1.0, c2=0.30, m=1, N=1)
    times = [0.05, 0.1]
    fitted = []
    for reach_steps in (35, 65, 95):
        pairs = [pair.as_distance("euclidean") for pair in symmetric_pairs(interval_grid, range(5, reach_steps + 1, 10))]
        fitted.append(verify_bound(interval_kernel, pairs, params, times).fitted_c1)
    assert fitted[0] < fitted[1] < fitted[2]
    assert fitted[2] > 1.0


def test_metric_pairs_on_a_segment_are_euclidean(interval_grid):
    for pair in symmetric_pairs(interval_grid, [3, 40]):
        assert pair.geodesic == pytest.approx(pair.euclidean)
        assert pair.as_distance("riemannian").distance == pytest.approx(pair.euclidean)
    with pytest.raises(ConfigurationError):
        pair.as_distance("manhattan")


def test_kernel_values_agree_across_threads(interval_grid, interval_kernel):
    pairs = [pair.as_distance("euclidean") for pair in symmetric_pairs(interval_grid, [5, 25, 45])]
    serial = kernel_values(interval_kernel, pairs, [0.1, 0.2, 0.4])
    threaded = kernel_values(interval_kernel, pairs, [0.1, 0.2, 0.4], threads=3)
    np.testing.assert_array_equal(serial, threaded)
    assert serial.shape == (3, 3)


def test_tip_pairs_need_nearby_nodes(horseshoe):
    grid = GridDiscretization.build(horseshoe, 0.1)
    tips = horseshoe_tips(horseshoe, 0.15)
    assert tip_pairs(grid, tips, 0.15)
    with pytest.raises(ConfigurationError):
        tip_pairs(grid, (tips[0], np.array([10.0, 10.0])), 0.15)


def _contrast(opening):
    domain = Domain.horseshoe(1.0, 2.0, opening)
    grid = GridDiscretization.build(domain, 0.07)
    kernel = spectral_decompose(assemble_polyharmonic(grid, 1))
    params = BoundParameters(c1=1.0, c2=DAVIES_C2, m=1, N=2)
    bulk = metric_pairs(grid, sample_nodes(grid, 40, seed=3))
    tips = metric_pairs(grid, tip_pairs(grid, horseshoe_tips(domain, 0.15), 1.5 * grid.spacing))
    return bound_contrast(kernel, bulk, tips, params, [1.0, 1.5])


@pytest.mark.slow
def test_euclidean_bound_is_useless_across_a_narrow_gap():
    narrow = _contrast(0.1)
    assert narrow.contrast > 10.0
    assert narrow.tip_samples > 0
    assert narrow.to_dict()["contrast"] == pytest.approx(narrow.contrast)

    wider = [_contrast(angle).euclidean_looseness for angle in (0.3, 0.6)]
    assert narrow.euclidean_looseness > wider[0] > wider[1]
