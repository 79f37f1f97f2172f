"""Worked models: frozen values, family structure, and quantile-function validity."""

import math

import numpy as np
import pytest

from covershift import (DomainError, GandKTheta, NormalLocationSpec, NormalScaleSpec,
                        RngStream, correct_interval, gk_ma1_simulate, gk_quantile,
                        ma1_latent, nl_estimate, nl_interval, nl_simulate,
                        normal_scale_binding, ns_estimate, ns_interval, ns_simulate)

Z975 = 1.9599639845400545


# ---------------------------------------------------------------------------
# Normal location
# ---------------------------------------------------------------------------

def test_nl_simulate_shapes_and_location_family():
    spec = NormalLocationSpec(m=2)
    assert nl_simulate(0.0, spec, RngStream(1)).shape == (2,)
    spec = NormalLocationSpec(m=50)
    base = nl_simulate(0.0, spec, RngStream(2))
    shifted = nl_simulate(5.0, spec, RngStream(2))
    assert np.array_equal(shifted, base + 5.0)


@pytest.mark.slow
def test_nl_simulate_clt_band():
    x = nl_simulate(0.0, NormalLocationSpec(m=1_000_000), RngStream(3))
    assert abs(x.mean()) < 0.005


def test_nl_estimate():
    assert nl_estimate([1.0, 2.0, 3.0]) == 2.0
    x = np.array([0.4, -1.2, 3.3])
    assert nl_estimate(x + 7.0) == pytest.approx(nl_estimate(x) + 7.0, abs=1e-12)
    with pytest.raises(DomainError):
        nl_estimate([])


def test_nl_interval_frozen_half_width():
    iv = nl_interval(np.zeros(20), 0.05, NormalLocationSpec(m=20, epsilon=0.0))
    assert iv.lower == pytest.approx(-0.438261, abs=1e-6)
    assert iv.upper == pytest.approx(0.438261, abs=1e-6)


def test_nl_interval_width_inflation_and_symmetry():
    x = nl_simulate(0.0, NormalLocationSpec(m=20), RngStream(4))
    narrow = nl_interval(x, 0.05, NormalLocationSpec(m=20, epsilon=0.0))
    wide = nl_interval(x, 0.05, NormalLocationSpec(m=20, epsilon=1.0))
    assert wide.width == pytest.approx(2.0 * narrow.width, rel=1e-12)
    center = float(np.mean(x))
    assert narrow.contains(center)
    assert narrow.upper - center == pytest.approx(center - narrow.lower, abs=1e-12)


def test_nl_true_correction_restores_exact_interval():
    # the exactly calibrated endpoints sit z*eps/sqrt(m) inside the inflated ones
    x = nl_simulate(0.0, NormalLocationSpec(m=20), RngStream(5))
    raw = nl_interval(x, 0.05, NormalLocationSpec(m=20, epsilon=1.0))
    exact = nl_interval(x, 0.05, NormalLocationSpec(m=20, epsilon=0.0))
    shift = Z975 * 1.0 / math.sqrt(20)
    assert raw.lower + shift == pytest.approx(exact.lower, abs=1e-12)
    assert raw.upper - shift == pytest.approx(exact.upper, abs=1e-12)


def test_nl_shift_samples_do_not_depend_on_theta_tilde():
    # location family: with a shared stream the estimated shifts agree across
    # overrides up to float rounding
    from covershift import normal_location_binding
    binding = normal_location_binding(NormalLocationSpec(m=20, epsilon=1.0))
    x = binding.simulate(np.array([0.0]), RngStream(6).child(0))
    shifts = []
    for tt in (-2.0, 0.0, 2.0):
        res = correct_interval(binding, x, 0.05, 100, RngStream(7),
                               theta_tilde=np.array([tt]))
        shifts.append((res.shift_lower, res.shift_upper))
    for lo, hi in shifts[1:]:
        assert lo == pytest.approx(shifts[0][0], abs=1e-12)
        assert hi == pytest.approx(shifts[0][1], abs=1e-12)


# ---------------------------------------------------------------------------
# Normal scale
# ---------------------------------------------------------------------------

def test_ns_simulate_scale_family():
    spec = NormalScaleSpec(m=30)
    one = ns_simulate(1.0, spec, RngStream(8))
    four = ns_simulate(4.0, spec, RngStream(8))
    assert np.array_equal(four, 2.0 * one)
    assert ns_simulate(1.0, NormalScaleSpec(m=2), RngStream(9)).shape == (2,)
    with pytest.raises(DomainError):
        ns_simulate(0.0, spec, RngStream(10))


def test_ns_estimate():
    assert ns_estimate([1.0, -1.0]) == 2.0
    assert ns_estimate(np.full(5, 3.3)) == 0.0
    with pytest.raises(DomainError):
        ns_estimate([1.0])


@pytest.mark.slow
def test_ns_estimate_consistency_band():
    x = ns_simulate(1.0, NormalScaleSpec(m=1_000_000), RngStream(11))
    assert abs(ns_estimate(x) - 1.0) < 0.01


def unit_variance_dataset(m: int = 20) -> np.ndarray:
    # +-c alternating with c picked so the sample variance is exactly 1
    c = math.sqrt((m - 1) / m)
    return np.array([-c, c] * (m // 2))


def test_ns_interval_frozen_values():
    x = unit_variance_dataset(20)
    assert ns_estimate(x) == pytest.approx(1.0, abs=1e-15)
    iv = ns_interval(x, 0.05, NormalScaleSpec(m=20, epsilon=0.0))
    assert iv.lower == pytest.approx(19.0 / 32.8523, abs=2e-4)
    assert iv.upper == pytest.approx(19.0 / 8.90652, abs=2e-4)
    assert iv.lower == pytest.approx(0.5783, abs=1e-4)
    assert iv.upper == pytest.approx(2.1333, abs=1e-4)


def test_ns_interval_epsilon_is_additive():
    x = unit_variance_dataset(20)
    base = ns_interval(x, 0.05, NormalScaleSpec(m=20, epsilon=0.0))
    biased = ns_interval(x, 0.05, NormalScaleSpec(m=20, epsilon=0.2))
    assert biased.lower == base.lower - 0.2
    assert biased.upper == base.upper - 0.2


def test_ns_interval_is_proper_for_random_data():
    spec = NormalScaleSpec(m=20, epsilon=0.3)
    for seed in range(25):
        x = ns_simulate(1.0, spec, RngStream(seed))
        iv = ns_interval(x, 0.05, spec)
        assert iv.lower < iv.upper


def test_ns_shift_quantiles_scale_with_theta_tilde():
    # scale family: the discrepancy samples at theta=4 are 4*(samples at 1 - eps) + eps,
    # an increasing map, so the estimated shifts transform the same way
    eps = 0.2
    binding = normal_scale_binding(NormalScaleSpec(m=20, epsilon=eps))
    x = binding.simulate(np.array([1.0]), RngStream(12).child(0))
    at_one = correct_interval(binding, x, 0.05, 400, RngStream(13),
                              theta_tilde=np.array([1.0]))
    at_four = correct_interval(binding, x, 0.05, 400, RngStream(13),
                               theta_tilde=np.array([4.0]))
    assert at_four.shift_lower == pytest.approx(4.0 * (at_one.shift_lower - eps) + eps,
                                                abs=1e-10)
    assert at_four.shift_upper == pytest.approx(4.0 * (at_one.shift_upper - eps) + eps,
                                                abs=1e-10)


# ---------------------------------------------------------------------------
# g-and-k with MA(1) latent quantiles
# ---------------------------------------------------------------------------

def test_gk_quantile_trivial_cases():
    theta = GandKTheta(a=1.7, b=2.0, g=0.6, k=0.3)
    assert gk_quantile(0.0, theta) == 1.7
    linear = GandKTheta(a=0.5, b=2.0, g=0.0, k=0.0)
    for z in (-1.3, 0.4, 2.0):
        assert gk_quantile(z, linear) == pytest.approx(0.5 + 2.0 * z, abs=1e-14)


def test_gk_quantile_frozen_value():
    theta = GandKTheta(a=0.0, b=1.0, g=2.0, k=0.5)
    # independent evaluation via the exp form: (1 + 0.8*(1-e^-2)/(1+e^-2)) * 2**0.5
    e2 = math.exp(-2.0)
    expected = (1.0 + 0.8 * (1.0 - e2) / (1.0 + e2)) * math.sqrt(2.0)
    assert expected == pytest.approx(2.275859, abs=1e-6)
    assert gk_quantile(1.0, theta) == pytest.approx(expected, abs=1e-12)


def test_gk_validation():
    with pytest.raises(DomainError):
        GandKTheta(a=0.0, b=0.0, g=0.0, k=0.0)
    with pytest.raises(DomainError):
        GandKTheta(a=0.0, b=1.0, g=0.0, k=-0.5)
    with pytest.raises(DomainError):
        GandKTheta(a=0.0, b=1.0, g=0.0, k=0.0, c=0.5)


def test_gk_quantile_strictly_increasing_on_test_region():
    z = np.linspace(-6.0, 6.0, 2001)
    for g in (-5.0, -2.0, -0.5, 0.0, 0.5, 1.0, 2.0, 5.0):
        for k in (0.0, 0.25, 0.5, 1.0):
            for b in (0.01, 1.0):
                q = gk_quantile(z, GandKTheta(a=0.05, b=b, g=g, k=k))
                assert np.all(np.diff(q) > 0), f"not increasing at g={g}, k={k}, b={b}"


def test_ma1_latent_unit_variance_and_iid_limit():
    theta = GandKTheta(a=0.0, b=1.0, g=0.1, k=0.1, ma_coef=0.0)
    stream = RngStream(14)
    series = gk_ma1_simulate(theta, 100, stream)
    # ma_coef=0 reduces to i.i.d. draws through the quantile function
    eta = stream.generator().standard_normal(101)
    assert np.allclose(series, gk_quantile(eta[1:], theta))
    z = ma1_latent(0.65, 200_000, RngStream(15))
    assert abs(z.var() - 1.0) < 0.02


@pytest.mark.slow
def test_ma1_latent_lag1_autocorrelation():
    for ma in (0.2, 0.7):
        z = ma1_latent(ma, 1_000_000, RngStream(16))
        zc = z - z.mean()
        acf1 = float(zc[1:] @ zc[:-1]) / float(zc @ zc)
        assert acf1 == pytest.approx(ma / (1 + ma * ma), abs=0.005)


def test_gk_ma1_simulate_validation_and_shape():
    theta = GandKTheta(a=0.0, b=0.05, g=0.3, k=0.4, ma_coef=0.2)
    assert gk_ma1_simulate(theta, 2, RngStream(17)).shape == (2,)
    with pytest.raises(DomainError):
        gk_ma1_simulate(theta, 1, RngStream(17))


def test_model_parameter_specs_validate():
    with pytest.raises(DomainError):
        NormalLocationSpec(m=1)
    with pytest.raises(DomainError):
        NormalLocationSpec(m=10, epsilon=-0.1)
    with pytest.raises(DomainError):
        NormalScaleSpec(m=1)
