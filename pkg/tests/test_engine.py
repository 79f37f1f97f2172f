"""Recalibration engine: shift rule, invariances, and failure handling."""

import math

import numpy as np
import pytest

from covershift import (ConfigError, DomainError, EstimationError,
                        Interval, ModelBinding, NormalLocationSpec, RngStream,
                        correct_interval, correct_margins, normal_location_binding)

Z975 = 1.9599639845400545


def constant_offset_binding(c: float) -> ModelBinding:
    """Noise-free stub: every replicate reproduces the estimate exactly."""
    return ModelBinding(
        simulate=lambda theta, stream: np.full(4, float(theta[0])),
        estimate=lambda y: float(np.mean(y)),
        interval=lambda y, alpha, margin, stream: Interval(
            float(np.mean(y)) - c, float(np.mean(y)) + c, 1.0 - alpha),
    )


def test_stub_shifts_are_exact():
    c = 0.375
    binding = constant_offset_binding(c)
    x = np.full(4, 2.5)
    res = correct_interval(binding, x, 0.05, 64, RngStream(3))
    assert res.shift_lower == c
    assert res.shift_upper == -c
    assert res.corrected.lower == res.raw.lower + c
    assert res.corrected.upper == res.raw.upper - c
    assert res.corrected.lower == res.corrected.upper == 2.5
    assert not res.degenerate


def test_shift_rule_identity_holds_bit_exactly():
    binding = normal_location_binding(NormalLocationSpec(m=10, epsilon=0.7))
    x = binding.simulate(np.array([1.0]), RngStream(5).child(0))
    res = correct_interval(binding, x, 0.1, 50, RngStream(6))
    assert res.corrected.lower == res.raw.lower + res.shift_lower
    assert res.corrected.upper == res.raw.upper + res.shift_upper


def test_analytic_shift_normal_location():
    # theta_tilde - L(y) ~ N(z(1+eps)/sqrt(m), 1/m): its alpha/2 quantile is
    # z * eps / sqrt(m) = 0.438261 for eps=1, m=20.
    spec = NormalLocationSpec(m=20, epsilon=1.0)
    binding = normal_location_binding(spec)
    x = binding.simulate(np.array([0.0]), RngStream(11).child(0))
    res = correct_interval(binding, x, 0.05, 100_000, RngStream(12))
    target = Z975 / math.sqrt(20)
    assert res.shift_lower == pytest.approx(target, abs=0.01)
    assert res.shift_upper == pytest.approx(-target, abs=0.01)


def test_zero_error_shifts_are_small():
    binding = normal_location_binding(NormalLocationSpec(m=20, epsilon=0.0))
    x = binding.simulate(np.array([0.0]), RngStream(21).child(0))
    res = correct_interval(binding, x, 0.05, 2000, RngStream(22))
    assert abs(res.shift_lower) < 0.02
    assert abs(res.shift_upper) < 0.02


def test_translation_equivariance_location_family():
    binding = normal_location_binding(NormalLocationSpec(m=20, epsilon=1.0))
    x = binding.simulate(np.array([0.0]), RngStream(31).child(0))
    r0 = correct_interval(binding, x, 0.05, 100, RngStream(32))
    r1 = correct_interval(binding, x + 4.0, 0.05, 100, RngStream(32))
    # same noise stream: shifts agree and endpoints translate, up to rounding
    assert r1.shift_lower == pytest.approx(r0.shift_lower, abs=1e-12)
    assert r1.shift_upper == pytest.approx(r0.shift_upper, abs=1e-12)
    assert r1.corrected.lower == pytest.approx(r0.corrected.lower + 4.0, abs=1e-12)
    assert r1.corrected.upper == pytest.approx(r0.corrected.upper + 4.0, abs=1e-12)


def test_determinism():
    binding = normal_location_binding(NormalLocationSpec(m=15, epsilon=0.5))
    x = binding.simulate(np.array([0.3]), RngStream(41).child(0))
    a = correct_interval(binding, x, 0.05, 60, RngStream(42))
    b = correct_interval(binding, x, 0.05, 60, RngStream(42))
    assert a.raw == b.raw
    assert a.corrected == b.corrected
    assert (a.shift_lower, a.shift_upper, a.n, a.margin, a.degenerate) == \
           (b.shift_lower, b.shift_upper, b.n, b.margin, b.degenerate)
    assert np.array_equal(a.theta_tilde, b.theta_tilde)


def test_theta_tilde_override_is_used():
    binding = constant_offset_binding(1.0)
    x = np.full(4, 0.0)
    res = correct_interval(binding, x, 0.05, 30, RngStream(50), theta_tilde=np.array([9.0]))
    # replicates reproduce 9.0, so theta - L(y) = 1.0 still, but theta_tilde records the override
    assert float(res.theta_tilde[0]) == 9.0
    assert res.shift_lower == 1.0


def test_degenerate_crossing_is_flagged_not_swapped():
    # replicate intervals three times wider than the observed one force a crossing
    def width(y):
        return 1.0 if np.mean(y) < 0.5 else 3.0

    binding = ModelBinding(
        simulate=lambda theta, stream: np.full(2, 10.0),
        estimate=lambda y: float(np.mean(y)),
        interval=lambda y, alpha, margin, stream: Interval(
            float(np.mean(y)) - width(y) / 2, float(np.mean(y)) + width(y) / 2, 1 - alpha),
    )
    x = np.zeros(2)
    res = correct_interval(binding, x, 0.05, 25, RngStream(60))
    assert res.degenerate
    assert res.corrected.lower > res.corrected.upper
    assert res.corrected.lower == res.raw.lower + res.shift_lower


def test_estimator_failure_carries_replicate_index():
    def bad_estimate(y):
        if np.mean(y) > 5.0:
            raise ValueError("estimator blew up")
        return float(np.mean(y))

    binding = ModelBinding(
        simulate=lambda theta, stream: np.full(3, 10.0),
        estimate=lambda y: 0.0,
        interval=lambda y, alpha, margin, stream: Interval(
            bad_estimate(y) - 1, bad_estimate(y) + 1, 1 - alpha),
    )
    with pytest.raises(EstimationError) as err:
        correct_interval(binding, np.zeros(3), 0.05, 30, RngStream(70))
    assert err.value.replicate == 0


def test_replicate_count_and_alpha_validation():
    binding = constant_offset_binding(1.0)
    with pytest.raises(ConfigError):
        correct_interval(binding, np.zeros(4), 0.05, 19, RngStream(1))
    with pytest.raises(DomainError):
        correct_interval(binding, np.zeros(4), 1.5, 30, RngStream(1))
    with pytest.raises(DomainError):
        correct_interval(binding, np.zeros(4), 0.05, 30, RngStream(1), margin=1)


def two_margin_binding(c1: float, c2: float) -> ModelBinding:
    def interval(y, alpha, margin, stream):
        c = (c1, c2)[margin]
        center = float(y[margin])
        return Interval(center - c, center + c, 1 - alpha)

    return ModelBinding(
        simulate=lambda theta, stream: np.asarray(theta, dtype=float).copy(),
        estimate=lambda y: np.asarray(y, dtype=float).copy(),
        interval=interval,
        dim=2,
    )


def test_margins_constant_offsets():
    binding = two_margin_binding(0.5, 1.25)
    x = np.array([1.0, -2.0])
    results = correct_margins(binding, x, 0.05, 40, RngStream(80))
    assert [r.margin for r in results] == [0, 1]
    assert results[0].shift_lower == 0.5 and results[0].shift_upper == -0.5
    assert results[1].shift_lower == 1.25 and results[1].shift_upper == -1.25
    # margins share replicate datasets: identical theta_tilde vectors
    assert np.array_equal(results[0].theta_tilde, results[1].theta_tilde)


def test_single_margin_reduces_to_correct_interval():
    binding = normal_location_binding(NormalLocationSpec(m=12, epsilon=0.3))
    x = binding.simulate(np.array([0.0]), RngStream(90).child(0))
    single = correct_interval(binding, x, 0.05, 45, RngStream(91))
    multi = correct_margins(binding, x, 0.05, 45, RngStream(91))
    assert len(multi) == 1
    assert multi[0].corrected == single.corrected
    assert multi[0].shift_lower == single.shift_lower
    assert multi[0].shift_upper == single.shift_upper


def test_interval_all_used_once_per_dataset():
    calls = {"n": 0}

    def interval_all(y, alpha, stream):
        calls["n"] += 1
        return [Interval(float(y[0]) - 1, float(y[0]) + 1, 1 - alpha),
                Interval(float(y[1]) - 2, float(y[1]) + 2, 1 - alpha)]

    binding = ModelBinding(
        simulate=lambda theta, stream: np.asarray(theta, dtype=float).copy(),
        estimate=lambda y: np.asarray(y, dtype=float).copy(),
        interval=lambda y, alpha, margin, stream: interval_all(y, alpha, stream)[margin],
        interval_all=interval_all,
        dim=2,
    )
    results = correct_margins(binding, np.array([0.0, 1.0]), 0.05, 30, RngStream(95))
    assert calls["n"] == 31  # one per replicate plus the observed dataset
    assert results[0].shift_lower == 1.0
    assert results[1].shift_lower == 2.0
