"""Parametric bootstrap baselines: percentile, calibrated (double), and recalibrated.

All three consume a :class:`~covershift.engine.ModelBinding` and draw their
bootstrap datasets by simulating from the fitted model.  Intervals are of the
percentile type throughout: endpoints are order statistics of the bootstrap
re-estimates under the package-wide rank rule, so they can be checked exactly
against a sort-and-index oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .engine import CorrectionResult, Interval, ModelBinding, correct_interval
from .errors import ConfigError, EstimationError
from .quantiles import sorted_quantile
from .rng import RngStream

__all__ = [
    "BootstrapConfig",
    "parametric_bootstrap_interval",
    "double_bootstrap_interval",
    "corrected_bootstrap_interval",
]


@dataclass(frozen=True)
class BootstrapConfig:
    """Replicate budgets: B outer datasets, B2 inner datasets per outer (double only)."""

    B: int = 400
    B2: int | None = 25

    def __post_init__(self):
        if self.B < 50:
            raise ConfigError(f"need at least 50 bootstrap replicates, got B={self.B}")
        if self.B2 is not None and self.B2 < 20:
            raise ConfigError(f"need at least 20 inner replicates, got B2={self.B2}")


def _simulate_many(binding: ModelBinding, theta: np.ndarray, count: int,
                   stream: RngStream):
    """Datasets for one bootstrap level.

    Uses the binding's batch hook on a single generator when present;
    otherwise falls back to one substream per dataset.
    """
    if binding.simulate_batch is not None:
        return binding.simulate_batch(theta, count, stream.generator())
    return [binding.simulate(theta, stream.child(i)) for i in range(count)]


def _estimate_many(binding: ModelBinding, datasets, margin: int) -> np.ndarray:
    if binding.estimate_batch is not None:
        return np.asarray(binding.estimate_batch(datasets), dtype=float)
    out = np.empty(len(datasets))
    for i, y in enumerate(datasets):
        try:
            out[i] = float(np.atleast_1d(np.asarray(binding.estimate(y), dtype=float))[margin])
        except Exception as exc:
            raise EstimationError(f"bootstrap replicate {i} failed: {exc}", replicate=i) from exc
    return out


def parametric_bootstrap_interval(binding: ModelBinding, x, alpha: float,
                                  cfg: BootstrapConfig | None, stream: RngStream,
                                  margin: int = 0) -> Interval:
    """Percentile interval from B re-estimates simulated at the fitted parameter."""
    cfg = cfg or BootstrapConfig()
    theta_hat = np.atleast_1d(np.asarray(binding.estimate(x), dtype=float))
    datasets = _simulate_many(binding, theta_hat, cfg.B, stream)
    estimates = np.sort(_estimate_many(binding, datasets, margin))
    return Interval(sorted_quantile(estimates, alpha / 2.0),
                    sorted_quantile(estimates, 1.0 - alpha / 2.0),
                    1.0 - alpha)


def _double_bootstrap_levels(binding: ModelBinding, x, alpha: float,
                             cfg: BootstrapConfig, stream: RngStream,
                             margin: int) -> tuple[float, float, np.ndarray]:
    """Calibrated quantile levels and the sorted outer re-estimates."""
    if cfg is None or cfg.B2 is None:
        raise ConfigError("double bootstrap requires an inner replicate count B2")
    theta_hat_vec = np.atleast_1d(np.asarray(binding.estimate(x), dtype=float))
    theta_hat = float(theta_hat_vec[margin])

    outer_sets = _simulate_many(binding, theta_hat_vec, cfg.B, stream.child(0))
    outer_est = _estimate_many(binding, outer_sets, margin)

    u = np.empty(cfg.B)
    inner_stream = stream.child(1)
    for i in range(cfg.B):
        outer_theta = theta_hat_vec.copy()
        outer_theta[margin] = outer_est[i]
        inner_sets = _simulate_many(binding, outer_theta, cfg.B2, inner_stream.child(i))
        inner_est = _estimate_many(binding, inner_sets, margin)
        u[i] = np.count_nonzero(inner_est <= theta_hat) / cfg.B2

    u.sort()
    floor = 1.0 / (2.0 * cfg.B)
    level_lo = min(max(sorted_quantile(u, alpha / 2.0), floor), 1.0 - floor)
    level_hi = min(max(sorted_quantile(u, 1.0 - alpha / 2.0), floor), 1.0 - floor)
    return level_lo, level_hi, np.sort(outer_est)


def double_bootstrap_interval(binding: ModelBinding, x, alpha: float,
                              cfg: BootstrapConfig, stream: RngStream,
                              margin: int = 0) -> Interval:
    """Calibrated percentile interval via nested (double) bootstrap.

    For each outer re-estimate, an inner bootstrap yields ``u_i``: the inner
    ECDF evaluated at the original estimate.  Under a well-calibrated method
    the ``u_i`` are approximately uniform, so the empirical ``alpha/2`` and
    ``1 - alpha/2`` quantiles of ``u`` recover the nominal levels; otherwise
    they give the adjusted levels at which the outer percentile interval
    attains the nominal one-sided rates.  Adjusted levels are clamped to
    ``[1/(2B), 1 - 1/(2B)]``, the resolution limit of B outer replicates.
    """
    level_lo, level_hi, outer_sorted = _double_bootstrap_levels(
        binding, x, alpha, cfg, stream, margin)
    return Interval(sorted_quantile(outer_sorted, level_lo),
                    sorted_quantile(outer_sorted, level_hi),
                    1.0 - alpha)


def corrected_bootstrap_interval(binding: ModelBinding, x, alpha: float,
                                 cfg: BootstrapConfig | None, n: int,
                                 stream: RngStream, margin: int = 0) -> CorrectionResult:
    """Recalibrated percentile bootstrap: the engine run with bootstrap intervals.

    The interval method handed to the engine is the percentile bootstrap at
    ``cfg.B`` (default 99) replicates, evaluated afresh (with its own
    substream) on the observed data and on each of the ``n`` replicate
    datasets.
    """
    cfg = cfg or BootstrapConfig(B=99, B2=None)

    def bootstrap_method(y, a, j, method_stream):
        return parametric_bootstrap_interval(binding, y, a, cfg, method_stream, margin=j)

    recalibrated = binding.with_interval(bootstrap_method, stochastic=True)
    return correct_interval(recalibrated, x, alpha, n, stream, margin=margin)
