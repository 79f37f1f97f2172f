"""covershift: simulation-based recalibration of interval estimates.

Shift the endpoints of a confidence or credible interval by empirical
quantiles of replicate discrepancies so the interval attains its nominal
frequentist coverage.  Ships with analytically tractable normal models,
parametric/double bootstrap baselines, a likelihood-free (rejection ABC)
demonstration on a g-and-k MA(1) process, and a coverage-study harness with
a CLI front end.
"""

from .abc import (ABCConfig, PosteriorSample, abc_corrected_intervals,
                  abc_coverage_study, abc_rejection, credible_interval,
                  posterior_mean, posterior_mean_ladder, summarize)
from .bootstrap import (BootstrapConfig, corrected_bootstrap_interval,
                        double_bootstrap_interval, parametric_bootstrap_interval)
from .engine import (CorrectionResult, Interval, ModelBinding, correct_interval,
                     correct_margins, shift_quantiles)
from .errors import (ConfigError, CoverShiftError, DomainError, EstimationError,
                     InvalidSummaryError, RunError)
from .harness import (CltRow, CoverageReport, ExperimentConfig, SweepRow,
                      clt_check, run_coverage, sweep)
from .models import (GandKTheta, NormalLocationSpec, NormalScaleSpec,
                     gk_ma1_simulate, gk_quantile, ma1_latent, nl_estimate,
                     nl_interval, nl_simulate, normal_location_binding,
                     normal_scale_binding, ns_estimate, ns_interval, ns_simulate)
from .quantiles import (EmpiricalDistribution, chi_square_quantile,
                        empirical_quantile, std_normal_cdf, std_normal_quantile)
from .rng import RngStream, sample_std_normal

__version__ = "0.1.0"

__all__ = [
    "ABCConfig", "PosteriorSample", "abc_corrected_intervals", "abc_coverage_study",
    "abc_rejection", "credible_interval", "posterior_mean", "posterior_mean_ladder",
    "summarize",
    "BootstrapConfig", "corrected_bootstrap_interval", "double_bootstrap_interval",
    "parametric_bootstrap_interval",
    "CorrectionResult", "Interval", "ModelBinding", "correct_interval",
    "correct_margins", "shift_quantiles",
    "ConfigError", "CoverShiftError", "DomainError", "EstimationError",
    "InvalidSummaryError", "RunError",
    "CltRow", "CoverageReport", "ExperimentConfig", "SweepRow", "clt_check",
    "run_coverage", "sweep",
    "GandKTheta", "NormalLocationSpec", "NormalScaleSpec", "gk_ma1_simulate",
    "gk_quantile", "ma1_latent", "nl_estimate", "nl_interval", "nl_simulate",
    "normal_location_binding", "normal_scale_binding", "ns_estimate", "ns_interval",
    "ns_simulate",
    "EmpiricalDistribution", "chi_square_quantile", "empirical_quantile",
    "std_normal_cdf", "std_normal_quantile",
    "RngStream", "sample_std_normal",
]
