"""Semantic exception hierarchy.

Public functions raise these instead of bare ``ValueError``/``RuntimeError``
so callers (and the CLI) can distinguish bad inputs from failed runs.
"""


class CoverShiftError(Exception):
    """Base error for this package."""


class DomainError(CoverShiftError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConfigError(CoverShiftError, ValueError):
    """A configuration object or option set is invalid or inconsistent."""


class InvalidSummaryError(CoverShiftError, ValueError):
    """A summary statistic is undefined for the given series (degenerate data)."""


class EstimationError(CoverShiftError, RuntimeError):
    """An estimator or interval method failed during a replicate evaluation.

    ``replicate`` is the 0-based index of the failing replicate, or ``None``
    when the failure is not attributable to a single replicate.
    """

    def __init__(self, message: str, replicate: int | None = None):
        super().__init__(message)
        self.replicate = replicate


class RunError(CoverShiftError, RuntimeError):
    """An experiment-level failure (too many replicate failures, unusable run)."""
