"""Worked data-generating processes with deliberately miscalibrated intervals.

Two tractable normal models make every recalibration quantity analytically
checkable:

* ``normal location``: i.i.d. N(theta, 1) data; the interval half-width is
  inflated by a factor ``1 + epsilon``, so raw coverage overshoots for
  ``epsilon > 0``.  The exact fix shifts each endpoint inward by
  ``z_{1-alpha/2} * epsilon / sqrt(m)``.
* ``normal scale``: i.i.d. N(0, theta) data with theta the variance; both
  chi-square interval endpoints are biased down by a constant ``epsilon``,
  so the exact fix shifts both endpoints up by ``epsilon``.

The third process is a g-and-k distribution driven by MA(1)-dependent normal
quantiles, used by the likelihood-free demonstration: its density is
intractable but simulation is a one-liner, which is exactly the regime the
recalibration engine targets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .engine import Interval, ModelBinding
from .errors import DomainError
from .quantiles import chi_square_quantile, std_normal_quantile
from .rng import RngStream

__all__ = [
    "NormalLocationSpec",
    "NormalScaleSpec",
    "GandKTheta",
    "nl_simulate",
    "nl_estimate",
    "nl_interval",
    "ns_simulate",
    "ns_estimate",
    "ns_interval",
    "gk_quantile",
    "ma1_latent",
    "gk_ma1_simulate",
    "normal_location_binding",
    "normal_scale_binding",
]


@dataclass(frozen=True)
class NormalLocationSpec:
    """Sample size and half-width inflation for the location model."""

    m: int = 20
    epsilon: float = 0.0
    sigma: float = 1.0  # the model's noise scale is fixed at one

    def __post_init__(self):
        if self.m < 2:
            raise DomainError(f"sample size must be >= 2, got {self.m}")
        if self.epsilon < 0:
            raise DomainError(f"epsilon must be non-negative, got {self.epsilon}")
        if self.sigma != 1.0:
            raise DomainError("the location model fixes sigma = 1")


@dataclass(frozen=True)
class NormalScaleSpec:
    """Sample size and additive downward endpoint bias for the variance model."""

    m: int = 20
    epsilon: float = 0.0

    def __post_init__(self):
        if self.m < 2:
            raise DomainError(f"sample size must be >= 2, got {self.m}")
        if self.epsilon < 0:
            raise DomainError(f"epsilon must be non-negative, got {self.epsilon}")


@dataclass(frozen=True)
class GandKTheta:
    """g-and-k parameters plus the MA(1) coefficient of the latent quantiles.

    ``c`` is the conventional overlap constant 0.8; together with ``k > -0.5``
    and ``b > 0`` it keeps the quantile function increasing over the parameter
    ranges used here (see the monotonicity checks in the test-suite).
    ``ma_coef`` is named to avoid colliding with the interval level alpha.
    """

    a: float
    b: float
    g: float
    k: float
    ma_coef: float = 0.0
    c: float = 0.8

    def __post_init__(self):
        if self.b <= 0:
            raise DomainError(f"scale b must be positive, got {self.b}")
        if self.k <= -0.5:
            raise DomainError(f"kurtosis k must exceed -0.5, got {self.k}")
        if self.c != 0.8:
            raise DomainError("the overlap constant c is fixed at 0.8")

    @classmethod
    def from_array(cls, values) -> "GandKTheta":
        a, b, g, k, ma = (float(v) for v in values)
        return cls(a=a, b=b, g=g, k=k, ma_coef=ma)

    def as_array(self) -> np.ndarray:
        return np.array([self.a, self.b, self.g, self.k, self.ma_coef])


PARAM_NAMES = ("a", "b", "g", "k", "ma_coef")


# ---------------------------------------------------------------------------
# Normal location model
# ---------------------------------------------------------------------------

def nl_simulate(theta: float, spec: NormalLocationSpec, stream: RngStream) -> np.ndarray:
    """m i.i.d. N(theta, 1) draws; a location family sharing noise across theta."""
    return theta + stream.generator().standard_normal(spec.m)


def nl_estimate(x) -> float:
    """Sample mean."""
    arr = np.asarray(x, dtype=float)
    if arr.size == 0:
        raise DomainError("cannot estimate a location from an empty dataset")
    return float(arr.mean())


def nl_interval(x, alpha: float, spec: NormalLocationSpec) -> Interval:
    """Symmetric interval about the mean with half-width inflated by 1 + epsilon."""
    arr = np.asarray(x, dtype=float)
    m = arr.size
    half = std_normal_quantile(1.0 - alpha / 2.0) * (1.0 + spec.epsilon) / math.sqrt(m)
    center = float(arr.mean())
    return Interval(center - half, center + half, 1.0 - alpha)


# ---------------------------------------------------------------------------
# Normal scale (variance) model
# ---------------------------------------------------------------------------

def ns_simulate(theta: float, spec: NormalScaleSpec, stream: RngStream) -> np.ndarray:
    """m i.i.d. N(0, theta) draws; a scale family sharing noise across theta."""
    if theta <= 0:
        raise DomainError(f"variance must be positive, got {theta}")
    return math.sqrt(theta) * stream.generator().standard_normal(spec.m)


def ns_estimate(x) -> float:
    """Sample variance with the mean subtracted (divisor m - 1)."""
    arr = np.asarray(x, dtype=float)
    if arr.size < 2:
        raise DomainError("variance estimation needs at least two observations")
    return float(arr.var(ddof=1))


@lru_cache(maxsize=4096)
def _chi2q(p: float, k: int) -> float:
    return chi_square_quantile(p, k)


def ns_interval(x, alpha: float, spec: NormalScaleSpec) -> Interval:
    """Chi-square variance interval with both endpoints lowered by epsilon."""
    arr = np.asarray(x, dtype=float)
    m = arr.size
    if m < 2:
        raise DomainError("variance interval needs at least two observations")
    s2 = float(arr.var(ddof=1))
    lower = (m - 1) * s2 / _chi2q(1.0 - alpha / 2.0, m - 1) - spec.epsilon
    upper = (m - 1) * s2 / _chi2q(alpha / 2.0, m - 1) - spec.epsilon
    return Interval(lower, upper, 1.0 - alpha)


# ---------------------------------------------------------------------------
# g-and-k with MA(1) latent quantiles
# ---------------------------------------------------------------------------

def gk_quantile(z, theta: GandKTheta):
    """g-and-k quantile function evaluated at standard-normal deviate(s) z.

    Q(z) = a + b * (1 + c * tanh(g*z/2)) * (1 + z^2)^k * z; the tanh form is
    the numerically stable rewrite of (1 - exp(-g z)) / (1 + exp(-g z)).
    Accepts scalars or arrays.
    """
    z = np.asarray(z, dtype=float)
    skew = 1.0 + theta.c * np.tanh(0.5 * theta.g * z)
    out = theta.a + theta.b * skew * (1.0 + z * z) ** theta.k * z
    return out if out.ndim else float(out)


def ma1_latent(ma_coef: float, length: int, stream: RngStream) -> np.ndarray:
    """Unit-variance MA(1) sequence z_i = (eta_i + ma*eta_{i-1}) / sqrt(1 + ma^2)."""
    if length < 1:
        raise DomainError(f"series length must be >= 1, got {length}")
    eta = stream.generator().standard_normal(length + 1)
    return (eta[1:] + ma_coef * eta[:-1]) / math.sqrt(1.0 + ma_coef * ma_coef)


def gk_ma1_simulate(theta: GandKTheta, length: int, stream: RngStream) -> np.ndarray:
    """Series of g-and-k values driven by MA(1)-dependent normal quantiles."""
    if length < 2:
        raise DomainError(f"series length must be >= 2, got {length}")
    return gk_quantile(ma1_latent(theta.ma_coef, length, stream), theta)


# ---------------------------------------------------------------------------
# Engine bindings
# ---------------------------------------------------------------------------

def _scalar_theta(theta) -> float:
    return float(np.atleast_1d(np.asarray(theta, dtype=float))[0])


def normal_location_binding(spec: NormalLocationSpec) -> ModelBinding:
    """Location model wired for the engine and the bootstrap runners."""

    def simulate_batch(theta, count, gen):
        return _scalar_theta(theta) + gen.standard_normal((count, spec.m))

    return ModelBinding(
        simulate=lambda theta, stream: nl_simulate(_scalar_theta(theta), spec, stream),
        estimate=nl_estimate,
        interval=lambda x, alpha, margin, stream: nl_interval(x, alpha, spec),
        simulate_batch=simulate_batch,
        estimate_batch=lambda ys: np.asarray(ys, dtype=float).mean(axis=1),
    )


def normal_scale_binding(spec: NormalScaleSpec) -> ModelBinding:
    """Variance model wired for the engine and the bootstrap runners."""

    def simulate_batch(theta, count, gen):
        return math.sqrt(_scalar_theta(theta)) * gen.standard_normal((count, spec.m))

    return ModelBinding(
        simulate=lambda theta, stream: ns_simulate(_scalar_theta(theta), spec, stream),
        estimate=ns_estimate,
        interval=lambda x, alpha, margin, stream: ns_interval(x, alpha, spec),
        simulate_batch=simulate_batch,
        estimate_batch=lambda ys: np.asarray(ys, dtype=float).var(axis=1, ddof=1),
    )
