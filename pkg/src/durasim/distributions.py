"""Parametric enrollment and time-to-event models.

Only the families the engine needs: exponential and Weibull survival, the
scaled Beta(1, beta) enrollment-time family, and a Gamma CDF helper. Models
are immutable, validated at construction, and all methods are pure, so
instances can be shared freely across threads.
"""

import math
from dataclasses import dataclass
from typing import Union

from . import special
from .errors import ParameterError

LN2 = math.log(2.0)


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ParameterError(message)


def _check_probability(p: float) -> None:
    _require(0.0 <= p < 1.0, f"probability must lie in [0, 1), got {p!r}")


@dataclass(frozen=True)
class ExponentialModel:
    """Exponential time-to-event model with hazard ``rate`` per month."""

    rate: float

    def __post_init__(self):
        _require(math.isfinite(self.rate) and self.rate > 0.0,
                 f"rate must be finite and > 0, got {self.rate!r}")

    @classmethod
    def from_median(cls, median: float) -> "ExponentialModel":
        _require(math.isfinite(median) and median > 0.0,
                 f"median must be finite and > 0, got {median!r}")
        return cls(rate=LN2 / median)

    @classmethod
    def _zero_rate(cls) -> "ExponentialModel":
        # Internal stand-in for "no drop-out": an event that never fires.
        # Bypasses the rate > 0 check on purpose.
        obj = object.__new__(cls)
        object.__setattr__(obj, "rate", 0.0)
        return obj

    @property
    def median(self) -> float:
        return LN2 / self.rate if self.rate > 0.0 else math.inf

    def cdf(self, t: float) -> float:
        if t <= 0.0 or self.rate == 0.0:
            return 0.0
        return -math.expm1(-self.rate * t)

    def survival(self, t: float) -> float:
        if t <= 0.0 or self.rate == 0.0:
            return 1.0
        return math.exp(-self.rate * t)

    def density(self, t: float) -> float:
        if t < 0.0 or self.rate == 0.0:
            return 0.0
        return self.rate * math.exp(-self.rate * t)

    def quantile(self, p: float) -> float:
        _check_probability(p)
        if p == 0.0:
            return 0.0
        if self.rate == 0.0:
            return math.inf
        return -math.log1p(-p) / self.rate


@dataclass(frozen=True)
class WeibullModel:
    """Weibull time-to-event model; ``shape`` = 1 reduces to the exponential."""

    shape: float
    scale: float

    def __post_init__(self):
        _require(math.isfinite(self.shape) and self.shape > 0.0,
                 f"shape must be finite and > 0, got {self.shape!r}")
        _require(math.isfinite(self.scale) and self.scale > 0.0,
                 f"scale must be finite and > 0, got {self.scale!r}")

    @property
    def median(self) -> float:
        return self.scale * LN2 ** (1.0 / self.shape)

    def _z(self, t: float) -> float:
        return (t / self.scale) ** self.shape

    def cdf(self, t: float) -> float:
        if t <= 0.0:
            return 0.0
        return -math.expm1(-self._z(t))

    def survival(self, t: float) -> float:
        if t <= 0.0:
            return 1.0
        return math.exp(-self._z(t))

    def density(self, t: float) -> float:
        if t <= 0.0:
            # the t == 0 value for shape < 1 diverges; return 0 so that
            # quadrature over [0, x] stays finite (the singularity is integrable)
            return 0.0
        z = self._z(t)
        if not math.isfinite(z) or z > 745.0:
            return 0.0
        return (self.shape / self.scale) * (t / self.scale) ** (self.shape - 1.0) * math.exp(-z)

    def quantile(self, p: float) -> float:
        _check_probability(p)
        if p == 0.0:
            return 0.0
        return self.scale * (-math.log1p(-p)) ** (1.0 / self.shape)


SurvivalModel = Union[ExponentialModel, WeibullModel]


@dataclass(frozen=True)
class EnrollmentBeta:
    """Enrollment-time model: period_a * Beta(1, beta) on (0, period_a).

    beta = 1 is uniform accrual; beta < 1 starts slower than average and
    catches up late; beta > 1 front-loads accrual.
    """

    period_a: float
    beta: float

    def __post_init__(self):
        _require(math.isfinite(self.period_a) and self.period_a > 0.0,
                 f"period_a must be finite and > 0, got {self.period_a!r}")
        _require(math.isfinite(self.beta) and self.beta > 0.0,
                 f"beta must be finite and > 0, got {self.beta!r}")

    def density(self, u: float) -> float:
        if u <= 0.0 or u >= self.period_a:
            return 0.0
        return (self.beta / self.period_a) * (1.0 - u / self.period_a) ** (self.beta - 1.0)

    def cdf(self, u: float) -> float:
        if u <= 0.0:
            return 0.0
        if u >= self.period_a:
            return 1.0
        return 1.0 - (1.0 - u / self.period_a) ** self.beta

    def quantile(self, p: float) -> float:
        _check_probability(p)
        return self.period_a * (1.0 - (1.0 - p) ** (1.0 / self.beta))


def gamma_cdf(shape: float, rate: float, x: float) -> float:
    """CDF of Gamma(shape, rate) at x, i.e. the regularized lower
    incomplete gamma P(shape, rate * x)."""
    _require(math.isfinite(shape) and shape > 0.0,
             f"shape must be finite and > 0, got {shape!r}")
    _require(math.isfinite(rate) and rate > 0.0,
             f"rate must be finite and > 0, got {rate!r}")
    _require(x >= 0.0, f"x must be >= 0, got {x!r}")
    return special.reg_lower_gamma(shape, rate * x)


def quantile(model, p: float) -> float:
    """Inverse CDF of any of the models above; quantile(0) = 0."""
    return model.quantile(p)
