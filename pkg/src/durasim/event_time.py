"""CDF of the time from study start to an observed event.

A patient enrolls at U, has an event after a further V, and drops out after
a further W (all independent). The event is observed at time U + V when
V <= W, and never otherwise, so the distribution is *defective*: its CDF
climbs to P(V <= W) <= 1 and the missing mass sits at +infinity. This module
evaluates that CDF for one enrollment/survival/drop-out cell, in closed form
for exponential components and by adaptive quadrature in general, and mixes
cells into the population-level CDF.
"""

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from . import quadrature, special
from .distributions import EnrollmentBeta, ExponentialModel, SurvivalModel
from .errors import ConfigurationError, ParameterError, UnsupportedModelError

_NO_DROPOUT = ExponentialModel._zero_rate()

_WEIGHT_TOL = 1e-9  # allowed slack on the mixture weight sum


@dataclass(frozen=True)
class SubgroupArm:
    """One treatment-by-subgroup cell of a trial.

    ``weight`` is the cell's share of the enrolled population; under
    randomized allocation it factors into (arm share) x (subgroup
    prevalence). ``dropout`` None means events are always observed.
    """

    weight: float
    enrollment: EnrollmentBeta
    event: SurvivalModel
    dropout: Optional[SurvivalModel] = None

    def __post_init__(self):
        if not (math.isfinite(self.weight) and 0.0 <= self.weight <= 1.0):
            raise ParameterError(f"weight must lie in [0, 1], got {self.weight!r}")

    @property
    def dropout_or_none(self) -> SurvivalModel:
        return self.dropout if self.dropout is not None else _NO_DROPOUT


@dataclass(frozen=True)
class EventTimeCdf:
    """Evaluator for a (possibly defective) observed-event-time CDF.

    ``total_mass`` is the finite-part limit sup_t F(t) = P(event observed);
    the atom at +infinity is never folded into the evaluator, so callers
    that need a proper CDF must treat the two parts explicitly.
    """

    evaluator: Callable[[float], float]
    total_mass: float
    support_hint: float  # enrollment completion time

    def __call__(self, t: float) -> float:
        return self.evaluator(t)


def _is_exponential_arm(arm: SubgroupArm) -> bool:
    return isinstance(arm.event, ExponentialModel) and isinstance(
        arm.dropout_or_none, ExponentialModel
    )


def event_probability(arm: SubgroupArm, *, tol: float = 1e-10) -> float:
    """P(V <= W): the probability that the cell's event is ever observed."""
    dropout = arm.dropout_or_none
    if isinstance(dropout, ExponentialModel) and dropout.rate == 0.0:
        return 1.0
    if _is_exponential_arm(arm):
        return arm.event.rate / (arm.event.rate + dropout.rate)
    # P(V <= W) = E[S_W(V)]; integrate over the event quantile transform so
    # the domain is a unit interval with a bounded smooth integrand.
    return quadrature.integrate(
        lambda p: dropout.survival(arm.event.quantile(p)), 0.0, 1.0, tol=tol
    )


def _uniform_exponential_cdf(t: float, a: float, lam: float, mass: float) -> float:
    # beta = 1 special case; algebraically identical to the general form but
    # cheaper and stable for any magnitude of lam * t.
    if t <= 0.0:
        return 0.0
    if t < a:
        value = mass * (t / a - (-math.expm1(-lam * t)) / (a * lam))
    else:
        value = mass * (1.0 - math.exp(-lam * (t - a)) * (-math.expm1(-lam * a)) / (a * lam))
    return min(max(value, 0.0), 1.0)


def cdf_closed_form(arm: SubgroupArm, t: float) -> float:
    """Closed-form F(t) for exponential event and drop-out times.

    Requires scaled-Beta enrollment (always true of EnrollmentBeta) and
    exponential components; raises UnsupportedModelError otherwise so the
    caller can fall back to cdf_quadrature.
    """
    if not _is_exponential_arm(arm):
        raise UnsupportedModelError(
            "closed form needs exponential event and drop-out models; "
            "use cdf_quadrature for Weibull components"
        )
    if t < 0.0:
        raise ParameterError(f"t must be >= 0, got {t!r}")
    lam_v = arm.event.rate
    lam_w = arm.dropout_or_none.rate
    lam = lam_v + lam_w
    mass = lam_v / lam
    a = arm.enrollment.period_a
    beta = arm.enrollment.beta

    if t <= 0.0:
        return 0.0
    if beta == 1.0:
        return _uniform_exponential_cdf(t, a, lam, mass)

    m = max(0.0, a - t)
    x_a = lam * a
    x_m = lam * m
    # tail = Gamma(beta+1)/(a*lam)^beta * exp(lam*(a-t)) * (P(beta,x_a) - P(beta,x_m))
    if x_m > max(beta + 1.0, 8.0):
        # exp(x_m) amplifies rounding of the P difference; rewrite through
        # exp(x)*Q(beta, x), which stays O(x^(beta-1)) in this region.
        scale = math.exp(math.lgamma(beta + 1.0) - beta * math.log(x_a))
        tail = scale * (
            special.scaled_upper_gamma(beta, x_m)
            - math.exp(-lam * (a - m)) * special.scaled_upper_gamma(beta, x_a)
        )
    else:
        diff = special.reg_lower_gamma(beta, x_a) - special.reg_lower_gamma(beta, x_m)
        tail = math.exp(math.lgamma(beta + 1.0) - beta * math.log(x_a) - lam * (t - a)) * diff

    value = mass * (1.0 - (m / a) ** beta - tail)
    return min(max(value, 0.0), 1.0)


def cdf_quadrature(arm: SubgroupArm, t: float, tol: float = 1e-8) -> float:
    """F(t) by nested adaptive quadrature; works for any component models.

    The innermost integral over the drop-out time is collapsed analytically
    into the drop-out survival function, leaving
    F(t) = int_0^min(t,a) [ int_0^(t-u) S_W(v) f_V(v) dv ] f_U(u) du.
    The outer integral is taken over enrollment probability p = F_U(u),
    which absorbs both the density endpoint singularity (beta < 1) and the
    u = a kink.
    """
    if t < 0.0:
        raise ParameterError(f"t must be >= 0, got {t!r}")
    if tol <= 0.0:
        raise ParameterError(f"tol must be > 0, got {tol!r}")
    if t <= 0.0:
        return 0.0

    enrollment = arm.enrollment
    event = arm.event
    dropout = arm.dropout_or_none
    no_dropout = isinstance(dropout, ExponentialModel) and dropout.rate == 0.0

    m = min(t, enrollment.period_a)
    p_hi = enrollment.cdf(m)
    if p_hi <= 0.0:
        return 0.0

    if no_dropout:
        def observed_by(x: float) -> float:
            return event.cdf(x)
    else:
        inner_tol = 0.25 * tol / p_hi

        def observed_by(x: float) -> float:
            if x <= 0.0:
                return 0.0
            return quadrature.integrate(
                lambda v: dropout.survival(v) * event.density(v),
                0.0, x, tol=inner_tol,
            )

    outer_tol = tol if no_dropout else 0.5 * tol
    value = quadrature.integrate(
        lambda p: observed_by(t - enrollment.quantile(p)), 0.0, p_hi, tol=outer_tol
    )
    return min(max(value, 0.0), 1.0)


def arm_cdf(arm: SubgroupArm, *, tol: float = 1e-8) -> EventTimeCdf:
    """Single-cell EventTimeCdf, closed form when available."""
    if _is_exponential_arm(arm):
        evaluator = lambda t: cdf_closed_form(arm, t)
    else:
        evaluator = lambda t: cdf_quadrature(arm, t, tol)
    return EventTimeCdf(
        evaluator=evaluator,
        total_mass=event_probability(arm),
        support_hint=arm.enrollment.period_a,
    )


def _check_weights(arms: Sequence[SubgroupArm]) -> None:
    if not arms:
        raise ConfigurationError("at least one arm is required")
    total = math.fsum(arm.weight for arm in arms)
    if abs(total - 1.0) > _WEIGHT_TOL:
        raise ConfigurationError(f"arm weights must sum to 1, got {total!r}")


def mixture(arms: Sequence[SubgroupArm], *, tol: float = 1e-8) -> EventTimeCdf:
    """Population-level EventTimeCdf: the weight-mixture of the cell CDFs."""
    _check_weights(arms)
    parts = [(arm.weight, arm_cdf(arm, tol=tol)) for arm in arms]

    def evaluator(t: float) -> float:
        return math.fsum(w * cdf(t) for w, cdf in parts)

    return EventTimeCdf(
        evaluator=evaluator,
        total_mass=math.fsum(w * cdf.total_mass for w, cdf in parts),
        support_hint=max(cdf.support_hint for _, cdf in parts),
    )


def mixture_cdf(arms: Sequence[SubgroupArm], t: float) -> float:
    """Mixture CDF value at t; see :func:`mixture` for the reusable form."""
    return mixture(arms)(t)
