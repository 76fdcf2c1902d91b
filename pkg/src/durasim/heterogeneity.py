"""Biomarker-mixture scenario construction.

A prognostic biomarker splits the population into positive (higher-risk)
and negative subgroups with a shared hazard ratio in both treatment arms.
Given the overall median survival of an arm, the subgroup medians are
pinned down by requiring the two-component exponential mixture to have
survival 1/2 at the overall median; this module solves that equation and
assembles all-comers and enrichment trial specifications from it.
"""

import math
from dataclasses import dataclass

from .distributions import LN2, EnrollmentBeta, ExponentialModel
from .errors import NumericError, ParameterError
from .event_time import SubgroupArm
from .duration import TrialSpec
from .roots import bisect_increasing


@dataclass(frozen=True)
class BiomarkerSpec:
    """Prevalence and prognostic hazard ratio of the positive subgroup."""

    prevalence: float
    hazard_ratio: float

    def __post_init__(self):
        if not (0.0 < self.prevalence < 1.0):
            raise ParameterError(
                f"prevalence must lie in (0, 1), got {self.prevalence!r}"
            )
        if not (math.isfinite(self.hazard_ratio) and self.hazard_ratio > 0.0):
            raise ParameterError(
                f"hazard_ratio must be finite and > 0, got {self.hazard_ratio!r}"
            )


@dataclass(frozen=True)
class SubgroupMedians:
    """Median survival of the biomarker-negative and -positive subgroups."""

    negative: float
    positive: float


def solve_subgroup_medians(overall_median: float, biomarker: BiomarkerSpec) -> SubgroupMedians:
    """Split an overall median survival into subgroup medians.

    Solves, for the negative-subgroup median m,
        q * exp(-ln2 * HR * M / m) + (1 - q) * exp(-ln2 * M / m) = 1/2
    so that the exponential mixture's survival at the overall median M is
    exactly one half; the positive median is then m / HR. The left side is
    continuous and increasing in m, so bracketed bisection always lands.
    """
    if not (math.isfinite(overall_median) and overall_median > 0.0):
        raise ParameterError(
            f"overall_median must be finite and > 0, got {overall_median!r}"
        )
    q = biomarker.prevalence
    hr = biomarker.hazard_ratio

    def mixture_survival(m: float) -> float:
        return q * math.exp(-LN2 * hr * overall_median / m) + (1.0 - q) * math.exp(
            -LN2 * overall_median / m
        )

    lo = overall_median * 1e-3
    hi = overall_median * 1e3
    for _ in range(60):
        if mixture_survival(lo) < 0.5:
            break
        lo *= 0.5
    for _ in range(60):
        if mixture_survival(hi) > 0.5:
            break
        hi *= 2.0
    if mixture_survival(lo) >= 0.5 or mixture_survival(hi) <= 0.5:
        raise NumericError("could not bracket the subgroup-median root",
                           lo=lo, hi=hi)

    negative = bisect_increasing(
        mixture_survival, 0.5, lo, hi, xtol=0.0, rtol=1e-10, max_iter=500
    )
    return SubgroupMedians(negative=negative, positive=negative / hr)


def _survival_arms(q: float, enrollment: EnrollmentBeta,
                   medians: SubgroupMedians) -> list[SubgroupArm]:
    return [
        SubgroupArm(weight=0.5 * (1.0 - q), enrollment=enrollment,
                    event=ExponentialModel.from_median(medians.negative)),
        SubgroupArm(weight=0.5 * q, enrollment=enrollment,
                    event=ExponentialModel.from_median(medians.positive)),
    ]


def build_allcomers_spec(n: int, d: int, enroll_rate: float, pbo_median: float,
                         biomarker: BiomarkerSpec, treatment_hr: float = 0.5) -> TrialSpec:
    """All-comers design: four cells (two arms x two subgroups), 1:1
    allocation, uniform enrollment over n / enroll_rate, no drop-out.

    The treatment arm's overall median is pbo_median / treatment_hr, and its
    subgroup medians are solved from the same mixture equation, which for
    exponential survival scales them by exactly 1 / treatment_hr.
    """
    _check_design(n, d, enroll_rate, pbo_median, treatment_hr)
    enrollment = EnrollmentBeta(period_a=n / enroll_rate, beta=1.0)
    pbo = solve_subgroup_medians(pbo_median, biomarker)
    trt = solve_subgroup_medians(pbo_median / treatment_hr, biomarker)
    arms = _survival_arms(biomarker.prevalence, enrollment, pbo)
    arms += _survival_arms(biomarker.prevalence, enrollment, trt)
    return TrialSpec(n=n, d=d, arms=tuple(arms))


def build_enrichment_spec(n: int, d: int, enroll_rate: float, pbo_median: float,
                          biomarker: BiomarkerSpec, treatment_hr: float = 0.5) -> TrialSpec:
    """Enrichment design: positives only, same n and d, enrollment stretched
    to (n / enroll_rate) / prevalence because accrual of eligible patients
    is slower by the prevalence factor."""
    _check_design(n, d, enroll_rate, pbo_median, treatment_hr)
    q = biomarker.prevalence
    enrollment = EnrollmentBeta(period_a=(n / enroll_rate) / q, beta=1.0)
    pbo = solve_subgroup_medians(pbo_median, biomarker)
    trt = solve_subgroup_medians(pbo_median / treatment_hr, biomarker)
    arms = (
        SubgroupArm(weight=0.5, enrollment=enrollment,
                    event=ExponentialModel.from_median(pbo.positive)),
        SubgroupArm(weight=0.5, enrollment=enrollment,
                    event=ExponentialModel.from_median(trt.positive)),
    )
    return TrialSpec(n=n, d=d, arms=arms)


def _check_design(n: int, d: int, enroll_rate: float, pbo_median: float,
                  treatment_hr: float) -> None:
    if not (math.isfinite(enroll_rate) and enroll_rate > 0.0):
        raise ParameterError(f"enroll_rate must be finite and > 0, got {enroll_rate!r}")
    if not (math.isfinite(pbo_median) and pbo_median > 0.0):
        raise ParameterError(f"pbo_median must be finite and > 0, got {pbo_median!r}")
    if not (math.isfinite(treatment_hr) and treatment_hr > 0.0):
        raise ParameterError(f"treatment_hr must be finite and > 0, got {treatment_hr!r}")
