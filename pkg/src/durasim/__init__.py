"""Study-duration prediction for event-driven clinical trials.

Models the time from study start to each observed event as a defective
mixture over treatment-by-subgroup cells (enrollment + survival, censored
by drop-out), computes the distribution of the d-th event time, and
compares all-comers against biomarker-enrichment designs. Components can
be fit from patient-level data with right censoring.
"""

__version__ = "0.1.0"

from .distributions import (
    EnrollmentBeta,
    ExponentialModel,
    SurvivalModel,
    WeibullModel,
    gamma_cdf,
    quantile,
)
from .duration import (
    UNREACHABLE,
    DurationEstimate,
    TrialSpec,
    duration_exact_median,
    duration_montecarlo,
    duration_percentile,
    estimate_duration,
    order_statistic_cdf,
    sample_event_times,
)
from .design_compare import (
    BiomarkerTrial,
    CompareScenario,
    HeatmapGrid,
    cdf_allcomers,
    cdf_difference_piecewise,
    cdf_enrichment,
    duration_difference,
    heatmap,
)
from .errors import (
    ConfigurationError,
    DurasimError,
    InsufficientDataError,
    NumericError,
    ParameterError,
    UnsupportedModelError,
)
from .event_time import (
    EventTimeCdf,
    SubgroupArm,
    arm_cdf,
    cdf_closed_form,
    cdf_quadrature,
    event_probability,
    mixture,
    mixture_cdf,
)
from .fitting import (
    FittedCell,
    FittedDesign,
    PatientRecord,
    ReassessRow,
    fit_design,
    fit_enrollment_beta,
    fit_weibull_censored,
    read_patient_csv,
    reassess,
)
from .heterogeneity import (
    BiomarkerSpec,
    SubgroupMedians,
    build_allcomers_spec,
    build_enrichment_spec,
    solve_subgroup_medians,
)

__all__ = [
    "BiomarkerSpec",
    "BiomarkerTrial",
    "CompareScenario",
    "ConfigurationError",
    "DurasimError",
    "DurationEstimate",
    "EnrollmentBeta",
    "EventTimeCdf",
    "ExponentialModel",
    "FittedCell",
    "FittedDesign",
    "HeatmapGrid",
    "InsufficientDataError",
    "NumericError",
    "ParameterError",
    "PatientRecord",
    "ReassessRow",
    "SubgroupArm",
    "SubgroupMedians",
    "SurvivalModel",
    "TrialSpec",
    "UNREACHABLE",
    "UnsupportedModelError",
    "WeibullModel",
    "arm_cdf",
    "build_allcomers_spec",
    "build_enrichment_spec",
    "cdf_allcomers",
    "cdf_closed_form",
    "cdf_difference_piecewise",
    "cdf_enrichment",
    "cdf_quadrature",
    "duration_difference",
    "duration_exact_median",
    "duration_montecarlo",
    "duration_percentile",
    "estimate_duration",
    "event_probability",
    "fit_design",
    "fit_enrollment_beta",
    "fit_weibull_censored",
    "gamma_cdf",
    "heatmap",
    "mixture",
    "mixture_cdf",
    "order_statistic_cdf",
    "quantile",
    "read_patient_csv",
    "reassess",
    "sample_event_times",
    "solve_subgroup_medians",
]
