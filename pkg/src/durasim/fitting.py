"""Model estimation from patient-level trial data, and re-assessment.

Given one record per patient (enrollment time, follow-up time, event flag,
arm, subgroup), this module fits a right-censored Weibull survival model
per treatment-by-subgroup cell, a scaled-Beta enrollment model for the
accrual pattern, and empirical cell weights. ``reassess`` replays a
hypothetical trial on the first n enrolled patients: the observed d-th
event date gives the actual duration, while the fitted design run through
the exact-median estimator gives the calculated one.
"""

import csv
import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .distributions import EnrollmentBeta, WeibullModel
from .duration import TrialSpec, duration_exact_median
from .errors import InsufficientDataError, NumericError, ParameterError
from .event_time import SubgroupArm

_GRAD_TOL = 1e-10
_MAX_NEWTON = 200


@dataclass(frozen=True)
class PatientRecord:
    """One enrolled patient; times in months, enroll_time from study start."""

    enroll_time: float
    followup_time: float
    event: bool
    arm: str
    subgroup: str

    def __post_init__(self):
        if not (math.isfinite(self.enroll_time) and self.enroll_time >= 0.0):
            raise ParameterError(f"enroll_time must be >= 0, got {self.enroll_time!r}")
        if not (math.isfinite(self.followup_time) and self.followup_time >= 0.0):
            raise ParameterError(f"followup_time must be >= 0, got {self.followup_time!r}")


@dataclass(frozen=True)
class FittedCell:
    arm: str
    subgroup: str
    weight: float
    n_patients: int
    n_events: int
    model: WeibullModel


@dataclass(frozen=True)
class FittedDesign:
    """Cell-wise Weibull models plus a shared enrollment model."""

    cells: tuple[FittedCell, ...]
    enrollment: EnrollmentBeta
    n_used: int

    def arms(self) -> tuple[SubgroupArm, ...]:
        return tuple(
            SubgroupArm(weight=cell.weight, enrollment=self.enrollment,
                        event=cell.model)
            for cell in self.cells
        )

    def trial_spec(self, d: int) -> TrialSpec:
        return TrialSpec(n=self.n_used, d=d, arms=self.arms())


def _profile_gradient(shape: float, scaled: list[float], logs: list[float],
                      n_events: int, sum_event_logs: float) -> float:
    # d/dk of the profile log-likelihood (scale concentrated out); the
    # times enter scaled by their maximum so powers stay bounded by 1
    pow_sum = 0.0
    pow_log_sum = 0.0
    for s, ls in zip(scaled, logs):
        p = s ** shape
        pow_sum += p
        pow_log_sum += p * ls
    return (
        n_events / shape
        + sum_event_logs
        - n_events * pow_log_sum / pow_sum
    )


def fit_weibull_censored(times: Sequence[tuple[float, bool]]) -> WeibullModel:
    """Maximum-likelihood Weibull fit to right-censored follow-up times.

    ``times`` holds (followup_time, event_observed) pairs; censored entries
    contribute their survival probability to the likelihood. The scale has
    a closed form given the shape, so only the shape is solved, by a
    Newton iteration safeguarded with bisection inside a sign-change
    bracket. Needs at least 3 events.
    """
    if any(t <= 0.0 for t, _ in times):
        raise ParameterError("all follow-up times must be > 0")
    events = [t for t, observed in times if observed]
    if len(events) < 3:
        raise InsufficientDataError(
            f"need at least 3 observed events to fit a Weibull, got {len(events)}"
        )

    t_max = max(t for t, _ in times)
    scaled = [t / t_max for t, _ in times]
    logs = [math.log(s) for s in scaled]
    n_events = len(events)
    sum_event_logs = math.fsum(math.log(t / t_max) for t in events)

    def grad(shape: float) -> float:
        return _profile_gradient(shape, scaled, logs, n_events, sum_event_logs)

    # grad is decreasing in shape; bracket a sign change around 1.0
    lo, hi = 1.0, 1.0
    g_lo = g_hi = grad(1.0)
    for _ in range(200):
        if g_lo > 0.0:
            break
        lo *= 0.5
        g_lo = grad(lo)
    for _ in range(200):
        if g_hi < 0.0:
            break
        hi *= 2.0
        g_hi = grad(hi)
    if g_lo <= 0.0 or g_hi >= 0.0:
        raise NumericError("could not bracket the Weibull shape", lo=lo, hi=hi)

    shape = 1.0 if lo < 1.0 < hi else 0.5 * (lo + hi)
    g = grad(shape)
    for _ in range(_MAX_NEWTON):
        if abs(g) < _GRAD_TOL:
            break
        step = _newton_step(shape, g, scaled, logs, n_events)
        candidate = shape + step
        if not (lo < candidate < hi):
            candidate = 0.5 * (lo + hi)
        g_candidate = grad(candidate)
        if g_candidate > 0.0:
            lo = candidate
        else:
            hi = candidate
        shape, g = candidate, g_candidate
    else:
        raise NumericError("Weibull shape solve did not converge",
                           shape=shape, gradient=g)

    pow_sum = math.fsum(s ** shape for s in scaled)
    scale = t_max * (pow_sum / n_events) ** (1.0 / shape)
    return WeibullModel(shape=shape, scale=scale)


def _newton_step(shape: float, g: float, scaled, logs, n_events: int) -> float:
    pow_sum = 0.0
    pow_log = 0.0
    pow_log2 = 0.0
    for s, ls in zip(scaled, logs):
        p = s ** shape
        pow_sum += p
        pow_log += p * ls
        pow_log2 += p * ls * ls
    ratio_var = pow_log2 / pow_sum - (pow_log / pow_sum) ** 2
    g_prime = -n_events / shape**2 - n_events * ratio_var
    if g_prime == 0.0:
        return 0.0
    return -g / g_prime


def fit_enrollment_beta(enroll_times: Sequence[float], period_a: float) -> EnrollmentBeta:
    """Closed-form MLE of the scaled-Beta(1, beta) enrollment shape.

    beta_hat = -n / sum(log(1 - u_i / a)); every enrollment time must fall
    inside [0, period_a).
    """
    n = len(enroll_times)
    if n < 2:
        raise InsufficientDataError(f"need at least 2 enrollment times, got {n}")
    if not (math.isfinite(period_a) and period_a > 0.0):
        raise ParameterError(f"period_a must be finite and > 0, got {period_a!r}")
    for u in enroll_times:
        if not (0.0 <= u < period_a):
            raise ParameterError(
                f"enrollment time {u!r} outside [0, period_a={period_a!r})"
            )
    denom = math.fsum(math.log1p(-u / period_a) for u in enroll_times)
    if denom == 0.0:
        raise NumericError("enrollment times are all zero; beta is unidentified")
    return EnrollmentBeta(period_a=period_a, beta=-n / denom)


def fit_design(records: Sequence[PatientRecord],
               period_a: Optional[float] = None) -> FittedDesign:
    """Fit all model components from one hypothetical trial dataset.

    Enrollment is fit on times shifted so the first enrollment is 0 (the
    model clock starts at first patient in). When period_a is not given it
    defaults to the largest shifted enrollment time stretched by 1e-6,
    since the Beta likelihood is undefined at the right endpoint.
    """
    if not records:
        raise InsufficientDataError("no records to fit")
    t0 = min(r.enroll_time for r in records)
    shifted = [r.enroll_time - t0 for r in records]
    if period_a is None:
        span = max(shifted)
        if span <= 0.0:
            raise NumericError("all patients enrolled simultaneously; "
                               "enrollment shape is unidentified")
        period_a = span * (1.0 + 1e-6)
    enrollment = fit_enrollment_beta(shifted, period_a)

    groups: dict[tuple[str, str], list[PatientRecord]] = {}
    for record in records:
        groups.setdefault((record.arm, record.subgroup), []).append(record)

    n_used = len(records)
    cells = []
    for (arm, subgroup), members in sorted(groups.items()):
        model = fit_weibull_censored(
            [(r.followup_time, r.event) for r in members]
        )
        cells.append(FittedCell(
            arm=arm, subgroup=subgroup,
            weight=len(members) / n_used,
            n_patients=len(members),
            n_events=sum(1 for r in members if r.event),
            model=model,
        ))
    return FittedDesign(cells=tuple(cells), enrollment=enrollment, n_used=n_used)


@dataclass(frozen=True)
class ReassessRow:
    d: int
    actual_months: Optional[float]  # None when fewer than d events were observed
    calculated_months: float  # math.inf when the fitted design never reaches d
    flag: str  # "ok" | "unobserved" | "unreachable"


def reassess(records: Sequence[PatientRecord], n: int, d_values: Sequence[int],
             subgroup_filter: Optional[str] = None,
             period_a: Optional[float] = None) -> list[ReassessRow]:
    """Actual vs calculated duration curves for a hypothetical trial.

    Takes the first ``n`` patients by enrollment time (ties keep input
    order) from the optionally subgroup-filtered records. Actual duration
    for each d is the d-th smallest event date minus the first patient's
    enrollment; calculated duration refits the design on those n patients
    and runs the exact-median estimator.
    """
    pool = [r for r in records
            if subgroup_filter is None or r.subgroup == subgroup_filter]
    if len(pool) < n:
        raise InsufficientDataError(
            f"only {len(pool)} records after filtering, need n={n}"
        )
    pool.sort(key=lambda r: r.enroll_time)  # stable: input order breaks ties
    trial = pool[:n]
    start = trial[0].enroll_time
    event_dates = sorted(
        r.enroll_time + r.followup_time for r in trial if r.event
    )

    design = fit_design(trial, period_a=period_a)
    rows = []
    for d in d_values:
        if not (1 <= d <= n):
            raise ParameterError(f"need 1 <= d <= n, got d={d}")
        calculated = duration_exact_median(design.trial_spec(d)).point
        if d <= len(event_dates):
            actual = event_dates[d - 1] - start
            flag = "ok" if math.isfinite(calculated) else "unreachable"
        else:
            actual = None
            flag = "unobserved"
        rows.append(ReassessRow(d=d, actual_months=actual,
                                calculated_months=calculated, flag=flag))
    return rows


_CSV_HEADER = ["enroll_time", "followup_time", "event", "arm", "subgroup"]


def read_patient_csv(path) -> list[PatientRecord]:
    """Load records from CSV with header enroll_time,followup_time,event,arm,subgroup."""
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        missing = set(_CSV_HEADER) - set(reader.fieldnames or ())
        if missing:
            raise ParameterError(f"patient CSV is missing columns: {sorted(missing)}")
        records = []
        for line, row in enumerate(reader, start=2):
            try:
                records.append(PatientRecord(
                    enroll_time=float(row["enroll_time"]),
                    followup_time=float(row["followup_time"]),
                    event=_parse_event(row["event"]),
                    arm=row["arm"],
                    subgroup=row["subgroup"],
                ))
            except (TypeError, ValueError) as exc:
                raise ParameterError(f"bad patient record on line {line}: {exc}") from exc
    return records


def _parse_event(raw: str) -> bool:
    if raw not in ("0", "1"):
        raise ParameterError(f"event must be 0 or 1, got {raw!r}")
    return raw == "1"


def write_reassess_csv(rows: Sequence[ReassessRow], path) -> None:
    """d, actual_months, calculated_months, flag; blanks for missing values."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["d", "actual_months", "calculated_months", "flag"])
        for row in rows:
            writer.writerow([
                row.d,
                "" if row.actual_months is None else f"{row.actual_months:.12g}",
                "" if math.isinf(row.calculated_months) else f"{row.calculated_months:.12g}",
                row.flag,
            ])
