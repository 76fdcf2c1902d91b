"""All-comers vs biomarker-enrichment design comparison.

For a single-arm study with two exponential subgroups, no drop-out and
uniform enrollment, both designs' observed-event-time CDFs have closed
forms, as does their difference (a three-branch piecewise expression whose
sign decides which design finishes first). The general multi-cell case is
compared numerically through the duration estimators, including dense
parameter grids ("heatmaps") with a zero-crossing boundary.
"""

import csv
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional, Sequence

from .distributions import EnrollmentBeta, ExponentialModel
from .duration import TrialSpec, estimate_duration
from .errors import ConfigurationError, ParameterError
from .event_time import SubgroupArm
from .heterogeneity import BiomarkerSpec, build_allcomers_spec, build_enrichment_spec


@dataclass(frozen=True)
class CompareScenario:
    """Single-arm, two-subgroup closed-form comparison setting.

    ``prevalence`` is the biomarker-positive fraction, ``lambda_pos`` /
    ``lambda_neg`` the subgroup hazards, ``period_a`` the all-comers
    enrollment period. The enrichment design enrolls positives only over
    period_a / prevalence.
    """

    prevalence: float
    lambda_pos: float
    lambda_neg: float
    period_a: float
    n: int
    d: int

    def __post_init__(self):
        if not (0.0 < self.prevalence <= 1.0):
            raise ParameterError(f"prevalence must lie in (0, 1], got {self.prevalence!r}")
        for name in ("lambda_pos", "lambda_neg", "period_a"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise ParameterError(f"{name} must be finite and > 0, got {value!r}")
        if self.n < 1 or not (1 <= self.d <= self.n):
            raise ParameterError(f"need 1 <= d <= n, got d={self.d}, n={self.n}")

    def allcomers_spec(self) -> TrialSpec:
        enrollment = EnrollmentBeta(period_a=self.period_a, beta=1.0)
        arms = [SubgroupArm(weight=self.prevalence, enrollment=enrollment,
                            event=ExponentialModel(self.lambda_pos))]
        if self.prevalence < 1.0:
            arms.append(SubgroupArm(weight=1.0 - self.prevalence, enrollment=enrollment,
                                    event=ExponentialModel(self.lambda_neg)))
        return TrialSpec(n=self.n, d=self.d, arms=tuple(arms))

    def enrichment_spec(self) -> TrialSpec:
        enrollment = EnrollmentBeta(period_a=self.period_a / self.prevalence, beta=1.0)
        return TrialSpec(n=self.n, d=self.d, arms=(
            SubgroupArm(weight=1.0, enrollment=enrollment,
                        event=ExponentialModel(self.lambda_pos)),
        ))


def _uniform_term(t: float, a: float, lam: float) -> float:
    # e^(-lam t) (e^(lam min(a,t)) - 1) / (a lam), written overflow-free
    m = min(a, t)
    return math.exp(-lam * (t - m)) * (-math.expm1(-lam * m)) / (a * lam)


def cdf_allcomers(s: CompareScenario, t: float) -> float:
    """Observed-event-time CDF of the all-comers design at t."""
    if t < 0.0:
        raise ParameterError(f"t must be >= 0, got {t!r}")
    if t == 0.0:
        return 0.0
    r1, r2 = s.prevalence, 1.0 - s.prevalence
    value = (
        1.0
        - max(0.0, 1.0 - t / s.period_a)
        - r1 * _uniform_term(t, s.period_a, s.lambda_pos)
        - (r2 * _uniform_term(t, s.period_a, s.lambda_neg) if r2 > 0.0 else 0.0)
    )
    return min(max(value, 0.0), 1.0)


def cdf_enrichment(s: CompareScenario, t: float) -> float:
    """Observed-event-time CDF of the enrichment design at t."""
    if t < 0.0:
        raise ParameterError(f"t must be >= 0, got {t!r}")
    if t == 0.0:
        return 0.0
    # identical to a single uniform-enrollment population over a / prevalence
    value = (
        1.0
        - max(0.0, 1.0 - s.prevalence * t / s.period_a)
        - _uniform_term(t, s.period_a / s.prevalence, s.lambda_pos)
    )
    return min(max(value, 0.0), 1.0)


def cdf_difference_piecewise(s: CompareScenario, t: float) -> float:
    """cdf_enrichment(t) - cdf_allcomers(t) via the branch formula.

    Branches change at t = a and t = a / prevalence; those two boundary
    points themselves are evaluated with the branch to their left. Negative
    on (0, a): if the all-comers trial can finish during its own accrual,
    enrichment can never be faster.
    """
    if t < 0.0:
        raise ParameterError(f"t must be >= 0, got {t!r}")
    if t == 0.0:
        return 0.0
    r1, r2 = s.prevalence, 1.0 - s.prevalence
    l1, l2 = s.lambda_pos, s.lambda_neg
    a = s.period_a
    if r2 == 0.0:
        return 0.0
    if t <= a:
        return (r2 / a) * ((-math.expm1(-l2 * t)) / l2 - t)
    shared = (r2 / a) * (math.exp(-l2 * (t - a)) - math.exp(-l2 * t)) / l2
    if t <= a / r1:
        return -r2 + (r1 / a) * ((t - a) - (-math.expm1(-l1 * (t - a))) / l1) + shared
    return (r1 / a) * (math.exp(-l1 * (t - a)) - math.exp(-l1 * (t - a / r1))) / l1 + shared


Incomparable = None  # duration_difference result when either design never finishes


def duration_difference(allcomers: TrialSpec, enrichment: TrialSpec,
                        method: str = "exact", *, level: float = 0.05,
                        reps: int = 10_000, seed: int = 0) -> Optional[float]:
    """duration(all-comers) - duration(enrichment), same estimator for both.

    Positive means the enrichment design finishes first. Returns None
    (incomparable) when either design's duration is unreachable.
    """
    if (allcomers.n, allcomers.d) != (enrichment.n, enrichment.d):
        raise ConfigurationError(
            "designs must share n and d: "
            f"({allcomers.n}, {allcomers.d}) vs ({enrichment.n}, {enrichment.d})"
        )
    est_a = estimate_duration(allcomers, method, level=level, reps=reps, seed=seed)
    est_e = estimate_duration(enrichment, method, level=level, reps=reps, seed=seed)
    if not (est_a.reachable and est_e.reachable):
        return Incomparable
    return est_a.point - est_e.point


@dataclass(frozen=True)
class BiomarkerTrial:
    """Base parameters for grid comparisons of the two designs."""

    n: int
    d: int
    enroll_rate: float
    pbo_median: float
    prevalence: float
    hazard_ratio: float
    treatment_hr: float = 0.5

    def specs(self) -> tuple[TrialSpec, TrialSpec]:
        biomarker = BiomarkerSpec(prevalence=self.prevalence, hazard_ratio=self.hazard_ratio)
        allcomers = build_allcomers_spec(
            self.n, self.d, self.enroll_rate, self.pbo_median, biomarker, self.treatment_hr
        )
        enrichment = build_enrichment_spec(
            self.n, self.d, self.enroll_rate, self.pbo_median, biomarker, self.treatment_hr
        )
        return allcomers, enrichment


_GRID_PARAMS = {
    "prevalence": "prevalence",
    "hazard_ratio": "hazard_ratio",
    "enroll_rate": "enroll_rate",
    "mst_pbo": "pbo_median",
}


@dataclass(frozen=True)
class HeatmapGrid:
    """Dense grid of duration differences (all-comers minus enrichment).

    ``cells[ix][iy]`` matches (x_values[ix], y_values[iy]); None marks an
    incomparable cell. ``boundary`` holds one linearly interpolated zero
    crossing (x, y*) per x column where the sign flips.
    """

    x_param: str
    x_values: tuple[float, ...]
    y_param: str
    y_values: tuple[float, ...]
    cells: tuple[tuple[Optional[float], ...], ...]
    boundary: tuple[tuple[float, float], ...]


def _worker_count(n_cells: int) -> int:
    env = os.environ.get("DURASIM_THREADS", "")
    try:
        cap = int(env)
    except ValueError:
        cap = 1
    return max(1, min(cap, n_cells))


def heatmap(base: BiomarkerTrial, x_param: str, x_values: Sequence[float],
            y_param: str, y_values: Sequence[float],
            method: str = "exact") -> HeatmapGrid:
    """Duration difference over a parameter grid, plus the sign boundary.

    Axis names come from {prevalence, hazard_ratio, enroll_rate, mst_pbo}.
    Cells are independent; DURASIM_THREADS > 1 evaluates them in a thread
    pool with deterministic placement.
    """
    for name in (x_param, y_param):
        if name not in _GRID_PARAMS:
            raise ConfigurationError(
                f"unknown grid parameter {name!r}; choose from {sorted(_GRID_PARAMS)}"
            )
    if x_param == y_param:
        raise ConfigurationError("x_param and y_param must differ")
    if not x_values or not y_values:
        raise ConfigurationError("grids must be nonempty")

    tasks = []
    for x in x_values:
        for y in y_values:
            cell_base = replace(base, **{_GRID_PARAMS[x_param]: x,
                                         _GRID_PARAMS[y_param]: y})
            tasks.append(cell_base)

    def evaluate(cell: BiomarkerTrial) -> Optional[float]:
        allcomers, enrichment = cell.specs()
        return duration_difference(allcomers, enrichment, method)

    workers = _worker_count(len(tasks))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            flat = list(pool.map(evaluate, tasks))
    else:
        flat = [evaluate(cell) for cell in tasks]

    ny = len(y_values)
    cells = tuple(
        tuple(flat[ix * ny:(ix + 1) * ny]) for ix in range(len(x_values))
    )
    return HeatmapGrid(
        x_param=x_param, x_values=tuple(float(x) for x in x_values),
        y_param=y_param, y_values=tuple(float(y) for y in y_values),
        cells=cells, boundary=_boundary(x_values, y_values, cells),
    )


def _boundary(x_values, y_values, cells) -> tuple[tuple[float, float], ...]:
    # first sign change scanning up each x column, linearly interpolated;
    # incomparable cells break the scan rather than being bridged
    points = []
    for ix, x in enumerate(x_values):
        column = cells[ix]
        for iy in range(len(y_values) - 1):
            lo, hi = column[iy], column[iy + 1]
            if lo is None or hi is None:
                continue
            if lo == 0.0:
                points.append((float(x), float(y_values[iy])))
                break
            if lo * hi < 0.0:
                frac = lo / (lo - hi)
                y_star = y_values[iy] + frac * (y_values[iy + 1] - y_values[iy])
                points.append((float(x), float(y_star)))
                break
    return tuple(points)


def write_heatmap_csv(grid: HeatmapGrid, path) -> None:
    """Row-major CSV: x, y, diff_months (empty when incomparable), status."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow([grid.x_param, grid.y_param, "diff_months", "status"])
        for ix, x in enumerate(grid.x_values):
            for iy, y in enumerate(grid.y_values):
                cell = grid.cells[ix][iy]
                if cell is None:
                    writer.writerow([f"{x:.12g}", f"{y:.12g}", "", "incomparable"])
                else:
                    writer.writerow([f"{x:.12g}", f"{y:.12g}", f"{cell:.12g}", "ok"])


def heatmap_to_dict(grid: HeatmapGrid) -> dict:
    """JSON-ready representation (None encodes incomparable cells)."""
    return {
        "x_param": grid.x_param,
        "x_values": list(grid.x_values),
        "y_param": grid.y_param,
        "y_values": list(grid.y_values),
        "cells": [list(col) for col in grid.cells],
        "boundary": [list(p) for p in grid.boundary],
    }


def write_heatmap_json(grid: HeatmapGrid, path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(heatmap_to_dict(grid), handle, indent=2)
        handle.write("\n")
