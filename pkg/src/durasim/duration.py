"""Study-duration estimators for event-driven trials.

The study ends when the d-th event is observed, i.e. duration is the d-th
order statistic of the n patients' observed-event times. Because the
per-patient distribution is defective, the d-th event may never occur; all
estimators report that case as an infinite (unreachable) value rather than
raising.

Three estimators are provided:
  * large-sample percentile: invert the mixture CDF at d/n,
  * exact median / quantiles: invert the binomial order-statistic tail,
  * Monte Carlo: replicate the trial and take sample quantiles.
"""

import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from . import kernels, special
from .errors import ConfigurationError, NumericError, ParameterError
from .event_time import EventTimeCdf, SubgroupArm, mixture

_MASS_GUARD = 1e-12  # how close the CDF may get to its ceiling during bracket growth
_BRACKET_CAP = 1e12  # months; bracket expansion beyond this is a numeric failure
_XTOL = 1e-6  # months; bisection convergence tolerance

UNREACHABLE = math.inf


@dataclass(frozen=True)
class TrialSpec:
    """Sample size, target event count, and the population mixture."""

    n: int
    d: int
    arms: tuple[SubgroupArm, ...]

    def __post_init__(self):
        if not isinstance(self.n, int) or not isinstance(self.d, int):
            raise ParameterError("n and d must be integers")
        if self.n < 1 or not (1 <= self.d <= self.n):
            raise ParameterError(f"need 1 <= d <= n, got d={self.d}, n={self.n}")
        object.__setattr__(self, "arms", tuple(self.arms))
        total = math.fsum(arm.weight for arm in self.arms)
        if abs(total - 1.0) > 1e-9:
            raise ConfigurationError(f"arm weights must sum to 1, got {total!r}")


@dataclass(frozen=True)
class DurationEstimate:
    """Point and interval estimate of the study duration, in months.

    ``math.inf`` encodes "the d-th event is never reached" for any of the
    three fields; ``reachable`` reflects the point estimate. ``confidence``
    is the nominal coverage of (interval_low, interval_high), or None for
    the percentile method, whose interval is degenerate at the point.
    """

    point: float
    interval_low: float
    interval_high: float
    method: str
    confidence: Optional[float]
    diagnostics: Mapping[str, float] = field(default_factory=dict)

    @property
    def reachable(self) -> bool:
        return math.isfinite(self.point)


def _unreachable(method: str, confidence, diagnostics) -> DurationEstimate:
    return DurationEstimate(
        point=UNREACHABLE, interval_low=UNREACHABLE, interval_high=UNREACHABLE,
        method=method, confidence=confidence, diagnostics=diagnostics,
    )


def _invert(cdf, target: float, ceiling: float, start_hi: float) -> tuple[float, int]:
    """Smallest t with cdf(t) >= target, or +inf if cdf plateaus below it.

    Grows the upper bracket geometrically; gives up (unreachable) once the
    CDF is within _MASS_GUARD of its ceiling without having met the target.
    Returns (solution, iterations spent).
    """
    iterations = 0
    hi = max(start_hi, 1.0)
    while True:
        iterations += 1
        value = cdf(hi)
        if value >= target:
            break
        if value >= ceiling - _MASS_GUARD:
            return UNREACHABLE, iterations
        hi *= 2.0
        if hi > _BRACKET_CAP:
            raise NumericError("bracket expansion failed", target=target, hi=hi)
    lo = 0.0
    while hi - lo > _XTOL:
        iterations += 1
        if iterations > 400:
            raise NumericError("bisection did not converge", lo=lo, hi=hi, target=target)
        mid = 0.5 * (lo + hi)
        if cdf(mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi), iterations


def duration_percentile(spec: TrialSpec) -> DurationEstimate:
    """Large-sample estimate: the d/n quantile of the mixture CDF.

    Consistent as n grows with d/n held fixed; no dispersion information,
    so the interval collapses to the point.
    """
    cdf = mixture(spec.arms)
    s = spec.d / spec.n
    diagnostics = {"target_fraction": s, "total_mass": cdf.total_mass,
                   "bisection_iterations": 0.0}
    if s >= cdf.total_mass:
        return _unreachable("percentile", None, diagnostics)
    point, iterations = _invert(cdf, s, cdf.total_mass, cdf.support_hint)
    diagnostics["bisection_iterations"] = float(iterations)
    if not math.isfinite(point):
        return _unreachable("percentile", None, diagnostics)
    return DurationEstimate(
        point=point, interval_low=point, interval_high=point,
        method="percentile", confidence=None, diagnostics=diagnostics,
    )


def order_statistic_cdf(spec: TrialSpec, t: float) -> float:
    """P(d-th event time <= t), via the binomial tail of the mixture CDF."""
    if t < 0.0:
        raise ParameterError(f"t must be >= 0, got {t!r}")
    return _order_stat_cdf(mixture(spec.arms), spec.n, spec.d)(t)


def _order_stat_cdf(cdf: EventTimeCdf, n: int, d: int):
    def tail(t: float) -> float:
        if t <= 0.0:
            return 0.0
        return special.binom_tail_geq(n, d, cdf(t))
    return tail


def duration_exact_median(spec: TrialSpec, level: float = 0.05) -> DurationEstimate:
    """Median and (level/2, 1 - level/2) quantiles of the d-th event time.

    Each quantile inverts the exact order-statistic CDF by bisection. A
    quantile is unreachable when even the t -> infinity tail probability
    P(Binomial(n, total_mass) >= d) stays below it.
    """
    _check_level(level)
    cdf = mixture(spec.arms)
    tail = _order_stat_cdf(cdf, spec.n, spec.d)
    ceiling = special.binom_tail_geq(spec.n, spec.d, cdf.total_mass)
    iterations = 0

    def solve(q: float) -> float:
        nonlocal iterations
        if ceiling <= q:
            return UNREACHABLE
        value, spent = _invert(tail, q, ceiling, cdf.support_hint)
        iterations += spent
        return value

    point = solve(0.5)
    lo = solve(level / 2.0)
    hi = solve(1.0 - level / 2.0)
    return DurationEstimate(
        point=point, interval_low=lo, interval_high=hi,
        method="exact-median", confidence=1.0 - level,
        diagnostics={"tail_ceiling": ceiling, "total_mass": cdf.total_mass,
                     "bisection_iterations": float(iterations)},
    )


def _check_level(level: float) -> None:
    if not (0.0 < level < 1.0):
        raise ParameterError(f"level must lie in (0, 1), got {level!r}")


def sample_event_times(arms: Sequence[SubgroupArm], size: int, seed) -> np.ndarray:
    """Draw observed-event times from the mixture; +inf marks censored patients.

    Samples the component variables directly and applies the observation
    rule (event kept iff it precedes drop-out), which is distributionally
    identical to inverting the defective CDF but exact.
    """
    if size < 1:
        raise ParameterError(f"size must be >= 1, got {size!r}")
    tables = kernels.arm_tables(arms)
    rng = np.random.default_rng(seed)
    return kernels.mixture_draws(rng.random((size, 4)), *tables)


def duration_montecarlo(spec: TrialSpec, reps: int = 10_000, level: float = 0.05,
                        seed: int = 0) -> DurationEstimate:
    """Simulation estimate: median and (level/2, 1 - level/2) sample
    quantiles of the d-th order statistic over ``reps`` replicated trials.

    Deterministic for a fixed seed: replicate r always consumes the r-th
    child stream of the master seed, independent of chunking or backend, so
    replicates could be farmed out in parallel without changing the result.
    When a quantile falls in the +inf tail (for the median: more than half
    of the replicates never reach d events) it is reported unreachable, and
    the simulated probability of that tail is in the diagnostics.
    """
    if reps < 100:
        raise ParameterError(f"reps must be >= 100, got {reps!r}")
    _check_level(level)
    tables = kernels.arm_tables(spec.arms)
    dth = np.empty(reps, dtype=np.float64)
    children = np.random.SeedSequence(seed).spawn(reps)

    # bound the uniform buffer to ~32 MB per chunk
    chunk = max(1, int(1_000_000) // spec.n)
    start = 0
    while start < reps:
        stop = min(reps, start + chunk)
        u = np.empty((stop - start, spec.n, 4), dtype=np.float64)
        for r in range(start, stop):
            u[r - start] = np.random.Generator(np.random.PCG64(children[r])).random(
                (spec.n, 4)
            )
        dth[start:stop] = kernels.dth_event_times(u, *tables, spec.d)
        start = stop

    with np.errstate(invalid="ignore"):  # lerp across +inf replicates yields nan
        quantiles = np.quantile(dth, [0.5, level / 2.0, 1.0 - level / 2.0])
    point, lo, hi = (float(q) if math.isfinite(q) else UNREACHABLE for q in quantiles)
    diagnostics = {
        "replicates": float(reps),
        "seed": float(seed),
        "unreachable_fraction": float(np.mean(np.isinf(dth))),
    }
    return DurationEstimate(
        point=point, interval_low=lo, interval_high=hi,
        method="monte-carlo", confidence=1.0 - level, diagnostics=diagnostics,
    )


_METHODS = {
    "percentile": lambda spec, level, reps, seed: duration_percentile(spec),
    "exact": lambda spec, level, reps, seed: duration_exact_median(spec, level),
    "mc": lambda spec, level, reps, seed: duration_montecarlo(spec, reps, level, seed),
}


def estimate_duration(spec: TrialSpec, method: str = "exact", *, level: float = 0.05,
                      reps: int = 10_000, seed: int = 0) -> DurationEstimate:
    """Dispatch to one of the three estimators by name."""
    try:
        runner = _METHODS[method]
    except KeyError:
        raise ParameterError(
            f"method must be one of {sorted(_METHODS)}, got {method!r}"
        ) from None
    return runner(spec, level, reps, seed)
