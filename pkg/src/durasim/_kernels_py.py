"""Numpy fallback for the simulation kernels.

Semantics match durasim._kernels_c exactly: the same uniform-variate layout
produces the same draws (up to last-ulp libm differences), so results do
not depend on which backend is active.

Uniform layout, one row of 4 per simulated patient:
  column 0  selects the (treatment, subgroup) cell from cumulative weights
  column 1  enrollment time via the scaled-Beta inverse CDF
  column 2  event time via the survival-model inverse CDF
  column 3  drop-out time via the drop-out-model inverse CDF
Cell tables: families int32 (cells, 2) with 0 = exponential (p1 = rate,
rate <= 0 means "never"), 1 = Weibull (p1 = shape, p2 = scale);
params float64 (cells, 6) = [period_a, beta, ev_p1, ev_p2, dr_p1, dr_p2].
"""

import numpy as np


def _component_draws(u, fam, p1, p2):
    out = np.empty_like(u)
    log_left = -np.log1p(-u)
    is_exp = fam == 0
    with np.errstate(divide="ignore", invalid="ignore"):
        exp_draw = log_left[is_exp] / p1[is_exp]
    out[is_exp] = np.where(p1[is_exp] > 0.0, exp_draw, np.inf)
    is_wb = ~is_exp
    out[is_wb] = p2[is_wb] * log_left[is_wb] ** (1.0 / p1[is_wb])
    return out


def mixture_draws(u, cum_weights, families, params):
    """Transform uniforms (m, 4) into m observed-event times (+inf = never)."""
    u = np.ascontiguousarray(u, dtype=np.float64)
    cell = np.minimum(
        np.searchsorted(cum_weights, u[:, 0], side="left"), len(cum_weights) - 1
    )
    fams = families[cell]
    pars = params[cell]
    enroll = pars[:, 0] * (1.0 - (1.0 - u[:, 1]) ** (1.0 / pars[:, 1]))
    event = _component_draws(u[:, 2], fams[:, 0], pars[:, 2], pars[:, 3])
    dropout = _component_draws(u[:, 3], fams[:, 1], pars[:, 4], pars[:, 5])
    return np.where(event <= dropout, enroll + event, np.inf)


def dth_event_times(u, cum_weights, families, params, d):
    """d-th order statistic of n patient times per replicate.

    u has shape (replicates, n, 4); returns (replicates,) with +inf where
    fewer than d events are ever observed.
    """
    reps, n, _ = u.shape
    draws = mixture_draws(u.reshape(reps * n, 4), cum_weights, families, params)
    return np.partition(draws.reshape(reps, n), d - 1, axis=1)[:, d - 1]
