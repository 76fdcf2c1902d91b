import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from durasim import (
    ConfigurationError,
    EnrollmentBeta,
    ExponentialModel,
    ParameterError,
    SubgroupArm,
    UnsupportedModelError,
    WeibullModel,
    cdf_closed_form,
    cdf_quadrature,
    event_probability,
    mixture,
    mixture_cdf,
    sample_event_times,
)

LN2 = math.log(2.0)

rates = st.floats(min_value=0.01, max_value=1.5)
dropout_rates = st.floats(min_value=0.0, max_value=0.5)
betas = st.floats(min_value=0.25, max_value=4.0)
periods = st.floats(min_value=2.0, max_value=50.0)


def exp_arm(weight=1.0, period=14.0, beta=1.0, median=10.0, dropout_rate=0.0):
    return SubgroupArm(
        weight=weight,
        enrollment=EnrollmentBeta(period_a=period, beta=beta),
        event=ExponentialModel.from_median(median),
        dropout=ExponentialModel(dropout_rate) if dropout_rate > 0.0 else None,
    )


class TestClosedForm:
    def test_zero_at_zero(self):
        assert cdf_closed_form(exp_arm(), 0.0) == 0.0

    def test_full_mass_without_dropout(self):
        assert cdf_closed_form(exp_arm(), 1e4) > 1.0 - 1e-6

    def test_rejects_weibull(self):
        arm = SubgroupArm(1.0, EnrollmentBeta(14.0, 1.0), WeibullModel(2.0, 5.0))
        with pytest.raises(UnsupportedModelError):
            cdf_closed_form(arm, 5.0)

    def test_rejects_negative_time(self):
        with pytest.raises(ParameterError):
            cdf_closed_form(exp_arm(), -1.0)

    @pytest.mark.parametrize("t", [5.0, 14.0, 20.0])
    def test_scenario1_placebo_vs_quadrature(self, t):
        arm = exp_arm(median=10.0, period=14.0)
        assert cdf_closed_form(arm, t) == pytest.approx(cdf_quadrature(arm, t, 1e-8), abs=1e-6)

    def test_scenario1_placebo_vs_simulation(self):
        arm = exp_arm(median=10.0, period=14.0)
        draws = sample_event_times([arm], 1_000_000, seed=90210)
        for t in (5.0, 14.0, 20.0):
            assert cdf_closed_form(arm, t) == pytest.approx(
                float(np.mean(draws <= t)), abs=3e-3
            )

    @given(beta=betas, rate=rates, dropout=dropout_rates,
           period=periods, frac=st.floats(min_value=1e-3, max_value=3.0))
    @settings(max_examples=150, deadline=None)
    def test_matches_quadrature_everywhere(self, beta, rate, dropout, period, frac):
        arm = SubgroupArm(1.0, EnrollmentBeta(period, beta), ExponentialModel(rate),
                          ExponentialModel(dropout) if dropout > 0 else None)
        t = frac * period
        assert cdf_closed_form(arm, t) == pytest.approx(
            cdf_quadrature(arm, t, 1e-10), abs=1e-8
        )

    @given(beta=betas, rate=rates, dropout=dropout_rates, period=periods)
    @settings(max_examples=100, deadline=None)
    def test_continuity_at_enrollment_end(self, beta, rate, dropout, period):
        arm = SubgroupArm(1.0, EnrollmentBeta(period, beta), ExponentialModel(rate),
                          ExponentialModel(dropout) if dropout > 0 else None)
        eps = period * 1e-11
        left = cdf_closed_form(arm, period - eps)
        right = cdf_closed_form(arm, period + eps)
        assert abs(left - right) < 1e-9

    @given(beta=betas, rate=rates, dropout=st.floats(min_value=0.01, max_value=0.5),
           period=periods)
    @settings(max_examples=100, deadline=None)
    def test_defective_mass(self, beta, rate, dropout, period):
        arm = SubgroupArm(1.0, EnrollmentBeta(period, beta), ExponentialModel(rate),
                          ExponentialModel(dropout))
        expected = rate / (rate + dropout)
        horizon = period + 60.0 / (rate + dropout)
        assert cdf_closed_form(arm, horizon) == pytest.approx(expected, abs=1e-6)
        assert event_probability(arm) == pytest.approx(expected, abs=1e-12)

    @given(beta=betas, rate=rates, period=periods)
    @settings(max_examples=60, deadline=None)
    def test_valid_below_enrollment_end(self, beta, rate, period):
        # the regime where naive formulas go negative: ours must stay a sub-CDF
        arm = SubgroupArm(1.0, EnrollmentBeta(period, beta), ExponentialModel(rate))
        ts = np.linspace(0.0, period, 200)
        values = [cdf_closed_form(arm, t) for t in ts]
        assert all(0.0 <= v <= values[-1] + 1e-12 for v in values)
        assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))

    def test_beta_monotonicity(self):
        # larger beta front-loads enrollment, so events accrue sooner
        for t in (2.0, 5.0, 10.0, 14.0, 25.0):
            for beta_lo, beta_hi in ((0.3, 0.6), (0.6, 1.0), (1.0, 1.8), (1.8, 3.5)):
                lo = cdf_closed_form(exp_arm(beta=beta_lo), t)
                hi = cdf_closed_form(exp_arm(beta=beta_hi), t)
                assert hi > lo

    def test_deep_left_tail_is_stable(self):
        # strong censoring and t << a exercise the scaled-upper-gamma branch
        arm = SubgroupArm(1.0, EnrollmentBeta(60.0, 2.5), ExponentialModel(1.0),
                          ExponentialModel(0.5))
        for t in (0.5, 2.0, 10.0, 30.0):
            assert cdf_closed_form(arm, t) == pytest.approx(
                cdf_quadrature(arm, t, 1e-11), abs=1e-9
            )


class TestQuadrature:
    def test_zero_at_zero(self):
        assert cdf_quadrature(exp_arm(), 0.0) == 0.0

    @pytest.mark.parametrize("t", [1.0, 5.0, 20.0])
    def test_weibull_shape_one_reduces_to_exponential(self, t):
        rate = LN2 / 10.0
        tol = 1e-9
        weibull_arm = SubgroupArm(1.0, EnrollmentBeta(14.0, 1.0), WeibullModel(1.0, 1.0 / rate))
        exponential_arm = exp_arm(median=10.0)
        assert cdf_quadrature(weibull_arm, t, tol) == pytest.approx(
            cdf_closed_form(exponential_arm, t), abs=2 * tol
        )

    def test_weibull_with_dropout_against_simulation(self):
        arm = SubgroupArm(1.0, EnrollmentBeta(14.0, 0.7), WeibullModel(1.6, 12.0),
                          ExponentialModel(0.04))
        draws = sample_event_times([arm], 400_000, seed=11)
        for t in (4.0, 10.0, 18.0, 30.0):
            assert cdf_quadrature(arm, t, 1e-9) == pytest.approx(
                float(np.mean(draws <= t)), abs=4e-3
            )

    def test_mass_for_weibull_dropout(self):
        arm = SubgroupArm(1.0, EnrollmentBeta(14.0, 1.0), WeibullModel(1.3, 9.0),
                          WeibullModel(0.8, 30.0))
        draws = sample_event_times([arm], 400_000, seed=12)
        assert event_probability(arm) == pytest.approx(
            float(np.mean(np.isfinite(draws))), abs=4e-3
        )


class TestMixture:
    def test_single_arm_degenerate(self):
        arm = exp_arm()
        for t in (3.0, 14.0, 40.0):
            assert mixture_cdf([arm], t) == pytest.approx(cdf_closed_form(arm, t), abs=1e-14)

    def test_two_identical_arms(self):
        half = exp_arm(weight=0.5)
        full = exp_arm(weight=1.0)
        for t in (3.0, 14.0, 40.0):
            assert mixture_cdf([half, half], t) == pytest.approx(
                cdf_closed_form(full, t), abs=1e-14
            )

    def test_scenario1_mixture_vs_simulation(self, scenario1):
        draws = sample_event_times(scenario1.arms, 1_000_000, seed=314159)
        cdf = mixture(scenario1.arms)
        for t in (7.0, 14.0, 28.0):
            assert cdf(t) == pytest.approx(float(np.mean(draws <= t)), abs=3e-3)

    def test_weight_sum_enforced(self):
        with pytest.raises(ConfigurationError):
            mixture_cdf([exp_arm(weight=0.5), exp_arm(weight=0.4)], 5.0)

    def test_total_mass_mixes(self):
        arms = [exp_arm(weight=0.5, dropout_rate=0.1), exp_arm(weight=0.5)]
        expected = 0.5 * event_probability(arms[0]) + 0.5
        assert mixture(arms).total_mass == pytest.approx(expected, abs=1e-12)

    def test_weight_bounds(self):
        with pytest.raises(ParameterError):
            exp_arm(weight=1.2)
