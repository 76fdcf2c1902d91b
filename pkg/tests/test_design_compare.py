import csv
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from durasim import (
    BiomarkerTrial,
    CompareScenario,
    ConfigurationError,
    EnrollmentBeta,
    ExponentialModel,
    SubgroupArm,
    TrialSpec,
    cdf_allcomers,
    cdf_closed_form,
    cdf_difference_piecewise,
    cdf_enrichment,
    duration_difference,
    duration_percentile,
    heatmap,
    mixture_cdf,
)
from durasim.design_compare import write_heatmap_csv, write_heatmap_json

LN2 = math.log(2.0)


def scenario(prevalence=0.5, lambda_pos=LN2 / 5, lambda_neg=LN2 / 15,
             period_a=14.0, n=140, d=88):
    return CompareScenario(prevalence=prevalence, lambda_pos=lambda_pos,
                           lambda_neg=lambda_neg, period_a=period_a, n=n, d=d)


def random_scenario(rng):
    return scenario(
        prevalence=float(rng.uniform(0.05, 0.95)),
        lambda_pos=float(rng.uniform(0.01, 1.0)),
        lambda_neg=float(rng.uniform(0.01, 1.0)),
        period_a=float(rng.uniform(2.0, 40.0)),
    )


class TestClosedForms:
    def test_zero_at_zero(self):
        s = scenario()
        assert cdf_allcomers(s, 0.0) == 0.0
        assert cdf_enrichment(s, 0.0) == 0.0

    def test_equal_hazards_reduce_to_single_population(self):
        s = scenario(lambda_pos=0.1, lambda_neg=0.1)
        arm = SubgroupArm(1.0, EnrollmentBeta(s.period_a, 1.0), ExponentialModel(0.1))
        for t in (3.0, 14.0, 30.0):
            assert cdf_allcomers(s, t) == pytest.approx(cdf_closed_form(arm, t), abs=1e-12)

    def test_allcomers_matches_mixture_module(self):
        s = scenario(prevalence=0.5, lambda_pos=LN2 / 5, lambda_neg=LN2 / 15, period_a=14.0)
        assert cdf_allcomers(s, 20.0) == pytest.approx(
            mixture_cdf(s.allcomers_spec().arms, 20.0), abs=1e-10
        )

    def test_enrichment_matches_stretched_single_arm(self):
        s = scenario(prevalence=0.4, lambda_pos=LN2 / 8, period_a=14.0)
        arm = SubgroupArm(1.0, EnrollmentBeta(35.0, 1.0), ExponentialModel(LN2 / 8))
        assert cdf_enrichment(s, 40.0) == pytest.approx(cdf_closed_form(arm, 40.0), abs=1e-10)

    def test_full_prevalence_enrichment_is_allcomers(self):
        s = scenario(prevalence=1.0, lambda_pos=0.1, lambda_neg=0.1)
        for t in (2.0, 14.0, 28.0):
            assert cdf_enrichment(s, t) == pytest.approx(cdf_allcomers(s, t), abs=1e-12)
            assert cdf_difference_piecewise(s, t) == 0.0


class TestPiecewiseDifference:
    def test_matches_direct_difference(self):
        rng = np.random.default_rng(99)
        for _ in range(200):
            s = random_scenario(rng)
            t = float(rng.uniform(0.0, 3.0 * s.period_a / s.prevalence))
            if t in (s.period_a, s.period_a / s.prevalence):
                continue
            direct = cdf_enrichment(s, t) - cdf_allcomers(s, t)
            assert cdf_difference_piecewise(s, t) == pytest.approx(direct, abs=1e-10)

    def test_negative_during_allcomers_accrual(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            s = random_scenario(rng)
            t = float(rng.uniform(1e-6, s.period_a * (1.0 - 1e-9)))
            assert cdf_difference_piecewise(s, t) < 0.0

    def test_branch_continuity(self):
        rng = np.random.default_rng(13)
        for _ in range(100):
            s = random_scenario(rng)
            for knot in (s.period_a, s.period_a / s.prevalence):
                left = cdf_difference_piecewise(s, knot * (1.0 - 1e-11))
                right = cdf_difference_piecewise(s, knot * (1.0 + 1e-11))
                assert abs(left - right) < 1e-9

    def test_third_branch_term_monotone(self):
        # the positive-subgroup term of the post-accrual branch grows with
        # both prevalence and its hazard
        def term(r1, l1, a, t):
            return (r1 / a) * (math.exp(-l1 * (t - a)) - math.exp(-l1 * (t - a / r1))) / l1

        rng = np.random.default_rng(17)
        for _ in range(200):
            r1 = float(rng.uniform(0.1, 0.9))
            l1 = float(rng.uniform(0.02, 1.0))
            a = float(rng.uniform(2.0, 30.0))
            t = a / r1 * float(rng.uniform(1.01, 3.0))
            assert term(r1 + 1e-6, l1, a, t) > term(r1, l1, a, t)
            assert term(r1, l1 + 1e-6, a, t) > term(r1, l1, a, t)


class TestInequalities:
    @given(b=st.floats(min_value=1e-3, max_value=20.0),
           x=st.floats(min_value=1e-9, max_value=100.0))
    @settings(max_examples=300, deadline=None)
    def test_exponential_deficit_negative(self, b, x):
        # expm1 keeps the strict sign at tiny b*x, where the naive form
        # rounds across zero
        assert (-math.expm1(-b * x)) / b - x < 0.0

    @given(b=st.floats(min_value=0.02, max_value=5.0),
           c=st.floats(min_value=0.02, max_value=5.0),
           x=st.floats(min_value=0.01, max_value=50.0))
    @settings(max_examples=300, deadline=None)
    def test_exponential_gap_ratio_monotone_and_bounded(self, b, c, x):
        if abs(b - c) < 1e-6:
            return
        f = lambda y: (math.exp(-b * y) - math.exp(-c * y)) / y
        step = 1e-4 * x
        if b > c:
            assert c - b < f(x) < 0.0
            assert f(x + step) > f(x)
        else:
            assert 0.0 < f(x) < c - b
            assert f(x + step) < f(x)


class TestDurationDifference:
    def test_identical_specs_zero(self, scenario1):
        assert duration_difference(scenario1, scenario1) == 0.0

    def test_mismatched_targets_rejected(self, scenario1):
        other = TrialSpec(scenario1.n, scenario1.d - 1, scenario1.arms)
        with pytest.raises(ConfigurationError):
            duration_difference(scenario1, other)

    def test_incomparable_when_unreachable(self, scenario1):
        censored = TrialSpec(scenario1.n, scenario1.d, tuple(
            SubgroupArm(arm.weight, arm.enrollment, arm.event, ExponentialModel(2.0))
            for arm in scenario1.arms
        ))
        assert duration_difference(scenario1, censored) is None

    def test_enrichment_favoring_cell(self):
        trial = BiomarkerTrial(n=140, d=88, enroll_rate=20.0, pbo_median=15.0,
                               prevalence=0.3, hazard_ratio=2.0)
        allcomers, enrichment = trial.specs()
        assert duration_difference(allcomers, enrichment) > 0.0

    def test_null_biomarker_favors_allcomers(self):
        trial = BiomarkerTrial(n=140, d=88, enroll_rate=20.0, pbo_median=15.0,
                               prevalence=0.3, hazard_ratio=1.0)
        allcomers, enrichment = trial.specs()
        assert duration_difference(allcomers, enrichment) < 0.0

    def test_slow_accrual_favors_allcomers(self):
        # all-comers completing before its own accrual ends implies the
        # enrichment design must be slower
        s = scenario(prevalence=0.4, lambda_pos=LN2 / 2.0, lambda_neg=LN2 / 4.0,
                     period_a=140 / 2.0, n=140, d=88)
        allcomers = s.allcomers_spec()
        duration_a = duration_percentile(allcomers).point
        assert duration_a < s.period_a
        assert duration_difference(allcomers, s.enrichment_spec(), "percentile") < 0.0

    def test_sign_semantics_match_cdf_comparison(self):
        # enrichment finishes first iff its CDF is the larger one at its own
        # completion time (percentile reading of both designs)
        rng = np.random.default_rng(23)
        checked = 0
        for _ in range(50):
            s = random_scenario(rng)
            t_enrich = duration_percentile(s.enrichment_spec()).point
            gap = cdf_enrichment(s, t_enrich) - cdf_allcomers(s, t_enrich)
            if abs(gap) < 1e-9:
                continue
            diff = duration_difference(s.allcomers_spec(), s.enrichment_spec(), "percentile")
            assert (diff > 0.0) == (gap > 0.0)
            checked += 1
        assert checked >= 40


class TestHeatmap:
    def test_single_cell_equals_duration_difference(self):
        trial = BiomarkerTrial(n=140, d=88, enroll_rate=20.0, pbo_median=15.0,
                               prevalence=0.5, hazard_ratio=3.0)
        grid = heatmap(trial, "prevalence", [0.3], "hazard_ratio", [2.0])
        cell_trial = BiomarkerTrial(n=140, d=88, enroll_rate=20.0, pbo_median=15.0,
                                    prevalence=0.3, hazard_ratio=2.0)
        allcomers, enrichment = cell_trial.specs()
        assert grid.cells[0][0] == pytest.approx(
            duration_difference(allcomers, enrichment), abs=1e-9
        )

    def test_null_marker_grid_all_negative(self):
        trial = BiomarkerTrial(n=140, d=88, enroll_rate=10.0, pbo_median=10.0,
                               prevalence=0.5, hazard_ratio=1.0)
        grid = heatmap(trial, "prevalence", [0.2, 0.5, 0.8], "mst_pbo", [7.5, 15.0])
        for column in grid.cells:
            for cell in column:
                assert cell is not None and cell < 0.0
        assert grid.boundary == ()

    def test_fig4_middle_right_regime(self):
        trial = BiomarkerTrial(n=140, d=88, enroll_rate=20.0, pbo_median=15.0,
                               prevalence=0.3, hazard_ratio=2.0)
        grid = heatmap(trial, "prevalence", [0.3], "hazard_ratio", [1.0, 2.0])
        assert grid.cells[0][0] < 0.0  # hazard ratio 1
        assert grid.cells[0][1] > 0.0  # hazard ratio 2
        assert len(grid.boundary) == 1
        x, y_star = grid.boundary[0]
        assert x == 0.3
        assert 1.0 < y_star < 2.0

    def test_rejects_bad_axes(self):
        trial = BiomarkerTrial(n=140, d=88, enroll_rate=10.0, pbo_median=10.0,
                               prevalence=0.5, hazard_ratio=2.0)
        with pytest.raises(ConfigurationError):
            heatmap(trial, "bogus", [1.0], "hazard_ratio", [2.0])
        with pytest.raises(ConfigurationError):
            heatmap(trial, "prevalence", [], "hazard_ratio", [2.0])
        with pytest.raises(ConfigurationError):
            heatmap(trial, "prevalence", [0.3], "prevalence", [0.5])

    def test_csv_and_json_outputs(self, tmp_path):
        trial = BiomarkerTrial(n=60, d=40, enroll_rate=10.0, pbo_median=10.0,
                               prevalence=0.5, hazard_ratio=2.0)
        grid = heatmap(trial, "prevalence", [0.3, 0.6], "hazard_ratio", [1.0, 3.0])
        csv_path = tmp_path / "grid.csv"
        json_path = tmp_path / "grid.json"
        write_heatmap_csv(grid, csv_path)
        write_heatmap_json(grid, json_path)

        with open(csv_path, newline="") as handle:
            rows = list(csv.reader(handle))
        assert rows[0] == ["prevalence", "hazard_ratio", "diff_months", "status"]
        assert len(rows) == 5
        assert all(row[3] in ("ok", "incomparable") for row in rows[1:])

        payload = json.loads(json_path.read_text())
        assert payload["x_values"] == [0.3, 0.6]
        assert len(payload["cells"]) == 2 and len(payload["cells"][0]) == 2

    def test_threads_env_gives_same_grid(self, monkeypatch):
        trial = BiomarkerTrial(n=60, d=40, enroll_rate=10.0, pbo_median=10.0,
                               prevalence=0.5, hazard_ratio=2.0)
        serial = heatmap(trial, "prevalence", [0.3, 0.6], "hazard_ratio", [1.0, 3.0])
        monkeypatch.setenv("DURASIM_THREADS", "4")
        threaded = heatmap(trial, "prevalence", [0.3, 0.6], "hazard_ratio", [1.0, 3.0])
        assert serial == threaded
