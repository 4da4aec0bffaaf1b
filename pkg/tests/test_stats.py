"""Tests for the distribution functions and classical tests."""

import math

import numpy as np
import pytest
from scipy import integrate

from prefpower.stats import (
    DegenerateVarianceError,
    InsufficientDataError,
    SampleSummary,
    pooled_proportion_ztest,
    std_normal_cdf,
    std_normal_quantile,
    student_t_sf,
    wald_proportion_test,
    welch_t_test,
)


class TestNormal:
    def test_cdf_at_zero(self):
        assert std_normal_cdf(0.0) == 0.5

    def test_cdf_reference_value(self):
        assert abs(std_normal_cdf(1.644854) - 0.95) < 1e-6

    def test_cdf_symmetry(self):
        for x in np.linspace(-8, 8, 41):
            assert abs(std_normal_cdf(x) + std_normal_cdf(-x) - 1.0) < 1e-12

    def test_cdf_monotone_and_saturating(self):
        grid = np.linspace(-40, 40, 201)
        values = [std_normal_cdf(x) for x in grid]
        assert all(b >= a for a, b in zip(values, values[1:]))
        assert values[0] == 0.0 and values[-1] == 1.0

    def test_quantile_at_half(self):
        assert std_normal_quantile(0.5) == 0.0

    def test_quantile_reference_value(self):
        assert abs(std_normal_quantile(0.95) - 1.644854) < 1e-5

    def test_quantile_round_trip(self):
        for q in np.linspace(0.001, 0.999, 25):
            assert abs(std_normal_cdf(std_normal_quantile(q)) - q) < 1e-10

    @pytest.mark.parametrize("q", [0.0, 1.0, -0.2, 1.7])
    def test_quantile_domain(self, q):
        with pytest.raises(ValueError):
            std_normal_quantile(q)


class TestStudentT:
    def test_sf_at_zero(self):
        for df in (0.5, 1, 4, 100):
            assert student_t_sf(0.0, df) == 0.5

    def test_sf_reference_value(self):
        assert abs(student_t_sf(2.449, 4) - 0.0352) < 1e-3

    def test_sf_large_df_matches_normal(self):
        for t in (-2.0, -0.3, 0.7, 1.9, 3.1):
            assert abs(student_t_sf(t, 1e6) - (1 - std_normal_cdf(t))) < 1e-4

    @pytest.mark.parametrize("df", [0.0, -1.0])
    def test_sf_domain(self, df):
        with pytest.raises(ValueError):
            student_t_sf(1.0, df)

    def test_sf_matches_quadrature(self):
        # Independent check: integrate the t density directly.
        def density(x, df):
            return (
                math.gamma((df + 1) / 2)
                / (math.sqrt(df * math.pi) * math.gamma(df / 2))
                * (1 + x * x / df) ** (-(df + 1) / 2)
            )

        for t in (-2.5, -0.8, 0.4, 1.3, 2.6):
            for df in (1.5, 4, 11, 60):
                upper, _ = integrate.quad(density, t, np.inf, args=(df,))
                assert abs(student_t_sf(t, df) - upper) < 1e-8


class TestWelch:
    def test_identical_groups(self):
        res = welch_t_test([-1.0, 1.0], [-1.0, 1.0])
        assert res.statistic == 0.0
        assert res.p_value == 0.5

    def test_hand_computed_example(self):
        res = welch_t_test([0.0, 1.0, 2.0], [2.0, 3.0, 4.0])
        assert abs(res.statistic - math.sqrt(6)) < 1e-12
        assert abs(res.df - 4.0) < 1e-12
        # reference tail value computed to 12 digits with 40-digit arithmetic
        assert abs(res.p_value - 0.0352419984551) < 1e-9
        assert abs(res.estimate - 2.0) < 1e-12

    def test_swap_antisymmetry(self):
        rng = np.random.default_rng(5)
        for _ in range(25):
            g0 = rng.normal(0, 1, rng.integers(2, 12))
            g1 = rng.normal(0.5, 2, rng.integers(2, 12))
            fwd = welch_t_test(g0, g1)
            rev = welch_t_test(g1, g0)
            assert abs(fwd.statistic + rev.statistic) < 1e-12
            assert abs(fwd.p_value + rev.p_value - 1.0) < 1e-12

    def test_pooled_reduction_equal_sizes_and_variances(self):
        g0 = np.array([1.0, 2.0, 3.0, 4.0])
        g1 = g0 + 2.5  # same sample variance, same size
        res = welch_t_test(g0, g1)
        n = len(g0)
        sp = g0.std(ddof=1)
        pooled_t = 2.5 / (sp * math.sqrt(2 / n))
        assert abs(res.df - (2 * n - 2)) < 1e-12
        assert abs(res.statistic - pooled_t) < 1e-12

    def test_p_strictly_decreases_with_shift(self):
        rng = np.random.default_rng(11)
        g0 = rng.normal(0, 1, 20)
        g1 = rng.normal(0, 1, 25)
        p_values = [welch_t_test(g0, g1 + shift).p_value for shift in np.linspace(0, 3, 13)]
        assert all(b < a for a, b in zip(p_values, p_values[1:]))

    def test_null_rejection_rate(self):
        rng = np.random.default_rng(20260810)
        rejections = 0
        n_rep = 10_000
        for _ in range(n_rep):
            sample = rng.standard_normal((2, 30))
            rejections += welch_t_test(sample[0], sample[1]).p_value <= 0.05
        assert abs(rejections / n_rep - 0.05) < 0.01

    def test_errors(self):
        with pytest.raises(InsufficientDataError):
            welch_t_test([1.0], [1.0, 2.0])
        with pytest.raises(DegenerateVarianceError):
            welch_t_test([1.0, 1.0], [2.0, 2.0])


class TestWaldProportion:
    def test_equal_proportions(self):
        res = wald_proportion_test(5, 10, 5, 10)
        assert res.statistic == 0.0
        assert res.p_value == 0.5

    def test_hand_computed_example(self):
        res = wald_proportion_test(2, 10, 8, 10)
        assert abs(res.estimate - 0.6) < 1e-12
        assert abs(res.std_error - math.sqrt(0.032)) < 1e-12
        assert abs(res.statistic - 3.3541019662496847) < 1e-12
        # reference normal tail computed to 12 digits
        assert abs(res.p_value - 0.000398115078795) < 1e-12

    def test_degenerate_conventions(self):
        assert wald_proportion_test(0, 10, 10, 10).p_value == 0.0
        assert wald_proportion_test(10, 10, 0, 10).p_value == 1.0
        assert wald_proportion_test(0, 10, 0, 10).p_value == 0.5
        assert wald_proportion_test(10, 10, 10, 10).p_value == 0.5

    def test_validation(self):
        with pytest.raises(InsufficientDataError):
            wald_proportion_test(0, 0, 1, 2)
        with pytest.raises(ValueError):
            wald_proportion_test(3, 2, 1, 2)


class TestPooledProportion:
    def test_matches_corrected_prop_test(self):
        # reference: z and p of the corrected pooled test at (8/30, 15/30)
        res = pooled_proportion_ztest(8, 30, 15, 30)
        assert abs(res.statistic - 1.59316991067) < 1e-9
        assert abs(res.p_value - 0.0555610396665) < 1e-9

    def test_equal_counts(self):
        assert pooled_proportion_ztest(7, 20, 7, 20).p_value == 0.5

    def test_correction_shrinks_small_differences_to_zero(self):
        res = pooled_proportion_ztest(10, 30, 11, 30)
        assert res.statistic == 0.0
        assert res.p_value == 0.5

    def test_without_correction(self):
        res = pooled_proportion_ztest(8, 30, 15, 30, continuity=False)
        pooled = 23 / 60
        se = math.sqrt(pooled * (1 - pooled) * (2 / 30))
        assert abs(res.statistic - (7 / 30) / se) < 1e-12

    def test_degenerate_conventions(self):
        # pooled SE vanishes only when both arms are all-failure or
        # all-success, which forces a zero estimate
        assert pooled_proportion_ztest(0, 10, 0, 10).p_value == 0.5
        assert pooled_proportion_ztest(10, 10, 10, 10).p_value == 0.5
        assert pooled_proportion_ztest(0, 10, 10, 10).p_value < 1e-4


class TestSampleSummary:
    def test_from_values(self):
        s = SampleSummary.from_values([1.0, 2.0, 3.0])
        assert s.n == 3
        assert s.mean == 2.0
        assert abs(s.sd - 1.0) < 1e-15

    def test_empty(self):
        with pytest.raises(InsufficientDataError):
            SampleSummary.from_values([])
