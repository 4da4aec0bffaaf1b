"""Tests for the top-ranked weighted winning probability."""

import numpy as np
import pytest

from prefpower.door import winning_probability
from prefpower.records import PatientRecord
from prefpower.stats import InsufficientDataError
from prefpower.wwp import stratify_by_top_rank, wwp_test

MARGINS = (0.67, 0.63, 0.54)


def patient(outcomes, ranking, arm):
    return PatientRecord(tuple(outcomes), tuple(ranking), arm)


def random_trial(rng, n_per_arm=8, m=3, shift=0.0):
    patients = []
    for arm in (0, 1):
        for _ in range(n_per_arm):
            ranking = tuple(int(r) for r in rng.permutation(m) + 1)
            outcomes = rng.normal(shift if arm == 1 else 0.0, 1.0, m)
            patients.append(patient(outcomes, ranking, arm))
    return patients


class TestStratify:
    def test_distinct_tops(self):
        patients = [
            patient((0, 0, 0), (1, 2, 3), 0),
            patient((0, 0, 0), (2, 1, 3), 0),
            patient((0, 0, 0), (3, 2, 1), 1),
        ]
        strata = stratify_by_top_rank(patients)
        assert [len(s) for s in strata] == [1, 1, 1]
        assert strata[0][0] is patients[0]
        assert strata[1][0] is patients[1]
        assert strata[2][0] is patients[2]

    def test_single_stratum(self):
        patients = [patient((0, 0, 0), (1, 2, 3), arm) for arm in (0, 1, 0, 1)]
        strata = stratify_by_top_rank(patients)
        assert [len(s) for s in strata] == [4, 0, 0]

    def test_empty(self):
        assert stratify_by_top_rank([]) == []
        assert stratify_by_top_rank([], n_outcomes=3) == [[], [], []]

    def test_partition(self):
        rng = np.random.default_rng(2)
        patients = random_trial(rng, n_per_arm=20)
        strata = stratify_by_top_rank(patients)
        assert sum(len(s) for s in strata) == len(patients)


class TestWwp:
    def test_single_nonempty_stratum_collapses(self):
        rng = np.random.default_rng(3)
        patients = [
            patient(rng.normal(0, 1, 3), (1, 2, 3), arm) for arm in (0, 0, 0, 1, 1, 1)
        ]
        res = wwp_test(patients, MARGINS)
        control = [p for p in patients if p.arm == 0]
        treatment = [p for p in patients if p.arm == 1]
        single = winning_probability(
            [patient((p.outcomes[0],), (1,), p.arm) for p in control],
            [patient((p.outcomes[0],), (1,), p.arm) for p in treatment],
            (MARGINS[0],),
        )
        assert abs(res.theta_wt - single.theta_hat) < 1e-15
        assert res.strata[0].weight == 1.0
        assert res.strata[1].degenerate and res.strata[2].degenerate

    def test_three_equal_strata_average(self):
        # outcome values chosen so the per-stratum winning probabilities
        # are 1, 0.5 and 0; equal strata then average to 0.5
        patients = [
            patient((0.0, 9, 9), (1, 2, 3), 0), patient((2.0, 9, 9), (1, 2, 3), 1),
            patient((9, 0.0, 9), (2, 1, 3), 0), patient((9, 0.0, 9), (2, 1, 3), 1),
            patient((9, 9, 2.0), (3, 2, 1), 0), patient((9, 9, 0.0), (3, 2, 1), 1),
        ]
        res = wwp_test(patients, MARGINS)
        assert [s.theta for s in res.strata] == [1.0, 0.5, 0.0]
        assert abs(res.theta_wt - 0.5) < 1e-15

    def test_hand_built_weighted_average(self):
        patients = [
            patient((1.0, 0, 0), (1, 2, 3), 1), patient((0.0, 0, 0), (1, 2, 3), 0),
            patient((0, -1.0, 0), (2, 1, 3), 1), patient((0, 0.0, 0), (2, 1, 3), 0),
            patient((0, 0, 0.2), (3, 2, 1), 1), patient((0, 0, 0.0), (3, 2, 1), 0),
        ]
        res = wwp_test(patients, MARGINS)
        # strata: win (1), loss (0), tie (0.5) with equal weights 1/3
        assert abs(res.theta_wt - (1.0 + 0.0 + 0.5) / 3) < 1e-15
        assert [s.n0 for s in res.strata] == [1, 1, 1]
        assert [s.n1 for s in res.strata] == [1, 1, 1]

    def test_non_top_outcomes_do_not_matter(self):
        rng = np.random.default_rng(5)
        patients = random_trial(rng, n_per_arm=10)
        res = wwp_test(patients, MARGINS)
        perturbed = []
        for p in patients:
            outcomes = np.array(p.outcomes)
            for j in range(3):
                if j != p.top_outcome:
                    outcomes[j] += rng.normal(0, 5)
            perturbed.append(patient(outcomes, p.ranking, p.arm))
        res2 = wwp_test(perturbed, MARGINS)
        assert res2 == res

    def test_arm_swap(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            patients = random_trial(rng, n_per_arm=int(rng.integers(3, 9)), shift=0.4)
            swapped = [patient(p.outcomes, p.ranking, 1 - p.arm) for p in patients]
            fwd = wwp_test(patients, MARGINS)
            rev = wwp_test(swapped, MARGINS)
            assert abs(fwd.theta_wt + rev.theta_wt - 1.0) < 1e-12
            assert abs(fwd.sigma_wt - rev.sigma_wt) < 1e-12

    def test_variance_nonnegative(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            patients = random_trial(rng, n_per_arm=int(rng.integers(2, 7)))
            res = wwp_test(patients, MARGINS)
            assert res.sigma_wt >= 0.0
            assert 0.0 <= res.p_value <= 1.0
            assert 0.0 <= res.theta_wt <= 1.0

    def test_degenerate_stratum_flagged_and_neutral(self):
        patients = [
            patient((1.0, 0, 0), (1, 2, 3), 1), patient((0.0, 0, 0), (1, 2, 3), 0),
            patient((0.0, 0, 0), (1, 2, 3), 0), patient((0, 0, 5.0), (3, 2, 1), 1),
        ]
        res = wwp_test(patients, MARGINS)
        dep = res.strata[2]
        assert dep.degenerate and dep.n0 == 0 and dep.n1 == 1
        assert dep.theta == 0.5 and dep.var_theta == 0.0
        assert abs(dep.weight - 0.25) < 1e-15
        assert abs(sum(s.weight for s in res.strata) - 1.0) < 1e-12

    def test_preconditions(self):
        with pytest.raises(InsufficientDataError):
            wwp_test([patient((0, 0, 0), (1, 2, 3), 0)] * 3, MARGINS)
        one_armed = [patient((0, 0, 0), (1, 2, 3), 0) for _ in range(4)]
        with pytest.raises(InsufficientDataError):
            wwp_test(one_armed, MARGINS)
