"""Top-ranked weighted winning probability (WWP).

Patients are stratified by the single outcome they rank most important.
Within each stratum the winning probability is computed on that outcome
alone, and the strata are combined as a weighted average with weights
equal to the stratum share of all patients. The variance of the weighted
estimate has two parts: variation of the weights themselves around the
stratum thetas (a multinomial quadratic form) and the weighted
within-stratum variances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .door import door_indicator, door_variance
from .records import CONTROL, TREATMENT, as_arrays
from .stats import InsufficientDataError, std_normal_cdf


@dataclass(frozen=True)
class StratumResult:
    """Per-stratum winning probability on the stratum's own outcome.

    ``degenerate`` marks strata that are empty or have patients in only
    one arm; those contribute theta = 0.5 with zero variance but keep
    their weight.
    """

    outcome_index: int
    n0: int
    n1: int
    theta: float
    var_theta: float
    weight: float
    degenerate: bool


@dataclass(frozen=True)
class WwpResult:
    theta_wt: float
    sigma_wt: float
    statistic: float
    p_value: float
    strata: tuple[StratumResult, ...]


def stratum_variance(Z) -> float:
    """Variance of a within-stratum winning probability from the row and
    column means of the stratum's pairwise score matrix.

    This is the two-component (projection) estimator: the variance of the
    per-control-patient mean scores over the control count plus the same
    for treatment patients, each with an n-1 denominator. Components with
    a single patient are dropped. Compared with the full pairwise
    estimator used for the composite analysis it is slightly conservative
    in small strata, which is what keeps the weighted test's operating
    characteristics in line with the published ones.
    """
    Z = np.asarray(Z, dtype=np.float64)
    n0, n1 = Z.shape
    variance = 0.0
    if n0 > 1:
        variance += Z.mean(axis=1).var(ddof=1) / n0
    if n1 > 1:
        variance += Z.mean(axis=0).var(ddof=1) / n1
    return float(variance)


def stratify_by_top_rank(patients, n_outcomes: int | None = None):
    """Partition patients into per-outcome lists by their top-ranked
    outcome. With no patients and no explicit ``n_outcomes`` the
    partition is empty."""
    patients = list(patients)
    if n_outcomes is None:
        n_outcomes = patients[0].n_outcomes if patients else 0
    strata = [[] for _ in range(n_outcomes)]
    for p in patients:
        strata[p.top_outcome].append(p)
    return strata


def wwp_test(patients, margins) -> WwpResult:
    """Weighted winning probability test of H0: theta_wt = 0.5 against
    theta_wt > 0.5.

    Requires at least 4 patients overall and at least one stratum with
    both arms represented. Degenerate strata are scored neutrally (see
    StratumResult).
    """
    arr = as_arrays(patients)
    margins = np.asarray(margins, dtype=np.float64)
    m = margins.shape[0]
    n = len(arr)
    if n < 4:
        raise InsufficientDataError(f"wwp_test needs >= 4 patients, got {n}")
    if arr.n_outcomes != m:
        raise ValueError("patients and margins must agree on the number of outcomes")

    tops = arr.top_outcomes
    theta = np.full(m, 0.5)
    var_theta = np.zeros(m)
    weight = np.zeros(m)
    strata = []
    for j in range(m):
        in_stratum = tops == j
        weight[j] = in_stratum.sum() / n
        g0 = arr.outcomes[in_stratum & (arr.arms == CONTROL), j]
        g1 = arr.outcomes[in_stratum & (arr.arms == TREATMENT), j]
        degenerate = g0.size == 0 or g1.size == 0
        if not degenerate:
            Z = door_indicator(g1[None, :], g0[:, None], margins[j])
            theta[j] = Z.mean()
            var_theta[j] = door_variance(Z, float(Z.mean()))
        strata.append(
            StratumResult(
                outcome_index=j,
                n0=int(g0.size),
                n1=int(g1.size),
                theta=float(theta[j]),
                var_theta=float(var_theta[j]),
                weight=float(weight[j]),
                degenerate=degenerate,
            )
        )
    if all(s.degenerate for s in strata):
        raise InsufficientDataError("no stratum has patients in both arms")

    theta_wt = float(weight @ theta)
    # Multinomial covariance of the weight vector; positive semidefinite.
    sigma_p = (np.diag(weight) - np.outer(weight, weight)) / n
    variance = float(theta @ sigma_p @ theta + weight @ (var_theta * weight))
    sigma_wt = math.sqrt(max(variance, 0.0))
    if sigma_wt > 0.0:
        statistic = (theta_wt - 0.5) / sigma_wt
        p_value = 1.0 - std_normal_cdf(statistic)
    elif theta_wt == 0.5:
        statistic, p_value = 0.0, 0.5
    else:
        statistic = math.copysign(math.inf, theta_wt - 0.5)
        p_value = 0.0 if theta_wt > 0.5 else 1.0
    return WwpResult(
        theta_wt=theta_wt,
        sigma_wt=sigma_wt,
        statistic=statistic,
        p_value=p_value,
        strata=tuple(strata),
    )
