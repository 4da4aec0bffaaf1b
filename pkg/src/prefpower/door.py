"""Composite DOOR endpoint: pairwise win/loss/tie scoring over the full
hierarchy of patient importance rankings, the winning-probability
estimator, and its U-statistic variance.

Every control patient is compared against every treatment patient. A
single-outcome comparison scores 1 (treatment wins) when the treatment
patient's value exceeds the control patient's by more than the win
margin, 0 when it falls short by more than the margin, and 0.5 (tie)
otherwise. The composite comparison walks the two patients' ranked
outcome sets from most important outwards: at each depth r it looks at
the set of outcomes either patient ranks in their top r, but only when
the two patients agree on that set. Wins with no losses inside the
shared set decide the pair in favour of treatment, losses with no wins
decide it against, a mix of both is a tie, and an all-tied set defers to
the next depth. A pair still tied at the full outcome set is a tie.

The winning probability theta is the chance a random treatment patient
beats a random control patient plus half the tie probability; theta =
0.5 means no treatment effect. The one-sided test compares
(theta_hat - 0.5) / sigma_hat against the standard normal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .records import PatientRecord, as_arrays
from .stats import InsufficientDataError, std_normal_cdf


@dataclass(frozen=True)
class WinProbResult:
    """Winning-probability estimate and its one-sided z test."""

    theta_hat: float
    sigma_hat: float
    statistic: float
    p_value: float
    tie_fraction: float
    variance_clamped: bool = False


def door_indicator(y_treat, y_ctrl, margin):
    """Single-outcome win/loss/tie score, vectorised over array inputs.

    Returns 1.0 where y_treat - y_ctrl > margin, 0.0 where the difference
    is below -margin, and 0.5 where it lies within the margin either way.
    """
    diff = np.subtract(y_treat, y_ctrl)
    out = np.where(diff > margin, 1.0, np.where(diff < -margin, 0.0, 0.5))
    return float(out) if np.isscalar(y_treat) and np.isscalar(y_ctrl) else out


def common_ranking_set(ranking, r: int) -> frozenset[int]:
    """Outcome indices a patient ranks among their top r."""
    m = len(ranking)
    if not 1 <= r <= m:
        raise ValueError(f"rank depth r={r} outside 1..{m}")
    return frozenset(j for j, rank in enumerate(ranking) if rank <= r)


def composite_door(p_ctrl: PatientRecord, p_treat: PatientRecord, margins) -> float:
    """Composite win/loss/tie score for one control/treatment pair.

    Walks the shared top-r outcome sets from r = 1 upwards as described
    in the module docstring.
    """
    m = p_ctrl.n_outcomes
    margins = tuple(float(v) for v in margins)
    if p_treat.n_outcomes != m or len(margins) != m:
        raise ValueError("patients and margins must agree on the number of outcomes")
    scores = [
        door_indicator(p_treat.outcomes[j], p_ctrl.outcomes[j], margins[j]) for j in range(m)
    ]
    for r in range(1, m + 1):
        shared = common_ranking_set(p_ctrl.ranking, r)
        if shared != common_ranking_set(p_treat.ranking, r):
            continue
        values = [scores[j] for j in shared]
        hi, lo = max(values), min(values)
        if hi == 1.0 and lo > 0.0:
            return 1.0
        if hi < 1.0 and lo == 0.0:
            return 0.0
        if hi == 1.0 and lo == 0.0:
            return 0.5
        # Everything in the shared set is tied: widen the set.
    return 0.5


def composite_door_matrix(control, treatment, margins) -> np.ndarray:
    """Composite scores for all control x treatment pairs.

    Equivalent to calling :func:`composite_door` on each pair, vectorised
    over the pair grid. Returns an (n0, n1) array of values in
    {0, 0.5, 1}.
    """
    ctrl = as_arrays(control)
    treat = as_arrays(treatment)
    margins = np.asarray(margins, dtype=np.float64)
    m = ctrl.n_outcomes
    if treat.n_outcomes != m or margins.shape != (m,):
        raise ValueError("patients and margins must agree on the number of outcomes")

    # (n0, n1, m) single-outcome scores; values are exactly 0, 0.5 or 1,
    # so the equality tests below are safe.
    scores = door_indicator(treat.outcomes[None, :, :], ctrl.outcomes[:, None, :], margins)

    result = np.full((len(ctrl), len(treat)), 0.5)
    undecided = np.ones(result.shape, dtype=bool)
    for r in range(1, m + 1):
        in_top0 = ctrl.ranks <= r   # (n0, m)
        in_top1 = treat.ranks <= r  # (n1, m)
        shared = (in_top0[:, None, :] == in_top1[None, :, :]).all(axis=2)
        active = undecided & shared
        hi = np.max(np.where(in_top0[:, None, :], scores, -np.inf), axis=2)
        lo = np.min(np.where(in_top0[:, None, :], scores, np.inf), axis=2)
        win = active & (hi == 1.0) & (lo > 0.0)
        loss = active & (hi < 1.0) & (lo == 0.0)
        mixed = active & (hi == 1.0) & (lo == 0.0)
        result[win] = 1.0
        result[loss] = 0.0
        undecided &= ~(win | loss | mixed)
        # Pairs whose shared set is all ties stay undecided; anything
        # still undecided after r = m keeps the 0.5 default.
    return result


def door_variance(Z, theta_hat: float) -> float:
    """Variance estimate for the winning probability, clamped at zero.

    Z is the pairwise score matrix with control patients on the rows.
    The estimator combines the mean square of the scores with the
    within-row and within-column cross products (the two one-overlap
    U-statistic terms) and subtracts (n - 1) * theta_hat**2, with
    n = n0 + n1. The raw estimate can come out negative in small
    samples; callers that care can compare against
    :func:`door_variance_raw`.
    """
    return max(door_variance_raw(Z, theta_hat), 0.0)


def door_variance_raw(Z, theta_hat: float) -> float:
    Z = np.asarray(Z, dtype=np.float64)
    if Z.ndim != 2 or Z.size == 0:
        raise ValueError("Z must be a nonempty n0 x n1 matrix")
    n0, n1 = Z.shape
    n = n0 + n1
    sq = Z**2
    total_sq = sq.sum()
    row = Z.sum(axis=1)
    col = Z.sum(axis=0)
    # sum over i0 of sum_{i1 != i1'} Z[i0,i1] Z[i0,i1'] and its transpose:
    cross_rows = (row**2).sum() - sq.sum()
    cross_cols = (col**2).sum() - sq.sum()
    inner = (total_sq + cross_rows + cross_cols) / (n0 * n1) - (n - 1) * theta_hat**2
    return float(inner / (n0 * n1))


def winning_probability(control, treatment, margins) -> WinProbResult:
    """Estimate theta over all pairs and test H0: theta = 0.5 against
    theta > 0.5.

    Grouping is positional: the first argument is scored as the control
    arm and the second as the treatment arm regardless of the records'
    own arm labels. When the variance estimate degenerates to zero the
    p-value falls back to 0.5 / 0 / 1 according to the sign of
    theta_hat - 0.5.
    """
    ctrl = as_arrays(control)
    treat = as_arrays(treatment)
    if len(ctrl) < 2 or len(treat) < 2:
        raise InsufficientDataError(
            f"winning_probability needs >= 2 patients per arm, got {len(ctrl)} and {len(treat)}"
        )
    Z = composite_door_matrix(ctrl, treat, margins)
    theta_hat = float(Z.mean())
    raw = door_variance_raw(Z, theta_hat)
    variance = max(raw, 0.0)
    sigma_hat = math.sqrt(variance)
    if sigma_hat > 0.0:
        statistic = (theta_hat - 0.5) / sigma_hat
        p_value = 1.0 - std_normal_cdf(statistic)
    elif theta_hat == 0.5:
        statistic, p_value = 0.0, 0.5
    else:
        statistic = math.copysign(math.inf, theta_hat - 0.5)
        p_value = 0.0 if theta_hat > 0.5 else 1.0
    return WinProbResult(
        theta_hat=theta_hat,
        sigma_hat=sigma_hat,
        statistic=statistic,
        p_value=p_value,
        tie_fraction=float((Z == 0.5).mean()),
        variance_clamped=raw < 0.0,
    )
