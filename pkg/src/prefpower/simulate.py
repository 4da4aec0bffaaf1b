"""Trial data generator: preference sampling, preference-stratified
permuted-block randomisation, and correlated multivariate-normal
outcomes.

Rankings are drawn for all patients first, arms are then assigned within
each ranking stratum in permuted blocks (1:1 within a block, any
leftover patients take the leading slots of one extra permuted block),
and finally each patient's outcome vector is the arm- and
ranking-specific mean plus Cholesky-coloured standard normal noise. All
draws come from a single numpy Generator, so a given (config, seed) pair
reproduces the trial bit for bit.
"""

from __future__ import annotations

import numpy as np

from .design import CovarianceSpec, PreferenceDistribution, TrialConfig
from .records import PatientRecord, TrialArrays, as_records


def sample_ranking(dist: PreferenceDistribution, rng: np.random.Generator) -> tuple[int, ...]:
    """Draw one rank vector from a preference distribution."""
    rankings, probs = dist.tabulate()
    return rankings[rng.choice(len(rankings), p=probs)]


def _assign_stratum(n_patients: int, block_size: int, rng: np.random.Generator) -> np.ndarray:
    """Arm labels for one stratum's patients in arrival order."""
    half = block_size // 2
    base = np.array([0] * half + [1] * half, dtype=np.int64)
    n_blocks, leftover = divmod(n_patients, block_size)
    total_blocks = n_blocks + (1 if leftover else 0)
    if total_blocks == 0:
        return np.empty(0, dtype=np.int64)
    blocks = rng.permuted(np.tile(base, (total_blocks, 1)), axis=1)
    return blocks.reshape(-1)[:n_patients]


def stratified_block_randomize(rankings, block_size: int = 2, rng=None) -> np.ndarray:
    """1:1 arm assignment in permuted blocks within each ranking stratum.

    ``rankings`` is one rank vector per patient; patients sharing a rank
    vector form a stratum. Returns arm labels in patient order. Within
    every stratum the arm imbalance is at most block_size / 2 patients
    (at most 1 for the default block of 2).
    """
    if block_size < 2 or block_size % 2 != 0:
        raise ValueError("block_size must be even and at least 2")
    rng = np.random.default_rng() if rng is None else rng
    codes = [tuple(int(r) for r in ranking) for ranking in rankings]
    arms = np.empty(len(codes), dtype=np.int64)
    for stratum in sorted(set(codes)):
        positions = [i for i, c in enumerate(codes) if c == stratum]
        arms[positions] = _assign_stratum(len(positions), block_size, rng)
    return arms


def cholesky_factor(cov) -> np.ndarray:
    """Lower-triangular factor L with L @ L.T equal to the covariance."""
    matrix = cov.matrix if isinstance(cov, CovarianceSpec) else np.asarray(cov, dtype=np.float64)
    return np.linalg.cholesky(matrix)


def simulate_trial_arrays(config: TrialConfig, rng=None) -> TrialArrays:
    """Generate one trial as column arrays (the fast path).

    Draw order is fixed: rankings for all patients, then per-stratum arm
    blocks (strata visited in sorted rank-vector order), then one
    standard-normal matrix for the outcomes.
    """
    rng = np.random.default_rng(config.seed) if rng is None else rng
    rankings, probs = config.preference.tabulate()
    rank_table = np.array(rankings, dtype=np.int64)
    n = config.n_total
    m = rank_table.shape[1]

    ranking_idx = rng.choice(len(rankings), size=n, p=probs)

    arms = np.empty(n, dtype=np.int64)
    for code in range(len(rankings)):
        positions = np.flatnonzero(ranking_idx == code)
        if positions.size:
            arms[positions] = _assign_stratum(positions.size, config.block_size, rng)

    treat_table = np.array(
        [config.scenario.treatment_means[r] for r in rankings], dtype=np.float64
    )
    control_mean = np.asarray(config.scenario.control_mean, dtype=np.float64)
    means = np.where(arms[:, None] == 1, treat_table[ranking_idx], control_mean)

    L = cholesky_factor(config.covariance)
    outcomes = means + rng.standard_normal((n, m)) @ L.T
    return TrialArrays(outcomes=outcomes, ranks=rank_table[ranking_idx], arms=arms)


def simulate_trial(config: TrialConfig, rng=None) -> list[PatientRecord]:
    """Generate one trial as a list of patient records."""
    return as_records(simulate_trial_arrays(config, rng))
