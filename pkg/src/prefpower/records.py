"""Patient-level data structures shared by all endpoint analyses.

A patient carries a vector of ``m`` continuous outcomes (normalised
reduction from baseline, higher is better), an importance ranking over
those outcomes, and a treatment-arm label. Rankings are stored as rank
vectors: ``ranking[j]`` is the rank the patient assigns to outcome ``j``,
with 1 the most important and ties disallowed.

The equivalent "importance order" form, i.e. outcome indices listed from
most to least important, is what preference surveys and configuration
files use (a key like ``"213"`` means outcome 2 first, then 1, then 3).
Converters between the two representations live here, as does the
array-of-struct <-> struct-of-arrays bridge used by the simulation
harness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

CONTROL = 0
TREATMENT = 1


@dataclass(frozen=True)
class PatientRecord:
    """One trial participant: outcomes, importance ranking, arm label."""

    outcomes: tuple[float, ...]
    ranking: tuple[int, ...]
    arm: int

    def __post_init__(self):
        outcomes = tuple(float(y) for y in self.outcomes)
        ranking = tuple(int(r) for r in self.ranking)
        object.__setattr__(self, "outcomes", outcomes)
        object.__setattr__(self, "ranking", ranking)
        m = len(outcomes)
        if len(ranking) != m:
            raise ValueError(
                f"ranking has {len(ranking)} entries for {m} outcomes"
            )
        if sorted(ranking) != list(range(1, m + 1)):
            raise ValueError(
                f"ranking {ranking} is not a permutation of 1..{m} (ties are not allowed)"
            )
        if not all(math.isfinite(y) for y in outcomes):
            raise ValueError(f"outcomes must be finite, got {outcomes}")
        if self.arm not in (CONTROL, TREATMENT):
            raise ValueError(f"arm must be {CONTROL} (control) or {TREATMENT} (treatment)")

    @property
    def n_outcomes(self) -> int:
        return len(self.outcomes)

    @property
    def top_outcome(self) -> int:
        """Index of the rank-1 outcome; doubles as the selected outcome."""
        return self.ranking.index(1)


def rank_vector_from_order(order) -> tuple[int, ...]:
    """Convert an importance order (outcome indices, most important first)
    to a rank vector (rank per outcome, 1 = most important)."""
    order = tuple(int(j) for j in order)
    m = len(order)
    if sorted(order) != list(range(m)):
        raise ValueError(f"order {order} is not a permutation of 0..{m - 1}")
    ranks = [0] * m
    for position, j in enumerate(order):
        ranks[j] = position + 1
    return tuple(ranks)


def order_from_rank_vector(ranking) -> tuple[int, ...]:
    """Inverse of :func:`rank_vector_from_order`."""
    ranking = tuple(int(r) for r in ranking)
    m = len(ranking)
    if sorted(ranking) != list(range(1, m + 1)):
        raise ValueError(f"ranking {ranking} is not a permutation of 1..{m}")
    order = [0] * m
    for j, rank in enumerate(ranking):
        order[rank - 1] = j
    return tuple(order)


def parse_order_key(key: str) -> tuple[int, ...]:
    """Parse a 1-based order string such as ``"213"`` into a 0-based
    importance order tuple, here ``(1, 0, 2)``."""
    try:
        order = tuple(int(c) - 1 for c in str(key).strip())
    except ValueError as exc:
        raise ValueError(f"invalid ranking key {key!r}") from exc
    if sorted(order) != list(range(len(order))):
        raise ValueError(f"ranking key {key!r} is not a permutation of 1..{len(order)}")
    return order


def format_order_key(order) -> str:
    return "".join(str(j + 1) for j in order)


@dataclass(frozen=True)
class TrialArrays:
    """Column-wise view of a patient list used on the simulation hot path.

    Analysis entry points accept either a sequence of PatientRecord or a
    TrialArrays; see :func:`as_arrays`.
    """

    outcomes: np.ndarray  # (n, m) float64
    ranks: np.ndarray     # (n, m) int, rank vectors
    arms: np.ndarray      # (n,) int, 0 control / 1 treatment

    def __post_init__(self):
        if self.outcomes.ndim != 2 or self.ranks.shape != self.outcomes.shape:
            raise ValueError("outcomes and ranks must both be (n, m) arrays")
        if self.arms.shape != (self.outcomes.shape[0],):
            raise ValueError("arms must be a length-n vector")

    def __len__(self) -> int:
        return self.outcomes.shape[0]

    @property
    def n_outcomes(self) -> int:
        return self.outcomes.shape[1]

    @property
    def top_outcomes(self) -> np.ndarray:
        """Index of each patient's rank-1 (selected) outcome."""
        return np.argmax(self.ranks == 1, axis=1)

    def subset(self, mask) -> "TrialArrays":
        return TrialArrays(self.outcomes[mask], self.ranks[mask], self.arms[mask])


def as_arrays(patients) -> TrialArrays:
    """Coerce a sequence of PatientRecord into TrialArrays (no-op if it
    already is one)."""
    if isinstance(patients, TrialArrays):
        return patients
    patients = list(patients)
    if not patients:
        return TrialArrays(
            np.empty((0, 0)), np.empty((0, 0), dtype=np.int64), np.empty(0, dtype=np.int64)
        )
    outcomes = np.array([p.outcomes for p in patients], dtype=np.float64)
    ranks = np.array([p.ranking for p in patients], dtype=np.int64)
    arms = np.array([p.arm for p in patients], dtype=np.int64)
    return TrialArrays(outcomes, ranks, arms)


def as_records(arrays: TrialArrays) -> list[PatientRecord]:
    return [
        PatientRecord(
            outcomes=tuple(arrays.outcomes[i]),
            ranking=tuple(int(r) for r in arrays.ranks[i]),
            arm=int(arrays.arms[i]),
        )
        for i in range(len(arrays))
    ]


def split_by_arm(patients) -> tuple[TrialArrays, TrialArrays]:
    """Split a trial into (control, treatment) by the arm label."""
    arr = as_arrays(patients)
    return arr.subset(arr.arms == CONTROL), arr.subset(arr.arms == TREATMENT)
