"""Monte Carlo driver: per-replicate analysis fan-out, null-based
threshold recalibration, and power estimation.

Every replicate owns an rng stream derived from (master seed, stream
purpose, scenario, replicate index), so results are independent of how
replicates are partitioned across workers, and the same simulated
dataset feeds every analysis method. Calibration, power estimation and
post-calibration validation use disjoint stream purposes to avoid reuse
bias.

The null scenario (id "S1") is always reported at the nominal alpha;
recalibrated thresholds apply to the other scenarios only.
"""

from __future__ import annotations

import hashlib
import math
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .design import ConfigError, Definitions, TrialConfig, build_trial_config, default_definitions
from .door import winning_probability
from .records import split_by_arm
from .selected import mean_patient_selected_test, proportion_selected_test, univariate_test
from .simulate import simulate_trial_arrays
from .stats import DegenerateVarianceError, InsufficientDataError
from .wwp import wwp_test

METHODS = ("UV1", "UV2", "UV3", "DOOR", "WWP", "MeanSelected", "PropSelected")

# Only the methods whose null rejection rate is materially off-nominal
# (tied U statistics, discreteness) get a recalibrated threshold.
RECALIBRATED_METHODS = ("DOOR", "WWP", "PropSelected")

NULL_SCENARIO_ID = "S1"
DEFAULT_MASTER_SEED = 20260810

# Stream purposes keep replicate rng streams disjoint across uses.
POWER_STREAM = 1
CALIBRATION_STREAM = 2
VALIDATION_STREAM = 3

_UNIVARIATE_RE = re.compile(r"^UV([1-9][0-9]*)$")


def _is_known_method(name: str) -> bool:
    return name in METHODS or _UNIVARIATE_RE.match(name) is not None


@dataclass(frozen=True)
class RunPlan:
    """What to simulate: scenarios, methods and design settings."""

    scenarios: tuple[str, ...] = ("S1", "S2", "S3", "S4", "S5", "S6", "S7", "S8")
    methods: tuple[str, ...] = METHODS
    n_sim: int = 10_000
    alpha: float = 0.05
    preference_mode: str = "unequal"
    correlation: str = "medium"
    margin_mode: str = "mcid"
    master_seed: int = DEFAULT_MASTER_SEED
    recalibrate: bool = True

    def __post_init__(self):
        object.__setattr__(self, "scenarios", tuple(self.scenarios))
        object.__setattr__(self, "methods", tuple(self.methods))
        if not self.scenarios:
            raise ConfigError("plan lists no scenarios")
        if not self.methods:
            raise ConfigError("plan lists no methods")
        for name in self.methods:
            if not _is_known_method(name):
                raise ConfigError(f"unknown method {name!r} (known: {', '.join(METHODS)})")
        if self.n_sim < 1:
            raise ConfigError("n_sim must be at least 1")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError("alpha must be in (0, 1)")
        if self.master_seed < 0:
            raise ConfigError("master_seed must be nonnegative")


@dataclass(frozen=True)
class PowerCell:
    """Rejection rate for one (method, scenario) pair."""

    power: float
    mc_se: float
    n_sim: int
    threshold: float


@dataclass
class PowerReport:
    methods: tuple[str, ...]
    scenarios: tuple[str, ...]
    cells: dict = field(default_factory=dict)  # (method, scenario) -> PowerCell
    metadata: dict = field(default_factory=dict)


def run_replicate(config: TrialConfig, methods, rng) -> dict:
    """Simulate one trial and return each requested method's one-sided
    p-value on it.

    Degenerate samples (zero variance, a starved arm in a tiny custom
    trial) are mapped to the no-evidence p-value 0.5 instead of aborting
    the replicate; with continuous outcomes at the default trial size
    these have probability zero.
    """
    trial = simulate_trial_arrays(config, rng)
    control, treatment = split_by_arm(trial)
    p_values = {}
    for method in methods:
        uv = _UNIVARIATE_RE.match(method)
        try:
            if uv:
                p = univariate_test(trial, int(uv.group(1)) - 1).p_value
            elif method == "DOOR":
                p = winning_probability(control, treatment, config.margins).p_value
            elif method == "WWP":
                p = wwp_test(trial, config.margins).p_value
            elif method == "MeanSelected":
                p = mean_patient_selected_test(trial).p_value
            elif method == "PropSelected":
                p = proportion_selected_test(trial, config.margins).p_value
            else:
                raise ConfigError(f"unknown method {method!r}")
        except (InsufficientDataError, DegenerateVarianceError):
            p = 0.5
        p_values[method] = p
    return p_values


def _scenario_tag(scenario_id: str) -> int:
    digest = hashlib.blake2s(scenario_id.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big")


def replicate_rng(master_seed: int, stream: int, scenario_id: str, index: int):
    """The rng for one replicate; depends only on the four arguments."""
    seq = np.random.SeedSequence((master_seed, stream, _scenario_tag(scenario_id), index))
    return np.random.default_rng(seq)


def _run_chunk(config, methods, master_seed, stream, start, stop):
    out = {method: np.empty(stop - start) for method in methods}
    for index in range(start, stop):
        rng = replicate_rng(master_seed, stream, config.scenario.id, index)
        p_values = run_replicate(config, methods, rng)
        for method in methods:
            out[method][index - start] = p_values[method]
    return out


def simulate_p_values(
    config: TrialConfig,
    methods,
    n_sim: int,
    master_seed: int,
    stream: int = POWER_STREAM,
    workers: int = 1,
) -> dict:
    """p-values of each method over ``n_sim`` independent replicates.

    Results are identical for any worker count because replicate rng
    streams are indexed, not sequential.
    """
    methods = tuple(methods)
    if workers <= 1 or n_sim < 2 * workers:
        return _run_chunk(config, methods, master_seed, stream, 0, n_sim)
    n_chunks = min(workers * 4, n_sim)
    bounds = np.linspace(0, n_sim, n_chunks + 1, dtype=int)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [
            pool.submit(_run_chunk, config, methods, master_seed, stream, int(a), int(b))
            for a, b in zip(bounds[:-1], bounds[1:])
            if b > a
        ]
        parts = [future.result() for future in futures]
    return {method: np.concatenate([part[method] for part in parts]) for method in methods}


def empirical_threshold(p_values, alpha: float) -> float:
    """Largest observed p-value t with an empirical fraction of values
    <= t that does not exceed alpha.

    This is the floor(alpha * n)-th order statistic, stepped down past
    any tie group that would push the rejection fraction above alpha. If
    even the smallest value is too heavy the threshold is 0 (only exact
    zeros reject).
    """
    p_values = np.sort(np.asarray(p_values, dtype=np.float64))
    n = p_values.size
    allowed = math.floor(alpha * n)
    if allowed == 0:
        return 0.0
    values, counts = np.unique(p_values, return_counts=True)
    cumulative = np.cumsum(counts)
    idx = int(np.searchsorted(cumulative, allowed, side="right")) - 1
    return float(values[idx]) if idx >= 0 else 0.0


def calibrate_thresholds(plan: RunPlan, definitions: Definitions | None = None, workers: int = 1) -> dict:
    """Per-method p-value thresholds from an independent null run.

    Methods in RECALIBRATED_METHODS get the empirical threshold that
    keeps the null rejection rate at alpha or just below; all other
    methods keep alpha. The null run uses the calibration seed stream,
    disjoint from power estimation.
    """
    definitions = default_definitions() if definitions is None else definitions
    thresholds = {method: plan.alpha for method in plan.methods}
    listed = [method for method in plan.methods if method in RECALIBRATED_METHODS]
    if not listed:
        return thresholds
    config = build_trial_config(
        definitions, NULL_SCENARIO_ID, plan.preference_mode, plan.correlation, plan.margin_mode
    )
    p_values = simulate_p_values(
        config, listed, plan.n_sim, plan.master_seed, CALIBRATION_STREAM, workers
    )
    for method in listed:
        thresholds[method] = empirical_threshold(p_values[method], plan.alpha)
    return thresholds


def estimate_power(plan: RunPlan, definitions: Definitions | None = None, workers: int = 1) -> PowerReport:
    """Rejection rate of every (method, scenario) cell in the plan.

    The null scenario is always judged at the nominal alpha; other
    scenarios use the method's calibrated threshold when recalibration
    is on.
    """
    definitions = default_definitions() if definitions is None else definitions
    if plan.recalibrate:
        thresholds = calibrate_thresholds(plan, definitions, workers=workers)
    else:
        thresholds = {method: plan.alpha for method in plan.methods}
    cells = {}
    for scenario_id in plan.scenarios:
        config = build_trial_config(
            definitions, scenario_id, plan.preference_mode, plan.correlation, plan.margin_mode
        )
        p_values = simulate_p_values(
            config, plan.methods, plan.n_sim, plan.master_seed, POWER_STREAM, workers
        )
        for method in plan.methods:
            threshold = plan.alpha if scenario_id == NULL_SCENARIO_ID else thresholds[method]
            power = float((p_values[method] <= threshold).mean())
            cells[(method, scenario_id)] = PowerCell(
                power=power,
                mc_se=math.sqrt(power * (1.0 - power) / plan.n_sim),
                n_sim=plan.n_sim,
                threshold=threshold,
            )
    metadata = {"plan": asdict(plan), "thresholds": dict(thresholds)}
    return PowerReport(
        methods=plan.methods, scenarios=plan.scenarios, cells=cells, metadata=metadata
    )
