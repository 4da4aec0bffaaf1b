"""Patient-ranked and patient-selected composite endpoint analyses with
a Monte Carlo power harness for two-arm randomised trials."""

from .design import (
    ConfigError,
    CovarianceSpec,
    Definitions,
    MCID_MARGINS,
    OUTCOME_NAMES,
    PreferenceDistribution,
    Scenario,
    TrialConfig,
    ZERO_MARGINS,
    build_trial_config,
    default_definitions,
    load_config,
)
from .door import (
    WinProbResult,
    common_ranking_set,
    composite_door,
    composite_door_matrix,
    door_indicator,
    door_variance,
    winning_probability,
)
from .harness import (
    DEFAULT_MASTER_SEED,
    METHODS,
    NULL_SCENARIO_ID,
    RECALIBRATED_METHODS,
    PowerCell,
    PowerReport,
    RunPlan,
    calibrate_thresholds,
    empirical_threshold,
    estimate_power,
    run_replicate,
    simulate_p_values,
)
from .records import PatientRecord, TrialArrays, as_arrays, as_records, split_by_arm
from .report import emit_report
from .selected import mean_patient_selected_test, proportion_selected_test, univariate_test
from .simulate import (
    cholesky_factor,
    sample_ranking,
    simulate_trial,
    simulate_trial_arrays,
    stratified_block_randomize,
)
from .stats import (
    DegenerateVarianceError,
    InsufficientDataError,
    SampleSummary,
    TestResult,
    pooled_proportion_ztest,
    std_normal_cdf,
    std_normal_quantile,
    student_t_sf,
    wald_proportion_test,
    welch_t_test,
)
from .wwp import StratumResult, WwpResult, stratify_by_top_rank, wwp_test

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "CovarianceSpec",
    "DEFAULT_MASTER_SEED",
    "Definitions",
    "DegenerateVarianceError",
    "InsufficientDataError",
    "MCID_MARGINS",
    "METHODS",
    "NULL_SCENARIO_ID",
    "OUTCOME_NAMES",
    "PatientRecord",
    "PowerCell",
    "PowerReport",
    "PreferenceDistribution",
    "RECALIBRATED_METHODS",
    "RunPlan",
    "SampleSummary",
    "Scenario",
    "StratumResult",
    "TestResult",
    "TrialArrays",
    "TrialConfig",
    "WinProbResult",
    "WwpResult",
    "ZERO_MARGINS",
    "as_arrays",
    "as_records",
    "build_trial_config",
    "calibrate_thresholds",
    "cholesky_factor",
    "common_ranking_set",
    "composite_door",
    "composite_door_matrix",
    "default_definitions",
    "door_indicator",
    "door_variance",
    "emit_report",
    "empirical_threshold",
    "estimate_power",
    "load_config",
    "mean_patient_selected_test",
    "pooled_proportion_ztest",
    "proportion_selected_test",
    "run_replicate",
    "sample_ranking",
    "simulate_p_values",
    "simulate_trial",
    "simulate_trial_arrays",
    "split_by_arm",
    "std_normal_cdf",
    "std_normal_quantile",
    "stratified_block_randomize",
    "stratify_by_top_rank",
    "student_t_sf",
    "univariate_test",
    "wald_proportion_test",
    "welch_t_test",
    "winning_probability",
    "wwp_test",
]
