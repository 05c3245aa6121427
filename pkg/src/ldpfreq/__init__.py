"""Frequency estimation from randomized-response reports under node sampling.

A library plus CLI for simulating direct-encoding (k-ary randomized
response) data collection when each node reports only with some sampling
probability, with debiased frequency estimators, their closed-form
variances, Monte-Carlo and exact-enumeration verification harnesses, and
an experiment CLI producing CSV results and figures.
"""

from .estimators import (ESTIMATOR_IDS, EstimateVector, FrequencyTable,
                         SupportCounts, apply_estimator, approx_norm_var_g,
                         approx_var_T, approx_var_c, approx_var_g,
                         biased_mean_under_sampling, count_supports,
                         estimate_T, estimate_c_hat, estimate_g, estimate_h,
                         estimate_wang, var_c_hat_excess)
from .mechanisms import (DirectEncoding, ParameterError, PrivacyParams,
                         PureProtocolParams, de_probabilities, perturb,
                         perturb_array, pure_params, supports)
from .metrics import (CLIP_RENORMALIZE, RAW_HALFSUM, TV_MODES, TrialSummary,
                      communication_cost, run_trials, tv_distance)
from .oracle import (ExactMoments, InstanceSizeError, exact_moments,
                     exact_var_ordering)
from .sampling import (Dataset, PerNodePlan, RoundOutcome, SamplingPlan,
                       UniformPlan, balanced_pis, expected_reports, run_round,
                       sample_nodes)
from .synthdata import (DatasetSpec, generate, read_dataset, true_frequencies,
                        write_dataset)

__version__ = "0.1.0"

__all__ = [
    "CLIP_RENORMALIZE",
    "Dataset",
    "DatasetSpec",
    "DirectEncoding",
    "ESTIMATOR_IDS",
    "EstimateVector",
    "ExactMoments",
    "FrequencyTable",
    "InstanceSizeError",
    "ParameterError",
    "PerNodePlan",
    "PrivacyParams",
    "PureProtocolParams",
    "RAW_HALFSUM",
    "RoundOutcome",
    "SamplingPlan",
    "SupportCounts",
    "TV_MODES",
    "TrialSummary",
    "UniformPlan",
    "apply_estimator",
    "approx_norm_var_g",
    "approx_var_T",
    "approx_var_c",
    "approx_var_g",
    "balanced_pis",
    "biased_mean_under_sampling",
    "communication_cost",
    "count_supports",
    "de_probabilities",
    "estimate_T",
    "estimate_c_hat",
    "estimate_g",
    "estimate_h",
    "estimate_wang",
    "exact_moments",
    "exact_var_ordering",
    "expected_reports",
    "generate",
    "perturb",
    "perturb_array",
    "pure_params",
    "read_dataset",
    "run_round",
    "run_trials",
    "sample_nodes",
    "supports",
    "true_frequencies",
    "tv_distance",
    "var_c_hat_excess",
    "write_dataset",
]
