"""Comparison metrics: TV distance, Monte-Carlo trial summaries, cost.

``run_trials`` is the experiment harness: it repeats independent rounds,
applies one estimator and accumulates per-value means and unbiased
(divide-by-T-1) variances. Per-trial seeds are spawned deterministically
from the master seed, so results are reproducible and order-independent;
trials could run in parallel without changing the outcome.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .estimators import (EstimateVector, FrequencyTable, apply_estimator,
                         count_supports)
from .mechanisms import DirectEncoding, ParameterError, pure_params
from .sampling import (Dataset, RoundOutcome, SamplingPlan, expected_reports,
                       plan_summary, run_round)
from .synthdata import true_frequencies

CLIP_RENORMALIZE = "clip_renormalize"
RAW_HALFSUM = "raw_halfsum"
TV_MODES = (CLIP_RENORMALIZE, RAW_HALFSUM)


@dataclass(frozen=True)
class TrialSummary:
    """Per-value mean/variance of an estimator across T independent trials.

    variances is None when T < 2. tv_values is populated only when a TV
    mode was requested.
    """

    means: np.ndarray
    variances: np.ndarray | None
    trials: int
    estimator_id: str
    plan: str
    sampled_counts: np.ndarray
    tv_values: np.ndarray | None = None

    def __post_init__(self):
        if self.variances is not None and self.variances.min() < 0:
            raise ParameterError("variances cannot be negative")

    @property
    def tv_mean(self) -> float | None:
        if self.tv_values is None:
            return None
        return float(self.tv_values.mean())

    @property
    def mean_sampled(self) -> float:
        return float(self.sampled_counts.mean())


def tv_distance(f_true: FrequencyTable, estimate: EstimateVector,
                mode: str = CLIP_RENORMALIZE) -> float:
    """Total variation distance between the true fractions and an estimate.

    clip_renormalize: clip negative estimate entries to 0, normalize to a
    probability vector (uniform fallback if everything clips to 0), then
    return the half L1 distance; always in [0, 1].
    raw_halfsum: half L1 between estimates / n and the true fractions
    without post-processing; may exceed 1.
    """
    est = estimate.estimates
    f = f_true.fractions
    if len(est) != len(f):
        raise ParameterError(
            f"domain mismatch: estimate has {len(est)} values, truth {len(f)}"
        )
    if mode == CLIP_RENORMALIZE:
        clipped = np.clip(est, 0.0, None)
        total = clipped.sum()
        if total <= 0:
            fractions = np.full(len(est), 1.0 / len(est))
        else:
            fractions = clipped / total
        return float(0.5 * np.abs(fractions - f).sum())
    if mode == RAW_HALFSUM:
        return float(0.5 * np.abs(est / f_true.n - f).sum())
    raise ParameterError(f"unknown TV mode {mode!r}; expected one of {TV_MODES}")


def run_trials(data: Dataset, mech: DirectEncoding, plan: SamplingPlan,
               estimator_id: str, trials: int,
               seed: int | np.random.SeedSequence,
               tv_mode: str | None = None) -> TrialSummary:
    """Run T independent rounds and summarize one estimator across them."""
    if trials < 1:
        raise ParameterError("need at least one trial")
    if tv_mode is not None and tv_mode not in TV_MODES:
        raise ParameterError(f"unknown TV mode {tv_mode!r}")
    proto = pure_params(mech)
    f_true = true_frequencies(data)
    d = data.domain_size

    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    estimates = np.empty((trials, d))
    sampled = np.empty(trials, dtype=np.int64)
    tvs = np.empty(trials) if tv_mode is not None else None
    for t, child in enumerate(seed.spawn(trials)):
        rng = np.random.default_rng(child)
        outcome = run_round(data, mech, plan, rng)
        counts = count_supports(outcome, d)
        est = apply_estimator(counts, proto, estimator_id, plan)
        estimates[t] = est.estimates
        sampled[t] = counts.sampled_count
        if tvs is not None:
            tvs[t] = tv_distance(f_true, est, tv_mode)

    variances = estimates.var(axis=0, ddof=1) if trials >= 2 else None
    return TrialSummary(means=estimates.mean(axis=0), variances=variances,
                        trials=trials, estimator_id=estimator_id,
                        plan=plan_summary(plan), sampled_counts=sampled,
                        tv_values=tvs)


def communication_cost(outcome_or_plan: RoundOutcome | SamplingPlan,
                       n: int | None = None) -> float:
    """Reports sent: realized S for an outcome, expected sum(pis) for a plan."""
    if isinstance(outcome_or_plan, RoundOutcome):
        return float(outcome_or_plan.sampled_count)
    if n is None:
        raise ParameterError("expected cost of a plan needs n")
    return expected_reports(outcome_or_plan, n)


def summary_csv_rows(summary: TrialSummary, f_true: FrequencyTable,
                     pi_label: str, epsilon: float) -> list[list]:
    """Per-value rows in the export schema
    value_index,true_count,mean_estimate,variance,estimator,pi,epsilon,T."""
    rows = []
    for i in range(len(summary.means)):
        variance = "" if summary.variances is None else repr(float(summary.variances[i]))
        rows.append([i, repr(float(f_true.fractions[i] * f_true.n)),
                     repr(float(summary.means[i])), variance,
                     summary.estimator_id, pi_label, repr(float(epsilon)),
                     summary.trials])
    return rows
