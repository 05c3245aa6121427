import csv
import io
import math

import numpy as np
import pytest

from ldpfreq import (CLIP_RENORMALIZE, RAW_HALFSUM, Dataset, DirectEncoding,
                     EstimateVector, FrequencyTable, ParameterError,
                     PerNodePlan, PrivacyParams, UniformPlan,
                     communication_cost, run_round, run_trials,
                     true_frequencies, tv_distance)
from ldpfreq.metrics import summary_csv_rows


def estimate_of(values, n):
    return EstimateVector(estimates=np.asarray(values, dtype=float),
                          estimator_id="g", params_echo={"n": n})


def table_of(fractions, n):
    return FrequencyTable(fractions=np.asarray(fractions, dtype=float), n=n)


class TestTvDistance:
    def test_perfect_estimate_is_zero(self):
        f = table_of([0.25, 0.25, 0.5], 100)
        est = estimate_of([25, 25, 50], 100)
        assert tv_distance(f, est, CLIP_RENORMALIZE) == pytest.approx(0.0)
        assert tv_distance(f, est, RAW_HALFSUM) == pytest.approx(0.0)

    def test_disjoint_support(self):
        f = table_of([1.0, 0.0], 10)
        est = estimate_of([-3, 7], 10)  # clips and normalizes to [0, 1]
        assert tv_distance(f, est, CLIP_RENORMALIZE) == pytest.approx(1.0)

    def test_all_clipped_falls_back_to_uniform(self):
        f = table_of([1.0, 0.0], 10)
        est = estimate_of([-3, -7], 10)
        assert tv_distance(f, est, CLIP_RENORMALIZE) == pytest.approx(0.5)

    def test_raw_mode_can_exceed_one(self):
        f = table_of([1.0, 0.0], 10)
        est = estimate_of([-30, 40], 10)
        assert tv_distance(f, est, RAW_HALFSUM) == pytest.approx(4.0)

    def test_clip_mode_in_unit_interval(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            d = int(rng.integers(2, 8))
            f = rng.dirichlet(np.ones(d))
            est = estimate_of(rng.normal(0, 50, d), 100)
            tv = tv_distance(table_of(f, 100), est, CLIP_RENORMALIZE)
            assert 0.0 <= tv <= 1.0

    def test_clip_mode_against_brute_force(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            d = int(rng.integers(2, 8))
            f = rng.dirichlet(np.ones(d))
            raw = rng.normal(0, 30, d)
            got = tv_distance(table_of(f, 50), estimate_of(raw, 50),
                              CLIP_RENORMALIZE)
            # independent recomputation
            clipped = [max(x, 0.0) for x in raw]
            total = sum(clipped)
            if total > 0:
                frac = [x / total for x in clipped]
            else:
                frac = [1.0 / d] * d
            expected = 0.5 * sum(abs(a - b) for a, b in zip(frac, f))
            assert got == pytest.approx(expected, rel=1e-12, abs=1e-12)

    def test_symmetric_between_distributions(self):
        # once both sides are post-processed distributions, the half-L1
        # metric is symmetric in its arguments
        rng = np.random.default_rng(2)
        n = 40
        for _ in range(20):
            d = int(rng.integers(2, 6))
            f1, f2 = rng.dirichlet(np.ones(d)), rng.dirichlet(np.ones(d))
            forward = tv_distance(table_of(f1, n), estimate_of(f2 * n, n),
                                  CLIP_RENORMALIZE)
            backward = tv_distance(table_of(f2, n), estimate_of(f1 * n, n),
                                   CLIP_RENORMALIZE)
            assert forward == pytest.approx(backward, abs=1e-12)

    def test_size_mismatch_rejected(self):
        with pytest.raises(ParameterError):
            tv_distance(table_of([0.5, 0.5], 10), estimate_of([1, 2, 3], 10))

    def test_unknown_mode_rejected(self):
        with pytest.raises(ParameterError):
            tv_distance(table_of([0.5, 0.5], 10), estimate_of([1, 2], 10),
                        "other")


def small_world(seed=2, n=400, d=4, epsilon=1.0):
    rng = np.random.default_rng(seed)
    data = Dataset(values=rng.integers(0, d, n), domain_size=d)
    mech = DirectEncoding(PrivacyParams(epsilon=epsilon, domain_size=d))
    return data, mech


class TestRunTrials:
    def test_single_trial_has_no_variance(self):
        data, mech = small_world()
        summary = run_trials(data, mech, UniformPlan(0.5), "g", 1, seed=0)
        assert summary.variances is None
        assert summary.trials == 1

    def test_near_noiseless_regime(self):
        # pi = 1, eps = 20, d = 2: mean of g within 0.01 n of n f_i
        rng = np.random.default_rng(3)
        data = Dataset(values=rng.integers(0, 2, 2000), domain_size=2)
        mech = DirectEncoding(PrivacyParams(epsilon=20.0, domain_size=2))
        summary = run_trials(data, mech, UniformPlan(1.0), "g", 100, seed=4)
        target = true_frequencies(data).fractions * data.n
        assert np.all(np.abs(summary.means - target) <= 0.01 * data.n)

    def test_unbiasedness_band(self):
        data, mech = small_world()
        trials = 2000
        summary = run_trials(data, mech, UniformPlan(0.3), "g", trials, seed=5)
        target = true_frequencies(data).fractions * data.n
        band = 4 * np.sqrt(summary.variances / trials)
        assert np.all(np.abs(summary.means - target) <= band)

    def test_reproducible_under_seed(self):
        data, mech = small_world()
        a = run_trials(data, mech, UniformPlan(0.5), "c_hat", 50, seed=6,
                       tv_mode=CLIP_RENORMALIZE)
        b = run_trials(data, mech, UniformPlan(0.5), "c_hat", 50, seed=6,
                       tv_mode=CLIP_RENORMALIZE)
        assert np.array_equal(a.means, b.means)
        assert np.array_equal(a.tv_values, b.tv_values)
        assert np.array_equal(a.sampled_counts, b.sampled_counts)

    def test_matches_streaming_recomputation(self):
        # one-pass (Welford) recomputation of the per-trial estimates must
        # agree with the stored two-pass mean/variance
        data, mech = small_world()
        plan = UniformPlan(0.4)
        trials = 300
        summary = run_trials(data, mech, plan, "g", trials, seed=7)

        from ldpfreq import apply_estimator, count_supports, pure_params
        proto = pure_params(mech)
        mean = np.zeros(data.domain_size)
        m2 = np.zeros(data.domain_size)
        for t, child in enumerate(np.random.SeedSequence(7).spawn(trials)):
            rng = np.random.default_rng(child)
            outcome = run_round(data, mech, plan, rng)
            est = apply_estimator(count_supports(outcome, data.domain_size),
                                  proto, "g", plan).estimates
            delta = est - mean
            mean += delta / (t + 1)
            m2 += delta * (est - mean)
        var = m2 / (trials - 1)
        assert np.allclose(summary.means, mean, rtol=1e-9)
        assert np.allclose(summary.variances, var, rtol=1e-9)

    def test_invalid_estimator_rejected(self):
        data, mech = small_world()
        with pytest.raises(ParameterError):
            run_trials(data, mech, UniformPlan(0.5), "median", 5, seed=0)

    def test_per_node_plan_with_uniform_only_estimator_rejected(self):
        data, mech = small_world()
        plan = PerNodePlan(pis=np.full(data.n, 0.5))
        with pytest.raises(ParameterError):
            run_trials(data, mech, plan, "g", 5, seed=0)


class TestCommunicationCost:
    def test_expected_for_uniform_plan(self):
        assert communication_cost(UniformPlan(0.1), n=50_000) == 5000.0

    def test_expected_for_all_ones(self):
        assert communication_cost(PerNodePlan(np.ones(123)), n=123) == 123.0

    def test_realized_for_outcome(self):
        data, mech = small_world()
        outcome = run_round(data, mech, UniformPlan(0.5),
                            np.random.default_rng(0))
        assert communication_cost(outcome) == outcome.sampled_count

    def test_plan_requires_n(self):
        with pytest.raises(ParameterError):
            communication_cost(UniformPlan(0.5))

    def test_realized_mean_matches_expected(self):
        data, mech = small_world(n=1000)
        pi = 0.35
        summary = run_trials(data, mech, UniformPlan(pi), "c_hat", 2000,
                             seed=8)
        var_s = data.n * pi * (1 - pi)
        band = 4 * math.sqrt(var_s / summary.trials)
        assert summary.mean_sampled == pytest.approx(data.n * pi, abs=band)


class TestSummaryExport:
    def test_schema(self):
        data, mech = small_world(n=100, d=3)
        summary = run_trials(data, mech, UniformPlan(0.5), "g", 10, seed=9)
        f_true = true_frequencies(data)
        rows = summary_csv_rows(summary, f_true, "0.5", 1.0)
        assert len(rows) == 3
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerows(rows)
        parsed = list(csv.reader(io.StringIO(buf.getvalue())))
        for i, row in enumerate(parsed):
            assert int(row[0]) == i
            assert float(row[1]) == pytest.approx(
                f_true.fractions[i] * data.n)
            assert float(row[2]) == pytest.approx(summary.means[i])
            assert float(row[3]) == pytest.approx(summary.variances[i])
            assert row[4] == "g"
            assert row[5] == "0.5"
            assert float(row[6]) == 1.0
            assert int(row[7]) == 10
