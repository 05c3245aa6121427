"""Frequency estimators for direct-encoding reports under node sampling.

Notation used throughout: d is the domain size, n the number of nodes,
S the (random) number of nodes that reported, observed[i] the tally of
reports equal to i, (p, q) the direct-encoding probabilities, pi the
uniform sampling probability and pis the per-node probabilities.

Estimators (all return estimated *counts*, i.e. estimates of n * f_i):

* ``estimate_wang``   (observed[i] - n q) / (p - q); unbiased only without
  sampling. Under sampling its mean is given by
  ``biased_mean_under_sampling``.
* ``estimate_g``      wang / pi + n q (1 - pi) / ((p - q) pi); debiased for
  uniform sampling.
* ``estimate_c_hat``  (observed[i] - S q) / (pi (p - q)); debiased by
  substituting the realized S for n.
* ``estimate_h``      same arithmetic as wang applied to the sampled tally;
  kept as a named intermediate because the generalized estimator is
  defined through it.
* ``estimate_T``      n h / sum(pis) + n q (n - sum(pis)) / (sum(pis) (p - q));
  debiased for per-node sampling probabilities.

Estimates are intentionally not clipped to [0, n]: negative values and
values above n are legal, clipping would destroy unbiasedness. The metrics
module offers clipping as an explicit total-variation mode instead.

All functions are pure; closed-form variance helpers (``approx_var_*``)
evaluate the zero-frequency limit of the estimator variance, which is the
standard comparison metric between frequency estimators.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .mechanisms import ParameterError, PureProtocolParams
from .sampling import RoundOutcome, SamplingPlan, UniformPlan, plan_summary


@dataclass(frozen=True)
class SupportCounts:
    """Per-value observed support tallies for one round.

    For direct encoding the support of a value is the value itself, so
    observed[i] is simply the number of reports equal to i.
    """

    observed: np.ndarray
    sampled_count: int
    n: int

    def __post_init__(self):
        observed = np.asarray(self.observed, dtype=np.int64)
        object.__setattr__(self, "observed", observed)
        if observed.min(initial=0) < 0:
            raise ParameterError("support tallies cannot be negative")
        if int(observed.sum()) != self.sampled_count:
            raise ParameterError("tallies must sum to the sampled count")
        if not 0 <= self.sampled_count <= self.n:
            raise ParameterError("sampled count must lie in [0, n]")


@dataclass(frozen=True)
class EstimateVector:
    """Estimated per-value counts plus an echo of how they were produced.

    Entries may be negative or exceed n; the estimators are unbiased, not
    truncated.
    """

    estimates: np.ndarray
    estimator_id: str
    params_echo: Mapping[str, object]

    def __post_init__(self):
        estimates = np.asarray(self.estimates, dtype=float)
        object.__setattr__(self, "estimates", estimates)
        if not np.all(np.isfinite(estimates)):
            raise ParameterError("estimates must be finite")


@dataclass(frozen=True)
class FrequencyTable:
    """True per-value fractions of a dataset (sum to 1)."""

    fractions: np.ndarray
    n: int

    def __post_init__(self):
        fractions = np.asarray(self.fractions, dtype=float)
        object.__setattr__(self, "fractions", fractions)
        if fractions.min() < 0 or fractions.max() > 1:
            raise ParameterError("fractions must lie in [0, 1]")
        if abs(fractions.sum() - 1.0) > 1e-12:
            raise ParameterError("fractions must sum to 1")


ESTIMATOR_IDS = ("wang", "g", "c_hat", "h", "T")


def count_supports(outcome: RoundOutcome, d: int) -> SupportCounts:
    """Tally the reports of one round into per-value support counts."""
    observed = np.bincount(outcome.values, minlength=d)
    return SupportCounts(observed=observed, sampled_count=outcome.sampled_count,
                         n=outcome.n)


def _echo(proto: PureProtocolParams, n: int, plan: str) -> dict:
    return {"p": proto.p_star, "q": proto.q_star, "plan": plan, "n": n}


def estimate_wang(counts: SupportCounts,
                  proto: PureProtocolParams) -> EstimateVector:
    """Classic pure-protocol estimator: (observed[i] - n q) / (p - q).

    Subtracts n*q (not S*q), which is exactly what makes it biased when
    nodes are sampled.
    """
    p, q = proto.p_star, proto.q_star
    est = (counts.observed - counts.n * q) / (p - q)
    return EstimateVector(est, "wang", _echo(proto, counts.n, "any"))


def estimate_h(counts: SupportCounts,
               proto: PureProtocolParams) -> EstimateVector:
    """Sampled-tally version of ``estimate_wang`` (identical arithmetic).

    Exposed separately because the generalized estimator ``estimate_T`` is
    defined through it.
    """
    p, q = proto.p_star, proto.q_star
    est = (counts.observed - counts.n * q) / (p - q)
    return EstimateVector(est, "h", _echo(proto, counts.n, "any"))


def estimate_g(counts: SupportCounts, proto: PureProtocolParams,
               pi: float) -> EstimateVector:
    """Debiased estimator for uniform sampling probability pi.

    g(i) = wang(i) / pi + n q (1 - pi) / ((p - q) pi), which is unbiased
    for the true count n * f_i.
    """
    if not 0 < pi <= 1:
        raise ParameterError(f"pi must be in (0, 1], got {pi}")
    p, q = proto.p_star, proto.q_star
    wang = (counts.observed - counts.n * q) / (p - q)
    est = wang / pi + counts.n * q * (1 - pi) / ((p - q) * pi)
    return EstimateVector(est, "g", _echo(proto, counts.n, f"uniform(pi={pi:g})"))


def estimate_c_hat(counts: SupportCounts, proto: PureProtocolParams,
                   pi: float) -> EstimateVector:
    """Debiased estimator using the realized report count S.

    c_hat(i) = (observed[i] - S q) / (pi (p - q)); unbiased for n * f_i.
    """
    if not 0 < pi <= 1:
        raise ParameterError(f"pi must be in (0, 1], got {pi}")
    p, q = proto.p_star, proto.q_star
    est = (counts.observed - counts.sampled_count * q) / (pi * (p - q))
    return EstimateVector(est, "c_hat",
                          _echo(proto, counts.n, f"uniform(pi={pi:g})"))


def estimate_T(counts: SupportCounts, proto: PureProtocolParams,
               pis: np.ndarray) -> EstimateVector:
    """Debiased estimator for per-node sampling probabilities.

    T(i) = n h(i) / sum(pis) + n q (n - sum(pis)) / (sum(pis) (p - q)).
    Reduces per-realization to ``estimate_g`` when all pis are equal, and
    to ``estimate_wang`` when all pis are 1.
    """
    pis = np.asarray(pis, dtype=float)
    if len(pis) != counts.n:
        raise ParameterError(
            f"got {len(pis)} probabilities for n = {counts.n} nodes"
        )
    total = pis.sum()
    if total <= 0:
        raise ParameterError("sum of per-node probabilities must be > 0")
    p, q = proto.p_star, proto.q_star
    n = counts.n
    h = (counts.observed - n * q) / (p - q)
    est = n * h / total + n * q * (n - total) / (total * (p - q))
    return EstimateVector(est, "T",
                          _echo(proto, n, f"per-node(sum={total:g})"))


def apply_estimator(counts: SupportCounts, proto: PureProtocolParams,
                    estimator_id: str, plan: SamplingPlan) -> EstimateVector:
    """Dispatch an estimator by id, pulling pi / pis from the plan."""
    if estimator_id == "wang":
        return estimate_wang(counts, proto)
    if estimator_id == "h":
        return estimate_h(counts, proto)
    if estimator_id in ("g", "c_hat"):
        if not isinstance(plan, UniformPlan):
            raise ParameterError(
                f"estimator {estimator_id!r} needs a uniform sampling plan, "
                f"got {plan_summary(plan)}"
            )
        fn = estimate_g if estimator_id == "g" else estimate_c_hat
        return fn(counts, proto, plan.pi)
    if estimator_id == "T":
        if isinstance(plan, UniformPlan):
            pis = np.full(counts.n, plan.pi)
        else:
            pis = plan.pis
        return estimate_T(counts, proto, pis)
    raise ParameterError(
        f"unknown estimator {estimator_id!r}; expected one of {ESTIMATOR_IDS}"
    )


def biased_mean_under_sampling(f_i: float, n: int, pi: float, p: float,
                               q: float) -> float:
    """Exact mean of ``estimate_wang`` under uniform sampling.

    n f_i pi - n q (1 - pi) / (p - q). At pi = 1 this recovers the
    unbiased value n f_i; as pi -> 0 it tends to -n q / (p - q)
    regardless of f_i.
    """
    return n * f_i * pi - n * q * (1 - pi) / (p - q)


def approx_var_c(n: int, pi: float, p: float, q: float) -> float:
    """Zero-frequency variance of ``estimate_wang`` under uniform sampling:
    n pi (q - q^2 pi) / (p - q)^2."""
    return n * pi * (q - q * q * pi) / (p - q) ** 2


def approx_var_g(n: int, pi: float, p: float, q: float) -> float:
    """Zero-frequency variance of ``estimate_g``: approx_var_c / pi^2
    = n (q - q^2 pi) / ((p - q)^2 pi)."""
    return n * (q - q * q * pi) / ((p - q) ** 2 * pi)


def approx_norm_var_g(n: int, pi: float, p: float, q: float) -> float:
    """Zero-frequency variance of g scaled by the expected report count,
    Var(g / (n pi)): (q - q^2 pi) / ((p - q)^2 pi^3 n). Blows up like
    1 / (pi^3 n) for small pi."""
    return (q - q * q * pi) / ((p - q) ** 2 * pi**3 * n)


def approx_var_T(n: int, pis: np.ndarray, p: float, q: float) -> float:
    """Zero-frequency variance of ``estimate_T``:
    n^2 sum_j q pi_j (1 - q pi_j) / ((sum_j pi_j)^2 (p - q)^2)."""
    pis = np.asarray(pis, dtype=float)
    total = pis.sum()
    if total <= 0:
        raise ParameterError("sum of per-node probabilities must be > 0")
    return float(n * n * np.sum(q * pis * (1 - q * pis))
                 / (total**2 * (p - q) ** 2))


def var_c_hat_excess(n: int, pi: float, p: float, q: float) -> float:
    """The Var(S) q^2 / (pi^2 (p - q)^2) term relating Var(c_hat) and
    Var(g), with Var(S) = n pi (1 - pi).

    Note: the exact zero-frequency relation is
    Var(g) - Var(c_hat) = this term (c_hat is the lower-variance one);
    see the oracle tests for the enumeration-exact identity.
    """
    var_s = n * pi * (1 - pi)
    return var_s * q * q / (pi * pi * (p - q) ** 2)
