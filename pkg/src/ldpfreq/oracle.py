"""Exact small-instance ground truth by exhaustive enumeration.

Each node contributes d + 1 atomic outcomes: unsampled, or sampled and
reporting one of the d values, with probabilities (1 - pi_j) and
pi_j * P[report = v | true value]. Enumerating the product of the per-node
atoms as a mixed-radix counter gives the exact joint law of every round,
from which exact expectations and variances of any estimator follow with
no Monte-Carlo noise. Probabilities are accumulated with compensated
(Kahan) summation so the total-mass check is meaningful at 1e-12.

Deliberately brute force: the enumeration never touches the simulation
path (sample_nodes / run_round), so it is an independent check of it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .estimators import SupportCounts, apply_estimator
from .mechanisms import DirectEncoding, ParameterError, pure_params
from .sampling import Dataset, SamplingPlan, node_probabilities

MAX_ATOMS = 10**7


class InstanceSizeError(ParameterError):
    """Raised when (d + 1)^n exceeds the enumeration budget."""


@dataclass(frozen=True)
class ExactMoments:
    """Exact per-value E[estimate] and Var[estimate] over all outcomes."""

    means: np.ndarray
    variances: np.ndarray
    enumeration_size: int
    total_mass: float


class _KahanAccumulator:
    """Compensated vector summation; exact enough for 1e-12 mass checks."""

    def __init__(self, size: int):
        self.total = np.zeros(size)
        self._comp = np.zeros(size)

    def add(self, term: np.ndarray) -> None:
        y = term - self._comp
        t = self.total + y
        self._comp = (t - self.total) - y
        self.total = t


def _atom_tables(data: Dataset, mech: DirectEncoding,
                 plan: SamplingPlan) -> tuple[np.ndarray, int]:
    """Per-node atom probabilities, shape (n, d + 1); column 0 = unsampled."""
    if mech.domain_size != data.domain_size:
        raise ParameterError("mechanism and dataset domain sizes differ")
    pis = node_probabilities(plan, data.n)
    kernel = mech.kernel()
    d = data.domain_size
    atoms = np.empty((data.n, d + 1))
    atoms[:, 0] = 1.0 - pis
    atoms[:, 1:] = pis[:, None] * kernel[data.values]
    return atoms, d


def enumeration_size(data: Dataset) -> int:
    return (data.domain_size + 1) ** data.n


def _check_size(data: Dataset) -> int:
    size = enumeration_size(data)
    if size > MAX_ATOMS:
        raise InstanceSizeError(
            f"(d+1)^n = {size} atoms exceeds the {MAX_ATOMS} budget"
        )
    return size


def exact_moments(data: Dataset, mech: DirectEncoding, plan: SamplingPlan,
                  estimator_id: str) -> ExactMoments:
    """Exact first and second moments of an estimator on a small instance."""
    size = _check_size(data)
    atoms, d = _atom_tables(data, mech, plan)
    proto = pure_params(mech)
    n = data.n

    mass = _KahanAccumulator(1)
    first = _KahanAccumulator(d)
    second = _KahanAccumulator(d)

    digits = np.zeros(n, dtype=np.int64)  # mixed-radix counter, base d + 1
    observed = np.zeros(d, dtype=np.int64)  # running tally for digits
    prob_terms = atoms[np.arange(n), 0].copy()
    for _ in range(size):
        prob = prob_terms.prod()
        sampled = int(np.count_nonzero(digits))
        counts = SupportCounts(observed=observed.copy(), sampled_count=sampled,
                               n=n)
        est = apply_estimator(counts, proto, estimator_id, plan).estimates
        mass.add(np.array([prob]))
        first.add(prob * est)
        second.add(prob * est * est)

        # increment the counter, keeping tally and probability terms in step
        for j in range(n):
            if digits[j] > 0:
                observed[digits[j] - 1] -= 1
            digits[j] += 1
            if digits[j] <= d:
                observed[digits[j] - 1] += 1
                prob_terms[j] = atoms[j, digits[j]]
                break
            digits[j] = 0
            prob_terms[j] = atoms[j, 0]

    means = first.total
    variances = second.total - means * means
    return ExactMoments(means=means, variances=variances,
                        enumeration_size=size,
                        total_mass=float(mass.total[0]))


def exact_var_ordering(data: Dataset, mech: DirectEncoding,
                       plan_uniform: SamplingPlan) -> tuple[np.ndarray, np.ndarray]:
    """Exact per-value variances of the two debiased estimators (g, c_hat)."""
    var_g = exact_moments(data, mech, plan_uniform, "g").variances
    var_c_hat = exact_moments(data, mech, plan_uniform, "c_hat").variances
    return var_g, var_c_hat
