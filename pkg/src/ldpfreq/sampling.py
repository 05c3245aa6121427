"""Round simulation: which nodes report, and what they report.

A round samples each node independently (uniform probability or one
probability per node), then pushes the sampled nodes' true values through
the direct-encoding randomizer. Sampling and privatization consume separate
draws from the same generator, so they are independent by construction.
Rounds are i.i.d.: every call to ``run_round`` uses fresh randomness.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mechanisms import DirectEncoding, ParameterError, perturb_array


@dataclass(frozen=True)
class UniformPlan:
    """Every node reports independently with the same probability pi.

    pi = 0 is rejected: the debiased estimators divide by pi.
    """

    pi: float

    def __post_init__(self):
        if not 0 < self.pi <= 1:
            raise ParameterError(f"pi must be in (0, 1], got {self.pi}")


@dataclass(frozen=True)
class PerNodePlan:
    """Node j reports independently with its own probability pis[j].

    Individual zeros are fine (those nodes never report) but the sum must be
    positive because the generalized estimator divides by sum(pis).
    """

    pis: np.ndarray

    def __post_init__(self):
        pis = np.asarray(self.pis, dtype=float)
        object.__setattr__(self, "pis", pis)
        if pis.ndim != 1 or pis.size == 0:
            raise ParameterError("pis must be a non-empty 1-d vector")
        if pis.min() < 0 or pis.max() > 1:
            raise ParameterError("each per-node probability must be in [0, 1]")
        if pis.sum() <= 0:
            raise ParameterError("sum of per-node probabilities must be > 0")


SamplingPlan = UniformPlan | PerNodePlan


@dataclass(frozen=True)
class Dataset:
    """True values held by the n nodes, as indices into [0, domain_size)."""

    values: np.ndarray
    domain_size: int

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.int64)
        object.__setattr__(self, "values", values)
        if values.ndim != 1 or values.size == 0:
            raise ParameterError("dataset must hold at least one value")
        if values.min() < 0 or values.max() >= self.domain_size:
            raise ParameterError(
                f"dataset values must lie in [0, {self.domain_size})"
            )

    @property
    def n(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class RoundOutcome:
    """Reports received in one round: who reported and the noisy values."""

    node_indices: np.ndarray
    values: np.ndarray
    n: int
    plan_used: SamplingPlan

    def __post_init__(self):
        if len(self.node_indices) != len(self.values):
            raise ParameterError("node_indices and values must align")
        if len(self.node_indices) > self.n:
            raise ParameterError("more reports than nodes")
        if len(self.node_indices) > 1 and np.any(np.diff(self.node_indices) <= 0):
            raise ParameterError("node indices must be strictly increasing")

    @property
    def sampled_count(self) -> int:
        return len(self.values)


def node_probabilities(plan: SamplingPlan, n: int) -> np.ndarray:
    """Per-node report probabilities as a length-n vector."""
    if isinstance(plan, UniformPlan):
        return np.full(n, plan.pi)
    if len(plan.pis) != n:
        raise ParameterError(
            f"plan has {len(plan.pis)} probabilities but n = {n}"
        )
    return plan.pis


def plan_summary(plan: SamplingPlan) -> str:
    if isinstance(plan, UniformPlan):
        return f"uniform(pi={plan.pi:g})"
    return f"per-node(n={len(plan.pis)}, sum={plan.pis.sum():g})"


def sample_nodes(plan: SamplingPlan, n: int,
                 rng: np.random.Generator) -> np.ndarray:
    """Indices of the nodes reporting this round, strictly increasing."""
    pis = node_probabilities(plan, n)
    return np.flatnonzero(rng.random(n) < pis)


def run_round(data: Dataset, mech: DirectEncoding, plan: SamplingPlan,
              rng: np.random.Generator) -> RoundOutcome:
    """Simulate one reporting round over the dataset.

    Sampled nodes' true values each pass through the randomizer; unsampled
    nodes contribute nothing. Consumes n draws for sampling followed by one
    draw per sampled node for privatization.
    """
    if mech.domain_size != data.domain_size:
        raise ParameterError(
            f"mechanism domain {mech.domain_size} != dataset domain "
            f"{data.domain_size}"
        )
    sampled = sample_nodes(plan, data.n, rng)
    noisy = perturb_array(mech, data.values[sampled], rng)
    return RoundOutcome(node_indices=sampled, values=noisy, n=data.n,
                        plan_used=plan)


def expected_reports(plan: SamplingPlan, n: int) -> float:
    """Expected number of reports per round: n*pi, or sum of the pis."""
    if isinstance(plan, UniformPlan):
        return n * plan.pi
    return float(node_probabilities(plan, n).sum())


def balanced_pis(values: np.ndarray, lo: float, hi: float) -> np.ndarray:
    """Per-node probabilities whose class means all equal (lo + hi) / 2.

    Within each value class, members alternate lo / hi, with the midpoint
    assigned to the odd one out. Keeping every class mean equal to the
    overall mean makes the generalized estimator exactly unbiased
    conditionally on the fixed dataset (with arbitrary per-node
    probabilities it is unbiased only over re-draws of the values).
    Pick lo/hi with an exactly representable midpoint (0.25/0.75,
    0.125/0.875) for enumeration-grade balance.
    """
    values = np.asarray(values)
    pis = np.empty(len(values))
    mid = (lo + hi) / 2
    for v in np.unique(values):
        members = np.flatnonzero(values == v)
        for k, j in enumerate(members):
            if len(members) % 2 == 1 and k == len(members) - 1:
                pis[j] = mid
            else:
                pis[j] = lo if k % 2 == 0 else hi
    return pis
