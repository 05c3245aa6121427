"""Direct-encoding (k-ary randomized response) local randomizer.

Domain elements are canonical integer indices 0..d-1; mapping application
labels to indices is the caller's concern. A report keeps the true value
with probability p and emits each specific other value with probability q,
where p = e^eps * c, q = c and c = 1 / (e^eps + d - 1).

All types are immutable after construction. ``perturb`` is pure given an
explicit ``numpy.random.Generator``, so concurrent workers are safe as long
as each owns an independently seeded generator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


class ParameterError(ValueError):
    """Raised when a mechanism, plan or config parameter is invalid."""


@dataclass(frozen=True)
class PrivacyParams:
    """Privacy budget (nats) and discrete domain size.

    epsilon = 0 is rejected: it makes p = q and every estimator divides
    by p - q.
    """

    epsilon: float
    domain_size: int

    def __post_init__(self):
        if not math.isfinite(self.epsilon) or self.epsilon <= 0:
            raise ParameterError(f"epsilon must be > 0, got {self.epsilon}")
        if self.domain_size < 2:
            raise ParameterError(
                f"domain_size must be >= 2, got {self.domain_size}"
            )


@dataclass(frozen=True)
class PureProtocolParams:
    """The (p*, q*) pair characterizing a pure local protocol, p* > q*."""

    p_star: float
    q_star: float

    def __post_init__(self):
        if not self.p_star > self.q_star:
            raise ParameterError(
                f"pure protocol requires p* > q*, got ({self.p_star}, {self.q_star})"
            )


def de_probabilities(params: PrivacyParams) -> tuple[float, float]:
    """Per-report probabilities (p, q) of direct encoding.

    p is the probability of reporting the true value, q the probability of
    reporting any one specific other value; p + (d - 1) q = 1 and
    p / q = e^epsilon.
    """
    c = 1.0 / (math.exp(params.epsilon) + params.domain_size - 1)
    return math.exp(params.epsilon) * c, c


@dataclass(frozen=True)
class DirectEncoding:
    """Direct-encoding randomizer over indices 0..d-1 with derived (p, q)."""

    params: PrivacyParams
    p: float = field(init=False)
    q: float = field(init=False)

    def __post_init__(self):
        p, q = de_probabilities(self.params)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @property
    def domain_size(self) -> int:
        return self.params.domain_size

    def kernel(self) -> np.ndarray:
        """Full d x d perturbation matrix, K[x, y] = P[output = y | input = x]."""
        d = self.domain_size
        k = np.full((d, d), self.q)
        np.fill_diagonal(k, self.p)
        return k


def perturb(mech: DirectEncoding, true_value: int,
            rng: np.random.Generator) -> int:
    """Randomize one value, consuming exactly one uniform draw.

    Inverse-CDF on a single uniform: the true value occupies [0, p), the
    remaining mass is split evenly over the d - 1 other values in index
    order. Deterministic given a seeded generator.
    """
    d = mech.domain_size
    if not 0 <= true_value < d:
        raise ParameterError(f"value {true_value} outside domain [0, {d})")
    u = rng.random()
    if u < mech.p:
        return true_value
    other = min(int((u - mech.p) / mech.q), d - 2)
    return other if other < true_value else other + 1


def perturb_array(mech: DirectEncoding, true_values: np.ndarray,
                  rng: np.random.Generator) -> np.ndarray:
    """Vectorized ``perturb``: one uniform per input, same inverse-CDF map."""
    d = mech.domain_size
    values = np.asarray(true_values)
    if values.size and (values.min() < 0 or values.max() >= d):
        raise ParameterError(f"values outside domain [0, {d})")
    u = rng.random(values.shape)
    keep = u < mech.p
    other = np.minimum(((u - mech.p) / mech.q).astype(np.int64), d - 2)
    return np.where(keep, values, other + (other >= values))


def supports(output: int, input_value: int) -> bool:
    """Whether an observed report supports an input; singleton for DE."""
    return output == input_value


def pure_params(mech: DirectEncoding) -> PureProtocolParams:
    """The mechanism's pure-protocol pair: (p* , q*) = (p, q)."""
    return PureProtocolParams(p_star=mech.p, q_star=mech.q)
