"""Synthetic dataset generation and (de)serialization.

Two generator kinds: a single binomial, and a two-component binomial blend.
The blend defaults to an equal-weight mixture (which is what produces a
bimodal histogram); a sum-of-draws reading is available behind the
``combine`` flag for comparison.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .estimators import FrequencyTable
from .mechanisms import ParameterError
from .sampling import Dataset

BINOMIAL = "binomial"
BIMODAL = "bimodal_mixture"


@dataclass(frozen=True)
class DatasetSpec:
    """Parameters of a synthetic dataset draw.

    kind "binomial": n_points draws of Binomial(trials, prob).
    kind "bimodal_mixture": with probability ``weight`` a draw of
    Binomial(trials, prob), otherwise Binomial(trials2, prob2); set
    combine="sum" to instead add one draw of each component.
    """

    kind: str
    n_points: int
    domain_size: int
    seed: int
    trials: int = 100
    prob: float = 0.5
    trials2: int = 50
    prob2: float = 0.4
    weight: float = 0.5
    combine: str = "mixture"

    def __post_init__(self):
        if self.kind not in (BINOMIAL, BIMODAL):
            raise ParameterError(f"unknown dataset kind {self.kind!r}")
        if self.n_points < 1:
            raise ParameterError("n_points must be >= 1")
        if self.domain_size < 2:
            raise ParameterError("domain_size must be >= 2")
        for prob in (self.prob, self.prob2):
            if not 0 <= prob <= 1:
                raise ParameterError(f"binomial prob must be in [0, 1], got {prob}")
        if not 0 <= self.weight <= 1:
            raise ParameterError(f"mixture weight must be in [0, 1], got {self.weight}")
        if self.combine not in ("mixture", "sum"):
            raise ParameterError(f"combine must be 'mixture' or 'sum', got {self.combine!r}")
        # reject supports that would overflow the domain
        if self.kind == BINOMIAL:
            top = self.trials
        elif self.combine == "sum":
            top = self.trials + self.trials2
        else:
            top = max(self.trials, self.trials2)
        if top >= self.domain_size:
            raise ParameterError(
                f"support 0..{top} does not fit in domain of size {self.domain_size}"
            )


def generate(spec: DatasetSpec,
             rng: np.random.Generator | None = None) -> Dataset:
    """Draw the dataset described by the spec; reproducible under spec.seed.

    An explicit generator overrides the spec seed (useful for stream tests).
    """
    if rng is None:
        rng = np.random.default_rng(spec.seed)
    n = spec.n_points
    if spec.kind == BINOMIAL:
        values = rng.binomial(spec.trials, spec.prob, size=n)
    elif spec.combine == "sum":
        values = (rng.binomial(spec.trials, spec.prob, size=n)
                  + rng.binomial(spec.trials2, spec.prob2, size=n))
    else:
        # component draws first so that weight = 1 reproduces the pure
        # binomial stream exactly
        first = rng.binomial(spec.trials, spec.prob, size=n)
        second = rng.binomial(spec.trials2, spec.prob2, size=n)
        take_first = rng.random(n) < spec.weight
        values = np.where(take_first, first, second)
    return Dataset(values=values, domain_size=spec.domain_size)


def true_frequencies(data: Dataset) -> FrequencyTable:
    """Per-value fractions f_i = count(i) / n."""
    counts = np.bincount(data.values, minlength=data.domain_size)
    return FrequencyTable(fractions=counts / data.n, n=data.n)


def dataset_to_text(data: Dataset) -> str:
    """One value per line."""
    return "\n".join(str(v) for v in data.values) + "\n"


def dataset_to_csv(data: Dataset) -> str:
    """CSV with header node_index,value."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["node_index", "value"])
    for j, v in enumerate(data.values):
        writer.writerow([j, int(v)])
    return buf.getvalue()


def write_dataset(data: Dataset, path: str | Path, fmt: str = "txt") -> None:
    path = Path(path)
    if fmt == "txt":
        path.write_text(dataset_to_text(data))
    elif fmt == "csv":
        path.write_text(dataset_to_csv(data))
    else:
        raise ParameterError(f"unknown dataset format {fmt!r}")


def read_dataset(path: str | Path, domain_size: int) -> Dataset:
    """Load a dataset written by ``write_dataset`` (either format)."""
    lines = Path(path).read_text().splitlines()
    if lines and lines[0].strip() == "node_index,value":
        values = [int(line.split(",")[1]) for line in lines[1:] if line.strip()]
    else:
        values = [int(line) for line in lines if line.strip()]
    return Dataset(values=np.asarray(values, dtype=np.int64),
                   domain_size=domain_size)
