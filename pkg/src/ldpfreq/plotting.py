"""Figure rendering for the CLI report paths (headless, Agg backend)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .estimators import FrequencyTable
from .metrics import TrialSummary


def save_run_figure(path: str | Path, f_true: FrequencyTable,
                    summary: TrialSummary, epsilon: float,
                    pi_label: str) -> None:
    """True counts vs mean estimated counts, one point per domain value."""
    idx = np.arange(len(f_true.fractions))
    true_counts = f_true.fractions * f_true.n

    fig, ax = plt.subplots(figsize=(7, 4.2))
    ax.plot(idx, true_counts, color="black", lw=1.5, label="true count")
    ax.plot(idx, summary.means, "o", ms=3, alpha=0.7, color="tab:red",
            label=f"{summary.estimator_id} (mean of {summary.trials} trials)")
    ax.set_xlabel("domain value")
    ax.set_ylabel("count")
    ax.set_title(f"estimator {summary.estimator_id}, pi={pi_label}, "
                 f"eps={epsilon:g}")
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_sweep_figure(path: str | Path, pis: np.ndarray, tv_means: np.ndarray,
                      expected_costs: np.ndarray,
                      realized_means: np.ndarray) -> None:
    """TV distance and communication cost against the sampling probability."""
    fig, (ax_tv, ax_cost) = plt.subplots(1, 2, figsize=(9, 3.8))
    ax_tv.plot(pis, tv_means, "o-", color="tab:blue")
    ax_tv.set_xlabel("sampling probability")
    ax_tv.set_ylabel("TV distance")
    ax_cost.plot(pis, expected_costs, "-", color="black", label="expected")
    ax_cost.plot(pis, realized_means, "x", color="tab:orange",
                 label="realized (mean)")
    ax_cost.set_xlabel("sampling probability")
    ax_cost.set_ylabel("reports per round")
    ax_cost.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
