"""Figure rendering for report outputs.

Each CLI report path can write a PNG next to its delimited output.  All
figures go through Agg so headless runs work.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .analysis import _level_name
from .selection import RemovalCurve


def save_removal_curve_figure(curve: RemovalCurve, path: str | Path) -> None:
    """Dev accuracy against removal count, best point marked."""
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(curve.removed_counts, curve.dev_accuracies, marker=".", lw=1.2)
    best = int(np.argmax(curve.dev_accuracies))
    ax.scatter(
        [curve.removed_counts[best]],
        [curve.dev_accuracies[best]],
        color="tab:red",
        zorder=3,
        label=f"best: remove {int(curve.removed_counts[best])}",
    )
    ax.set_xlabel("instances removed (lowest value first)")
    ax.set_ylabel("dev accuracy")
    ax.legend(loc="lower right")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_values_figure(values: np.ndarray, path: str | Path, title: str = "") -> None:
    """Histogram of per-instance contribution values."""
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.hist(values, bins=min(50, max(10, values.size // 10)), color="tab:blue")
    ax.set_xlabel("estimated contribution value")
    ax.set_ylabel("instances")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_correlation_figure(
    rows: list[tuple[float, float | None]], vary: str, path: str | Path
) -> None:
    """Bar chart of per-level correlations; undefined levels are omitted."""
    fixed, varied = _level_name(vary)
    defined = [(level, corr) for level, corr in rows if corr is not None]
    fig, ax = plt.subplots(figsize=(6, 4))
    if defined:
        labels = [f"{level:g}" for level, _ in defined]
        ax.bar(labels, [corr for _, corr in defined], color="tab:blue")
    ax.axhline(0.0, color="black", lw=0.8)
    ax.set_ylim(-1.05, 1.05)
    ax.set_xlabel(fixed)
    ax.set_ylabel(f"corr({varied}, performance)")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
