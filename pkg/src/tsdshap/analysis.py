"""Sweep correlation reports and the synthetic noisy-label benchmark."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .datatypes import Dataset, EmbeddingMatrix, LabelVector

VARY_CHOICES = ("chains", "subset_size")


class UndefinedCorrelationError(ValueError):
    """Pearson correlation of a constant series is undefined, never 0."""


@dataclass(frozen=True)
class SweepRecord:
    """One sweep trial: sampling parameters plus downstream performance."""

    subset_size_pct: float
    chains: int
    performance: float
    trial: int


def pearson(x, y) -> float:
    """Sample Pearson correlation coefficient."""
    xa = np.asarray(x, dtype=np.float64)
    ya = np.asarray(y, dtype=np.float64)
    if xa.shape != ya.shape or xa.ndim != 1:
        raise ValueError("x and y must be 1-D sequences of equal length")
    if xa.size < 2:
        raise ValueError(f"need at least 2 points, got {xa.size}")
    dx = xa - xa.mean()
    dy = ya - ya.mean()
    sx = float(np.sum(dx * dx))
    sy = float(np.sum(dy * dy))
    # sqrt before multiplying: sx * sy can underflow to 0 for tiny variances
    denom = math.sqrt(sx) * math.sqrt(sy)
    if denom == 0.0:
        raise UndefinedCorrelationError("correlation with a constant series is undefined")
    r = float(np.sum(dx * dy)) / denom
    return min(1.0, max(-1.0, r))


def sweep_correlations(
    records: list[SweepRecord],
    vary: str,
) -> list[tuple[float, float | None]]:
    """Per level of the fixed parameter, correlate the varied one with performance.

    ``vary="chains"`` correlates chain count against mean performance within
    each subset-size level; ``vary="subset_size"`` swaps the roles.  Trials
    sharing a (level, varied-value) pair are averaged first.  Levels with
    fewer than 2 distinct varied values, or constant performance, yield
    ``None`` ("n/a" in reports) rather than a coerced number.
    """
    if vary not in VARY_CHOICES:
        raise ValueError(f"vary must be one of {VARY_CHOICES}, got {vary!r}")
    if vary == "chains":
        fixed_of = lambda r: r.subset_size_pct
        varied_of = lambda r: float(r.chains)
    else:
        fixed_of = lambda r: float(r.chains)
        varied_of = lambda r: r.subset_size_pct

    rows: list[tuple[float, float | None]] = []
    for level in sorted({fixed_of(r) for r in records}):
        at_level = [r for r in records if fixed_of(r) == level]
        by_varied: dict[float, list[float]] = {}
        for r in at_level:
            by_varied.setdefault(varied_of(r), []).append(r.performance)
        xs = sorted(by_varied)
        ys = [float(np.mean(by_varied[v])) for v in xs]
        if len(xs) < 2:
            rows.append((level, None))
            continue
        try:
            rows.append((level, pearson(xs, ys)))
        except UndefinedCorrelationError:
            rows.append((level, None))
    return rows


def load_sweep_records(path: str | Path) -> list[SweepRecord]:
    """Read the sweep CSV (header subset_size_pct,chains,performance,trial)."""
    records = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        expected = ["subset_size_pct", "chains", "performance", "trial"]
        if reader.fieldnames != expected:
            raise ValueError(f"{path}: expected header {','.join(expected)}")
        for row in reader:
            records.append(
                SweepRecord(
                    subset_size_pct=float(row["subset_size_pct"]),
                    chains=int(row["chains"]),
                    performance=float(row["performance"]),
                    trial=int(row["trial"]),
                )
            )
    return records


def write_sweep_records(records: list[SweepRecord], path: str | Path) -> None:
    lines = ["subset_size_pct,chains,performance,trial"]
    for r in records:
        lines.append(f"{r.subset_size_pct},{r.chains},{r.performance},{r.trial}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _level_name(vary: str) -> tuple[str, str]:
    if vary == "chains":
        return "subset_size_pct", "chains"
    return "chains", "subset_size_pct"


def write_correlation_csv(
    rows: list[tuple[float, float | None]], vary: str, path: str | Path
) -> None:
    """CSV form of a sweep-correlation table; undefined cells say n/a."""
    fixed, _ = _level_name(vary)
    lines = [f"{fixed},correlation"]
    for level, corr in rows:
        lines.append(f"{level:g}," + ("n/a" if corr is None else f"{corr:.3f}"))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def format_correlation_table(rows: list[tuple[float, float | None]], vary: str) -> str:
    """One-row text table: fixed-parameter levels as columns."""
    fixed, varied = _level_name(vary)
    headers = [f"{level:g}" for level, _ in rows]
    cells = ["n/a" if corr is None else f"{corr:.3f}" for _, corr in rows]
    width = max([len(fixed)] + [max(len(h), len(c)) for h, c in zip(headers, cells)]) + 2
    title = f"Correlation of {varied} with performance, per {fixed}"
    head = "".join(h.rjust(width) for h in headers)
    body = "".join(c.rjust(width) for c in cells)
    return f"{title}\n{fixed.ljust(width)}{head}\n{'corr'.ljust(width)}{body}\n"


def generate_noisy_benchmark(
    n: int,
    d: int,
    flip_fraction: float,
    seed: int,
    separation: float = 3.0,
) -> tuple[Dataset, np.ndarray]:
    """Two unit-variance Gaussian clusters with a fraction of train labels flipped.

    Cluster means sit at +/- separation/2 along the first axis, so
    ``separation`` is the distance between means in units of the in-cluster
    standard deviation.  The training split has n rows with
    floor(flip_fraction * n) labels flipped uniformly at random; the dev
    split (n/4 rows, an 80/20 split overall) stays clean.  Deterministic
    given the seed.
    """
    if not 0 <= flip_fraction < 0.5:
        raise ValueError(f"flip_fraction must be in [0, 0.5), got {flip_fraction}")
    if n < 2:
        raise ValueError(f"need at least 2 training rows, got {n}")
    if d < 1:
        raise ValueError(f"need at least 1 feature, got {d}")
    rng = np.random.Generator(np.random.PCG64(seed))

    def cluster_split(count: int) -> tuple[np.ndarray, np.ndarray]:
        labels = np.zeros(count, dtype=np.int64)
        labels[count // 2 :] = 1
        feats = rng.standard_normal((count, d))
        feats[:, 0] += (labels * 2 - 1) * (separation / 2.0)
        perm = rng.permutation(count)
        return feats[perm], labels[perm]

    train_x, train_y = cluster_split(n)
    dev_x, dev_y = cluster_split(max(1, round(n * 0.25)))

    flip_count = int(flip_fraction * n)
    flipped = np.sort(rng.choice(n, size=flip_count, replace=False)) if flip_count else np.array([], dtype=np.int64)
    train_y = train_y.copy()
    train_y[flipped] = 1 - train_y[flipped]

    dataset = Dataset(
        train_features=EmbeddingMatrix(train_x.astype(np.float32)),
        train_labels=LabelVector(train_y, num_classes=2),
        dev_features=EmbeddingMatrix(dev_x.astype(np.float32)),
        dev_labels=LabelVector(dev_y, num_classes=2),
    )
    return dataset, flipped
