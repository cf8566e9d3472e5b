"""Command-line entry points for reproducible valuation runs.

Subcommands: ``gen-benchmark``, ``pca``, ``value``, ``exact``,
``baseline``, ``select``, ``correlate``.  Every run writes a manifest
(resolved parameters plus SHA-256 digests of the input files) next to its
primary output, and reruns with identical manifest inputs produce
byte-identical primary outputs.

Exit codes: 0 success, 1 usage error, 2 data or validation error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    VARY_CHOICES,
    format_correlation_table,
    generate_noisy_benchmark,
    load_sweep_records,
    sweep_correlations,
    write_correlation_csv,
)
from .baselines import DEFAULT_KNN_K, knn_shapley_values, loo_values
from .classifier import DEFAULT_EPOCHS, DEFAULT_REG_C, ClassifierConfig, make_dev_accuracy_value_fn
from .datatypes import Dataset, SamplingConfig, ValuationResult, validate_dataset
from .engine import EXACT_GUARD_N, estimate_values, exact_shapley
from .ingest import (
    MatrixFormatError,
    load_embedding_matrix,
    load_labels,
    reduce_dataset,
    write_embedding_matrix,
    write_labels,
)
from .selection import (
    random_removal,
    removal_curve,
    selection_from_curve,
    write_removal_curve_csv,
)

#: Per-task presets: sampling upper bound s and chain count J.
PRESETS = {
    "sst2": {"subset_size": 6700, "chains": 25},
    "qqp": {"subset_size": 7280, "chains": 10},
    "rte": {"subset_size": 374, "chains": 25},
}

LOO_CONFIRM_THRESHOLD = 50_000


class UsageError(Exception):
    """Bad flag combination discovered after parsing."""


class _Parser(argparse.ArgumentParser):
    # argparse defaults to exit code 2 on usage errors; this tool reserves
    # 2 for data errors and uses 1 for usage.
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def sha256_file(path: str | Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            digest.update(block)
    return digest.hexdigest()


def _dump_json(obj, path: Path) -> None:
    path.write_text(json.dumps(obj, indent=2) + "\n", encoding="utf-8")


def write_manifest(
    out_path: Path,
    command: str,
    parameters: dict,
    input_paths: dict[str, str],
    seed: int | None,
) -> None:
    """Record everything that determines the run given the input files."""
    manifest = {
        "command": command,
        "parameters": parameters,
        "input_digests": {name: sha256_file(p) for name, p in sorted(input_paths.items())},
        "seed": seed,
        "tool_version": __version__,
    }
    _dump_json(manifest, out_path)


def _write_valuation_json(
    result: ValuationResult, out: Path, input_paths: dict[str, str]
) -> None:
    payload = {
        "method": result.method,
        "values": [float(v) for v in result.values],
        "seed": result.seed,
        "config": result.config_echo,
        "input_digests": {name: sha256_file(p) for name, p in sorted(input_paths.items())},
    }
    _dump_json(payload, out)


def load_valuation_json(path: str | Path) -> ValuationResult:
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    return ValuationResult(
        values=np.asarray(raw["values"], dtype=np.float64),
        method=raw["method"],
        config_echo=raw.get("config", {}),
        seed=int(raw.get("seed", 0)),
    )


def _add_dataset_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--train-embeddings", required=True, help="train feature matrix file")
    parser.add_argument("--train-labels", required=True, help="train label file")
    parser.add_argument("--dev-embeddings", required=True, help="dev feature matrix file")
    parser.add_argument("--dev-labels", required=True, help="dev label file")


def _add_classifier_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--reg-c", type=float, default=DEFAULT_REG_C, help="SVM regularization strength")
    parser.add_argument("--epochs", type=int, default=DEFAULT_EPOCHS, help="SVM epoch budget")


def _dataset_paths(args) -> dict[str, str]:
    return {
        "train_embeddings": args.train_embeddings,
        "train_labels": args.train_labels,
        "dev_embeddings": args.dev_embeddings,
        "dev_labels": args.dev_labels,
    }


def _load_dataset(args) -> Dataset:
    dataset = Dataset(
        train_features=load_embedding_matrix(args.train_embeddings),
        train_labels=load_labels(args.train_labels),
        dev_features=load_embedding_matrix(args.dev_embeddings),
        dev_labels=load_labels(args.dev_labels),
    )
    problems = validate_dataset(dataset)
    if problems:
        raise MatrixFormatError("invalid dataset: " + "; ".join(problems))
    return dataset


def _default_threads() -> int:
    env = os.environ.get("TSDSHAP_THREADS")
    try:
        return max(1, int(env)) if env else 1
    except ValueError:
        return 1


def _resolve_sampling(args, n: int) -> SamplingConfig:
    subset = args.subset_size
    chains = args.chains
    if args.preset is not None:
        preset = PRESETS[args.preset]
        subset = subset if subset is not None else preset["subset_size"]
        chains = chains if chains is not None else preset["chains"]
    if args.subset_size_pct is not None:
        if args.subset_size is not None:
            raise UsageError("--subset-size and --subset-size-pct are mutually exclusive")
        subset = max(1, round(n * args.subset_size_pct / 100.0))
    if subset is None:
        raise UsageError("one of --subset-size, --subset-size-pct or --preset is required")
    if chains is None:
        chains = 1
    return SamplingConfig(
        subset_size_s=int(subset),
        iterations_t=args.iterations,
        chains_j=int(chains),
        master_seed=args.seed,
    )


# ---------------------------------------------------------------- commands


def _cmd_gen_benchmark(args) -> int:
    dataset, flipped = generate_noisy_benchmark(
        n=args.n, d=args.d, flip_fraction=args.flip, seed=args.seed, separation=args.separation
    )
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_embedding_matrix(dataset.train_features, out / "train_embeddings.tsds")
    write_labels(dataset.train_labels.labels, out / "train_labels.txt")
    write_embedding_matrix(dataset.dev_features, out / "dev_embeddings.tsds")
    write_labels(dataset.dev_labels.labels, out / "dev_labels.txt")
    write_labels(flipped, out / "flipped_indices.txt")
    write_manifest(
        out / "manifest.json",
        "gen-benchmark",
        {"n": args.n, "d": args.d, "flip": args.flip, "separation": args.separation},
        {},
        args.seed,
    )
    print(f"wrote benchmark ({args.n} train rows, {flipped.size} flipped) to {out}")
    return 0


def _cmd_pca(args) -> int:
    train = load_embedding_matrix(args.train_embeddings)
    dev = load_embedding_matrix(args.dev_embeddings)
    reduced_train, reduced_dev, model = reduce_dataset(
        train, dev, k=args.pca_dims, fit_train_only=args.fit_train_only
    )
    write_embedding_matrix(reduced_train, args.out_train)
    write_embedding_matrix(reduced_dev, args.out_dev)
    write_manifest(
        Path(args.out_train).with_suffix(Path(args.out_train).suffix + ".manifest.json"),
        "pca",
        {
            "pca_dims": args.pca_dims,
            "fit_train_only": args.fit_train_only,
            "components_kept": model.k,
            "out_train": args.out_train,
            "out_dev": args.out_dev,
        },
        {"train_embeddings": args.train_embeddings, "dev_embeddings": args.dev_embeddings},
        None,
    )
    print(f"reduced to {model.k} components: {args.out_train}, {args.out_dev}")
    return 0


def _cmd_value(args) -> int:
    dataset = _load_dataset(args)
    config = _resolve_sampling(args, dataset.n)
    threads = args.threads if args.threads is not None else _default_threads()
    value_fn = make_dev_accuracy_value_fn(dataset, reg_c=args.reg_c, epochs=args.epochs)
    result = estimate_values(
        value_fn, dataset.n, config, threads=threads, normalization=args.normalize
    )
    echo = dict(result.config_echo)
    echo.update({"reg_c": args.reg_c, "epochs": args.epochs, "preset": args.preset})
    result = ValuationResult(result.values, result.method, echo, result.seed)
    out = Path(args.out)
    _write_valuation_json(result, out, _dataset_paths(args))
    write_manifest(
        Path(str(out) + ".manifest.json"), "value", echo, _dataset_paths(args), args.seed
    )
    if args.figure:
        from .figures import save_values_figure

        save_values_figure(result.values, args.figure, title="sampled contribution values")
    print(f"wrote {len(result)} values to {out}")
    return 0


def _cmd_exact(args) -> int:
    dataset = _load_dataset(args)
    value_fn = make_dev_accuracy_value_fn(dataset, reg_c=args.reg_c, epochs=args.epochs)
    result = exact_shapley(value_fn, dataset.n)
    echo = dict(result.config_echo)
    echo.update({"reg_c": args.reg_c, "epochs": args.epochs})
    result = ValuationResult(result.values, result.method, echo, result.seed)
    out = Path(args.out)
    _write_valuation_json(result, out, _dataset_paths(args))
    write_manifest(Path(str(out) + ".manifest.json"), "exact", echo, _dataset_paths(args), None)
    print(f"wrote {len(result)} exact values to {out}")
    return 0


def _cmd_baseline(args) -> int:
    dataset = _load_dataset(args)
    out = Path(args.out)
    if args.method == "random":
        if args.k_remove is None:
            raise UsageError("--k-remove is required with --method random")
        kept = random_removal(dataset.n, args.k_remove, args.seed)
        write_labels(kept, out)
        write_manifest(
            Path(str(out) + ".manifest.json"),
            "baseline",
            {"method": "random", "k_remove": args.k_remove},
            _dataset_paths(args),
            args.seed,
        )
        print(f"wrote {kept.size} kept indices to {out}")
        return 0

    if args.method == "loo":
        if dataset.n > LOO_CONFIRM_THRESHOLD and not args.confirm_large:
            raise MatrixFormatError(
                f"leave-one-out on n={dataset.n} needs {dataset.n + 1} trainings; "
                "pass --confirm-large to proceed"
            )
        result = loo_values(dataset, ClassifierConfig(reg_c=args.reg_c, epochs=args.epochs))
    else:
        result = knn_shapley_values(dataset, k_neighbors=args.knn_k)
    _write_valuation_json(result, out, _dataset_paths(args))
    write_manifest(
        Path(str(out) + ".manifest.json"),
        "baseline",
        dict(result.config_echo, method=args.method),
        _dataset_paths(args),
        None,
    )
    print(f"wrote {len(result)} {args.method} values to {out}")
    return 0


def _cmd_select(args) -> int:
    dataset = _load_dataset(args)
    values = load_valuation_json(args.values)
    config = ClassifierConfig(reg_c=args.reg_c, epochs=args.epochs)
    curve = removal_curve(values, dataset, step=args.step, classifier_config=config)
    chosen = selection_from_curve(curve)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_removal_curve_csv(curve, out / "removal_curve.csv")
    write_labels(chosen.kept_indices, out / "kept_indices.txt")
    _dump_json(
        {
            "optimal_removed": chosen.optimal_removed,
            "kept_count": int(chosen.kept_indices.size),
            "best_dev_accuracy": chosen.best_dev_accuracy,
        },
        out / "selection.json",
    )
    inputs = dict(_dataset_paths(args), values=args.values)
    write_manifest(
        out / "manifest.json",
        "select",
        {"step": curve.step, "reg_c": args.reg_c, "epochs": args.epochs},
        inputs,
        None,
    )
    if not args.no_figure:
        from .figures import save_removal_curve_figure

        save_removal_curve_figure(curve, args.figure or out / "removal_curve.png")
    print(
        f"best removal: {chosen.optimal_removed} instances "
        f"(dev accuracy {chosen.best_dev_accuracy:.6f}); outputs in {out}"
    )
    return 0


def _cmd_correlate(args) -> int:
    records = load_sweep_records(args.records)
    vary = args.vary.replace("-", "_")
    rows = sweep_correlations(records, vary)
    out = Path(args.out)
    write_correlation_csv(rows, vary, out)
    text = format_correlation_table(rows, vary)
    out.with_suffix(out.suffix + ".txt").write_text(text, encoding="utf-8")
    write_manifest(
        Path(str(out) + ".manifest.json"),
        "correlate",
        {"vary": vary},
        {"records": args.records},
        None,
    )
    if not args.no_figure:
        from .figures import save_correlation_figure

        save_correlation_figure(rows, vary, args.figure or out.with_suffix(".png"))
    sys.stdout.write(text)
    return 0


# ---------------------------------------------------------------- wiring


def build_parser() -> _Parser:
    parser = _Parser(prog="tsdshap", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("gen-benchmark", help="write a synthetic noisy-label benchmark")
    p.add_argument("--n", type=int, required=True, help="training rows")
    p.add_argument("--d", type=int, default=32, help="feature count")
    p.add_argument("--flip", type=float, default=0.1, help="fraction of train labels flipped")
    p.add_argument("--separation", type=float, default=3.0, help="distance between cluster means")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=_cmd_gen_benchmark)

    p = sub.add_parser("pca", help="fit principal components and write reduced matrices")
    p.add_argument("--train-embeddings", required=True)
    p.add_argument("--dev-embeddings", required=True)
    p.add_argument("--pca-dims", type=int, default=32)
    p.add_argument("--fit-train-only", action="store_true", help="fit on train rows only")
    p.add_argument("--out-train", required=True)
    p.add_argument("--out-dev", required=True)
    p.set_defaults(func=_cmd_pca)

    p = sub.add_parser("value", help="multi-chain sampled contribution values")
    _add_dataset_args(p)
    _add_classifier_args(p)
    p.add_argument("--subset-size", type=int, default=None, help="sampling upper bound s")
    p.add_argument("--subset-size-pct", type=float, default=None, help="s as %% of n")
    p.add_argument("--chains", type=int, default=None, help="independent chains J")
    p.add_argument("--iterations", type=int, default=50, help="subsets per chain T")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=None, help="chain workers (env TSDSHAP_THREADS)")
    p.add_argument("--preset", choices=sorted(PRESETS), default=None)
    p.add_argument(
        "--normalize",
        choices=["iterations", "inclusions"],
        default="iterations",
        help="divide summed contributions by T, or by inclusion counts",
    )
    p.add_argument("--figure", default=None, help="optional values-histogram PNG")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_value)

    p = sub.add_parser("exact", help=f"exact enumeration (guarded to n <= {EXACT_GUARD_N})")
    _add_dataset_args(p)
    _add_classifier_args(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_exact)

    p = sub.add_parser("baseline", help="LOO / KNN valuations or random removal")
    _add_dataset_args(p)
    _add_classifier_args(p)
    p.add_argument("--method", choices=["loo", "knn", "random"], required=True)
    p.add_argument("--knn-k", type=int, default=DEFAULT_KNN_K)
    p.add_argument("--k-remove", type=int, default=None, help="removal count for --method random")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--confirm-large", action="store_true", help="allow LOO beyond n=50000")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_baseline)

    p = sub.add_parser("select", help="removal curve and kept-index file")
    _add_dataset_args(p)
    _add_classifier_args(p)
    p.add_argument("--values", required=True, help="valuation JSON to rank by")
    p.add_argument("--step", type=int, default=None, help="removal step (default n/100)")
    p.add_argument("--figure", default=None, help="removal-curve PNG (default: next to the CSV)")
    p.add_argument("--no-figure", action="store_true", help="skip figure rendering")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=_cmd_select)

    p = sub.add_parser("correlate", help="sweep-correlation tables from a records CSV")
    p.add_argument("--records", required=True)
    p.add_argument("--vary", choices=[v.replace("_", "-") for v in VARY_CHOICES], required=True)
    p.add_argument("--figure", default=None, help="correlation-bars PNG (default: next to the CSV)")
    p.add_argument("--no-figure", action="store_true", help="skip figure rendering")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_correlate)

    return parser


def run(argv: list[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"tsdshap {args.subcommand}: error: {exc}", file=sys.stderr)
        return 1
    except (MatrixFormatError, ValueError, OSError) as exc:
        print(f"tsdshap {args.subcommand}: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
