"""Training-data valuation with sampled Shapley values over a fast proxy.

The package estimates per-instance contribution values for a training set
by Monte Carlo sampling over subsets, scoring each subset with a
deterministic linear-SVM proxy evaluated on held-out accuracy.  Valuations
feed a low-value-first removal curve for data selection, with exact
enumeration, leave-one-out and KNN closed-form baselines for comparison.
"""

from .analysis import (
    SweepRecord,
    UndefinedCorrelationError,
    generate_noisy_benchmark,
    pearson,
    sweep_correlations,
)
from .baselines import knn_shapley_values, knn_utility, loo_values
from .classifier import (
    ClassifierConfig,
    LinearModel,
    accuracy,
    make_dev_accuracy_value_fn,
    predict,
    train_linear,
)
from .datatypes import (
    Dataset,
    EmbeddingMatrix,
    LabelVector,
    SamplingConfig,
    ValuationResult,
    ValueFunction,
    subset_array,
    validate_dataset,
)
from .engine import chain_seed, estimate_values, exact_shapley, memoized, run_chain
from .ingest import (
    MatrixFormatError,
    PcaModel,
    apply_pca,
    fit_pca,
    load_embedding_matrix,
    load_labels,
    reduce_dataset,
    write_embedding_matrix,
    write_labels,
)
from .selection import (
    RemovalCurve,
    SelectionResult,
    random_removal,
    removal_curve,
    removal_order,
    select_subset,
    selection_from_curve,
)

__version__ = "0.1.0"

__all__ = [
    "ClassifierConfig",
    "Dataset",
    "EmbeddingMatrix",
    "LabelVector",
    "LinearModel",
    "MatrixFormatError",
    "PcaModel",
    "RemovalCurve",
    "SamplingConfig",
    "SelectionResult",
    "SweepRecord",
    "UndefinedCorrelationError",
    "ValuationResult",
    "ValueFunction",
    "accuracy",
    "apply_pca",
    "chain_seed",
    "estimate_values",
    "exact_shapley",
    "fit_pca",
    "generate_noisy_benchmark",
    "knn_shapley_values",
    "knn_utility",
    "load_embedding_matrix",
    "load_labels",
    "loo_values",
    "make_dev_accuracy_value_fn",
    "memoized",
    "pearson",
    "predict",
    "random_removal",
    "reduce_dataset",
    "removal_curve",
    "removal_order",
    "select_subset",
    "selection_from_curve",
    "subset_array",
    "sweep_correlations",
    "train_linear",
    "validate_dataset",
    "write_embedding_matrix",
    "write_labels",
    "__version__",
]
