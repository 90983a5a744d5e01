"""Debiased negative-label OOD scoring for vision-language embeddings."""

from . import errors
from .core import (
    EmbeddingMatrix,
    ScoreConfig,
    ScoreReport,
    labels_sidecar,
    load_emb1,
    module_rng,
    validate,
    write_emb1,
)
from .metrics import EvalReport, auroc, evaluate, fpr_at_tpr
from .oracle import (
    DiscreteLabelSpace,
    exact_neg_mean,
    exact_unbiased_score,
    inclusion_exclusion_score,
    random_space,
)
from .positives import PositiveBank, perturb, synthesize_bank
from .scoring import (
    ScoringContext,
    build_context,
    compute_scores,
    detect,
    phi,
    score_asymptotic_unbiased,
    score_debiased,
    score_grouped_debiased,
    score_mcm,
    score_neglabel,
)
from .selection import (
    SelectionResult,
    knn_indices,
    representativeness,
    select_and_partition,
)
from .similarity import affinity, affinity_matrix
from .synthetic import ClusterSpreads, SyntheticBenchmark, build_benchmark, sample_cluster
from .verify import (
    BiasExperimentReport,
    delta_bound,
    run_bias_experiment,
    run_expansion_suite,
    sample_delta,
)

__version__ = "0.1.0"

__all__ = [
    "EmbeddingMatrix", "ScoreConfig", "ScoreReport", "validate",
    "load_emb1", "write_emb1", "labels_sidecar", "module_rng",
    "affinity", "affinity_matrix",
    "SelectionResult", "representativeness", "select_and_partition", "knn_indices",
    "PositiveBank", "perturb", "synthesize_bank",
    "ScoringContext", "build_context", "compute_scores", "detect", "phi",
    "score_mcm", "score_neglabel", "score_debiased", "score_grouped_debiased",
    "score_asymptotic_unbiased",
    "DiscreteLabelSpace", "exact_unbiased_score", "inclusion_exclusion_score",
    "exact_neg_mean", "random_space",
    "BiasExperimentReport", "sample_delta", "run_bias_experiment",
    "delta_bound", "run_expansion_suite",
    "SyntheticBenchmark", "ClusterSpreads", "sample_cluster", "build_benchmark",
    "EvalReport", "auroc", "fpr_at_tpr", "evaluate",
    "errors",
]
