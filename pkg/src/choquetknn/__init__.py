"""Choquet-integral distances for nearest-neighbour classification.

Monotone measures on attribute subsets, the Choquet integral and the
alpha-Choquet distance, fuzzy-rough dependency measures as data-driven
subset weights, comparison distances, and a KNN evaluation harness.
"""

from .baselines import (
    CovarianceModel,
    chi2_weights,
    fit_covariance,
    mahalanobis,
    mahalanobis_manhattan,
    mami_distance,
    manhattan,
    mi_weights,
    weighted_manhattan,
    wfr_weights,
)
from .choquet import (
    AlphaDistanceSpec,
    alpha_choquet_distance,
    choquet_distance,
    choquet_distance_matrix,
    choquet_integral,
    choquet_similarity,
    pairwise_choquet,
)
from .data import Dataset, Normalizer, boundary_test_set, fit_normalizer, load_csv, save_csv
from .data import synthetic_correlated, synthetic_duplicates
from .errors import ChoquetError
from .fuzzyrough import FRConfig, GammaMeasure, delta_classification, gamma_classification
from .knn import BenchReport, DistanceSpec, EvalReport, balanced_accuracy, cross_validate, knn_predict, stratified_kfold
from .measure import (
    AdditiveMeasure,
    ExplicitMeasure,
    LazyMeasure,
    Measure,
    counting_measure,
    dual,
    mixture,
    mobius_transform,
    shapley_values,
    symmetrize,
)
from .stats import wilcoxon_signed_rank

__version__ = "0.1.0"

__all__ = [
    "AdditiveMeasure",
    "AlphaDistanceSpec",
    "BenchReport",
    "ChoquetError",
    "CovarianceModel",
    "Dataset",
    "DistanceSpec",
    "EvalReport",
    "ExplicitMeasure",
    "FRConfig",
    "GammaMeasure",
    "LazyMeasure",
    "Measure",
    "Normalizer",
    "alpha_choquet_distance",
    "balanced_accuracy",
    "boundary_test_set",
    "chi2_weights",
    "choquet_distance",
    "choquet_distance_matrix",
    "choquet_integral",
    "choquet_similarity",
    "counting_measure",
    "cross_validate",
    "delta_classification",
    "dual",
    "fit_covariance",
    "fit_normalizer",
    "gamma_classification",
    "knn_predict",
    "load_csv",
    "mahalanobis",
    "mahalanobis_manhattan",
    "mami_distance",
    "manhattan",
    "mi_weights",
    "mixture",
    "mobius_transform",
    "pairwise_choquet",
    "save_csv",
    "shapley_values",
    "stratified_kfold",
    "symmetrize",
    "synthetic_correlated",
    "synthetic_duplicates",
    "weighted_manhattan",
    "wfr_weights",
    "wilcoxon_signed_rank",
]
