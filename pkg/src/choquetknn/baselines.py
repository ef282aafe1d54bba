"""Baseline distances: plain and weighted Manhattan, Mahalanobis variants.

Weight estimators (chi-squared, mutual information, fuzzy-rough gamma) and
the shrunk covariance model are fitted on a training split and then used
by both the scalar distances and their pairwise counterparts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist
from scipy.special import digamma

from .choquet import pairwise_weighted_abs
from .errors import DimensionError, DomainError, InsufficientDataError
from .fuzzyrough import FRConfig, GammaMeasure

__all__ = [
    "CovarianceModel",
    "manhattan",
    "weighted_manhattan",
    "chi2_weights",
    "mi_weights",
    "mi_knn",
    "mi_binned",
    "fit_covariance",
    "mahalanobis",
    "mahalanobis_manhattan",
    "mami_distance",
    "wfr_weights",
    "pairwise_manhattan",
    "pairwise_weighted_manhattan",
    "pairwise_mahalanobis",
]

EIGEN_FLOOR = 1e-10


def _pair(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise DimensionError(f"vectors must be 1-D with equal length, got {x.shape} and {y.shape}")
    return x, y


def _weights(w, m: int) -> np.ndarray:
    w = np.asarray(w, dtype=float).ravel()
    if w.size != m:
        raise DimensionError(f"{w.size} weights for {m} attributes")
    if not np.all(np.isfinite(w)) or np.any(w < 0):
        raise DomainError("weights must be finite and nonnegative")
    return w


def manhattan(x, y) -> float:
    x, y = _pair(x, y)
    return float(np.sum(np.abs(x - y)))


def weighted_manhattan(x, y, w) -> float:
    x, y = _pair(x, y)
    return float(np.sum(_weights(w, x.size) * np.abs(x - y)))


def pairwise_manhattan(XA, XB) -> np.ndarray:
    XA = np.atleast_2d(np.asarray(XA, dtype=float))
    return pairwise_weighted_abs(XA, XB, np.ones(XA.shape[1]))


def pairwise_weighted_manhattan(XA, XB, w) -> np.ndarray:
    XA = np.atleast_2d(np.asarray(XA, dtype=float))
    return pairwise_weighted_abs(XA, XB, _weights(w, XA.shape[1]))


# -- feature weights -------------------------------------------------------


def chi2_weights(X, labels) -> np.ndarray:
    """Chi-squared statistic of each nonnegative feature against the classes.

    Observed mass of class ``c`` is the feature's sum over that class; the
    expected mass is the feature total times the class frequency. Classes
    with zero expected mass contribute nothing.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    labels = np.asarray(labels).ravel()
    if labels.size != X.shape[0]:
        raise DimensionError(f"{labels.size} labels for {X.shape[0]} instances")
    if np.any(X < 0):
        raise DomainError("chi-squared weights need nonnegative features")
    classes = np.unique(labels)
    onehot = (labels[:, None] == classes[None, :]).astype(float)
    observed = onehot.T @ X
    expected = np.outer(onehot.mean(axis=0), X.sum(axis=0))
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(expected > 0, (observed - expected) ** 2 / expected, 0.0)
    return terms.sum(axis=0)


def mi_knn(x, labels, k: int = 3) -> float:
    """Nearest-neighbour estimate of ``I(x; class)`` for one feature.

    ``r_i`` is the distance from instance ``i`` to its ``k``-th nearest
    same-class neighbour. ``k_i`` and ``m_i`` count the other instances of
    the same class, and of any class, with distance at most ``r_i``. The
    estimate is ``psi(n) + <psi(k_i)> - <psi(n_class)> - <psi(m_i)>``,
    clamped at 0.

    On tie-free data ``k_i = k`` and this is the usual estimator. With tied
    values (integer-coded features) the closed-ball counts keep the estimate
    meaningful where ``r_i = 0``, without random jitter and independently
    of instance order.
    """
    x = np.asarray(x, dtype=float).ravel()
    labels = np.asarray(labels).ravel()
    if labels.size != x.size:
        raise DimensionError(f"{labels.size} labels for {x.size} instances")
    if k < 1:
        raise DomainError("k must be at least 1")
    n = x.size
    classes, inverse, counts = np.unique(labels, return_inverse=True, return_counts=True)
    if np.any(counts < k + 1):
        raise InsufficientDataError(f"every class needs at least {k + 1} instances")
    radius = np.empty(n)
    k_i = np.empty(n)
    for c in range(classes.size):
        idx = np.flatnonzero(inverse == c)
        d = np.abs(x[idx][:, None] - x[idx][None, :])
        np.fill_diagonal(d, np.inf)
        r = np.partition(d, k - 1, axis=1)[:, k - 1]
        radius[idx] = r
        k_i[idx] = (d <= r[:, None]).sum(axis=1)
    m_i = np.empty(n)
    step = max(1, (1 << 22) // n)
    for s in range(0, n, step):
        block = np.abs(x[s : s + step][:, None] - x[None, :])
        m_i[s : s + step] = (block <= radius[s : s + step, None]).sum(axis=1) - 1
    mi = digamma(n) + np.mean(digamma(k_i)) - np.mean(digamma(counts[inverse])) - np.mean(digamma(m_i))
    return max(0.0, float(mi))


def mi_binned(x, labels, bins: int = 10) -> float:
    """Plug-in ``I(x; class)`` on ``bins`` equal-width bins, in nats."""
    x = np.asarray(x, dtype=float).ravel()
    labels = np.asarray(labels).ravel()
    lo, hi = x.min(), x.max()
    if hi <= lo:
        return 0.0
    b = np.minimum(((x - lo) / (hi - lo) * bins).astype(int), bins - 1)
    _, c = np.unique(labels, return_inverse=True)
    joint = np.zeros((bins, c.max() + 1))
    np.add.at(joint, (b, c), 1.0)
    joint /= x.size
    pb = joint.sum(axis=1, keepdims=True)
    pc = joint.sum(axis=0, keepdims=True)
    nz = joint > 0
    return max(0.0, float(np.sum(joint[nz] * np.log(joint[nz] / (pb @ pc)[nz]))))


def mi_weights(X, labels, k: int = 3, method: str = "auto") -> np.ndarray:
    """Per-feature mutual information with the class label.

    ``method="auto"`` uses :func:`mi_knn` unless some class has fewer than
    ``k + 1`` instances, in which case every feature falls back to
    :func:`mi_binned`.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    labels = np.asarray(labels).ravel()
    if labels.size != X.shape[0]:
        raise DimensionError(f"{labels.size} labels for {X.shape[0]} instances")
    if method not in ("auto", "knn", "binned"):
        raise DomainError(f"unknown MI method {method!r}")
    if method == "auto":
        _, counts = np.unique(labels, return_counts=True)
        method = "knn" if np.all(counts >= k + 1) else "binned"
    if method == "knn":
        return np.array([mi_knn(X[:, j], labels, k) for j in range(X.shape[1])])
    return np.array([mi_binned(X[:, j], labels) for j in range(X.shape[1])])


def wfr_weights(X, labels, config: FRConfig | None = None) -> np.ndarray:
    """``gamma_d({a})`` for every attribute ``a``."""
    mu = GammaMeasure(X, labels, config)
    return mu.evaluate_many(np.left_shift(1, np.arange(mu.ground_size, dtype=np.int64)))


# -- covariance ------------------------------------------------------------


@dataclass(frozen=True)
class CovarianceModel:
    """Shrunk covariance with its symmetric inverse square root."""

    sigma: np.ndarray
    shrinkage: float
    whitening: np.ndarray
    precision: np.ndarray

    def transform(self, X) -> np.ndarray:
        """Whitened coordinates ``W x`` for each row of ``X``."""
        return np.asarray(X, dtype=float) @ self.whitening.T


def fit_covariance(X, shrinkage: float = 0.1) -> CovarianceModel:
    """``(1 - s) S + s (tr S / m) I`` with ``S`` the divide-by-``n`` covariance.

    The whitening matrix comes from a symmetric eigendecomposition with
    eigenvalues floored at ``1e-10``.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if not 0.0 <= shrinkage <= 1.0:
        raise DomainError(f"shrinkage must lie in [0, 1], got {shrinkage}")
    n, m = X.shape
    if n < 2:
        raise InsufficientDataError("covariance needs at least two instances")
    centred = X - X.mean(axis=0)
    emp = centred.T @ centred / n
    shrunk = (1.0 - shrinkage) * emp + shrinkage * (np.trace(emp) / m) * np.eye(m)
    shrunk = (shrunk + shrunk.T) / 2.0
    evals, evecs = np.linalg.eigh(shrunk)
    evals = np.maximum(evals, EIGEN_FLOOR)
    whitening = (evecs / np.sqrt(evals)) @ evecs.T
    precision = (evecs / evals) @ evecs.T
    return CovarianceModel(shrunk, float(shrinkage), whitening, precision)


def mahalanobis(x, y, model: CovarianceModel) -> float:
    x, y = _pair(x, y)
    d = x - y
    return float(np.sqrt(max(0.0, d @ model.precision @ d)))


def mahalanobis_manhattan(x, y, model: CovarianceModel) -> float:
    """Manhattan distance between whitened vectors."""
    x, y = _pair(x, y)
    return float(np.sum(np.abs(model.whitening @ x - model.whitening @ y)))


def mami_distance(x, y, model: CovarianceModel, w_transformed) -> float:
    """Weighted Manhattan distance in whitened coordinates."""
    x, y = _pair(x, y)
    w = _weights(w_transformed, x.size)
    return float(np.sum(w * np.abs(model.whitening @ x - model.whitening @ y)))


def pairwise_mahalanobis(XA, XB, model: CovarianceModel) -> np.ndarray:
    return cdist(model.transform(XA), model.transform(XB), "euclidean")
