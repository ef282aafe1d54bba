"""Distance-parametric KNN, stratified cross-validation and reports.

Tie rules
---------
Neighbours are ranked by ``(distance, class label, training index)`` and
exactly ``k`` are kept. A vote tie goes to the class whose neighbours have
the smallest summed rank, then to the smallest class label. Both rules look
only at the order of distances and at labels, so predictions do not change
under a strictly increasing transform of the distances or a reshuffle of
the training set.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

from .baselines import (
    chi2_weights,
    fit_covariance,
    mi_weights,
    pairwise_manhattan,
    pairwise_weighted_manhattan,
)
from .choquet import pairwise_choquet
from .data import Dataset, fit_normalizer, make_rng
from .errors import DomainError, InsufficientDataError
from .fuzzyrough import FRConfig, GammaMeasure
from .measure import counting_measure
from .stats import wilcoxon_signed_rank

__all__ = [
    "KINDS",
    "DistanceSpec",
    "FittedDistance",
    "parse_distances",
    "predict_from_distances",
    "knn_predict",
    "knn_predict_many",
    "balanced_accuracy",
    "stratified_kfold",
    "cross_validate",
    "EvalReport",
    "BenchReport",
    "resolve_threads",
    "DEFAULT_ROSTER",
]

KINDS = ("MAN", "CHI", "MI", "MAH", "MAH1", "MAMI", "WFR", "CFR")
CFR_MEASURES = ("gamma", "delta", "counting")
TIE_POLICY = "neighbours by (distance, label, index); votes by count, then rank sum, then label"

_CFR_PATTERN = re.compile(r"^CFR(?::?(\d*\.?\d+))?(?:\[(\w+)\])?$")


def _alpha_suffix(alpha: float) -> str:
    if alpha == 0.0:
        return ""
    text = f"{alpha:g}"
    return text[1:] if text.startswith("0.") else text


@dataclass(frozen=True)
class DistanceSpec:
    """A distance kind and its parameters.

    ``alpha`` and ``measure`` only apply to ``CFR``; ``measure`` selects the
    fitted gamma or delta dependency measure, or the counting measure.
    ``mi_k`` is used by MI and MAMI, ``shrinkage`` by the Mahalanobis
    family, ``fr_config`` by WFR and CFR.
    """

    kind: str
    alpha: float = 0.0
    mi_k: int = 3
    shrinkage: float = 0.1
    fr_config: FRConfig = field(default_factory=FRConfig)
    measure: str = "gamma"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown distance kind {self.kind!r}; expected one of {KINDS}")
        if not 0.0 <= float(self.alpha) <= 1.0:
            raise DomainError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.kind != "CFR" and (self.alpha != 0.0 or self.measure != "gamma"):
            raise DomainError(f"alpha and measure only apply to CFR, not {self.kind}")
        if self.measure not in CFR_MEASURES:
            raise DomainError(f"CFR measure must be one of {CFR_MEASURES}")
        if int(self.mi_k) < 1:
            raise DomainError("mi_k must be at least 1")
        if not 0.0 <= float(self.shrinkage) <= 1.0:
            raise DomainError(f"shrinkage must lie in [0, 1], got {self.shrinkage}")
        object.__setattr__(self, "alpha", float(self.alpha))

    @property
    def name(self) -> str:
        if self.kind != "CFR":
            return self.kind
        suffix = "" if self.measure == "gamma" else f"[{self.measure}]"
        return f"CFR{_alpha_suffix(self.alpha)}{suffix}"

    @classmethod
    def parse(cls, text: str, **params) -> DistanceSpec:
        """Parse ``MAN``, ``MAH1``, ``CFR``, ``CFR:0.5``, ``CFR.5``, ``CFR1`` or ``CFR:0.5[delta]``."""
        token = text.strip().upper().replace("[GAMMA]", "[gamma]")
        token = token.replace("[DELTA]", "[delta]").replace("[COUNTING]", "[counting]")
        match = _CFR_PATTERN.match(token)
        if match:
            alpha = float(match.group(1)) if match.group(1) else 0.0
            return cls("CFR", alpha=alpha, measure=match.group(2) or "gamma", **params)
        if token in KINDS:
            return cls(token, **params)
        raise DomainError(f"cannot parse distance {text!r}")

    def fit(self, X, labels, measures: dict | None = None) -> FittedDistance:
        """Fit weights, covariance or measures on the training rows ``X``.

        ``measures`` is an optional per-fold cache of fitted dependency
        measures shared between specs.
        """
        T = np.atleast_2d(np.asarray(X, dtype=float))
        labels = np.asarray(labels).ravel()
        if T.shape[0] == 0:
            raise InsufficientDataError("empty training set")
        info: dict = {}
        kind = self.kind

        def gamma(mode: str) -> GammaMeasure:
            key = (self.fr_config, mode)
            if measures is None:
                return GammaMeasure(T, labels, self.fr_config, mode=mode)
            if key not in measures:
                measures[key] = GammaMeasure(T, labels, self.fr_config, mode=mode)
            return measures[key]

        if kind == "MAN":
            fn = lambda Q: pairwise_manhattan(Q, T)  # noqa: E731
        elif kind in ("CHI", "MI", "WFR"):
            if kind == "CHI":
                w = chi2_weights(T, labels)
            elif kind == "MI":
                w = mi_weights(T, labels, k=self.mi_k)
            else:
                mu = gamma("gamma")
                w = mu.evaluate_many(np.left_shift(1, np.arange(T.shape[1], dtype=np.int64)))
            info["weights"] = w
            fn = lambda Q: pairwise_weighted_manhattan(Q, T, w)  # noqa: E731
        elif kind in ("MAH", "MAH1", "MAMI"):
            model = fit_covariance(T, self.shrinkage)
            TT = model.transform(T)
            info["covariance"] = model
            if kind == "MAH":
                fn = lambda Q: cdist(model.transform(Q), TT, "euclidean")  # noqa: E731
            elif kind == "MAH1":
                fn = lambda Q: pairwise_manhattan(model.transform(Q), TT)  # noqa: E731
            else:
                w = mi_weights(TT, labels, k=self.mi_k)
                info["weights"] = w
                fn = lambda Q: pairwise_weighted_manhattan(model.transform(Q), TT, w)  # noqa: E731
        else:
            if self.measure == "counting":
                mu = counting_measure(T.shape[1])
            else:
                mu = gamma(self.measure)
            info["measure"] = mu
            fn = lambda Q: pairwise_choquet(Q, T, mu, self.alpha)  # noqa: E731
        if "weights" in info and not np.any(info["weights"] > 0):
            info["warning"] = f"{self.name}: all attribute weights are zero"
        return FittedDistance(self, fn, info)


class FittedDistance:
    """A distance bound to its training rows; ``pairwise(Q)`` is ``(len(Q), n_train)``."""

    def __init__(self, spec: DistanceSpec, fn, info: dict):
        self.spec = spec
        self._fn = fn
        self.info = info

    def pairwise(self, Q) -> np.ndarray:
        return self._fn(np.atleast_2d(np.asarray(Q, dtype=float)))


DEFAULT_ROSTER = ("MAN", "CHI", "MI", "MAH", "MAH1", "MAMI", "WFR", "CFR", "CFR.5", "CFR1")


def parse_distances(text, **params) -> list[DistanceSpec]:
    """Comma-separated roster such as ``"CFR:0.5,MAN"``."""
    items = text.split(",") if isinstance(text, str) else list(text)
    specs = [DistanceSpec.parse(t, **params) for t in items if t.strip()]
    if not specs:
        raise DomainError("empty distance roster")
    return specs


# -- prediction ------------------------------------------------------------


def predict_from_distances(D, train_labels, k: int = 5) -> np.ndarray:
    """KNN labels for each row of a ``(n_query, n_train)`` distance matrix."""
    D = np.atleast_2d(np.asarray(D, dtype=float))
    labels = np.asarray(train_labels).ravel()
    nq, nt = D.shape
    if nt == 0:
        raise InsufficientDataError("empty training set")
    if labels.size != nt:
        raise DomainError(f"{labels.size} labels for {nt} training instances")
    if not 1 <= k <= nt:
        raise DomainError(f"k must lie in [1, {nt}], got {k}")
    classes, codes = np.unique(labels, return_inverse=True)
    out = np.empty(nq, dtype=np.int64)
    rows = max(1, (1 << 22) // nt)
    ranks = np.arange(1, k + 1, dtype=float)
    for s in range(0, nq, rows):
        block = D[s : s + rows]
        b = block.shape[0]
        order = np.lexsort((np.broadcast_to(codes, block.shape), block), axis=-1)[:, :k]
        neigh = codes[order]
        r = np.repeat(np.arange(b), k)
        counts = np.zeros((b, classes.size))
        ranksum = np.zeros((b, classes.size))
        np.add.at(counts, (r, neigh.ravel()), 1.0)
        np.add.at(ranksum, (r, neigh.ravel()), np.tile(ranks, b))
        leading = counts == counts.max(axis=1, keepdims=True)
        out[s : s + b] = np.argmin(np.where(leading, ranksum, np.inf), axis=1)
    return classes[out]


def knn_predict_many(train: Dataset, queries, k: int = 5, distance: DistanceSpec | str = "MAN") -> np.ndarray:
    """Labels for each query row; ``train`` is used as given, without rescaling."""
    spec = DistanceSpec.parse(distance) if isinstance(distance, str) else distance
    if train.n == 0:
        raise InsufficientDataError("empty training set")
    fitted = spec.fit(train.values, train.decision)
    return predict_from_distances(fitted.pairwise(queries), train.decision, k)


def knn_predict(train: Dataset, query, k: int = 5, distance: DistanceSpec | str = "MAN") -> str:
    """Label of a single query vector."""
    return str(knn_predict_many(train, np.atleast_2d(query), k, distance)[0])


def balanced_accuracy(predictions, labels) -> float:
    """Mean recall over the classes present in ``labels``."""
    predictions = np.asarray(predictions).ravel()
    labels = np.asarray(labels).ravel()
    if predictions.shape != labels.shape:
        raise DomainError(f"{predictions.size} predictions for {labels.size} labels")
    if labels.size == 0:
        raise InsufficientDataError("no labels to score")
    recalls = [np.mean(predictions[labels == c] == c) for c in np.unique(labels)]
    return float(np.mean(recalls))


# -- cross-validation ------------------------------------------------------


def stratified_kfold(labels, folds: int = 5, seed: int = 42) -> np.ndarray:
    """Fold index for each instance.

    Each class is shuffled and dealt round-robin, continuing from where the
    previous class stopped, so per-class fold sizes differ by at most one
    and total fold sizes stay balanced too.
    """
    if isinstance(labels, Dataset):
        labels = labels.decision
    labels = np.asarray(labels).ravel()
    if folds < 2:
        raise DomainError("at least two folds are needed")
    if folds > labels.size:
        raise InsufficientDataError(f"{folds} folds for {labels.size} instances")
    rng = make_rng(seed)
    assignment = np.empty(labels.size, dtype=np.int64)
    offset = 0
    for c in np.unique(labels):
        idx = rng.permutation(np.flatnonzero(labels == c))
        assignment[idx] = (offset + np.arange(idx.size)) % folds
        offset = (offset + idx.size) % folds
    return assignment


def fold_digest(assignment) -> str:
    return hashlib.sha256(np.asarray(assignment, dtype="<i8").tobytes()).hexdigest()


def resolve_threads(n_jobs: int | None = None) -> int:
    """``n_jobs`` if given, else ``CHOQUET_THREADS`` (``0`` means all cores), else 1."""
    if n_jobs is None:
        raw = os.environ.get("CHOQUET_THREADS", "1").strip() or "1"
        try:
            n_jobs = int(raw)
        except ValueError:
            raise DomainError(f"CHOQUET_THREADS must be an integer, got {raw!r}") from None
    if n_jobs < 0:
        raise DomainError("thread count must be nonnegative")
    return n_jobs or os.cpu_count() or 1


def _run_fold(dataset: Dataset, assignment, f: int, specs, k: int):
    test = assignment == f
    train = ~test
    ytr, yte = dataset.decision[train], dataset.decision[test]
    if k > int(train.sum()):
        raise DomainError(f"k={k} exceeds the {int(train.sum())} training instances of fold {f}")
    norm = fit_normalizer(dataset.values[train])
    Xtr = norm.transform(dataset.values[train])
    Xte = norm.transform(dataset.values[test])
    warnings = []
    for c in dataset.classes:
        if not np.any(ytr == c):
            warnings.append(f"fold {f}: class {c!r} absent from the training split")
        if not np.any(yte == c):
            warnings.append(f"fold {f}: class {c!r} absent from the test split")
    measures: dict = {}
    scores = []
    for spec in specs:
        fitted = spec.fit(Xtr, ytr, measures)
        if "warning" in fitted.info:
            warnings.append(f"fold {f}: {fitted.info['warning']}")
        pred = predict_from_distances(fitted.pairwise(Xte), ytr, k)
        scores.append(balanced_accuracy(pred, yte))
    return scores, warnings


def cross_validate(
    dataset: Dataset,
    specs,
    k: int = 5,
    folds: int = 5,
    seed: int = 42,
    n_jobs: int | None = None,
    name: str | None = None,
) -> EvalReport:
    """Stratified ``folds``-fold CV of ``k``-NN under every spec in ``specs``.

    Min-max scaling, weights, covariance and dependency measures are all
    fitted on each training split; test rows are clamped into ``[0, 1]``
    with the training statistics. Every spec sees the same folds.
    """
    if isinstance(specs, (str, DistanceSpec)):
        specs = [specs]
    specs = [DistanceSpec.parse(s) if isinstance(s, str) else s for s in specs]
    names = [s.name for s in specs]
    if len(set(names)) != len(names):
        raise DomainError(f"duplicate distances in roster: {names}")
    assignment = stratified_kfold(dataset.decision, folds, seed)
    threads = min(resolve_threads(n_jobs), folds)
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            results = list(pool.map(lambda f: _run_fold(dataset, assignment, f, specs, k), range(folds)))
    else:
        results = [_run_fold(dataset, assignment, f, specs, k) for f in range(folds)]
    accuracies = {nm: [results[f][0][i] for f in range(folds)] for i, nm in enumerate(names)}
    warnings = [w for _, ws in results for w in ws]
    return EvalReport(
        dataset=name if name is not None else dataset.note,
        distances=names,
        accuracies=accuracies,
        seed=int(seed),
        folds=int(folds),
        k=int(k),
        fold_digest=fold_digest(assignment),
        warnings=warnings,
    )


def _pvalue_matrix(samples: dict[str, list[float]]) -> list[list[float]]:
    names = list(samples)
    out = [[1.0] * len(names) for _ in names]
    for i, a in enumerate(names):
        for j, b in enumerate(names):
            if i < j:
                p = wilcoxon_signed_rank(samples[a], samples[b]).pvalue
                out[i][j] = out[j][i] = p
    return out


@dataclass
class EvalReport:
    """Per-fold balanced accuracies of one dataset under a distance roster."""

    dataset: str
    distances: list[str]
    accuracies: dict[str, list[float]]
    seed: int
    folds: int
    k: int
    fold_digest: str
    warnings: list[str] = field(default_factory=list)
    tie_policy: str = TIE_POLICY

    @property
    def means(self) -> dict[str, float]:
        return {d: float(np.mean(self.accuracies[d])) for d in self.distances}

    def pvalues(self) -> list[list[float]]:
        """Pairwise two-sided signed-rank p-values over folds."""
        return _pvalue_matrix({d: self.accuracies[d] for d in self.distances})

    def to_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "seed": self.seed,
            "folds": self.folds,
            "k": self.k,
            "fold_digest": self.fold_digest,
            "tie_policy": self.tie_policy,
            "distances": list(self.distances),
            "accuracies": {d: list(self.accuracies[d]) for d in self.distances},
            "means": self.means,
            "pvalues": self.pvalues(),
            "warnings": list(self.warnings),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def csv_rows(self) -> list[tuple]:
        return [(self.dataset, d, f, self.accuracies[d][f]) for d in self.distances for f in range(self.folds)]

    def to_csv(self) -> str:
        return _csv_text(("dataset", "distance", "fold", "balanced_accuracy"), self.csv_rows())


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


@dataclass
class BenchReport:
    """Several :class:`EvalReport` objects over a shared roster."""

    reports: list[EvalReport]

    def __post_init__(self):
        if not self.reports:
            raise DomainError("no reports to aggregate")
        first = self.reports[0].distances
        if any(r.distances != first for r in self.reports):
            raise DomainError("all reports must share the same distance roster")

    @property
    def distances(self) -> list[str]:
        return list(self.reports[0].distances)

    def table(self) -> np.ndarray:
        """``(n_datasets, n_distances)`` mean balanced accuracies."""
        return np.array([[r.means[d] for d in self.distances] for r in self.reports])

    def mean_row(self) -> dict[str, float]:
        return dict(zip(self.distances, self.table().mean(axis=0).tolist()))

    def fraction_at_least(self, reference: str = "MAN") -> dict[str, float] | None:
        """Share of datasets on which each distance scores at least ``reference``."""
        if reference not in self.distances:
            return None
        t = self.table()
        ref = t[:, self.distances.index(reference)]
        return dict(zip(self.distances, (t >= ref[:, None]).mean(axis=0).tolist()))

    def pvalues(self) -> list[list[float]]:
        """Pairwise signed-rank p-values over per-dataset mean accuracies."""
        t = self.table()
        return _pvalue_matrix({d: t[:, j].tolist() for j, d in enumerate(self.distances)})

    def to_dict(self) -> dict:
        return {
            "distances": self.distances,
            "datasets": [r.dataset for r in self.reports],
            "table": self.table().tolist(),
            "mean": self.mean_row(),
            "fraction_at_least_MAN": self.fraction_at_least("MAN"),
            "pvalues": self.pvalues(),
            "reports": [r.to_dict() for r in self.reports],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_csv(self) -> str:
        rows = [row for r in self.reports for row in r.csv_rows()]
        return _csv_text(("dataset", "distance", "fold", "balanced_accuracy"), rows)

    def summary_csv(self) -> str:
        """Means table with the aggregate mean and share-at-least-MAN rows."""
        rows = [(r.dataset, *[r.means[d] for d in self.distances]) for r in self.reports]
        rows.append(("mean", *self.mean_row().values()))
        frac = self.fraction_at_least("MAN")
        if frac is not None:
            rows.append(("at_least_MAN", *frac.values()))
        return _csv_text(("dataset", *self.distances), rows)
