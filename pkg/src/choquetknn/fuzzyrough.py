"""Fuzzy-rough dependency measures used as attribute-subset weights.

For a classification decision the positive region of an instance reduces
to its distance to the nearest instance of another class, measured on the
attribute subset ``B``. Summing over instances gives ``gamma``; the
minimum gives ``delta``. :class:`GammaMeasure` exposes either as a
memoised monotone measure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDecisionError, DimensionError, DomainError
from .measure import LazyMeasure, subset_indices, subset_mask

__all__ = [
    "FRConfig",
    "GammaMeasure",
    "gamma_classification",
    "delta_classification",
    "competitor_distances",
    "pos_region",
    "gamma_general",
    "delta_general",
    "lukasiewicz",
    "kleene_dienes",
]

INNER_DISTANCES = ("chebyshev", "manhattan_mean")
IMPLICATORS = ("lukasiewicz", "kleene_dienes")
MODES = ("gamma", "delta")

# Precomputed per-attribute distance blocks are kept below this many bytes.
_BLOCK_BUDGET = 256 * 1024 * 1024


def lukasiewicz(p, q):
    return np.minimum(1.0, 1.0 - p + q)


def kleene_dienes(p, q):
    return np.maximum(1.0 - p, q)


_IMPLICATOR_FUNCS = {"lukasiewicz": lukasiewicz, "kleene_dienes": kleene_dienes}


@dataclass(frozen=True)
class FRConfig:
    """Attribute-subset distance and implicator for the fuzzy-rough model.

    The decision relation is crisp equality of class labels.
    """

    inner_distance: str = "chebyshev"
    implicator: str = "lukasiewicz"

    def __post_init__(self):
        if self.inner_distance not in INNER_DISTANCES:
            raise DomainError(f"inner_distance must be one of {INNER_DISTANCES}")
        if self.implicator not in IMPLICATORS:
            raise DomainError(f"implicator must be one of {IMPLICATORS}")


def _prepare(X, labels):
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise DimensionError(f"X must be 2-D, got shape {X.shape}")
    labels = np.asarray(labels).ravel()
    if labels.size != X.shape[0]:
        raise DimensionError(f"{labels.size} labels for {X.shape[0]} instances")
    return X, labels


class GammaMeasure(LazyMeasure):
    """``gamma_d`` (or ``delta_d``) of a labelled training set, memoised per subset.

    Parameters
    ----------
    X : array, shape (n, m)
        Conditional attribute values, normally min-max scaled.
    labels : array, shape (n,)
        Class labels; at least two distinct values are required.
    config : FRConfig
    mode : {"gamma", "delta"}

    Notes
    -----
    ``evaluate_many`` walks a prefix trie of the requested subsets, so a
    subset reached from a cached parent costs one elementwise update of the
    ``n x n`` competitor block instead of ``|B|``. The per-node accumulation
    runs in ascending attribute order on both paths, which makes batch and
    single evaluations bit-identical.
    """

    def __init__(self, X, labels, config: FRConfig | None = None, mode: str = "gamma", precompute: bool = True):
        X, labels = _prepare(X, labels)
        if mode not in MODES:
            raise DomainError(f"mode must be one of {MODES}")
        classes = np.unique(labels)
        if classes.size < 2:
            raise DegenerateDecisionError("the decision attribute has a single class")
        self.config = config or FRConfig()
        self.mode = mode
        self.X = X
        self.labels = labels
        n, m = X.shape
        self._rows = [np.flatnonzero(labels == c) for c in classes]
        self._others = [np.flatnonzero(labels != c) for c in classes]
        self._chebyshev = self.config.inner_distance == "chebyshev"
        cells = sum(r.size * o.size for r, o in zip(self._rows, self._others))
        self._blocks = None
        if precompute and cells * m * 8 <= _BLOCK_BUDGET:
            self._blocks = [
                [np.abs(X[o, a][:, None] - X[r, a][None, :]) for a in range(m)]
                for r, o in zip(self._rows, self._others)
            ]
        super().__init__(m, self._evaluate_direct, self._evaluate_batch)

    def _block(self, c: int, a: int) -> np.ndarray:
        # rows index other-class instances, columns the instances of class c,
        # so the nearest-competitor reduction runs down contiguous columns
        if self._blocks is not None:
            return self._blocks[c][a]
        r, o = self._rows[c], self._others[c]
        return np.abs(self.X[o, a][:, None] - self.X[r, a][None, :])

    def _accumulate(self, acc, c: int, a: int):
        block = self._block(c, a)
        if acc is None:
            return block
        return np.maximum(acc, block) if self._chebyshev else acc + block

    def _reduce(self, accs, size: int) -> float:
        mins = np.empty(self.X.shape[0])
        for c, acc in enumerate(accs):
            nearest = acc.min(axis=0)
            mins[self._rows[c]] = nearest if self._chebyshev else nearest / size
        return float(mins.sum() if self.mode == "gamma" else mins.min())

    def competitor_distances(self, subset) -> np.ndarray:
        """Per-instance distance to the nearest other-class instance on ``subset``."""
        mask = subset_mask(subset, self.ground_size)
        idx = subset_indices(mask)
        if not idx:
            return np.zeros(self.X.shape[0])
        mins = np.empty(self.X.shape[0])
        for c in range(len(self._rows)):
            acc = None
            for a in idx:
                acc = self._accumulate(acc, c, a)
            nearest = acc.min(axis=0)
            mins[self._rows[c]] = nearest if self._chebyshev else nearest / len(idx)
        return mins

    def _evaluate_direct(self, mask: int) -> float:
        idx = subset_indices(mask)
        if not idx:
            return 0.0
        accs = []
        for c in range(len(self._rows)):
            acc = None
            for a in idx:
                acc = self._accumulate(acc, c, a)
            accs.append(acc)
        return self._reduce(accs, len(idx))

    def _evaluate_batch(self, masks: np.ndarray) -> np.ndarray:
        wanted = {int(k): None for k in masks}
        prefixes = set()
        depth = 0
        for k in wanted:
            p = 0
            idx = subset_indices(k)
            depth = max(depth, len(idx))
            for a in idx:
                p |= 1 << a
                prefixes.add(p)
        if 0 in wanted:
            wanted[0] = 0.0
        m = self.ground_size
        n_classes = len(self._rows)
        shapes = [(o.size, r.size) for r, o in zip(self._rows, self._others)]
        # one accumulator per trie depth: siblings overwrite each other only
        # after the subtree below the previous sibling is finished
        buffers = [[np.empty(sh) for sh in shapes] for _ in range(depth)]

        def visit(mask: int, last: int, size: int, accs) -> None:
            for a in range(last + 1, m):
                child = mask | 1 << a
                if child not in prefixes:
                    continue
                if accs is None:
                    child_accs = [self._block(c, a) for c in range(n_classes)]
                else:
                    child_accs = buffers[size]
                    for c in range(n_classes):
                        if self._chebyshev:
                            np.maximum(accs[c], self._block(c, a), out=child_accs[c])
                        else:
                            np.add(accs[c], self._block(c, a), out=child_accs[c])
                if child in wanted:
                    wanted[child] = self._reduce(child_accs, size + 1)
                visit(child, a, size + 1, child_accs)

        visit(0, -1, 0, None)
        return np.array([wanted[int(k)] for k in masks], dtype=float)


def competitor_distances(X, labels, subset, config: FRConfig | None = None) -> np.ndarray:
    return GammaMeasure(X, labels, config, precompute=False).competitor_distances(subset)


def gamma_classification(X, labels, subset, config: FRConfig | None = None) -> float:
    """Sum over instances of the distance to the nearest other-class instance."""
    mu = GammaMeasure(X, labels, config, mode="gamma", precompute=False)
    return mu.evaluate(subset)


def delta_classification(X, labels, subset, config: FRConfig | None = None) -> float:
    """Minimum over instances of the distance to the nearest other-class instance."""
    mu = GammaMeasure(X, labels, config, mode="delta", precompute=False)
    return mu.evaluate(subset)


def _similarity_rows(X, mask: int, config: FRConfig) -> np.ndarray:
    """``R_B`` as an ``n x n`` matrix; the empty subset relates everything fully."""
    n, m = X.shape
    idx = list(subset_indices(mask))
    if not idx:
        return np.ones((n, n))
    diffs = np.abs(X[:, None, idx] - X[None, :, idx])
    d = diffs.max(axis=2) if config.inner_distance == "chebyshev" else diffs.mean(axis=2)
    return np.clip(1.0 - d, 0.0, 1.0)


def _decision_relation(labels, decision_relation):
    if decision_relation is not None:
        R = np.asarray(decision_relation, dtype=float)
        if R.shape != (labels.size, labels.size):
            raise DimensionError(f"decision relation must be {labels.size} x {labels.size}")
        return R
    return (labels[:, None] == labels[None, :]).astype(float)


def _pos_all(X, labels, subset, config, decision_relation) -> np.ndarray:
    X, labels = _prepare(X, labels)
    config = config or FRConfig()
    mask = subset_mask(subset, X.shape[1])
    RB = _similarity_rows(X, mask, config)
    Rd = _decision_relation(labels, decision_relation)
    imp = _IMPLICATOR_FUNCS[config.implicator]
    # POS(y) = max_x min_z I(R_B(y, z), R_d(x, z))
    return np.array([imp(RB[y][None, :], Rd).min(axis=1).max() for y in range(X.shape[0])])


def pos_region(X, labels, subset, y: int, config: FRConfig | None = None, decision_relation=None) -> float:
    """Membership of instance ``y`` in the fuzzy positive region of ``subset``.

    ``R_B(y, z) = 1 - d_B(y, z)`` clipped to ``[0, 1]``, with ``d_B`` the inner
    distance of ``config``. ``decision_relation`` overrides the crisp
    label-equality relation with an arbitrary ``n x n`` matrix.
    """
    X, labels = _prepare(X, labels)
    if not 0 <= y < X.shape[0]:
        raise DomainError(f"instance index {y} out of range")
    config = config or FRConfig()
    mask = subset_mask(subset, X.shape[1])
    RB = _similarity_rows(X, mask, config)[y]
    Rd = _decision_relation(labels, decision_relation)
    return float(_IMPLICATOR_FUNCS[config.implicator](RB[None, :], Rd).min(axis=1).max())


def gamma_general(X, labels, subset, config: FRConfig | None = None, decision_relation=None) -> float:
    """Sum of positive-region memberships; ``O(n^3 |B|)``."""
    return float(_pos_all(X, labels, subset, config, decision_relation).sum())


def delta_general(X, labels, subset, config: FRConfig | None = None, decision_relation=None) -> float:
    """Minimum positive-region membership."""
    return float(_pos_all(X, labels, subset, config, decision_relation).min())
