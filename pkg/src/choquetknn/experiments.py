"""Synthetic boundary-region experiment with redundant attributes.

Training points are drawn uniformly from the unit square and labelled by
``a1 >= a2``; test points are scattered around the diagonal, where the
decision is hardest. Redundant copies (or noisy copies) of ``a2`` are then
appended to both, and the accuracy of KNN under each distance is tracked
as the number of extra columns grows.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import boundary_test_set, synthetic_correlated, synthetic_duplicates
from .knn import DistanceSpec, predict_from_distances

__all__ = ["SYNTHETIC_ROSTER", "SyntheticRow", "run_synthetic"]

SYNTHETIC_ROSTER = ("MAN", "MI", "MAH1", "CFR.5")


@dataclass(frozen=True)
class SyntheticRow:
    kind: str
    m: int
    distance: str
    accuracy: float


def run_synthetic(
    kind: str = "duplicates",
    m_values=range(16),
    distances=SYNTHETIC_ROSTER,
    seed: int = 42,
    k: int = 5,
    n_train: int = 500,
    n_test: int = 5000,
    sigma: float = 0.1,
    test_seed: int | None = None,
) -> list[SyntheticRow]:
    """Boundary accuracy for every ``(m, distance)`` combination.

    The training set uses ``seed`` and the test set ``seed + 1`` unless
    ``test_seed`` is given. Features are used as generated, without
    rescaling.
    """
    specs = [DistanceSpec.parse(d) if isinstance(d, str) else d for d in distances]
    test_seed = seed + 1 if test_seed is None else test_seed
    rows = []
    for m in m_values:
        m = int(m)
        if kind == "duplicates":
            train = synthetic_duplicates(n_train, m, seed)
        else:
            train = synthetic_correlated(n_train, m, sigma, seed)
        test = boundary_test_set(n_test, test_seed, m_extra=m, kind=kind, sigma=sigma)
        measures: dict = {}
        for spec in specs:
            fitted = spec.fit(train.values, train.decision, measures)
            pred = predict_from_distances(fitted.pairwise(test.values), train.decision, k)
            rows.append(SyntheticRow(kind, m, spec.name, float(np.mean(pred == test.decision))))
    return rows
