"""Datasets, min-max normalisation and synthetic generators.

Generators draw from ``numpy.random.Generator(PCG64(seed))``, so a seed
fixes the produced dataset byte for byte.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DatasetError, DomainError

__all__ = [
    "Dataset",
    "Normalizer",
    "load_csv",
    "save_csv",
    "fit_normalizer",
    "threshold_labels",
    "synthetic_duplicates",
    "synthetic_correlated",
    "boundary_test_set",
    "make_rng",
]


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True)
class Dataset:
    """``n`` instances with ``m`` numeric attributes and a categorical decision."""

    attributes: list[str]
    values: np.ndarray
    decision: np.ndarray
    note: str = ""

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        decision = np.array([str(d) for d in np.asarray(self.decision).ravel()], dtype=object)
        if values.ndim != 2:
            raise DatasetError(f"values must be a 2-D array, got shape {values.shape}")
        n, m = values.shape
        if n < 1:
            raise DatasetError("dataset has no instances")
        if len(self.attributes) != m:
            raise DatasetError(f"{len(self.attributes)} attribute names for {m} columns")
        if decision.size != n:
            raise DatasetError(f"{decision.size} decision labels for {n} instances")
        if not np.all(np.isfinite(values)):
            i, j = np.argwhere(~np.isfinite(values))[0]
            raise DatasetError(f"non-finite value at row {i}, column {self.attributes[j]!r}")
        values.setflags(write=False)
        decision.setflags(write=False)
        object.__setattr__(self, "attributes", list(self.attributes))
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "decision", decision)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def m(self) -> int:
        return self.values.shape[1]

    @property
    def classes(self) -> np.ndarray:
        return np.unique(self.decision)

    def subset(self, rows) -> Dataset:
        rows = np.asarray(rows)
        return Dataset(self.attributes, self.values[rows], self.decision[rows], self.note)

    def with_values(self, values) -> Dataset:
        return Dataset(self.attributes, values, self.decision, self.note)

    def drop_attributes(self, columns: Sequence[int]) -> Dataset:
        keep = [j for j in range(self.m) if j not in set(columns)]
        return Dataset([self.attributes[j] for j in keep], self.values[:, keep], self.decision, self.note)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self.attributes == other.attributes
            and self.values.shape == other.values.shape
            and np.array_equal(self.values, other.values)
            and np.array_equal(self.decision, other.decision)
        )

    __hash__ = None


def load_csv(path, note: str | None = None) -> Dataset:
    """Read a header-first CSV whose last column is the decision attribute."""
    path = Path(path)
    with path.open(encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    rows = [r for r in rows if any(c.strip() for c in r)]
    if not rows:
        raise DatasetError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    if len(header) < 2:
        raise DatasetError(f"{path}: need at least one attribute and a decision column")
    body = rows[1:]
    if not body:
        raise DatasetError(f"{path}: header present but no data rows")
    values = np.empty((len(body), len(header) - 1))
    labels = []
    for i, row in enumerate(body, start=2):
        if len(row) != len(header):
            raise DatasetError(f"{path}: row {i} has {len(row)} fields, expected {len(header)}")
        for j, cell in enumerate(row[:-1]):
            try:
                values[i - 2, j] = float(cell)
            except ValueError:
                raise DatasetError(
                    f"{path}: row {i}, column {header[j]!r}: cannot parse {cell!r} as a number"
                ) from None
        labels.append(row[-1].strip())
    return Dataset(header[:-1], values, labels, note if note is not None else path.name)


def save_csv(dataset: Dataset, path, decision_name: str = "class") -> None:
    """Write a dataset in the :func:`load_csv` layout with round-trip float formatting."""
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([*dataset.attributes, decision_name])
        for row, label in zip(dataset.values, dataset.decision):
            w.writerow([repr(float(v)) for v in row] + [label])


@dataclass(frozen=True)
class Normalizer:
    """Per-attribute min-max scaling fitted on a training split."""

    minimum: np.ndarray
    maximum: np.ndarray

    def transform(self, values) -> np.ndarray:
        values = np.asarray(values, dtype=float)
        span = self.maximum - self.minimum
        safe = np.where(span > 0, span, 1.0)
        out = np.where(span > 0, (values - self.minimum) / safe, 0.0)
        return np.clip(out, 0.0, 1.0)

    def apply(self, dataset: Dataset) -> Dataset:
        return dataset.with_values(self.transform(dataset.values))


def fit_normalizer(train) -> Normalizer:
    """Fit on a :class:`Dataset` or a 2-D array; constant columns map to 0."""
    values = train.values if isinstance(train, Dataset) else np.asarray(train, dtype=float)
    return Normalizer(values.min(axis=0), values.max(axis=0))


def threshold_labels(a1, a2) -> np.ndarray:
    """``"1"`` where ``a1 >= a2``, else ``"0"``."""
    return np.where(np.asarray(a1) >= np.asarray(a2), "1", "0")


def _synthetic(base: np.ndarray, extra: np.ndarray, note: str) -> Dataset:
    values = np.column_stack([base, extra]) if extra.size else base
    names = ["a1", "a2"] + [f"a{j + 3}" for j in range(extra.shape[1])]
    return Dataset(names, values, threshold_labels(base[:, 0], base[:, 1]), note)


def synthetic_duplicates(n_train: int = 500, m_dup: int = 0, seed: int = 42) -> Dataset:
    """``a1, a2 ~ U[0, 1]`` plus ``m_dup`` exact copies of ``a2``."""
    if n_train < 1 or m_dup < 0:
        raise DomainError("n_train must be positive and m_dup nonnegative")
    base = make_rng(seed).random((n_train, 2))
    extra = np.repeat(base[:, 1:2], m_dup, axis=1)
    return _synthetic(base, extra, f"synthetic duplicates m={m_dup} seed={seed}")


def synthetic_correlated(
    n_train: int = 500, m_corr: int = 0, sigma: float = 0.1, seed: int = 42
) -> Dataset:
    """``a1, a2 ~ U[0, 1]`` plus ``m_corr`` columns ``a2 + N(0, sigma^2)``.

    Uses the same base draw as :func:`synthetic_duplicates` for a given
    seed, so ``sigma=0`` reproduces it exactly. Noise is drawn column by
    column, so the first ``k`` extra columns do not depend on ``m_corr``.
    """
    if n_train < 1 or m_corr < 0 or sigma < 0:
        raise DomainError("n_train must be positive, m_corr and sigma nonnegative")
    rng = make_rng(seed)
    base = rng.random((n_train, 2))
    noise = rng.standard_normal((m_corr, n_train)).T * sigma
    extra = base[:, 1:2] + noise
    return _synthetic(base, extra, f"synthetic correlated m={m_corr} sigma={sigma} seed={seed}")


def boundary_test_set(
    n: int = 5000,
    seed: int = 43,
    m_extra: int = 0,
    kind: str = "duplicates",
    sigma: float = 0.1,
    spread: float = 0.1,
) -> Dataset:
    """Points ``(y + dx, y + dy)`` scattered around the diagonal ``a1 = a2``.

    ``y ~ U[0, 1]`` and ``dx, dy ~ U[-spread, spread]``. ``m_extra`` columns
    are appended as in the matching training generator. Points are not
    clipped to the unit square.
    """
    if kind not in ("duplicates", "correlated"):
        raise DomainError(f"unknown kind {kind!r}")
    rng = make_rng(seed)
    y = rng.random(n)
    dx = rng.uniform(-spread, spread, n)
    dy = rng.uniform(-spread, spread, n)
    base = np.column_stack([y + dx, y + dy])
    if kind == "duplicates":
        extra = np.repeat(base[:, 1:2], m_extra, axis=1)
    else:
        extra = base[:, 1:2] + rng.standard_normal((m_extra, n)).T * sigma
    return _synthetic(base, extra, f"boundary {kind} m={m_extra} seed={seed}")
