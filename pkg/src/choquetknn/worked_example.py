"""Four-patient cold diagnosis example with its reference results.

Three symptoms (fever, fatigue, cough) in ``[0, 1]`` and a binary
decision. The module recomputes every distance table and measure listing
of the example and checks them against reference values stored below,
which are rounded to two or three decimals; a cell passes when it is
within ``5e-3`` of its reference.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .choquet import choquet_distance_matrix
from .data import Dataset
from .fuzzyrough import GammaMeasure
from .measure import AdditiveMeasure, ExplicitMeasure, Measure, dual, shapley_values, subset_indices, symmetrize

__all__ = [
    "ATTRIBUTES",
    "PATIENT_VALUES",
    "PATIENT_LABELS",
    "EXAMPLE_WEIGHTS",
    "REFERENCE_TABLES",
    "REFERENCE_LISTINGS",
    "REFERENCE_SHAPLEY",
    "TOLERANCE",
    "Check",
    "WorkedExample",
    "patients",
    "example_measure",
    "run_worked_example",
]

ATTRIBUTES = ("fever", "fatigue", "cough")
PATIENT_VALUES = np.array(
    [
        [0.0, 0.9, 0.9],
        [0.9, 0.95, 0.95],
        [0.0, 1.0, 0.0],
        [0.9, 0.0, 0.0],
    ]
)
PATIENT_LABELS = ("1", "1", "0", "0")
EXAMPLE_WEIGHTS = (0.2, 0.4, 0.4)

# mu by bitmask (bit j = attribute j): half the weights on singletons,
# 0.2 on {fever, fatigue} and {fever, cough}, 0.5 on {fatigue, cough}
_EXAMPLE_TABLE = (0.0, 0.1, 0.2, 0.2, 0.2, 0.2, 0.5, 1.0)

# With a 1e-9 allowance, since several exact values sit at 5e-3 from their
# two-decimal rounding (3.285 printed as 3.28 or 3.29, for example).
TOLERANCE = 5e-3 + 1e-9

REFERENCE_TABLES = {
    "d_mu": [
        [0.0, 0.135, 0.21, 0.9],
        [0.135, 0.0, 0.23, 0.475],
        [0.21, 0.23, 0.0, 0.2],
        [0.9, 0.475, 0.2, 0.0],
    ],
    # counting measure scaled to total 1; the (x4, x2) cell is printed as
    # 0.66 in the reference, against 0.63 in the mirrored (x2, x4) cell and
    # an exact value of 0.6333
    "d_counting": [
        [0.0, 0.33, 0.33, 0.9],
        [0.33, 0.0, 0.63, 0.63],
        [0.33, 0.63, 0.0, 0.63],
        [0.9, 0.63, 0.63, 0.0],
    ],
    "d_w": [
        [0.0, 0.22, 0.4, 0.9],
        [0.22, 0.0, 0.58, 0.76],
        [0.4, 0.58, 0.0, 0.58],
        [0.9, 0.76, 0.58, 0.0],
    ],
    "d_gamma": [
        [0.0, 0.18, 3.28, 3.29],
        [0.18, 0.0, 3.47, 3.47],
        [3.28, 3.47, 0.0, 1.91],
        [3.29, 3.47, 1.91, 0.0],
    ],
    "d_gamma_alpha_0.5": [
        [0.0, 0.18, 2.48, 3.29],
        [0.18, 0.0, 2.95, 3.47],
        [2.48, 2.95, 0.0, 0.96],
        [3.29, 3.47, 0.96, 0.0],
    ],
    "d_gamma_alpha_1": [
        [0.0, 0.18, 1.69, 3.29],
        [0.18, 0.0, 2.43, 3.47],
        [1.69, 2.43, 0.0, 0.0],
        [3.29, 3.47, 0.0, 0.0],
    ],
}

# keyed by bitmask over (fever, fatigue, cough)
REFERENCE_LISTINGS = {
    "gamma": {1: 0.0, 2: 1.1, 4: 3.65, 3: 2.0, 5: 3.65, 6: 3.65, 7: 3.65},
    "gamma_dual": {1: 0.0, 2: 0.0, 4: 1.65, 3: 0.0, 5: 2.55, 6: 3.65, 7: 3.65},
    "gamma_sym": {1: 0.0, 2: 0.55, 4: 2.65, 3: 1.0, 5: 3.1, 6: 3.65, 7: 3.65},
}

REFERENCE_SHAPLEY = (0.2, 0.4, 0.4)

_TABLE_TITLES = {
    "d_mu": "Choquet distance, non-additive measure mu",
    "d_counting": "Choquet distance, counting measure scaled to total 1",
    "d_w": "Choquet distance, additive measure w (weighted Manhattan)",
    "d_gamma": "Choquet distance, fuzzy-rough gamma (alpha = 0)",
    "d_gamma_alpha_0.5": "alpha-Choquet distance, gamma, alpha = 0.5",
    "d_gamma_alpha_1": "alpha-Choquet distance, gamma, alpha = 1",
}


def patients() -> Dataset:
    return Dataset(list(ATTRIBUTES), PATIENT_VALUES, list(PATIENT_LABELS), "four-patient cold example")


def example_measure() -> ExplicitMeasure:
    return ExplicitMeasure(_EXAMPLE_TABLE, names=ATTRIBUTES)


def _subset_name(mask: int) -> str:
    return "{" + ",".join(ATTRIBUTES[a] for a in subset_indices(mask)) + "}"


@dataclass(frozen=True)
class Check:
    """One compared cell; ``where`` names the table and cell."""

    where: str
    expected: float
    actual: float

    @property
    def ok(self) -> bool:
        return abs(self.actual - self.expected) <= TOLERANCE


@dataclass
class WorkedExample:
    tables: dict[str, np.ndarray]
    listings: dict[str, dict[int, float]]
    shapley: np.ndarray
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.ok]

    def to_dict(self) -> dict:
        return {
            "attributes": list(ATTRIBUTES),
            "tables": {k: v.tolist() for k, v in self.tables.items()},
            "listings": {k: {_subset_name(m): v for m, v in d.items()} for k, d in self.listings.items()},
            "shapley": self.shapley.tolist(),
            "checks": len(self.checks),
            "failures": [{"cell": c.where, "expected": c.expected, "actual": c.actual} for c in self.failures],
            "passed": self.passed,
        }

    def format_text(self) -> str:
        lines = []
        for key, mat in self.tables.items():
            lines.append(f"{_TABLE_TITLES[key]} [{key}]")
            lines.append("      " + "".join(f"{f'x{j + 1}':>9}" for j in range(mat.shape[1])))
            for i, row in enumerate(mat):
                lines.append(f"  x{i + 1}  " + "".join(f"{v:9.4f}" for v in row))
            lines.append("")
        for key, values in self.listings.items():
            lines.append(f"{key}: " + ", ".join(f"{_subset_name(m)}={v:.4g}" for m, v in values.items()))
        lines.append("shapley(mu): " + ", ".join(f"{a}={v:.4g}" for a, v in zip(ATTRIBUTES, self.shapley)))
        lines.append("")
        for c in self.failures:
            lines.append(f"MISMATCH {c.where}: expected {c.expected}, got {c.actual:.6g}")
        status = "all checks passed" if self.passed else f"{len(self.failures)} checks failed"
        lines.append(f"{len(self.checks)} cells compared, {status}")
        return "\n".join(lines)


def run_worked_example(measure: Measure | None = None) -> WorkedExample:
    """Recompute the example; ``measure`` replaces the non-additive ``mu``."""
    X = PATIENT_VALUES
    mu = measure if measure is not None else example_measure()
    gamma = GammaMeasure(X, PATIENT_LABELS)
    tables = {
        "d_mu": choquet_distance_matrix(X, mu),
        "d_counting": choquet_distance_matrix(X, AdditiveMeasure(np.full(3, 1.0 / 3.0))),
        "d_w": choquet_distance_matrix(X, AdditiveMeasure(EXAMPLE_WEIGHTS)),
        "d_gamma": choquet_distance_matrix(X, gamma, 0.0),
        "d_gamma_alpha_0.5": choquet_distance_matrix(X, gamma, 0.5),
        "d_gamma_alpha_1": choquet_distance_matrix(X, gamma, 1.0),
    }
    order = list(REFERENCE_LISTINGS["gamma"])
    measures = {"gamma": gamma, "gamma_dual": dual(gamma), "gamma_sym": symmetrize(gamma)}
    listings = {k: {m: float(v.evaluate(m)) for m in order} for k, v in measures.items()}
    shapley = shapley_values(mu)
    result = WorkedExample(tables, listings, shapley)
    for key, ref in REFERENCE_TABLES.items():
        for i, row in enumerate(ref):
            for j, expected in enumerate(row):
                result.checks.append(Check(f"{key}[x{i + 1},x{j + 1}]", expected, float(tables[key][i, j])))
    for key, ref in REFERENCE_LISTINGS.items():
        for m, expected in ref.items():
            result.checks.append(Check(f"{key}{_subset_name(m)}", expected, listings[key][m]))
    for a, expected in enumerate(REFERENCE_SHAPLEY):
        result.checks.append(Check(f"shapley[{ATTRIBUTES[a]}]", expected, float(shapley[a])))
    return result
