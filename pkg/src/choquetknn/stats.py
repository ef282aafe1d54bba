"""Two-sided Wilcoxon signed-rank test with an exact small-sample path."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import norm, rankdata

from .errors import DimensionError, DomainError

__all__ = ["WilcoxonResult", "wilcoxon_signed_rank", "signed_rank_null_counts", "EXACT_BELOW"]

EXACT_BELOW = 15
NORMAL_MIN_PAIRS = 5


@dataclass(frozen=True)
class WilcoxonResult:
    """``statistic`` is ``min(W+, W-)``; ``method`` is exact, normal or undefined."""

    statistic: float
    pvalue: float
    n: int
    method: str
    w_plus: float

    @property
    def undefined(self) -> bool:
        return self.method == "undefined"


def signed_rank_null_counts(doubled_ranks) -> np.ndarray:
    """Number of sign assignments giving each value of ``2 * W+``.

    ``doubled_ranks`` are the (integer) doubled ranks, so average ranks on
    ties stay exact.
    """
    counts = np.zeros(int(sum(doubled_ranks)) + 1)
    counts[0] = 1.0
    for r in doubled_ranks:
        r = int(r)
        shifted = np.zeros_like(counts)
        shifted[r:] = counts[: counts.size - r]
        counts = counts + shifted
    return counts


def wilcoxon_signed_rank(a, b, method: str = "auto", correction: bool = True) -> WilcoxonResult:
    """Paired two-sided signed-rank test of ``a - b``.

    Zero differences are dropped and tied magnitudes get average ranks.
    ``method="auto"`` enumerates the exact null distribution below 15 nonzero
    pairs and otherwise uses the normal approximation with tie correction
    (and a 0.5 continuity correction unless ``correction=False``). With no
    nonzero difference the test is undefined and reported as ``p = 1``.
    """
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    if a.shape != b.shape:
        raise DimensionError(f"paired samples differ in length: {a.size} vs {b.size}")
    if method not in ("auto", "exact", "normal"):
        raise DomainError(f"unknown method {method!r}")
    d = a - b
    d = d[d != 0]
    n = d.size
    if n == 0:
        return WilcoxonResult(0.0, 1.0, 0, "undefined", 0.0)
    ranks = rankdata(np.abs(d))
    w_plus = float(ranks[d > 0].sum())
    total = n * (n + 1) / 2.0
    statistic = min(w_plus, total - w_plus)
    if method == "auto":
        method = "exact" if n < EXACT_BELOW else "normal"
    if method == "exact":
        doubled = np.rint(2 * ranks).astype(np.int64)
        counts = signed_rank_null_counts(doubled)
        w2 = int(round(2 * w_plus))
        lower = counts[: w2 + 1].sum()
        upper = counts[w2:].sum()
        p = min(1.0, 2.0 * min(lower, upper) / 2.0**n)
        return WilcoxonResult(statistic, float(p), n, "exact", w_plus)
    if n < NORMAL_MIN_PAIRS:
        raise DomainError(f"normal approximation needs at least {NORMAL_MIN_PAIRS} nonzero pairs")
    _, tie_sizes = np.unique(ranks, return_counts=True)
    var = n * (n + 1) * (2 * n + 1) / 24.0 - np.sum(tie_sizes**3 - tie_sizes) / 48.0
    if var <= 0:
        return WilcoxonResult(statistic, 1.0, n, "normal", w_plus)
    dev = abs(w_plus - total / 2.0)
    if correction:
        dev = max(0.0, dev - 0.5)
    p = min(1.0, 2.0 * norm.sf(dev / np.sqrt(var)))
    return WilcoxonResult(statistic, float(p), n, "normal", w_plus)
