"""Choquet integral and the distances and similarities built on it.

All chain-based evaluations sort the integrand with a stable sort, so
ties are ordered by attribute index and the evaluated subset chain is
reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DomainError
from .measure import VECTOR_MAX_SIZE, AdditiveMeasure, Measure, MobiusRepresentation, dual, subset_indices

__all__ = [
    "AlphaDistanceSpec",
    "choquet_integral",
    "choquet_integral_ascending",
    "choquet_integral_descending",
    "choquet_integral_mobius",
    "choquet_distance",
    "choquet_similarity",
    "alpha_choquet_distance",
    "mobius_alpha_distance",
    "mean_subset_weights",
    "pairwise_choquet",
    "pairwise_weighted_abs",
    "choquet_distance_matrix",
]

# Upper bound on (pairs x attributes) held in memory at once by the
# vectorised paths.
_CHUNK_ELEMENTS = 1 << 22


def _vector(f, m: int) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    if f.ndim != 1 or f.size != m:
        raise DimensionError(f"expected a vector of length {m}, got shape {f.shape}")
    if not np.all(np.isfinite(f)):
        raise DomainError("integrand must be finite")
    return f


def _pair(x, y, m: int) -> np.ndarray:
    return np.abs(_vector(x, m) - _vector(y, m))


def choquet_integral(f, measure: Measure) -> float:
    """Choquet integral of ``f`` with respect to ``measure``.

    Uses the rearranged form ``sum_i mu(A_i) * (f_(i) - f_(i-1))`` over the
    ascending sort of ``f`` with ``f_(0) = 0``. Exactly ``m`` subsets are
    evaluated, starting with the whole ground set.
    """
    m = measure.ground_size
    f = _vector(f, m)
    order = np.argsort(f, kind="stable").tolist()
    fs = f[order].tolist()
    mask = measure.full
    prev = 0.0
    total = 0.0
    for i, a in enumerate(order):
        total += measure._value(mask) * (fs[i] - prev)
        prev = fs[i]
        mask ^= 1 << a
    return total


def choquet_integral_ascending(f, measure: Measure) -> float:
    """``sum_i f_(i) * [mu(A_i) - mu(A_(i+1))]`` with ``mu(A_(m+1)) = 0``."""
    m = measure.ground_size
    f = _vector(f, m)
    order = np.argsort(f, kind="stable").tolist()
    suffix = [0] * (m + 1)
    for i in range(m - 1, -1, -1):
        suffix[i] = suffix[i + 1] | 1 << order[i]
    values = [measure._value(k) for k in suffix[:m]] + [0.0]
    return sum(f[order[i]] * (values[i] - values[i + 1]) for i in range(m))


def choquet_integral_descending(f, measure: Measure) -> float:
    """``sum_i mu(B_i) * [f_(i) - f_(i+1)]`` over the descending sort.

    ``B_i`` holds the ``i`` largest values and ``f_(m+1) = 0``.
    """
    m = measure.ground_size
    f = _vector(f, m)
    order = np.argsort(-f, kind="stable").tolist()
    fs = f[order].tolist() + [0.0]
    total = 0.0
    mask = 0
    for i, a in enumerate(order):
        mask |= 1 << a
        total += measure._value(mask) * (fs[i] - fs[i + 1])
    return total


def choquet_integral_mobius(f, mobius: MobiusRepresentation) -> float:
    """``sum_B M(B) * min_{a in B} f(a)``; a brute-force reference for small ``m``."""
    f = _vector(f, mobius.ground_size)
    return float(sum(c * min(f[i] for i in subset_indices(k)) for k, c in mobius.coeffs.items() if k))


def choquet_distance(x, y, measure: Measure) -> float:
    """Choquet integral of the attribute-wise distances ``|a(x) - a(y)|``."""
    return choquet_integral(_pair(x, y, measure.ground_size), measure)


def choquet_similarity(x, y, measure: Measure, bound: float = 1.0) -> float:
    """Choquet integral of ``1 - |a(x) - a(y)| / bound``.

    ``bound`` is an upper bound on every attribute-wise distance; data is
    expected to be normalised to ``[0, 1]`` for the default ``bound=1``.
    """
    if not bound > 0:
        raise DomainError(f"bound must be positive, got {bound}")
    diffs = _pair(x, y, measure.ground_size)
    if np.any(diffs > bound):
        a = int(np.argmax(diffs > bound))
        raise DomainError(f"attribute {a} distance {diffs[a]} exceeds bound {bound}")
    return choquet_integral(1.0 - diffs / bound, measure)


@dataclass(frozen=True)
class AlphaDistanceSpec:
    """A measure and the mixing weight of its dual."""

    measure: Measure
    alpha: float = 0.0

    def __post_init__(self):
        if not 0.0 <= float(self.alpha) <= 1.0:
            raise DomainError(f"alpha must lie in [0, 1], got {self.alpha}")

    def __call__(self, x, y) -> float:
        return alpha_choquet_distance(x, y, self)


def alpha_choquet_distance(x, y, spec: AlphaDistanceSpec) -> float:
    """Choquet distance under ``(1 - alpha) mu + alpha dual(mu)``.

    Computed as ``(1 - alpha) d_mu + alpha d_dual`` so that the mixture is
    never materialised; the dual side is skipped when ``alpha == 0`` and the
    plain side when ``alpha == 1``.
    """
    a = float(spec.alpha)
    mu = spec.measure
    diffs = _pair(x, y, mu.ground_size)
    d_plain = choquet_integral(diffs, mu) if a < 1.0 else 0.0
    d_dual = choquet_integral(diffs, dual(mu)) if a > 0.0 else 0.0
    return (1.0 - a) * d_plain + a * d_dual


def mobius_alpha_distance(x, y, mobius: MobiusRepresentation, alpha: float = 0.0) -> float:
    """Subset-weighted form ``sum_B M(B) [(1-alpha) min_B |dx| + alpha max_B |dx|]``."""
    if not 0.0 <= alpha <= 1.0:
        raise DomainError(f"alpha must lie in [0, 1], got {alpha}")
    diffs = _pair(x, y, mobius.ground_size)
    total = 0.0
    for k, c in mobius.coeffs.items():
        if not k:
            continue
        sub = diffs[list(subset_indices(k))]
        total += c * ((1.0 - alpha) * sub.min() + alpha * sub.max())
    return total


def mean_subset_weights(values, m: int) -> np.ndarray:
    """Weights ``w_a = sum_{B containing a} values[B] / |B|``.

    ``values`` is any set function given as a length ``2**m`` array. The
    subset-averaged distance ``sum_B values[B] * mean_{a in B} f(a)`` is the
    plain weighted sum ``sum_a w_a f(a)``.
    """
    values = np.asarray(values, dtype=float)
    if values.size != 1 << m:
        raise DimensionError(f"expected {1 << m} set-function values, got {values.size}")
    w = np.zeros(m)
    for k in range(1, 1 << m):
        idx = subset_indices(k)
        share = values[k] / len(idx)
        for a in idx:
            w[a] += share
    return w


# -- vectorised paths ------------------------------------------------------


def _chain_distances(diffs: np.ndarray, measure: Measure) -> np.ndarray:
    """Row-wise Choquet integrals of a ``(p, m)`` block of nonnegative values.

    Arithmetic matches :func:`choquet_integral` operation for operation.
    """
    p, m = diffs.shape
    order = np.argsort(diffs, axis=1, kind="stable")
    fs = np.take_along_axis(diffs, order, axis=1)
    steps = np.diff(fs, axis=1, prepend=0.0)
    bits = np.left_shift(np.int64(1), order.astype(np.int64))
    suffix = np.bitwise_or.accumulate(bits[:, ::-1], axis=1)[:, ::-1]
    values = measure.evaluate_many(suffix)
    out = np.zeros(p)
    for i in range(m):
        out += values[:, i] * steps[:, i]
    return out


def _alpha_rows(diffs: np.ndarray, measure: Measure, alpha: float) -> np.ndarray:
    if alpha <= 0.0:
        return _chain_distances(diffs, measure)
    if alpha >= 1.0:
        return _chain_distances(diffs, dual(measure))
    d_plain = _chain_distances(diffs, measure)
    d_dual = _chain_distances(diffs, dual(measure))
    return (1.0 - alpha) * d_plain + alpha * d_dual


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 <= alpha <= 1.0:
        raise DomainError(f"alpha must lie in [0, 1], got {alpha}")
    return alpha


def pairwise_weighted_abs(XA, XB, w) -> np.ndarray:
    """``out[i, j] = sum_a w_a |XA[i, a] - XB[j, a]|``.

    Shared by the weighted Manhattan baselines and the additive-measure
    shortcut of :func:`pairwise_choquet`, so both round identically.
    """
    XA = np.atleast_2d(np.asarray(XA, dtype=float))
    XB = np.atleast_2d(np.asarray(XB, dtype=float))
    w = np.asarray(w, dtype=float).ravel()
    m = w.size
    if XA.shape[1] != m or XB.shape[1] != m:
        raise DimensionError(f"inputs must have {m} columns, got {XA.shape[1]} and {XB.shape[1]}")
    out = np.empty((len(XA), len(XB)))
    rows = max(1, _CHUNK_ELEMENTS // max(1, len(XB) * m))
    for start in range(0, len(XA), rows):
        block = XA[start : start + rows]
        out[start : start + rows] = (np.abs(block[:, None, :] - XB[None, :, :]) * w).sum(axis=2)
    return out


def pairwise_choquet(XA, XB, measure: Measure, alpha: float = 0.0) -> np.ndarray:
    """``(len(XA), len(XB))`` matrix of alpha-Choquet distances.

    Additive measures are self-dual and integrate to a weighted sum, which
    is computed directly.
    """
    alpha = _check_alpha(alpha)
    XA = np.atleast_2d(np.asarray(XA, dtype=float))
    XB = np.atleast_2d(np.asarray(XB, dtype=float))
    m = measure.ground_size
    if XA.shape[1] != m or XB.shape[1] != m:
        raise DimensionError(f"inputs must have {m} columns, got {XA.shape[1]} and {XB.shape[1]}")
    if isinstance(measure, AdditiveMeasure):
        return pairwise_weighted_abs(XA, XB, measure.weights)
    if m > VECTOR_MAX_SIZE:
        spec = AlphaDistanceSpec(measure, alpha)
        return np.array([[alpha_choquet_distance(a, b, spec) for b in XB] for a in XA]).reshape(
            len(XA), len(XB)
        )
    out = np.empty((len(XA), len(XB)))
    rows = max(1, _CHUNK_ELEMENTS // max(1, len(XB) * m))
    for start in range(0, len(XA), rows):
        block = XA[start : start + rows]
        diffs = np.abs(block[:, None, :] - XB[None, :, :]).reshape(-1, m)
        out[start : start + rows] = _alpha_rows(diffs, measure, alpha).reshape(len(block), len(XB))
    return out


def choquet_distance_matrix(X, measure: Measure, alpha: float = 0.0) -> np.ndarray:
    """Symmetric ``n x n`` alpha-Choquet distance matrix with zero diagonal.

    Only the ``n (n - 1) / 2`` pairs above the diagonal are integrated.
    """
    alpha = _check_alpha(alpha)
    X = np.atleast_2d(np.asarray(X, dtype=float))
    n, m = X.shape
    if m != measure.ground_size:
        raise DimensionError(f"X must have {measure.ground_size} columns, got {m}")
    out = np.zeros((n, n))
    iu, ju = np.triu_indices(n, k=1)
    if m > VECTOR_MAX_SIZE:
        spec = AlphaDistanceSpec(measure, alpha)
        vals = np.array([alpha_choquet_distance(X[i], X[j], spec) for i, j in zip(iu, ju)])
    else:
        vals = np.empty(iu.size)
        step = max(1, _CHUNK_ELEMENTS // m)
        for s in range(0, iu.size, step):
            i, j = iu[s : s + step], ju[s : s + step]
            vals[s : s + step] = _alpha_rows(np.abs(X[i] - X[j]), measure, alpha)
    out[iu, ju] = vals
    out[ju, iu] = vals
    return out
