"""Monotone measures on a finite attribute set and the algebra over them.

Subsets of the ground set ``{0, ..., m-1}`` are keyed by Python integer
bit masks: bit ``i`` is set when attribute ``i`` belongs to the subset.
Python integers are unbounded, so the same canonical key works for any
``m``; vectorised paths (``evaluate_many``) use ``int64`` arrays and are
limited to ``m <= 62``.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .errors import CapacityError, DomainError, InvalidSubsetError, MeasureFormatError

__all__ = [
    "EXPLICIT_MAX_SIZE",
    "Measure",
    "ExplicitMeasure",
    "AdditiveMeasure",
    "LazyMeasure",
    "DualMeasure",
    "MixtureMeasure",
    "RestrictedMeasure",
    "MobiusRepresentation",
    "MonotoneCheck",
    "CacheInfo",
    "subset_mask",
    "subset_indices",
    "full_mask",
    "popcount",
    "counting_measure",
    "dual",
    "mixture",
    "symmetrize",
    "restrict",
    "to_explicit",
    "check_monotone",
    "mobius_transform",
    "zeta_reconstruct",
    "shapley_value",
    "shapley_values",
    "format_measure",
    "parse_measure",
    "read_measure",
    "write_measure",
]

EXPLICIT_MAX_SIZE = 20
VECTOR_MAX_SIZE = 62
_DENSE_LOOKUP_MAX_SIZE = 22


def full_mask(m: int) -> int:
    return (1 << m) - 1


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def subset_indices(mask: int) -> tuple[int, ...]:
    """Ascending attribute indices of a bit mask."""
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def subset_mask(subset, m: int | None = None) -> int:
    """Canonical bit mask of ``subset``.

    ``subset`` is either an integer mask or an iterable of attribute
    indices. When ``m`` is given, every index must be below it.
    """
    if isinstance(subset, (int, np.integer)) and not isinstance(subset, bool):
        mask = int(subset)
        if mask < 0:
            raise InvalidSubsetError(f"negative subset mask {mask}")
        if m is not None and mask >> m:
            raise InvalidSubsetError(
                f"subset mask {mask:#x} has bits outside a ground set of size {m}"
            )
        return mask
    mask = 0
    for i in subset:
        i = int(i)
        if i < 0 or (m is not None and i >= m):
            raise InvalidSubsetError(f"attribute index {i} outside ground set of size {m}")
        mask |= 1 << i
    return mask


def _popcounts(masks: np.ndarray, m: int) -> np.ndarray:
    counts = np.zeros(masks.shape, dtype=np.int64)
    for i in range(m):
        counts += (masks >> i) & 1
    return counts


@dataclass(frozen=True)
class CacheInfo:
    requests: int
    evaluations: int
    size: int

    @property
    def hits(self) -> int:
        return self.requests - self.evaluations

    @property
    def hit_rate(self) -> float:
        return self.hits / self.requests if self.requests else 0.0


class Measure:
    """A set function on subsets of ``{0, ..., ground_size - 1}``.

    Subclasses implement :meth:`_value` for a single bit mask and may
    override :meth:`_values_for` (or :meth:`evaluate_many`) with a
    vectorised path.
    """

    ground_size: int

    def _value(self, mask: int) -> float:
        raise NotImplementedError

    def _values_for(self, masks: np.ndarray) -> np.ndarray:
        return np.array([self._value(int(k)) for k in masks], dtype=float)

    def evaluate(self, subset) -> float:
        return self._value(subset_mask(subset, self.ground_size))

    __call__ = evaluate

    def evaluate_many(self, masks) -> np.ndarray:
        """Evaluate an array of ``int64`` masks, each distinct mask once."""
        masks = np.asarray(masks, dtype=np.int64)
        if masks.size == 0:
            return np.zeros(masks.shape)
        m = self.ground_size
        if m > VECTOR_MAX_SIZE:
            raise CapacityError(f"vectorised evaluation requires m <= {VECTOR_MAX_SIZE}")
        flat = masks.ravel()
        if m <= _DENSE_LOOKUP_MAX_SIZE:
            seen = np.zeros(1 << m, dtype=bool)
            seen[flat] = True
            uniq = np.flatnonzero(seen)
            lookup = np.zeros(1 << m)
            lookup[uniq] = self._values_for(uniq)
            return lookup[masks]
        uniq, inverse = np.unique(flat, return_inverse=True)
        return self._values_for(uniq)[inverse].reshape(masks.shape)

    @property
    def full(self) -> int:
        return full_mask(self.ground_size)

    @property
    def total(self) -> float:
        """Value on the whole ground set."""
        return self._value(self.full)

    def dual(self) -> Measure:
        return DualMeasure(self)


class ExplicitMeasure(Measure):
    """A measure stored as a dense table indexed by bit mask."""

    def __init__(self, table, names: Sequence[str] | None = None):
        table = np.array(table, dtype=float).ravel()
        m = int(round(math.log2(table.size))) if table.size else -1
        if m < 0 or table.size != 1 << m:
            raise DomainError(f"table length {table.size} is not a power of two")
        if m > EXPLICIT_MAX_SIZE:
            raise CapacityError(f"explicit measures are capped at m = {EXPLICIT_MAX_SIZE}")
        if not np.all(np.isfinite(table)):
            raise DomainError("measure values must be finite")
        if table[0] != 0:
            raise DomainError(f"measure of the empty set must be 0, got {table[0]}")
        if np.any(table < 0):
            raise DomainError("measure values must be nonnegative")
        if names is not None and len(names) != m:
            raise DomainError(f"{len(names)} attribute names for a ground set of size {m}")
        self.ground_size = m
        self.table = table
        self.table.setflags(write=False)
        self.names = list(names) if names is not None else None

    @classmethod
    def from_dict(cls, m: int, values: dict, names: Sequence[str] | None = None) -> ExplicitMeasure:
        """Build from ``{subset: value}``; every non-empty subset must be present."""
        if m > EXPLICIT_MAX_SIZE:
            raise CapacityError(f"explicit measures are capped at m = {EXPLICIT_MAX_SIZE}")
        table = np.full(1 << m, np.nan)
        table[0] = 0.0
        for subset, value in values.items():
            table[subset_mask(subset, m)] = value
        missing = np.flatnonzero(np.isnan(table))
        if missing.size:
            raise DomainError(f"no value given for subset {subset_indices(int(missing[0]))}")
        return cls(table, names=names)

    def _value(self, mask: int) -> float:
        return float(self.table[mask])

    def evaluate_many(self, masks) -> np.ndarray:
        return self.table[np.asarray(masks, dtype=np.int64)]


class AdditiveMeasure(Measure):
    """``mu(A) = sum of weights[a] for a in A``."""

    def __init__(self, weights):
        w = np.asarray(weights, dtype=float).ravel()
        if w.size == 0:
            raise DomainError("additive measure needs at least one weight")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise DomainError("weights must be finite and nonnegative")
        self.weights = w
        self.ground_size = w.size

    def _value(self, mask: int) -> float:
        return float(sum(self.weights[i] for i in subset_indices(mask)))

    def evaluate_many(self, masks) -> np.ndarray:
        masks = np.asarray(masks, dtype=np.int64)
        out = np.zeros(masks.shape)
        for i, w in enumerate(self.weights):
            out += w * ((masks >> i) & 1)
        return out

    def dual(self) -> Measure:
        return self


def counting_measure(m: int) -> AdditiveMeasure:
    """``mu(A) = |A|``."""
    return AdditiveMeasure(np.ones(m))


class LazyMeasure(Measure):
    """A measure computed on demand by ``evaluator`` and memoised.

    Concurrent readers are allowed: distinct threads may race to
    compute the same key, but only the first stored value is ever
    returned, so results never depend on interleaving.
    """

    def __init__(
        self,
        ground_size: int,
        evaluator: Callable[[int], float],
        batch_evaluator: Callable[[np.ndarray], np.ndarray] | None = None,
    ):
        if ground_size < 1:
            raise DomainError("ground set must be non-empty")
        self.ground_size = int(ground_size)
        self._evaluator = evaluator
        self._batch_evaluator = batch_evaluator
        self._cache: dict[int, float] = {}
        self._lock = threading.Lock()
        self._requests = 0
        self._evaluations = 0

    def _store(self, mask: int, value: float) -> float:
        with self._lock:
            self._evaluations += 1
            return self._cache.setdefault(mask, value)

    def _value(self, mask: int) -> float:
        self._requests += 1
        cached = self._cache.get(mask)
        if cached is not None:
            return cached
        return self._store(mask, float(self._evaluator(mask)))

    def _values_for(self, masks: np.ndarray) -> np.ndarray:
        cache = self._cache
        out = np.empty(masks.size)
        missing = []
        for j, k in enumerate(masks.tolist()):
            v = cache.get(k)
            if v is None:
                missing.append(j)
            else:
                out[j] = v
        if missing:
            keys = masks[missing]
            if self._batch_evaluator is not None:
                values = np.asarray(self._batch_evaluator(keys), dtype=float)
            else:
                values = np.array([self._evaluator(int(k)) for k in keys], dtype=float)
            with self._lock:
                self._evaluations += len(missing)
                for j, k, v in zip(missing, keys.tolist(), values.tolist()):
                    out[j] = cache.setdefault(k, v)
        return out

    def evaluate_many(self, masks) -> np.ndarray:
        masks = np.asarray(masks, dtype=np.int64)
        self._requests += masks.size
        return super().evaluate_many(masks)

    def cache_info(self) -> CacheInfo:
        return CacheInfo(self._requests, self._evaluations, len(self._cache))

    def clear_cache(self) -> None:
        with self._lock:
            self._cache.clear()
            self._requests = 0
            self._evaluations = 0


class DualMeasure(Measure):
    """``dual(A) = mu(X) - mu(X \\ A)``, evaluated lazily through the base."""

    def __init__(self, base: Measure):
        self.base = base
        self.ground_size = base.ground_size
        self._total = base.total

    def _value(self, mask: int) -> float:
        return self._total - self.base._value(self.full ^ mask)

    def evaluate_many(self, masks) -> np.ndarray:
        masks = np.asarray(masks, dtype=np.int64)
        return self._total - self.base.evaluate_many(np.int64(self.full) ^ masks)

    @property
    def total(self) -> float:
        return self._total

    def dual(self) -> Measure:
        return self.base


class MixtureMeasure(Measure):
    """``(1 - alpha) * mu + alpha * dual(mu)``."""

    def __init__(self, base: Measure, alpha: float):
        alpha = float(alpha)
        if not 0.0 <= alpha <= 1.0:
            raise DomainError(f"alpha must lie in [0, 1], got {alpha}")
        self.base = base
        self.alpha = alpha
        self.ground_size = base.ground_size
        self._dual = dual(base)

    def _value(self, mask: int) -> float:
        a = self.alpha
        return (1.0 - a) * self.base._value(mask) + a * self._dual._value(mask)

    def evaluate_many(self, masks) -> np.ndarray:
        a = self.alpha
        return (1.0 - a) * self.base.evaluate_many(masks) + a * self._dual.evaluate_many(masks)


class RestrictedMeasure(Measure):
    """The restriction of a measure to subsets of ``keep``.

    Attribute ``j`` of the restricted ground set is attribute ``keep[j]``
    of the base.
    """

    def __init__(self, base: Measure, keep: Sequence[int]):
        keep = [int(i) for i in keep]
        if len(set(keep)) != len(keep):
            raise InvalidSubsetError("restriction indices must be distinct")
        for i in keep:
            if not 0 <= i < base.ground_size:
                raise InvalidSubsetError(f"attribute index {i} outside base ground set")
        self.base = base
        self.keep = keep
        self.ground_size = len(keep)

    def _lift(self, mask: int) -> int:
        out = 0
        for j, i in enumerate(self.keep):
            if mask >> j & 1:
                out |= 1 << i
        return out

    def _value(self, mask: int) -> float:
        return self.base._value(self._lift(mask))

    def evaluate_many(self, masks) -> np.ndarray:
        masks = np.asarray(masks, dtype=np.int64)
        lifted = np.zeros(masks.shape, dtype=np.int64)
        for j, i in enumerate(self.keep):
            lifted |= ((masks >> j) & 1) << i
        return self.base.evaluate_many(lifted)


def dual(measure: Measure) -> Measure:
    """Dual measure; the dual of a dual is the original object."""
    return measure.dual()


def mixture(measure: Measure, alpha: float) -> MixtureMeasure:
    return MixtureMeasure(measure, alpha)


def symmetrize(measure: Measure) -> MixtureMeasure:
    """The self-dual measure ``(mu + dual(mu)) / 2``."""
    return MixtureMeasure(measure, 0.5)


def restrict(measure: Measure, keep: Sequence[int]) -> RestrictedMeasure:
    return RestrictedMeasure(measure, keep)


def to_explicit(measure: Measure) -> ExplicitMeasure:
    """Materialise all ``2**m`` values of a measure."""
    if isinstance(measure, ExplicitMeasure):
        return measure
    m = measure.ground_size
    if m > EXPLICIT_MAX_SIZE:
        raise CapacityError(f"cannot materialise a measure with m = {m} > {EXPLICIT_MAX_SIZE}")
    return ExplicitMeasure(measure.evaluate_many(np.arange(1 << m, dtype=np.int64)))


@dataclass(frozen=True)
class MonotoneCheck:
    is_monotone: bool
    violation: tuple[tuple[int, ...], tuple[int, ...]] | None = None

    def __bool__(self) -> bool:
        return self.is_monotone


def check_monotone(measure: Measure) -> MonotoneCheck:
    """Exhaustive monotonicity check over covering pairs ``(A, A | {a})``.

    The reported violation is the one with the smallest mask ``A``, ties
    broken by the smallest added attribute.
    """
    if measure.ground_size > EXPLICIT_MAX_SIZE:
        raise CapacityError(f"exhaustive check is capped at m = {EXPLICIT_MAX_SIZE}")
    table = to_explicit(measure).table
    m = measure.ground_size
    masks = np.arange(1 << m, dtype=np.int64)
    best = None
    for a in range(m):
        bit = 1 << a
        lower = masks[(masks & bit) == 0]
        bad = lower[table[lower | bit] < table[lower]]
        if bad.size and (best is None or int(bad[0]) < best[0]):
            best = (int(bad[0]), a)
    if best is None:
        return MonotoneCheck(True)
    lo, a = best
    return MonotoneCheck(False, (subset_indices(lo), subset_indices(lo | 1 << a)))


@dataclass(frozen=True)
class MobiusRepresentation:
    """Signed coefficients over subsets; absent keys are zero."""

    ground_size: int
    coeffs: dict[int, float]

    def coefficient(self, subset) -> float:
        return self.coeffs.get(subset_mask(subset, self.ground_size), 0.0)

    def as_array(self) -> np.ndarray:
        out = np.zeros(1 << self.ground_size)
        for k, v in self.coeffs.items():
            out[k] = v
        return out


def mobius_transform(measure: Measure) -> MobiusRepresentation:
    """Moebius transform by in-place subset differencing, ``O(m 2^m)``."""
    m = measure.ground_size
    if m > EXPLICIT_MAX_SIZE:
        raise CapacityError(f"Moebius transform is capped at m = {EXPLICIT_MAX_SIZE}")
    c = to_explicit(measure).table.copy()
    for i in range(m):
        view = c.reshape(-1, 2, 1 << i)
        view[:, 1, :] -= view[:, 0, :]
    nonzero = np.flatnonzero(c)
    return MobiusRepresentation(m, {int(k): float(c[k]) for k in nonzero})


def zeta_reconstruct(mobius: MobiusRepresentation, subset) -> float:
    """``sum of coeffs[A] over A subset of subset``."""
    mask = subset_mask(subset, mobius.ground_size)
    return float(sum(v for k, v in mobius.coeffs.items() if k & ~mask == 0))


def _shapley_table(measure: Measure):
    m = measure.ground_size
    if m > EXPLICIT_MAX_SIZE:
        raise CapacityError(f"Shapley values are capped at m = {EXPLICIT_MAX_SIZE}")
    table = to_explicit(measure).table
    masks = np.arange(1 << m, dtype=np.int64)
    sizes = _popcounts(masks, m)
    # |A|! (m - |A| - 1)! / m!, indexed by |A| for 0 <= |A| <= m - 1
    coef = np.array(
        [math.factorial(s) * math.factorial(m - s - 1) / math.factorial(m) for s in range(m)]
    )
    return table, masks, sizes, coef


def shapley_value(measure: Measure, attribute: int) -> float:
    """Average marginal contribution of ``attribute`` over all coalitions."""
    m = measure.ground_size
    if not 0 <= attribute < m:
        raise InvalidSubsetError(f"attribute index {attribute} outside ground set of size {m}")
    table, masks, sizes, coef = _shapley_table(measure)
    bit = 1 << attribute
    lower = masks[(masks & bit) == 0]
    return float(np.sum(coef[sizes[lower]] * (table[lower | bit] - table[lower])))


def shapley_values(measure: Measure) -> np.ndarray:
    table, masks, sizes, coef = _shapley_table(measure)
    out = np.empty(measure.ground_size)
    for a in range(measure.ground_size):
        bit = 1 << a
        lower = masks[(masks & bit) == 0]
        out[a] = np.sum(coef[sizes[lower]] * (table[lower | bit] - table[lower]))
    return out


# -- text format -----------------------------------------------------------


def _default_names(m: int) -> list[str]:
    return [f"a{i + 1}" for i in range(m)]


def format_measure(measure: Measure, names: Sequence[str] | None = None) -> str:
    """Serialise as ``attrs: ...`` followed by one ``names=value`` line per subset.

    Lines are ordered by subset size, then by mask.
    """
    explicit = to_explicit(measure)
    m = explicit.ground_size
    if names is None:
        names = getattr(measure, "names", None) or _default_names(m)
    names = list(names)
    if len(names) != m:
        raise DomainError(f"{len(names)} names for a ground set of size {m}")
    for n in names:
        if not n or any(ch in n for ch in ",=\n") or n != n.strip():
            raise DomainError(f"attribute name {n!r} cannot be written to a measure file")
    lines = ["attrs: " + ",".join(names)]
    for mask in sorted(range(1 << m), key=lambda k: (popcount(k), k)):
        lhs = ",".join(names[i] for i in subset_indices(mask))
        lines.append(f"{lhs}={float(explicit.table[mask])!r}")
    return "\n".join(lines) + "\n"


def parse_measure(text: str) -> ExplicitMeasure:
    """Inverse of :func:`format_measure`.

    Blank lines and lines starting with ``#`` are ignored; the empty-set
    line may be omitted (its value is 0).
    """
    names = None
    values: dict[int, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if names is None:
            if not line.startswith("attrs:"):
                raise MeasureFormatError(f"line {lineno}: expected 'attrs:' header")
            names = [n.strip() for n in line[len("attrs:"):].split(",")]
            if not names or any(not n for n in names) or len(set(names)) != len(names):
                raise MeasureFormatError(f"line {lineno}: invalid attribute list")
            if len(names) > EXPLICIT_MAX_SIZE:
                raise CapacityError(f"measure files are capped at m = {EXPLICIT_MAX_SIZE}")
            index = {n: i for i, n in enumerate(names)}
            continue
        lhs, sep, rhs = line.rpartition("=")
        if not sep:
            raise MeasureFormatError(f"line {lineno}: missing '='")
        mask = 0
        for n in (t.strip() for t in lhs.split(",")) if lhs.strip() else ():
            if n not in index:
                raise MeasureFormatError(f"line {lineno}: unknown attribute {n!r}")
            mask |= 1 << index[n]
        try:
            value = float(rhs)
        except ValueError:
            raise MeasureFormatError(f"line {lineno}: cannot parse value {rhs.strip()!r}") from None
        if mask in values:
            raise MeasureFormatError(f"line {lineno}: duplicate subset")
        values[mask] = value
    if names is None:
        raise MeasureFormatError("empty measure file")
    m = len(names)
    values.setdefault(0, 0.0)
    if len(values) != 1 << m:
        missing = next(k for k in range(1 << m) if k not in values)
        raise MeasureFormatError(
            "missing subset {" + ",".join(names[i] for i in subset_indices(missing)) + "}"
        )
    try:
        return ExplicitMeasure.from_dict(m, values, names=names)
    except DomainError as exc:
        raise MeasureFormatError(str(exc)) from None


def read_measure(path) -> ExplicitMeasure:
    return parse_measure(Path(path).read_text(encoding="utf-8"))


def write_measure(path, measure: Measure, names: Sequence[str] | None = None) -> None:
    Path(path).write_text(format_measure(measure, names), encoding="utf-8")
