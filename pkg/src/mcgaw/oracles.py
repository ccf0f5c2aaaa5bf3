"""Non-negative submodular set functions and the modular term.

Every family evaluates batches of bitmasks through ``evaluate_many``; the
scalar ``evaluate``/``marginal`` calls are thin wrappers around it.
"""

from __future__ import annotations

import operator
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from .core import SizeError, ValidationError, all_masks, mask_bits, members

SUBMODULAR_TOL = 1e-9
TABLE_MAX_N = 16
ENUMERATION_MAX_N = 20
_CHUNK = 1 << 16


def _row_sums(bits: np.ndarray, weights: np.ndarray) -> np.ndarray:
    # fixed left-to-right column order, so a row's sum does not depend on batch size
    out = np.zeros(bits.shape[0])
    for j in range(bits.shape[1]):
        out += np.where(bits[:, j], weights[j], 0.0)
    return out


def _column_total(values: np.ndarray) -> np.ndarray:
    out = np.zeros(values.shape[0])
    for j in range(values.shape[1]):
        out += values[:, j]
    return out


class SetFunction:
    """Value oracle for a set function on ``{0, ..., n-1}``."""

    family: str = ""
    monotone: bool = False

    def __init__(self, n: int):
        self.n = int(n)
        self._table: Optional[np.ndarray] = None

    def _evaluate_bits(self, bits: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def params(self) -> dict:
        raise NotImplementedError

    def evaluate_many(self, masks) -> np.ndarray:
        masks = np.asarray(masks, dtype=np.uint64).reshape(-1)
        if self._table is not None:
            return self._table[masks.astype(np.int64)]
        out = np.empty(masks.size, dtype=np.float64)
        for start in range(0, masks.size, _CHUNK):
            chunk = masks[start:start + _CHUNK]
            out[start:start + chunk.size] = self._evaluate_bits(mask_bits(chunk, self.n))
        return out

    def evaluate(self, S) -> float:
        mask = operator.index(S)
        if mask < 0 or mask >> self.n:
            raise ValidationError(f"set {mask:#x} is not a subset of the ground set")
        return float(self.evaluate_many([mask])[0])

    def marginal(self, S, s: int) -> float:
        mask = operator.index(S)
        if not 0 <= s < self.n:
            raise ValidationError(f"element {s} outside [0, {self.n})")
        if mask >> s & 1:
            raise ValidationError(f"element {s} already belongs to the set")
        vals = self.evaluate_many([mask | (1 << s), mask])
        return float(vals[0] - vals[1])

    def table(self) -> np.ndarray:
        """All ``2**n`` values indexed by bitmask, computed once and kept."""
        if self._table is None:
            if self.n > ENUMERATION_MAX_N:
                raise SizeError(f"value table needs n <= {ENUMERATION_MAX_N}, got n={self.n}")
            table = self.evaluate_many(all_masks(self.n))
            table.setflags(write=False)
            self._table = table
        return self._table

    @cached_property
    def tau(self) -> float:
        """Largest singleton value ``max_s f({s})``."""
        singletons = np.uint64(1) << np.arange(self.n, dtype=np.uint64)
        return float(np.max(self.evaluate_many(singletons)))

    def __eq__(self, other):
        if not isinstance(other, SetFunction):
            return NotImplemented
        return self.family == other.family and self.n == other.n and self.params() == other.params()

    def __hash__(self):
        return hash((self.family, self.n))

    def __repr__(self):
        return f"{type(self).__name__}(n={self.n})"


def _check_index(value, n: int, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise ValidationError(f"{where}: expected an element index, got {value!r}")
    if not 0 <= value < n:
        raise ValidationError(f"{where}: index {value} outside [0, {n})")
    return int(value)


def _nonneg_vector(values, where: str, length: Optional[int] = None) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64).reshape(-1)
    if length is not None and arr.size != length:
        raise ValidationError(f"{where}: expected {length} entries, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{where}: non-finite entry")
    if np.any(arr < 0):
        raise ValidationError(f"{where}: entries must be non-negative")
    return arr


class CoverageFunction(SetFunction):
    """Weighted coverage: total weight of universe items hit by the chosen sets."""

    family = "coverage"
    monotone = True

    def __init__(self, n: int, universe_size: int, sets: Sequence[Sequence[int]], uweights=None):
        super().__init__(n)
        if isinstance(universe_size, bool) or not isinstance(universe_size, (int, np.integer)) or universe_size < 1:
            raise ValidationError(f"objective.universe_size: expected a positive integer, got {universe_size!r}")
        self.universe_size = int(universe_size)
        if len(sets) != n:
            raise ValidationError(f"objective.sets: expected {n} sets, got {len(sets)}")
        cover = np.zeros((n, self.universe_size), dtype=bool)
        self.sets = []
        for i, items in enumerate(sets):
            checked = sorted({_check_index(u, self.universe_size, f"objective.sets[{i}]") for u in items})
            cover[i, checked] = True
            self.sets.append(checked)
        self.cover = cover
        if uweights is None:
            uweights = np.ones(self.universe_size)
        self.uweights = _nonneg_vector(uweights, "objective.uweights", self.universe_size)

    def _evaluate_bits(self, bits):
        covered = (bits.astype(np.int64) @ self.cover.astype(np.int64)) > 0
        return _row_sums(covered, self.uweights)

    def params(self):
        return {
            "universe_size": self.universe_size,
            "sets": [list(s) for s in self.sets],
            "uweights": self.uweights.tolist(),
        }


class CutFunction(SetFunction):
    """Directed cut: weight of arcs leaving the chosen set. Non-monotone."""

    family = "cut"
    monotone = False

    def __init__(self, n: int, arcs: Sequence[Sequence[float]]):
        super().__init__(n)
        src, dst, wts = [], [], []
        for i, arc in enumerate(arcs):
            if len(arc) != 3:
                raise ValidationError(f"objective.arcs[{i}]: expected [from, to, weight]")
            a = _check_index(arc[0], n, f"objective.arcs[{i}][0]")
            b = _check_index(arc[1], n, f"objective.arcs[{i}][1]")
            if a == b:
                raise ValidationError(f"objective.arcs[{i}]: self-loop on {a}")
            w = float(arc[2])
            if not np.isfinite(w) or w < 0:
                raise ValidationError(f"objective.arcs[{i}][2]: weight must be finite and >= 0")
            src.append(a)
            dst.append(b)
            wts.append(w)
        self.src = np.array(src, dtype=np.int64)
        self.dst = np.array(dst, dtype=np.int64)
        self.weights = np.array(wts, dtype=np.float64)

    def _evaluate_bits(self, bits):
        leaving = bits[:, self.src] & ~bits[:, self.dst]
        return _row_sums(leaving, self.weights)

    def params(self):
        return {"arcs": [[int(a), int(b), float(w)] for a, b, w in zip(self.src, self.dst, self.weights)]}


class FacilityFunction(SetFunction):
    """Facility location: each client takes its best service value within the set."""

    family = "facility"
    monotone = True

    def __init__(self, n: int, service):
        super().__init__(n)
        arr = np.asarray(service, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[0] != n or arr.shape[1] < 1:
            raise ValidationError(f"objective.service: expected an {n} x m matrix with m >= 1")
        self.service = _nonneg_vector(arr, "objective.service").reshape(arr.shape)

    def _evaluate_bits(self, bits):
        # service values are >= 0, so masking absent rows to 0 leaves the max intact
        best = np.max(bits[:, :, None] * self.service[None, :, :], axis=1)
        return _column_total(best)

    def params(self):
        return {"service": self.service.tolist()}


class TableFunction(SetFunction):
    """Explicit value table indexed by bitmask; checked for submodularity on construction."""

    family = "table"
    monotone = False

    def __init__(self, n: int, values):
        super().__init__(n)
        if n > TABLE_MAX_N:
            raise ValidationError(f"objective.values: table family supports n <= {TABLE_MAX_N}, got n={n}")
        arr = np.asarray(values, dtype=np.float64).reshape(-1)
        if arr.size != 1 << n:
            raise ValidationError(f"objective.values: expected {1 << n} entries, got {arr.size}")
        arr = _nonneg_vector(arr, "objective.values")
        violation = submodularity_violation(arr, n)
        if violation is not None:
            S, i, j, gap = violation
            raise ValidationError(
                f"objective.values: not submodular at S={S:#x}, elements {i},{j} (excess {gap:.3g})"
            )
        arr.setflags(write=False)
        self.values = arr
        self._table = arr

    def _evaluate_bits(self, bits):
        weights = 1 << np.arange(self.n, dtype=np.int64)
        return self.values[bits.astype(np.int64) @ weights]

    def params(self):
        return {"values": self.values.tolist()}


class NonnegModularFunction(SetFunction):
    """Additive function with non-negative weights (monotone)."""

    family = "modular_nonneg"
    monotone = True

    def __init__(self, n: int, weights):
        super().__init__(n)
        self.weights = _nonneg_vector(weights, "objective.weights", n)

    def _evaluate_bits(self, bits):
        return _row_sums(bits, self.weights)

    def params(self):
        return {"weights": self.weights.tolist()}


def submodularity_violation(table: np.ndarray, n: int, tol: float = SUBMODULAR_TOL):
    """Return ``(S, i, j, excess)`` for the worst local violation, or ``None``.

    Uses the pairwise form f(S+i) + f(S+j) >= f(S+i+j) + f(S) over all S and
    i != j outside S, which is equivalent to diminishing returns.
    """
    masks = np.arange(1 << n, dtype=np.int64)
    worst = None
    for i in range(n):
        bi = 1 << i
        for j in range(i + 1, n):
            bj = 1 << j
            base = masks[(masks & (bi | bj)) == 0]
            excess = table[base | bi | bj] + table[base] - table[base | bi] - table[base | bj]
            k = int(np.argmax(excess)) if excess.size else 0
            if excess.size and excess[k] > tol and (worst is None or excess[k] > worst[3]):
                worst = (int(base[k]), i, j, float(excess[k]))
    return worst


class ModularWeights:
    """The modular term ``l``: one real weight per element, any sign."""

    def __init__(self, weights):
        arr = np.array(weights, dtype=np.float64).reshape(-1)
        if not np.all(np.isfinite(arr)):
            raise ValidationError("modular: non-finite weight")
        arr.setflags(write=False)
        self.weights = arr

    @property
    def n(self) -> int:
        return self.weights.size

    def value(self, S) -> float:
        mask = operator.index(S)
        total = 0.0
        for s in members(mask):
            total += self.weights[s]
        return float(total)

    def value_many(self, masks) -> np.ndarray:
        return _row_sums(mask_bits(masks, self.n), self.weights)

    def extension(self, x) -> float:
        """``L(x) = <l, x>``."""
        return float(np.dot(self.weights, np.asarray(x, dtype=np.float64)))

    def __eq__(self, other):
        if not isinstance(other, ModularWeights):
            return NotImplemented
        return np.array_equal(self.weights, other.weights)

    def __hash__(self):
        return hash(self.weights.tobytes())

    def __repr__(self):
        return f"ModularWeights({self.weights.tolist()!r})"


def evaluate(oracle: SetFunction, S) -> float:
    return oracle.evaluate(S)


def marginal(oracle: SetFunction, S, s: int) -> float:
    return oracle.marginal(S, s)


def modular_value(weights: ModularWeights, S) -> float:
    return weights.value(S)


FAMILIES = {
    "coverage": (CoverageFunction, ("universe_size", "sets", "uweights")),
    "cut": (CutFunction, ("arcs",)),
    "facility": (FacilityFunction, ("service",)),
    "table": (TableFunction, ("values",)),
    "modular_nonneg": (NonnegModularFunction, ("weights",)),
}


def oracle_from_params(n: int, family: str, params: dict) -> SetFunction:
    cls, _ = FAMILIES[family]
    return cls(n, **params)
