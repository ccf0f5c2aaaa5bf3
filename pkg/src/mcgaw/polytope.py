"""Down-closed constraint polytopes with a linear maximization oracle."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import SizeError, ValidationError, all_masks, bits_to_masks, mask_bits
from .oracles import ENUMERATION_MAX_N, TABLE_MAX_N

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class UpdateDirection:
    z: np.ndarray
    objective_value: float


def _positive_order(weights: np.ndarray, keys: np.ndarray = None) -> np.ndarray:
    """Indices with positive weight, best first; ties go to the lower index."""
    keys = weights if keys is None else keys
    positive = np.flatnonzero(weights > 0)
    order = np.argsort(-keys[positive], kind="stable")
    return positive[order]


class Polytope:
    family: str = ""

    def __init__(self, n: int):
        self.n = int(n)

    def params(self) -> dict:
        raise NotImplementedError

    def _max_vertex(self, weights: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _feasible_bits(self, bits: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _within(self, x: np.ndarray, tol: float) -> bool:
        raise NotImplementedError

    def linear_max(self, weights) -> UpdateDirection:
        w = np.asarray(weights, dtype=np.float64).reshape(-1)
        if w.size != self.n:
            raise ValidationError(f"weights: expected {self.n} entries, got {w.size}")
        if not np.all(np.isfinite(w)):
            raise ValidationError("weights: non-finite entry")
        z = self._max_vertex(w)
        return UpdateDirection(z=z, objective_value=float(np.dot(z, w)))

    def is_feasible(self, x, tol: float = DEFAULT_TOL) -> bool:
        if tol < 0:
            raise ValueError("tol must be >= 0")
        x = np.asarray(x, dtype=np.float64).reshape(-1)
        if x.size != self.n or not np.all(np.isfinite(x)):
            return False
        if np.any(x < -tol) or np.any(x > 1.0 + tol):
            return False
        return self._within(x, tol)

    def enumerate_feasible_sets(self) -> np.ndarray:
        """Bitmasks of every integral feasible set, ascending."""
        if self.n > ENUMERATION_MAX_N:
            raise SizeError(f"subset enumeration needs n <= {ENUMERATION_MAX_N}, got n={self.n}")
        masks = all_masks(self.n)
        return masks[self._feasible_bits(mask_bits(masks, self.n))]

    def __eq__(self, other):
        if not isinstance(other, Polytope):
            return NotImplemented
        return self.family == other.family and self.n == other.n and self.params() == other.params()

    def __hash__(self):
        return hash((self.family, self.n))

    def __repr__(self):
        return f"{type(self).__name__}(n={self.n}, {self.params()!r})"


def _count(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 0:
        raise ValidationError(f"{where}: expected a non-negative integer, got {value!r}")
    return int(value)


class Cardinality(Polytope):
    family = "cardinality"

    def __init__(self, n: int, k: int):
        super().__init__(n)
        self.k = _count(k, "constraint.k")

    def _max_vertex(self, w):
        z = np.zeros(self.n)
        z[_positive_order(w)[: self.k]] = 1.0
        return z

    def _feasible_bits(self, bits):
        return bits.sum(axis=1) <= self.k

    def _within(self, x, tol):
        return float(x.sum()) <= self.k + tol

    def params(self):
        return {"k": self.k}


class Partition(Polytope):
    """Partition matroid: at most ``caps[i]`` elements from block ``i``.

    Blocks must be disjoint and together cover the ground set.
    """

    family = "partition"

    def __init__(self, n: int, blocks: Sequence[Sequence[int]], caps: Sequence[int]):
        super().__init__(n)
        if len(blocks) != len(caps):
            raise ValidationError(f"constraint.caps: expected {len(blocks)} caps, got {len(caps)}")
        owner = np.full(n, -1, dtype=np.int64)
        self.blocks = []
        for b, block in enumerate(blocks):
            checked = []
            for e in block:
                if isinstance(e, bool) or not isinstance(e, (int, np.integer)) or not 0 <= e < n:
                    raise ValidationError(f"constraint.blocks[{b}]: index {e!r} outside [0, {n})")
                if owner[e] >= 0:
                    raise ValidationError(f"constraint.blocks[{b}]: element {e} already in block {owner[e]}")
                owner[e] = b
                checked.append(int(e))
            self.blocks.append(sorted(checked))
        missing = np.flatnonzero(owner < 0)
        if missing.size:
            raise ValidationError(f"constraint.blocks: element {int(missing[0])} belongs to no block")
        self.caps = [_count(c, f"constraint.caps[{i}]") for i, c in enumerate(caps)]
        self._owner = owner

    def _max_vertex(self, w):
        z = np.zeros(self.n)
        for block, cap in zip(self.blocks, self.caps):
            idx = np.array(block, dtype=np.int64)
            chosen = idx[_positive_order(w[idx])][:cap]
            z[chosen] = 1.0
        return z

    def _feasible_bits(self, bits):
        ok = np.ones(bits.shape[0], dtype=bool)
        for block, cap in zip(self.blocks, self.caps):
            ok &= bits[:, block].sum(axis=1) <= cap
        return ok

    def _within(self, x, tol):
        return all(float(x[block].sum()) <= cap + tol for block, cap in zip(self.blocks, self.caps))

    def params(self):
        return {"blocks": [list(b) for b in self.blocks], "caps": list(self.caps)}


class MatroidRankTable(Polytope):
    """Matroid polytope given by an explicit rank function over all subsets."""

    family = "matroid_rank_table"

    def __init__(self, n: int, rank: Sequence[int]):
        super().__init__(n)
        if n > TABLE_MAX_N:
            raise ValidationError(f"constraint.rank: rank tables support n <= {TABLE_MAX_N}, got n={n}")
        if len(rank) != 1 << n:
            raise ValidationError(f"constraint.rank: expected {1 << n} entries, got {len(rank)}")
        for i, r in enumerate(rank):
            if isinstance(r, bool) or not isinstance(r, (int, np.integer)):
                raise ValidationError(f"constraint.rank[{i}]: expected an integer, got {r!r}")
        table = np.asarray(rank, dtype=np.int64)
        _check_matroid_rank(table, n)
        table.setflags(write=False)
        self.rank = table

    def _max_vertex(self, w):
        z = np.zeros(self.n)
        current = 0
        size = 0
        for s in _positive_order(w):
            grown = current | (1 << int(s))
            if self.rank[grown] == size + 1:
                current = grown
                size += 1
                z[s] = 1.0
        return z

    def _feasible_bits(self, bits):
        masks = bits_to_masks(bits).astype(np.int64)
        return self.rank[masks] == bits.sum(axis=1)

    def _within(self, x, tol):
        bits = mask_bits(all_masks(self.n), self.n)
        loads = bits @ x
        return bool(np.all(loads <= self.rank + tol))

    def params(self):
        return {"rank": self.rank.tolist()}


def _check_matroid_rank(rank: np.ndarray, n: int) -> None:
    if rank[0] != 0:
        raise ValidationError("constraint.rank: rank of the empty set must be 0")
    masks = np.arange(1 << n, dtype=np.int64)
    sizes = mask_bits(masks, n).sum(axis=1)
    if np.any(rank < 0) or np.any(rank > sizes):
        raise ValidationError("constraint.rank: need 0 <= rank(S) <= |S|")
    for i in range(n):
        bi = 1 << i
        base = masks[(masks & bi) == 0]
        if np.any(rank[base | bi] < rank[base]):
            raise ValidationError(f"constraint.rank: not monotone when adding element {i}")
        for j in range(i + 1, n):
            bj = 1 << j
            sub = base[(base & bj) == 0]
            if np.any(rank[sub | bi] + rank[sub | bj] < rank[sub | bi | bj] + rank[sub]):
                raise ValidationError(f"constraint.rank: not submodular on elements {i},{j}")


class Knapsack(Polytope):
    """Fractional knapsack ``{x in [0,1]^n : <c, x> <= B}`` with ``c > 0``, ``B > 0``."""

    family = "knapsack"

    def __init__(self, n: int, costs, budget: float):
        super().__init__(n)
        c = np.asarray(costs, dtype=np.float64).reshape(-1)
        if c.size != n:
            raise ValidationError(f"constraint.costs: expected {n} entries, got {c.size}")
        if not np.all(np.isfinite(c)) or np.any(c <= 0):
            raise ValidationError("constraint.costs: costs must be finite and > 0")
        b = float(budget)
        if not np.isfinite(b) or b <= 0:
            raise ValidationError(f"constraint.budget: must be finite and > 0, got {budget!r}")
        self.costs = c
        self.budget = b

    def _max_vertex(self, w):
        z = np.zeros(self.n)
        left = self.budget
        for s in _positive_order(w, keys=w / self.costs):
            if left <= 0:
                break
            take = min(1.0, left / self.costs[s])
            z[s] = take
            left -= take * self.costs[s]
        return z

    def _feasible_bits(self, bits):
        return bits @ self.costs <= self.budget

    def _within(self, x, tol):
        return float(np.dot(self.costs, x)) <= self.budget + tol

    def params(self):
        return {"costs": self.costs.tolist(), "budget": self.budget}


FAMILIES = {
    "cardinality": (Cardinality, ("k",)),
    "partition": (Partition, ("blocks", "caps")),
    "matroid_rank_table": (MatroidRankTable, ("rank",)),
    "knapsack": (Knapsack, ("costs", "budget")),
}


def polytope_from_params(n: int, family: str, params: dict) -> Polytope:
    cls, _ = FAMILIES[family]
    return cls(n, **params)


def linear_max(P: Polytope, weights) -> UpdateDirection:
    return P.linear_max(weights)


def is_feasible(P: Polytope, x, tol: float = DEFAULT_TOL) -> bool:
    return P.is_feasible(x, tol)


def enumerate_feasible_sets(P: Polytope) -> np.ndarray:
    return P.enumerate_feasible_sets()
