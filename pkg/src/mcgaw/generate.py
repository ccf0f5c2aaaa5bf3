"""Seeded random instance recipes.

Recipes (all draws from ``numpy.random.default_rng(seed)``):

* coverage: universe of ``2n`` items with weights in [0.5, 2]; each set takes
  every item with probability 0.3 and at least one item.
* cut: each ordered pair gets an arc with probability 0.4, weight in [0.5, 2].
* facility: ``max(2, n // 2)`` clients, service values in [0, 1].
* table: tabulated sum of a random directed cut and a concave-of-modular term
  ``sum_c a_c * sqrt(sum_{s in S} b_{s,c})``; non-negative, submodular and
  usually non-monotone.
* modular_nonneg: weights in [0, 2].
* modular term: uniform in [-1.5, 1.5] (mixed sign) unless ``signs`` says otherwise.
* cardinality: k uniform in [1, max(1, n // 2)].
* partition: 2 or 3 blocks from a random permutation, caps in [1, block size].
* matroid_rank_table: truncated partition matroid rank, n <= 16.
* knapsack: costs in [0.5, 2], budget 40% of total cost.

Continuous draws are rounded to 3 decimals except for table values.
"""

from __future__ import annotations

import numpy as np

from .core import GroundSet, ValidationError, mask_bits
from .instance import InstanceSpec
from .oracles import (
    CoverageFunction,
    CutFunction,
    FacilityFunction,
    ModularWeights,
    NonnegModularFunction,
    TableFunction,
)
from .polytope import Cardinality, Knapsack, MatroidRankTable, Partition

OBJECTIVES = ("coverage", "cut", "facility", "table", "modular_nonneg")
CONSTRAINTS = ("cardinality", "partition", "matroid_rank_table", "knapsack")
SIGNS = ("mixed", "positive", "negative")


def _r3(values):
    return np.round(values, 3)


def random_objective(family: str, n: int, rng: np.random.Generator):
    if family == "coverage":
        u = 2 * n
        sets = []
        for _ in range(n):
            items = np.flatnonzero(rng.random(u) < 0.3)
            if items.size == 0:
                items = np.array([rng.integers(u)])
            sets.append(items.tolist())
        return CoverageFunction(n, u, sets, _r3(rng.uniform(0.5, 2.0, u)))
    if family == "cut":
        return CutFunction(n, _random_arcs(n, rng))
    if family == "facility":
        m = max(2, n // 2)
        return FacilityFunction(n, _r3(rng.uniform(0.0, 1.0, (n, m))))
    if family == "table":
        return TableFunction(n, random_submodular_table(n, rng))
    if family == "modular_nonneg":
        return NonnegModularFunction(n, _r3(rng.uniform(0.0, 2.0, n)))
    raise ValidationError(f"objective: unknown family {family!r}")


def _random_arcs(n, rng):
    arcs = []
    for a in range(n):
        for b in range(n):
            if a != b and rng.random() < 0.4:
                arcs.append([a, b, float(_r3(rng.uniform(0.5, 2.0)))])
    return arcs


def random_submodular_table(n: int, rng: np.random.Generator) -> np.ndarray:
    cut = CutFunction(n, _random_arcs(n, rng))
    bits = mask_bits(np.arange(1 << n, dtype=np.uint64), n)
    values = cut.evaluate_many(np.arange(1 << n, dtype=np.uint64))
    groups = 2
    loads = bits @ rng.uniform(0.0, 1.0, (n, groups))
    values = values + np.sqrt(loads) @ rng.uniform(0.5, 1.5, groups)
    return values


def random_modular(n: int, rng: np.random.Generator, signs: str = "mixed") -> ModularWeights:
    if signs == "mixed":
        w = rng.uniform(-1.5, 1.5, n)
    elif signs == "positive":
        w = rng.uniform(0.0, 1.5, n)
    elif signs == "negative":
        w = rng.uniform(-1.5, 0.0, n)
    else:
        raise ValidationError(f"signs: expected one of {SIGNS}, got {signs!r}")
    return ModularWeights(_r3(w))


def random_constraint(family: str, n: int, rng: np.random.Generator):
    if family == "cardinality":
        return Cardinality(n, int(rng.integers(1, max(1, n // 2) + 1)))
    if family == "partition":
        blocks, caps = _random_blocks(n, rng)
        return Partition(n, blocks, caps)
    if family == "matroid_rank_table":
        if n > 16:
            raise ValidationError("constraint: matroid_rank_table generation supports n <= 16")
        blocks, caps = _random_blocks(n, rng)
        truncation = int(rng.integers(1, sum(caps) + 1))
        bits = mask_bits(np.arange(1 << n, dtype=np.uint64), n)
        rank = np.zeros(1 << n, dtype=np.int64)
        for block, cap in zip(blocks, caps):
            rank += np.minimum(bits[:, block].sum(axis=1), cap)
        rank = np.minimum(rank, truncation)
        return MatroidRankTable(n, rank.tolist())
    if family == "knapsack":
        costs = _r3(rng.uniform(0.5, 2.0, n))
        return Knapsack(n, costs, float(_r3(0.4 * costs.sum())))
    raise ValidationError(f"constraint: unknown family {family!r}")


def _random_blocks(n, rng):
    count = min(n, int(rng.integers(2, 4)))
    perm = rng.permutation(n)
    cuts = np.sort(rng.choice(np.arange(1, n), size=count - 1, replace=False)) if count > 1 else []
    blocks = [sorted(int(e) for e in part) for part in np.split(perm, cuts)]
    caps = [int(rng.integers(1, len(b) + 1)) for b in blocks]
    return blocks, caps


def generate_instance(n: int, objective: str, constraint: str, seed: int = 0, signs: str = "mixed") -> InstanceSpec:
    ground = GroundSet(n)
    rng = np.random.default_rng(seed)
    return InstanceSpec(
        ground=ground,
        objective=random_objective(objective, n, rng),
        modular=random_modular(n, rng, signs),
        constraint=random_constraint(constraint, n, rng),
    )
