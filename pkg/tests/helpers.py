"""Independent reference computations used as test oracles.

Nothing here calls the package's enumeration or contraction code; values are
computed with plain Python loops over subsets.
"""

import itertools
import math

import numpy as np

from mcgaw.core import GroundSet
from mcgaw.instance import InstanceSpec
from mcgaw.oracles import CoverageFunction, CutFunction, ModularWeights, TableFunction
from mcgaw.polytope import Cardinality


def subsets(n):
    for mask in range(1 << n):
        yield mask, [s for s in range(n) if mask >> s & 1]


def brute_F(f, x):
    """Multilinear extension by explicit sum over subsets; ``f`` maps a mask to a value."""
    n = len(x)
    total = 0.0
    for mask, members in subsets(n):
        p = 1.0
        for s in range(n):
            p *= x[s] if mask >> s & 1 else 1.0 - x[s]
        total += p * f(mask)
    return total


def brute_opt(instance, feasible):
    """Best ``(value, mask)`` over subsets accepted by ``feasible(members)``."""
    f = instance.objective
    ell = instance.modular.weights
    best = None
    for mask, members in subsets(instance.n):
        if not feasible(members):
            continue
        value = f.evaluate(mask) + sum(ell[s] for s in members)
        if best is None or value > best[0]:
            best = (value, mask)
    return best


def knapsack_vertices(costs, budget):
    """Vertices of ``{0 <= x <= 1, <c, x> <= B}``: integral points plus one fractional coordinate."""
    n = len(costs)
    out = []
    for bits in itertools.product((0, 1), repeat=n):
        used = sum(c for c, b in zip(costs, bits) if b)
        if used <= budget + 1e-12:
            out.append(np.array(bits, dtype=float))
            for j in range(n):
                if not bits[j]:
                    frac = (budget - used) / costs[j]
                    if 0 < frac < 1:
                        v = np.array(bits, dtype=float)
                        v[j] = frac
                        out.append(v)
    return out


def two_node_cut():
    """Arc 0 -> 1 with weight 1; the standard non-monotone witness."""
    return CutFunction(2, [[0, 1, 1.0]])


def pq_coverage():
    """Universe {p, q}; s1 = {p}, s2 = {p, q}; unit weights."""
    return CoverageFunction(2, 2, [[0], [0, 1]], [1.0, 1.0])


def zero_instance():
    """f identically 0, l = (5, -2), cardinality 2."""
    return InstanceSpec(
        ground=GroundSet(2),
        objective=TableFunction(2, [0.0, 0.0, 0.0, 0.0]),
        modular=ModularWeights([5.0, -2.0]),
        constraint=Cardinality(2, 2),
    )


def cut_instance():
    return InstanceSpec(
        ground=GroundSet(2, ("a", "b")),
        objective=two_node_cut(),
        modular=ModularWeights([0.0, 0.0]),
        constraint=Cardinality(2, 2),
    )


def measured_recursion(steps):
    """Closed form of ``x <- x + delta (1 - x)`` after ``steps`` rounds from 0."""
    return 1.0 - (1.0 - 1.0 / steps) ** steps


def is_submodular_brute(f, n, tol=1e-9):
    vals = {mask: f.evaluate(mask) for mask in range(1 << n)}
    for S in range(1 << n):
        for T in range(1 << n):
            if S & ~T:
                continue
            for s in range(n):
                b = 1 << s
                if T & b:
                    continue
                if vals[S | b] - vals[S] < vals[T | b] - vals[T] - tol:
                    return False
    return True


E = math.e
