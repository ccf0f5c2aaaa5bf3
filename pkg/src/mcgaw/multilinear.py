"""Multilinear extension ``F(x) = E[f(R_x)]`` and its partial derivatives.

Exact routines contract the oracle's value table one coordinate at a time,
which costs O(2**n) per point. Sampled routines draw random sets from a
:class:`SampleStream` whose draws depend only on ``(seed, timestep, j, s)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import SizeError, as_coords, bits_to_masks
from .oracles import ENUMERATION_MAX_N, SetFunction

QUOTIENT_MIN_DENOMINATOR = 1e-6
# cap on (points * table size) held in memory by one contraction pass
_BATCH_BUDGET = 1 << 22


@dataclass(frozen=True)
class GradientEstimate:
    values: np.ndarray
    mode: str
    sample_count: Optional[int] = None


@dataclass(frozen=True)
class SampleStream:
    """Deterministic Bernoulli source keyed by ``(seed, timestep)``.

    One timestep yields a ``(d, n)`` block of uniforms; entry ``(j, s)``
    decides whether element ``s`` joins sample set ``j``. The block is drawn
    in one call, so results never depend on how callers split the work.
    """

    seed: int = 0

    def uniforms(self, timestep: int, d: int, n: int) -> np.ndarray:
        seq = np.random.SeedSequence(entropy=int(self.seed), spawn_key=(int(timestep),))
        return np.random.Generator(np.random.Philox(seq)).random((d, n))

    def sample_masks(self, x: np.ndarray, d: int, timestep: int = 0) -> np.ndarray:
        u = self.uniforms(timestep, d, x.size)
        return bits_to_masks(u < x[None, :])


def _require_enumerable(n: int) -> None:
    if n > ENUMERATION_MAX_N:
        raise SizeError(f"exact enumeration needs n <= {ENUMERATION_MAX_N}, got n={n}")


def _contract(table: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Evaluate the multilinear extension of ``table`` at each row of ``points``."""
    n_points, n = points.shape
    chunk = max(1, _BATCH_BUDGET >> n)
    out = np.empty(n_points)
    for start in range(0, n_points, chunk):
        block = points[start:start + chunk]
        p = block.shape[0]
        v = np.broadcast_to(table[:, None], (table.size, p))
        for i in range(n):
            v = v.reshape(-1, 2, p)
            xi = block[:, i]
            v = v[:, 0, :] * (1.0 - xi) + v[:, 1, :] * xi
        out[start:start + p] = v.reshape(p)
    return out


def evaluate_exact(oracle: SetFunction, x) -> float:
    """``F(x)`` by full enumeration of the ``2**n`` subsets."""
    _require_enumerable(oracle.n)
    coords = as_coords(x, oracle.n)
    return float(_contract(oracle.table(), coords[None, :])[0])


def evaluate_exact_many(oracle: SetFunction, points) -> np.ndarray:
    _require_enumerable(oracle.n)
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    return _contract(oracle.table(), points)


def evaluate_sampled(oracle: SetFunction, x, d: int, stream: SampleStream, timestep: int = 0) -> float:
    if d < 1:
        raise ValueError(f"sample count must be >= 1, got {d}")
    coords = as_coords(x, oracle.n)
    masks = stream.sample_masks(coords, d, timestep)
    return float(np.mean(oracle.evaluate_many(masks)))


def gradient_exact(oracle: SetFunction, x) -> GradientEstimate:
    """Partial derivatives as ``F(x with x_s=1) - F(x with x_s=0)``.

    Multilinearity makes this identical to ``F(x v 1_s) - F(x ^ 1_{S-s})``.
    """
    _require_enumerable(oracle.n)
    coords = as_coords(x, oracle.n)
    n = coords.size
    points = np.repeat(coords[None, :], 2 * n, axis=0)
    idx = np.arange(n)
    points[idx, idx] = 1.0
    points[n + idx, idx] = 0.0
    vals = _contract(oracle.table(), points)
    return GradientEstimate(values=vals[:n] - vals[n:], mode="exact")


def gradient_sampled(oracle: SetFunction, x, d: int, stream: SampleStream, timestep: int = 0) -> GradientEstimate:
    """Average of ``f(R_j + s) - f(R_j - s)`` over ``d`` shared random sets.

    ``s`` is removed from ``R_j`` unconditionally before taking the marginal.
    """
    if d < 1:
        raise ValueError(f"sample count must be >= 1, got {d}")
    coords = as_coords(x, oracle.n)
    n = coords.size
    masks = stream.sample_masks(coords, d, timestep)
    bit = (np.uint64(1) << np.arange(n, dtype=np.uint64))[:, None]
    with_s = masks[None, :] | bit
    without_s = masks[None, :] & ~bit
    vals = oracle.evaluate_many(np.concatenate([with_s.ravel(), without_s.ravel()]))
    diffs = (vals[: n * d] - vals[n * d:]).reshape(n, d)
    return GradientEstimate(values=diffs.sum(axis=1) / d, mode="sampled", sample_count=d)


def default_sample_count(n: int, delta: float, eps: float) -> int:
    """``ceil(n^2 ln(n^2/delta) / (2 eps^2))``, at least 1."""
    if not 0 < delta <= 1 or not 0 < eps <= 1:
        raise ValueError(f"need 0 < delta <= 1 and 0 < eps <= 1, got delta={delta}, eps={eps}")
    raw = n * n * math.log(n * n / delta) / (2.0 * eps * eps)
    return max(1, math.ceil(raw))


def first_order_forms(oracle: SetFunction, x, s: int) -> tuple:
    """The four equivalent expressions for the partial derivative in ``s``.

    Returns ``(up_quotient, down_quotient, difference, expected_marginal)``.
    The quotient forms are ``None`` when their denominator is below
    ``QUOTIENT_MIN_DENOMINATOR``. The last form is a direct probability-weighted
    sum over subsets and shares no code with the contraction path.
    """
    _require_enumerable(oracle.n)
    coords = np.array(as_coords(x, oracle.n))
    up = coords.copy()
    up[s] = 1.0
    down = coords.copy()
    down[s] = 0.0
    f_x, f_up, f_down = evaluate_exact_many(oracle, np.stack([coords, up, down]))

    up_q = (f_up - f_x) / (1.0 - coords[s]) if 1.0 - coords[s] > QUOTIENT_MIN_DENOMINATOR else None
    down_q = (f_x - f_down) / coords[s] if coords[s] > QUOTIENT_MIN_DENOMINATOR else None

    table = oracle.table()
    n = oracle.n
    masks = np.arange(1 << n, dtype=np.int64)
    bits = ((masks[:, None] >> np.arange(n)) & 1).astype(bool)
    probs = np.prod(np.where(bits, coords, 1.0 - coords), axis=1)
    b = 1 << s
    expected = float(np.sum(probs * (table[masks | b] - table[masks & ~b])))
    return up_q, down_q, float(f_up - f_down), expected
