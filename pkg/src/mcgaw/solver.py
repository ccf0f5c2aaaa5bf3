"""Measured continuous greedy with adaptive weights.

Each round estimates the gradient of the multilinear extension, solves the
linear subproblem over the constraint polytope with the gradient scaled by
``(1 + delta) ** ((t - 1) / delta)`` plus the modular weights, and moves
``x`` by ``delta * z * (1 - x)``. The ``exact`` gradient mode replaces the
sampling estimator with the enumerated derivative, giving the continuous
variant on the same time grid.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import FractionalPoint, ValidationError
from .instance import InstanceSpec
from .multilinear import (
    SampleStream,
    default_sample_count,
    evaluate_exact,
    evaluate_sampled,
    gradient_exact,
    gradient_sampled,
)
from .oracles import ENUMERATION_MAX_N

MODES = ("sampled", "exact")
FEASIBILITY_TOL = 1e-7


@dataclass(frozen=True)
class SolverConfig:
    eps: float = 0.3
    delta: Optional[float] = None
    d: Optional[int] = None
    mode: str = "sampled"
    seed: int = 0

    def __post_init__(self):
        if not isinstance(self.eps, (int, float)) or not 0 < self.eps <= 1:
            raise ValidationError(f"eps: must lie in (0, 1], got {self.eps!r}")
        if self.mode not in MODES:
            raise ValidationError(f"mode: expected one of {MODES}, got {self.mode!r}")
        if self.d is not None and (isinstance(self.d, bool) or not isinstance(self.d, int) or self.d < 1):
            raise ValidationError(f"d: must be a positive integer, got {self.d!r}")
        if self.delta is not None:
            if not 0 < self.delta <= 1:
                raise ValidationError(f"delta: must lie in (0, 1], got {self.delta!r}")
            steps = round(1.0 / self.delta)
            if abs(steps * self.delta - 1.0) > 1e-9:
                raise ValidationError(f"delta: 1/delta must be an integer, got delta={self.delta!r}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ValidationError(f"seed: must be an integer in [0, 2^64), got {self.seed!r}")

    def steps(self, n: int) -> int:
        """Number of rounds, ``1/delta``."""
        if self.delta is not None:
            return round(1.0 / self.delta)
        return math.ceil(2 * n * n / self.eps)

    def step_size(self, n: int) -> float:
        return 1.0 / self.steps(n)

    def sample_count(self, n: int) -> int:
        if self.d is not None:
            return self.d
        return default_sample_count(n, self.step_size(n), self.eps)

    def to_dict(self) -> dict:
        return {"eps": self.eps, "delta": self.delta, "d": self.d, "mode": self.mode, "seed": self.seed}


@dataclass
class SolverTrace:
    """Per-round records; row ``k`` is time ``k * delta`` and the last row is ``t = 1``.

    ``z`` and ``w`` have one row fewer than ``x``: nothing is chosen at ``t = 1``.
    ``gamma`` and ``F`` hold NaN where they were not computed (sampled mode).
    """

    steps: int
    t: np.ndarray
    weight: np.ndarray
    gamma: np.ndarray
    F: np.ndarray
    L: np.ndarray
    cap: np.ndarray
    z: np.ndarray
    w: np.ndarray
    x: np.ndarray

    @property
    def delta(self) -> float:
        return 1.0 / self.steps

    def to_dict(self) -> dict:
        def opt(arr):
            return [None if math.isnan(v) else float(v) for v in arr]

        return {
            "steps": self.steps,
            "t": self.t.tolist(),
            "weight": self.weight.tolist(),
            "Gamma": opt(self.gamma),
            "F": opt(self.F),
            "L": self.L.tolist(),
            "cap": self.cap.tolist(),
            "z": self.z.tolist(),
            "w": self.w.tolist(),
            "x": self.x.tolist(),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "SolverTrace":
        def opt(values):
            return np.array([math.nan if v is None else v for v in values], dtype=np.float64)

        n = len(doc["x"][0])
        return cls(
            steps=int(doc["steps"]),
            t=np.array(doc["t"], dtype=np.float64),
            weight=np.array(doc["weight"], dtype=np.float64),
            gamma=opt(doc["Gamma"]),
            F=opt(doc["F"]),
            L=np.array(doc["L"], dtype=np.float64),
            cap=np.array(doc["cap"], dtype=np.float64),
            z=np.array(doc["z"], dtype=np.float64).reshape(-1, n),
            w=np.array(doc["w"], dtype=np.float64).reshape(-1, n),
            x=np.array(doc["x"], dtype=np.float64).reshape(-1, n),
        )

    def to_csv(self) -> str:
        n = self.x.shape[1]
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["t", "weight", "Gamma", "F", "L"] + [f"z_{i}" for i in range(n)] + [f"x_{i}" for i in range(n)])

        def fmt(v):
            return "" if math.isnan(v) else format(float(v), ".17g")

        for k in range(self.t.size):
            z = [fmt(v) for v in self.z[k]] if k < self.steps else [""] * n
            writer.writerow(
                [fmt(self.t[k]), fmt(self.weight[k]), fmt(self.gamma[k]), fmt(self.F[k]), fmt(self.L[k])]
                + z
                + [fmt(v) for v in self.x[k]]
            )
        return buf.getvalue()


@dataclass
class SolverResult:
    x_final: FractionalPoint
    F_estimate: float
    F_exact: bool
    L_value: float
    trace: SolverTrace
    config: SolverConfig
    F_samples: Optional[int] = None

    @property
    def value(self) -> float:
        return self.F_estimate + self.L_value


def adaptive_weight(t: float, delta: float) -> float:
    """``(1 + delta) ** ((t - 1) / delta)``, rising from about ``1/e`` to 1."""
    return math.exp((t - 1.0) / delta * math.log1p(delta))


def _round_weight(k: int, steps: int) -> float:
    # exponent (t-1)/delta == k - steps exactly on the grid
    return math.exp((k - steps) * math.log1p(1.0 / steps))


def coordinate_cap(k: int, steps: int) -> float:
    """Upper bound ``1 - (1 - delta) ** (t / delta)`` on every coordinate at round ``k``."""
    return -math.expm1(k * math.log1p(-1.0 / steps))


def solve(instance: InstanceSpec, config: SolverConfig) -> SolverResult:
    oracle = instance.objective
    ell = instance.modular.weights
    P = instance.constraint
    n = instance.n
    exact = config.mode == "exact"
    enumerable = n <= ENUMERATION_MAX_N

    steps = config.steps(n)
    delta = 1.0 / steps
    d = None if exact else config.sample_count(n)
    stream = SampleStream(config.seed)

    t = np.empty(steps + 1)
    weight = np.empty(steps + 1)
    gamma = np.full(steps + 1, math.nan)
    F_vals = np.full(steps + 1, math.nan)
    L_vals = np.empty(steps + 1)
    cap = np.empty(steps + 1)
    zs = np.empty((steps, n))
    ws = np.empty((steps, n))
    xs = np.empty((steps + 1, n))

    x = np.zeros(n)
    for k in range(steps + 1):
        t[k] = k / steps
        weight[k] = _round_weight(k, steps)
        cap[k] = coordinate_cap(k, steps)
        xs[k] = x
        L_vals[k] = float(np.dot(ell, x))
        if exact:
            F_vals[k] = evaluate_exact(oracle, x)
            gamma[k] = weight[k] * F_vals[k] + L_vals[k]
        if k == steps:
            break

        if exact:
            grad = gradient_exact(oracle, x).values
        else:
            grad = gradient_sampled(oracle, x, d, stream, timestep=k).values
        combined = weight[k] * grad + ell
        direction = P.linear_max(combined * (1.0 - x))
        ws[k] = grad
        zs[k] = direction.z
        x = x + delta * direction.z * (1.0 - x)

    x_final = FractionalPoint(x)
    if enumerable:
        F_final = float(F_vals[steps]) if exact else evaluate_exact(oracle, x)
        F_samples = None
    else:
        F_samples = config.sample_count(n)
        F_final = evaluate_sampled(oracle, x, F_samples, stream, timestep=steps)

    trace = SolverTrace(
        steps=steps, t=t, weight=weight, gamma=gamma, F=F_vals, L=L_vals, cap=cap, z=zs, w=ws, x=xs,
    )
    return SolverResult(
        x_final=x_final,
        F_estimate=F_final,
        F_exact=enumerable,
        L_value=float(np.dot(ell, x)),
        trace=trace,
        config=config,
        F_samples=F_samples,
    )


def solve_report(instance: InstanceSpec, result: SolverResult) -> dict:
    """The JSON document written by ``solve --report``."""
    return {
        "instance_digest": instance.digest(),
        "n": instance.n,
        "config": result.config.to_dict(),
        "steps": result.trace.steps,
        "sample_count": None if result.config.mode == "exact" else result.config.sample_count(instance.n),
        "x_final": result.x_final.coords.tolist(),
        "F_estimate": result.F_estimate,
        "F_exact": result.F_exact,
        "F_samples": result.F_samples,
        "L_value": result.L_value,
        "value": result.value,
        "trace": result.trace.to_dict(),
    }
