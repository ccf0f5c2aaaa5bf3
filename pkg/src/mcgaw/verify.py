"""Brute-force certificates and approximation-guarantee checks at desk scale."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

import numpy as np

from .core import DomainError, SizeError, members, popcount
from .instance import InstanceSpec
from .multilinear import evaluate_exact
from .oracles import ENUMERATION_MAX_N, ModularWeights, SetFunction
from .solver import FEASIBILITY_TOL, SolverConfig, SolverResult, solve

INV_E = math.exp(-1.0)
BETA_INF = "inf"
BETA_UNDEFINED = "undefined"
CAP_SLACK = 1e-9
HARDNESS_RATIO = Fraction(478, 1000)

Beta = Union[float, str]


@dataclass(frozen=True)
class OptimalityCertificate:
    n: int
    opt_mask: int
    f_opt: float
    l_opt: float
    sum_pos: float
    sum_neg: float
    tau: float
    monotone: bool = False

    @property
    def opt_set(self) -> list[int]:
        return members(self.opt_mask)

    @property
    def value(self) -> float:
        return self.f_opt + self.l_opt

    @property
    def beta(self) -> Beta:
        """Ratio of the positive to the (absolute) negative modular part of OPT.

        Returns :data:`BETA_INF` or :data:`BETA_UNDEFINED` instead of
        floating-point sentinels.
        """
        if self.sum_neg == 0:
            return BETA_UNDEFINED if self.sum_pos == 0 else BETA_INF
        return self.sum_pos / -self.sum_neg

    def to_dict(self) -> dict:
        return {
            "opt_mask": self.opt_mask,
            "opt_set": self.opt_set,
            "f_opt": self.f_opt,
            "l_opt": self.l_opt,
            "sum_pos": self.sum_pos,
            "sum_neg": self.sum_neg,
            "beta": self.beta,
            "tau": self.tau,
        }


def certificate_from_set(instance: InstanceSpec, mask: int) -> OptimalityCertificate:
    weights = instance.modular.weights
    sum_pos = 0.0
    sum_neg = 0.0
    for s in members(mask):
        if weights[s] >= 0:
            sum_pos += weights[s]
        else:
            sum_neg += weights[s]
    return OptimalityCertificate(
        n=instance.n,
        opt_mask=int(mask),
        f_opt=instance.objective.evaluate(mask),
        l_opt=sum_pos + sum_neg,
        sum_pos=float(sum_pos),
        sum_neg=float(sum_neg),
        tau=instance.objective.tau,
        monotone=instance.objective.monotone,
    )


def brute_force_opt(instance: InstanceSpec) -> OptimalityCertificate:
    """Exhaustive argmax of ``f(S) + l(S)`` over feasible sets; ties go to the smallest mask."""
    if instance.n > ENUMERATION_MAX_N:
        raise SizeError(f"brute force needs n <= {ENUMERATION_MAX_N}, got n={instance.n}")
    masks = instance.constraint.enumerate_feasible_sets()
    totals = instance.objective.evaluate_many(masks) + instance.modular.value_many(masks)
    best = int(masks[int(np.argmax(totals))])
    return certificate_from_set(instance, best)


def guarantee_bound(cert: OptimalityCertificate, eps: float) -> float:
    """Lower bound for the general (non-monotone) case, in split form.

    ``(1/e - eps) * (f_opt + sum_pos) + sum_neg - 8 * eps * tau``; unlike the
    beta-factored form it stays finite at beta = 1.
    """
    return (INV_E - eps) * cert.f_opt + (INV_E - eps) * cert.sum_pos + cert.sum_neg - 8.0 * eps * cert.tau


def guarantee_bound_monotone(cert: OptimalityCertificate, eps: float, lam: float = 1.0) -> float:
    if not cert.monotone:
        raise DomainError("monotone bound requested for a non-monotone objective")
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda must lie in [0, 1], got {lam}")
    modular = (INV_E - eps) * cert.sum_pos + cert.sum_neg
    return (-math.expm1(-lam) - eps) * cert.f_opt + lam * modular - 8.0 * eps * cert.tau


def modular_coefficient(cert: OptimalityCertificate, eps: float):
    """Effective factor multiplying ``l(OPT)`` in the split-form bound, or ``None`` when ``l(OPT) = 0``."""
    if cert.sum_neg == 0 and cert.sum_pos > 0:
        return INV_E - eps
    if cert.sum_pos == 0 and cert.sum_neg < 0:
        return 1.0
    if cert.l_opt == 0:
        return None
    return ((INV_E - eps) * cert.sum_pos + cert.sum_neg) / cert.l_opt


def factored_modular_factor(beta: Beta):
    """``(beta - e) / (e (beta - 1))`` with its limits; ``None`` where it is 0/0 or undefined."""
    if beta == BETA_UNDEFINED:
        return None
    if beta == BETA_INF:
        return INV_E
    if beta == 1:
        return None
    return (beta - math.e) / (math.e * (beta - 1.0))


@dataclass
class TraceViolations:
    cap: int = 0
    infeasible: int = 0
    gamma_drop: int = 0

    @property
    def total(self) -> int:
        return self.cap + self.infeasible + self.gamma_drop

    def to_dict(self) -> dict:
        return {"cap": self.cap, "infeasible": self.infeasible, "gamma_drop": self.gamma_drop}


def trace_violations(instance: InstanceSpec, result: SolverResult) -> TraceViolations:
    """Count per-step breaches of the coordinate cap, feasibility and surrogate growth.

    Surrogate growth ``Gamma(t + delta) >= Gamma(t) - 8 eps tau delta`` is only
    checked when Gamma was recorded (exact mode).
    """
    tr = result.trace
    out = TraceViolations()
    out.cap = int(np.sum(tr.x > tr.cap[:, None] + CAP_SLACK))
    P = instance.constraint
    out.infeasible = sum(not P.is_feasible(row, FEASIBILITY_TOL) for row in tr.x)
    if not np.any(np.isnan(tr.gamma)):
        slack = 8.0 * result.config.eps * instance.objective.tau * tr.delta
        out.gamma_drop = int(np.sum(np.diff(tr.gamma) < -slack))
    return out


@dataclass
class GuaranteeReport:
    instance_digest: str
    config: SolverConfig
    certificate: OptimalityCertificate
    bound_kind: str
    bound: float
    achieved: list = field(default_factory=list)
    violations: list = field(default_factory=list)
    seeds: list = field(default_factory=list)

    @property
    def trials(self) -> int:
        return len(self.achieved)

    @property
    def pass_fraction(self) -> float:
        if not self.achieved:
            return 0.0
        return sum(a >= self.bound for a in self.achieved) / len(self.achieved)

    @property
    def required_fraction(self) -> float:
        return required_fraction(self.config.mode, self.certificate.n)

    @property
    def passed(self) -> bool:
        return bool(self.achieved) and self.pass_fraction >= self.required_fraction

    def to_dict(self) -> dict:
        return {
            "instance_digest": self.instance_digest,
            "n": self.certificate.n,
            "config": self.config.to_dict(),
            "certificate": self.certificate.to_dict(),
            "bound_kind": self.bound_kind,
            "bound": self.bound,
            "achieved": list(self.achieved),
            "seeds": list(self.seeds),
            "trace_violations": [v.to_dict() for v in self.violations],
            "trials": self.trials,
            "pass_fraction": self.pass_fraction,
            "required_fraction": self.required_fraction,
            "passed": self.passed,
        }


def required_fraction(mode: str, n: int) -> float:
    """Exact mode must pass every trial; sampled mode tolerates a ``3/n`` failure rate."""
    if mode == "exact":
        return 1.0
    return max(0.0, 1.0 - 3.0 / n)


def report_passes(doc: dict) -> bool:
    """Recompute the pass decision of a stored :class:`GuaranteeReport` document."""
    achieved = doc["achieved"]
    if not achieved:
        return False
    frac = sum(a >= doc["bound"] for a in achieved) / len(achieved)
    return frac >= required_fraction(doc["config"]["mode"], doc["n"])


def achieved_value(instance: InstanceSpec, result: SolverResult) -> float:
    """``F(x_1) + L(x_1)`` with ``F`` evaluated exactly."""
    return evaluate_exact(instance.objective, result.x_final) + result.L_value


def check_guarantee(instance: InstanceSpec, config: SolverConfig, trials: int = 1,
                    cert: OptimalityCertificate = None) -> GuaranteeReport:
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if instance.n > ENUMERATION_MAX_N:
        raise SizeError(f"guarantee checks need n <= {ENUMERATION_MAX_N}, got n={instance.n}")
    cert = brute_force_opt(instance) if cert is None else cert
    if cert.monotone:
        kind, bound = "monotone", guarantee_bound_monotone(cert, config.eps, 1.0)
    else:
        kind, bound = "general", guarantee_bound(cert, config.eps)
    report = GuaranteeReport(
        instance_digest=instance.digest(), config=config, certificate=cert, bound_kind=kind, bound=bound,
    )
    for i in range(trials):
        seed = (config.seed + i) % 2**64
        trial_config = SolverConfig(eps=config.eps, delta=config.delta, d=config.d, mode=config.mode, seed=seed)
        result = solve(instance, trial_config)
        report.seeds.append(seed)
        report.achieved.append(achieved_value(instance, result))
        report.violations.append(trace_violations(instance, result))
    return report


def reduction_weight(m, k: int) -> Fraction:
    if k < 1:
        raise ValueError("k must be >= 1")
    return Fraction(m) / k


def reduction_modular(m: float, k: int, n: int) -> ModularWeights:
    """Uniform modular weights ``m / k`` so that ``l(S) = (m / k) |S|``."""
    if not m > 0:
        raise ValueError("m must be > 0")
    return ModularWeights(np.full(n, float(reduction_weight(m, k))))


def reduction_residuals(oracle: SetFunction, m, k: int) -> list[Fraction]:
    """``f(S) - [(f + l)(S) - (m/k)|S|]`` for every ``S``, in exact rational arithmetic."""
    weight = reduction_weight(m, k)
    table = oracle.table()
    out = []
    for mask in range(1 << oracle.n):
        f = Fraction(float(table[mask]))
        ell = sum((weight for _ in members(mask)), Fraction(0))
        out.append(f - ((f + ell) - weight * popcount(mask)))
    return out


def reduction_lower_bound(f_opt, l_opt, m, k: int, size: int, lam, ratio: Fraction = HARDNESS_RATIO) -> Fraction:
    """Lower bound on ``f(S)`` implied by ``f(S) + l(S) >= ratio f(OPT) + lam l(OPT)``.

    Equals ``ratio f(OPT) + lam l(OPT) - (m/k)|S|``; with ``l(OPT) = m`` and
    ``lam = |S| / k`` the modular terms cancel.
    """
    return ratio * Fraction(f_opt) + Fraction(lam) * Fraction(l_opt) - reduction_weight(m, k) * size
