"""Maximize a multilinear extension plus a modular term over a down-closed polytope."""

from .core import (
    DomainError,
    ElementSet,
    FractionalPoint,
    GroundSet,
    McgError,
    SchemaError,
    SizeError,
    ValidationError,
)
from .instance import InstanceSpec, load_instance, parse_instance, serialize_instance
from .multilinear import (
    GradientEstimate,
    SampleStream,
    default_sample_count,
    evaluate_exact,
    evaluate_sampled,
    gradient_exact,
    gradient_sampled,
)
from .oracles import ModularWeights, SetFunction
from .polytope import Polytope, UpdateDirection
from .solver import SolverConfig, SolverResult, SolverTrace, adaptive_weight, solve
from .verify import (
    OptimalityCertificate,
    brute_force_opt,
    check_guarantee,
    guarantee_bound,
    guarantee_bound_monotone,
    reduction_modular,
)

__version__ = "0.1.0"

__all__ = [
    "InstanceSpec",
    "load_instance",
    "parse_instance",
    "serialize_instance",
    "ModularWeights",
    "SetFunction",
    "Polytope",
    "UpdateDirection",
    "SolverConfig",
    "SolverResult",
    "SolverTrace",
    "adaptive_weight",
    "solve",
    "DomainError",
    "ElementSet",
    "FractionalPoint",
    "GroundSet",
    "McgError",
    "SchemaError",
    "SizeError",
    "ValidationError",
    "GradientEstimate",
    "SampleStream",
    "default_sample_count",
    "evaluate_exact",
    "evaluate_sampled",
    "gradient_exact",
    "gradient_sampled",
    "OptimalityCertificate",
    "brute_force_opt",
    "check_guarantee",
    "guarantee_bound",
    "guarantee_bound_monotone",
    "reduction_modular",
]
