"""Instance description and its JSON file format."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass

from . import oracles, polytope
from .core import GroundSet, SchemaError, ValidationError
from .oracles import ModularWeights, SetFunction
from .polytope import Polytope

TOP_LEVEL_KEYS = {"n", "labels", "objective", "modular", "constraint"}
REQUIRED_KEYS = {"n", "objective", "modular", "constraint"}


@dataclass(frozen=True, eq=False)
class InstanceSpec:
    ground: GroundSet
    objective: SetFunction
    modular: ModularWeights
    constraint: Polytope

    def __post_init__(self):
        n = self.ground.n
        for what, obj in (("objective", self.objective), ("modular", self.modular), ("constraint", self.constraint)):
            if obj.n != n:
                raise ValidationError(f"{what}: built for n={obj.n}, ground set has n={n}")

    @property
    def n(self) -> int:
        return self.ground.n

    def to_dict(self) -> dict:
        doc = {"n": self.n}
        if self.ground.labels is not None:
            doc["labels"] = list(self.ground.labels)
        doc["objective"] = {"family": self.objective.family, **self.objective.params()}
        doc["modular"] = self.modular.weights.tolist()
        doc["constraint"] = {"family": self.constraint.family, **self.constraint.params()}
        return doc

    def digest(self) -> str:
        return hashlib.sha256(serialize_instance(self).encode("utf-8")).hexdigest()

    def __eq__(self, other):
        if not isinstance(other, InstanceSpec):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def __hash__(self):
        return hash(self.digest())


def _family_block(doc: dict, key: str, families: dict):
    block = doc[key]
    if not isinstance(block, dict):
        raise SchemaError(f"{key}: expected an object")
    family = block.get("family")
    if family not in families:
        raise SchemaError(f"{key}.family: expected one of {sorted(families)}, got {family!r}")
    _, allowed = families[family]
    params = {k: v for k, v in block.items() if k != "family"}
    unknown = sorted(set(params) - set(allowed))
    if unknown:
        raise SchemaError(f"{key}.{unknown[0]}: unknown key for family {family!r}")
    optional = {"uweights"}
    missing = sorted(set(allowed) - set(params) - optional)
    if missing:
        raise SchemaError(f"{key}.{missing[0]}: missing for family {family!r}")
    return family, params


def _check_shapes(key: str, family: str, params: dict) -> None:
    """Structural type checks; value-range checks belong to the constructors."""
    def numbers(value, where, depth=1):
        if depth == 0:
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise SchemaError(f"{where}: expected a number, got {value!r}")
            return
        if not isinstance(value, list):
            raise SchemaError(f"{where}: expected an array")
        for i, item in enumerate(value):
            numbers(item, f"{where}[{i}]", depth - 1)

    nested = {"sets": 2, "arcs": 2, "service": 2, "blocks": 2}
    scalar = {"universe_size", "k", "budget"}
    for name, value in params.items():
        where = f"{key}.{name}"
        if name in scalar:
            numbers(value, where, depth=0)
        else:
            numbers(value, where, depth=nested.get(name, 1))


def parse_instance(text: str) -> InstanceSpec:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"document: invalid JSON ({exc})") from exc
    return instance_from_dict(doc)


def instance_from_dict(doc) -> InstanceSpec:
    if not isinstance(doc, dict):
        raise SchemaError("document: expected a JSON object at top level")
    unknown = sorted(set(doc) - TOP_LEVEL_KEYS)
    if unknown:
        raise SchemaError(f"{unknown[0]}: unknown top-level key")
    missing = sorted(REQUIRED_KEYS - set(doc))
    if missing:
        raise SchemaError(f"{missing[0]}: required key missing")

    n = doc["n"]
    if isinstance(n, bool) or not isinstance(n, int):
        raise SchemaError(f"n: expected an integer, got {n!r}")
    labels = doc.get("labels")
    if labels is not None:
        if not isinstance(labels, list) or not all(isinstance(s, str) for s in labels):
            raise SchemaError("labels: expected an array of strings")
        labels = tuple(labels)
    ground = GroundSet(n, labels)

    modular = doc["modular"]
    if not isinstance(modular, list) or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in modular):
        raise SchemaError("modular: expected an array of numbers")
    if len(modular) != n:
        raise ValidationError(f"modular: expected {n} weights, got {len(modular)}")
    if not all(math.isfinite(v) for v in modular):
        raise ValidationError("modular: non-finite weight")

    obj_family, obj_params = _family_block(doc, "objective", oracles.FAMILIES)
    _check_shapes("objective", obj_family, obj_params)
    con_family, con_params = _family_block(doc, "constraint", polytope.FAMILIES)
    _check_shapes("constraint", con_family, con_params)

    return InstanceSpec(
        ground=ground,
        objective=oracles.oracle_from_params(n, obj_family, obj_params),
        modular=ModularWeights(modular),
        constraint=polytope.polytope_from_params(n, con_family, con_params),
    )


def serialize_instance(spec: InstanceSpec) -> str:
    return json.dumps(spec.to_dict(), indent=None, separators=(", ", ": ")) + "\n"


def load_instance(path) -> InstanceSpec:
    with open(path, encoding="utf-8") as fh:
        return parse_instance(fh.read())
