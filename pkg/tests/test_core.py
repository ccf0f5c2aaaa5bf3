import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mcgaw.core import (
    ElementSet,
    FractionalPoint,
    GroundSet,
    SchemaError,
    ValidationError,
    canonical_json,
)
from mcgaw.generate import CONSTRAINTS, OBJECTIVES, generate_instance
from mcgaw.instance import parse_instance, serialize_instance

MINIMAL = {
    "n": 2,
    "objective": {"family": "modular_nonneg", "weights": [1.0, 2.0]},
    "modular": [0.5, -0.5],
    "constraint": {"family": "cardinality", "k": 1},
}


def doc(**changes):
    d = json.loads(json.dumps(MINIMAL))
    d.update(changes)
    return json.dumps(d)


def test_parse_minimal():
    spec = parse_instance(doc())
    assert spec.n == 2
    assert spec.objective.family == "modular_nonneg"
    assert spec.constraint.k == 1


def test_out_of_range_coverage_index():
    text = doc(objective={"family": "coverage", "universe_size": 2, "sets": [[0], [2]]})
    with pytest.raises(ValidationError, match=r"objective\.sets\[1\]"):
        parse_instance(text)


def test_element_index_n_in_cut_arc_rejected():
    with pytest.raises(ValidationError, match=r"arcs\[0\]\[1\]"):
        parse_instance(doc(objective={"family": "cut", "arcs": [[0, 2, 1.0]]}))


@pytest.mark.parametrize("n", [0, 64])
def test_n_outside_range(n):
    with pytest.raises(ValidationError, match="n"):
        parse_instance(doc(n=n))


def test_negative_knapsack_cost():
    with pytest.raises(ValidationError, match="costs"):
        parse_instance(doc(constraint={"family": "knapsack", "costs": [1.0, -1.0], "budget": 1.0}))


@pytest.mark.parametrize(
    "text, field",
    [
        ("not json", "document"),
        (json.dumps([1, 2]), "document"),
        (doc(extra=1), "extra"),
        (doc(n="2"), "n"),
        (doc(objective={"family": "nope"}), "objective.family"),
        (doc(objective={"family": "cut", "arcs": [], "bogus": 1}), "objective.bogus"),
        (doc(constraint={"family": "cardinality"}), "constraint.k"),
        (doc(modular="x"), "modular"),
        (doc(labels=[1, 2]), "labels"),
    ],
)
def test_schema_errors_name_field(text, field):
    with pytest.raises(SchemaError, match=field.replace(".", r"\.")):
        parse_instance(text)


def test_missing_required_key():
    d = dict(MINIMAL)
    del d["modular"]
    with pytest.raises(SchemaError, match="modular"):
        parse_instance(json.dumps(d))


def test_modular_length_mismatch():
    with pytest.raises(ValidationError, match="modular"):
        parse_instance(doc(modular=[1.0]))


def test_trivial_round_trip():
    text = json.dumps({
        "n": 1,
        "objective": {"family": "table", "values": [0.0, 1.0]},
        "modular": [0.0],
        "constraint": {"family": "cardinality", "k": 1},
    })
    spec = parse_instance(text)
    assert parse_instance(serialize_instance(spec)) == spec


def test_labels_preserved():
    spec = parse_instance(doc(labels=["left", "right"]))
    again = parse_instance(serialize_instance(spec))
    assert again.ground.labels == ("left", "right")
    assert again == spec


def test_duplicate_labels_rejected():
    with pytest.raises(ValidationError, match="labels"):
        parse_instance(doc(labels=["a", "a"]))


@settings(max_examples=60, deadline=None)
@given(
    n=st.integers(1, 9),
    objective=st.sampled_from(OBJECTIVES),
    constraint=st.sampled_from(CONSTRAINTS),
    seed=st.integers(0, 2**32),
)
def test_round_trip_generated(n, objective, constraint, seed):
    spec = generate_instance(n, objective, constraint, seed=seed)
    text = serialize_instance(spec)
    again = parse_instance(text)
    assert again == spec
    assert serialize_instance(again) == text


def test_fractional_point_never_clamps():
    with pytest.raises(ValidationError, match=r"coords\[1\]"):
        FractionalPoint([0.5, 1.0000001])
    with pytest.raises(ValidationError):
        FractionalPoint([-1e-12])
    x = FractionalPoint([0.0, 1.0])
    assert x.coords.tolist() == [0.0, 1.0]
    with pytest.raises(ValueError):
        x.coords[0] = 0.5


def test_element_set_bitmask():
    S = ElementSet.from_members([0, 3], 5)
    assert S.mask == 0b1001
    assert 3 in S and 1 not in S
    assert len(S) == 2
    assert list(S.add(1)) == [0, 1, 3]
    with pytest.raises(ValidationError):
        ElementSet.from_members([5], 5)


def test_ground_set_invariants():
    assert GroundSet(63).full_mask == 2**63 - 1
    with pytest.raises(ValidationError):
        GroundSet(3, ("a", "b"))


def test_canonical_json_is_sorted_with_17_digits():
    text = canonical_json({"b": 0.1, "a": [1, None, True], "c": {"z": 1.0 / 3.0, "y": "s"}})
    assert text == '{"a": [1, null, true], "b": 0.10000000000000001, "c": {"y": "s", "z": 0.33333333333333331}}\n'
    assert json.loads(text)["c"]["z"] == 1.0 / 3.0
    with pytest.raises(ValueError):
        canonical_json(float("inf"))


def test_instance_immutability_and_digest_stable():
    spec = generate_instance(5, "cut", "knapsack", seed=4)
    assert spec.digest() == parse_instance(serialize_instance(spec)).digest()
    with pytest.raises(Exception):
        spec.n = 3
    assert isinstance(spec.modular.weights, np.ndarray)
    with pytest.raises(ValueError):
        spec.modular.weights[0] = 1.0
