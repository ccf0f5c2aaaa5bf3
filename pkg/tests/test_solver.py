import csv
import io
import math

import numpy as np
import pytest

from helpers import measured_recursion, zero_instance
from mcgaw.core import GroundSet, SizeError, ValidationError
from mcgaw.generate import generate_instance
from mcgaw.instance import InstanceSpec
from mcgaw.multilinear import evaluate_exact
from mcgaw.oracles import ModularWeights, NonnegModularFunction
from mcgaw.polytope import Cardinality
from mcgaw.solver import SolverConfig, SolverTrace, adaptive_weight, coordinate_cap, solve
from mcgaw.verify import trace_violations


def test_zero_objective_closed_form():
    result = solve(zero_instance(), SolverConfig(eps=0.3, mode="exact"))
    steps = result.trace.steps
    assert steps == math.ceil(2 * 4 / 0.3)
    expected = measured_recursion(steps)
    assert result.x_final.coords[0] == pytest.approx(expected, abs=1e-12)
    assert result.x_final.coords[1] == 0.0
    assert result.L_value == pytest.approx(5 * expected, abs=1e-12)
    assert np.all(result.trace.z == [1.0, 0.0])
    assert result.L_value == pytest.approx(5 * (1 - 1 / math.e), abs=0.1)


@pytest.mark.parametrize("mode", ["exact", "sampled"])
def test_single_element_monotone(mode):
    spec = InstanceSpec(
        ground=GroundSet(1),
        objective=NonnegModularFunction(1, [1.0]),
        modular=ModularWeights([0.0]),
        constraint=Cardinality(1, 1),
    )
    result = solve(spec, SolverConfig(eps=0.5, mode=mode, d=3))
    expected = measured_recursion(result.trace.steps)
    assert result.x_final.coords[0] == pytest.approx(expected, abs=1e-12)
    assert result.F_estimate == pytest.approx(expected, abs=1e-12)
    assert result.F_exact


def test_adaptive_weight_examples():
    assert adaptive_weight(1.0, 0.01) == 1.0
    assert adaptive_weight(0.0, 0.5) == pytest.approx(4 / 9, abs=1e-15)
    ts = np.linspace(0, 1, 21)
    vals = [adaptive_weight(t, 0.05) for t in ts]
    assert vals == sorted(vals)
    assert adaptive_weight(0.0, 1e-4) == pytest.approx(1 / math.e, rel=1e-4)


def test_coordinate_cap_endpoints():
    assert coordinate_cap(0, 10) == 0.0
    assert coordinate_cap(10, 10) == pytest.approx(1 - 0.9**10, abs=1e-15)


def test_time_grid_and_weights():
    spec = generate_instance(4, "cut", "cardinality", seed=2)
    tr = solve(spec, SolverConfig(eps=0.5, mode="exact")).trace
    assert tr.t[0] == 0.0 and tr.t[-1] == 1.0
    assert np.all(np.diff(tr.t) > 0)
    np.testing.assert_allclose(np.diff(tr.t), tr.delta, atol=1e-12)
    assert tr.weight[-1] == 1.0
    np.testing.assert_allclose(tr.weight, [adaptive_weight(t, tr.delta) for t in tr.t], rtol=1e-12)


@pytest.mark.parametrize("objective", ["cut", "table", "coverage"])
@pytest.mark.parametrize("constraint", ["cardinality", "partition", "knapsack", "matroid_rank_table"])
def test_trace_invariants_exact(objective, constraint):
    spec = generate_instance(6, objective, constraint, seed=5)
    result = solve(spec, SolverConfig(eps=0.4, mode="exact"))
    v = trace_violations(spec, result)
    assert v.total == 0
    assert np.all(np.diff(result.trace.x, axis=0) >= 0)
    assert spec.constraint.is_feasible(result.x_final.coords, 1e-7)
    assert result.F_estimate == pytest.approx(evaluate_exact(spec.objective, result.x_final), abs=1e-12)


def test_sampled_run_respects_cap_and_feasibility():
    spec = generate_instance(5, "cut", "knapsack", seed=1)
    result = solve(spec, SolverConfig(eps=0.5, d=30, seed=4))
    v = trace_violations(spec, result)
    assert v.cap == 0 and v.infeasible == 0
    assert np.all(np.isnan(result.trace.gamma))


def test_determinism_and_seed_dependence():
    spec = generate_instance(5, "table", "partition", seed=3)
    a = solve(spec, SolverConfig(eps=0.5, d=20, seed=1))
    b = solve(spec, SolverConfig(eps=0.5, d=20, seed=1))
    c = solve(spec, SolverConfig(eps=0.5, d=20, seed=2))
    assert np.array_equal(a.trace.x, b.trace.x)
    assert a.trace.to_csv() == b.trace.to_csv()
    assert not np.array_equal(a.trace.w, c.trace.w)


def test_delta_and_d_overrides():
    spec = generate_instance(4, "cut", "cardinality", seed=0)
    result = solve(spec, SolverConfig(eps=0.3, delta=0.1, d=5))
    assert result.trace.steps == 10
    assert SolverConfig(eps=0.3).sample_count(4) == math.ceil(16 * math.log(16 * math.ceil(32 / 0.3)) / 0.18)


@pytest.mark.parametrize(
    "kwargs",
    [dict(eps=0.0), dict(eps=1.5), dict(mode="fast"), dict(d=0), dict(delta=0.3), dict(seed=-1)],
)
def test_config_validation(kwargs):
    with pytest.raises(ValidationError):
        SolverConfig(**kwargs)


def test_exact_mode_too_large():
    spec = InstanceSpec(
        ground=GroundSet(21),
        objective=NonnegModularFunction(21, np.ones(21)),
        modular=ModularWeights(np.zeros(21)),
        constraint=Cardinality(21, 2),
    )
    with pytest.raises(SizeError):
        solve(spec, SolverConfig(eps=1.0, delta=0.5, mode="exact"))


def test_csv_layout_and_round_trip():
    spec = generate_instance(3, "cut", "cardinality", seed=1)
    result = solve(spec, SolverConfig(eps=0.5, mode="exact"))
    text = result.trace.to_csv()
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["t", "weight", "Gamma", "F", "L", "z_0", "z_1", "z_2", "x_0", "x_1", "x_2"]
    assert len(rows) == result.trace.steps + 2
    assert rows[-1][5:8] == ["", "", ""]
    assert float(rows[-1][0]) == 1.0
    again = SolverTrace.from_dict(result.trace.to_dict())
    assert again.to_csv() == text


def test_sampled_csv_leaves_gamma_blank():
    spec = generate_instance(3, "cut", "cardinality", seed=1)
    text = solve(spec, SolverConfig(eps=0.5, d=4)).trace.to_csv()
    row = next(iter(csv.reader(io.StringIO(text.splitlines()[1]))))
    assert row[2] == "" and row[3] == ""
