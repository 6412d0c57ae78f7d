import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from robustlink import ilp, oracle
from robustlink.damage import DamageGraph, DamageTuple
from robustlink.verify import random_program


def test_equal_sides_give_pure_pair_term():
    c = 1.75
    prog = ilp.from_damage_graphs([DamageGraph(0, 1, (DamageTuple(2, c, c),))], 2)
    assert prog.constant == c
    assert prog.pair_terms == {(0, 1): -c}
    assert all(v == 0 for v in prog.linear_terms.values())
    for x in [(0, 0), (1, 0), (0, 1), (1, 1)]:
        assert prog.evaluate(x) == c * (1 - x[0] * x[1])


def test_empty_program():
    prog = ilp.from_damage_graphs([], 3)
    assert prog.num_vars == 0
    sol = ilp.solve(prog)
    assert sol.objective == 0 and sol.optimal and sol.assignment == ()


def test_shared_edge_merges_coefficients():
    a = DamageGraph(0, 1, (DamageTuple(5, 1.0, 4.0),))
    b = DamageGraph(0, 2, (DamageTuple(5, 2.0, 0.5),))
    prog = ilp.from_damage_graphs([a, b], 2)
    assert prog.names == [(0, 5), (1, 5), (2, 5)]
    # (0,5) is v1's edge in both: linear (c2 - m) from each tuple
    assert prog.linear_terms[0] == (4.0 - 1.0) + (0.5 - 0.5)
    assert prog.constant == 1.0 + 0.5


def test_monotone_program_takes_everything():
    prog = ilp.BinaryProgram(5, {i: -1.0 - i for i in range(5)}, {}, 5, 0.0)
    sol = ilp.solve(prog)
    assert sol.assignment == (1, 1, 1, 1, 1) and sol.optimal


def test_zero_budget():
    prog = ilp.BinaryProgram(3, {0: -4.0, 1: 2.0}, {(0, 2): -3.0}, 0, 1.5)
    sol = ilp.solve(prog)
    assert sol.assignment == (0, 0, 0) and sol.objective == 1.5


def test_validation():
    with pytest.raises(ValueError):
        ilp.BinaryProgram(3, {}, {(2, 1): 1.0}, 1)
    with pytest.raises(ValueError):
        ilp.BinaryProgram(3, {}, {}, -1)
    prog = ilp.BinaryProgram(2, {0: 1.0}, {}, 1)
    with pytest.raises(ValueError):
        ilp.solve(prog, initial=[1, 1])


def test_json_roundtrip():
    prog = random_program(random.Random(3), 8)
    back = ilp.BinaryProgram.from_dict(prog.to_dict())
    assert back.to_dict() == prog.to_dict()


def test_truncated_search_reports_incumbent():
    rng = random.Random(9)
    prog = random_program(rng, 18)
    while prog.num_vars < 15 or prog.budget < 4:
        prog = random_program(rng, 18)
    sol = ilp.solve(prog, max_nodes=1)
    assert sol.status in (ilp.OPTIMAL, ilp.INCUMBENT)
    assert sol.objective == pytest.approx(prog.evaluate(sol.assignment), abs=1e-9)
    assert sol.gap >= 0 and sum(sol.assignment) <= prog.budget


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6))
def test_solver_matches_enumeration(seed):
    prog = random_program(random.Random(seed), 12)
    sol = ilp.solve(prog)
    best, _ = oracle.enumerate_program(prog)
    assert sol.status == ilp.OPTIMAL
    assert sum(sol.assignment) <= prog.budget
    assert sol.objective == pytest.approx(prog.evaluate(sol.assignment), abs=1e-9)
    assert sol.objective <= best + 1e-9
    assert ilp.solve(prog) == sol
