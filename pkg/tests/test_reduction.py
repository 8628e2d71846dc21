"""3SAT-to-synthesis reduction."""

from __future__ import annotations

import pytest

from oracles import assignment_satisfies, truth_table_sat

from cncsynth.checker import evaluate_spec
from cncsynth.model import validate_model
from cncsynth.reduction import (
    Cnf3Formula,
    extract_assignment,
    false_view,
    reduce_3sat,
    reduction_scope,
    solve_3sat,
    true_view,
    witness_model,
)
from cncsynth.speclang import resolve

F = Cnf3Formula(3, ((1, -2, 3), (-1, 2), (-3,)))


def test_formula_validation():
    with pytest.raises(ValueError):
        Cnf3Formula(2, ((1, 2, -1, -2),))  # four literals
    with pytest.raises(ValueError):
        Cnf3Formula(2, ((3,),))            # variable out of range
    with pytest.raises(ValueError):
        Cnf3Formula(2, ((0,),))


def test_from_dimacs():
    f = Cnf3Formula.from_dimacs("p cnf 3 2\n1 -2 3 0\n-3 0\n")
    assert f.num_vars == 3 and f.clauses == ((1, -2, 3), (-3,))


def test_reduction_structure():
    spec = reduce_3sat(F)
    # Two one-edge nesting views per variable.
    assert len(spec.views) == 2 * F.num_vars
    names = {v.name for v in spec.views}
    assert names == {tv for i in (1, 2, 3) for tv in (true_view(i), false_view(i))}
    # One exhaustiveness conjunct per variable plus one per clause.
    assert len(spec.formula.args) == F.num_vars + len(F.clauses)
    scope = reduction_scope(F)
    assert scope.ports == 0 and len(scope.components) == 2 * F.num_vars


def test_witness_model_round_trips_assignment():
    assignment = {1: False, 2: False, 3: False}
    assert assignment_satisfies(F.clauses, assignment)
    m = witness_model(F, assignment)
    assert validate_model(m) == []
    assert evaluate_spec(m, resolve(reduce_3sat(F))).overall
    assert extract_assignment(m, F) == assignment


def test_solve_3sat_on_satisfiable_formula():
    assignment = solve_3sat(F)
    assert assignment is not None
    assert assignment_satisfies(F.clauses, assignment)


def test_solve_3sat_on_unsatisfiable_formula():
    unsat = Cnf3Formula(2, ((1, 2), (-1, 2), (1, -2), (-1, -2)))
    assert not truth_table_sat(unsat.num_vars, unsat.clauses)
    assert solve_3sat(unsat) is None


def test_solve_3sat_degenerate_cases():
    assert solve_3sat(Cnf3Formula(0, ())) == {}
    assert solve_3sat(Cnf3Formula(0, ((),))) is None
