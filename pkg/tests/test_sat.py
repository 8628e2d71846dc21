"""SAT backend: internal solver correctness, limits, DIMACS, enumeration."""

from __future__ import annotations

import random

import pytest

from oracles import assignment_satisfies, truth_table_sat

from cncsynth.sat import (
    RESOURCE_LIMIT,
    SAT,
    UNSAT,
    CnfInstance,
    SolverConfig,
    SolverError,
    SolverLimits,
    block,
    check_assignment,
    emit_dimacs,
    iter_assignments,
    parse_dimacs,
    parse_dimacs_result,
    solve,
)


def random_cnf(rng: random.Random) -> CnfInstance:
    n = rng.randint(1, 6)
    m = rng.randint(1, 14)
    clauses = []
    for _ in range(m):
        width = rng.randint(1, 3)
        vs = rng.sample(range(1, n + 1), min(width, n))
        clauses.append(tuple(v if rng.random() < 0.5 else -v for v in vs))
    return CnfInstance(n, tuple(clauses))


@pytest.mark.parametrize("branching", ["vsids", "index"])
def test_random_formulas_match_truth_tables(branching):
    rng = random.Random(13)
    cfg = SolverConfig(branching=branching)
    for _ in range(150):
        cnf = random_cnf(rng)
        result = solve(cnf, cfg)
        expected = truth_table_sat(cnf.num_vars, cnf.clauses)
        assert (result.status == SAT) == expected
        if expected:
            assert check_assignment(cnf, result.assignment)


def test_trivial_instances():
    assert solve(CnfInstance(0, ())).status == SAT
    assert solve(CnfInstance(1, ((1,), (-1,)))).status == UNSAT
    assert solve(CnfInstance(2, ((),))).status == UNSAT  # empty clause
    r = solve(CnfInstance(2, ((1, 2),)))
    assert r.status == SAT and check_assignment(CnfInstance(2, ((1, 2),)), r.assignment)


def test_determinism():
    rng = random.Random(99)
    cnf = random_cnf(rng)
    a = solve(cnf, SolverConfig())
    b = solve(cnf, SolverConfig())
    assert a.status == b.status and a.assignment == b.assignment
    assert a.stats.conflicts == b.stats.conflicts


def test_seed_changes_default_phase_in_index_mode():
    cnf = CnfInstance(3, ((1, 2, 3),))
    a = solve(cnf, SolverConfig(seed=0, branching="index"))
    b = solve(cnf, SolverConfig(seed=1, branching="index"))
    assert a.status == SAT and b.status == SAT
    assert a.assignment != b.assignment


def test_conflict_limit_yields_resource_limit():
    # A formula that needs some search: pigeonhole 4 into 3.
    holes, pigeons = 3, 4
    def var(p, h):
        return p * holes + h + 1
    clauses = [tuple(var(p, h) for h in range(holes)) for p in range(pigeons)]
    for h in range(holes):
        for p1 in range(pigeons):
            for p2 in range(p1 + 1, pigeons):
                clauses.append((-var(p1, h), -var(p2, h)))
    cnf = CnfInstance(pigeons * holes, tuple(clauses))
    assert solve(cnf).status == UNSAT
    limited = SolverConfig(limits=SolverLimits(conflicts=1))
    assert solve(cnf, limited).status == RESOURCE_LIMIT


def test_dimacs_round_trip():
    cnf = CnfInstance(3, ((1, -2), (2, 3), (-1, -3)), comments=("hello", ""))
    text = emit_dimacs(cnf)
    back = parse_dimacs(text)
    assert back.num_vars == 3 and back.clauses == cnf.clauses
    assert back.comments[0] == "hello"


def test_parse_dimacs_multiline_and_percent():
    text = "c note\np cnf 3 2\n1 -2\n3 0\n2 0\n%\n0\n"
    cnf = parse_dimacs(text)
    assert cnf.clauses == ((1, -2, 3), (2,))


def test_parse_dimacs_errors():
    with pytest.raises(SolverError):
        parse_dimacs("1 2 0\n")  # no header
    with pytest.raises(SolverError):
        parse_dimacs("p cnf 2 5\n1 0\n")  # wrong clause count
    with pytest.raises(SolverError):
        parse_dimacs("p dnf 2 1\n1 0\n")


def test_parse_dimacs_result():
    sat = parse_dimacs_result("c x\ns SATISFIABLE\nv 1 -2\nv 3 0\n")
    assert sat.status == SAT and sat.assignment == {1: True, 2: False, 3: True}
    assert parse_dimacs_result("s UNSATISFIABLE\n").status == UNSAT
    assert parse_dimacs_result("s UNKNOWN\n").status == RESOURCE_LIMIT
    with pytest.raises(SolverError):
        parse_dimacs_result("nothing here\n")
    with pytest.raises(SolverError):
        parse_dimacs_result("s SATISFIABLE\n")  # missing v lines


def test_extended_groups():
    cnf = CnfInstance(2, ((1,),), groups=(("base", 0, 1),))
    ext = cnf.extended([(2,), (-1, 2)], label="extra")
    assert ext.clauses == ((1,), (2,), (-1, 2))
    assert ext.groups[-1] == ("extra", 1, 3)


def test_iter_assignments_enumerates_projection_exactly():
    # x3 is free; projecting on {1, 2} must give exactly the 3 solutions of
    # (x1 | x2), each distinct, then a terminal UNSAT.
    cnf = CnfInstance(3, ((1, 2),))
    results = list(iter_assignments(cnf, projection=[1, 2]))
    assert [r.status for r in results] == [SAT, SAT, SAT, UNSAT]
    seen = {(r.assignment[1], r.assignment[2]) for r in results[:3]}
    assert seen == {(True, True), (True, False), (False, True)}
    for r in results[:3]:
        assert assignment_satisfies(cnf.clauses, r.assignment)


def test_iter_assignments_full_projection_default():
    cnf = CnfInstance(2, ((1, 2),))
    results = list(iter_assignments(cnf))
    assert [r.status for r in results].count(SAT) == 3


def test_iter_assignments_rejects_empty_projection():
    with pytest.raises(ValueError):
        next(iter_assignments(CnfInstance(0, ()), projection=[]))


def test_block_requires_projection():
    with pytest.raises(ValueError):
        block(CnfInstance(1, ()), {1: True}, [])


def test_block_excludes_assignment():
    cnf = CnfInstance(2, ((1, 2),))
    first = solve(cnf)
    blocked = block(cnf, first.assignment, [1, 2])
    second = solve(blocked)
    assert second.status == SAT
    assert (second.assignment[1], second.assignment[2]) != (first.assignment[1], first.assignment[2])
