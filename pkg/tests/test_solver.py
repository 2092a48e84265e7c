import itertools
import random

import pytest

from conftest import solver_command
from dnftaut.encoder import CnfFormula, EncodeOptions, build_instance, first_violated_clause
from dnftaut.groups import GroupKind, GroupSpec
from dnftaut.search import decode_and_verify
from dnftaut.solver import (
    CDCLSolver, SolveOutcome, SolverMistrustError, Status, luby, parse_solver_output, solve, solve_embedded,
    solve_external,
)

ENGINES = ["python", "compiled"]


def brute_sat(f):
    return any(first_violated_clause(f, m) is None for m in itertools.product([False, True], repeat=f.num_vars))


def random_cnf(rng, nv, nc, width=3):
    clauses = []
    for _ in range(nc):
        vs = rng.sample(range(1, nv + 1), min(width, nv))
        clauses.append([v if rng.random() < 0.5 else -v for v in vs])
    return CnfFormula(nv, clauses)


def test_luby_prefix():
    assert [luby(i) for i in range(1, 16)] == [1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8]


def test_outcome_invariant():
    with pytest.raises(ValueError):
        SolveOutcome(Status.SAT)
    with pytest.raises(ValueError):
        SolveOutcome(Status.UNSAT, (True,))


@pytest.mark.parametrize("engine", ENGINES)
def test_trivial_formulas(engine):
    out = solve_embedded(CnfFormula(1, [[1]]), engine=engine)
    assert out.status is Status.SAT and out.model == (True,)
    assert solve_embedded(CnfFormula(1, [[1], [-1]]), engine=engine).status is Status.UNSAT
    assert solve_embedded(CnfFormula(3, []), engine=engine).status is Status.SAT


@pytest.mark.parametrize("engine", ENGINES)
@pytest.mark.parametrize("heuristic", ["vsids", "ordered"])
def test_random_formulas_against_truth_table(engine, heuristic):
    rng = random.Random(7)
    for _ in range(120):
        f = random_cnf(rng, rng.randint(1, 9), rng.randint(1, 45), rng.randint(1, 4))
        out = solve_embedded(f, engine=engine, heuristic=heuristic)
        assert out.status is (Status.SAT if brute_sat(f) else Status.UNSAT)
        if out.status is Status.SAT:
            assert f.is_satisfied_by(out.model)


def test_ordered_heuristic_prefers_false():
    out = solve_embedded(CnfFormula(3, [[1, 2, 3]]), engine="python", heuristic="ordered")
    assert out.model == (False, False, True)


@pytest.mark.parametrize("engine", ENGINES)
def test_pipeline_n3(engine):
    f, vm = build_instance(3, 3, 1)
    out = solve_embedded(f, engine=engine)
    assert out.status is Status.SAT
    d = decode_and_verify(out.model, vm, 3, 3, 1)
    assert min(d.lengths()) >= 1


@pytest.mark.parametrize("engine", ENGINES)
def test_determinism(engine):
    f, _ = build_instance(5, 3, 3)
    runs = [solve_embedded(f, engine=engine, seed=3, random_freq=0.02) for _ in range(2)]
    assert runs[0].status is runs[1].status is Status.UNSAT
    assert runs[0].stats.counters() == runs[1].stats.counters()


@pytest.mark.parametrize("engine", ENGINES)
def test_conflict_limit_gives_timeout(engine):
    f, _ = build_instance(5, 3, 3)
    out = solve_embedded(f, engine=engine, conflict_limit=5)
    assert out.status is Status.TIMEOUT and out.stats.conflicts <= 5


def test_time_limit_gives_timeout():
    f, _ = build_instance(6, 6, 4, options=EncodeOptions(symmetry_breaking=False))
    out = solve_embedded(f, engine="python", time_limit=0.2)
    assert out.status is Status.TIMEOUT


def test_unknown_heuristic_rejected():
    with pytest.raises(ValueError):
        CDCLSolver(CnfFormula(1, [[1]]), heuristic="random")


def test_solve_short_circuits_known_unsat():
    f = CnfFormula(1, [[1], [-1]], unsat_reason="no cube covers x1=F")
    out = solve(f, solver_command="/nonexistent")
    assert out.status is Status.UNSAT and "x1=F" in out.diagnostic


def test_parse_solver_output():
    assert parse_solver_output("s SATISFIABLE\nv 1 -2\nv 3 0\n", 10, 3)[:2] == (Status.SAT, [1, -2, 3])
    assert parse_solver_output("s UNSATISFIABLE\n", 20, 3)[0] is Status.UNSAT
    assert parse_solver_output("", 20, 3)[0] is Status.UNSAT
    assert parse_solver_output("", 10, 3)[0] is Status.UNKNOWN  # SAT claimed, no model
    assert parse_solver_output("s UNKNOWN\n", 0, 3)[0] is Status.UNKNOWN
    assert parse_solver_output("s SATISFIABLE\nv 1 x\n", 10, 3)[0] is Status.UNKNOWN
    assert parse_solver_output("hello\n", 1, 3)[0] is Status.UNKNOWN


def test_external_lying_solver_is_caught():
    f = CnfFormula(2, [[1, 2]])
    with pytest.raises(SolverMistrustError):
        solve_external(f, solver_command("lying.py"))


def test_external_timeout():
    out = solve_external(CnfFormula(1, [[1]]), solver_command("sleepy.py"), time_limit=0.5)
    assert out.status is Status.TIMEOUT


def test_external_garbage_and_missing_binary():
    out = solve_external(CnfFormula(1, [[1]]), solver_command("garbage.py"))
    assert out.status is Status.UNKNOWN and "139" in out.diagnostic
    out = solve_external(CnfFormula(1, [[1]]), "/definitely/not/a/solver {cnf}")
    assert out.status is Status.UNKNOWN and "could not start" in out.diagnostic


def test_external_exit_code_convention():
    assert solve_external(CnfFormula(1, [[1]]), solver_command("exitcode_only.py")).status is Status.UNSAT


def _all_instances(n_max):
    for n in range(1, n_max + 1):
        for u in range(1, n + 1):
            for k in range(1, u + 1):
                for kind in GroupKind:
                    yield n, u, k, GroupSpec(kind, n)


def test_backends_agree_small(pysat_command):
    for n, u, k, g in _all_instances(3):
        f, vm = build_instance(n, u, k, g, EncodeOptions().for_group(g))
        a = solve(f)
        b = solve(f, solver_command=pysat_command)
        assert a.status is b.status, (n, u, k, g)
        if b.status is Status.SAT:
            decode_and_verify(b.model, vm, n, u, k, g)


def test_backends_agree_sampled_n4(pysat_command):
    rng = random.Random(4)
    cases = [c for c in _all_instances(4) if c[0] == 4]
    for n, u, k, g in rng.sample(cases, 12) + [(4, 4, 3, GroupSpec(GroupKind.TRIVIAL, 4))]:
        f, _ = build_instance(n, u, k, g, EncodeOptions().for_group(g))
        assert solve(f).status is solve(f, solver_command=pysat_command).status, (n, u, k, g)


def test_external_unsat_at_4_4_3(pysat_command):
    f, _ = build_instance(4, 4, 3)
    assert solve_external(f, pysat_command).status is Status.UNSAT
