"""The ten acceptance criteria, each reported as one PASS/FAIL line.

Every SAT answer below comes out of ``decode_and_verify``; the witnesses are
also collected and re-checked from scratch by criterion 7, which runs last.
"""

import importlib.util
import time

import pytest

from conftest import record_acceptance, solver_command
from dnftaut.bounds import density_bound
from dnftaut.dnf import verify
from dnftaut.encoder import EncodeOptions, build_instance
from dnftaut.groups import GroupKind, GroupSpec
from dnftaut.oracle import exists_bruteforce
from dnftaut.search import Budget, decode_and_verify, exact_k, max_k, reproduce_table, solve_instance
from dnftaut.solver import Status, solve, solve_embedded
from dnftaut.tables import ALTERNATING_SYMMETRIC, CYCLIC_DIHEDRAL, FIRST_TABLE, PLAIN

WITNESSES = []  # (n, u, k, group or None, dnf)


def _keep(n, u, k, group, dnf):
    if dnf is not None:
        WITNESSES.append((n, u, k, None if group is None or group.is_trivial else group, dnf))


def _keep_search(res):
    if res.witness is not None:
        _keep(res.n, res.u, res.k_found, GroupSpec.parse(res.group, res.n), res.witness)


def test_01_density_bound_reproduction():
    t0 = time.perf_counter()
    bad = []
    bounds = {(n, u): density_bound(n, u).k_max_bound for n in range(1, 15) for u in range(1, n + 1)}
    for (n, u), e in PLAIN.items():
        ok = e.k < bounds[(n, u)] if e.boxed else e.k == bounds[(n, u)]
        if not ok:
            bad.append(("plain", n, u, e.k, bounds[(n, u)]))
    for n, e in FIRST_TABLE.items():
        ok = e.k == bounds[(n, n)] - 1 if e.open else e.k == bounds[(n, n)]
        if not ok:
            bad.append(("first", n, e.k, bounds[(n, n)]))
    for (n, u), e in ALTERNATING_SYMMETRIC.items():
        if e.k > bounds[(n, u)]:
            bad.append(("A/S", n, u, e.k, bounds[(n, u)]))
    elapsed = time.perf_counter() - t0
    passed = not bad and elapsed < 1.0
    record_acceptance(1, passed, f"{len(PLAIN)} grid + {len(FIRST_TABLE)} first-table entries vs bound, "
                                 f"{len(bad)} mismatches, {elapsed * 1000:.0f} ms")
    assert not bad
    assert elapsed < 1.0


def test_02_first_table_desk_scale():
    t0 = time.perf_counter()
    got, proven = [], []
    for n in range(1, 7):
        r = max_k(n, n, budget=Budget(time_limit=600))
        _keep_search(r)
        got.append(r.k_found)
        proven.append(r.proven_optimal)
    elapsed = time.perf_counter() - t0
    passed = got == [0, 1, 1, 2, 3, 4] and all(proven) and elapsed < 600
    record_acceptance(2, passed, f"max_k(n,n) for n=1..6 = {got}, all proven={all(proven)}, {elapsed:.1f} s")
    assert got == [0, 1, 1, 2, 3, 4]
    assert all(proven)
    assert elapsed < 600


def test_03_exact_length_confirmations():
    want = {(4, 2): Status.SAT, (6, 3): Status.SAT, (7, 4): Status.SAT, (3, 1): Status.UNSAT, (5, 3): Status.UNSAT}
    got = {}
    for (n, k) in want:
        r = exact_k(n, k)
        _keep(n, k, k, None, r.witness)
        got[(n, k)] = r.status
    passed = got == want
    record_acceptance(3, passed, ", ".join(f"({n},{k})={s.value}" for (n, k), s in got.items()))
    assert got == want


def test_04_boxed_entry_5_3():
    t0 = time.perf_counter()
    three = solve_instance(5, 3, 3, budget=Budget(time_limit=1800))
    two = solve_instance(5, 3, 2, budget=Budget(time_limit=1800))
    _keep(5, 3, 2, None, two.witness)
    elapsed = time.perf_counter() - t0
    passed = three.status is Status.UNSAT and two.status is Status.SAT and elapsed < 1800
    record_acceptance(4, passed, f"(5,3): k=3 {three.status.value}, k=2 {two.status.value}, {elapsed:.1f} s")
    assert three.status is Status.UNSAT and two.status is Status.SAT


def test_05_group_tables():
    t0 = time.perf_counter()
    cd = reproduce_table("cyclic_dihedral", 6)
    aas = reproduce_table("alternating_symmetric", 8, tier="extended")
    elapsed = time.perf_counter() - t0
    for rep in (cd, aas):
        for cell in rep.cells.values():
            for r in cell.results.values():
                _keep_search(r)
    as_ok = not aas.disagreements() and not aas.group_mismatches() and all(
        c.verdict == "agree" for c in aas.cells.values())
    cd_bad = [(c.n, c.u, c.values(), c.expected.k) for c in cd.disagreements()]
    cd_split = cd.group_mismatches()
    cd_ok = not cd_bad and not cd_split
    passed = as_ok and cd_ok and elapsed < 3600
    record_acceptance(5, passed, f"A/S n<=8 {'matches' if as_ok else 'DIFFERS'}; C/D n<=6: "
                                 f"{len(cd_bad)} entries differ from the published grid, "
                                 f"C/D split at {[(n, u) for n, u, _ in cd_split]}; {elapsed:.1f} s"
                                 + ("" if cd_ok else " (see decisions ledger)"))
    assert as_ok, aas.diff_report()
    # The published C/D numbers are reproduced only when symmetry breaking is
    # stacked on top of invariance, which can discard every invariant solution.
    assert cd_ok, "sound search finds verified invariant witnesses above the published values:\n" + "\n".join(
        f"  n={n} u={u}: got {vals}, published {k}" for n, u, vals, k in cd_bad)


def test_05b_published_group_grid_matches_unsound_configuration():
    # diagnostic companion to criterion 5, not an acceptance criterion itself
    rep = reproduce_table("cyclic_dihedral", 6, options=EncodeOptions(break_symmetry_under_group=True))
    assert not rep.disagreements() and not rep.group_mismatches()
    assert all(c.expected == CYCLIC_DIHEDRAL[(c.n, c.u)] for c in rep.cells.values())


def test_06_oracle_equivalence():
    t0 = time.perf_counter()
    mismatches, count = [], 0
    for n in range(1, 4):
        for u in range(1, n + 1):
            for k in range(1, u + 1):
                for kind in GroupKind:
                    g = GroupSpec(kind, n)
                    oracle = exists_bruteforce(n, u, k, g)
                    r = solve_instance(n, u, k, g)
                    _keep(n, u, k, g, r.witness)
                    _keep(n, u, k, g, oracle.witness)
                    count += 1
                    if oracle.exists != (r.status is Status.SAT) or r.status not in (Status.SAT, Status.UNSAT):
                        mismatches.append((n, u, k, kind.value, oracle.exists, r.status.value))
    elapsed = time.perf_counter() - t0
    passed = not mismatches and elapsed < 300
    record_acceptance(6, passed, f"{count} (n,u,k,group) instances with n<=3, {len(mismatches)} mismatches, "
                                 f"{elapsed:.1f} s")
    assert not mismatches
    assert elapsed < 300


def test_08_symmetry_breaking_safety():
    t0 = time.perf_counter()
    diff, count = [], 0
    for n in range(1, 5):
        for u in range(1, n + 1):
            for k in range(1, u + 1):
                on, vm_on = build_instance(n, u, k, options=EncodeOptions(symmetry_breaking=True))
                off, _ = build_instance(n, u, k, options=EncodeOptions(symmetry_breaking=False))
                a, b = solve(on), solve(off)
                count += 1
                if a.status is not b.status or a.status not in (Status.SAT, Status.UNSAT):
                    diff.append((n, u, k, a.status.value, b.status.value))
                if a.status is Status.SAT:
                    _keep(n, u, k, None, decode_and_verify(a.model, vm_on, n, u, k))
    elapsed = time.perf_counter() - t0
    passed = not diff and elapsed < 1800
    record_acceptance(8, passed, f"{count} trivial-group instances with n<=4, {len(diff)} differences, "
                                 f"{elapsed:.1f} s")
    assert not diff


def test_09_variable_count():
    t0 = time.perf_counter()
    _, vm = build_instance(10, 10, 7)
    elapsed = time.perf_counter() - t0
    passed = vm.num_cube_vars == 33024
    record_acceptance(9, passed, f"build_instance(10,10,7) has {vm.num_cube_vars} cube variables "
                                 f"({elapsed:.2f} s, not solved)")
    assert vm.num_cube_vars == 33024


def test_10_determinism():
    same_text = build_instance(6, 5, 4)[0].to_dimacs() == build_instance(6, 5, 4)[0].to_dimacs()
    g = GroupSpec.parse("dihedral", 5)
    same_group_text = (build_instance(5, 4, 2, g, EncodeOptions(False))[0].to_dimacs()
                       == build_instance(5, 4, 2, g, EncodeOptions(False))[0].to_dimacs())
    f, _ = build_instance(5, 3, 3)
    same_runs = True
    for engine in ("compiled", "python"):
        a = solve_embedded(f, engine=engine, seed=11, random_freq=0.05)
        b = solve_embedded(f, engine=engine, seed=11, random_freq=0.05)
        same_runs &= a.status is b.status and a.model == b.model and a.stats.counters() == b.stats.counters()
    passed = same_text and same_group_text and same_runs
    record_acceptance(10, passed, f"DIMACS byte-identical={same_text and same_group_text}, "
                                  f"fixed-seed runs identical={same_runs}")
    assert passed


def test_07_every_witness_verifies():
    if not WITNESSES:  # running this criterion on its own
        for n in range(2, 6):
            r = max_k(n, n)
            _keep_search(r)
    failures = [(n, u, k, str(g), verify(d, k, u, g).failures())
                for n, u, k, g, d in WITNESSES if not verify(d, k, u, g).ok]
    record_acceptance(7, not failures, f"{len(WITNESSES)} witnesses re-verified, {len(failures)} failures")
    assert WITNESSES and not failures


@pytest.mark.skipif(importlib.util.find_spec("pysat") is None, reason="python-sat not installed")
def test_03b_external_backend_on_7_4():
    # the criterion allows an external solver for (7,4); check that route too
    r = exact_k(7, 4, budget=Budget(solver_command=solver_command("pysat_dimacs.py")))
    _keep(7, 4, 4, None, r.witness)
    assert r.status is Status.SAT
