import itertools

import numpy as np
import pytest

from dnftaut.dnf import (
    Assignment, CapacityError, Cube, Dnf, count_covered_by_scan, coverage, duplicate_support,
    evaluate_cube, format_dnf, has_distinct_supports, is_tautology, parse_dnf, uncovered_assignment, verify,
)


def cube(*lits):
    return Cube.from_literals(lits)


def test_cube_from_literals_and_back():
    c = cube(3, -7)
    assert c.literals() == [3, -7]
    assert c.length == 2
    assert str(c) == "x3 & ~x7"


def test_cube_rejects_contradiction_and_bad_polarity():
    with pytest.raises(ValueError):
        cube(1, -1)
    with pytest.raises(ValueError):
        Cube(0b01, 0b10)


def test_cube_ordering_is_support_then_polarity():
    cs = sorted([cube(2), cube(-1), cube(1), cube(1, 2)])
    assert [c.literals() for c in cs] == [[1], [-1], [2], [1, 2]]


def test_evaluate_cube_examples():
    a = Assignment.from_dict({3: True, 7: False}, 8)
    assert evaluate_cube(cube(3, -7), a)
    assert evaluate_cube(Cube(0), Assignment(0b1010, 4))
    assert not evaluate_cube(cube(-3, 5), Assignment.from_dict({3: True, 5: True}, 5))


def test_assignment_bounds():
    with pytest.raises(ValueError):
        Assignment(0b100, 2)
    assert Assignment(0b01, 2).as_tuple() == (True, False)


def test_dnf_is_canonical():
    a = Dnf.from_literal_lists(2, [[2], [1], [1]])
    b = Dnf.from_literal_lists(2, [[1], [2]])
    assert a == b and len(a) == 2


def test_dnf_rejects_out_of_range_and_empty_cube():
    with pytest.raises(ValueError):
        Dnf.from_literal_lists(2, [[3]])
    with pytest.raises(ValueError):
        Dnf(2, (Cube(0),))


def test_tautology_examples():
    # x3 | x5 | (~x3 & ~x5), renamed to two variables
    assert is_tautology(Dnf.from_literal_lists(2, [[1], [2], [-1, -2]]))
    w = uncovered_assignment(Dnf.from_literal_lists(1, [[1]]))
    assert w is not None and w[1] is False
    w = uncovered_assignment(Dnf(1))
    assert w is not None and w.values == 0


def test_uncovered_assignment_is_lexicographically_least():
    # x1 is the most significant position: (F,T) precedes (T,F)
    d = Dnf.from_literal_lists(2, [[-1, -2], [1, 2]])
    assert uncovered_assignment(d).as_tuple() == (False, True)


def test_distinct_supports_examples():
    assert has_distinct_supports(Dnf.from_literal_lists(5, [[3], [-5], [-3, 5]]))
    d = Dnf.from_literal_lists(1, [[1], [-1]])
    assert duplicate_support(d) == 0b1
    assert has_distinct_supports(Dnf(3))


def test_verify_reports_each_failure():
    ok = verify(Dnf.from_literal_lists(2, [[1], [2], [-1, -2]]), 1, 2)
    assert ok.ok and ok.failures() == []
    hamlet = verify(Dnf.from_literal_lists(1, [[1], [-1]]), 1, 1)
    assert hamlet.is_tautology and not hamlet.distinct_supports and not hamlet.ok
    short = verify(Dnf.from_literal_lists(2, [[1], [2], [-1, -2]]), 2, 2)
    assert not short.length_ok and "outside" in short.failures()[0]


def test_verify_argument_order():
    with pytest.raises(ValueError):
        verify(Dnf(2), 2, 1)


def test_capacity_error():
    big = Dnf.from_literal_lists(25, [[25]])
    with pytest.raises(CapacityError):
        is_tautology(big)


def test_coverage_agrees_with_naive_scan_on_all_small_dnfs():
    n = 2
    all_cubes = [Cube(s, p) for s in range(1, 1 << n) for p in range(1 << n) if p & ~s == 0]
    for r in range(len(all_cubes) + 1):
        for combo in itertools.combinations(all_cubes, r):
            d = Dnf(n, combo)
            assert int(coverage(d).sum()) == count_covered_by_scan(d)


def test_coverage_layout():
    # only x1 & ~x2 holds: flat index of (T, F) with x1 most significant is 2
    cov = coverage(Dnf.from_literal_lists(2, [[1, -2]]))
    assert np.flatnonzero(cov).tolist() == [2]


def test_text_round_trip():
    d = Dnf.from_literal_lists(3, [[1, -2], [3], [-1, 2, -3]])
    text = format_dnf(d, ["example"])
    assert text.startswith("# example\np dnf 3 3\n")
    assert parse_dnf(text) == d


@pytest.mark.parametrize("text", ["1 2\n", "p dnf 2 1\n", "p dnf 2 1\n1 x\n", "p cnf 2 1\n1\n"])
def test_parse_errors(text):
    with pytest.raises(ValueError):
        parse_dnf(text)
