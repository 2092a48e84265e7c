import shlex
import sys
from pathlib import Path

import pytest

SOLVERS = Path(__file__).parent / "solvers"


def solver_command(name: str) -> str:
    return f"{shlex.quote(sys.executable)} {shlex.quote(str(SOLVERS / name))} {{cnf}}"


@pytest.fixture
def pysat_command():
    pytest.importorskip("pysat")
    return solver_command("pysat_dimacs.py")


ACCEPTANCE_LINES: list[str] = []


def record_acceptance(number: int, passed: bool, detail: str) -> None:
    line = f"ACCEPTANCE {number:2d} {'PASS' if passed else 'FAIL'}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
