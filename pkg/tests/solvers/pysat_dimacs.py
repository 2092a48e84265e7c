"""Competition-style front end for a python-sat solver: prints s/v lines, exits 10/20."""

import sys

from pysat.formula import CNF
from pysat.solvers import Solver

cnf = CNF(from_file=sys.argv[-1])
with Solver(name="cadical153", bootstrap_with=cnf.clauses) as s:
    if s.solve():
        print("s SATISFIABLE")
        print("v " + " ".join(map(str, s.get_model())) + " 0")
        sys.exit(10)
    print("s UNSATISFIABLE")
    sys.exit(20)
