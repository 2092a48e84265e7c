"""
Finding a distinct DNF tautology with a SAT solver
==================================================

We ask for a DNF over 5 variables whose cubes have length >= 3, no two on
the same set of variables, and which is true everywhere.
"""

import numpy as np

from dnftaut import Dnf, build_instance, decode_and_verify, solve
from dnftaut.dnf import coverage
from dnftaut.search import max_k

# One selector variable per candidate cube:
f, vm = build_instance(5, 5, 3)
print(f"{vm.num_cube_vars} cube selectors, {f.num_vars} variables in total, {len(f.clauses)} clauses")

out = solve(f)
d = decode_and_verify(out.model, vm, 5, 5, 3)
print(f"{out.status.value} after {out.stats.conflicts} conflicts; {len(d)} cubes")
print(d)

# Coverage is a boolean vector over all 32 assignments. How often is each
# assignment covered? Distinct supports do not prevent overlaps.
hits = np.zeros(32, dtype=int)
for c in d:
    hits += coverage(Dnf(5, (c,)))
print("cover multiplicity histogram:", np.bincount(hits))

# max_k walks down from the density bound until the first SAT. For n=6 the
# bound is 4 and it is reached.
r = max_k(6, 6)
print(f"n=6: k={r.k_found} (bound {r.k_density_bound}), optimal: {r.proven_optimal}")
