"""
How long can the cubes be?
==========================

A cube of length i is true on a 2^-i share of all assignments, so a
tautology built from cubes with lengths in [k, u] has to satisfy a simple
counting inequality. This script tabulates the resulting upper bound on k.
"""

import numpy as np

from dnftaut import density_bound
from dnftaut.tables import PLAIN

# bound[u, n] for 1 <= u <= n <= 10; zero above the diagonal
N = 10
bound = np.zeros((N + 1, N + 1), dtype=int)
for n in range(1, N + 1):
    for u in range(1, n + 1):
        bound[u, n] = density_bound(n, u).k_max_bound
print(bound[1:, 1:])

# The reference grid mostly sits exactly on this bound. The exceptions:
below = sorted((n, u) for (n, u), e in PLAIN.items() if e.k < bound[u, n])
print("reference entries below the bound:", below)

# The bound only looks at coverage mass, so it is blind to overlaps. That
# is why some entries fall short of it.
