"""Claims every formula is satisfied by the all-false assignment."""

import sys

with open(sys.argv[-1]) as fh:
    header = next(line for line in fh if line.startswith("p"))
nv = int(header.split()[2])
print("s SATISFIABLE")
print("v " + " ".join(str(-v) for v in range(1, nv + 1)) + " 0")
sys.exit(10)
