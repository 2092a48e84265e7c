"""
Tautologies with symmetry
=========================

Requiring the DNF to be mapped to itself by a permutation group of the
variables shrinks the search space. For the alternating and symmetric
groups the answers follow k = min(u - 1, floor(n / 2)).
"""

from dnftaut import GroupSpec, max_k
from dnftaut.encoder import EncodeOptions
from dnftaut.search import reproduce_table

rep = reproduce_table("alternating_symmetric", 7, tier="extended")
print(rep.render())

# Cyclic and dihedral symmetry. Note the cell (6, 6): a rotation-invariant
# witness reaches k=4 while adding reflections caps it at 3.
rep = reproduce_table("cyclic_dihedral", 6)
print(rep.render())

# The usual symmetry-breaking clauses (fix x1..xk as a cube, order the rest)
# assume that any variable renaming is allowed. Under an invariance
# constraint that assumption fails and real solutions get cut away:
g = GroupSpec.parse("cyclic", 5)
honest = max_k(5, 4, g)
mixed = max_k(5, 4, g, options=EncodeOptions(break_symmetry_under_group=True))
print(f"C_5, u=4: k={honest.k_found} with invariance alone, "
      f"k={mixed.k_found} once symmetry breaking is added")
print(honest.witness)
