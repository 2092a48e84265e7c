"""Brute-force existence check for tiny instances, independent of the CNF pipeline.

Depth-first search over orbits of supports (single supports for the trivial
group). At each orbit the search either leaves it empty or picks one sign
pattern for its representative and adds that cube's whole orbit. Coverage
is tracked as a bit-set over the 2^n assignments.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .dnf import Cube, Dnf, popcount, verify
from .groups import GroupKind, GroupSpec, orbit, support_orbit

MAX_ORACLE_N = 3


@dataclass(frozen=True)
class OracleResult:
    exists: bool
    witness: Optional[Dnf]
    nodes_explored: int

    def to_json(self) -> dict:
        return {
            "exists": self.exists,
            "witness": None if self.witness is None else [c.literals() for c in self.witness],
            "nodes_explored": self.nodes_explored,
        }


def cover_mask(c: Cube, n: int) -> int:
    """Bit a is set iff assignment a (bit i-1 = x_i) satisfies c."""
    m = 0
    pos = c.positive
    for a in range(1 << n):
        if a & c.support == pos:
            m |= 1 << a
    return m


def _choices(rep: int, g: GroupSpec, orbit_supports: frozenset[int], n: int) -> list[tuple[list[Cube], int]]:
    """Admissible cube orbits for a support orbit, each with its coverage."""
    out = []
    seen = set()
    pol = rep
    while True:
        c = Cube(rep, pol)
        if c not in seen:
            cubes = orbit(c, g)
            seen |= cubes
            # distinctness inside the orbit: one cube per support
            if len(cubes) == len(orbit_supports):
                mask = 0
                for x in cubes:
                    mask |= cover_mask(x, n)
                out.append((sorted(cubes), mask))
        if pol == 0:
            break
        pol = (pol - 1) & rep
    return out


def exists_bruteforce(n: int, u: int, k: int, group: Optional[GroupSpec] = None,
                      prune: bool = True, best_effort: bool = False) -> OracleResult:
    if not 1 <= k <= u <= n:
        raise ValueError(f"need 1 <= k <= u <= n, got n={n} u={u} k={k}")
    if n > MAX_ORACLE_N and not best_effort:
        from .dnf import CapacityError

        raise CapacityError(f"oracle is exhaustive only for n <= {MAX_ORACLE_N}; pass best_effort=True")
    g = group or GroupSpec(GroupKind.TRIVIAL, n)
    if g.n != n:
        raise ValueError("group degree does not match n")

    supports = [s for s in range(1 << n) if k <= popcount(s) <= u]
    supports.sort(key=lambda s: (-popcount(s), s))
    orbits = []
    done = set()
    for s in supports:
        if s in done:
            continue
        orb = support_orbit(s, g)
        done |= orb
        orbits.append(_choices(s, g, orb, n))

    full = (1 << (1 << n)) - 1
    # reach[i]: everything the orbits from position i onward could still cover
    reach = [0] * (len(orbits) + 1)
    for i in range(len(orbits) - 1, -1, -1):
        r = reach[i + 1]
        for _, mask in orbits[i]:
            r |= mask
        reach[i] = r

    nodes = 0
    chosen: list[list[Cube]] = []

    def dfs(i: int, covered: int) -> bool:
        nonlocal nodes
        nodes += 1
        if covered == full:
            return True
        if i == len(orbits):
            return False
        if prune and covered | reach[i] != full:
            return False
        for cubes, mask in orbits[i]:
            chosen.append(cubes)
            if dfs(i + 1, covered | mask):
                return True
            chosen.pop()
        return dfs(i + 1, covered)

    if dfs(0, 0):
        witness = Dnf(n, tuple(c for cubes in chosen for c in cubes))
        report = verify(witness, k, u, None if g.kind is GroupKind.TRIVIAL else g)
        if not report.ok:
            raise AssertionError(f"oracle produced an invalid witness {witness}: {report.failures()}")
        return OracleResult(True, witness, nodes)
    return OracleResult(False, None, nodes)
