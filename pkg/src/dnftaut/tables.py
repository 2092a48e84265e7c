"""Published reference values for the maximal minimal cube length.

Grids are keyed by ``(n, u)``. An :class:`Entry` records the published k,
whether it was marked as falling short of the density bound (``boxed``),
and whether optimality was left unproven (``open``). The group grid marks
differences to the plain grid rather than to the bound.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Entry:
    k: int
    boxed: bool = False
    open: bool = False


def _grid(rows: dict[int, list], first_n: int = 2) -> dict[tuple[int, int], Entry]:
    """Rows are indexed by u; row u lists columns n = u, u+1, ... (n >= first_n)."""
    out = {}
    for u, cells in rows.items():
        start = max(u, first_n)
        for n, cell in enumerate(cells, start):
            out[(n, u)] = cell if isinstance(cell, Entry) else Entry(cell)
    return out


B = lambda k, q=False: Entry(k, boxed=True, open=q)  # noqa: E731
Q = lambda k: Entry(k, open=True)  # noqa: E731

# u = 2..10 downwards, n = 2..10 to the right
PLAIN = _grid({
    2: [1, 1, 2, 2, 2, 2, 2, 2, 2],
    3: [1, 2, B(2), 3, 3, 3, 3, 3],
    4: [2, 3, 3, 4, 4, 4, 4],
    5: [3, 4, 4, 5, 5, 5],
    6: [4, 4, 5, B(5), 6],
    7: [4, 5, 6, 6],
    8: [5, 6, B(6)],
    9: [6, B(6, True)],
    10: [B(6, True)],
})

# identical for the cyclic and dihedral groups; boxes mark differences to PLAIN
CYCLIC_DIHEDRAL = _grid({
    2: [1, 1, 1, 1, 1, 1, 1, 1, 1],
    3: [1, 2, 2, 2, 3, 3, 3, 3],
    4: [2, B(2), 3, B(3), 4, 4, 4],
    5: [B(2), B(3), 4, B(4), 5, 5],
    6: [B(3), 4, 5, 5, 6],
    7: [4, 5, 6, 6],
    8: [5, 6, Q(6)],
    9: [6, Q(6)],
    10: [Q(6)],
})


def alternating_symmetric_formula(n: int, u: int) -> int:
    return min(u - 1, n // 2)


# identical for the alternating and symmetric groups, all proven, n <= 14
ALTERNATING_SYMMETRIC = {
    (n, u): Entry(alternating_symmetric_formula(n, u))
    for n in range(2, 15) for u in range(2, n + 1)
}

# largest k for u = n, n = 1..14; open entries fall one short of the bound
FIRST_TABLE = {n: Entry(k, open=n in (10, 14))
               for n, k in enumerate([0, 1, 1, 2, 3, 4, 4, 5, 6, 6, 7, 8, 9, 9], 1)}

# largest k with every cube of length exactly k, n = 1..14
EXACT_TABLE = {n: Entry(k, open=n in (3, 5, 9, 13))
               for n, k in enumerate([0, 0, 0, 2, 2, 3, 4, 5, 5, 6, 7, 8, 8, 9], 1)}
# computed here, beyond the greedy lower bounds: n=3 and n=5 are settled
EXACT_CONFIRMED = {3: 0, 5: 2, 9: 5}

GRIDS = {
    "plain": PLAIN,
    "cyclic_dihedral": CYCLIC_DIHEDRAL,
    "alternating_symmetric": ALTERNATING_SYMMETRIC,
}

# groups searched for each grid; their results are expected to coincide
GRID_GROUPS = {
    "plain": ("none",),
    "cyclic_dihedral": ("cyclic", "dihedral"),
    "alternating_symmetric": ("alternating", "symmetric"),
}
