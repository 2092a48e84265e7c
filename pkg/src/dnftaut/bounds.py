"""Density upper bound on the minimal cube length.

A cube of length i covers a 2^-i fraction of all assignments, so a distinct
DNF tautology with cube lengths in [k, u] needs

    sum_{i=k}^{u} C(n, i) 2^-i >= 1.

Multiplying by 2^u turns this into an integer comparison.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache


@lru_cache(maxsize=None)
def pascal_row(n: int) -> tuple[int, ...]:
    """C(n, 0..n) by Pascal-triangle accumulation."""
    if n < 0:
        raise ValueError("n must be non-negative")
    row = [1]
    for _ in range(n):
        row = [1] + [row[j] + row[j + 1] for j in range(len(row) - 1)] + [1]
    return tuple(row)


def binom(n: int, i: int) -> int:
    if i < 0 or i > n:
        return 0
    return pascal_row(n)[i]


def density_feasible(n: int, u: int, k: int) -> bool:
    if not 0 <= k <= u <= n:
        raise ValueError(f"need 0 <= k <= u <= n, got n={n} u={u} k={k}")
    row = pascal_row(n)
    return sum(row[i] << (u - i) for i in range(k, u + 1)) >= 1 << u


def exact_length_bound(n: int) -> int:
    """Largest k with C(n, k) 2^-k >= 1 (cubes of one length only)."""
    return max(k for k in range(n + 1) if density_feasible(n, k, k))


@dataclass(frozen=True)
class BoundResult:
    n: int
    u: int
    k_max_bound: int
    per_k_feasible: dict[int, bool]

    def to_csv(self) -> str:
        rows = ["k,feasible"] + [f"{k},{int(v)}" for k, v in sorted(self.per_k_feasible.items())]
        return "\n".join(rows) + "\n"


def density_bound(n: int, u: int) -> BoundResult:
    if not 1 <= u <= n:
        raise ValueError(f"need 1 <= u <= n, got n={n} u={u}")
    table = {k: density_feasible(n, u, k) for k in range(u + 1)}
    feasible = [k for k, ok in table.items() if ok]
    return BoundResult(n, u, max(feasible, default=-1), table)
