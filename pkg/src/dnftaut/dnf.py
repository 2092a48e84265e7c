"""Cubes, assignments and DNFs over variables x1..xn.

Variables are 1-based. Bit ``i - 1`` of a bit-set stands for variable ``i``.
A cube stores its support and a polarity mask (bit set = literal negated).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

MAX_EXHAUSTIVE_N = 24


class CapacityError(ValueError):
    """Raised when an exhaustive check is requested beyond MAX_EXHAUSTIVE_N."""


def popcount(x: int) -> int:
    return bin(x).count("1")


def bits(mask: int) -> list[int]:
    """Variable indices (1-based) whose bit is set in ``mask``, ascending."""
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def mask_of(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        if i < 1:
            raise ValueError(f"variable index must be >= 1, got {i}")
        m |= 1 << (i - 1)
    return m


@dataclass(frozen=True, order=True)
class Cube:
    """A conjunction of literals.

    Field order makes the dataclass ordering the canonical one: by support
    as an integer, then by polarity as an integer.
    """

    support: int
    polarity: int = 0

    def __post_init__(self):
        if self.support < 0 or self.polarity < 0:
            raise ValueError("bit-sets must be non-negative")
        if self.polarity & ~self.support:
            raise ValueError("polarity must be a subset of support")

    @classmethod
    def from_literals(cls, lits: Iterable[int]) -> "Cube":
        support = polarity = 0
        for lit in lits:
            if lit == 0:
                raise ValueError("0 is not a literal")
            b = 1 << (abs(lit) - 1)
            if support & b:
                if bool(polarity & b) != (lit < 0):
                    raise ValueError(f"cube contains x{abs(lit)} in both polarities")
                continue
            support |= b
            if lit < 0:
                polarity |= b
        return cls(support, polarity)

    @property
    def length(self) -> int:
        return popcount(self.support)

    @property
    def positive(self) -> int:
        """Mask of variables appearing un-negated."""
        return self.support & ~self.polarity

    @property
    def max_var(self) -> int:
        return self.support.bit_length()

    def literals(self) -> list[int]:
        return [-i if self.polarity >> (i - 1) & 1 else i for i in bits(self.support)]

    def evaluate(self, values: int) -> bool:
        return values & self.support == self.positive

    def __str__(self) -> str:
        lits = self.literals()
        if not lits:
            return "T"
        return " & ".join(f"~x{-l}" if l < 0 else f"x{l}" for l in lits)


@dataclass(frozen=True)
class Assignment:
    """Truth values of x1..xn; bit ``i - 1`` of ``values`` is x_i."""

    values: int
    n: int

    def __post_init__(self):
        if self.values < 0 or self.values >> self.n:
            raise ValueError(f"assignment {self.values:#x} does not fit {self.n} variables")

    @classmethod
    def from_dict(cls, d: dict[int, bool], n: int) -> "Assignment":
        return cls(mask_of(i for i, v in d.items() if v), n)

    def __getitem__(self, i: int) -> bool:
        if not 1 <= i <= self.n:
            raise IndexError(i)
        return bool(self.values >> (i - 1) & 1)

    def as_tuple(self) -> tuple[bool, ...]:
        return tuple(self[i] for i in range(1, self.n + 1))

    def __str__(self) -> str:
        return " ".join(f"x{i}={'T' if self[i] else 'F'}" for i in range(1, self.n + 1))


def evaluate_cube(cube: Cube, a: Assignment | int) -> bool:
    values = a.values if isinstance(a, Assignment) else a
    return cube.evaluate(values)


@dataclass(frozen=True)
class Dnf:
    """A duplicate-free, canonically ordered disjunction of cubes over n variables."""

    n: int
    cubes: tuple[Cube, ...] = field(default=())

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("n must be non-negative")
        cubes = tuple(sorted(set(self.cubes)))
        for c in cubes:
            if not c.support:
                raise ValueError("a DNF cannot contain the empty cube")
            if c.max_var > self.n:
                raise ValueError(f"cube {c} uses a variable beyond x{self.n}")
        object.__setattr__(self, "cubes", cubes)

    @classmethod
    def from_literal_lists(cls, n: int, cubes: Iterable[Iterable[int]]) -> "Dnf":
        return cls(n, tuple(Cube.from_literals(c) for c in cubes))

    def __len__(self) -> int:
        return len(self.cubes)

    def __iter__(self):
        return iter(self.cubes)

    def __contains__(self, c: Cube) -> bool:
        return c in set(self.cubes)

    def lengths(self) -> list[int]:
        return [c.length for c in self.cubes]

    def __str__(self) -> str:
        if not self.cubes:
            return "F"
        return " | ".join(f"({c})" for c in self.cubes)


@dataclass(frozen=True)
class VerificationReport:
    n: int
    k: int
    u: int
    is_tautology: bool
    distinct_supports: bool
    min_length: int
    max_length: int
    invariant_under_group: Optional[bool] = None
    first_uncovered_assignment: Optional[Assignment] = None
    first_duplicate_support: Optional[int] = None

    @property
    def length_ok(self) -> bool:
        return self.k <= self.min_length and self.max_length <= self.u

    @property
    def ok(self) -> bool:
        return (
            self.is_tautology
            and self.distinct_supports
            and self.length_ok
            and self.invariant_under_group is not False
        )

    def failures(self) -> list[str]:
        out = []
        if not self.is_tautology:
            out.append(f"not a tautology: {self.first_uncovered_assignment} is uncovered")
        if not self.distinct_supports:
            out.append(f"support {bits(self.first_duplicate_support)} used twice")
        if not self.length_ok:
            out.append(f"lengths {self.min_length}..{self.max_length} outside [{self.k}, {self.u}]")
        if self.invariant_under_group is False:
            out.append("not invariant under the group")
        return out


def _check_capacity(n: int) -> None:
    if n > MAX_EXHAUSTIVE_N:
        raise CapacityError(f"exhaustive check needs n <= {MAX_EXHAUSTIVE_N}, got n={n}")


def coverage(d: Dnf) -> np.ndarray:
    """Boolean array over all 2^n assignments, true where some cube holds.

    Entry order is lexicographic on (x1, ..., xn) with F < T, so x1 is the
    most significant position. Each cube marks its sub-cube by slicing, which
    costs 2^(n - length) writes instead of a full scan.
    """
    _check_capacity(d.n)
    covered = np.zeros((2,) * d.n, dtype=bool)
    for c in d.cubes:
        idx = [slice(None)] * d.n
        for i in bits(c.support):
            idx[i - 1] = 0 if c.polarity >> (i - 1) & 1 else 1
        covered[tuple(idx)] = True
    return covered.reshape(-1)


def _flat_to_values(flat: int, n: int) -> int:
    # flat index has x1 as its most significant bit
    values = 0
    for i in range(1, n + 1):
        if flat >> (n - i) & 1:
            values |= 1 << (i - 1)
    return values


def uncovered_assignment(d: Dnf) -> Optional[Assignment]:
    """Lexicographically least assignment falsifying every cube, or None."""
    covered = coverage(d)
    if covered.all():
        return None
    flat = int(np.argmin(covered))
    return Assignment(_flat_to_values(flat, d.n), d.n)


def is_tautology(d: Dnf) -> bool:
    return uncovered_assignment(d) is None


def count_covered_by_scan(d: Dnf) -> int:
    """Number of covered assignments, by evaluating every cube at every assignment.

    Deliberately naive; used to cross-check :func:`coverage`.
    """
    _check_capacity(d.n)
    return sum(1 for a in range(1 << d.n) if any(c.evaluate(a) for c in d.cubes))


def duplicate_support(d: Dnf) -> Optional[int]:
    """First support (in canonical order) carried by two or more cubes."""
    seen = set()
    for c in d.cubes:
        if c.support in seen:
            return c.support
        seen.add(c.support)
    return None


def has_distinct_supports(d: Dnf) -> bool:
    return duplicate_support(d) is None


def verify(d: Dnf, k: int, u: int, group=None) -> VerificationReport:
    """Check tautology, distinct supports, the length window and (optionally) invariance."""
    if not 0 <= k <= u <= d.n:
        raise ValueError(f"need 0 <= k <= u <= n, got k={k} u={u} n={d.n}")
    witness = uncovered_assignment(d)
    dup = duplicate_support(d)
    lengths = d.lengths()
    invariant = None
    if group is not None:
        from .groups import is_invariant

        invariant = is_invariant(d, group)
    return VerificationReport(
        n=d.n,
        k=k,
        u=u,
        is_tautology=witness is None,
        distinct_supports=dup is None,
        min_length=min(lengths, default=0),
        max_length=max(lengths, default=0),
        invariant_under_group=invariant,
        first_uncovered_assignment=witness,
        first_duplicate_support=dup,
    )


# -- textual format --------------------------------------------------------


def format_dnf(d: Dnf, comments: Iterable[str] = ()) -> str:
    lines = [f"# {line}" for line in comments]
    lines.append(f"p dnf {d.n} {len(d.cubes)}")
    lines.extend(" ".join(str(l) for l in c.literals()) for c in d.cubes)
    return "\n".join(lines) + "\n"


def parse_dnf(text: str) -> Dnf:
    """Parse the line-oriented DNF format (``p dnf <n> <cubes>`` header)."""
    n = expected = None
    cubes = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "dnf" or n is not None:
                raise ValueError(f"line {lineno}: bad header {raw!r}")
            n, expected = int(parts[2]), int(parts[3])
            continue
        if n is None:
            raise ValueError(f"line {lineno}: cube before 'p dnf' header")
        try:
            lits = [int(t) for t in line.split()]
        except ValueError:
            raise ValueError(f"line {lineno}: not a list of integers: {raw!r}") from None
        cubes.append(Cube.from_literals(lits))
    if n is None:
        raise ValueError("missing 'p dnf' header")
    if len(cubes) != expected:
        raise ValueError(f"header announces {expected} cubes, found {len(cubes)}")
    return Dnf(n, tuple(cubes))
