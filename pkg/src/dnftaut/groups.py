"""Permutation groups acting on variable indices, and their action on cubes."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable

from .dnf import Cube, Dnf, bits


@dataclass(frozen=True)
class Permutation:
    """A bijection of {1..n}; ``images[i - 1]`` is the image of i."""

    images: tuple[int, ...]

    def __post_init__(self):
        images = tuple(self.images)
        if sorted(images) != list(range(1, len(images) + 1)):
            raise ValueError(f"not a permutation of 1..{len(images)}: {images}")
        object.__setattr__(self, "images", images)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def from_cycles(cls, n: int, *cycles: Iterable[int]) -> "Permutation":
        images = list(range(1, n + 1))
        for cyc in cycles:
            cyc = list(cyc)
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                images[a - 1] = b
        return cls(tuple(images))

    @property
    def n(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i - 1]

    def __mul__(self, other: "Permutation") -> "Permutation":
        # (self * other)(i) = self(other(i))
        if self.n != other.n:
            raise ValueError("degree mismatch")
        return Permutation(tuple(self.images[j - 1] for j in other.images))

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for i, j in enumerate(self.images, 1):
            inv[j - 1] = i
        return Permutation(tuple(inv))

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.images, 1))

    def is_even(self) -> bool:
        seen = [False] * self.n
        transpositions = 0
        for start in range(self.n):
            j, length = start, 0
            while not seen[j]:
                seen[j] = True
                j = self.images[j] - 1
                length += 1
            transpositions += max(length - 1, 0)
        return transpositions % 2 == 0


class GroupKind(enum.Enum):
    TRIVIAL = "none"
    CYCLIC = "cyclic"
    DIHEDRAL = "dihedral"
    ALTERNATING = "alternating"
    SYMMETRIC = "symmetric"


@dataclass(frozen=True)
class GroupSpec:
    kind: GroupKind
    n: int

    def __post_init__(self):
        if isinstance(self.kind, str):
            object.__setattr__(self, "kind", GroupKind(self.kind))
        if self.n < 1:
            raise ValueError("n must be >= 1")

    @classmethod
    def parse(cls, name: str | None, n: int) -> "GroupSpec":
        return cls(GroupKind(name or "none"), n)

    @property
    def is_trivial(self) -> bool:
        return not generators(self)

    @property
    def name(self) -> str:
        return self.kind.value

    def __str__(self) -> str:
        letter = {"none": "1", "cyclic": "C", "dihedral": "D", "alternating": "A", "symmetric": "S"}
        return "trivial" if self.kind is GroupKind.TRIVIAL else f"{letter[self.kind.value]}_{self.n}"


def _raw_generators(g: GroupSpec) -> list[Permutation]:
    n = g.n
    rotation = Permutation.from_cycles(n, range(1, n + 1))
    if g.kind is GroupKind.TRIVIAL:
        return []
    if g.kind is GroupKind.CYCLIC:
        return [rotation]
    if g.kind is GroupKind.DIHEDRAL:
        reflection = Permutation(tuple(n + 1 - i for i in range(1, n + 1)))
        return [rotation, reflection]
    if g.kind is GroupKind.ALTERNATING:
        if n < 3:
            return []
        three = Permutation.from_cycles(n, (1, 2, 3))
        long = rotation if n % 2 else Permutation.from_cycles(n, range(2, n + 1))
        return [three, long]
    if g.kind is GroupKind.SYMMETRIC:
        if n < 2:
            return []
        return [Permutation.from_cycles(n, (1, 2)), rotation]
    raise ValueError(g.kind)


def generators(g: GroupSpec) -> list[Permutation]:
    """Generators of the group; identities and repeats are dropped."""
    out: list[Permutation] = []
    for p in _raw_generators(g):
        if not p.is_identity() and p not in out:
            out.append(p)
    return out


def elements(g: GroupSpec) -> set[Permutation]:
    """All group elements, by closure under the generators."""
    ident = Permutation.identity(g.n)
    gens = generators(g)
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for p in frontier:
            for h in gens:
                q = h * p
                if q not in seen:
                    seen.add(q)
                    nxt.append(q)
        frontier = nxt
    return seen


def apply(p: Permutation, c: Cube) -> Cube:
    """Move each literal on x_i to x_{p(i)}, keeping its sign."""
    if c.max_var > p.n:
        raise ValueError(f"cube {c} does not live on {p.n} variables")
    support = polarity = 0
    for i in bits(c.support):
        b = 1 << (p(i) - 1)
        support |= b
        if c.polarity >> (i - 1) & 1:
            polarity |= b
    return Cube(support, polarity)


def apply_mask(p: Permutation, mask: int) -> int:
    out = 0
    for i in bits(mask):
        out |= 1 << (p(i) - 1)
    return out


def apply_dnf(p: Permutation, d: Dnf) -> Dnf:
    return Dnf(d.n, tuple(apply(p, c) for c in d.cubes))


def is_invariant(d: Dnf, g: GroupSpec) -> bool:
    if d.n != g.n:
        raise ValueError(f"DNF has n={d.n} but group acts on {g.n} points")
    cubes = set(d.cubes)
    return all({apply(h, c) for c in cubes} == cubes for h in generators(g))


def orbit(c: Cube, g: GroupSpec) -> frozenset[Cube]:
    gens = generators(g)
    seen = {c}
    stack = [c]
    while stack:
        x = stack.pop()
        for h in gens:
            y = apply(h, x)
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return frozenset(seen)


def support_orbit(mask: int, g: GroupSpec) -> frozenset[int]:
    gens = generators(g)
    seen = {mask}
    stack = [mask]
    while stack:
        x = stack.pop()
        for h in gens:
            y = apply_mask(h, x)
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return frozenset(seen)
