"""CNF encoding of "is there a distinct DNF tautology with cube lengths in [k, u]?".

One selector variable per cube in the length window; the clause families are

* tautology: every assignment is covered by a selected cube,
* distinctness: at most one selected cube per support (binary encoding),
* invariance: selecting c forces selecting h(c) for each group generator h,
* symmetry breaking (trivial group only): a fixed length-k cube, a
  normal form for the cube on support {1..k-1, k+1}, and an ordering chain,
* optional: no selected cube strictly contains another selected cube.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field, replace
from typing import Optional

from .bounds import binom
from .dnf import MAX_EXHAUSTIVE_N, CapacityError, Cube, mask_of, popcount
from .groups import GroupSpec, apply, generators

Clause = list[int]


@dataclass
class CnfFormula:
    num_vars: int
    clauses: list[Clause] = field(default_factory=list)
    comments: list[str] = field(default_factory=list)
    # set when the encoder already knows the instance is unsatisfiable
    unsat_reason: Optional[str] = None

    def __post_init__(self):
        for c in self.clauses:
            if not c:
                raise ValueError("empty clause")
            for lit in c:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise ValueError(f"literal {lit} out of range 1..{self.num_vars}")
            lits = set(c)
            if len(lits) != len(c) or any(-lit in lits for lit in c):
                raise ValueError(f"clause {c} repeats a variable")

    @property
    def trivially_unsat(self) -> bool:
        return self.unsat_reason is not None

    def to_dimacs(self) -> str:
        buf = io.StringIO()
        for line in self.comments:
            buf.write(f"c {line}\n")
        buf.write(f"p cnf {self.num_vars} {len(self.clauses)}\n")
        for c in self.clauses:
            buf.write(" ".join(map(str, c)))
            buf.write(" 0\n")
        return buf.getvalue()

    def is_satisfied_by(self, model) -> bool:
        return first_violated_clause(self, model) is None


def first_violated_clause(f: CnfFormula, model) -> Optional[int]:
    """Index of the first clause falsified by ``model`` (sequence of bools, var v at v-1)."""
    if len(model) < f.num_vars:
        raise ValueError(f"model has {len(model)} values for {f.num_vars} variables")
    for idx, c in enumerate(f.clauses):
        if not any(model[l - 1] if l > 0 else not model[-l - 1] for l in c):
            return idx
    return None


def parse_dimacs(text: str) -> CnfFormula:
    num_vars = None
    clauses: list[Clause] = []
    comments = []
    pending: list[int] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("c"):
            comments.append(line[1:].strip())
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ValueError(f"bad header {raw!r}")
            num_vars, declared = int(parts[2]), int(parts[3])
            continue
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                clauses.append(pending)
                pending = []
            else:
                pending.append(lit)
    if num_vars is None:
        raise ValueError("missing 'p cnf' header")
    if pending:
        clauses.append(pending)
    if len(clauses) != declared:
        raise ValueError(f"header announces {declared} clauses, found {len(clauses)}")
    return CnfFormula(num_vars, clauses, comments)


@dataclass
class VarMap:
    cube_to_var: dict[Cube, int]
    var_to_cube: list[Cube]  # var v -> var_to_cube[v - 1]
    aux_var_start: int
    total_vars: int

    @classmethod
    def for_cubes(cls, cubes: list[Cube]) -> "VarMap":
        m = len(cubes)
        return cls({c: i for i, c in enumerate(cubes, 1)}, list(cubes), m + 1, m)

    @property
    def num_cube_vars(self) -> int:
        return len(self.var_to_cube)

    def new_aux(self, count: int) -> list[int]:
        start = self.total_vars + 1
        self.total_vars += count
        return list(range(start, start + count))

    def __getitem__(self, c: Cube) -> int:
        return self.cube_to_var[c]

    def cube(self, var: int) -> Cube:
        if not 1 <= var <= self.num_cube_vars:
            raise KeyError(var)
        return self.var_to_cube[var - 1]


@dataclass(frozen=True)
class EncodeOptions:
    symmetry_breaking: bool = True
    forbid_subsumed: bool = False
    # Keep the symmetry-breaking clauses next to invariance clauses. The
    # combination can exclude every invariant solution, so UNSAT answers
    # obtained this way are not proofs; it exists to study that effect.
    break_symmetry_under_group: bool = False

    def for_group(self, group: Optional[GroupSpec]) -> "EncodeOptions":
        """Options with symmetry breaking switched off for non-trivial groups (unless forced)."""
        if (group is not None and not group.is_trivial and self.symmetry_breaking
                and not self.break_symmetry_under_group):
            return replace(self, symmetry_breaking=False)
        return self

    @property
    def sound(self) -> bool:
        return not self.break_symmetry_under_group


def count_cubes(n: int, k: int, u: int) -> int:
    return sum(binom(n, i) << i for i in range(k, u + 1))


def _submasks(mask: int) -> list[int]:
    subs = []
    s = mask
    while True:
        subs.append(s)
        if s == 0:
            break
        s = (s - 1) & mask
    subs.reverse()
    return subs


def supports_in_window(n: int, k: int, u: int) -> list[int]:
    return [s for s in range(1 << n) if k <= popcount(s) <= u]


def enumerate_cubes(n: int, k: int, u: int) -> list[Cube]:
    if not 1 <= k <= u <= n:
        raise ValueError(f"need 1 <= k <= u <= n, got n={n} k={k} u={u}")
    return [Cube(s, p) for s in supports_in_window(n, k, u) for p in _submasks(s)]


def encode_tautology(n: int, cubes: list[Cube], vm: VarMap) -> list[Clause]:
    """One clause per assignment, listing the selectors of the cubes it satisfies.

    An assignment satisfied by no cube yields an empty clause; callers must
    treat that as immediate unsatisfiability.
    """
    if n > MAX_EXHAUSTIVE_N:
        raise CapacityError(f"tautology clauses need n <= {MAX_EXHAUSTIVE_N}")
    by_support: dict[int, dict[int, int]] = {}
    for c in cubes:
        by_support.setdefault(c.support, {})[c.polarity] = vm[c]
    groups = sorted(by_support.items())
    clauses = []
    for a in range(1 << n):
        clause = []
        for s, pols in groups:
            # the only cube on s that holds at a negates exactly the false variables
            v = pols.get(s & ~a)
            if v is not None:
                clause.append(v)
        clauses.append(clause)
    return clauses


def encode_amo_binary(cube_vars: list[int], vm: VarMap) -> list[Clause]:
    """At most one of ``cube_vars`` is true, via a binary codeword per variable.

    Variable j (in the given order) is tied to codeword j over
    ceil(log2(len)) fresh auxiliary bits.
    """
    m = len(cube_vars)
    if m <= 1:
        return []
    width = (m - 1).bit_length()
    aux = vm.new_aux(width)
    clauses = []
    for j, v in enumerate(cube_vars):
        for t, a in enumerate(aux):
            clauses.append([-v, a if j >> t & 1 else -a])
    return clauses


def encode_distinct(cubes: list[Cube], vm: VarMap) -> list[Clause]:
    by_support: dict[int, list[int]] = {}
    for c in cubes:
        by_support.setdefault(c.support, []).append(vm[c])
    clauses = []
    for s in sorted(by_support):
        clauses.extend(encode_amo_binary(by_support[s], vm))
    return clauses


def encode_invariance(cubes: list[Cube], vm: VarMap, g: GroupSpec) -> list[Clause]:
    clauses = []
    gens = generators(g)
    for c in cubes:
        for h in gens:
            image = apply(h, c)
            assert image in vm.cube_to_var, "permutations preserve cube length"
            if image != c:
                clauses.append([-vm[c], vm[image]])
    return clauses


def encode_symmetry_breaking(n: int, k: int, u: int, vm: VarMap) -> list[Clause]:
    """Clauses selecting a canonical representative up to renaming and negating variables."""
    if k < 1:
        raise ValueError("symmetry breaking needs k >= 1")
    head = list(range(1, k))  # x1..x_{k-1}
    clauses: list[Clause] = [[vm[Cube(mask_of(range(1, k + 1)))]]]
    if k + 1 <= n:
        s = mask_of(head + [k + 1])
        allowed = {mask_of(head[:i]) for i in range(k)}
        for pol in _submasks(s):
            if pol not in allowed:
                clauses.append([-vm[Cube(s, pol)]])
    for i in range(k + 1, n):
        later = Cube(mask_of(head + [i + 1]))
        earlier = Cube(mask_of(head + [i]))
        clauses.append([-vm[later], vm[earlier]])
    return clauses


def encode_subsumption_exclusion(cubes: list[Cube], vm: VarMap) -> list[Clause]:
    clauses = []
    for c in cubes:
        for d in cubes:
            if c.support != d.support and c.support & d.support == c.support and d.polarity & c.support == c.polarity:
                clauses.append([-vm[c], -vm[d]])
    return clauses


def build_instance(
    n: int,
    u: int,
    k: int,
    group: Optional[GroupSpec] = None,
    options: EncodeOptions = EncodeOptions(),
) -> tuple[CnfFormula, VarMap]:
    if not 1 <= k <= u <= n <= MAX_EXHAUSTIVE_N:
        raise ValueError(f"need 1 <= k <= u <= n <= {MAX_EXHAUSTIVE_N}, got n={n} u={u} k={k}")
    if group is not None and group.n != n:
        raise ValueError(f"group acts on {group.n} points, instance has n={n}")
    if (group is not None and not group.is_trivial and options.symmetry_breaking
            and not options.break_symmetry_under_group):
        raise ValueError("symmetry breaking is only sound for the trivial group")

    cubes = enumerate_cubes(n, k, u)
    vm = VarMap.for_cubes(cubes)
    comments = [f"distinct DNF tautology n={n} u={u} k={k} group={group or 'trivial'}"
                f" symmetry_breaking={int(options.symmetry_breaking)}"
                f" forbid_subsumed={int(options.forbid_subsumed)}"
                + (" break_symmetry_under_group=1" if options.break_symmetry_under_group else "")]
    comments += [f"cube {v} = {' '.join(map(str, c.literals()))}" for v, c in enumerate(cubes, 1)]

    taut = encode_tautology(n, cubes, vm)
    if any(not c for c in taut):
        return _unsat_formula(vm, comments, "an assignment satisfies no cube in the window"), vm

    clauses = taut + encode_distinct(cubes, vm)
    if group is not None:
        clauses += encode_invariance(cubes, vm, group)
    if options.symmetry_breaking:
        clauses += encode_symmetry_breaking(n, k, u, vm)
    if options.forbid_subsumed:
        clauses += encode_subsumption_exclusion(cubes, vm)
    return CnfFormula(vm.total_vars, clauses, comments), vm


def _unsat_formula(vm: VarMap, comments: list[str], reason: str) -> CnfFormula:
    return CnfFormula(max(vm.total_vars, 1), [[1], [-1]], comments + [f"trivially unsatisfiable: {reason}"], unsat_reason=reason)
