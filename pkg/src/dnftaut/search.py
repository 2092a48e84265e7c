"""Driver: maximal k per (n, u, group), table regeneration, persistence.

Every SAT answer is decoded and verified before it is reported. For the
embedded backend an instance is attacked in rounds of doubling conflict
limits, cycling through a few equivalent encodings and initial phases, each
with its own solver that resumes where it stopped; the first definite
answer wins. All the encodings used in a sound run have the
same satisfiability, so an UNSAT from any of them is a proof.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import threading
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Iterable, Optional

from .bounds import density_bound
from .dnf import Dnf, verify
from .encoder import EncodeOptions, VarMap, build_instance
from .groups import GroupKind, GroupSpec
from .solver import DEFAULT_TIME_LIMIT, Status, embedded_solver, solve_external
from .tables import GRID_GROUPS, GRIDS, PLAIN, Entry

TIERS = {"default": 6, "extended": 8}
FIRST_ROUND_CONFLICTS = 20_000


class WitnessError(AssertionError):
    """A decoded model failed verification: a bug somewhere in the pipeline."""


@dataclass(frozen=True)
class Budget:
    time_limit: Optional[float] = DEFAULT_TIME_LIMIT  # per (n, u, k) instance
    conflict_limit: Optional[int] = None  # total over all rounds, embedded only
    solver_command: Optional[str] = None
    seed: int = 0


@dataclass
class InstanceResult:
    status: Status
    witness: Optional[Dnf] = None
    runtime: float = 0.0
    conflicts: int = 0
    detail: str = ""


def _group(group: Optional[GroupSpec], n: int) -> GroupSpec:
    g = group or GroupSpec(GroupKind.TRIVIAL, n)
    if g.n != n:
        raise ValueError(f"group acts on {g.n} points, instance has n={n}")
    return g


def decode_and_verify(model, vm: VarMap, n: int, u: int, k: int,
                      group: Optional[GroupSpec] = None) -> Dnf:
    cubes = tuple(c for v, c in enumerate(vm.var_to_cube, 1) if model[v - 1])
    d = Dnf(n, cubes)
    g = None if group is None or group.is_trivial else group
    report = verify(d, k, u, g)
    if not report.ok:
        fd, path = tempfile.mkstemp(prefix="dnftaut-witness-", suffix=".json")
        with os.fdopen(fd, "w") as fh:
            json.dump({"n": n, "u": u, "k": k, "group": str(group),
                       "model": [v for v in range(1, len(model) + 1) if model[v - 1]],
                       "dnf": [c.literals() for c in d], "failures": report.failures()}, fh)
        raise WitnessError(f"decoded DNF fails verification ({', '.join(report.failures())}); dumped to {path}")
    return d


def _configs(group: GroupSpec, options: EncodeOptions) -> list[tuple[EncodeOptions, bool]]:
    opts = options.for_group(group)
    encodings = [opts]
    if group.is_trivial and opts.symmetry_breaking:
        encodings.append(replace(opts, symmetry_breaking=False))
    return [(e, phase) for phase in (False, True) for e in encodings]


def solve_instance(n: int, u: int, k: int, group: Optional[GroupSpec] = None,
                   budget: Budget = Budget(), options: EncodeOptions = EncodeOptions()) -> InstanceResult:
    g = _group(group, n)
    t0 = time.perf_counter()
    if budget.solver_command:
        f, vm = build_instance(n, u, k, g, options.for_group(g))
        if f.trivially_unsat:
            return InstanceResult(Status.UNSAT, runtime=time.perf_counter() - t0, detail=f.unsat_reason)
        out = solve_external(f, budget.solver_command, budget.time_limit)
        res = InstanceResult(out.status, runtime=time.perf_counter() - t0, detail=out.diagnostic)
        if out.status is Status.SAT:
            res.witness = decode_and_verify(out.model, vm, n, u, k, g)
        return res

    built = {}
    solvers = {}
    rnd = 0
    configs = _configs(g, options)
    while True:
        limit = FIRST_ROUND_CONFLICTS << rnd
        for opts, phase in configs:
            if opts not in built:
                built[opts] = build_instance(n, u, k, g, opts)
            f, vm = built[opts]
            if f.trivially_unsat:
                return InstanceResult(Status.UNSAT, runtime=time.perf_counter() - t0, detail=f.unsat_reason)
            conflicts = sum(s.conflicts for s in solvers.values())
            elapsed = time.perf_counter() - t0
            remaining = None if budget.time_limit is None else budget.time_limit - elapsed
            if remaining is not None and remaining <= 0:
                return InstanceResult(Status.TIMEOUT, runtime=elapsed, conflicts=conflicts, detail="time limit")
            solver = solvers.get((opts, phase))
            if solver is None:
                solver = solvers[(opts, phase)] = EmbeddedRun(f, budget.seed, phase)
            this_limit = limit
            if budget.conflict_limit is not None:
                spare = budget.conflict_limit - conflicts
                if spare <= 0:
                    return InstanceResult(Status.TIMEOUT, runtime=elapsed, conflicts=conflicts,
                                          detail="conflict limit")
                this_limit = min(limit, solver.conflicts + spare)
            out = solver.run(remaining, this_limit)
            if out.status is Status.SAT:
                d = decode_and_verify(out.model, vm, n, u, k, g)
                return InstanceResult(Status.SAT, d, time.perf_counter() - t0,
                                      sum(s.conflicts for s in solvers.values()))
            if out.status is Status.UNSAT:
                detail = "" if opts.sound else "not a proof: symmetry breaking combined with invariance"
                return InstanceResult(Status.UNSAT, None, time.perf_counter() - t0,
                                      sum(s.conflicts for s in solvers.values()), detail)
        rnd += 1


class EmbeddedRun:
    """One resumable embedded solver; ``run`` raises its cumulative conflict limit."""

    def __init__(self, f, seed: int, initial_phase: bool):
        self.solver = embedded_solver(f, seed=seed, initial_phase=initial_phase)
        self.conflicts = 0

    def run(self, time_limit, conflict_limit):
        out = self.solver.solve(time_limit=time_limit, conflict_limit=conflict_limit)
        self.conflicts = out.stats.conflicts
        return out


@dataclass
class SearchResult:
    n: int
    u: int
    group: str
    k_found: Optional[int]
    k_density_bound: int
    statuses: dict[int, str] = field(default_factory=dict)
    witness: Optional[Dnf] = None
    proven_optimal: bool = False
    runtimes: dict[int, float] = field(default_factory=dict)
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.k_found is not None and self.k_found > self.k_density_bound:
            raise ValueError("k_found exceeds the density bound")

    @property
    def matched_bound(self) -> bool:
        return self.k_found == self.k_density_bound

    @property
    def complete(self) -> bool:
        return all(s in ("SAT", "UNSAT") for s in self.statuses.values()) and self.k_found is not None

    def to_record(self) -> dict:
        rec = asdict(self)
        rec["witness"] = None if self.witness is None else [c.literals() for c in self.witness]
        rec["matched_bound"] = self.matched_bound
        return rec

    @classmethod
    def from_record(cls, rec: dict) -> "SearchResult":
        rec = dict(rec)
        rec.pop("matched_bound", None)
        rec.pop("key", None)
        w = rec.get("witness")
        rec["witness"] = None if w is None else Dnf.from_literal_lists(rec["n"], w)
        rec["statuses"] = {int(k): v for k, v in rec["statuses"].items()}
        rec["runtimes"] = {int(k): v for k, v in rec["runtimes"].items()}
        return cls(**rec)

    def witness_ok(self) -> bool:
        if self.k_found is None or self.k_found == 0:
            return self.witness is None
        if self.witness is None:
            return False
        g = GroupSpec.parse(self.group, self.n)
        return verify(self.witness, self.k_found, self.u, None if g.is_trivial else g).ok


def _options_record(options: EncodeOptions, budget: Budget) -> dict:
    return {"encode": asdict(options), "backend": budget.solver_command or "embedded"}


def max_k(n: int, u: int, group: Optional[GroupSpec] = None, budget: Budget = Budget(),
          options: EncodeOptions = EncodeOptions()) -> SearchResult:
    if not 1 <= u <= n:
        raise ValueError(f"need 1 <= u <= n, got n={n} u={u}")
    g = _group(group, n)
    bound = density_bound(n, u).k_max_bound
    res = SearchResult(n, u, g.name, None, bound, options=_options_record(options, budget))
    sound = options.sound
    for k in range(bound, 0, -1):
        r = solve_instance(n, u, k, g, budget, options)
        res.statuses[k] = r.status.value
        res.runtimes[k] = round(r.runtime, 3)
        if r.status is Status.SAT:
            res.k_found, res.witness = k, r.witness
            break
    else:
        if all(s == "UNSAT" for s in res.statuses.values()):
            res.k_found = 0
    if res.k_found is not None:
        above = [s for k, s in res.statuses.items() if k > res.k_found]
        res.proven_optimal = all(s == "UNSAT" for s in above) and (sound or not above)
    return res


def exact_k(n: int, k: int, group: Optional[GroupSpec] = None, budget: Budget = Budget(),
            options: EncodeOptions = EncodeOptions()) -> InstanceResult:
    """Is there a distinct DNF tautology whose cubes all have length exactly k?"""
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got n={n} k={k}")
    return solve_instance(n, k, k, group, budget, options)


def options_key(n: int, u: int, group: str, options: dict) -> str:
    blob = json.dumps(options, sort_keys=True).encode()
    return f"{n}:{u}:{group}:{hashlib.sha256(blob).hexdigest()[:16]}"


class ResultStore:
    """Append-only JSON-lines log of :class:`SearchResult` records.

    Lookups return the most recent complete record with a verifying witness;
    incomplete records (timeouts) are kept for the log but never reused.
    """

    def __init__(self, path: str):
        self.path = path
        self._lock = threading.Lock()

    def _records(self) -> Iterable[dict]:
        if not os.path.exists(self.path):
            return []
        with open(self.path) as fh:
            return [json.loads(line) for line in fh if line.strip()]

    def get(self, n: int, u: int, group: str, options: dict) -> Optional[SearchResult]:
        key = options_key(n, u, group, options)
        found = None
        for rec in self._records():
            if rec.get("key") == key:
                res = SearchResult.from_record(rec)
                if res.complete and res.witness_ok():
                    found = res
        return found

    def put(self, res: SearchResult) -> None:
        rec = res.to_record()
        rec["key"] = options_key(res.n, res.u, res.group, res.options)
        line = json.dumps(rec, sort_keys=True)
        with self._lock:
            with open(self.path, "a") as fh:
                fh.write(line + "\n")


def cached_max_k(n: int, u: int, group: Optional[GroupSpec] = None, budget: Budget = Budget(),
                 options: EncodeOptions = EncodeOptions(), store: Optional[ResultStore] = None,
                 force: bool = False) -> tuple[SearchResult, bool]:
    """``max_k`` through the store; the flag says whether the record was reused."""
    g = _group(group, n)
    if store is not None and not force:
        hit = store.get(n, u, g.name, _options_record(options, budget))
        if hit is not None:
            return hit, True
    res = max_k(n, u, g, budget, options)
    if store is not None:
        store.put(res)
    return res, False


def _max_k_task(args):
    n, u, group_name, budget, options = args
    return max_k(n, u, GroupSpec.parse(group_name, n), budget, options)


@dataclass
class Cell:
    n: int
    u: int
    results: dict[str, Optional[SearchResult]]  # group name -> result, None if not attempted
    expected: Optional[Entry]

    @property
    def attempted(self) -> bool:
        return all(r is not None for r in self.results.values())

    def values(self) -> dict[str, Optional[int]]:
        return {g: None if r is None else r.k_found for g, r in self.results.items()}

    @property
    def verdict(self) -> str:
        if not self.attempted:
            return "not attempted"
        ks = set(self.values().values())
        if None in ks:
            return "timeout"
        if self.expected is None:
            return "no reference"
        if ks != {self.expected.k}:
            return "disagree"
        if not all(r.proven_optimal for r in self.results.values()):
            return "agree (lower bound)"
        return "agree"


@dataclass
class TableReport:
    which: str
    n_max: int
    u_max: int
    cells: dict[tuple[int, int], Cell]

    def group_mismatches(self) -> list[tuple[int, int, dict]]:
        """Cells where the paired groups both completed with different k."""
        out = []
        for (n, u), cell in sorted(self.cells.items()):
            vals = {g: v for g, v in cell.values().items() if v is not None}
            if len(set(vals.values())) > 1:
                out.append((n, u, vals))
        return out

    def disagreements(self) -> list[Cell]:
        return [c for _, c in sorted(self.cells.items()) if c.verdict == "disagree"]

    def _label(self, cell: Cell) -> str:
        if not cell.attempted:
            return "-"
        vals = cell.values()
        if None in vals.values():
            return "T"
        ks = sorted(set(vals.values()))
        text = "/".join(map(str, ks))
        bound = next(iter(cell.results.values())).k_density_bound
        if self.which == "plain":
            boxed = ks != [bound]
        elif self.which == "cyclic_dihedral":
            ref = PLAIN.get((cell.n, cell.u))
            boxed = ref is not None and ks != [ref.k]
        else:
            boxed = False
        if boxed:
            text = f"[{text}]"
        if not all(r.proven_optimal for r in cell.results.values()):
            text += "?"
        return text

    def render(self) -> str:
        """Grid with u growing downwards and n to the right, as in the reference tables."""
        ns = range(2, self.n_max + 1)
        width = 6
        lines = ["u\\n".rjust(4) + " |" + "".join(str(n).rjust(width) for n in ns)]
        lines.append("-" * len(lines[0]))
        for u in range(2, self.u_max + 1):
            row = str(u).rjust(4) + " |"
            for n in ns:
                cell = self.cells.get((n, u))
                row += ("" if cell is None else self._label(cell)).rjust(width)
            lines.append(row)
        legend = "? not proven optimal | T timeout | - not attempted"
        if self.which == "plain":
            legend = "[k] below the density bound | " + legend
        elif self.which == "cyclic_dihedral":
            legend = "[k] differs from the plain table | " + legend
        lines.append(legend)
        return "\n".join(lines)

    def diff_report(self) -> str:
        lines = []
        for (n, u), cell in sorted(self.cells.items()):
            exp = "" if cell.expected is None else f" expected {cell.expected.k}" + (
                " (open)" if cell.expected.open else "")
            vals = ", ".join(f"{g}={v if v is not None else 'T'}" for g, v in cell.values().items())
            lines.append(f"n={n} u={u}: {cell.verdict}: {vals}{exp}")
        for n, u, vals in self.group_mismatches():
            lines.append(f"GROUP MISMATCH n={n} u={u}: {vals}")
        return "\n".join(lines)

    def to_csv(self) -> str:
        rows = ["which,group,n,u,k_found,k_density_bound,proven_optimal,expected,verdict"]
        for (n, u), cell in sorted(self.cells.items()):
            exp = "" if cell.expected is None else str(cell.expected.k)
            for g, r in cell.results.items():
                if r is None:
                    rows.append(f"{self.which},{g},{n},{u},,,,{exp},not attempted")
                else:
                    k = "" if r.k_found is None else r.k_found
                    rows.append(f"{self.which},{g},{n},{u},{k},{r.k_density_bound},"
                                f"{int(r.proven_optimal)},{exp},{cell.verdict}")
        return "\n".join(rows) + "\n"


def reproduce_table(which: str, n_max: int, u_max: Optional[int] = None, budget: Budget = Budget(),
                    tier: str = "default", workers: int = 1, store: Optional[ResultStore] = None,
                    force: bool = False, options: EncodeOptions = EncodeOptions(),
                    progress=None) -> TableReport:
    if which not in GRIDS:
        raise ValueError(f"unknown table {which!r}; choose from {sorted(GRIDS)}")
    cap = TIERS[tier]
    u_max = n_max if u_max is None else u_max
    groups = GRID_GROUPS[which]
    todo = []
    results: dict[tuple[int, int, str], Optional[SearchResult]] = {}
    for n in range(2, n_max + 1):
        for u in range(2, min(n, u_max) + 1):
            for gname in groups:
                if n > cap:
                    results[(n, u, gname)] = None
                    continue
                hit = None
                if store is not None and not force:
                    hit = store.get(n, u, gname, _options_record(options, budget))
                if hit is not None:
                    results[(n, u, gname)] = hit
                else:
                    todo.append((n, u, gname, budget, options))

    def done(task, res):
        results[task[:3]] = res
        if store is not None:
            store.put(res)
        if progress is not None:
            progress(res)

    if workers > 1 and len(todo) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for task, res in zip(todo, pool.map(_max_k_task, todo)):
                done(task, res)
    else:
        for task in todo:
            done(task, _max_k_task(task))

    grid = GRIDS[which]
    cells = {}
    for n in range(2, n_max + 1):
        for u in range(2, min(n, u_max) + 1):
            cells[(n, u)] = Cell(n, u, {g: results[(n, u, g)] for g in groups}, grid.get((n, u)))
    return TableReport(which, n_max, u_max, cells)
