"""SAT backends: an embedded CDCL solver and a wrapper around external DIMACS solvers.

The embedded solver uses two watched literals per clause, first-UIP clause
learning, activity-based branching, Luby restarts and phase saving. Every
model either backend returns is checked against the formula before it is
handed back.
"""

from __future__ import annotations

import enum
import heapq
import os
import random
import shlex
import subprocess
import tempfile
import time
from dataclasses import dataclass, field
from typing import Optional

from .encoder import CnfFormula, first_violated_clause

DEFAULT_TIME_LIMIT = 60.0


class Status(enum.Enum):
    SAT = "SAT"
    UNSAT = "UNSAT"
    TIMEOUT = "TIMEOUT"
    UNKNOWN = "UNKNOWN"


class SolverMistrustError(RuntimeError):
    """An external solver claimed a model that does not satisfy the formula."""


@dataclass
class SolveStats:
    decisions: int = 0
    propagations: int = 0
    conflicts: int = 0
    restarts: int = 0
    learnt: int = 0
    wall_time: float = 0.0

    def counters(self) -> dict:
        """Everything except wall time; deterministic for a fixed seed."""
        return {
            "decisions": self.decisions,
            "propagations": self.propagations,
            "conflicts": self.conflicts,
            "restarts": self.restarts,
            "learnt": self.learnt,
        }


@dataclass
class SolveOutcome:
    status: Status
    model: Optional[tuple[bool, ...]] = None  # value of var v at index v - 1
    stats: SolveStats = field(default_factory=SolveStats)
    diagnostic: str = ""

    def __post_init__(self):
        if (self.model is not None) != (self.status is Status.SAT):
            raise ValueError("model must be present exactly when satisfiable")

    def value(self, var: int) -> bool:
        return self.model[var - 1]


def luby(i: int) -> int:
    """i-th element (1-based) of the Luby sequence 1 1 2 1 1 2 4 ..."""
    k = 1
    while (1 << k) - 1 < i:
        k += 1
    while True:
        if i == (1 << k) - 1:
            return 1 << (k - 1)
        i -= (1 << (k - 1)) - 1
        k = 1
        while (1 << k) - 1 < i:
            k += 1


class _Timeout(Exception):
    pass


class CDCLSolver:
    """Conflict-driven clause learning over a fixed CNF formula.

    Literal ``v`` is stored as ``2*v`` and ``-v`` as ``2*v + 1``.
    ``heuristic="ordered"`` always branches on the lowest unassigned variable;
    ``"vsids"`` starts from the same order and then follows conflict activity.
    A fresh variable is first tried with ``initial_phase`` (default ``False``:
    cube not selected); afterwards its last value is reused.

    Binary clauses live in implication lists (``bins[l]`` holds the literals
    forced once ``l`` is false); longer clauses use two watched literals.
    """

    def __init__(self, formula: CnfFormula, heuristic: str = "vsids", seed: int = 0,
                 random_freq: float = 0.0, restart_base: int = 100, initial_phase: bool = False):
        if heuristic not in ("vsids", "ordered"):
            raise ValueError(f"unknown heuristic {heuristic!r}")
        self.formula = formula
        self.heuristic = heuristic
        self.rng = random.Random(seed)
        self.random_freq = random_freq
        self.restart_base = restart_base
        n = formula.num_vars
        self.nv = n
        self.val = [0] * (2 * n + 2)  # per literal: 1 true, -1 false, 0 open
        self.level = [0] * (n + 1)
        self.reason = [-1] * (n + 1)
        self.phase = [initial_phase] * (n + 1)
        self.activity = [0.0] * (n + 1)
        self.var_inc = 1.0
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.clauses: list[Optional[list[int]]] = []
        self.lbd: list[int] = []
        self.watches: list[list[int]] = [[] for _ in range(2 * n + 2)]
        self.bins: list[list[tuple[int, int]]] = [[] for _ in range(2 * n + 2)]
        self.num_original = 0
        self.heap = [(0.0, v) for v in range(1, n + 1)]
        self.next_ordered = 1
        self.stats = SolveStats()
        # search schedule, kept across solve() calls so a call can resume
        self.restart_no = 1
        self.since_restart = 0
        self.next_reduce = 2000
        self.reduces = 0
        self.ok = True
        self._load(formula.clauses)

    @staticmethod
    def _lit(x: int) -> int:
        return 2 * x if x > 0 else -2 * x + 1

    def _load(self, clauses):
        units = []
        for c in clauses:
            lits = sorted({self._lit(x) for x in c})
            if any(l ^ 1 in lits for l in lits):
                continue
            if not lits:
                self.ok = False
                return
            if len(lits) == 1:
                units.append(lits[0])
                continue
            self._attach(lits, 0)
        self.num_original = len(self.clauses)
        for l in units:
            v = self.val[l]
            if v == -1:
                self.ok = False
                return
            if v == 0:
                self._assign(l, -1)
        if self._propagate() != -1:
            self.ok = False

    def _attach(self, lits: list[int], lbd: int) -> int:
        ci = len(self.clauses)
        self.clauses.append(lits)
        self.lbd.append(lbd)
        if len(lits) == 2:
            a, b = lits
            self.bins[a].append((b, ci))
            self.bins[b].append((a, ci))
        else:
            self.watches[lits[0]].append(ci)
            self.watches[lits[1]].append(ci)
        return ci

    def _assign(self, lit: int, reason: int) -> None:
        self.val[lit] = 1
        self.val[lit ^ 1] = -1
        v = lit >> 1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(lit)

    def _propagate(self) -> int:
        """Unit propagation; returns a conflicting clause index or -1."""
        val = self.val
        clauses = self.clauses
        watches = self.watches
        bins = self.bins
        trail = self.trail
        level = self.level
        reason = self.reason
        lvl = len(self.trail_lim)
        qhead = self.qhead
        conflict = -1
        while qhead < len(trail):
            fl = trail[qhead] ^ 1
            qhead += 1
            for q, ci in bins[fl]:
                vq = val[q]
                if vq == 1:
                    continue
                if vq == -1:
                    conflict = ci
                    break
                val[q] = 1
                val[q ^ 1] = -1
                level[q >> 1] = lvl
                reason[q >> 1] = ci
                trail.append(q)
            if conflict != -1:
                break
            ws = watches[fl]
            if not ws:
                continue
            keep = []
            n_ws = len(ws)
            i = 0
            while i < n_ws:
                ci = ws[i]
                i += 1
                c = clauses[ci]
                if c is None:
                    continue
                first = c[0]
                if first == fl:
                    first = c[1]
                    c[0] = first
                    c[1] = fl
                if val[first] == 1:
                    keep.append(ci)
                    continue
                for j in range(2, len(c)):
                    lj = c[j]
                    if val[lj] != -1:
                        c[1] = lj
                        c[j] = fl
                        watches[lj].append(ci)
                        break
                else:
                    keep.append(ci)
                    if val[first] == -1:
                        keep.extend(ws[i:])
                        conflict = ci
                        break
                    val[first] = 1
                    val[first ^ 1] = -1
                    level[first >> 1] = lvl
                    reason[first >> 1] = ci
                    trail.append(first)
            watches[fl] = keep
            if conflict != -1:
                break
        self.stats.propagations += qhead - self.qhead
        self.qhead = qhead
        return conflict

    def _bump(self, v: int) -> None:
        act = self.activity
        act[v] += self.var_inc
        if act[v] > 1e100:
            for i in range(1, self.nv + 1):
                act[i] *= 1e-100
            self.var_inc *= 1e-100
            self.heap = [(-act[i], i) for i in range(1, self.nv + 1) if self.val[2 * i] == 0]
            heapq.heapify(self.heap)
        elif self.val[2 * v] == 0:
            heapq.heappush(self.heap, (-act[v], v))

    def _analyze(self, confl: int) -> tuple[list[int], int]:
        seen = set()
        learnt = [0]
        level = self.level
        trail = self.trail
        cur = len(self.trail_lim)
        counter = 0
        pv = 0
        idx = len(trail) - 1
        while True:
            for q in self.clauses[confl]:
                v = q >> 1
                if v != pv and v not in seen and level[v] > 0:
                    seen.add(v)
                    self._bump(v)
                    if level[v] >= cur:
                        counter += 1
                    else:
                        learnt.append(q)
            while (trail[idx] >> 1) not in seen:
                idx -= 1
            p = trail[idx]
            idx -= 1
            pv = p >> 1
            confl = self.reason[pv]
            seen.discard(pv)
            counter -= 1
            if counter == 0:
                break
        learnt[0] = p ^ 1
        # drop literals implied by the rest of the clause
        marked = {l >> 1 for l in learnt}
        out = [learnt[0]]
        for q in learnt[1:]:
            qv = q >> 1
            r = self.reason[qv]
            if r == -1 or any(x >> 1 != qv and (x >> 1) not in marked and level[x >> 1] > 0
                              for x in self.clauses[r]):
                out.append(q)
        if len(out) == 1:
            return out, 0
        best = max(range(1, len(out)), key=lambda i: level[out[i] >> 1])
        out[1], out[best] = out[best], out[1]
        return out, level[out[1] >> 1]

    def _cancel_until(self, lvl: int) -> None:
        if len(self.trail_lim) <= lvl:
            return
        start = self.trail_lim[lvl]
        val = self.val
        phase = self.phase
        reason = self.reason
        if self.heuristic == "vsids":
            act = self.activity
            heap = self.heap
            push = heapq.heappush
            for lit in self.trail[start:]:
                v = lit >> 1
                val[lit] = 0
                val[lit ^ 1] = 0
                phase[v] = not (lit & 1)
                reason[v] = -1
                push(heap, (-act[v], v))
        else:
            for lit in self.trail[start:]:
                v = lit >> 1
                val[lit] = 0
                val[lit ^ 1] = 0
                phase[v] = not (lit & 1)
                reason[v] = -1
                if v < self.next_ordered:
                    self.next_ordered = v
        del self.trail[start:]
        del self.trail_lim[lvl:]
        self.qhead = start

    def _pick_branch(self) -> int:
        val = self.val
        if self.random_freq and self.rng.random() < self.random_freq:
            free = [v for v in range(1, self.nv + 1) if val[2 * v] == 0]
            if free:
                v = self.rng.choice(free)
                return 2 * v + (0 if self.phase[v] else 1)
        if self.heuristic == "ordered":
            v = self.next_ordered
            while v <= self.nv and val[2 * v] != 0:
                v += 1
            self.next_ordered = v
            if v > self.nv:
                return -1
            return 2 * v + (0 if self.phase[v] else 1)
        heap = self.heap
        act = self.activity
        while heap:
            a, v = heapq.heappop(heap)
            if val[2 * v] == 0 and -a == act[v]:
                return 2 * v + (0 if self.phase[v] else 1)
        return -1

    def _locked(self, ci: int) -> bool:
        c = self.clauses[ci]
        v = c[0] >> 1
        return self.reason[v] == ci and self.val[c[0]] == 1

    def _reduce_db(self) -> None:
        learnts = [ci for ci in range(self.num_original, len(self.clauses))
                   if self.clauses[ci] is not None and len(self.clauses[ci]) > 2 and self.lbd[ci] > 2]
        learnts.sort(key=lambda ci: (self.lbd[ci], len(self.clauses[ci]), ci))
        for ci in learnts[len(learnts) // 2:]:
            if not self._locked(ci):
                self.clauses[ci] = None

    def solve(self, time_limit: Optional[float] = DEFAULT_TIME_LIMIT,
              conflict_limit: Optional[int] = None) -> SolveOutcome:
        """Search until an answer, ``time_limit`` seconds, or ``conflict_limit`` conflicts.

        The conflict count is cumulative over the solver's lifetime, so after
        a timeout another call with a higher limit continues the same search.
        """
        t0 = time.perf_counter()
        try:
            status = self._search(t0, time_limit, conflict_limit)
        except _Timeout:
            status = Status.TIMEOUT
        self.stats.wall_time = time.perf_counter() - t0
        model = None
        if status is Status.SAT:
            model = tuple(self.val[2 * v] == 1 for v in range(1, self.nv + 1))
            bad = first_violated_clause(self.formula, model)
            if bad is not None:
                raise AssertionError(f"embedded solver produced a model violating clause {bad}")
        return SolveOutcome(status, model, self.stats)

    def _search(self, t0, time_limit, conflict_limit) -> Status:
        if not self.ok:
            return Status.UNSAT
        deadline = None if time_limit is None else t0 + time_limit
        stats = self.stats
        while True:
            confl = self._propagate()
            if confl != -1:
                stats.conflicts += 1
                self.since_restart += 1
                if not self.trail_lim:
                    return Status.UNSAT
                learnt, back = self._analyze(confl)
                self._cancel_until(back)
                if len(learnt) == 1:
                    self._assign(learnt[0], -1)
                else:
                    lbd = len({self.level[l >> 1] for l in learnt})
                    ci = self._attach(learnt, lbd)
                    stats.learnt += 1
                    self._assign(learnt[0], ci)
                self.var_inc /= 0.95
                if conflict_limit is not None and stats.conflicts >= conflict_limit:
                    raise _Timeout
                if deadline is not None and stats.conflicts % 64 == 0 and time.perf_counter() > deadline:
                    raise _Timeout
                continue
            if self.since_restart >= luby(self.restart_no) * self.restart_base:
                stats.restarts += 1
                self.restart_no += 1
                self.since_restart = 0
                self._cancel_until(0)
            if stats.conflicts >= self.next_reduce:
                self.reduces += 1
                self.next_reduce = stats.conflicts + 2000 + 300 * self.reduces
                self._reduce_db()
            lit = self._pick_branch()
            if lit == -1:
                return Status.SAT
            stats.decisions += 1
            if deadline is not None and stats.decisions % 256 == 0 and time.perf_counter() > deadline:
                raise _Timeout
            self.trail_lim.append(len(self.trail))
            self._assign(lit, -1)


class CompiledCDCLSolver:
    """The CDCL search of :class:`CDCLSolver`, run by the numba kernel."""

    def __init__(self, formula: CnfFormula, heuristic: str = "vsids", seed: int = 0,
                 random_freq: float = 0.0, restart_base: int = 100, initial_phase: bool = False):
        from . import _kernel

        if heuristic not in ("vsids", "ordered"):
            raise ValueError(f"unknown heuristic {heuristic!r}")
        self._k = _kernel
        self.formula = formula
        self.nv = formula.num_vars
        clauses = []
        ok = True
        for c in formula.clauses:
            lits = sorted({CDCLSolver._lit(x) for x in c})
            if any(l ^ 1 in lits for l in lits):
                continue
            if not lits:
                ok = False
            clauses.append(lits)
        self.state = _kernel.KernelState(self.nv, [c for c in clauses if c], heuristic == "ordered",
                                         seed, random_freq, restart_base, initial_phase)
        self.state.ok = self.state.ok and ok

    def stats(self, elapsed: float) -> SolveStats:
        k, sc = self._k, self.state.sc
        return SolveStats(int(sc[k.DECISIONS]), int(sc[k.PROPS]), int(sc[k.CONFLICTS]),
                          int(sc[k.RESTARTS]), int(sc[k.LEARNT]), elapsed)

    def solve(self, time_limit: Optional[float] = DEFAULT_TIME_LIMIT,
              conflict_limit: Optional[int] = None) -> SolveOutcome:
        k = self._k
        t0 = time.perf_counter()
        if not self.state.ok:
            return SolveOutcome(Status.UNSAT, None, self.stats(time.perf_counter() - t0))
        limit = -1 if conflict_limit is None else conflict_limit
        while True:
            code = self.state.run(limit, 2000, 50000)
            if code == k.GROW:
                self.state.grow()
                continue
            if code in (k.SAT, k.UNSAT):
                break
            if code == k.LIMIT or (time_limit is not None and time.perf_counter() - t0 > time_limit):
                return SolveOutcome(Status.TIMEOUT, None, self.stats(time.perf_counter() - t0))
        stats = self.stats(time.perf_counter() - t0)
        if code == k.UNSAT:
            return SolveOutcome(Status.UNSAT, None, stats)
        val = self.state.val
        model = tuple(bool(val[2 * v] == 1) for v in range(1, self.nv + 1))
        bad = first_violated_clause(self.formula, model)
        if bad is not None:
            raise AssertionError(f"compiled solver produced a model violating clause {bad}")
        return SolveOutcome(Status.SAT, model, stats)


def _have_numba() -> bool:
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


def embedded_solver(f: CnfFormula, engine: str = "auto", **kwargs):
    """A fresh embedded solver for ``f``.

    ``engine`` is ``"compiled"`` (numba), ``"python"``, or ``"auto"`` (compiled
    when numba is importable). The engines share heuristics and restart
    policy but minimize learnt clauses differently, so their search paths
    (and statistics) differ; each is deterministic on its own.
    """
    if engine == "auto":
        engine = "compiled" if _have_numba() else "python"
    if engine == "compiled":
        return CompiledCDCLSolver(f, **kwargs)
    if engine == "python":
        return CDCLSolver(f, **kwargs)
    raise ValueError(f"unknown engine {engine!r}")


def solve_embedded(f: CnfFormula, time_limit: Optional[float] = DEFAULT_TIME_LIMIT,
                   conflict_limit: Optional[int] = None, engine: str = "auto",
                   **kwargs) -> SolveOutcome:
    """Solve with the in-process CDCL search; see :func:`embedded_solver` for ``engine``."""
    return embedded_solver(f, engine, **kwargs).solve(time_limit=time_limit, conflict_limit=conflict_limit)


def parse_solver_output(text: str, returncode: int, num_vars: int) -> tuple[Status, Optional[list[int]], str]:
    """Read ``s``/``v`` lines of a competition-format solver; fall back on exit codes 10/20."""
    status = None
    lits: list[int] = []
    saw_v = False
    for line in text.splitlines():
        line = line.strip()
        if line.startswith("s "):
            word = line[2:].strip().upper()
            status = {"SATISFIABLE": Status.SAT, "UNSATISFIABLE": Status.UNSAT}.get(word, Status.UNKNOWN)
        elif line.startswith("v ") or line == "v":
            saw_v = True
            for tok in line[1:].split():
                try:
                    lits.append(int(tok))
                except ValueError:
                    return Status.UNKNOWN, None, f"bad model token {tok!r}"
    if status is None:
        status = {10: Status.SAT, 20: Status.UNSAT}.get(returncode)
        if status is None:
            return Status.UNKNOWN, None, f"no status line and exit code {returncode}"
    if status is Status.SAT:
        if not saw_v:
            return Status.UNKNOWN, None, "satisfiable but no model printed"
        return status, [l for l in lits if l != 0], ""
    return status, None, ""


def solve_external(f: CnfFormula, solver_command: str,
                   time_limit: Optional[float] = DEFAULT_TIME_LIMIT) -> SolveOutcome:
    """Run ``solver_command`` (``{cnf}`` is replaced by a DIMACS file path)."""
    stats = SolveStats()
    t0 = time.perf_counter()
    with tempfile.TemporaryDirectory(prefix="dnftaut-") as tmp:
        path = os.path.join(tmp, "instance.cnf")
        with open(path, "w", newline="\n") as fh:
            fh.write(f.to_dimacs())
        if "{cnf}" in solver_command:
            argv = [tok.replace("{cnf}", path) for tok in shlex.split(solver_command)]
        else:
            argv = shlex.split(solver_command) + [path]
        try:
            proc = subprocess.run(argv, capture_output=True, text=True, timeout=time_limit)
        except subprocess.TimeoutExpired:
            stats.wall_time = time.perf_counter() - t0
            return SolveOutcome(Status.TIMEOUT, None, stats, "solver timed out")
        except OSError as exc:
            stats.wall_time = time.perf_counter() - t0
            return SolveOutcome(Status.UNKNOWN, None, stats, f"could not start solver: {exc}")
    stats.wall_time = time.perf_counter() - t0
    status, lits, diag = parse_solver_output(proc.stdout, proc.returncode, f.num_vars)
    if status is not Status.SAT:
        if status is Status.UNKNOWN and not diag:
            diag = f"solver reported unknown (exit code {proc.returncode})"
        return SolveOutcome(status, None, stats, diag + (proc.stderr[-500:] if status is Status.UNKNOWN else ""))
    model = [False] * f.num_vars
    for l in lits:
        if abs(l) <= f.num_vars:
            model[abs(l) - 1] = l > 0
    model = tuple(model)
    bad = first_violated_clause(f, model)
    if bad is not None:
        raise SolverMistrustError(f"{solver_command!r} returned a model violating clause {bad}: {f.clauses[bad]}")
    return SolveOutcome(Status.SAT, model, stats)


def solve(f: CnfFormula, time_limit: Optional[float] = DEFAULT_TIME_LIMIT,
          solver_command: Optional[str] = None, **kwargs) -> SolveOutcome:
    if f.trivially_unsat:
        return SolveOutcome(Status.UNSAT, None, SolveStats(), f.unsat_reason)
    if solver_command:
        return solve_external(f, solver_command, time_limit)
    return solve_embedded(f, time_limit=time_limit, **kwargs)
