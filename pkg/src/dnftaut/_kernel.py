"""Compiled CDCL core over flat numpy arrays.

Same algorithm as :class:`dnftaut.solver.CDCLSolver`. Clauses live in one
literal pool; each clause owns two watch nodes (``2*ci`` and ``2*ci + 1``)
threaded through per-literal linked lists. The search runs in resumable
chunks so the Python side can enforce wall-clock limits and grow storage.
"""

from __future__ import annotations

import numpy as np
from numba import njit

# slots of the int64 scalar state vector
NCL = 0
QHEAD = 1
TRAIL = 2
NLEV = 3
LITS_USED = 4
DECISIONS = 5
PROPS = 6
CONFLICTS = 7
RESTARTS = 8
LEARNT = 9
RESTART_NO = 10
SINCE_RESTART = 11
NEXT_REDUCE = 12
NUM_ORIG = 13
RNG = 14
HEAP_N = 15
NEXT_ORDERED = 16
NV = 17
ORDERED = 18
RESTART_BASE = 19
REDUCES = 20
NSCALARS = 21

# slots of the float64 state vector
VAR_INC = 0
RANDOM_FREQ = 1

PAUSE = 0
GROW = 1
LIMIT = 2
SAT = 10
UNSAT = 20


@njit(cache=True)
def luby(i):
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


@njit(cache=True)
def _better(act, a, b):
    return act[a] > act[b] or (act[a] == act[b] and a < b)


@njit(cache=True)
def _heap_up(heap, pos, act, i):
    x = heap[i]
    while i > 0:
        p = (i - 1) >> 1
        if _better(act, x, heap[p]):
            heap[i] = heap[p]
            pos[heap[i]] = i
            i = p
        else:
            break
    heap[i] = x
    pos[x] = i


@njit(cache=True)
def _heap_down(heap, pos, act, n, i):
    x = heap[i]
    while True:
        c = 2 * i + 1
        if c >= n:
            break
        if c + 1 < n and _better(act, heap[c + 1], heap[c]):
            c += 1
        if _better(act, heap[c], x):
            heap[i] = heap[c]
            pos[heap[i]] = i
            i = c
        else:
            break
    heap[i] = x
    pos[x] = i


@njit(cache=True)
def _heap_insert(sc, heap, pos, act, v):
    if pos[v] >= 0:
        return
    n = sc[HEAP_N]
    heap[n] = v
    pos[v] = n
    sc[HEAP_N] = n + 1
    _heap_up(heap, pos, act, n)


@njit(cache=True)
def _heap_pop(sc, heap, pos, act):
    n = sc[HEAP_N] - 1
    v = heap[0]
    pos[v] = -1
    sc[HEAP_N] = n
    if n > 0:
        heap[0] = heap[n]
        pos[heap[0]] = 0
        _heap_down(heap, pos, act, n, 0)
    return v


@njit(cache=True)
def _bump(sc, fs, act, heap, pos, v):
    act[v] += fs[VAR_INC]
    if act[v] > 1e100:
        for i in range(1, sc[NV] + 1):
            act[i] *= 1e-100
        fs[VAR_INC] *= 1e-100
    if pos[v] >= 0:
        _heap_up(heap, pos, act, pos[v])


@njit(cache=True)
def _assign(sc, val, level, reason, trail, lit, r):
    val[lit] = 1
    val[lit ^ 1] = -1
    v = lit >> 1
    level[v] = sc[NLEV]
    reason[v] = r
    trail[sc[TRAIL]] = lit
    sc[TRAIL] += 1


@njit(cache=True)
def attach(sc, pool, cl_start, cl_len, cl_lbd, cl_del, w_head, w_next, w_blk, lits, lbd):
    ci = sc[NCL]
    s = sc[LITS_USED]
    n = lits.shape[0]
    for j in range(n):
        pool[s + j] = lits[j]
    cl_start[ci] = s
    cl_len[ci] = n
    cl_lbd[ci] = lbd
    cl_del[ci] = 0
    sc[LITS_USED] = s + n
    sc[NCL] = ci + 1
    a = lits[0]
    b = lits[1]
    w_next[2 * ci] = w_head[a]
    w_head[a] = 2 * ci
    w_blk[2 * ci] = b
    w_next[2 * ci + 1] = w_head[b]
    w_head[b] = 2 * ci + 1
    w_blk[2 * ci + 1] = a
    return ci


@njit(cache=True)
def propagate(sc, val, level, reason, trail, pool, cl_start, cl_len, cl_del, w_head, w_next, w_blk):
    """Unit propagation; returns a conflicting clause index or -1.

    Each watch node carries a blocker literal from its clause; a true
    blocker lets the node be skipped without reading the clause.
    """
    qhead = sc[QHEAD]
    start = qhead
    confl = -1
    while qhead < sc[TRAIL]:
        fl = trail[qhead] ^ 1
        qhead += 1
        prev = -1
        nd = w_head[fl]
        while nd != -1:
            nxt = w_next[nd]
            if val[w_blk[nd]] == 1:
                prev = nd
                nd = nxt
                continue
            ci = nd >> 1
            if cl_del[ci]:
                if prev == -1:
                    w_head[fl] = nxt
                else:
                    w_next[prev] = nxt
                nd = nxt
                continue
            s = cl_start[ci]
            if pool[s] == fl:
                pool[s] = pool[s + 1]
                pool[s + 1] = fl
            first = pool[s]
            if val[first] == 1:
                w_blk[nd] = first
                prev = nd
                nd = nxt
                continue
            moved = False
            for j in range(s + 2, s + cl_len[ci]):
                lj = pool[j]
                if val[lj] != -1:
                    pool[s + 1] = lj
                    pool[j] = fl
                    if prev == -1:
                        w_head[fl] = nxt
                    else:
                        w_next[prev] = nxt
                    w_next[nd] = w_head[lj]
                    w_head[lj] = nd
                    w_blk[nd] = first
                    moved = True
                    break
            if moved:
                nd = nxt
                continue
            if val[first] == -1:
                confl = ci
                break
            _assign(sc, val, level, reason, trail, first, ci)
            prev = nd
            nd = nxt
        if confl != -1:
            break
    sc[PROPS] += qhead - start
    sc[QHEAD] = qhead
    return confl


@njit(cache=True)
def _cancel_until(sc, val, level, reason, phase, trail, trail_lim, act, heap, pos, lvl):
    if sc[NLEV] <= lvl:
        return
    start = trail_lim[lvl]
    ordered = sc[ORDERED]
    for i in range(start, sc[TRAIL]):
        lit = trail[i]
        v = lit >> 1
        val[lit] = 0
        val[lit ^ 1] = 0
        phase[v] = 1 if (lit & 1) == 0 else 0
        reason[v] = -1
        if ordered:
            if v < sc[NEXT_ORDERED]:
                sc[NEXT_ORDERED] = v
        else:
            _heap_insert(sc, heap, pos, act, v)
    sc[TRAIL] = start
    sc[QHEAD] = start
    sc[NLEV] = lvl


@njit(cache=True)
def _rand(sc):
    sc[RNG] = (sc[RNG] * 1103515245 + 12345) % 2147483648
    return sc[RNG]


@njit(cache=True)
def _pick(sc, fs, val, phase, act, heap, pos):
    nv = sc[NV]
    if fs[RANDOM_FREQ] > 0.0 and _rand(sc) / 2147483648.0 < fs[RANDOM_FREQ]:
        free = 0
        for v in range(1, nv + 1):
            if val[2 * v] == 0:
                free += 1
        if free > 0:
            pick = _rand(sc) % free
            for v in range(1, nv + 1):
                if val[2 * v] == 0:
                    if pick == 0:
                        return 2 * v + (0 if phase[v] else 1)
                    pick -= 1
    if sc[ORDERED]:
        v = sc[NEXT_ORDERED]
        while v <= nv and val[2 * v] != 0:
            v += 1
        sc[NEXT_ORDERED] = v
        if v > nv:
            return -1
        return 2 * v + (0 if phase[v] else 1)
    while sc[HEAP_N] > 0:
        v = _heap_pop(sc, heap, pos, act)
        if val[2 * v] == 0:
            return 2 * v + (0 if phase[v] else 1)
    return -1


@njit(cache=True)
def _redundant(level, reason, pool, cl_start, cl_len, seen, stack, toclear, n_clear, p, abstract):
    """Whether literal ``p`` is implied by literals already marked in ``seen``.

    Marks every variable it proves redundant; on failure those marks are
    undone. Returns the new length of ``toclear``.
    """
    top = n_clear
    sp = 0
    stack[sp] = p
    sp += 1
    while sp > 0:
        sp -= 1
        q = stack[sp]
        qv = q >> 1
        r = reason[qv]
        s = cl_start[r]
        for t in range(s, s + cl_len[r]):
            x = pool[t]
            v = x >> 1
            if v == qv or seen[v] != 0 or level[v] == 0:
                continue
            if reason[v] != -1 and (abstract & (1 << (level[v] & 63))) != 0:
                seen[v] = 1
                stack[sp] = x
                sp += 1
                toclear[n_clear] = x
                n_clear += 1
            else:
                for i in range(top, n_clear):
                    seen[toclear[i] >> 1] = 0
                return -1
    return n_clear


@njit(cache=True)
def _analyze(sc, fs, level, reason, trail, pool, cl_start, cl_len, seen, learnt, out,
             stack, toclear, act, heap, pos, confl):
    """First-UIP learning with recursive minimization.

    Fills ``out`` and returns (length, backjump level).
    """
    cur = sc[NLEV]
    counter = 0
    pv = 0
    idx = sc[TRAIL] - 1
    n = 1
    p = 0
    while True:
        s = cl_start[confl]
        for j in range(s, s + cl_len[confl]):
            q = pool[j]
            v = q >> 1
            if v != pv and seen[v] == 0 and level[v] > 0:
                seen[v] = 1
                _bump(sc, fs, act, heap, pos, v)
                if level[v] >= cur:
                    counter += 1
                else:
                    learnt[n] = q
                    n += 1
        while seen[trail[idx] >> 1] == 0:
            idx -= 1
        p = trail[idx]
        idx -= 1
        pv = p >> 1
        confl = reason[pv]
        seen[pv] = 0
        counter -= 1
        if counter == 0:
            break
    learnt[0] = p ^ 1
    seen[pv] = 1
    n_clear = 0
    abstract = 0
    for i in range(n):
        toclear[n_clear] = learnt[i]
        n_clear += 1
        if i > 0:
            abstract |= 1 << (level[learnt[i] >> 1] & 63)
    out[0] = learnt[0]
    m = 1
    for i in range(1, n):
        q = learnt[i]
        if reason[q >> 1] == -1:
            out[m] = q
            m += 1
            continue
        res = _redundant(level, reason, pool, cl_start, cl_len, seen, stack, toclear, n_clear,
                         q, abstract)
        if res < 0:
            out[m] = q
            m += 1
        else:
            n_clear = res
    for i in range(n_clear):
        seen[toclear[i] >> 1] = 0
    if m == 1:
        return 1, 0
    best = 1
    for i in range(2, m):
        if level[out[i] >> 1] > level[out[best] >> 1]:
            best = i
    tmp = out[1]
    out[1] = out[best]
    out[best] = tmp
    return m, level[out[1] >> 1]


@njit(cache=True)
def _reduce_db(sc, val, reason, pool, cl_start, cl_len, cl_lbd, cl_del):
    lo = sc[NUM_ORIG]
    hi = sc[NCL]
    cand = np.empty(hi - lo, dtype=np.int64)
    keys = np.empty(hi - lo, dtype=np.float64)
    m = 0
    for ci in range(lo, hi):
        if cl_del[ci] or cl_len[ci] <= 2 or cl_lbd[ci] <= 2:
            continue
        first = pool[cl_start[ci]]
        if reason[first >> 1] == ci and val[first] == 1:
            continue
        cand[m] = ci
        keys[m] = cl_lbd[ci] * 1e7 + cl_len[ci]
        m += 1
    order = np.argsort(keys[:m], kind="mergesort")
    for t in range(m // 2, m):
        cl_del[cand[order[t]]] = 1


@njit(cache=True)
def search(sc, fs, val, level, reason, phase, act, heap, pos, trail, trail_lim,
           pool, cl_start, cl_len, cl_lbd, cl_del, w_head, w_next, w_blk,
           seen, learnt, out, stack, toclear, lvl_stamp, conflict_limit, chunk_conflicts, chunk_decisions):
    nv = sc[NV]
    c0 = sc[CONFLICTS]
    d0 = sc[DECISIONS]
    while True:
        if sc[NCL] + 1 >= cl_start.shape[0] or sc[LITS_USED] + nv + 1 >= pool.shape[0]:
            return GROW
        confl = propagate(sc, val, level, reason, trail, pool, cl_start, cl_len, cl_del, w_head, w_next,
                          w_blk)
        if confl != -1:
            sc[CONFLICTS] += 1
            sc[SINCE_RESTART] += 1
            if sc[NLEV] == 0:
                return UNSAT
            m, back = _analyze(sc, fs, level, reason, trail, pool, cl_start, cl_len, seen, learnt,
                               out, stack, toclear, act, heap, pos, confl)
            _cancel_until(sc, val, level, reason, phase, trail, trail_lim, act, heap, pos, back)
            if m == 1:
                _assign(sc, val, level, reason, trail, out[0], -1)
            else:
                stamp = sc[CONFLICTS]
                lbd = 0
                for i in range(m):
                    lv = level[out[i] >> 1]
                    if lvl_stamp[lv] != stamp:
                        lvl_stamp[lv] = stamp
                        lbd += 1
                ci = attach(sc, pool, cl_start, cl_len, cl_lbd, cl_del, w_head, w_next, w_blk, out[:m], lbd)
                sc[LEARNT] += 1
                _assign(sc, val, level, reason, trail, out[0], ci)
            fs[VAR_INC] /= 0.95
            if conflict_limit >= 0 and sc[CONFLICTS] >= conflict_limit:
                return LIMIT
            if sc[CONFLICTS] - c0 >= chunk_conflicts:
                return PAUSE
            continue
        if sc[SINCE_RESTART] >= luby(sc[RESTART_NO]) * sc[RESTART_BASE]:
            sc[RESTARTS] += 1
            sc[RESTART_NO] += 1
            sc[SINCE_RESTART] = 0
            _cancel_until(sc, val, level, reason, phase, trail, trail_lim, act, heap, pos, 0)
        if sc[CONFLICTS] >= sc[NEXT_REDUCE]:
            sc[REDUCES] += 1
            sc[NEXT_REDUCE] = sc[CONFLICTS] + 2000 + 300 * sc[REDUCES]
            _reduce_db(sc, val, reason, pool, cl_start, cl_len, cl_lbd, cl_del)
        lit = _pick(sc, fs, val, phase, act, heap, pos)
        if lit == -1:
            return SAT
        sc[DECISIONS] += 1
        trail_lim[sc[NLEV]] = sc[TRAIL]
        sc[NLEV] += 1
        _assign(sc, val, level, reason, trail, lit, -1)
        if sc[DECISIONS] - d0 >= chunk_decisions:
            return PAUSE


class KernelState:
    """Array-backed solver state for :func:`search`."""

    def __init__(self, nv: int, clauses: list[list[int]], ordered: bool, seed: int,
                 random_freq: float, restart_base: int, initial_phase: bool = False):
        self.nv = nv
        total_lits = sum(len(c) for c in clauses)
        ccap = max(2 * len(clauses) + 1024, 4096)
        lcap = max(2 * total_lits + 16 * (nv + 1), 1 << 16)
        self.sc = np.zeros(NSCALARS, dtype=np.int64)
        self.fs = np.array([1.0, random_freq])
        self.val = np.zeros(2 * nv + 2, dtype=np.int8)
        self.level = np.zeros(nv + 1, dtype=np.int32)
        self.reason = np.full(nv + 1, -1, dtype=np.int64)
        self.phase = np.full(nv + 1, int(initial_phase), dtype=np.int8)
        self.act = np.zeros(nv + 1, dtype=np.float64)
        self.heap = np.zeros(nv + 1, dtype=np.int64)
        self.pos = np.full(nv + 1, -1, dtype=np.int64)
        self.trail = np.zeros(nv + 1, dtype=np.int64)
        self.trail_lim = np.zeros(nv + 1, dtype=np.int64)
        self.pool = np.zeros(lcap, dtype=np.int64)
        self.cl_start = np.zeros(ccap, dtype=np.int64)
        self.cl_len = np.zeros(ccap, dtype=np.int64)
        self.cl_lbd = np.zeros(ccap, dtype=np.int64)
        self.cl_del = np.zeros(ccap, dtype=np.int8)
        self.w_head = np.full(2 * nv + 2, -1, dtype=np.int64)
        self.w_next = np.full(2 * ccap, -1, dtype=np.int64)
        self.w_blk = np.zeros(2 * ccap, dtype=np.int64)
        self.seen = np.zeros(nv + 1, dtype=np.int8)
        self.learnt = np.zeros(nv + 1, dtype=np.int64)
        self.out = np.zeros(nv + 1, dtype=np.int64)
        self.stack = np.zeros(nv + 1, dtype=np.int64)
        self.toclear = np.zeros(nv + 1, dtype=np.int64)
        self.lvl_stamp = np.full(nv + 1, -1, dtype=np.int64)

        sc = self.sc
        sc[NV] = nv
        sc[ORDERED] = int(ordered)
        sc[RNG] = seed % 2147483648
        sc[RESTART_NO] = 1
        sc[RESTART_BASE] = restart_base
        sc[NEXT_REDUCE] = 2000
        sc[NEXT_ORDERED] = 1
        for v in range(1, nv + 1):
            self.heap[v - 1] = v
            self.pos[v] = v - 1
        sc[HEAP_N] = nv

        self.ok = True
        units = []
        for lits in clauses:
            if len(lits) == 1:
                units.append(lits[0])
            else:
                attach(sc, self.pool, self.cl_start, self.cl_len, self.cl_lbd, self.cl_del,
                       self.w_head, self.w_next, self.w_blk, np.asarray(lits, dtype=np.int64), 0)
        sc[NUM_ORIG] = sc[NCL]
        for lit in units:
            if self.val[lit] == -1:
                self.ok = False
                break
            if self.val[lit] == 0:
                _assign(sc, self.val, self.level, self.reason, self.trail, lit, -1)

    def grow(self) -> None:
        ccap = self.cl_start.shape[0]
        if self.sc[NCL] + 1 >= ccap:
            for name in ("cl_start", "cl_len", "cl_lbd", "cl_del"):
                arr = getattr(self, name)
                setattr(self, name, np.concatenate([arr, np.zeros_like(arr)]))
            self.w_next = np.concatenate([self.w_next, np.full_like(self.w_next, -1)])
            self.w_blk = np.concatenate([self.w_blk, np.zeros_like(self.w_blk)])
        if self.sc[LITS_USED] + self.nv + 1 >= self.pool.shape[0]:
            self.pool = np.concatenate([self.pool, np.zeros_like(self.pool)])

    def run(self, conflict_limit: int, chunk_conflicts: int, chunk_decisions: int) -> int:
        return search(self.sc, self.fs, self.val, self.level, self.reason, self.phase, self.act,
                      self.heap, self.pos, self.trail, self.trail_lim, self.pool, self.cl_start,
                      self.cl_len, self.cl_lbd, self.cl_del, self.w_head, self.w_next, self.w_blk, self.seen,
                      self.learnt, self.out, self.stack, self.toclear, self.lvl_stamp, conflict_limit, chunk_conflicts,
                      chunk_decisions)
