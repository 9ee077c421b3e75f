"""Brute-force reference solvers.

These are the ground truth the reductions are checked against, so each one
verifies its own answer before returning it.  ``None`` means the search was
exhaustive and found nothing; running out of budget raises
:class:`~wspc.errors.ResourceLimit` instead.
"""

from __future__ import annotations

import math
import sys
from contextlib import contextmanager
from dataclasses import replace
from itertools import combinations
from typing import Optional

import numpy as np

from . import kernels
from .errors import InvalidArgument, ResourceLimit
from .instances import Encoding, Graph, PcInstance, Schedule, WsInstance, density
from .verify import find_clique, timeline_oracle, verify_encoding, verify_schedule

SEARCH_BUDGET = 10**7


class _Budget:
    def __init__(self, limit, what):
        self.limit = limit
        self.used = 0
        self.what = what

    def tick(self):
        self.used += 1
        if self.used > self.limit:
            raise ResourceLimit(f"{self.what} exceeded its budget of {self.limit} search nodes")


# -- exact periods ------------------------------------------------------------


def solve_ws_exact(inst: WsInstance, budget: int = SEARCH_BUDGET) -> Optional[Schedule]:
    """Lexicographically smallest feasible start vector, or None.

    Jobs are searched in order of increasing period (ties by index), start
    times in increasing order; the result is smallest in that order.  Jobs
    with equal periods are interchangeable and receive increasing starts.

    Instances with more than m jobs of pairwise coprime periods are rejected
    up front.  Maps ``t -> u*t + c`` with u a unit modulo the hyperperiod preserve every
    collision, so the smallest solution starts the first job at 0 and the
    second at 0 or a divisor of its period; other values are skipped.
    """
    if not inst.periods_exact or not inst.unit:
        raise InvalidArgument("solve_ws_exact needs unit lengths and exact periods")
    periods = inst.periods()
    n = len(periods)
    m = inst.machines
    if density(inst) > m or _coprime_clique(periods, m + 1):
        return None
    order = sorted(range(n), key=lambda j: (periods[j], j))
    b = _Budget(budget, "exact-period search")
    if m == 1 or not inst.migration_allowed:
        found = _search_partitioned(periods, order, m, b)
    else:
        found = _search_migrating(periods, order, m, b)
    if found is None:
        return None
    starts, machines = found
    sched = Schedule(tuple(starts), assignment=tuple(machines) if m > 1 and not inst.migration_allowed else None)
    verdict = verify_schedule(inst, sched)
    if not verdict.feasible:
        raise AssertionError(f"solver produced an infeasible schedule: {verdict}")
    return sched


def _coprime_clique(periods, size, budget=10**5):
    """Whether ``size`` jobs have pairwise coprime periods.

    Such jobs collide for every choice of starts, so no m < size machines
    can hold them.  Equal periods above 1 are never coprime, so the search
    runs over distinct values plus the period-1 jobs.
    """
    ones = periods.count(1)
    need = size - ones
    if need <= 0:
        return True
    values = sorted(set(p for p in periods if p > 1))
    adj = [{k for k, q in enumerate(values) if k != i and math.gcd(p, q) == 1} for i, p in enumerate(values)]
    try:
        return find_clique(adj, need, budget) is not None
    except ResourceLimit:
        return False


def _search_partitioned(periods, order, m, b):
    """Single machine, or several machines without migration.

    Jobs with equal period share one domain per machine, since every forbid
    hits them identically.  A domain is a segment of one flat counter array
    (a start is free while its counter is zero); forbids are undone by
    replaying them with the opposite sign.
    """
    n = len(periods)
    group_periods = sorted(set(periods))
    gidx = {p: g for g, p in enumerate(group_periods)}
    G = len(group_periods)
    remaining = [0] * G
    for p in periods:
        remaining[gidx[p]] += 1
    sizes = [p for p in group_periods for _ in range(m)]
    if sum(sizes) > b.limit:
        raise ResourceLimit(f"start-time domains of {sum(sizes)} cells exceed the budget of {b.limit}")
    seg_periods = np.array(sizes, dtype=np.int64)
    offsets = np.zeros(len(sizes), dtype=np.int64)
    if sizes:
        offsets[1:] = np.cumsum(seg_periods)[:-1]
    count = np.zeros(sum(sizes), dtype=np.int32)
    free = seg_periods.copy()
    starts = [0] * n
    machines = [0] * n
    last = [(-1, -1)] * G  # last (start, machine) handed out in each group

    def active_for(mach):
        active = np.zeros(len(sizes), dtype=np.bool_)
        for g in range(G):
            if remaining[g]:
                active[g * m + mach] = True
        return active

    def hall_ok():
        for g in range(G):
            if remaining[g] and int(free[g * m:(g + 1) * m].sum()) < remaining[g]:
                return False
        return True

    def dfs(pos, used_machines):
        if pos == n:
            return True
        j = order[pos]
        p = periods[j]
        g = gidx[p]
        prev_t, prev_m = last[g]
        for t in range(max(prev_t, 0), 1 if pos == 0 else p):
            if pos == 1 and t and p % t:
                continue
            for mach in range(min(used_machines + 1, m)):
                if (t, mach) <= (prev_t, prev_m):
                    continue
                if count[offsets[g * m + mach] + t]:
                    continue
                b.tick()
                remaining[g] -= 1
                saved_last = last[g]
                last[g] = (t, mach)
                active = active_for(mach)
                failed = kernels.forbid(count, free, offsets, seg_periods, active, np.int64(p), np.int64(t), 1)
                # with several machines an emptied segment is judged by hall_ok
                if (failed < 0 or m > 1) and hall_ok():
                    starts[j], machines[j] = t, mach
                    if dfs(pos + 1, max(used_machines, mach + 1)):
                        return True
                kernels.forbid(count, free, offsets, seg_periods, active, np.int64(p), np.int64(t), -1)
                remaining[g] += 1
                last[g] = saved_last
        return False

    with _recursion_depth(n):
        if not dfs(0, 0):
            return None
    return starts, machines


@contextmanager
def _recursion_depth(depth):
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, depth + 200))
    try:
        yield
    finally:
        sys.setrecursionlimit(old)


def _search_migrating(periods, order, m, b):
    """Several machines with migration: reject once m+1 assigned jobs pairwise collide."""
    n = len(periods)
    starts = [0] * n
    placed: list[int] = []
    adj: dict[int, set[int]] = {}

    def dfs(pos):
        if pos == n:
            return True
        j = order[pos]
        p = periods[j]
        lo = 0
        if pos and periods[order[pos - 1]] == p:
            lo = starts[order[pos - 1]]
        for t in range(lo, 1 if pos == 0 else p):
            if pos == 1 and t and p % t:
                continue
            b.tick()
            nbrs = {k for k in placed if (t - starts[k]) % math.gcd(p, periods[k]) == 0}
            if len(nbrs) >= m:
                sub = sorted(nbrs)
                local = [adj[k] & nbrs for k in sub]
                index = {k: i for i, k in enumerate(sub)}
                if find_clique([{index[x] for x in s} for s in local], m) is not None:
                    continue
            starts[j] = t
            adj[j] = nbrs
            for k in nbrs:
                adj[k].add(j)
            placed.append(j)
            if dfs(pos + 1):
                return True
            placed.pop()
            for k in nbrs:
                adj[k].discard(j)
            del adj[j]
        return False

    with _recursion_depth(n):
        if not dfs(0):
            return None
    return starts, [0] * n


# -- partial coding -----------------------------------------------------------


def normalize_pc(inst: PcInstance):
    """Merge attributes with identical member sets and cap ranges at the member count.

    Returns ``(ranges, members, parts)``: for merged attribute a, ``members[a]``
    are its symbols and ``parts[a]`` the original attributes it stands for.
    Attributes held by fewer than two symbols never separate anything and are
    dropped.  Equality on a merged attribute is equality on all its parts, and
    any attribute can be relabelled onto ``[0, |members|)``, so the normalized
    instance has the same feasibility for every arity.
    """
    by_members: dict[tuple[int, ...], list[int]] = {}
    for i in range(inst.d):
        mem = tuple(inst.members(i))
        if len(mem) >= 2:
            by_members.setdefault(mem, []).append(i)
    ranges, members, parts = [], [], []
    for mem, attrs in sorted(by_members.items(), key=lambda kv: kv[1][0]):
        ranges.append(min(math.prod(inst.ranges[i] for i in attrs), len(mem)))
        members.append(mem)
        parts.append(tuple(attrs))
    return ranges, members, parts


def solve_pc(inst: PcInstance, budget: int = SEARCH_BUDGET) -> Optional[Encoding]:
    """Find a feasible (k-ary) encoding or prove none exists.

    After normalization, attributes whose range covers all their members give
    every member a distinct value (never worse).  The remaining cells
    (symbol, attribute) are filled depth-first, most constrained cell first,
    with value symmetry broken per attribute: a cell takes a value already
    used on its attribute or the smallest unused one.

    Every symbol pair counts its shared cells not yet filled on both sides.
    A pair becomes indistinguishable once that count is zero with all shared
    values equal; the branch dies when k+1 symbols are pairwise
    indistinguishable.  For k = 1 a pair with one shared cell left and no
    difference so far must differ there, which prunes that cell's values.
    """
    ranges, members, parts = normalize_pc(inst)
    n = inst.n
    k = inst.arity
    values: list[dict[int, int]] = [dict() for _ in range(n)]
    perfect = [ranges[a] >= len(members[a]) for a in range(len(ranges))]
    for a, mem in enumerate(members):
        if perfect[a]:
            for rank, j in enumerate(mem):
                values[j][a] = rank
    sym_attrs = [set() for _ in range(n)]
    for a, mem in enumerate(members):
        for j in mem:
            sym_attrs[j].add(a)
    common: dict[tuple[int, int], list[int]] = {}
    pending = [[0] * n for _ in range(n)]
    differs = [[0] * n for _ in range(n)]
    indist = [set() for _ in range(n)]
    for j in range(n):
        for q in range(j + 1, n):
            shared = sym_attrs[j] & sym_attrs[q]
            if any(perfect[a] for a in shared):
                continue
            common[j, q] = common[q, j] = sorted(shared)
            pending[j][q] = pending[q][j] = len(shared)
            if not shared:
                indist[j].add(q)
                indist[q].add(j)
    if find_clique(indist, k + 1, budget) is not None:
        return None
    cells = [(j, a) for j in range(n) for a in sorted(sym_attrs[j]) if not perfect[a]]
    cell_id = {c: i for i, c in enumerate(cells)}
    # banned[c][v] counts the reasons value v is excluded from cell c
    banned = [dict() for _ in cells]
    n_banned = [0] * len(cells)
    free_cells = set(range(len(cells)))
    b = _Budget(budget, "partial coding search")
    used_max = [-1] * len(ranges)

    def choices(c):
        j, a = cells[c]
        top = min(used_max[a] + 1, ranges[a] - 1)
        return [v for v in range(top + 1) if not banned[c].get(v)]

    def closes_clique(j, q):
        if k == 1:
            return True
        both = sorted(indist[j] & indist[q])
        if len(both) < k - 1:
            return False
        idx = {x: i for i, x in enumerate(both)}
        local = [{idx[y] for y in indist[x] if y in idx} for x in both]
        return find_clique(local, k - 1) is not None

    def size(c):
        # banned values were all used on the attribute, so they lie below the cap
        a = cells[c][1]
        return min(used_max[a] + 2, ranges[a]) - n_banned[c]

    def ban(c, v, log):
        hits = banned[c].get(v, 0)
        banned[c][v] = hits + 1
        n_banned[c] += hits == 0
        log.append((c, v))
        return size(c) > 0

    def last_open(j, q):
        """The one shared attribute of a pair not yet filled on both sides."""
        for a in common[j, q]:
            if a not in values[j] or a not in values[q]:
                return a
        raise AssertionError("pair has no open attribute")

    def assign(j, a, v):
        """Set a cell; return the undo record and whether the branch is dead."""
        values[j][a] = v
        touched, bans = [], []
        bad = False
        for q in members[a]:
            if q == j or (j, q) not in common:
                continue
            if a not in values[q]:
                if k == 1 and pending[j][q] == 1 and not differs[j][q]:
                    bad = bad or not ban(cell_id[q, a], v, bans)
                continue
            diff = values[q][a] != v
            pending[j][q] -= 1
            pending[q][j] -= 1
            if diff:
                differs[j][q] += 1
                differs[q][j] += 1
            touched.append((q, diff))
            if bad or differs[j][q]:
                continue
            if pending[j][q] == 0:
                bad = closes_clique(j, q)
                indist[j].add(q)
                indist[q].add(j)
            elif k == 1 and pending[j][q] == 1:
                a2 = last_open(j, q)
                if (a2 in values[j]) != (a2 in values[q]):
                    src, dst = (j, q) if a2 in values[j] else (q, j)
                    bad = not ban(cell_id[dst, a2], values[src][a2], bans)
        return (touched, bans), bad

    def unassign(j, a, record):
        touched, bans = record
        for c, v in bans:
            banned[c][v] -= 1
            n_banned[c] -= banned[c][v] == 0
        for q, diff in touched:
            if pending[j][q] == 0 and not differs[j][q]:
                indist[j].discard(q)
                indist[q].discard(j)
            pending[j][q] += 1
            pending[q][j] += 1
            if diff:
                differs[j][q] -= 1
                differs[q][j] -= 1
        del values[j][a]

    def dfs():
        if not free_cells:
            return True
        c = min(free_cells, key=lambda x: (size(x), x))
        j, a = cells[c]
        free_cells.discard(c)
        saved = used_max[a]
        for v in choices(c):
            b.tick()
            used_max[a] = max(saved, v)
            record, bad = assign(j, a, v)
            if not bad and dfs():
                return True
            used_max[a] = saved
            unassign(j, a, record)
        free_cells.add(c)
        return False

    with _recursion_depth(len(cells)):
        if not dfs():
            return None
    enc = _expand_encoding(inst, values, parts)
    verdict = verify_encoding(inst, enc)
    if not verdict.feasible:
        raise AssertionError(f"solver produced an infeasible encoding: {verdict}")
    return enc


def _expand_encoding(inst, values, parts):
    owner = {}
    for a, attrs in enumerate(parts):
        for i in attrs:
            owner[i] = a
    codes = []
    for j, s in enumerate(inst.symbols):
        code = {}
        for i in s:
            code[i] = 0
        for a, v in values[j].items():
            for i in parts[a]:  # mixed radix, first attribute least significant
                v, code[i] = divmod(v, inst.ranges[i])
        codes.append(code)
    return Encoding.from_dicts(codes)


# -- inexact periods ----------------------------------------------------------


def solve_ws_inexact(inst: WsInstance, budget: int = SEARCH_BUDGET) -> Optional[Schedule]:
    """Decide single-machine unit-length pinwheel feasibility (gaps at most p_j).

    Searches the graph of residual-deadline vectors for a reachable cycle.  A
    state holds, per job, how many slots remain before it must run again;
    jobs with equal periods are interchangeable, so states keep those counters
    sorted and an action runs the most urgent member of a period class.
    States whose demand over some window exceeds the window length are
    pruned.
    Returns a cyclic timeline schedule checked by the timeline oracle.
    """
    if not inst.unit:
        raise InvalidArgument("solve_ws_inexact needs unit lengths")
    if inst.machines != 1:
        raise InvalidArgument("solve_ws_inexact handles a single machine")
    if density(inst) > 1:
        return None
    if inst.n_jobs == 0:
        return Schedule(timeline=((),))
    classes = sorted({j.period for j in inst.jobs})
    count = {p: 0 for p in classes}
    for j in inst.jobs:
        count[j.period] += j.multiplicity
    start = tuple(tuple([p] * count[p]) for p in classes)
    b = _Budget(budget, "pinwheel state search")
    flat_periods = np.asarray([p for p in classes for _ in range(count[p])], dtype=np.int64)
    horizon = 2 * classes[-1]

    def overloaded(state):
        flat = np.fromiter((c for cs in state for c in cs), dtype=np.int64, count=flat_periods.size)
        return kernels.overloaded(flat, flat_periods, horizon)

    def successors(state):
        urgent = sorted(range(len(classes)), key=lambda g: (state[g][0], g))
        for g in urgent + [-1]:
            nxt = []
            ok = True
            for h, counters in enumerate(state):
                cs = list(counters)
                if h == g:
                    cs = cs[1:] + [classes[h] + 1]
                cs = [c - 1 for c in cs]
                if cs and min(cs) < 1:
                    ok = False
                    break
                nxt.append(tuple(sorted(cs)))
            if ok and not overloaded(nxt):
                yield g, tuple(nxt)

    on_stack = {start: 0}
    dead = set()
    stack = [(start, successors(start))]
    actions: list[int] = []
    cycle = None
    b.tick()
    while stack and cycle is None:
        state, it = stack[-1]
        for g, nxt in it:
            if nxt in on_stack:
                cycle = (on_stack[nxt], actions[on_stack[nxt]:] + [g])
                break
            if nxt in dead:
                continue
            b.tick()
            on_stack[nxt] = len(stack)
            actions.append(g)
            stack.append((nxt, successors(nxt)))
            break
        else:
            stack.pop()
            del on_stack[state]
            dead.add(state)
            if actions:
                actions.pop()
    if cycle is None:
        return None
    depth, acts = cycle
    sched = _label_cycle(inst, classes, stack[depth][0], acts)
    verdict = timeline_oracle(replace(inst, periods_exact=False), sched)
    if not verdict.feasible:
        raise AssertionError(f"solver produced an infeasible timeline: {verdict}")
    return sched


def _label_cycle(inst, classes, state, acts):
    """Replay a cycle of class-level actions on concrete jobs until the labelled state repeats."""
    periods = inst.periods()
    members = {p: [j for j, q in enumerate(periods) if q == p] for p in classes}
    counter = [0] * len(periods)
    for g, p in enumerate(classes):
        for j, c in zip(members[p], state[g]):
            counter[j] = c
    seen = {}
    timeline: list[tuple[int, ...]] = []
    while True:
        key = tuple(counter)
        if key in seen:
            return Schedule(timeline=tuple(timeline[seen[key]:]))
        seen[key] = len(timeline)
        for g in acts:
            run = ()
            if g >= 0:
                p = classes[g]
                j = min(members[p], key=lambda x: (counter[x], x))
                counter[j] = p + 1
                run = (j,)
            counter = [c - 1 for c in counter]
            timeline.append(run)


# -- graph references ---------------------------------------------------------


def solve_coloring(g: Graph, k: int, budget: int = SEARCH_BUDGET) -> Optional[list[int]]:
    """Proper k-coloring by backtracking (colors 0..k-1), or None."""
    adj = g.adjacency()
    order = sorted(range(g.n), key=lambda v: (-len(adj[v]), v))
    color = [-1] * g.n
    b = _Budget(budget, "coloring search")

    def dfs(pos, used):
        if pos == g.n:
            return True
        v = order[pos]
        for c in range(min(used + 1, k)):
            b.tick()
            if all(color[u] != c for u in adj[v]):
                color[v] = c
                if dfs(pos + 1, max(used, c + 1)):
                    return True
                color[v] = -1
        return False

    return list(color) if dfs(0, 0) else None


def independent_set(g: Graph, size: int) -> Optional[tuple[int, ...]]:
    """Lexicographically smallest independent set of the given size, by enumeration."""
    for cand in combinations(range(g.n), size):
        if all((u, v) not in g.edges for u, v in combinations(cand, 2)):
            return cand
    return None
