"""Exact feasibility verifiers and the hyperperiod timeline oracle.

``verify_schedule`` and ``verify_encoding`` are algebraic: pairwise collision
(or indistinguishability) graphs plus a clique search.  ``timeline_oracle``
simulates one full hyperperiod and is the independent ground truth they are
tested against.  Witness job/symbol indices are 0-based.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .errors import InvalidArgument, ResourceLimit, ValidationError
from .instances import Encoding, PcInstance, Schedule, WsInstance

TIMELINE_BUDGET = 10**6
CLIQUE_BUDGET = 10**7
# below these sizes plain Python/numpy beats a compiled-kernel call
SMALL_JOBS = 64
SMALL_HORIZON = 4096


@dataclass(frozen=True)
class Verdict:
    """Outcome of a verification.

    ``witness`` is empty for feasible verdicts.  For infeasible ones it is a
    colliding (indistinguishable) pair, a pairwise colliding set of size m+1
    (k+1), or, from the timeline oracle, the jobs involved at ``slot``.
    """

    feasible: bool
    witness: tuple[int, ...] = ()
    slot: Optional[int] = None
    reason: str = ""

    def __bool__(self):
        return self.feasible


def collides(p_i: int, t_i: int, p_j: int, t_j: int) -> bool:
    """Whether two unit jobs with exact periods ever run in the same slot."""
    if not (0 <= t_i < p_i and 0 <= t_j < p_j):
        raise InvalidArgument(f"start times must lie in [0, p): ({p_i}, {t_i}), ({p_j}, {t_j})")
    return (t_i - t_j) % math.gcd(p_i, p_j) == 0


def collision_graph(periods: Sequence[int], starts: Sequence[int]) -> list[set[int]]:
    """Adjacency sets: i ~ j iff jobs i and j collide."""
    n = len(periods)
    if n >= SMALL_JOBS and max(periods) < kernels.INT64_SAFE:
        m = kernels.collision_matrix(np.asarray(periods, dtype=np.int64), np.asarray(starts, dtype=np.int64))
        return [set(np.flatnonzero(m[i]).tolist()) for i in range(n)]
    adj = [set() for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if (starts[i] - starts[j]) % math.gcd(periods[i], periods[j]) == 0:
                adj[i].add(j)
                adj[j].add(i)
    return adj


def find_clique(adj: Sequence[set[int]], size: int, budget: int = CLIQUE_BUDGET) -> Optional[tuple[int, ...]]:
    """Lexicographically smallest clique with ``size`` vertices, or None.

    Depth-first over increasing vertex indices, so the first clique found is
    the smallest.  Vertices of degree below ``size - 1`` are never expanded.
    """
    if size <= 0:
        return ()
    n = len(adj)
    if size == 1:
        return (0,) if n else None
    live = [v for v in range(n) if len(adj[v]) >= size - 1]
    nodes = 0

    def extend(clique, cands):
        nonlocal nodes
        if len(clique) == size:
            return tuple(clique)
        need = size - len(clique)
        for idx, v in enumerate(cands):
            if len(cands) - idx < need:
                return None
            nodes += 1
            if nodes > budget:
                raise ResourceLimit(f"clique search exceeded {budget} nodes")
            nxt = [u for u in cands[idx + 1:] if u in adj[v]]
            found = extend(clique + [v], nxt)
            if found is not None:
                return found
        return None

    return extend([], live)


def batch_verdicts(periods: Sequence[int], starts: np.ndarray, machines: int) -> tuple[np.ndarray, np.ndarray]:
    """Migration verdicts for many start vectors of one unit-length instance.

    Returns two boolean arrays over the rows of ``starts``: feasibility by the
    absence of ``machines + 1`` pairwise colliding jobs, and feasibility by
    the slot loads over one hyperperiod.
    """
    p = np.asarray(periods, dtype=np.int64)
    t = np.asarray(starts, dtype=np.int64).reshape(-1, p.size)
    if t.size and ((t < 0) | (t >= p)).any():
        raise InvalidArgument("start times must lie in [0, p)")
    subsets = np.array(list(itertools.combinations(range(p.size), machines + 1)), dtype=np.int64)
    if subsets.size:
        clique = kernels.batch_clique(t, p, subsets)
    else:
        clique = np.zeros(t.shape[0], dtype=np.bool_)
    horizon = math.lcm(*p.tolist()) if p.size else 1
    load = kernels.batch_max_load(t, p, horizon)
    return ~clique, load <= machines


# -- schedules ----------------------------------------------------------------


def _check_start_form(inst: WsInstance, sched: Schedule):
    periods = inst.periods()
    starts = sched.start_times
    if len(starts) != len(periods):
        raise ValidationError(f"schedule has {len(starts)} start times for {len(periods)} jobs")
    for j, (t, p) in enumerate(zip(starts, periods)):
        if not 0 <= t < p:
            raise ValidationError(f"start time {t} of job {j + 1} outside [0, {p - 1}]")
    return periods, starts


def _check_assignment(inst: WsInstance, sched: Schedule, n: int, required: bool):
    a = sched.assignment
    if a is None:
        if required:
            raise ValidationError("no-migration schedules on several machines need a machine assignment")
        return (0,) * n
    if len(a) != n:
        raise ValidationError(f"machine assignment has {len(a)} entries for {n} jobs")
    for j, m in enumerate(a):
        if not 0 <= m < inst.machines:
            raise ValidationError(f"job {j + 1} assigned to machine {m + 1} outside 1..{inst.machines}")
    return a


def verify_schedule(inst: WsInstance, sched: Schedule) -> Verdict:
    """Decide feasibility of an exact-period unit-length schedule.

    Without migration, jobs on the same machine must pairwise not collide.
    With migration the schedule is infeasible iff m+1 jobs pairwise collide.
    Timeline-form schedules are passed to :func:`timeline_oracle`.
    """
    if sched.timeline is not None:
        return timeline_oracle(inst, sched)
    if not inst.periods_exact:
        raise InvalidArgument("start-time schedules only describe exact periods")
    if not inst.unit:
        raise InvalidArgument("the algebraic verifier needs unit lengths; use timeline_oracle")
    periods, starts = _check_start_form(inst, sched)
    n = len(periods)
    m = inst.machines
    if inst.migration_allowed and m > 1:
        adj = collision_graph(periods, starts)
        clique = find_clique(adj, m + 1)
        if clique is not None:
            return Verdict(False, clique, reason=f"{m + 1} pairwise colliding jobs")
        return Verdict(True)
    machine = _check_assignment(inst, sched, n, required=m > 1)
    if n >= SMALL_JOBS and max(periods) < kernels.INT64_SAFE:
        i, j = kernels.first_conflict(np.asarray(periods, dtype=np.int64), np.asarray(starts, dtype=np.int64),
                                      np.asarray(machine, dtype=np.int64))
        if i >= 0:
            return Verdict(False, (int(i), int(j)), reason="colliding pair on one machine")
        return Verdict(True)
    for i in range(n):
        for j in range(i + 1, n):
            if machine[i] == machine[j] and collides(periods[i], starts[i], periods[j], starts[j]):
                return Verdict(False, (i, j), reason="colliding pair on one machine")
    return Verdict(True)


# -- encodings ----------------------------------------------------------------


def _check_encoding(inst: PcInstance, enc: Encoding) -> list[dict[int, int]]:
    if len(enc.codes) != inst.n:
        raise ValidationError(f"encoding has {len(enc.codes)} codes for {inst.n} symbols")
    codes = enc.as_dicts()
    for j, (s, c) in enumerate(zip(inst.symbols, codes)):
        if set(c) != set(s):
            raise ValidationError(f"code of symbol {j + 1} covers attributes {sorted(a + 1 for a in c)}, "
                                  f"symbol has {[a + 1 for a in s]}")
        for a, v in c.items():
            if not 0 <= v < inst.ranges[a]:
                raise ValidationError(f"symbol {j + 1} attribute {a + 1} value {v} outside [0, {inst.ranges[a] - 1}]")
    return codes


def distinguishable(s_j, c_j, s_k, c_k) -> bool:
    return any(c_j[i] != c_k[i] for i in set(s_j) & set(s_k))


def indistinguishability_graph(inst: PcInstance, codes: list[dict[int, int]]) -> list[set[int]]:
    n = inst.n
    adj = [set() for _ in range(n)]
    for j in range(n):
        for k in range(j + 1, n):
            if not distinguishable(inst.symbols[j], codes[j], inst.symbols[k], codes[k]):
                adj[j].add(k)
                adj[k].add(j)
    return adj


def verify_encoding(inst: PcInstance, enc: Encoding) -> Verdict:
    """Feasible iff no ``arity + 1`` symbols are pairwise indistinguishable."""
    codes = _check_encoding(inst, enc)
    adj = indistinguishability_graph(inst, codes)
    clique = find_clique(adj, inst.arity + 1)
    if clique is not None:
        what = "indistinguishable pair" if inst.arity == 1 else f"{inst.arity + 1} pairwise indistinguishable symbols"
        return Verdict(False, clique, reason=what)
    return Verdict(True)


# -- timeline oracle ----------------------------------------------------------


def _occupancy(starts, periods, lengths, horizon):
    if not starts:
        return np.zeros(horizon, dtype=np.int64)
    occupancy = kernels.occupancy if horizon >= SMALL_HORIZON else kernels.occupancy_numpy
    return occupancy(
        np.asarray(starts, dtype=np.int64),
        np.asarray(periods, dtype=np.int64),
        np.asarray(lengths, dtype=np.int64),
        int(horizon),
    )


def _running_at(slot, events, horizon):
    """Jobs (sorted, unique) whose execution covers ``slot``; events are (job, start, period, length)."""
    out = set()
    for job, s, p, ell in events:
        if (slot - s) % p < ell:
            out.add(job)
    return sorted(out)


def timeline_oracle(inst: WsInstance, sched: Schedule, budget: int = TIMELINE_BUDGET) -> Verdict:
    """Simulate one full cycle of the schedule slot by slot.

    Start-time schedules (exact periods) are simulated over the hyperperiod.
    Timeline schedules are cyclic: every job must start at least once, the
    cyclic gap between consecutive starts of job j must be exactly p_j (exact
    periods) or at most p_j (inexact), and at least its length.  Executions
    occupy half-open intervals ``[start, start + length)``.  Feasibility then
    needs at most m running jobs per slot with migration, or at most one per
    machine without.
    """
    periods = inst.periods()
    lengths = inst.lengths()
    n = len(periods)
    m = inst.machines
    migrate = inst.migration_allowed or m == 1
    if sched.start_times is not None:
        if not inst.periods_exact:
            raise InvalidArgument("start-time schedules only describe exact periods")
        _, starts = _check_start_form(inst, sched)
        horizon = inst.hyperperiod()
        if horizon * m > budget:
            raise ResourceLimit(f"hyperperiod {horizon} x {m} machines exceeds budget {budget}")
        for j in range(n):
            if lengths[j] > periods[j]:
                return Verdict(False, (j,), 0, "job overlaps its own next execution")
        events = [(j, starts[j], periods[j], lengths[j]) for j in range(n)]
    else:
        horizon = len(sched.timeline)
        if horizon == 0:
            if n:
                return Verdict(False, (0,), None, "empty timeline")
            return Verdict(True)
        if horizon * m > budget:
            raise ResourceLimit(f"cycle length {horizon} x {m} machines exceeds budget {budget}")
        occurrences = [[] for _ in range(n)]
        for t, slot in enumerate(sched.timeline):
            for j in slot:
                if not 0 <= j < n:
                    raise ValidationError(f"timeline slot {t} names job {j + 1} outside 1..{n}")
                occurrences[j].append(t)
        events = []
        for j, occ in enumerate(occurrences):
            if not occ:
                return Verdict(False, (j,), None, "job never starts")
            gaps = [b - a for a, b in zip(occ, occ[1:])] + [occ[0] + horizon - occ[-1]]
            for k, gap in enumerate(gaps):
                bad = gap != periods[j] if inst.periods_exact else gap > periods[j]
                if bad or gap < lengths[j]:
                    why = "period violated" if bad else "job overlaps its own next execution"
                    return Verdict(False, (j,), occ[k], why)
            events.extend((j, t, horizon, lengths[j]) for t in occ)
    if migrate:
        counts = _occupancy([e[1] for e in events], [e[2] for e in events], [e[3] for e in events], horizon)
        over = np.flatnonzero(counts > m)
        if over.size:
            slot = int(over[0])
            return Verdict(False, tuple(_running_at(slot, events, horizon)[: m + 1]), slot,
                           f"more than {m} jobs running")
        return Verdict(True)
    machine = _check_assignment(inst, sched, n, required=True)
    first = None
    for mach in range(m):
        evs = [e for e in events if machine[e[0]] == mach]
        counts = _occupancy([e[1] for e in evs], [e[2] for e in evs], [e[3] for e in evs], horizon)
        over = np.flatnonzero(counts > 1)
        if over.size and (first is None or int(over[0]) < first[0]):
            slot = int(over[0])
            first = (slot, tuple(_running_at(slot, evs, horizon)[:2]))
    if first is not None:
        return Verdict(False, first[1], first[0], "two jobs running on one machine")
    return Verdict(True)
