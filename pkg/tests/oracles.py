"""Independent brute-force oracles.

Nothing here imports the solver, verifier or reduction code: schedules are
checked by walking every slot of the hyperperiod, encodings by comparing
every pair of symbols, colorings by enumeration.
"""

from __future__ import annotations

import itertools
import math
from functools import reduce


def hyperperiod(periods):
    return reduce(math.lcm, periods, 1)


def slots_ok(periods, starts, machines=1, assignment=None):
    """Walk every slot of the hyperperiod and count the unit jobs running there."""
    q = hyperperiod(periods)
    load = {}
    for j, (p, t) in enumerate(zip(periods, starts)):
        where = 0 if assignment is None else assignment[j]
        for x in range(t, q, p):
            load[(x, where)] = load.get((x, where), 0) + 1
    cap = machines if assignment is None else 1
    return all(c <= cap for c in load.values())


def ws_feasible(periods, machines=1, migration=False, limit=10**6):
    """Exhaustive search over start vectors (and machine assignments without migration)."""
    periods = list(periods)
    if math.prod(periods) > limit:
        raise ValueError("oracle limit")
    if sum(1 / p for p in periods) > machines + 1e-12:
        return None
    assignments = [None]
    if machines > 1 and not migration:
        assignments = list(itertools.product(range(machines), repeat=len(periods)))
    for starts in itertools.product(*(range(p) for p in periods)):
        for a in assignments:
            if slots_ok(periods, starts, machines, a):
                return starts, a
    return None


def pc_indistinguishable(symbols, codes, j, k):
    common = set(symbols[j]) & set(symbols[k])
    return all(codes[j][i] == codes[k][i] for i in common)


def encoding_ok(ranges, symbols, codes, arity=1):
    n = len(symbols)
    for j, s in enumerate(symbols):
        if set(codes[j]) != set(s) or any(not 0 <= codes[j][i] < ranges[i] for i in s):
            return False
    for group in itertools.combinations(range(n), arity + 1):
        if all(pc_indistinguishable(symbols, codes, a, b) for a, b in itertools.combinations(group, 2)):
            return False
    return True


def all_encodings(ranges, symbols):
    cells = [(j, i) for j, s in enumerate(symbols) for i in s]
    for values in itertools.product(*(range(ranges[i]) for _, i in cells)):
        codes = [dict() for _ in symbols]
        for (j, i), v in zip(cells, values):
            codes[j][i] = v
        yield codes


def pc_feasible(ranges, symbols, arity=1, limit=10**6):
    size = math.prod(ranges[i] for s in symbols for i in s)
    if size > limit:
        raise ValueError("oracle limit")
    for codes in all_encodings(ranges, symbols):
        if encoding_ok(ranges, symbols, codes, arity):
            return codes
    return None


def colorable(n, edges, k):
    for colors in itertools.product(range(k), repeat=n):
        if all(colors[u] != colors[v] for u, v in edges):
            return colors
    return None


def has_independent_set(n, edges, size):
    es = set(edges)
    return any(
        all((u, v) not in es and (v, u) not in es for u, v in itertools.combinations(c, 2))
        for c in itertools.combinations(range(n), size)
    )


def inexact_feasible(periods, horizon_cap=10**5):
    """Single-machine pinwheel by search over cyclic timelines.

    A state is the tuple of slots left before each job must run again; a
    feasible instance has a reachable cycle in this finite graph.
    """
    start = tuple(periods)

    def moves(state):
        for j in range(len(state) + 1):
            nxt = []
            for k, left in enumerate(state):
                left = periods[k] if k == j else left - 1
                if left <= 0:
                    break
                nxt.append(left)
            else:
                yield tuple(nxt)

    # the feasible states are those from which an infinite walk exists:
    # iteratively remove states without successors in the surviving set
    frontier = [start]
    graph = {}
    while frontier:
        s = frontier.pop()
        if s in graph:
            continue
        graph[s] = list(moves(s))
        if len(graph) > horizon_cap:
            raise ValueError("oracle limit")
        frontier.extend(graph[s])
    alive = set(graph)
    changed = True
    while changed:
        changed = False
        for s in list(alive):
            if not any(t in alive for t in graph[s]):
                alive.discard(s)
                changed = True
    return start in alive


def set_partitions(items, max_blocks):
    """All partitions of ``items`` into at most ``max_blocks`` blocks, as block-index tuples."""
    items = list(items)

    def rec(i, labels, used):
        if i == len(items):
            yield tuple(labels)
            return
        for b in range(min(used + 1, max_blocks)):
            labels.append(b)
            yield from rec(i + 1, labels, max(used, b + 1))
            labels.pop()

    yield from rec(0, [], 0)


def pc_feasible_partitions(ranges, symbols, limit=10**6):
    """Arity-1 feasibility by enumerating, per attribute, how its holders are split into value classes.

    Feasible iff some choice of splits separates every pair of symbols on a
    shared attribute.  Returns one encoding (block index as value) or None.
    """
    n = len(symbols)
    holders = [[j for j in range(n) if i in symbols[j]] for i in range(len(ranges))]
    options = [list(set_partitions(h, ranges[i])) for i, h in enumerate(holders)]
    if math.prod(len(o) for o in options) > limit:
        raise ValueError("oracle limit")
    pairs = list(itertools.combinations(range(n), 2))
    for choice in itertools.product(*options):
        label = [dict(zip(holders[i], choice[i])) for i in range(len(ranges))]
        if all(any(i in symbols[k] and label[i][j] != label[i][k] for i in symbols[j]) for j, k in pairs):
            return [{i: label[i][j] for i in symbols[j]} for j in range(n)]
    return None
