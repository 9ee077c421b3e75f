"""Hot inner loops, each with a numba and a pure-numpy implementation.

The numba path is used when numba imports and ``WSPC_DISABLE_NUMBA`` is unset
(or ``0``).  Both paths take and return the same int64/bool arrays, and the
test-suite checks them against each other; callers only see the dispatching
names at the bottom of this module.

All kernels work on int64 values.  Callers with periods beyond 2**62 must use
their pure-Python route instead.
"""

from __future__ import annotations

import math
import os

import numpy as np

INT64_SAFE = 2**62


def _env_disabled() -> bool:
    return os.environ.get("WSPC_DISABLE_NUMBA", "").strip().lower() not in ("", "0", "false", "no")


try:
    if _env_disabled():
        raise ImportError("disabled by WSPC_DISABLE_NUMBA")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False


# -- numpy reference implementations ------------------------------------------


def occupancy_numpy(starts, periods, lengths, horizon):
    """Count executions per slot of a cyclic horizon (a multiple of every period)."""
    counts = np.zeros(horizon, dtype=np.int64)
    for s, p, ell in zip(starts, periods, lengths):
        base = np.arange(s, s + horizon, p, dtype=np.int64)
        idx = (base[:, None] + np.arange(ell, dtype=np.int64)[None, :]) % horizon
        np.add.at(counts, idx.ravel(), 1)
    return counts


def collision_matrix_numpy(periods, starts):
    """``M[i, j]`` is true iff unit jobs i != j collide: ``t_i = t_j (mod gcd(p_i, p_j))``."""
    p = np.asarray(periods, dtype=np.int64)
    t = np.asarray(starts, dtype=np.int64)
    g = np.gcd.outer(p, p)
    m = np.mod(t[:, None] - t[None, :], g) == 0
    np.fill_diagonal(m, False)
    return m


def first_conflict_numpy(periods, starts, machine):
    """Lexicographically first pair i < j on one machine that collides, or (-1, -1)."""
    p = np.asarray(periods, dtype=np.int64)
    t = np.asarray(starts, dtype=np.int64)
    for i in range(len(p) - 1):
        g = np.gcd(p[i], p[i + 1:])
        hit = (np.mod(t[i] - t[i + 1:], g) == 0) & (machine[i + 1:] == machine[i])
        if hit.any():
            return i, i + 1 + int(np.argmax(hit))
    return -1, -1


def overloaded_numpy(counters, periods, horizon):
    """Whether some window of t <= horizon slots needs more than t executions.

    A job that must run within ``c`` slots and then every ``p`` slots needs
    ``1 + (t - c) // p`` runs in the next t slots when c <= t.
    """
    t = np.arange(1, horizon + 1, dtype=np.int64)
    c = np.asarray(counters, dtype=np.int64)[:, None]
    p = np.asarray(periods, dtype=np.int64)[:, None]
    demand = np.where(c <= t, 1 + (t - c) // p, 0).sum(axis=0)
    return bool((demand > t).any())


def batch_max_load_numpy(starts, periods, horizon):
    """Per row of ``starts``: the largest number of unit jobs sharing one slot of the horizon."""
    out = np.zeros(starts.shape[0], dtype=np.int64)
    ones = np.ones(starts.shape[1], dtype=np.int64)
    for r in range(starts.shape[0]):
        out[r] = occupancy_numpy(starts[r], periods, ones, horizon).max(initial=0)
    return out


def batch_clique_numpy(starts, periods, subsets):
    """Per row of ``starts``: whether some row of ``subsets`` is a set of pairwise colliding jobs."""
    out = np.zeros(starts.shape[0], dtype=np.bool_)
    for r in range(starts.shape[0]):
        m = collision_matrix_numpy(periods, starts[r])
        for sub in subsets:
            if all(m[a, b] for i, a in enumerate(sub) for b in sub[i + 1:]):
                out[r] = True
                break
    return out


def thin_independent_numpy(sampled, adj):
    """Row-wise greedy thinning: keep v iff sampled and no lower-index kept neighbour."""
    m, n = sampled.shape
    kept = np.zeros((m, n), dtype=np.bool_)
    for v in range(n):
        nb = adj[v, :v]
        blocked = (kept[:, :v] & nb[None, :]).any(axis=1) if v else np.zeros(m, dtype=np.bool_)
        kept[:, v] = sampled[:, v] & ~blocked
    return kept


def forbid_numpy(count, free, offsets, periods, active, p, t, delta):
    """Add ``delta`` (+1 or -1) to the block counters of every active segment k
    at the starts congruent to t modulo gcd(p, p_k).

    ``free[k]`` tracks the zero counters of segment k.  Returns the first
    active segment left without a free start, or -1.
    """
    failed = -1
    for k in range(len(periods)):
        if not active[k]:
            continue
        pk = periods[k]
        g = math.gcd(int(p), int(pk))
        lo = offsets[k]
        cells = count[lo:lo + pk][int(t) % g::g]
        if delta > 0:
            free[k] -= int((cells == 0).sum())
            cells += 1
        else:
            cells -= 1
            free[k] += int((cells == 0).sum())
        if failed < 0 and free[k] == 0:
            failed = k
    return failed


# -- numba implementations -----------------------------------------------------

if HAVE_NUMBA:

    @njit(cache=True)
    def _gcd(a, b):
        while b:
            a, b = b, a % b
        return a

    @njit(cache=True)
    def occupancy_numba(starts, periods, lengths, horizon):
        counts = np.zeros(horizon, dtype=np.int64)
        for j in range(starts.shape[0]):
            s = starts[j]
            p = periods[j]
            ell = lengths[j]
            for base in range(s, s + horizon, p):
                for o in range(ell):
                    counts[(base + o) % horizon] += 1
        return counts

    @njit(cache=True)
    def collision_matrix_numba(periods, starts):
        n = periods.shape[0]
        m = np.zeros((n, n), dtype=np.bool_)
        for i in range(n):
            for j in range(i + 1, n):
                g = _gcd(periods[i], periods[j])
                if (starts[i] - starts[j]) % g == 0:
                    m[i, j] = True
                    m[j, i] = True
        return m

    @njit(cache=True)
    def first_conflict_numba(periods, starts, machine):
        n = periods.shape[0]
        for i in range(n):
            for j in range(i + 1, n):
                if machine[i] == machine[j] and (starts[i] - starts[j]) % _gcd(periods[i], periods[j]) == 0:
                    return i, j
        return -1, -1

    @njit(cache=True)
    def overloaded_numba(counters, periods, horizon):
        demand = np.zeros(horizon + 1, dtype=np.int64)
        for j in range(counters.shape[0]):
            c = counters[j]
            p = periods[j]
            for t in range(c, horizon + 1, p):
                demand[t] += 1
        run = 0
        for t in range(1, horizon + 1):
            run += demand[t]
            if run > t:
                return True
        return False

    @njit(cache=True)
    def batch_max_load_numba(starts, periods, horizon):
        rows, n = starts.shape
        out = np.zeros(rows, dtype=np.int64)
        counts = np.zeros(horizon, dtype=np.int64)
        for r in range(rows):
            best = 0
            for j in range(n):
                for x in range(starts[r, j], horizon, periods[j]):
                    counts[x] += 1
                    if counts[x] > best:
                        best = counts[x]
            out[r] = best
            for j in range(n):
                for x in range(starts[r, j], horizon, periods[j]):
                    counts[x] = 0
        return out

    @njit(cache=True)
    def batch_clique_numba(starts, periods, subsets):
        rows, n = starts.shape
        out = np.zeros(rows, dtype=np.bool_)
        g = np.zeros((n, n), dtype=np.int64)
        for i in range(n):
            for j in range(n):
                g[i, j] = _gcd(periods[i], periods[j])
        k = subsets.shape[1]
        for r in range(rows):
            for s in range(subsets.shape[0]):
                ok = True
                for a in range(k):
                    for b in range(a + 1, k):
                        i = subsets[s, a]
                        j = subsets[s, b]
                        if (starts[r, i] - starts[r, j]) % g[i, j] != 0:
                            ok = False
                            break
                    if not ok:
                        break
                if ok:
                    out[r] = True
                    break
        return out

    @njit(cache=True)
    def thin_independent_numba(sampled, adj):
        m, n = sampled.shape
        kept = np.zeros((m, n), dtype=np.bool_)
        for r in range(m):
            for v in range(n):
                if not sampled[r, v]:
                    continue
                ok = True
                for u in range(v):
                    if kept[r, u] and adj[v, u]:
                        ok = False
                        break
                kept[r, v] = ok
        return kept

    @njit(cache=True)
    def forbid_numba(count, free, offsets, periods, active, p, t, delta):
        failed = -1
        for k in range(periods.shape[0]):
            if not active[k]:
                continue
            pk = periods[k]
            g = _gcd(p, pk)
            lo = offsets[k]
            for x in range(t % g, pk, g):
                c = count[lo + x]
                if delta > 0:
                    if c == 0:
                        free[k] -= 1
                    count[lo + x] = c + 1
                else:
                    count[lo + x] = c - 1
                    if c == 1:
                        free[k] += 1
            if failed < 0 and free[k] == 0:
                failed = k
        return failed

    occupancy = occupancy_numba
    collision_matrix = collision_matrix_numba
    thin_independent = thin_independent_numba
    first_conflict = first_conflict_numba
    overloaded = overloaded_numba
    batch_max_load = batch_max_load_numba
    batch_clique = batch_clique_numba
    forbid = forbid_numba
else:
    occupancy = occupancy_numpy
    collision_matrix = collision_matrix_numpy
    thin_independent = thin_independent_numpy
    first_conflict = first_conflict_numpy
    overloaded = overloaded_numpy
    batch_max_load = batch_max_load_numpy
    batch_clique = batch_clique_numpy
    forbid = forbid_numpy

BACKEND = "numba" if HAVE_NUMBA else "numpy"
