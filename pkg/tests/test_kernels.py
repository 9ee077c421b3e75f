import itertools
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wspc import kernels

needs_numba = pytest.mark.skipif(not kernels.HAVE_NUMBA, reason="numba backend disabled")


@st.composite
def jobs(draw, max_period=12, max_n=6):
    n = draw(st.integers(1, max_n))
    periods = [draw(st.integers(1, max_period)) for _ in range(n)]
    starts = [draw(st.integers(0, p - 1)) for p in periods]
    lengths = [draw(st.integers(1, p)) for p in periods]
    return np.array(starts, np.int64), np.array(periods, np.int64), np.array(lengths, np.int64)


def horizon(periods):
    return int(np.lcm.reduce(periods))


@needs_numba
class TestEquivalence:
    @given(jobs())
    def test_occupancy(self, j):
        s, p, ell = j
        h = horizon(p)
        assert np.array_equal(kernels.occupancy_numba(s, p, ell, h), kernels.occupancy_numpy(s, p, ell, h))

    @given(jobs(max_period=10**9, max_n=12))
    def test_collision_matrix(self, j):
        s, p, _ = j
        assert np.array_equal(kernels.collision_matrix_numba(p, s), kernels.collision_matrix_numpy(p, s))

    @given(st.integers(1, 6), st.integers(1, 12), st.data())
    def test_thin(self, m, n, data):
        sampled = np.array(data.draw(st.lists(st.lists(st.booleans(), min_size=n, max_size=n), min_size=m, max_size=m)))
        upper = np.triu(np.array(data.draw(st.lists(st.lists(st.booleans(), min_size=n, max_size=n), min_size=n, max_size=n))), 1)
        adj = upper | upper.T
        assert np.array_equal(kernels.thin_independent_numba(sampled, adj), kernels.thin_independent_numpy(sampled, adj))

    @given(st.lists(st.integers(1, 15), min_size=1, max_size=5), st.integers(1, 15), st.data())
    def test_forbid_and_undo(self, periods, p, data):
        seg = np.array(periods, np.int64)
        offsets = np.concatenate([[0], np.cumsum(seg)[:-1]]).astype(np.int64)
        active = np.array(data.draw(st.lists(st.booleans(), min_size=len(seg), max_size=len(seg))))
        t = data.draw(st.integers(0, p - 1))
        base = np.array(data.draw(st.lists(st.integers(0, 2), min_size=int(seg.sum()), max_size=int(seg.sum()))), np.int32)
        free = np.array([int((base[o:o + q] == 0).sum()) for o, q in zip(offsets, seg)], np.int64)
        out = []
        for fn in (kernels.forbid_numba, kernels.forbid_numpy):
            c, f = base.copy(), free.copy()
            r = fn(c, f, offsets, seg, active, np.int64(p), np.int64(t), 1)
            out.append((r, c.copy(), f.copy()))
            fn(c, f, offsets, seg, active, np.int64(p), np.int64(t), -1)
            assert np.array_equal(c, base) and np.array_equal(f, free)
        assert out[0][0] == out[1][0]
        assert np.array_equal(out[0][1], out[1][1]) and np.array_equal(out[0][2], out[1][2])

    @given(jobs(max_period=30, max_n=10), st.data())
    def test_first_conflict(self, j, data):
        s, p, _ = j
        mach = np.array(data.draw(st.lists(st.integers(0, 1), min_size=len(p), max_size=len(p))), np.int64)
        assert tuple(kernels.first_conflict_numba(p, s, mach)) == tuple(kernels.first_conflict_numpy(p, s, mach))


    @given(st.lists(st.tuples(st.integers(1, 12), st.integers(1, 12)), min_size=1, max_size=6), st.integers(1, 40))
    def test_overloaded(self, jobs_, h):
        c = np.array([min(a, b) for a, b in jobs_], np.int64)
        p = np.array([b for _, b in jobs_], np.int64)
        assert kernels.overloaded_numba(c, p, h) == kernels.overloaded_numpy(c, p, h)

    @given(st.lists(st.integers(1, 8), min_size=1, max_size=4), st.integers(1, 3), st.data())
    def test_batch_kernels(self, periods, m, data):
        p = np.array(periods, np.int64)
        rows = data.draw(st.lists(st.tuples(*(st.integers(0, q - 1) for q in periods)), min_size=1, max_size=8))
        t = np.array(rows, np.int64)
        h = horizon(p)
        assert np.array_equal(kernels.batch_max_load_numba(t, p, h), kernels.batch_max_load_numpy(t, p, h))
        subsets = np.array(list(itertools.combinations(range(len(p)), m + 1)), np.int64).reshape(-1, m + 1)
        assert np.array_equal(kernels.batch_clique_numba(t, p, subsets), kernels.batch_clique_numpy(t, p, subsets))


@given(st.lists(st.tuples(st.integers(1, 8), st.integers(1, 8)), min_size=1, max_size=4), st.integers(1, 24))
def test_overloaded_matches_window_count(jobs_, h):
    c = [min(a, b) for a, b in jobs_]
    p = [b for _, b in jobs_]
    # brute force: runs forced into each prefix window of length t
    expect = any(sum(1 + (t - ci) // pi for ci, pi in zip(c, p) if ci <= t) > t for t in range(1, h + 1))
    assert kernels.overloaded(np.array(c, np.int64), np.array(p, np.int64), h) == expect

@given(jobs(max_period=30, max_n=10), st.data())
def test_first_conflict_is_lexicographic(j, data):
    s, p, _ = j
    mach = np.array(data.draw(st.lists(st.integers(0, 1), min_size=len(p), max_size=len(p))), np.int64)
    pairs = [(a, b) for a in range(len(p)) for b in range(a + 1, len(p))
             if mach[a] == mach[b] and (s[a] - s[b]) % np.gcd(p[a], p[b]) == 0]
    assert tuple(kernels.first_conflict(p, s, mach)) == (pairs[0] if pairs else (-1, -1))


def test_collision_matrix_semantics():
    p = np.array([4, 6, 9], np.int64)
    t = np.array([0, 2, 5], np.int64)
    m = kernels.collision_matrix_numpy(p, t)
    # gcd(4,6)=2: 0-2 even; gcd(4,9)=1; gcd(6,9)=3: 2-5 divisible by 3
    assert m.tolist() == [[False, True, True], [True, False, True], [True, True, False]]


def test_env_flag_selects_numpy():
    env = dict(os.environ, WSPC_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", "from wspc import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"


def test_numpy_backend_solves_the_same():
    code = (
        "from wspc import WsInstance, solve_ws_exact, kernels;"
        "print(kernels.BACKEND, solve_ws_exact(WsInstance.from_periods([77, 55, 35])).start_times)"
    )
    runs = {}
    for flag in ("1", "0"):
        env = dict(os.environ, WSPC_DISABLE_NUMBA=flag)
        runs[flag] = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True).stdout.split(" ", 1)
    assert runs["1"][1] == runs["0"][1]
