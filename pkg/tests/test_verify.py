import itertools

import numpy as np

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from wspc.errors import InvalidArgument, ResourceLimit, ValidationError
from wspc.instances import Encoding, Job, PcInstance, Schedule, WsInstance
from wspc.verify import SMALL_JOBS, batch_verdicts, collides, find_clique, timeline_oracle, verify_encoding, verify_schedule

PC_SMALL = PcInstance((2, 3, 2), ((0, 2), (2,), (0, 1, 2), (0, 1, 2)))
PC_SMALL_ENC = Encoding.from_dicts([{0: 0, 2: 0}, {2: 1}, {0: 1, 1: 0, 2: 0}, {0: 1, 1: 2, 2: 0}])


@st.composite
def schedules(draw, max_period=12, max_n=5, max_m=3):
    n = draw(st.integers(1, max_n))
    periods = [draw(st.integers(1, max_period)) for _ in range(n)]
    starts = tuple(draw(st.integers(0, p - 1)) for p in periods)
    m = draw(st.integers(1, max_m))
    migrate = draw(st.booleans())
    assignment = None
    if m > 1 and not migrate:
        assignment = tuple(draw(st.integers(0, m - 1)) for _ in periods)
    return WsInstance.from_periods(periods, m, True, migrate), Schedule(starts, assignment=assignment)


class TestSchedules:
    def test_counterexample(self):
        inst = WsInstance.from_periods([77, 55, 35])
        assert verify_schedule(inst, Schedule((1, 2, 3))).feasible
        assert timeline_oracle(inst, Schedule((1, 2, 3))).feasible

    def test_colliding_pair_witness(self):
        v = verify_schedule(WsInstance.from_periods([4, 6]), Schedule((0, 2)))
        assert not v.feasible and v.witness == (0, 1)

    def test_collides(self):
        assert collides(30, 0, 42, 0)
        assert not collides(30, 1, 42, 0)
        with pytest.raises(InvalidArgument):
            collides(4, 4, 6, 0)

    def test_out_of_range_start(self):
        with pytest.raises(ValidationError):
            verify_schedule(WsInstance.from_periods([4]), Schedule((4,)))

    def test_assignment_required(self):
        with pytest.raises(ValidationError):
            verify_schedule(WsInstance.from_periods([2, 2], 2), Schedule((0, 0)))

    def test_migration_clique(self):
        inst = WsInstance.from_periods([2, 2, 2], 2, True, True)
        v = verify_schedule(inst, Schedule((0, 0, 0)))
        assert not v.feasible and v.witness == (0, 1, 2)
        assert verify_schedule(inst, Schedule((0, 0, 1))).feasible

    @given(schedules())
    def test_matches_slot_walk(self, case):
        inst, sched = case
        expect = oracles.slots_ok(inst.periods(), sched.start_times, inst.machines, sched.assignment)
        assert verify_schedule(inst, sched).feasible == expect
        assert timeline_oracle(inst, sched).feasible == expect


class TestTimeline:
    def test_cyclic_exact(self):
        inst = WsInstance.from_periods([2, 4, 4])
        assert timeline_oracle(inst, Schedule(timeline=((0,), (1,), (0,), (2,)))).feasible
        v = timeline_oracle(inst, Schedule(timeline=((0,), (1,), (2,), (0,))))
        assert not v.feasible and v.reason == "period violated"

    def test_inexact_gaps(self):
        inst = WsInstance((Job(2), Job(3)), periods_exact=False)
        assert timeline_oracle(inst, Schedule(timeline=((0,), (1,), (0,)))).feasible
        assert not timeline_oracle(inst, Schedule(timeline=((0,), (1,), (1,), (0,)))).feasible

    def test_overload_witness_slot(self):
        inst = WsInstance.from_periods([2, 2])
        v = timeline_oracle(inst, Schedule((0, 0)))
        assert not v.feasible and v.slot == 0 and v.witness == (0, 1)

    def test_long_jobs(self):
        inst = WsInstance((Job(4, 2), Job(4, 2)))
        assert timeline_oracle(inst, Schedule((0, 2))).feasible
        assert not timeline_oracle(inst, Schedule((0, 1))).feasible

    def test_never_runs(self):
        inst = WsInstance.from_periods([2, 2])
        assert timeline_oracle(inst, Schedule(timeline=((0,), ()))).reason == "job never starts"

    def test_budget(self):
        with pytest.raises(ResourceLimit):
            timeline_oracle(WsInstance.from_periods([1009, 1013]), Schedule((0, 1)), budget=1000)


class TestEncodings:
    def test_pc_small(self):
        assert verify_encoding(PC_SMALL, PC_SMALL_ENC).feasible

    def test_pc_small_broken(self):
        bad = Encoding.from_dicts([{0: 0, 2: 0}, {2: 0}, {0: 1, 1: 0, 2: 0}, {0: 1, 1: 2, 2: 0}])
        v = verify_encoding(PC_SMALL, bad)
        assert not v.feasible and v.witness == (0, 1)

    def test_domain_mismatch(self):
        with pytest.raises(ValidationError):
            verify_encoding(PC_SMALL, Encoding.from_dicts([{0: 0}, {2: 1}, {0: 1, 1: 0, 2: 0}, {0: 1, 1: 2, 2: 0}]))
        with pytest.raises(ValidationError):
            verify_encoding(PC_SMALL, Encoding.from_dicts([{0: 0, 2: 0}, {2: 1}, {0: 1, 1: 3, 2: 0}, {0: 1, 1: 2, 2: 0}]))

    def test_kary(self):
        pc = PcInstance((), ((), (), ()), arity=2)
        v = verify_encoding(pc, Encoding(((), (), ())))
        assert not v.feasible and v.witness == (0, 1, 2)
        assert verify_encoding(PcInstance((), ((), ()), arity=2), Encoding(((), ()))).feasible

    @given(st.data())
    def test_matches_pairwise_oracle(self, data):
        d = data.draw(st.integers(0, 3))
        ranges = tuple(data.draw(st.integers(2, 4)) for _ in range(d))
        n = data.draw(st.integers(1, 5))
        symbols = tuple(tuple(sorted(data.draw(st.sets(st.integers(0, d - 1))) if d else ())) for _ in range(n))
        codes = [{i: data.draw(st.integers(0, ranges[i] - 1)) for i in s} for s in symbols]
        k = data.draw(st.integers(1, 3))
        pc = PcInstance(ranges, symbols, k)
        assert verify_encoding(pc, Encoding.from_dicts(codes)).feasible == oracles.encoding_ok(ranges, symbols, codes, k)


class TestClique:
    @given(st.integers(1, 9), st.integers(1, 5), st.data())
    def test_smallest_clique(self, n, size, data):
        pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
        edges = data.draw(st.sets(st.sampled_from(pairs))) if pairs else set()
        adj = [set() for _ in range(n)]
        for u, v in edges:
            adj[u].add(v)
            adj[v].add(u)
        expect = next((c for c in itertools.combinations(range(n), size)
                       if all(b in adj[a] for a, b in itertools.combinations(c, 2))), None)
        assert find_clique(adj, size) == expect

    def test_budget(self):
        adj = [set(range(30)) - {v} for v in range(30)]
        for v in range(30):
            adj[v] -= {(v + 1) % 30, (v - 1) % 30}
        with pytest.raises(ResourceLimit):
            find_clique(adj, 16, budget=100)


class TestBatch:
    @given(st.lists(st.integers(1, 8), min_size=1, max_size=4), st.integers(1, 3), st.data())
    def test_matches_slot_walk(self, periods, m, data):
        rows = data.draw(st.lists(st.tuples(*(st.integers(0, p - 1) for p in periods)), min_size=1, max_size=6))
        by_clique, by_timeline = batch_verdicts(periods, np.array(rows), m)
        expect = [oracles.slots_ok(periods, r, m) for r in rows]
        assert by_timeline.tolist() == expect
        assert by_clique.tolist() == expect

    def test_rejects_bad_start(self):
        with pytest.raises(InvalidArgument):
            batch_verdicts([2, 3], np.array([[2, 0]]), 1)


@given(st.integers(0, 2**32 - 1), st.booleans())
def test_many_jobs_path_matches_slot_walk(seed, spread):
    # past SMALL_JOBS the verifier switches to the array kernel
    rng = np.random.default_rng(seed)
    n = SMALL_JOBS + 6
    periods = [int(p) for p in rng.choice([64, 96, 128, 192, 256] if spread else [128, 256], n)]
    starts = [int(rng.integers(0, p)) for p in periods]
    m = 2
    assignment = tuple(int(a) for a in rng.integers(0, m, n))
    inst = WsInstance.from_periods(periods, m, True, False)
    assert verify_schedule(inst, Schedule(tuple(starts), assignment=assignment)).feasible == \
        oracles.slots_ok(periods, starts, m, assignment)
