from fractions import Fraction

import pytest

from wspc.errors import InvalidArgument, ValidationError
from wspc.instances import Encoding, Graph, Job, PcInstance, Schedule, WsInstance, density, generate


class TestWs:
    def test_job_validation(self):
        for bad in (0, -1, True, 1.5):
            with pytest.raises(ValidationError):
                Job(bad)
        with pytest.raises(ValidationError):
            Job(4, length=0)

    def test_expanded_and_density(self):
        inst = WsInstance((Job(2), Job(8, 1, 2)))
        assert inst.periods() == [2, 8, 8]
        assert inst.n_jobs == 3
        assert density(inst) == Fraction(3, 4)
        assert inst.hyperperiod() == 8

    def test_density_exact_rational(self):
        inst = WsInstance.from_periods([3, 4, 12])
        assert density(inst) == Fraction(2, 3)

    def test_machines_checked(self):
        with pytest.raises(ValidationError):
            WsInstance((Job(2),), machines=0)


class TestPc:
    def test_pc_small(self):
        pc = PcInstance((2, 3, 2), ((0, 2), (2,), (0, 1, 2), (0, 1, 2)))
        assert pc.d == 3 and pc.n == 4 and not pc.binary
        assert pc.members(1) == [2, 3]
        assert pc.code_space(2) == 12

    def test_validation(self):
        with pytest.raises(ValidationError):
            PcInstance((1,), ((0,),))
        with pytest.raises(ValidationError):
            PcInstance((2,), ((1,),))
        with pytest.raises(ValidationError):
            PcInstance((2,), ((0,),), arity=0)


class TestSolutions:
    def test_schedule_forms(self):
        with pytest.raises(ValidationError):
            Schedule()
        with pytest.raises(ValidationError):
            Schedule((0,), ((0,),))
        assert Schedule((0, 1)).start_times == (0, 1)

    def test_encoding_normalizes(self):
        e = Encoding((((2, 1), (0, 0)),))
        assert e.codes == (((0, 0), (2, 1)),)
        assert Encoding.from_dicts(e.as_dicts()) == e


class TestGraph:
    def test_normalizes_edges(self):
        g = Graph(3, frozenset({(2, 0), (1, 2)}))
        assert g.edges == {(0, 2), (1, 2)}
        assert g.max_degree() == 2
        assert g.non_edges() == [(0, 1)]

    def test_rejects(self):
        with pytest.raises(ValidationError):
            Graph(2, frozenset({(0, 0)}))
        with pytest.raises(ValidationError):
            Graph(2, frozenset({(0, 2)}))

    def test_families(self):
        assert len(Graph.complete(4).edges) == 6
        assert len(Graph.cycle(5).edges) == 5
        assert len(Graph.path(4).edges) == 3


class TestGenerate:
    @pytest.mark.parametrize("kind,params", [
        ("harmonic", {"n": 5}),
        ("k-periods", {"n": 5, "k": 2}),
        ("bpc", {"d": 3, "n": 4}),
        ("graph", {"n": 10, "c": 3}),
    ])
    def test_deterministic(self, kind, params):
        assert generate(kind, 7, **params) == generate(kind, 7, **params)

    def test_graph_degree_bound(self):
        for seed in range(20):
            assert generate("graph", seed, n=30, c=3).max_degree() <= 3

    def test_k_periods_has_k_distinct(self):
        inst = generate("k-periods", 3, n=6, k=3, max_period=12)
        assert len(set(inst.periods())) == 3

    def test_harmonic_chain(self):
        ps = generate("harmonic", 1, n=8, periods=(3, 6, 12)).periods()
        assert set(ps) <= {3, 6, 12}
        with pytest.raises(InvalidArgument):
            generate("harmonic", 1, n=3, periods=(2, 3))

    def test_unknown_kind(self):
        with pytest.raises(InvalidArgument):
            generate("nope", 0)
