import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from wspc.errors import InvalidArgument, ResourceLimit
from wspc.numtheory import (
    RelPrimeVector,
    base_m_representation,
    crt,
    factorization_trace,
    first_primes,
    from_residue_vector,
    relative_prime_factorization,
    residue_vector,
    split,
)

periods = st.lists(st.integers(1, 400), min_size=1, max_size=6)


def naive_primes(k):
    out, x = [], 1
    while len(out) < k:
        x += 1
        if all(x % p for p in out):
            out.append(x)
    return out


def is_rel_prime(fs):
    return all(a == b or math.gcd(a, b) == 1 for i, a in enumerate(fs) for b in fs[i + 1:])


@st.composite
def rel_prime_vectors(draw, max_product=10**4):
    """Build by drawing pairwise coprime bases and repeating some."""
    fs = []
    while True:
        f = draw(st.integers(2, 60))
        if all(f == g or math.gcd(f, g) == 1 for g in fs) and math.prod(fs) * f <= max_product:
            fs.append(f)
        if draw(st.booleans()) or math.prod(fs) * 2 > max_product:
            break
    return RelPrimeVector(tuple(sorted(fs)))


class TestSplit:
    def test_example(self):
        assert split(30, 42) == (5, 6, 7)

    @pytest.mark.parametrize("x,y", [(1, 6), (6, 1), (6, 6), (6, 35)])
    def test_rejects(self, x, y):
        with pytest.raises(InvalidArgument):
            split(x, y)

    @given(st.integers(2, 10**6), st.integers(2, 10**6))
    def test_product_identity(self, x, y):
        if x == y or math.gcd(x, y) == 1:
            return
        a, g, b = split(x, y)
        assert a * g == x and g * b == y and g == math.gcd(x, y)


class TestRelPrimeVector:
    def test_invariants_checked(self):
        with pytest.raises(InvalidArgument):
            RelPrimeVector((6, 4))
        with pytest.raises(InvalidArgument):
            RelPrimeVector((4, 6))
        with pytest.raises(InvalidArgument):
            RelPrimeVector((1, 5))
        assert RelPrimeVector((5, 5, 6)).exponents() == (0, 1, 0)

    def test_witness_is_lexicographically_smallest(self):
        F = RelPrimeVector((2, 2, 3, 3))
        assert F.witness(6) == (0, 2)
        assert F.witness(4) == (0, 1)
        assert F.witness(1) == ()
        with pytest.raises(InvalidArgument):
            F.witness(5)


class TestFactorization:
    def test_example(self):
        f = relative_prime_factorization([30, 42])
        assert f.base.factors == (5, 6, 7)
        assert f.witnesses == ((0, 1), (1, 2))

    def test_single_period_one(self):
        f = relative_prime_factorization([1])
        assert f.base.factors == () and f.witnesses == ((),)

    def test_counterexample_periods(self):
        f = relative_prime_factorization([77, 55, 35])
        for p, w in zip(f.periods, f.witnesses):
            assert math.prod(f.base[i] for i in w) == p

    @given(periods)
    def test_properties(self, ps):
        f = relative_prime_factorization(ps)
        fs = f.base.factors
        assert list(fs) == sorted(fs) and is_rel_prime(fs)
        for p, w in zip(ps, f.witnesses):
            assert math.prod(fs[i] for i in w) == p
            assert list(w) == sorted(set(w))

    @given(periods)
    def test_trace_preserves_product(self, ps):
        # every split keeps the product of the multiset of non-unit entries
        target = math.prod(ps)
        steps = list(factorization_trace(ps))
        first = math.prod(steps[0])
        assert first == target
        for a, b in zip(steps, steps[1:]):
            assert len(b) >= len(a) - 1
        assert is_rel_prime(steps[-1])


class TestResidues:
    def test_base_m_example(self):
        assert base_m_representation(345, 3, 4) == (0, 1, 2, 0)
        assert from_residue_vector((0, 1, 2, 0), (3, 3, 3, 3)) == 345 % 81 == 21

    def test_residue_vector_example(self):
        assert residue_vector(345, (5, 5, 6)) == (0, 4, 3)

    def test_zero(self):
        assert residue_vector(0, (2, 3, 3)) == (0, 0, 0)

    @given(st.integers(0, 10**9), st.integers(2, 50), st.integers(0, 8))
    def test_base_m_reconstructs(self, x, m, h):
        digits = base_m_representation(x, m, h)
        assert sum(d * m**i for i, d in enumerate(digits)) == x % m**h

    @given(rel_prime_vectors(), st.data())
    def test_round_trip(self, F, data):
        x = data.draw(st.integers(0, F.product - 1))
        assert from_residue_vector(residue_vector(x, F), F) == x

    @given(rel_prime_vectors(max_product=500), st.data())
    def test_equal_iff_congruent(self, F, data):
        P = F.product
        x = data.draw(st.integers(0, 2 * P - 1))
        y = data.draw(st.integers(0, 2 * P - 1))
        assert (residue_vector(x, F) == residue_vector(y, F)) == ((x - y) % P == 0)

    def test_crt_brute(self):
        for a in range(5):
            for b in range(7):
                x = crt([a, b], [5, 7])
                assert 0 <= x < 35 and x % 5 == a and x % 7 == b
        assert crt([], []) == 0


class TestPrimes:
    def test_matches_naive(self):
        assert list(first_primes(200)) == naive_primes(200)
        assert first_primes(0) == ()

    def test_ceiling(self):
        with pytest.raises(ResourceLimit):
            first_primes(11, ceiling=10)
