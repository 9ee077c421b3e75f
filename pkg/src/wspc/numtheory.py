"""Exact integer machinery: split, relative prime factorization, residue vectors.

Everything here works on Python ints, so products of gadget primes never
overflow.  Indices are 0-based internally; documents use 1-based indices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Iterator, Sequence

from .errors import InvalidArgument, ResourceLimit

PRIME_CEILING = 10**5


def lcm(values: Iterable[int]) -> int:
    return reduce(math.lcm, values, 1)


def prod(values: Iterable[int]) -> int:
    return math.prod(values)


def split(x: int, y: int) -> tuple[int, int, int]:
    """Return ``(x/g, g, y/g)`` for ``g = gcd(x, y)``.

    Raises:
        InvalidArgument: if x and y are coprime, equal, or smaller than 2.
    """
    if x < 2 or y < 2:
        raise InvalidArgument(f"split needs integers >= 2, got ({x}, {y})")
    if x == y:
        raise InvalidArgument(f"split needs distinct integers, got ({x}, {y})")
    g = math.gcd(x, y)
    if g == 1:
        raise InvalidArgument(f"split needs a common factor, gcd({x}, {y}) = 1")
    return x // g, g, y // g


@dataclass(frozen=True)
class RelPrimeVector:
    """Nondecreasing factors, any two of which are equal or coprime."""

    factors: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(int(f) for f in self.factors))
        fs = self.factors
        for f in fs:
            if f < 2:
                raise InvalidArgument(f"relative prime vector factors must be >= 2, got {f}")
        for a, b in zip(fs, fs[1:]):
            if a > b:
                raise InvalidArgument(f"factors must be nondecreasing: {fs}")
        for i, a in enumerate(fs):
            for b in fs[i + 1:]:
                if a != b and math.gcd(a, b) != 1:
                    raise InvalidArgument(f"factors {a} and {b} are neither equal nor coprime")

    def __len__(self):
        return len(self.factors)

    def __iter__(self):
        return iter(self.factors)

    def __getitem__(self, i):
        return self.factors[i]

    @property
    def product(self) -> int:
        return prod(self.factors)

    def exponents(self) -> tuple[int, ...]:
        """Per component, how many earlier components carry the same factor."""
        seen: dict[int, int] = {}
        out = []
        for f in self.factors:
            out.append(seen.get(f, 0))
            seen[f] = seen.get(f, 0) + 1
        return tuple(out)

    def witness(self, p: int) -> tuple[int, ...]:
        """Lexicographically smallest index set whose factors multiply to ``p``.

        Distinct factors are pairwise coprime, so the multiplicity of every
        factor in a representation of ``p`` is forced; taking the earliest
        copies of each gives the smallest set.

        Raises:
            InvalidArgument: if ``p`` is not a product of a sub-multiset.
        """
        if p < 1:
            raise InvalidArgument(f"period must be >= 1, got {p}")
        rest = p
        chosen = []
        for i, f in enumerate(self.factors):
            if rest % f == 0:
                chosen.append(i)
                rest //= f
        if rest != 1:
            raise InvalidArgument(f"{p} is not a product of factors from {self.factors}")
        return tuple(chosen)


def as_vector(F) -> RelPrimeVector:
    return F if isinstance(F, RelPrimeVector) else RelPrimeVector(tuple(F))


@dataclass(frozen=True)
class Factorization:
    """A relative prime vector together with one witness index set per input."""

    base: RelPrimeVector
    periods: tuple[int, ...]
    witnesses: tuple[tuple[int, ...], ...]


def factorization_trace(periods: Iterable[int]) -> Iterator[list[int]]:
    """Yield the working multiset before the first split and after every split.

    Pairs are scanned in lexicographic index order and the scan restarts after
    each split; ``split(F[i], F[j])`` writes ``x/g`` into slot i, ``y/g`` into
    slot j and appends ``g``.  Ones are dropped immediately.
    """
    F = [int(p) for p in periods]
    for p in F:
        if p < 1:
            raise InvalidArgument(f"periods must be >= 1, got {p}")
    F = [p for p in F if p != 1]
    yield list(F)
    while True:
        pair = _first_splittable(F)
        if pair is None:
            return
        i, j = pair
        a, g, b = split(F[i], F[j])
        F[i], F[j] = a, b
        F.append(g)
        F = [f for f in F if f != 1]
        yield list(F)


def _first_splittable(F: list[int]):
    n = len(F)
    for i in range(n):
        x = F[i]
        for j in range(i + 1, n):
            y = F[j]
            if x != y and math.gcd(x, y) != 1:
                return i, j
    return None


def relative_prime_factorization(periods: Iterable[int]) -> Factorization:
    """Factor a multiset of periods into pairwise equal-or-coprime parts.

    The split loop yields pairwise coprime distinct values D with every period
    a product of members of D, repetition allowed.  Each value of D is then
    repeated as often as its largest exponent in any single period, so every
    period is a product of a sub-multiset.

    >>> f = relative_prime_factorization([30, 42])
    >>> f.base.factors, f.witnesses
    ((5, 6, 7), ((0, 1), (1, 2)))
    >>> relative_prime_factorization([2, 8]).base.factors
    (2, 2, 2)
    """
    periods = tuple(int(p) for p in periods)
    F: list[int] = []
    for F in factorization_trace(periods):
        pass
    distinct = sorted(set(F))
    copies = {f: 1 for f in distinct}
    for p in periods:
        for f in distinct:
            e = 0
            while p % f == 0:
                p //= f
                e += 1
            copies[f] = max(copies[f], e)
    base = RelPrimeVector(tuple(f for f in distinct for _ in range(copies[f])))
    witnesses = tuple(base.witness(p) for p in periods)
    return Factorization(base, periods, witnesses)


def base_m_representation(x: int, m: int, h: int) -> tuple[int, ...]:
    """Little-endian digits ``floor(x / m**i) mod m`` for ``i < h``."""
    if m < 2:
        raise InvalidArgument(f"base must be >= 2, got {m}")
    if x < 0 or h < 0:
        raise InvalidArgument("x and h must be non-negative")
    out = []
    for _ in range(h):
        x, d = divmod(x, m)
        out.append(d)
    return tuple(out)


def residue_vector(x: int, F) -> tuple[int, ...]:
    """Component i is ``floor(x / f_i**h) mod f_i`` with h the count of earlier equal factors."""
    F = as_vector(F)
    return tuple((x // f**h) % f for f, h in zip(F.factors, F.exponents()))


def crt(residues: Sequence[int], moduli: Sequence[int]) -> int:
    """Smallest non-negative solution of pairwise coprime congruences."""
    x, n = 0, 1
    for r, m in zip(residues, moduli):
        # x + n*k = r (mod m)
        k = ((r - x) * pow(n, -1, m)) % m if m > 1 else 0
        x += n * k
        n *= m
    return x % n if n > 1 else 0


def from_residue_vector(values: Sequence[int], F) -> int:
    """Inverse of :func:`residue_vector` on ``[0, prod(F))``."""
    F = as_vector(F)
    if len(values) != len(F):
        raise InvalidArgument("residue vector length does not match factor vector")
    powers: dict[int, int] = {}
    parts: dict[int, int] = {}
    for v, f, h in zip(values, F.factors, F.exponents()):
        if not 0 <= v < f:
            raise InvalidArgument(f"residue {v} out of range for factor {f}")
        parts[f] = parts.get(f, 0) + v * f**h
        powers[f] = f ** (h + 1)
    keys = list(parts)
    return crt([parts[f] for f in keys], [powers[f] for f in keys])


def first_primes(count: int, ceiling: int = PRIME_CEILING) -> tuple[int, ...]:
    """The first ``count`` primes, by a segmented sieve that doubles its bound."""
    if count < 0:
        raise InvalidArgument("prime count must be non-negative")
    if count > ceiling:
        raise ResourceLimit(f"requested {count} primes, ceiling is {ceiling}")
    if count == 0:
        return ()
    bound = max(16, int(count * (math.log(count + 1) + math.log(math.log(count + 3)))) + 3)
    while True:
        sieve = bytearray([1]) * (bound + 1)
        sieve[0:2] = b"\x00\x00"
        for p in range(2, math.isqrt(bound) + 1):
            if sieve[p]:
                sieve[p * p::p] = bytearray(len(range(p * p, bound + 1, p)))
        primes = [i for i in range(bound + 1) if sieve[i]]
        if len(primes) >= count:
            return tuple(primes[:count])
        bound *= 2
