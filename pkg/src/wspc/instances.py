"""Scheduling and coding instances, their solutions, and seeded generators.

All indices (jobs, attributes, symbols, nodes) are 0-based here; the document
layer converts to and from the 1-based form used in files.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .errors import InvalidArgument, ValidationError


@dataclass(frozen=True)
class Job:
    period: int
    length: int = 1
    multiplicity: int = 1

    def __post_init__(self):
        for name in ("period", "length", "multiplicity"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int):
                raise ValidationError(f"job {name} must be an integer, got {v!r}")
            if v < 1:
                raise ValidationError(f"job {name} must be >= 1, got {v}")


@dataclass(frozen=True)
class WsInstance:
    """A Windows Scheduling instance.

    ``jobs`` is the compact form: each entry stands for ``multiplicity``
    identical jobs.  Schedules always address the expanded job list, where
    entry k contributes ``multiplicity`` consecutive jobs.
    """

    jobs: tuple[Job, ...]
    machines: int = 1
    periods_exact: bool = True
    migration_allowed: bool = False

    def __post_init__(self):
        object.__setattr__(self, "jobs", tuple(self.jobs))
        if isinstance(self.machines, bool) or not isinstance(self.machines, int) or self.machines < 1:
            raise ValidationError(f"machine count must be an integer >= 1, got {self.machines!r}")

    @classmethod
    def from_periods(cls, periods, machines=1, periods_exact=True, migration_allowed=False):
        return cls(tuple(Job(int(p)) for p in periods), machines, periods_exact, migration_allowed)

    @property
    def n_jobs(self) -> int:
        return sum(j.multiplicity for j in self.jobs)

    def expanded(self) -> list[Job]:
        out = []
        for j in self.jobs:
            out.extend([Job(j.period, j.length)] * j.multiplicity)
        return out

    def periods(self) -> list[int]:
        return [j.period for j in self.expanded()]

    def lengths(self) -> list[int]:
        return [j.length for j in self.expanded()]

    @property
    def unit(self) -> bool:
        return all(j.length == 1 for j in self.jobs)

    def hyperperiod(self) -> int:
        return math.lcm(*(j.period for j in self.jobs)) if self.jobs else 1


def density(inst: WsInstance) -> Fraction:
    """Exact ``sum(multiplicity * length / period)``."""
    return sum((Fraction(j.multiplicity * j.length, j.period) for j in inst.jobs), Fraction(0))


@dataclass(frozen=True)
class PcInstance:
    """A (k-ary) Partial Coding instance; ``symbols[j]`` is a sorted tuple of attribute indices."""

    ranges: tuple[int, ...]
    symbols: tuple[tuple[int, ...], ...]
    arity: int = 1

    def __post_init__(self):
        object.__setattr__(self, "ranges", tuple(self.ranges))
        object.__setattr__(self, "symbols", tuple(tuple(sorted(set(s))) for s in self.symbols))
        for i, f in enumerate(self.ranges):
            if isinstance(f, bool) or not isinstance(f, int) or f < 2:
                raise ValidationError(f"attribute {i + 1} range must be an integer >= 2, got {f!r}")
        d = len(self.ranges)
        for j, s in enumerate(self.symbols):
            for i in s:
                if not 0 <= i < d:
                    raise ValidationError(f"symbol {j + 1} uses attribute {i + 1} outside 1..{d}")
        if isinstance(self.arity, bool) or not isinstance(self.arity, int) or self.arity < 1:
            raise ValidationError(f"arity must be an integer >= 1, got {self.arity!r}")

    @property
    def d(self) -> int:
        return len(self.ranges)

    @property
    def n(self) -> int:
        return len(self.symbols)

    @property
    def binary(self) -> bool:
        return all(f == 2 for f in self.ranges)

    def members(self, i: int) -> list[int]:
        return [j for j, s in enumerate(self.symbols) if i in s]

    def code_space(self, j: int) -> int:
        return math.prod(self.ranges[i] for i in self.symbols[j])


@dataclass(frozen=True)
class Schedule:
    """A schedule in one of two forms.

    Start-time form (exact periods): ``start_times[j]`` in ``[0, p_j)``.
    Timeline form (any periods): ``timeline[t]`` lists the jobs starting at
    slot ``t`` of a cyclic schedule of length ``len(timeline)``.

    ``assignment`` optionally pins every job to a machine (no-migration case).
    """

    start_times: Optional[tuple[int, ...]] = None
    timeline: Optional[tuple[tuple[int, ...], ...]] = None
    assignment: Optional[tuple[int, ...]] = None

    def __post_init__(self):
        if (self.start_times is None) == (self.timeline is None):
            raise ValidationError("a schedule carries exactly one of start_times or timeline")
        if self.start_times is not None:
            object.__setattr__(self, "start_times", tuple(int(t) for t in self.start_times))
        if self.timeline is not None:
            object.__setattr__(self, "timeline", tuple(tuple(sorted(s)) for s in self.timeline))
        if self.assignment is not None:
            object.__setattr__(self, "assignment", tuple(int(a) for a in self.assignment))


@dataclass(frozen=True)
class Encoding:
    """Per symbol, a tuple of ``(attribute, value)`` pairs sorted by attribute."""

    codes: tuple[tuple[tuple[int, int], ...], ...]

    def __post_init__(self):
        object.__setattr__(
            self, "codes", tuple(tuple(sorted((int(a), int(v)) for a, v in dict(c).items())) for c in self.codes)
        )

    @classmethod
    def from_dicts(cls, dicts):
        return cls(tuple(tuple(d.items()) for d in dicts))

    def as_dicts(self) -> list[dict[int, int]]:
        return [dict(c) for c in self.codes]


@dataclass(frozen=True)
class Coloring:
    """Node colors ``0..k-1``."""

    colors: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "colors", tuple(int(c) for c in self.colors))
        if any(c < 0 for c in self.colors):
            raise ValidationError("colors must be non-negative")


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on nodes ``0..n-1``; ``colors`` is an optional budget."""

    n: int
    edges: frozenset = field(default_factory=frozenset)
    colors: Optional[int] = None

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, int) or self.n < 0:
            raise ValidationError(f"node count must be a non-negative integer, got {self.n!r}")
        norm = set()
        for u, v in self.edges:
            if u == v:
                raise ValidationError(f"self-loop at node {u + 1}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValidationError(f"edge ({u + 1}, {v + 1}) outside 1..{self.n}")
            norm.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", frozenset(norm))
        if self.colors is not None and (isinstance(self.colors, bool) or self.colors < 1):
            raise ValidationError(f"color budget must be >= 1, got {self.colors!r}")

    def adjacency(self) -> list[set[int]]:
        adj = [set() for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj

    def adjacency_matrix(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=np.bool_)
        for u, v in self.edges:
            a[u, v] = a[v, u] = True
        return a

    def max_degree(self) -> int:
        return max((len(s) for s in self.adjacency()), default=0)

    def non_edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in range(u + 1, self.n) if (u, v) not in self.edges]

    @classmethod
    def complete(cls, n, colors=None):
        return cls(n, frozenset((u, v) for u in range(n) for v in range(u + 1, n)), colors)

    @classmethod
    def cycle(cls, n, colors=None):
        return cls(n, frozenset((i, (i + 1) % n) for i in range(n)), colors)

    @classmethod
    def path(cls, n, colors=None):
        return cls(n, frozenset((i, i + 1) for i in range(n - 1)), colors)


# -- generators ---------------------------------------------------------------

GENERATOR_KINDS = ("harmonic", "k-periods", "bpc", "graph")


def generate(kind: str, seed: int, **params):
    """Seeded instance generator.

    Kinds and parameters:
        harmonic:  n, periods (a divisibility chain, default (2, 4, 8))
        k-periods: n, k, max_period (default 12)
        bpc:       d, n, p (membership probability, default 0.5)
        graph:     n, c (maximum degree), colors (optional)
    """
    rng = np.random.default_rng(np.random.SeedSequence(_seed64(seed)))
    if kind == "harmonic":
        n = _positive(params, "n", 0)
        chain = tuple(sorted(int(p) for p in params.get("periods", (2, 4, 8))))
        if not chain or chain[0] < 1 or any(b % a for a, b in zip(chain, chain[1:])):
            raise InvalidArgument(f"harmonic periods must form a divisibility chain, got {chain}")
        picks = sorted(int(chain[i]) for i in rng.integers(0, len(chain), size=n))
        return WsInstance.from_periods(picks)
    if kind == "k-periods":
        n = _positive(params, "n", 1)
        k = _positive(params, "k", 1)
        pmax = _positive(params, "max_period", 1, default=12)
        if k > n or k > pmax:
            raise InvalidArgument("need k <= n and k <= max_period")
        distinct = sorted(int(p) for p in rng.choice(np.arange(1, pmax + 1), size=k, replace=False))
        rest = [distinct[i] for i in rng.integers(0, k, size=n - k)]
        return WsInstance.from_periods(sorted(distinct + rest))
    if kind == "bpc":
        d = _positive(params, "d", 0)
        n = _positive(params, "n", 0)
        p = float(params.get("p", 0.5))
        if not 0.0 <= p <= 1.0:
            raise InvalidArgument("membership probability must lie in [0, 1]")
        mask = rng.random((n, d)) < p
        return PcInstance((2,) * d, tuple(tuple(int(i) for i in np.flatnonzero(row)) for row in mask))
    if kind == "graph":
        n = _positive(params, "n", 0)
        c = _positive(params, "c", 0)
        colors = params.get("colors")
        pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
        order = rng.permutation(len(pairs)) if pairs else []
        deg = [0] * n
        edges = set()
        for idx in order:
            u, v = pairs[idx]
            if deg[u] < c and deg[v] < c:
                edges.add((u, v))
                deg[u] += 1
                deg[v] += 1
        return Graph(n, frozenset(edges), colors)
    raise InvalidArgument(f"unknown generator kind {kind!r}; expected one of {GENERATOR_KINDS}")


def _seed64(seed: int) -> int:
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise InvalidArgument(f"seed must be an integer, got {seed!r}")
    return seed % 2**64


def _positive(params, name, lo, default=None):
    v = params.get(name, default)
    if v is None:
        raise InvalidArgument(f"missing generator parameter {name!r}")
    v = int(v)
    if v < lo:
        raise InvalidArgument(f"parameter {name} must be >= {lo}, got {v}")
    return v
