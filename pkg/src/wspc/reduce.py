"""Instance transformations between scheduling, coding and graph problems.

Every reduction returns ``(target, certificate)``.  A certificate maps
solutions of the target back to solutions of the source (``back_map``) and,
where the construction allows it, source solutions forward (``forward_map``).
Certificates serialize as documents that record the source, the target and
the reduction parameters; loading one re-runs the (deterministic) reduction
and refuses a document whose target does not match.
"""

from __future__ import annotations

import math
from dataclasses import replace
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .errors import DocumentError, InvalidArgument, ResourceLimit, ValidationError
from .instances import Coloring, Encoding, Graph, Job, PcInstance, Schedule, WsInstance, density
from .numtheory import (
    Factorization,
    crt,
    first_primes,
    from_residue_vector,
    relative_prime_factorization,
    residue_vector,
)

CLIQUE_COVER_ROUNDS = 64


def _require_unit_exact(inst: WsInstance):
    if not inst.unit:
        raise InvalidArgument("reductions are defined for unit-length jobs only")
    if not inst.periods_exact:
        raise InvalidArgument("this reduction needs exact periods")


def _codes(enc: Encoding, n: int) -> list[dict[int, int]]:
    if len(enc.codes) != n:
        raise ValidationError(f"encoding has {len(enc.codes)} codes, expected {n}")
    return enc.as_dicts()


def _starts(sched: Schedule, n: int) -> tuple[int, ...]:
    if sched.start_times is None:
        raise ValidationError("expected a start-time schedule")
    if len(sched.start_times) != n:
        raise ValidationError(f"schedule has {len(sched.start_times)} start times, expected {n}")
    return sched.start_times


class Certificate:
    """Base class; subclasses set ``name`` and implement the maps."""

    name = ""

    def __init__(self, source, target, params: Optional[dict] = None):
        self.source = source
        self.target = target
        self.params = dict(params or {})

    def back_map(self, solution):
        raise NotImplementedError

    def forward_map(self, solution):
        raise NotImplementedError(f"{self.name} has no forward map")

    def bookkeeping(self) -> dict:
        return {}

    def to_dict(self) -> dict:
        from .documents import to_dict

        return {
            "kind": "certificate",
            "reduction": self.name,
            "params": self.params,
            "source": to_dict(self.source),
            "target": to_dict(self.target),
            "bookkeeping": self.bookkeeping(),
        }

    @staticmethod
    def from_dict(obj: dict) -> "Certificate":
        from .documents import from_dict

        extra = set(obj) - {"kind", "reduction", "params", "source", "target", "bookkeeping"}
        if extra:
            raise DocumentError(f"unknown key {sorted(extra)[0]!r}", path="<root>")
        name = obj.get("reduction")
        if name not in REDUCTIONS:
            raise DocumentError(f"unknown reduction {name!r}", path="reduction")
        params = obj.get("params", {})
        if not isinstance(params, dict):
            raise DocumentError("expected an object", path="params")
        for key in ("source", "target"):
            if key not in obj:
                raise DocumentError(f"missing key {key!r}", path="<root>")
        source, _ = from_dict(obj["source"], "source")
        target, _ = from_dict(obj["target"], "target")
        new_target, cert = run_reduction(name, source, **params)
        if new_target != target:
            raise DocumentError("target does not match a fresh run of the reduction", path="target")
        return cert


class Identity(Certificate):
    name = "identity"

    def back_map(self, solution):
        return solution

    def forward_map(self, solution):
        return solution


class Composed(Certificate):
    """Chain of certificates; stage i's target is stage i+1's source."""

    def __init__(self, name, stages: Sequence[Certificate], params=None):
        super().__init__(stages[0].source, stages[-1].target, params)
        self.name = name
        self.stages = list(stages)

    def back_map(self, solution):
        for st in reversed(self.stages):
            solution = st.back_map(solution)
        return solution

    def forward_map(self, solution):
        for st in self.stages:
            solution = st.forward_map(solution)
        return solution

    def bookkeeping(self):
        return {"stages": [{"reduction": st.name, **st.bookkeeping()} for st in self.stages]}


# -- WS -> PC -----------------------------------------------------------------


class WsToPc(Certificate):
    """Start time t_j <-> code c_j(i) = r_i(t_j), a bijection per job."""

    name = "ws-to-pc"

    def __init__(self, source, target, fact: Factorization, params=None):
        super().__init__(source, target, params)
        self.fact = fact

    def forward_map(self, sched: Schedule) -> Encoding:
        F = self.fact.base
        starts = _starts(sched, len(self.fact.periods))
        codes = []
        for t, p, s in zip(starts, self.fact.periods, self.fact.witnesses):
            if not 0 <= t < p:
                raise ValidationError(f"start time {t} outside [0, {p - 1}]")
            r = residue_vector(t, F)
            codes.append({i: r[i] for i in s})
        return Encoding.from_dicts(codes)

    def back_map(self, enc: Encoding) -> Schedule:
        F = self.fact.base.factors
        out = []
        for j, (code, s) in enumerate(zip(_codes(enc, len(self.fact.periods)), self.fact.witnesses)):
            if set(code) != set(s):
                raise ValidationError(f"code of symbol {j + 1} does not match its attribute set")
            out.append(from_residue_vector([code[i] for i in s], [F[i] for i in s]))
        return Schedule(tuple(out))

    def bookkeeping(self):
        return {
            "factors": list(self.fact.base.factors),
            "witnesses": [[i + 1 for i in s] for s in self.fact.witnesses],
        }


def ws_to_pc(inst: WsInstance):
    """Attributes are a relative prime factorization of the periods; symbol j is p_j's witness set.

    With migration on m machines the same construction yields the m-ary
    problem; without migration use :func:`multimachine_to_single` first.
    """
    _require_unit_exact(inst)
    if inst.machines > 1 and not inst.migration_allowed:
        raise InvalidArgument("several machines without migration: use multimachine_to_single")
    fact = relative_prime_factorization(inst.periods())
    arity = inst.machines if inst.migration_allowed else 1
    target = PcInstance(fact.base.factors, fact.witnesses, arity)
    return target, WsToPc(inst, target, fact)


# -- PC -> BPC ----------------------------------------------------------------


class PcToBpc(Certificate):
    """Bookkeeping per source attribute: ``("keep", new_attr)`` or an expansion record."""

    name = "pc-to-bpc"

    def __init__(self, source, target, plan, params=None):
        super().__init__(source, target, params)
        self.plan = plan

    def back_map(self, enc: Encoding) -> Encoding:
        src = self.source
        codes = _codes(enc, self.target.n)
        out = [dict() for _ in range(src.n)]
        for i, step in enumerate(self.plan):
            members = src.members(i)
            if step["kind"] == "drop":
                continue
            if step["kind"] == "keep":
                for j in members:
                    out[j][i] = codes[j][step["attr"]]
                continue
            bits = step["bits"]
            k = len(bits)
            blocked = set()
            for aux, length in zip(step["aux"], step["prefix"]):
                prefix = 0
                for a in bits[:length]:
                    prefix = 2 * prefix + codes[aux][a]
                lo = prefix << (k - length)
                blocked.update(range(lo, lo + (1 << (k - length))))
            free = [x for x in range(1 << k) if x not in blocked]
            rank = {x: r for r, x in enumerate(free)}
            for j in members:
                x = 0
                for a in bits:
                    x = 2 * x + codes[j][a]
                if x not in rank or rank[x] >= src.ranges[i]:
                    raise ValidationError(f"symbol {j + 1} uses a blocked code; target encoding is infeasible")
                out[j][i] = rank[x]
        return Encoding.from_dicts(out)

    def forward_map(self, enc: Encoding) -> Encoding:
        src = self.source
        codes = _codes(enc, src.n)
        out = [dict() for _ in range(self.target.n)]
        for i, step in enumerate(self.plan):
            if step["kind"] == "drop":
                continue
            if step["kind"] == "keep":
                for j in src.members(i):
                    out[j][step["attr"]] = codes[j][i]
                continue
            bits = step["bits"]
            k = len(bits)
            for j in src.members(i):
                for pos, a in enumerate(bits):
                    out[j][a] = (codes[j][i] >> (k - 1 - pos)) & 1
            for aux, length, block in zip(step["aux"], step["prefix"], step["block"]):
                for pos, a in enumerate(bits[:length]):
                    out[aux][a] = (block >> (k - 1 - pos)) & 1
            if step["separator"] is not None:
                for j in range(self.target.n):
                    if step["separator"] in self.target.symbols[j]:
                        out[j][step["separator"]] = 1 if j in step["aux"] else 0
        return Encoding.from_dicts(out)

    def bookkeeping(self):
        out = []
        for step in self.plan:
            if step["kind"] == "drop":
                out.append({"kind": "drop"})
            elif step["kind"] == "keep":
                out.append({"kind": "keep", "attr": step["attr"] + 1})
            else:
                out.append({
                    "kind": "expand",
                    "bits": [a + 1 for a in step["bits"]],
                    "separator": None if step["separator"] is None else step["separator"] + 1,
                    "aux": [j + 1 for j in step["aux"]],
                    "prefix": list(step["prefix"]),
                })
        return {"attributes": out}


def pc_to_bpc(inst: PcInstance):
    """Replace every non-binary attribute by binary encoding bits plus blocking symbols.

    For range f > 2 with k = ceil(log2 f) bits and m = 2**k - f, one auxiliary
    symbol per set bit j of m holds the first k - j bits (most significant
    first); together they block exactly m of the 2**k bit patterns.  A
    separator attribute, held by those auxiliaries and by every current symbol
    without the attribute, keeps the auxiliaries apart from the latter.  The
    separator is only created when there are auxiliaries and at least one
    symbol lacks the attribute; otherwise it would separate symbols that the
    source cannot.  Attributes are processed in index order and later ones see
    earlier auxiliaries as ordinary symbols.  Attributes held by no symbol
    constrain nothing and are dropped.
    """
    if inst.arity != 1:
        raise InvalidArgument("pc_to_bpc is defined for plain (arity 1) partial coding")
    symbols = [set() for _ in range(inst.n)]
    n_attrs = 0
    plan = []
    for i, f in enumerate(inst.ranges):
        holders = [j for j in range(inst.n) if i in inst.symbols[j]]
        if not holders:
            plan.append({"kind": "drop"})
            continue
        if f == 2:
            for j in holders:
                symbols[j].add(n_attrs)
            plan.append({"kind": "keep", "attr": n_attrs})
            n_attrs += 1
            continue
        k = (f - 1).bit_length()
        m = (1 << k) - f
        bits = list(range(n_attrs, n_attrs + k))
        n_attrs += k
        lacking = [j for j in range(len(symbols)) if j not in holders]
        for j in holders:
            symbols[j].update(bits)
        aux, prefix, block = [], [], []
        start = f  # blocked patterns are [f, 2**k), cut into aligned blocks, small first
        for j in range(k):
            if (m >> j) & 1:
                aux.append(len(symbols))
                prefix.append(k - j)
                block.append(start)
                symbols.append(set(bits[: k - j]))
                start += 1 << j
        separator = None
        if aux and lacking:
            separator = n_attrs
            n_attrs += 1
            for j in lacking + aux:
                symbols[j].add(separator)
        plan.append({"kind": "expand", "bits": bits, "separator": separator, "aux": aux,
                     "prefix": prefix, "block": block})
    target = PcInstance((2,) * n_attrs, tuple(tuple(sorted(s)) for s in symbols))
    return target, PcToBpc(inst, target, plan)


# -- BPC -> WS ----------------------------------------------------------------


def prime_pc_to_ws(inst: PcInstance) -> WsInstance:
    """PC with pairwise distinct prime ranges -> WS with p_j = product of s_j's ranges.

    Arity k maps to k machines with migration.
    """
    return WsInstance(
        tuple(Job(math.prod(inst.ranges[i] for i in s)) for s in inst.symbols),
        machines=inst.arity,
        migration_allowed=inst.arity > 1,
    )


class BpcToWs(Certificate):
    name = "bpc-to-ws"

    def __init__(self, source, target, prime_pc, used, pairs, aux_groups, params=None):
        super().__init__(source, target, params)
        self.prime_pc = prime_pc  # intermediate instance with distinct prime ranges
        self.used = used  # source attributes that received a gadget, in order
        self.pairs = pairs  # (alpha, beta) attribute indices in prime_pc per used attribute
        self.aux_groups = aux_groups  # symbol index ranges in prime_pc per used attribute

    def schedule_to_prime_encoding(self, sched: Schedule) -> Encoding:
        pc = self.prime_pc
        starts = _starts(sched, pc.n)
        return Encoding.from_dicts([{i: t % pc.ranges[i] for i in s} for t, s in zip(starts, pc.symbols)])

    def prime_encoding_to_schedule(self, enc: Encoding) -> Schedule:
        pc = self.prime_pc
        codes = _codes(enc, pc.n)
        return Schedule(tuple(crt([c[i] for i in s], [pc.ranges[i] for i in s]) for c, s in zip(codes, pc.symbols)))

    def back_map(self, sched: Schedule) -> Encoding:
        src = self.source
        codes = _codes(self.schedule_to_prime_encoding(sched), self.prime_pc.n)
        out = [{i: 0 for i in s} for s in src.symbols]
        for i, (alpha, beta), (lo, hi) in zip(self.used, self.pairs, self.aux_groups):
            taken = {codes[j][beta] for j in range(lo, hi)}
            free = sorted(set(range(self.prime_pc.ranges[beta])) - taken)
            rank = {v: r for r, v in enumerate(free)}
            for j in src.members(i):
                v = codes[j][beta]
                if v not in rank or rank[v] > 1:
                    raise ValidationError(f"symbol {j + 1} collides with a gadget job; schedule is infeasible")
                out[j][i] = rank[v]
        return Encoding.from_dicts(out)

    def forward_map(self, enc: Encoding) -> Schedule:
        src = self.source
        pc = self.prime_pc
        codes = _codes(enc, src.n)
        out = [dict() for _ in range(pc.n)]
        for i, (alpha, beta), (lo, hi) in zip(self.used, self.pairs, self.aux_groups):
            a, b = pc.ranges[alpha], pc.ranges[beta]
            for j in range(pc.n):
                if alpha in pc.symbols[j] and not lo <= j < hi:
                    out[j][alpha] = 0
            for j in src.members(i):
                out[j][beta] = codes[j][i]
            for off, j in enumerate(range(lo, hi)):
                out[j][alpha] = 1 + off // (b - 2)
                out[j][beta] = 2 + off % (b - 2)
        return self.prime_encoding_to_schedule(Encoding.from_dicts(out))

    def bookkeeping(self):
        return {
            "prime_ranges": list(self.prime_pc.ranges),
            "gadgets": [
                {"attribute": i + 1, "alpha": a + 1, "beta": b + 1, "aux_symbols": [lo + 1, hi]}
                for i, (a, b), (lo, hi) in zip(self.used, self.pairs, self.aux_groups)
            ],
        }


def bpc_to_ws(inst: PcInstance):
    """Binary PC -> single-machine exact WS via the two-prime gadget.

    Attributes held by no symbol are dropped first.  The r-th remaining
    attribute takes primes ``a < b`` = primes 2r, 2r+1: alpha (range a) joins
    every current symbol lacking it, beta (range b) every symbol holding it,
    and ``(a-1)(b-2)`` auxiliary symbols hold exactly {alpha, beta}.  The first
    gadget uses (2, 3) and a single auxiliary, which later gadgets see among
    the symbols lacking their attribute.  Job j's period is the product of its
    symbol's prime ranges; each auxiliary group becomes one compact job entry.
    """
    if inst.arity != 1:
        raise InvalidArgument("bpc_to_ws is defined for plain (arity 1) partial coding")
    if not inst.binary:
        raise InvalidArgument("bpc_to_ws needs all attribute ranges equal to 2")
    used = [i for i in range(inst.d) if inst.members(i)]
    primes = first_primes(2 * len(used))
    symbols = [set() for _ in range(inst.n)]
    ranges = []
    pairs, aux_groups = [], []
    for r, i in enumerate(used):
        a, b = primes[2 * r], primes[2 * r + 1]
        alpha, beta = len(ranges), len(ranges) + 1
        ranges += [a, b]
        for j, s in enumerate(symbols):
            if j < inst.n and i in inst.symbols[j]:
                s.add(beta)
            else:
                s.add(alpha)
        lo = len(symbols)
        symbols.extend({alpha, beta} for _ in range((a - 1) * (b - 2)))
        pairs.append((alpha, beta))
        aux_groups.append((lo, len(symbols)))
    prime_pc = PcInstance(tuple(ranges), tuple(tuple(sorted(s)) for s in symbols))
    periods = [math.prod(ranges[i] for i in s) for s in prime_pc.symbols]
    jobs = [Job(p) for p in periods[: inst.n]]
    for lo, hi in aux_groups:
        jobs.append(Job(periods[lo], 1, hi - lo))
    target = WsInstance(tuple(jobs))
    return target, BpcToWs(inst, target, prime_pc, used, pairs, aux_groups)


def pc_to_ws(inst: PcInstance):
    """General PC -> single-machine WS, through the binary problem."""
    bpc, c1 = pc_to_bpc(inst)
    ws, c2 = bpc_to_ws(bpc)
    return ws, Composed("pc-to-ws", [c1, c2])


# -- several machines without migration ---------------------------------------


class AddAttribute(Certificate):
    """Append one attribute of a given range to every symbol; its value is the machine index."""

    name = "add-machine-attribute"

    def back_map(self, enc: Encoding):
        d = self.source.d
        codes = _codes(enc, self.target.n)
        machines = tuple(c[d] for c in codes)
        return Encoding.from_dicts([{i: v for i, v in c.items() if i != d} for c in codes]), machines

    def forward_map(self, pair):
        enc, machines = pair
        d = self.source.d
        return Encoding.from_dicts([{**c, d: m} for c, m in zip(_codes(enc, self.source.n), machines)])


class MultiToSingle(Composed):
    def __init__(self, ws_stage, add_stage, rest: Sequence[Certificate], params=None):
        super().__init__("multimachine-to-single", [ws_stage, add_stage, *rest], params)
        self.ws_stage, self.add_stage, self.rest = ws_stage, add_stage, list(rest)

    def back_map(self, sched: Schedule) -> Schedule:
        enc = sched
        for st in reversed(self.rest):
            enc = st.back_map(enc)
        enc, machines = self.add_stage.back_map(enc)
        starts = self.ws_stage.back_map(enc).start_times
        return Schedule(starts, assignment=machines)

    def forward_map(self, sched: Schedule) -> Schedule:
        if sched.assignment is None:
            raise ValidationError("a no-migration schedule needs a machine assignment")
        enc = self.ws_stage.forward_map(Schedule(sched.start_times))
        enc = self.add_stage.forward_map((enc, sched.assignment))
        for st in self.rest:
            enc = st.forward_map(enc)
        return enc


def multimachine_to_single(inst: WsInstance):
    """m machines without migration -> one machine.

    Machine choice becomes an extra attribute of range m held by every symbol
    of the coding instance, which then goes back to WS through the binary
    problem.  With m = 1 the instance is returned unchanged.
    """
    _require_unit_exact(inst)
    if inst.migration_allowed and inst.machines > 1:
        raise InvalidArgument("multimachine_to_single is for the no-migration variant")
    if inst.machines == 1:
        return inst, Identity(inst, inst)
    m = inst.machines
    single = replace(inst, machines=1, migration_allowed=False)
    pc, c1 = ws_to_pc(single)
    extended = PcInstance(pc.ranges + (m,), tuple(s + (pc.d,) for s in pc.symbols))
    c_add = AddAttribute(pc, extended)
    bpc, c2 = pc_to_bpc(extended)
    ws, c3 = bpc_to_ws(bpc)
    cert = MultiToSingle(c1, c_add, [c2, c3])
    cert.source = inst
    return ws, cert


# -- graph coloring -----------------------------------------------------------


def verify_coloring(g: Graph, colors, k: int) -> bool:
    if isinstance(colors, Coloring):
        colors = colors.colors
    return len(colors) == g.n and all(0 <= c < k for c in colors) and all(colors[u] != colors[v] for u, v in g.edges)


class ColoringToPc(Certificate):
    name = "coloring-to-pc"

    def __init__(self, source, target, k, pair_attr, color_attr, params=None):
        super().__init__(source, target, params)
        self.k = k
        self.pair_attr = pair_attr  # non-edge (u, v) -> attribute
        self.color_attr = color_attr  # None when k == 1

    def back_map(self, enc: Encoding) -> Coloring:
        codes = _codes(enc, self.source.n)
        if self.color_attr is None:
            return Coloring((0,) * self.source.n)
        return Coloring(tuple(c[self.color_attr] for c in codes))

    def forward_map(self, colors) -> Encoding:
        if not verify_coloring(self.source, colors, self.k):
            raise ValidationError("not a proper coloring")
        colors = colors.colors if isinstance(colors, Coloring) else tuple(colors)
        codes = [dict() for _ in range(self.source.n)]
        for (u, v), a in self.pair_attr.items():
            codes[u][a], codes[v][a] = 0, 1
        if self.color_attr is not None:
            for j, c in enumerate(colors):
                codes[j][self.color_attr] = c
        return Encoding.from_dicts(codes)

    def bookkeeping(self):
        return {
            "colors": self.k,
            "non_edge_attributes": [[u + 1, v + 1, a + 1] for (u, v), a in sorted(self.pair_attr.items())],
            "color_attribute": None if self.color_attr is None else self.color_attr + 1,
        }


def coloring_to_pc(g: Graph, k: Optional[int] = None):
    """One binary attribute per non-edge, held by its two endpoints, plus one range-k attribute on all.

    A single color needs no color attribute (a range-1 attribute separates
    nothing), so for k = 1 it is omitted.
    """
    k = g.colors if k is None else k
    if k is None or k < 1:
        raise InvalidArgument("coloring_to_pc needs a color budget k >= 1")
    pair_attr = {}
    symbols = [[] for _ in range(g.n)]
    for u, v in g.non_edges():
        pair_attr[(u, v)] = len(pair_attr)
        symbols[u].append(pair_attr[(u, v)])
        symbols[v].append(pair_attr[(u, v)])
    ranges = [2] * len(pair_attr)
    color_attr = None
    if k >= 2:
        color_attr = len(ranges)
        ranges.append(k)
        for s in symbols:
            s.append(color_attr)
    target = PcInstance(tuple(ranges), tuple(tuple(s) for s in symbols))
    return target, ColoringToPc(g, target, k, pair_attr, color_attr, {"colors": k})


# -- randomized clique cover --------------------------------------------------


def cover_size(n: int, c: int) -> int:
    """Least m with (1 - p_e)**m < 1/n**2 for p = 1/(c+1), p_e = p**2 (1-p)**(2c), exactly."""
    p = Fraction(1, c + 1)
    pe = p * p * (1 - p) ** (2 * c)
    bound = Fraction(1, max(n, 1) ** 2)
    q = 1 - pe
    if q == 0:
        return 1
    m = max(1, int(math.log(float(bound)) / math.log(float(q))) - 2)
    while q**m >= bound:
        m += 1
    while m > 1 and q ** (m - 1) < bound:
        m -= 1
    return m


def sample_cover(g: Graph, c: int, m: int, seed: int, max_rounds: int = CLIQUE_COVER_ROUNDS):
    """Draw m independent sets per round until they cover every non-edge.

    Each node joins a set with probability 1/(c+1); the set is then thinned
    by scanning nodes in index order and dropping any node adjacent to an
    already kept one.  Round r draws from ``SeedSequence([seed, r])``.

    Returns ``(sets, rounds)`` with sets as an ``(m, n)`` bool array.
    """
    n = g.n
    adj = g.adjacency_matrix()
    non_edge = ~adj
    np.fill_diagonal(non_edge, False)
    p = 1.0 / (c + 1)
    for r in range(max_rounds):
        rng = np.random.default_rng(np.random.SeedSequence([seed % 2**64, r]))
        sampled = rng.random((m, n)) < p
        kept = kernels.thin_independent(sampled, adj)
        s = kept.astype(np.int64)
        covered = (s.T @ s) > 0
        if not (non_edge & ~covered).any():
            return kept, r + 1
    raise ResourceLimit(f"no complete cover within {max_rounds} rounds")


class CliqueCover(Certificate):
    name = "clique-cover"

    def __init__(self, source, target, sets, rounds, width, color_bits, params=None):
        super().__init__(source, target, params)
        self.sets = sets  # list of sorted node tuples
        self.rounds = rounds
        self.width = width  # bits per cover attribute
        self.color_bits = color_bits  # (high, low) attribute indices
        self.universal = source.n

    def set_bits(self, r):
        return list(range(r * self.width, (r + 1) * self.width))

    def back_map(self, enc: Encoding) -> Coloring:
        codes = _codes(enc, self.source.n + 1)
        hi, lo = self.color_bits
        four = [2 * c[hi] + c[lo] for c in codes]
        u = four[self.universal]
        palette = sorted(set(range(4)) - {u})
        rank = {c: i for i, c in enumerate(palette)}
        out = []
        for v in range(self.source.n):
            if four[v] not in rank:
                raise ValidationError(f"node {v + 1} shares the universal node's color; encoding is infeasible")
            out.append(rank[four[v]])
        return Coloring(tuple(out))

    def forward_map(self, colors) -> Encoding:
        if not verify_coloring(self.source, colors, 3):
            raise ValidationError("not a proper 3-coloring")
        colors = colors.colors if isinstance(colors, Coloring) else tuple(colors)
        four = list(colors) + [3]
        hi, lo = self.color_bits
        codes = [{hi: c >> 1, lo: c & 1} for c in four]
        w = self.width
        for r, members in enumerate(self.sets):
            for v in members:
                for pos, a in enumerate(self.set_bits(r)):
                    codes[v][a] = (v >> (w - 1 - pos)) & 1
        return Encoding.from_dicts(codes)

    def bookkeeping(self):
        return {
            "rounds": self.rounds,
            "sets": [[v + 1 for v in s] for s in self.sets],
            "bits_per_set": self.width,
            "universal_node": self.universal + 1,
            "color_attributes": [a + 1 for a in self.color_bits],
        }


def clique_cover_reduction(g: Graph, c: Optional[int] = None, seed: int = 0,
                           max_rounds: int = CLIQUE_COVER_ROUNDS):
    """3-coloring of a degree-bounded graph -> binary PC with few attributes.

    The graph gets a universal node (3-colorable iff the result is
    4-colorable).  A random edge clique cover of the complement (independent
    sets of the graph; the universal node has no non-edges) gives one
    attribute of range n' = least power of two above n per set, held by the
    set's nodes; a range-4 color attribute is held by everyone.  Ranges are
    powers of two, so writing each attribute in binary needs no blocking
    symbols: m * log2(n') + 2 binary attributes in total.
    """
    c = g.max_degree() if c is None else c
    if c < 0:
        raise InvalidArgument("degree bound must be non-negative")
    if g.max_degree() > c:
        raise ValidationError(f"graph has maximum degree {g.max_degree()} > {c}")
    n = g.n
    m = cover_size(n, c)
    kept, rounds = sample_cover(g, c, m, seed, max_rounds)
    width = n.bit_length()  # 2**width is the least power of two > n
    sets = [tuple(int(v) for v in np.flatnonzero(row)) for row in kept]
    symbols = [[] for _ in range(n + 1)]
    for r, members in enumerate(sets):
        for v in members:
            symbols[v].extend(range(r * width, (r + 1) * width))
    color_bits = (m * width, m * width + 1)
    for s in symbols:
        s.extend(color_bits)
    target = PcInstance((2,) * (m * width + 2), tuple(tuple(s) for s in symbols))
    params = {"c": c, "seed": seed, "max_rounds": max_rounds}
    return target, CliqueCover(g, target, sets, rounds, width, color_bits, params)


# -- density-1 augmentation ---------------------------------------------------


class Densify(Certificate):
    name = "densify"

    def back_map(self, sched: Schedule) -> Schedule:
        if sched.timeline is None:
            raise ValidationError("expected a timeline schedule")
        periods = self.source.periods()
        first = {}
        for t, slot in enumerate(sched.timeline):
            for j in slot:
                first.setdefault(j, t)
        missing = [j for j in range(len(periods)) if j not in first]
        if missing:
            raise ValidationError(f"job {missing[0] + 1} never runs")
        return Schedule(tuple(first[j] % p for j, p in enumerate(periods)))

    def forward_map(self, sched: Schedule) -> Schedule:
        periods = self.source.periods()
        starts = _starts(sched, len(periods))
        q = self.target.hyperperiod()
        slots: list[list[int]] = [[] for _ in range(q)]
        for j, (t, p) in enumerate(zip(starts, periods)):
            for x in range(t, q, p):
                slots[x].append(j)
        filler = iter(range(len(periods), self.target.n_jobs))
        for slot in slots:
            if not slot:
                slot.append(next(filler))
        return Schedule(timeline=tuple(tuple(s) for s in slots))

    def bookkeeping(self):
        extra = self.target.jobs[-1] if len(self.target.jobs) > len(self.source.jobs) else None
        return {
            "hyperperiod": self.target.hyperperiod(),
            "added_jobs": 0 if extra is None else extra.multiplicity,
        }


def densify_inexact(inst: WsInstance) -> WsInstance:
    """Pad to density exactly 1 with r = q - sum(q / p_j) jobs of period q = lcm.

    At density 1 every window must be tight, so the inexact-period result is
    feasible iff the exact-period input is.  The padding is one compact entry.
    """
    _require_unit_exact(inst)
    if inst.machines != 1:
        raise InvalidArgument("densify_inexact is for a single machine")
    if density(inst) > 1:
        raise ValidationError(f"density {density(inst)} exceeds 1")
    q = inst.hyperperiod()
    r = q - sum(j.multiplicity * (q // j.period) for j in inst.jobs)
    jobs = inst.jobs + ((Job(q, 1, r),) if r > 0 else ())
    return WsInstance(jobs, 1, periods_exact=False, migration_allowed=False)


def _densify(inst: WsInstance):
    target = densify_inexact(inst)
    return target, Densify(inst, target)


# -- k-ary coding from independent set ----------------------------------------


class IndependentSetToKary(Certificate):
    """Symbols are nodes, attributes are edges (distinct prime ranges)."""

    name = "independent-set-to-kary"

    def __init__(self, source, target, edges, params=None):
        super().__init__(source, target, params)
        self.edges = edges  # attribute index -> (u, v)

    def canonical_encoding(self) -> Encoding:
        """Separates every adjacent pair; feasible iff any encoding is."""
        codes = [dict() for _ in range(self.source.n)]
        for a, (u, v) in enumerate(self.edges):
            codes[u][a], codes[v][a] = 0, 1
        return Encoding.from_dicts(codes)

    def back_map(self, witness: Sequence[int]) -> tuple[int, ...]:
        """Pairwise indistinguishable symbols under the canonical encoding -> an independent set."""
        nodes = tuple(sorted(witness))
        if any((u, v) in self.source.edges for i, u in enumerate(nodes) for v in nodes[i + 1:]):
            raise ValidationError("witness symbols are not pairwise indistinguishable")
        return nodes

    def forward_map(self, independent: Sequence[int]) -> tuple[int, ...]:
        return self.back_map(independent)

    def bookkeeping(self):
        return {"edge_attributes": [[u + 1, v + 1] for u, v in self.edges]}


def independent_set_to_kary_pc(g: Graph, k: int):
    """k-ary feasible iff the graph has no independent set of size k + 1.

    Ranges are the first |E| primes, one per edge attribute, so the result is
    also a k-machine WS instance with migration via :func:`prime_pc_to_ws`.
    """
    if k < 1:
        raise InvalidArgument("arity must be >= 1")
    edges = sorted(g.edges)
    ranges = first_primes(len(edges))
    symbols = [[] for _ in range(g.n)]
    for a, (u, v) in enumerate(edges):
        symbols[u].append(a)
        symbols[v].append(a)
    target = PcInstance(tuple(ranges), tuple(tuple(s) for s in symbols), k)
    return target, IndependentSetToKary(g, target, edges, {"k": k})


# -- registry -----------------------------------------------------------------


def _with_params(fn, **fixed):
    return lambda source, **params: fn(source, **{**fixed, **params})


REDUCTIONS = {
    "ws-to-pc": (WsInstance, lambda s: ws_to_pc(s)),
    "pc-to-bpc": (PcInstance, lambda s: pc_to_bpc(s)),
    "bpc-to-ws": (PcInstance, lambda s: bpc_to_ws(s)),
    "pc-to-ws": (PcInstance, lambda s: pc_to_ws(s)),
    "multimachine-to-single": (WsInstance, lambda s: multimachine_to_single(s)),
    "coloring-to-pc": (Graph, lambda s, colors=None: coloring_to_pc(s, colors)),
    "clique-cover": (Graph, lambda s, c=None, seed=0, max_rounds=CLIQUE_COVER_ROUNDS:
                     clique_cover_reduction(s, c, seed, max_rounds)),
    "densify": (WsInstance, lambda s: _densify(s)),
    "independent-set-to-kary": (Graph, lambda s, k=1: independent_set_to_kary_pc(s, k)),
}


def run_reduction(name: str, source, **params):
    """Run a registered reduction by name; returns ``(target, certificate)``."""
    if name not in REDUCTIONS:
        raise InvalidArgument(f"unknown reduction {name!r}; expected one of {sorted(REDUCTIONS)}")
    kind, fn = REDUCTIONS[name]
    if not isinstance(source, kind):
        raise InvalidArgument(f"{name} expects a {kind.__name__}, got {type(source).__name__}")
    try:
        target, cert = fn(source, **params)
    except TypeError as exc:
        raise InvalidArgument(f"bad parameters for {name}: {exc}") from None
    cert.params = {**cert.params, **params}
    cert.name = name if cert.name in ("", "identity") else cert.name
    return target, cert
