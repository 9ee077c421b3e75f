"""Canonical text documents for instances, solutions and certificates.

A document is a UTF-8 JSON object with a top-level ``kind``.  Indices are
1-based, integers are arbitrary-precision decimal literals, unknown keys are
rejected.  ``serialize`` always emits the canonical layout: one top-level key
per line in a fixed order, list items that are themselves lists or objects on
their own lines.  See ``docs/format.md`` for the grammar.
"""

from __future__ import annotations

import json
from typing import Any

from .errors import DocumentError, ValidationError
from .instances import Coloring, Encoding, Graph, Job, PcInstance, Schedule, WsInstance

KINDS = ("ws", "pc", "graph", "schedule", "encoding", "coloring", "certificate")


# -- low level ----------------------------------------------------------------


def _no_duplicates(pairs):
    out = {}
    for k, v in pairs:
        if k in out:
            raise DocumentError(f"duplicate key {k!r}")
        out[k] = v
    return out


def _reject_float(text):
    raise DocumentError(f"non-integer number literal {text!r}")


def loads(text: str) -> dict:
    try:
        obj = json.loads(
            text,
            object_pairs_hook=_no_duplicates,
            parse_float=_reject_float,
            parse_constant=_reject_float,
        )
    except json.JSONDecodeError as exc:
        raise DocumentError(f"syntax error: {exc.msg}", line=exc.lineno, column=exc.colno) from None
    except ValueError as exc:
        if isinstance(exc, DocumentError):
            raise
        # int() refuses literals above the interpreter's digit limit
        raise DocumentError(f"integer literal too large: {exc}") from None
    if not isinstance(obj, dict):
        raise DocumentError("document must be a JSON object")
    return obj


def dumps(obj: dict) -> str:
    lines = []
    for key, value in obj.items():
        head = f"  {json.dumps(key)}: "
        if isinstance(value, list) and value and isinstance(value[0], (list, dict)):
            inner = ",\n".join("    " + _compact(v) for v in value)
            lines.append(f"{head}[\n{inner}\n  ]")
        else:
            lines.append(head + _compact(value))
    return "{\n" + ",\n".join(lines) + "\n}\n"


def _compact(v) -> str:
    return json.dumps(v, separators=(", ", ": "), ensure_ascii=False)


# -- field access with positioned errors ----------------------------------------


class _Reader:
    def __init__(self, obj: dict, path: str, allowed, required):
        if not isinstance(obj, dict):
            raise DocumentError("expected an object", path=path or "<root>")
        self.obj = obj
        self.path = path
        extra = set(obj) - set(allowed)
        if extra:
            raise DocumentError(f"unknown key {sorted(extra)[0]!r}", path=path or "<root>")
        for k in required:
            if k not in obj:
                raise DocumentError(f"missing key {k!r}", path=path or "<root>")

    def at(self, key):
        return f"{self.path}.{key}" if self.path else key

    def int(self, key, default=None, lo=None):
        if key not in self.obj:
            return default
        return _int(self.obj[key], self.at(key), lo)

    def bool(self, key, default):
        v = self.obj.get(key, default)
        if not isinstance(v, bool):
            raise DocumentError("expected true or false", path=self.at(key))
        return v

    def list(self, key):
        v = self.obj[key]
        if not isinstance(v, list):
            raise DocumentError("expected a list", path=self.at(key))
        return v


def _int(v, path, lo=None):
    if isinstance(v, bool) or not isinstance(v, int):
        raise DocumentError(f"expected an integer, got {v!r}", path=path)
    if lo is not None and v < lo:
        raise DocumentError(f"expected an integer >= {lo}, got {v}", path=path)
    return v


def _int_list(v, path, lo=None):
    if not isinstance(v, list):
        raise DocumentError("expected a list", path=path)
    return [_int(x, f"{path}[{i}]", lo) for i, x in enumerate(v)]


# -- per kind -----------------------------------------------------------------


def _parse_ws(obj, path=""):
    r = _Reader(obj, path, ("kind", "machines", "periods_exact", "migration_allowed", "jobs"), ("jobs",))
    jobs = []
    for i, j in enumerate(r.list("jobs")):
        jr = _Reader(j, f"{r.at('jobs')}[{i}]", ("period", "length", "multiplicity"), ("period",))
        jobs.append(Job(jr.int("period", lo=1), jr.int("length", 1, lo=1), jr.int("multiplicity", 1, lo=1)))
    return WsInstance(
        tuple(jobs),
        machines=r.int("machines", 1, lo=1),
        periods_exact=r.bool("periods_exact", True),
        migration_allowed=r.bool("migration_allowed", False),
    )


def _dump_ws(inst: WsInstance) -> dict:
    return {
        "kind": "ws",
        "machines": inst.machines,
        "periods_exact": inst.periods_exact,
        "migration_allowed": inst.migration_allowed,
        "jobs": [{"period": j.period, "length": j.length, "multiplicity": j.multiplicity} for j in inst.jobs],
    }


def _parse_pc(obj, path=""):
    r = _Reader(obj, path, ("kind", "arity", "ranges", "symbols"), ("ranges", "symbols"))
    ranges = _int_list(r.list("ranges"), r.at("ranges"), lo=2)
    symbols = []
    for j, s in enumerate(r.list("symbols")):
        idx = _int_list(s, f"{r.at('symbols')}[{j}]", lo=1)
        for k, i in enumerate(idx):
            if i > len(ranges):
                raise DocumentError(
                    f"attribute {i} outside 1..{len(ranges)}", path=f"{r.at('symbols')}[{j}][{k}]"
                )
        if len(set(idx)) != len(idx):
            raise DocumentError("repeated attribute in symbol", path=f"{r.at('symbols')}[{j}]")
        symbols.append(tuple(i - 1 for i in idx))
    return PcInstance(tuple(ranges), tuple(symbols), r.int("arity", 1, lo=1))


def _dump_pc(inst: PcInstance) -> dict:
    return {
        "kind": "pc",
        "arity": inst.arity,
        "ranges": list(inst.ranges),
        "symbols": [[i + 1 for i in s] for s in inst.symbols],
    }


def _parse_graph(obj, path=""):
    r = _Reader(obj, path, ("kind", "nodes", "edges", "colors"), ("nodes", "edges"))
    n = r.int("nodes", lo=0)
    edges = set()
    for k, e in enumerate(r.list("edges")):
        p = f"{r.at('edges')}[{k}]"
        uv = _int_list(e, p, lo=1)
        if len(uv) != 2:
            raise DocumentError("an edge is a pair of nodes", path=p)
        u, v = uv
        if u == v:
            raise DocumentError("self-loop", path=p)
        if u > n or v > n:
            raise DocumentError(f"node outside 1..{n}", path=p)
        edges.add((min(u, v) - 1, max(u, v) - 1))
    return Graph(n, frozenset(edges), r.int("colors", None, lo=1))


def _dump_graph(g: Graph) -> dict:
    out = {"kind": "graph", "nodes": g.n}
    if g.colors is not None:
        out["colors"] = g.colors
    out["edges"] = [[u + 1, v + 1] for u, v in sorted(g.edges)]
    return out


def _parse_schedule(obj, path=""):
    r = _Reader(obj, path, ("kind", "start_times", "timeline", "machines", "instance"), ())
    if ("start_times" in obj) == ("timeline" in obj):
        raise DocumentError("exactly one of start_times or timeline is required", path=path or "<root>")
    starts = timeline = assignment = None
    if "start_times" in obj:
        starts = tuple(_int_list(r.list("start_times"), r.at("start_times"), lo=0))
    else:
        timeline = tuple(
            tuple(j - 1 for j in _int_list(slot, f"{r.at('timeline')}[{t}]", lo=1))
            for t, slot in enumerate(r.list("timeline"))
        )
    if "machines" in obj:
        assignment = tuple(m - 1 for m in _int_list(r.list("machines"), r.at("machines"), lo=1))
    inst = _parse_ws(obj["instance"], r.at("instance")) if "instance" in obj else None
    return Schedule(starts, timeline, assignment), inst


def _dump_schedule(s: Schedule, instance=None) -> dict:
    out: dict[str, Any] = {"kind": "schedule"}
    if s.start_times is not None:
        out["start_times"] = list(s.start_times)
    else:
        out["timeline"] = [[j + 1 for j in slot] for slot in s.timeline]
    if s.assignment is not None:
        out["machines"] = [m + 1 for m in s.assignment]
    if instance is not None:
        out["instance"] = _dump_ws(instance)
    return out


def _parse_encoding(obj, path=""):
    r = _Reader(obj, path, ("kind", "codes", "instance"), ("codes",))
    codes = []
    for j, code in enumerate(r.list("codes")):
        p = f"{r.at('codes')}[{j}]"
        if not isinstance(code, list):
            raise DocumentError("expected a list of [attribute, value] pairs", path=p)
        pairs = {}
        for k, pair in enumerate(code):
            av = _int_list(pair, f"{p}[{k}]", lo=0)
            if len(av) != 2 or av[0] < 1:
                raise DocumentError("expected [attribute >= 1, value >= 0]", path=f"{p}[{k}]")
            if av[0] - 1 in pairs:
                raise DocumentError(f"attribute {av[0]} assigned twice", path=f"{p}[{k}]")
            pairs[av[0] - 1] = av[1]
        codes.append(tuple(pairs.items()))
    inst = _parse_pc(obj["instance"], r.at("instance")) if "instance" in obj else None
    return Encoding(tuple(codes)), inst


def _dump_encoding(e: Encoding, instance=None) -> dict:
    out: dict[str, Any] = {"kind": "encoding", "codes": [[[a + 1, v] for a, v in c] for c in e.codes]}
    if instance is not None:
        out["instance"] = _dump_pc(instance)
    return out


def _parse_coloring(obj, path=""):
    r = _Reader(obj, path, ("kind", "colors", "instance"), ("colors",))
    colors = _int_list(r.list("colors"), r.at("colors"), lo=0)
    inst = _parse_graph(obj["instance"], r.at("instance")) if "instance" in obj else None
    return Coloring(tuple(colors)), inst


def _dump_coloring(c: Coloring, instance=None) -> dict:
    out: dict[str, Any] = {"kind": "coloring", "colors": list(c.colors)}
    if instance is not None:
        out["instance"] = _dump_graph(instance)
    return out


# -- public -------------------------------------------------------------------


def to_dict(value, instance=None) -> dict:
    if isinstance(value, WsInstance):
        return _dump_ws(value)
    if isinstance(value, PcInstance):
        return _dump_pc(value)
    if isinstance(value, Graph):
        return _dump_graph(value)
    if isinstance(value, Schedule):
        return _dump_schedule(value, instance)
    if isinstance(value, Encoding):
        return _dump_encoding(value, instance)
    if isinstance(value, Coloring):
        return _dump_coloring(value, instance)
    if hasattr(value, "to_dict"):
        return value.to_dict()
    raise TypeError(f"cannot serialize {type(value).__name__}")


def from_dict(obj: dict, path: str = ""):
    """Parse an already-decoded document; returns ``(value, embedded_instance)``."""
    if not isinstance(obj, dict):
        raise DocumentError("expected an object", path=path or "<root>")
    kind = obj.get("kind")
    if kind not in KINDS:
        raise DocumentError(f"unknown or missing kind {kind!r}", path=(f"{path}.kind" if path else "kind"))
    try:
        if kind == "ws":
            return _parse_ws(obj, path), None
        if kind == "pc":
            return _parse_pc(obj, path), None
        if kind == "graph":
            return _parse_graph(obj, path), None
        if kind == "schedule":
            return _parse_schedule(obj, path)
        if kind == "encoding":
            return _parse_encoding(obj, path)
        if kind == "coloring":
            return _parse_coloring(obj, path)
        from .reduce import Certificate

        return Certificate.from_dict(obj), None
    except ValidationError as exc:
        raise DocumentError(f"invariant violation: {exc}", path=path or "<root>") from None


def parse_bundle(text: str):
    """Parse a document and return ``(value, embedded_instance_or_None)``."""
    return from_dict(loads(text))


def parse(text: str):
    return parse_bundle(text)[0]


def serialize(value, instance=None) -> str:
    return dumps(to_dict(value, instance))
