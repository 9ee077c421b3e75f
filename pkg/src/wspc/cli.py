"""Command-line front end.

Exit codes: 0 feasible / PASS, 1 infeasible / FAIL, 2 usage error,
3 resource limit, 4 malformed input.  Diagnostics go to standard error;
documents go to standard output.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional

from . import solve as solvers
from .documents import parse_bundle, serialize
from .errors import DocumentError, InvalidArgument, ResourceLimit, ValidationError
from .instances import GENERATOR_KINDS, Coloring, Encoding, Graph, PcInstance, Schedule, WsInstance, generate
from .reduce import REDUCTIONS, Certificate, IndependentSetToKary, run_reduction, verify_coloring
from .verify import Verdict, timeline_oracle, verify_encoding, verify_schedule

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_LIMIT, EXIT_MALFORMED = 0, 1, 2, 3, 4
DEFAULT_COLORS = 3


class UsageError(Exception):
    pass


# -- helpers shared with the test-suite ---------------------------------------


def solve_instance(inst, budget: int, colors: Optional[int] = None):
    """Dispatch to the matching brute-force solver; None means infeasible."""
    if isinstance(inst, WsInstance):
        if inst.periods_exact:
            return solvers.solve_ws_exact(inst, budget)
        return solvers.solve_ws_inexact(inst, budget)
    if isinstance(inst, PcInstance):
        return solvers.solve_pc(inst, budget)
    if isinstance(inst, Graph):
        k = colors or inst.colors or DEFAULT_COLORS
        found = solvers.solve_coloring(inst, k, budget)
        return None if found is None else Coloring(tuple(found))
    raise UsageError(f"cannot solve a {type(inst).__name__}")


def verify_solution(inst, sol, colors: Optional[int] = None) -> Verdict:
    if isinstance(inst, WsInstance) and isinstance(sol, Schedule):
        return verify_schedule(inst, sol) if inst.unit or sol.timeline is not None else timeline_oracle(inst, sol)
    if isinstance(inst, PcInstance) and isinstance(sol, Encoding):
        return verify_encoding(inst, sol)
    if isinstance(inst, Graph) and isinstance(sol, Coloring):
        k = colors or inst.colors or DEFAULT_COLORS
        if verify_coloring(inst, sol, k):
            return Verdict(True)
        bad = next(((u, v) for u, v in sorted(inst.edges) if sol.colors[u] == sol.colors[v]), ())
        return Verdict(False, bad, reason=f"not a proper {k}-coloring")
    raise ValidationError(f"a {type(sol).__name__} does not solve a {type(inst).__name__}")


def default_reduction(inst) -> str:
    if isinstance(inst, WsInstance):
        if not inst.periods_exact:
            raise UsageError("no reduction starts from inexact periods; pass --reduction")
        if inst.machines > 1 and not inst.migration_allowed:
            return "multimachine-to-single"
        return "ws-to-pc"
    if isinstance(inst, PcInstance):
        return "pc-to-bpc" if inst.arity == 1 else "none"
    return "coloring-to-pc"


def roundtrip(name: str, source, params: dict, budget: int) -> tuple[bool, list[str]]:
    """source -> target -> solve -> back-map -> verify.

    When the target is infeasible, the source must be infeasible too
    (checked by brute force).
    """
    target, cert = run_reduction(name, source, **params)
    log = [f"reduction {name}: target {_describe(target)}"]
    if isinstance(cert, IndependentSetToKary):
        return _roundtrip_kary(cert, target, log, budget)
    colors = getattr(cert, "k", None) or (3 if name == "clique-cover" else None)
    sol = solve_instance(target, budget)
    if sol is None:
        log.append("target infeasible")
        src = solve_instance(source, budget, colors)
        log.append("source infeasible" if src is None else "source feasible")
        return src is None, log
    log.append("target feasible")
    back = cert.back_map(sol)
    verdict = verify_solution(source, back, colors)
    log.append("back-mapped solution verified" if verdict else f"back-mapped solution rejected: {verdict.reason}")
    return verdict.feasible, log


def _roundtrip_kary(cert, target, log, budget):
    g = cert.source
    k = target.arity
    if solvers.solve_pc(target, budget) is not None:
        log.append(f"target {k}-ary feasible")
        ok = solvers.independent_set(g, k + 1) is None
        log.append(f"no independent set of size {k + 1}" if ok else f"unexpected independent set of size {k + 1}")
        return ok, log
    log.append(f"target {k}-ary infeasible")
    verdict = verify_encoding(target, cert.canonical_encoding())
    nodes = cert.back_map(verdict.witness)
    ok = len(nodes) == k + 1
    log.append(f"independent set {[v + 1 for v in nodes]}")
    return ok, log


def _describe(inst) -> str:
    if isinstance(inst, WsInstance):
        return f"ws with {inst.n_jobs} jobs, {inst.machines} machine(s)"
    if isinstance(inst, PcInstance):
        return f"pc with {inst.d} attributes, {inst.n} symbols, arity {inst.arity}"
    return f"graph with {inst.n} nodes, {len(inst.edges)} edges"


# -- io -----------------------------------------------------------------------


def _read(path: Optional[str]):
    if path in (None, "-"):
        text = sys.stdin.read()
    else:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    return parse_bundle(text)


def _write(path: str, text: str):
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from None


def _params(args) -> dict:
    out = {}
    name = args.reduction
    if name == "coloring-to-pc" and args.colors is not None:
        out["colors"] = args.colors
    if name == "clique-cover":
        out["seed"] = args.seed
        if args.degree is not None:
            out["c"] = args.degree
        if args.max_rounds is not None:
            out["max_rounds"] = args.max_rounds
    if name == "independent-set-to-kary":
        out["k"] = args.arity if args.arity is not None else 1
    return out


# -- subcommands --------------------------------------------------------------


def cmd_gen(args):
    params = {}
    for item in args.param:
        key, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"expected key=value, got {item!r}")
        params[key.replace("-", "_")] = tuple(int(v) for v in value.split(",")) if "," in value else value
    try:
        inst = generate(args.kind, args.seed, **params)
    except ValueError as exc:
        if isinstance(exc, InvalidArgument):
            raise
        raise UsageError(str(exc)) from None
    sys.stdout.write(serialize(inst))
    return EXIT_OK


def cmd_reduce(args):
    source, _ = _read(args.file)
    target, cert = run_reduction(args.reduction, source, **_params(args))
    sys.stdout.write(serialize(target))
    if args.cert_out:
        _write(args.cert_out, serialize(cert))
    return EXIT_OK


def cmd_solve(args):
    inst, _ = _read(args.file)
    if isinstance(inst, PcInstance) and args.arity is not None:
        inst = PcInstance(inst.ranges, inst.symbols, args.arity)
    sol = solve_instance(inst, args.budget, args.colors)
    if sol is None:
        print("infeasible", file=sys.stderr)
        return EXIT_FAIL
    sys.stdout.write(serialize(sol, inst))
    return EXIT_OK


def cmd_verify(args):
    sol, embedded = _read(args.file)
    inst = embedded
    if args.instance:
        inst, _ = _read(args.instance)
    if inst is None:
        raise UsageError("no instance: embed one in the document or pass --instance")
    expected = {"schedule": Schedule, "encoding": Encoding, "coloring": Coloring}[args.what]
    if not isinstance(sol, expected):
        raise UsageError(f"expected a {args.what} document")
    if args.what == "schedule" and args.timeline:
        if not isinstance(inst, WsInstance):
            raise UsageError("a schedule needs a ws instance")
        verdict = timeline_oracle(inst, sol, args.budget)
    else:
        verdict = verify_solution(inst, sol, args.colors)
    if verdict.feasible:
        print("feasible")
        return EXIT_OK
    where = "" if verdict.slot is None else f" at slot {verdict.slot}"
    print(f"infeasible{where}: {verdict.reason}; witness {' '.join(str(j + 1) for j in verdict.witness)}")
    return EXIT_FAIL


def cmd_convert(args):
    value, embedded = _read(args.file)
    if args.cert is None:
        sys.stdout.write(serialize(value, embedded))
        return EXIT_OK
    cert, _ = _read(args.cert)
    if not isinstance(cert, Certificate):
        raise UsageError("--cert must name a certificate document")
    if args.direction == "back":
        out, inst = cert.back_map(value), cert.source
    else:
        out, inst = cert.forward_map(value), cert.target
    if not isinstance(out, (Schedule, Encoding, Coloring)):
        raise UsageError(f"{cert.name} does not map to a solution document")
    sys.stdout.write(serialize(out, inst))
    return EXIT_OK


def cmd_roundtrip(args):
    source, _ = _read(args.file)
    if args.reduction is None:
        args.reduction = default_reduction(source)
    if args.reduction == "none":
        raise UsageError("pass --reduction for this instance")
    ok, log = roundtrip(args.reduction, source, _params(args), args.budget)
    for line in log:
        print(line)
    print("PASS" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_FAIL


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wspc", description="Windows scheduling and partial coding toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, file=True):
        if file:
            sp.add_argument("file", nargs="?", help="input document (default: standard input)")
        sp.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
        sp.add_argument("--budget", type=int, default=solvers.SEARCH_BUDGET,
                        help=f"search budget in nodes (default {solvers.SEARCH_BUDGET})")
        sp.add_argument("--arity", type=int, default=None, help="k for k-ary coding")
        sp.add_argument("--colors", type=int, default=None, help="color budget for graph inputs")

    def reduction_flags(sp, required):
        sp.add_argument("--degree", type=int, default=None, help="degree bound c for clique-cover")
        sp.add_argument("--max-rounds", type=int, default=None, help="retry cap for clique-cover (default 64)")
        if required:
            sp.add_argument("reduction", choices=sorted(REDUCTIONS))
        else:
            sp.add_argument("--reduction", choices=sorted(REDUCTIONS), default=None)

    g = sub.add_parser("gen", help="generate a seeded instance")
    g.add_argument("kind", choices=GENERATOR_KINDS)
    g.add_argument("param", nargs="*", help="generator parameters as key=value")
    common(g, file=False)
    g.set_defaults(func=cmd_gen)

    r = sub.add_parser("reduce", help="transform an instance; target on stdout")
    reduction_flags(r, required=True)
    common(r)
    r.add_argument("--cert-out", default=None, help="write the certificate document here")
    r.set_defaults(func=cmd_reduce)

    s = sub.add_parser("solve", help="brute-force solve an instance")
    common(s)
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", help="verify a solution document")
    v.add_argument("what", choices=("schedule", "encoding", "coloring"))
    common(v)
    v.add_argument("--instance", default=None, help="instance document if not embedded")
    v.add_argument("--timeline", action="store_true", help="use the hyperperiod simulation")
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("convert", help="canonicalize a document or map a solution through a certificate")
    common(c)
    c.add_argument("--cert", default=None, help="certificate document")
    c.add_argument("--direction", choices=("back", "forward"), default="back")
    c.set_defaults(func=cmd_convert)

    t = sub.add_parser("roundtrip", help="reduce, solve the target, map back and verify")
    common(t)
    reduction_flags(t, required=False)
    t.set_defaults(func=cmd_roundtrip)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args, extra = parser.parse_known_args(argv)
        # a file named after an option is left over when another positional precedes it
        if len(extra) == 1 and not extra[0].startswith("-") and getattr(args, "file", "") is None:
            args.file = extra[0]
        elif extra:
            parser.error(f"unrecognized arguments: {' '.join(extra)}")
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except DocumentError as exc:
        print(f"malformed input: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except ValidationError as exc:
        print(f"malformed input: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except ResourceLimit as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except (UsageError, InvalidArgument) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
