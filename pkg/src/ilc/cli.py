"""Command-line interface.

Exit codes: 0 success / equivalent / holds, 1 definite negative,
2 unknown (fuel or budget), 3 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from .coherence import coh_violation
from .equivalence import (
    DEFAULT_DOMAIN, DEFAULT_FUEL, Equivalent, Inequivalent, bisim, format_verdict,
    trace_equiv, traces,
)
from .frontend import ParseError, ParseResult, format_term, parse
from .fuzz import CHECKS, CheckParams, fuzz
from .gen import GenConfig
from .liveness import IllFormed, live_check, live_infer
from .pipeline import compile_program
from .rassign import PreconditionError, rassign
from .renaming import OrderedFresh, alpha_check, apart_check, fresh, rename_apart, reserved_fresh
from .semantics import FConfig, IConfig, fixed_oracle, run, scripted_oracle, seeded_oracle
from .syntax import EMPTY_CTX, Env, Fun, IDENTITY, Term, free_vars, iter_terms, occ_vars, rename, subterms, var

OK, NEGATIVE, UNKNOWN, USAGE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        raise UsageError(message)


# ---------------------------------------------------------------------------
# helpers


def _read(path: str) -> tuple[str, ParseResult]:
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    try:
        return path, parse(text)
    except ParseError as e:
        raise _Diag(f"{path}:{e.line}:{e.col}: {e.message}")


class _Diag(Exception):
    """A diagnostic that ends the command with exit code 3."""


def _env(pairs: Sequence[str]) -> Env:
    out = {}
    for item in pairs or ():
        name, sep, value = item.partition("=")
        try:
            out[var(name.strip())] = int(value)
        except ValueError:
            sep = ""
        if not sep or not name.strip():
            raise UsageError(f"bad --env binding {item!r}; expected NAME=INT")
    return Env(out)


def _ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}")


def _config(mode: str, s: Term, env: Env):
    return (IConfig if mode == "i" else FConfig)(EMPTY_CTX, env, s)


def _write(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def _verdict_code(v) -> int:
    if isinstance(v, Equivalent):
        return OK
    if isinstance(v, Inequivalent):
        return NEGATIVE
    return UNKNOWN


def _matching(orig: Term, new: Term, target: Term) -> Optional[Term]:
    """Subterm of ``orig`` at the position ``target`` occupies in the same-shaped ``new``."""
    if new is target:
        return orig
    for o, n in zip(subterms(orig), subterms(new)):
        hit = _matching(o, n, target)
        if hit is not None:
            return hit
    return None


# ---------------------------------------------------------------------------
# commands


def cmd_parse(args) -> int:
    _, pr = _read(args.file)
    print(repr(pr.term))
    return OK


def cmd_print(args) -> int:
    _, pr = _read(args.file)
    print(format_term(pr.term, pr.ann))
    return OK


def _oracle(args):
    if args.extern_script is not None:
        return scripted_oracle(_ints(args.extern_script))
    if args.extern_seed is not None:
        return seeded_oracle(args.extern_seed)
    return fixed_oracle(0)


def _cmd_eval(args, mode: str) -> int:
    _, pr = _read(args.file)
    r = run(_config(mode, pr.term, _env(args.env)), args.fuel, _oracle(args))
    for v, a in r.events:
        print(f"{a}? {v}", file=sys.stderr)
    if r.status == "terminal":
        print("bot" if r.value is None else r.value)
        return OK if r.value is not None else NEGATIVE
    print(f"unknown ({'fuel exhausted' if r.status == 'fuel' else 'extern script exhausted'} after {r.steps} steps)")
    return UNKNOWN


def cmd_traces(args) -> int:
    _, pr = _read(args.file)
    ts = traces(_config(args.mode, pr.term, _env(args.env)), args.fuel, _ints(args.domain))
    if not ts.complete:
        print("unknown (trace budget exceeded)")
        return UNKNOWN
    for t in sorted(ts.traces, key=lambda t: t._sort_key()):
        print(t)
    return OK


def _pair(args):
    _, p1 = _read(args.left_file)
    _, p2 = _read(args.right_file)
    env = _env(args.env)
    return _config(args.left, p1.term, env), _config(args.right, p2.term, env)


def cmd_equiv(args) -> int:
    c1, c2 = _pair(args)
    v = trace_equiv(c1, c2, args.fuel, _ints(args.domain))
    print(format_verdict(v))
    return _verdict_code(v)


def cmd_bisim(args) -> int:
    c1, c2 = _pair(args)
    v = bisim(c1, c2, args.fuel, _ints(args.domain))
    print(format_verdict(v))
    return _verdict_code(v)


def cmd_live(args) -> int:
    path, pr = _read(args.file)
    if args.action == "infer":
        try:
            lr = live_infer(pr.term)
        except IllFormed as e:
            raise _Diag(f"{path}:1:1: {e}")
        print(format_term(lr.term, lr.ann))
        return OK
    if pr.ann is None:
        raise _Diag(f"{path}:1:1: 'live check' needs an @{{..}} annotation on every subterm")
    if any(isinstance(t, Fun) and t.globals is None for t in iter_terms(pr.term)):
        raise _Diag(f"{path}:1:1: 'live check' needs a globals clause on every function")
    ok = live_check(EMPTY_CTX, pr.ann.live, pr.term, pr.ann)
    print("holds" if ok else "fails")
    return OK if ok else NEGATIVE


def cmd_coh(args) -> int:
    path, pr = _read(args.file)
    s = pr.term
    if any(isinstance(t, Fun) and t.globals is None for t in iter_terms(s)):
        try:
            s = live_infer(s).term
        except IllFormed as e:
            raise _Diag(f"{path}:1:1: {e}")
    bad = coh_violation(EMPTY_CTX, s, pr.ann)
    if bad is None:
        print("coherent")
        return OK
    where = _matching(pr.term, s, bad)
    line, col = pr.position(where) if where is not None else (1, 1)
    print(f"{path}:{line}:{col}: not coherent: {format_term(bad).splitlines()[0]}")
    return NEGATIVE


def cmd_rename_apart(args) -> int:
    _, pr = _read(args.file)
    fv = free_vars(pr.term)
    policy = reserved_fresh if args.fresh == "reserved" else fresh
    r = rename_apart(IDENTITY, fv, pr.term, policy)
    _write(format_term(r.term), args.output)
    return OK


def cmd_alpha_eq(args) -> int:
    _, p1 = _read(args.left_file)
    _, p2 = _read(args.right_file)
    ok = alpha_check(p1.term, p2.term) is not None
    print("alpha-equivalent" if ok else "not alpha-equivalent")
    return OK if ok else NEGATIVE


def cmd_rassign(args) -> int:
    path, pr = _read(args.file)
    s = pr.term
    fv = free_vars(s)
    if apart_check(fv, s) is None:
        s = rename_apart(IDENTITY, fv, s).term
    try:
        lr = live_infer(s)
    except IllFormed as e:
        raise _Diag(f"{path}:1:1: {e}")
    policy = {"ordered": OrderedFresh(sorted(fv)), "smallest": fresh, "reserved": reserved_fresh}[args.fresh]
    try:
        rho = rassign(IDENTITY, lr.term, lr.ann, policy)
    except PreconditionError as e:
        print(f"precondition failed: {e}")
        return NEGATIVE
    for x in sorted(occ_vars(lr.term)):
        print(f"{x} -> {rho(x)}")
    print()
    print(format_term(rename(rho, lr.term)))
    return OK


def cmd_compile(args) -> int:
    _, pr = _read(args.file)
    rep = compile_program(pr.term, prune=args.prune, raise_on_failure=False)
    if args.json:
        print(json.dumps(rep.as_dict(), indent=2))
    elif rep.ok:
        _write(format_term(rep.output), args.output)
        print(f"// k = {rep.k}, names = {rep.names}", file=sys.stderr)
    else:
        failed = next(st for st in rep.stages if not st.verdict)
        print(f"stage {failed.name} failed: {failed.witness}")
    if args.json and args.output and rep.ok:
        Path(args.output).write_text(format_term(rep.output) + "\n")
    return OK if rep.ok else NEGATIVE


def cmd_fuzz(args) -> int:
    gen = GenConfig(depth=args.depth, inputs=args.inputs)
    params = CheckParams(fuel=args.fuel, domain=_ints(args.domain))
    seeds = range(args.start, args.start + args.seeds)
    names = list(CHECKS) if args.check == "all" else [args.check]
    corpus = Path(args.corpus) if args.corpus else None
    reports = [fuzz(n, seeds, gen, params, jobs=args.jobs, corpus=corpus) for n in names]
    if args.json:
        print(json.dumps([r.as_dict() for r in reports], indent=2))
    else:
        for r in reports:
            print(f"{r.check}: {r.seeds - len(r.failures)}/{r.seeds} ok")
            for f in r.failures:
                print(f"  seed {f.seed}: {f.message}")
                for line in f.shrunk.splitlines():
                    print(f"    {line}")
    return OK if all(r.ok for r in reports) else NEGATIVE


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ilc", description="IL interpreter, equivalence checker and register-assignment compiler.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def file_cmd(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("file", help="program file ('-' for stdin)")
        sp.set_defaults(fn=fn)
        return sp

    def run_flags(sp, fuel):
        sp.add_argument("--env", action="append", default=[], metavar="NAME=INT",
                        help="bind a free variable (repeatable)")
        sp.add_argument("--fuel", type=int, default=fuel)

    file_cmd("parse", cmd_parse, "parse and print the abstract syntax")
    file_cmd("print", cmd_print, "parse and pretty-print")
    for name, mode in (("eval-f", "f"), ("eval-i", "i")):
        sp = file_cmd(name, lambda a, m=mode: _cmd_eval(a, m),
                      f"run under the {'functional' if mode == 'f' else 'imperative'} semantics")
        run_flags(sp, 100_000)
        g = sp.add_mutually_exclusive_group()
        g.add_argument("--extern-script", metavar="V,V,...", help="answers for successive system calls")
        g.add_argument("--extern-seed", type=int, metavar="S", help="random answers from seed S")

    domain = ",".join(map(str, DEFAULT_DOMAIN))
    sp = file_cmd("traces", cmd_traces, "enumerate bounded partial traces")
    run_flags(sp, DEFAULT_FUEL)
    sp.add_argument("--domain", default=domain, metavar="V,V,...")
    sp.add_argument("--mode", choices=("f", "i"), default="f")

    for name, fn in (("equiv", cmd_equiv), ("bisim", cmd_bisim)):
        sp = sub.add_parser(name, help=f"bounded {'trace equivalence' if name == 'equiv' else 'bisimulation'}")
        sp.add_argument("left_file")
        sp.add_argument("right_file")
        run_flags(sp, DEFAULT_FUEL)
        sp.add_argument("--domain", default=domain, metavar="V,V,...")
        sp.add_argument("--left", choices=("f", "i"), default="f")
        sp.add_argument("--right", choices=("f", "i"), default="f")
        sp.set_defaults(fn=fn)

    sp = sub.add_parser("live", help="infer or check liveness annotations")
    sp.add_argument("action", choices=("infer", "check"))
    sp.add_argument("file")
    sp.set_defaults(fn=cmd_live)

    file_cmd("coh", cmd_coh, "check coherence (globals inferred where missing)")

    sp = file_cmd("rename-apart", cmd_rename_apart, "rename every binder apart")
    sp.add_argument("-o", "--output")
    sp.add_argument("--fresh", choices=("reserved", "smallest"), default="reserved")

    sp = sub.add_parser("alpha-eq", help="decide alpha-equivalence")
    sp.add_argument("left_file")
    sp.add_argument("right_file")
    sp.set_defaults(fn=cmd_alpha_eq)

    sp = file_cmd("rassign", cmd_rassign, "register assignment; prints the renaming and the result")
    sp.add_argument("--fresh", choices=("ordered", "smallest", "reserved"), default="ordered")

    sp = file_cmd("compile", cmd_compile, "run the checked translation pipeline")
    sp.add_argument("--json", action="store_true")
    sp.add_argument("--prune", action="store_true", help="drop never-applied functions first")
    sp.add_argument("-o", "--output")

    sp = sub.add_parser("fuzz", help="property checks on generated programs")
    sp.add_argument("--seeds", type=int, default=1000)
    sp.add_argument("--start", type=int, default=0)
    sp.add_argument("--depth", type=int, default=6)
    sp.add_argument("--inputs", type=int, default=2, help="free variables per program")
    sp.add_argument("--check", choices=(*CHECKS, "all"), default="all")
    sp.add_argument("--fuel", type=int, default=DEFAULT_FUEL)
    sp.add_argument("--domain", default=domain)
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--corpus", metavar="DIR", help="write shrunk counterexamples here")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(fn=cmd_fuzz)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.fn(args)
    except UsageError as e:
        print(f"ilc: error: {e}", file=sys.stderr)
        return USAGE
    except _Diag as e:
        print(e, file=sys.stderr)
        return USAGE
    except OSError as e:
        print(f"ilc: {e}", file=sys.stderr)
        return USAGE


def cli(argv: Optional[Sequence[str]] = None) -> int:
    return main(argv)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
