"""Coherence: the syntactic condition under which functional and imperative readings agree."""

from __future__ import annotations

from collections.abc import Mapping
from typing import Optional

from .liveness import GlobalsCtx, IllFormed, annotate, infer_globals, live_check
from .semantics import Closure
from .syntax import (
    Ann, App, Cofinite, Ctx, Fun, If, Let, Lit, Ret, Term, Var,
    ann_wellformed, ctx_restrict,
)

_PROBE_CONT = Ret(Lit(0))


def _without(x: Var) -> Cofinite:
    return Cofinite(frozenset((x,)))


def coh_violation(lam: GlobalsCtx, s: Term, a: Optional[Ann] = None) -> Optional[Term]:
    """First subterm at which the coherence rules fail, or ``None`` if ``s`` is coherent.

    ``lam`` maps available functions to their globals and everything else to
    ``None``.  Functions of ``s`` must carry globals annotations.
    """
    if a is not None and not ann_wellformed(s, a):
        return s
    match s:
        case Let(x, _, body):
            return coh_violation(ctx_restrict(lam, _without(x)), body, None)
        case Ret():
            return None
        case App(f, _):
            return None if lam.lookup(f) is not None else s
        case If(_, t, u):
            return coh_violation(lam, t, None) or coh_violation(lam, u, None)
        case Fun(f, _, body, cont, glob):
            if glob is None:
                return s
            inner = lam.push(f, glob)
            return (coh_violation(inner, cont, None)
                    or coh_violation(ctx_restrict(inner, glob), body, None))
    raise TypeError(f"not a term: {s!r}")


def coh_check(lam: GlobalsCtx, s: Term, a: Optional[Ann] = None) -> bool:
    return coh_violation(lam, s, a) is None


def approx(lam: GlobalsCtx, other: GlobalsCtx) -> bool:
    """``lam`` approximates ``other``: they agree wherever ``lam`` is defined."""
    return all(other.lookup(f) == lam.lookup(f) for f in lam.domain())


def _witness_ctx(ctx: Ctx[Closure], lam: GlobalsCtx, upto: int) -> GlobalsCtx:
    """Liveness assumptions for the first ``upto`` closures, agreeing with ``lam`` where defined.

    Undefined entries are filled with least globals inferred for the closure body.
    """
    out: GlobalsCtx = Ctx()
    for i in range(upto):
        (f, cl), (_, glob) = ctx.entries[i], lam.entries[i]
        if glob is None and cl is not None:
            probe = Fun(f, cl.params, cl.body, _PROBE_CONT, None)
            glob = infer_globals(out, probe).globals
        out = out.push(f, glob)
    return out


def coh_ctx_check(ctx: Ctx[Closure], lam: GlobalsCtx) -> bool:
    """All closure bodies in ``ctx`` are coherent with respect to ``lam``."""
    if len(ctx) != len(lam):
        return False
    for i in range(len(ctx) - 1, -1, -1):
        (f, cl), (g, glob) = ctx.entries[i], lam.entries[i]
        if f != g:
            return False
        if glob is None:
            continue
        if cl is None or not glob.isdisjoint(cl.params):
            return False
        here = lam.prefix(i + 1)
        if not coh_check(ctx_restrict(here, glob), cl.body):
            return False
        try:
            witness = _witness_ctx(ctx, lam, i).push(f, glob)
            a = annotate(witness, cl.body)
        except IllFormed:
            return False
        want = glob | set(cl.params)
        if not (a.live <= want and approx(here, witness)
                and live_check(witness, want, cl.body, Ann(want, a.children))):
            return False
    return True


def agree_check(ctx: Ctx[Closure], env: Mapping[Var, int], lam: GlobalsCtx) -> bool:
    """Closure environments agree with ``env`` on the globals of every available function."""
    for f in ctx.domain() & lam.domain():
        cl, glob = ctx.lookup(f), lam.lookup(f)
        if any(cl.env.get(x) != env.get(x) for x in glob):
            return False
    return True

