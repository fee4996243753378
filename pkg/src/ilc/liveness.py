"""Inductive liveness: checker, inference, context judgment and measurements."""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass

from .semantics import Block
from .syntax import (
    Ann, App, Ctx, EMPTY_CTX, Fun, If, Let, Ret, Term, Var,
    ann_wellformed, expr_vars, exprs_vars, occ_vars,
)

GlobalsCtx = Ctx[frozenset[Var]]


class IllFormed(ValueError):
    """Program violates a structural requirement of the analysis."""


def _live(lam: GlobalsCtx, s: Term, a: Ann) -> bool:
    X = a.live
    match s:
        case Let(x, rhs, body):
            (b,) = a.children
            return (expr_vars(rhs) <= X
                    and x in b.live
                    and b.live - {x} <= X
                    and _live(lam, body, b))
        case Ret(e):
            return expr_vars(e) <= X
        case App(f, args):
            glob = lam.lookup(f)
            return glob is not None and glob <= X and exprs_vars(args) <= X
        case If(e, t, u):
            b, c = a.children
            return (expr_vars(e) <= X and b.live <= X and c.live <= X
                    and _live(lam, t, b) and _live(lam, u, c))
        case Fun(f, params, body, cont, glob):
            if glob is None:
                return False
            b, c = a.children
            inner = lam.push(f, glob)
            return (glob.isdisjoint(params)
                    and b.live == glob | set(params)
                    and c.live <= X
                    and _live(inner, body, b)
                    and _live(inner, cont, c))
    raise TypeError(f"not a term: {s!r}")


def live_check(lam: GlobalsCtx, X: Iterable[Var], s: Term, a: Ann) -> bool:
    """Decide ``live lam |- X -> s`` with ``a`` supplying the live set of every subterm."""
    if not ann_wellformed(s, a) or a.live != frozenset(X):
        return False
    return _live(lam, s, a)


def annotate(lam: GlobalsCtx, s: Term) -> Ann:
    """Smallest live sets for ``s`` given the globals already recorded on its functions."""
    match s:
        case Let(x, rhs, body):
            b = annotate(lam, body)
            b = Ann(b.live | {x}, b.children)
            return Ann(expr_vars(rhs) | (b.live - {x}), (b,))
        case Ret(e):
            return Ann(expr_vars(e))
        case App(f, args):
            glob = lam.lookup(f)
            if glob is None:
                raise IllFormed(f"application of {f}, which has no globals in scope")
            return Ann(glob | exprs_vars(args))
        case If(e, t, u):
            b, c = annotate(lam, t), annotate(lam, u)
            return Ann(expr_vars(e) | b.live | c.live, (b, c))
        case Fun(f, params, body, cont, glob):
            if glob is None:
                raise IllFormed(f"function {f} has no globals annotation")
            inner = lam.push(f, glob)
            b = annotate(inner, body)
            b = Ann(b.live | glob | set(params), b.children)
            c = annotate(inner, cont)
            return Ann(c.live, (b, c))
    raise TypeError(f"not a term: {s!r}")


def infer_globals(lam: GlobalsCtx, s: Term) -> Term:
    """Fill in least globals for every function of ``s`` by fixpoint iteration."""
    match s:
        case Let(x, rhs, body):
            return Let(x, rhs, infer_globals(lam, body))
        case If(e, t, u):
            return If(e, infer_globals(lam, t), infer_globals(lam, u))
        case Ret() | App():
            return s
        case Fun(f, params, body, cont, _):
            pset = frozenset(params)
            glob: frozenset[Var] = frozenset()
            # Each round can only add variables of the body, so this terminates.
            for _ in range(len(occ_vars(body)) + 2):
                inner = lam.push(f, glob)
                body2 = infer_globals(inner, body)
                grown = glob | (annotate(inner, body2).live - pset)
                if grown == glob:
                    break
                glob = grown
            else:
                raise AssertionError("globals fixpoint did not converge")
            inner = lam.push(f, glob)
            return Fun(f, params, body2, infer_globals(inner, cont), glob)
    raise TypeError(f"not a term: {s!r}")


@dataclass(frozen=True)
class LiveResult:
    term: Term
    ann: Ann

    @property
    def live(self) -> frozenset[Var]:
        return self.ann.live


def live_infer(s: Term, lam: GlobalsCtx = EMPTY_CTX) -> LiveResult:
    """Backward liveness pass; the result always passes :func:`live_check`.

    Binders are forced live in their continuation even when dead, since the
    judgment demands it; globals are least fixpoints of each function body.
    """
    t = infer_globals(lam, s)
    return LiveResult(t, annotate(lam, t))


def live_ctx_check(ctx: Ctx[Block], lam: GlobalsCtx) -> bool:
    """Does the block context ``ctx`` satisfy the liveness assumptions ``lam``?"""
    if len(ctx) != len(lam):
        return False
    for i in range(len(ctx) - 1, -1, -1):
        (f, blk), (g, glob) = ctx.entries[i], lam.entries[i]
        if f != g or blk is None or glob is None:
            return False
        if not glob.isdisjoint(blk.params):
            return False
        inner = lam.prefix(i + 1)
        try:
            a = annotate(inner, blk.body)
        except IllFormed:
            return False
        want = glob | set(blk.params)
        if not a.live <= want:
            return False
        if not live_check(inner, want, blk.body, Ann(want, a.children)):
            return False
    return True


def max_live(a: Ann) -> int:
    return max(len(n.live) for n in a)


def ann_scoped_check(U: Iterable[Var], s: Term, a: Ann) -> bool:
    """Every live variable at a subterm is in ``U`` or bound by an enclosing binder."""
    U = frozenset(U)

    def go(t: Term, b: Ann, scope: frozenset) -> bool:
        if not b.live <= U | scope:
            return False
        match t:
            case Let(x, _, body):
                return go(body, b.children[0], scope | {x})
            case If(_, u, v):
                return go(u, b.children[0], scope) and go(v, b.children[1], scope)
            case Fun(_, params, body, cont, _):
                return (go(body, b.children[0], scope | set(params))
                        and go(cont, b.children[1], scope))
        return True

    return ann_wellformed(s, a) and go(s, a, frozenset())


def globals_within(lam: GlobalsCtx, U: Iterable[Var]) -> bool:
    U = frozenset(U)
    return all(g <= U for _, g in lam.entries if g is not None)

