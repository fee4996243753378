"""Freshness, renaming apart, and generalized alpha-equivalence."""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from typing import Callable, Optional

from .syntax import (
    App, BinOp, Extern, Fun, If, Label, Let, Lit, RESERVED_BASE, Ref, Renaming, Ret,
    Term, Var, expr_vars, exprs_vars, free_vars, rename_expr,
)

Fresh = Callable[[Iterable[Var]], Var]


def fresh(X: Iterable[Var]) -> Var:
    """Smallest-index variable not in ``X``; its index never exceeds ``|X|``."""
    taken = {x.index for x in X}
    i = 0
    while i in taken:
        i += 1
    return Var(i)


def reserved_fresh(X: Iterable[Var]) -> Var:
    """Smallest variable of the reserved index region not in ``X``."""
    taken = {x.index for x in X}
    i = RESERVED_BASE
    while i in taken:
        i += 1
    return Var(i)


class OrderedFresh:
    """Smallest unused variable under the order ``first`` followed by all others by index.

    With ``first = ()`` this is :func:`fresh`.  Putting a program's free
    variables first lets them keep their names while still being the
    smallest variables of the order.
    """

    def __init__(self, first: Sequence[Var] = ()):
        self.first = tuple(dict.fromkeys(first))
        self._first_set = frozenset(self.first)

    def nth(self, rank: int) -> Var:
        if rank < len(self.first):
            return self.first[rank]
        rank -= len(self.first)
        i = 0
        while True:
            v = Var(i)
            if v not in self._first_set:
                if rank == 0:
                    return v
                rank -= 1
            i += 1

    def rank(self, v: Var) -> int:
        if v in self._first_set:
            return self.first.index(v)
        return len(self.first) + v.index - sum(1 for u in self.first if u.index < v.index)

    def __call__(self, X: Iterable[Var]) -> Var:
        X = set(X)
        for r in range(len(X) + 1):
            v = self.nth(r)
            if v not in X:
                return v
        raise AssertionError("unreachable: more ranks than set elements")


def freshlist(X: Iterable[Var], n: int, fresh_fn: Fresh = fresh) -> list[Var]:
    taken = set(X)
    out = []
    for _ in range(n):
        y = fresh_fn(taken)
        taken.add(y)
        out.append(y)
    return out


# ---------------------------------------------------------------------------
# Renamed apart


def apart_check(X: Iterable[Var], s: Term) -> Optional[frozenset[Var]]:
    """Binders introduced by ``s`` if ``s`` is renamed apart relative to scope ``X``, else ``None``."""
    X = frozenset(X)
    match s:
        case Let(x, rhs, body):
            if not expr_vars(rhs) <= X or x in X:
                return None
            inner = apart_check(X | {x}, body)
            return None if inner is None else inner | {x}
        case Ret(e):
            return frozenset() if expr_vars(e) <= X else None
        case App(_, args):
            return frozenset() if exprs_vars(args) <= X else None
        case If(e, t, u):
            if not expr_vars(e) <= X:
                return None
            xs, xt = apart_check(X, t), apart_check(X, u)
            if xs is None or xt is None or not xs.isdisjoint(xt):
                return None
            return xs | xt
        case Fun(_, params, body, cont, _):
            ps = frozenset(params)
            if len(ps) != len(params) or not ps.isdisjoint(X):
                return None
            xt = apart_check(X, cont)
            xs = apart_check(X | ps, body)
            if xs is None or xt is None or not (xs | ps).isdisjoint(xt):
                return None
            return xs | xt | ps
    raise TypeError(f"not a term: {s!r}")


@dataclass(frozen=True)
class ApartResult:
    binders: frozenset[Var]
    term: Term


def _apart(rho: Renaming, X: frozenset, s: Term, fresh_fn: Fresh) -> tuple[frozenset, Term]:
    match s:
        case Let(x, rhs, body):
            y = fresh_fn(X)
            xs, body2 = _apart(rho.update((x,), (y,)), X | {y}, body, fresh_fn)
            return xs | {y}, Let(y, rename_expr(rho, rhs), body2)
        case If(e, t, u):
            xs, t2 = _apart(rho, X, t, fresh_fn)
            xt, u2 = _apart(rho, X | xs, u, fresh_fn)
            return xs | xt, If(rename_expr(rho, e), t2, u2)
        case Ret(e):
            return frozenset(), Ret(rename_expr(rho, e))
        case App(f, args):
            return frozenset(), App(f, tuple(rename_expr(rho, e) for e in args))
        case Fun(f, params, body, cont, _):
            ys = freshlist(X, len(params), fresh_fn)
            yset = frozenset(ys)
            xs, body2 = _apart(rho.update(params, ys), X | yset, body, fresh_fn)
            xt, cont2 = _apart(rho, X | xs | yset, cont, fresh_fn)
            return xs | xt | yset, Fun(f, tuple(ys), body2, cont2, None)
    raise TypeError(f"not a term: {s!r}")


def rename_apart(rho: Renaming, X: Iterable[Var], s: Term, fresh_fn: Fresh = reserved_fresh) -> ApartResult:
    """Rename every binder of ``s`` to a fresh variable; globals annotations are dropped."""
    X = frozenset(X)
    if not rho.image(free_vars(s)) <= X:
        raise ValueError("renaming maps free variables outside the scope set")
    xs, t = _apart(rho, X, s, fresh_fn)
    return ApartResult(xs, t)


# ---------------------------------------------------------------------------
# Reachability


def applied_in(f: Label, t: Term) -> bool:
    match t:
        case Let(_, _, body):
            return applied_in(f, body)
        case If(_, u, v):
            return applied_in(f, u) or applied_in(f, v)
        case Ret():
            return False
        case App(g, _):
            return g == f
        case Fun(g, _, body, cont, _):
            return g != f and (applied_in(f, body) or applied_in(f, cont))
    raise TypeError(f"not a term: {t!r}")


def reachable_check(s: Term) -> bool:
    """Every function definition is applied somewhere in its continuation."""
    match s:
        case Let(_, _, body):
            return reachable_check(body)
        case If(_, t, u):
            return reachable_check(t) and reachable_check(u)
        case Ret() | App():
            return True
        case Fun(f, _, body, cont, _):
            return applied_in(f, cont) and reachable_check(body) and reachable_check(cont)
    raise TypeError(f"not a term: {s!r}")


def prune_unreachable(s: Term) -> Term:
    """Drop function definitions never applied in their continuation."""
    match s:
        case Let(x, rhs, body):
            return Let(x, rhs, prune_unreachable(body))
        case If(e, t, u):
            return If(e, prune_unreachable(t), prune_unreachable(u))
        case Fun(f, params, body, cont, glob):
            cont2 = prune_unreachable(cont)
            if not applied_in(f, cont2):
                return cont2
            return Fun(f, params, prune_unreachable(body), cont2, glob)
    return s


# ---------------------------------------------------------------------------
# Alpha-equivalence


@dataclass
class AlphaMaps:
    """Correspondence built while relating two terms.

    ``rho`` sends free variables of the left term to the right, ``delta`` the
    reverse; ``labels`` pairs free labels.
    """

    rho: dict[Var, Var] = field(default_factory=dict)
    delta: dict[Var, Var] = field(default_factory=dict)
    labels: dict[Label, Label] = field(default_factory=dict)
    labels_back: dict[Label, Label] = field(default_factory=dict)

    @property
    def renaming(self) -> Renaming:
        return Renaming(self.rho)

    @property
    def inverse(self) -> Renaming:
        return Renaming(self.delta)


class _NotAlpha(Exception):
    pass


class _Alpha:
    def __init__(self):
        self.maps = AlphaMaps()

    def var(self, x: Var, y: Var, bl: dict, br: dict):
        # bl/br: variables rebound on each side, mapped to their counterpart
        if x in bl or y in br:
            if bl.get(x) != y or br.get(y) != x:
                raise _NotAlpha
            return
        m = self.maps
        if m.rho.setdefault(x, y) != y or m.delta.setdefault(y, x) != x:
            raise _NotAlpha

    def expr(self, e, e2, bl, br):
        match e, e2:
            case Lit(v), Lit(w) if v == w:
                return
            case Ref(x), Ref(y):
                self.var(x, y, bl, br)
                return
            case BinOp(op, l, r), BinOp(op2, l2, r2) if op == op2:
                self.expr(l, l2, bl, br)
                self.expr(r, r2, bl, br)
                return
            case Extern(a), Extern(b) if a == b:
                return
        raise _NotAlpha

    def label(self, f: Label, g: Label, ll: tuple, lr: tuple):
        # ll/lr: label binding stacks; a bound label must sit at the same depth on both sides
        def depth(stack, name):
            for i in range(len(stack) - 1, -1, -1):
                if stack[i] == name:
                    return i
            return None

        df, dg = depth(ll, f), depth(lr, g)
        if df is not None or dg is not None:
            if df != dg:
                raise _NotAlpha
            return
        m = self.maps
        if m.labels.setdefault(f, g) != g or m.labels_back.setdefault(g, f) != f:
            raise _NotAlpha

    def term(self, s: Term, t: Term, bl: dict, br: dict, ll: tuple, lr: tuple):
        match s, t:
            case Let(x, rhs, body), Let(y, rhs2, body2):
                self.expr(rhs, rhs2, bl, br)
                self.term(body, body2, {**bl, x: y}, {**br, y: x}, ll, lr)
            case Ret(e), Ret(e2):
                self.expr(e, e2, bl, br)
            case App(f, args), App(g, args2):
                if len(args) != len(args2):
                    raise _NotAlpha
                self.label(f, g, ll, lr)
                for e, e2 in zip(args, args2):
                    self.expr(e, e2, bl, br)
            case If(e, u, v), If(e2, u2, v2):
                self.expr(e, e2, bl, br)
                self.term(u, u2, bl, br, ll, lr)
                self.term(v, v2, bl, br, ll, lr)
            case Fun(f, ps, body, cont, _), Fun(g, qs, body2, cont2, _):
                if len(ps) != len(qs):
                    raise _NotAlpha
                bl2, br2 = dict(bl), dict(br)
                for p, q in zip(ps, qs):
                    bl2[p] = q
                    br2[q] = p
                ll2, lr2 = ll + (f,), lr + (g,)
                self.term(body, body2, bl2, br2, ll2, lr2)
                self.term(cont, cont2, bl, br, ll2, lr2)
            case _:
                raise _NotAlpha


def alpha_check(s: Term, t: Term) -> Optional[AlphaMaps]:
    """Relate ``s`` and ``t`` up to consistent renaming of variables and bound labels.

    Returns the induced free-variable correspondence, or ``None``.
    """
    a = _Alpha()
    try:
        a.term(s, t, {}, {}, (), ())
    except _NotAlpha:
        return None
    except RecursionError:
        return None
    return a.maps
