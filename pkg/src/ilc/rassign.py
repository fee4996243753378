"""Register assignment by structural recursion, and the local-injectivity judgment."""

from __future__ import annotations

from .liveness import GlobalsCtx, ann_scoped_check, globals_within, live_check
from .renaming import Fresh, apart_check, fresh, freshlist, reachable_check
from .syntax import (
    Ann, App, EMPTY_CTX, Fun, If, Let, Renaming, Ret, Term, Var,
    ann_wellformed, free_vars, occ_vars,
)


class PreconditionError(ValueError):
    def __init__(self, condition: str, detail: str = ""):
        super().__init__(f"{condition}: {detail}" if detail else condition)
        self.condition = condition


def inj_check(rho: Renaming, s: Term, a: Ann) -> bool:
    """``rho`` is injective on the live set of every subterm."""
    return ann_wellformed(s, a) and all(rho.injective_on(n.live) for n in a)


def _rassign(s: Term, a: Ann, rho: Renaming, fresh_fn: Fresh) -> Renaming:
    match s:
        case Let(x, _, body):
            (b,) = a.children
            y = fresh_fn(rho.image(b.live - {x}))
            return _rassign(body, b, rho.update((x,), (y,)), fresh_fn)
        case If(_, t, u):
            b, c = a.children
            return _rassign(u, c, _rassign(t, b, rho, fresh_fn), fresh_fn)
        case Ret() | App():
            return rho
        case Fun(_, params, body, cont, _):
            b, c = a.children
            ys = freshlist(rho.image(b.live - set(params)), len(params), fresh_fn)
            inner = _rassign(body, b, rho.update(params, ys), fresh_fn)
            return _rassign(cont, c, inner, fresh_fn)
    raise TypeError(f"not a term: {s!r}")


def check_preconditions(rho: Renaming, s: Term, a: Ann, lam: GlobalsCtx = EMPTY_CTX) -> None:
    """Raise :class:`PreconditionError` naming the first unmet hypothesis of :func:`rassign`."""
    if not ann_wellformed(s, a):
        raise PreconditionError("annotation-shape", "annotation does not mirror the term")
    fv = free_vars(s)
    if apart_check(fv, s) is None:
        raise PreconditionError("renamed-apart", "some binder is reused or shadows a free variable")
    if not live_check(lam, a.live, s, a):
        raise PreconditionError("liveness", "annotation is not a valid liveness derivation")
    if not globals_within(lam, fv):
        raise PreconditionError("globals-within-free", "assumed globals mention bound variables")
    if not ann_scoped_check(fv, s, a):
        raise PreconditionError("annotation-scoped", "a live set mentions a variable out of scope")
    if not reachable_check(s):
        raise PreconditionError("reachable", "a function is never applied in its continuation")
    if not rho.injective_on(a.live):
        raise PreconditionError("root-injective", "initial renaming merges live variables")


def rassign(rho: Renaming, s: Term, a: Ann, fresh_fn: Fresh = fresh, *,
            lam: GlobalsCtx = EMPTY_CTX, check: bool = True) -> Renaming:
    """Extend ``rho`` to a renaming injective on every live set of ``s``.

    Each binder gets the first name (per ``fresh_fn``) not already used by a
    variable live alongside it.
    """
    if check:
        check_preconditions(rho, s, a, lam)
    return _rassign(s, a, rho, fresh_fn)


def names_used(rho: Renaming, s: Term) -> frozenset[Var]:
    return rho.image(occ_vars(s))


def segment_bound(names, order_rank) -> int:
    """Number of smallest variables (under ``order_rank``) needed to cover ``names``."""
    return max((order_rank(v) + 1 for v in names), default=0)
