import pytest

from ilc.liveness import live_infer, max_live
from ilc.rassign import PreconditionError, inj_check, names_used, rassign, segment_bound
from ilc.renaming import OrderedFresh, fresh, rename_apart
from ilc.syntax import (
    Ann, IDENTITY, Let, Lit, Ref, Renaming, Ret, Var, free_vars, leaf, vars_,
)

x, y, z, n, m = vars_("x y z n m")


def test_inj_examples():
    assert inj_check(IDENTITY, Ret(Ref(x)), leaf({x}))
    rho = Renaming({x: z, y: z})
    from ilc.syntax import BinOp

    s = Ret(BinOp("+", Ref(x), Ref(y)))
    assert not inj_check(rho, s, leaf({x, y}))


def test_rassign_value():
    assert rassign(IDENTITY, Ret(Ref(x)), leaf({x})) == IDENTITY


def _apart(s):
    return rename_apart(IDENTITY, free_vars(s), s).term


def test_fig1a(fig1a):
    lr = live_infer(_apart(fig1a))
    rho0 = Renaming({n: Var(0), m: Var(1)})
    rho = rassign(rho0, lr.term, lr.ann, fresh)
    assert inj_check(rho, lr.term, lr.ann)
    assert len(names_used(rho, lr.term)) == 4
    assert segment_bound(names_used(rho, lr.term), lambda v: v.index) == 4


def test_names_used():
    assert names_used(IDENTITY, Ret(Ref(x))) == {x}
    const = Renaming({x: Var(0)})
    assert names_used(const, Let(x, Lit(1), Ret(Ref(x)))) == {Var(0)}


def test_preconditions_reported():
    s = Let(x, Lit(1), Let(x, Lit(2), Ret(Ref(x))))
    lr = live_infer(s)
    with pytest.raises(PreconditionError) as exc:
        rassign(IDENTITY, lr.term, lr.ann)
    assert exc.value.condition == "renamed-apart"
    ok = live_infer(Ret(Ref(x)))
    with pytest.raises(PreconditionError) as exc:
        rassign(IDENTITY, ok.term, Ann(frozenset({x}), (leaf(),)))
    assert exc.value.condition == "annotation-shape"
    s2 = Ret(Ref(x))
    with pytest.raises(PreconditionError) as exc:
        rassign(IDENTITY, s2, leaf())
    assert exc.value.condition == "liveness"
    s3 = Ret(BinOp_xy())
    with pytest.raises(PreconditionError) as exc:
        rassign(Renaming({x: z, y: z}), s3, leaf({x, y}))
    assert exc.value.condition == "root-injective"


def BinOp_xy():
    from ilc.syntax import BinOp

    return BinOp("+", Ref(x), Ref(y))


def test_ordered_fresh_keeps_free_names(fig1a):
    fv = free_vars(fig1a)
    lr = live_infer(_apart(fig1a))
    rho = rassign(IDENTITY, lr.term, lr.ann, OrderedFresh(sorted(fv)))
    assert all(rho(v) == v for v in fv)
    used = names_used(rho, lr.term)
    order = OrderedFresh(sorted(fv))
    assert segment_bound(used, order.rank) <= max(len(fv), max_live(lr.ann))
