from ilc.renaming import (
    OrderedFresh, alpha_check, apart_check, fresh, freshlist, prune_unreachable, reachable_check,
    rename_apart, reserved_fresh,
)
from ilc.syntax import (
    App, Fun, IDENTITY, Let, Lit, RESERVED_BASE, Ref, Ret, Var, free_vars, label, vars_,
)

x, y, z = vars_("x y z")
f, g = label("f"), label("g")
v0, v1, v2 = Var(0), Var(1), Var(2)


def test_fresh():
    assert fresh(set()) == v0
    assert fresh({v0, v1}) == v2
    assert fresh({v0, v2}) == v1


def test_fresh_index_bound():
    for k in range(8):
        X = {Var(i) for i in range(0, 2 * k, 2)}
        assert fresh(X).index <= len(X)


def test_freshlist():
    assert freshlist(set(), 2) == [v0, v1]
    assert freshlist({v0}, 1) == [v1]
    assert freshlist({x}, 0) == []


def test_reserved_fresh_region():
    assert reserved_fresh(set()).index == RESERVED_BASE
    assert reserved_fresh({Var(RESERVED_BASE)}).index == RESERVED_BASE + 1


def test_ordered_fresh():
    order = OrderedFresh([x, y])
    assert order(set()) == x
    assert order({x}) == y
    z0 = order({x, y})
    assert z0 not in (x, y) and order.rank(z0) == 2
    for r in range(6):
        assert order.rank(order.nth(r)) == r


def test_apart_check():
    assert apart_check({x}, Ret(Ref(x))) == frozenset()
    assert apart_check(set(), Let(x, Lit(1), Let(x, Lit(2), Ret(Ref(x))))) is None
    assert apart_check(set(), Let(x, Lit(1), Let(y, Lit(2), Ret(Ref(x))))) == {x, y}
    # a binder may not capture a free variable
    assert apart_check({x}, Let(x, Lit(1), Ret(Ref(x)))) is None


def test_rename_apart_examples():
    s = Let(x, Lit(1), Let(x, Lit(2), Ret(Ref(x))))
    r = rename_apart(IDENTITY, free_vars(s), s)
    a, b = r.term.var, r.term.body.var
    assert a != b
    assert r.term == Let(a, Lit(1), Let(b, Lit(2), Ret(Ref(b))))
    assert apart_check(set(), r.term) == r.binders == {a, b}
    assert rename_apart(IDENTITY, {x}, Ret(Ref(x))).term == Ret(Ref(x))


def test_fig1_inner_m_renamed(fig1a):
    m = vars_("m")[0]
    r = rename_apart(IDENTITY, free_vars(fig1a), fig1a)
    assert m not in r.binders
    assert apart_check(free_vars(fig1a), r.term) == r.binders


def test_reachable():
    assert reachable_check(Fun(f, (), Ret(Lit(1)), App(f, ())))
    assert not reachable_check(Fun(f, (), Ret(Lit(1)), Ret(Lit(2))))


def test_reachable_fig1(fig1a):
    assert reachable_check(fig1a)


def test_prune():
    s = Fun(f, (), Ret(Lit(1)), Fun(g, (), Ret(Lit(2)), App(f, ())))
    assert prune_unreachable(s) == Fun(f, (), Ret(Lit(1)), App(f, ()))
    assert reachable_check(prune_unreachable(s))


def test_shadowed_label_is_not_an_application():
    # the inner f shadows the outer one, so the outer is never applied
    inner = Fun(f, (), Ret(Lit(2)), App(f, ()))
    assert not reachable_check(Fun(f, (), Ret(Lit(1)), inner))


def test_alpha_examples(fig1a):
    m = alpha_check(fig1a, fig1a)
    assert m is not None and all(k == v for k, v in m.rho.items())
    assert set(m.rho) == free_vars(fig1a)
    assert alpha_check(Let(x, Lit(1), Ret(Ref(x))), Let(y, Lit(1), Ret(Ref(y)))) is not None
    assert alpha_check(Let(x, Lit(1), Ret(Ref(x))), Let(y, Lit(1), Ret(Ref(z)))) is None


def test_alpha_free_variable_maps():
    m = alpha_check(Ret(Ref(x)), Ret(Ref(y)))
    assert m.rho == {x: y} and m.delta == {y: x}
    # a free-variable map must stay injective
    from ilc.syntax import BinOp

    assert alpha_check(Ret(BinOp("+", Ref(x), Ref(y))), Ret(BinOp("+", Ref(z), Ref(z)))) is None


def test_alpha_labels():
    s = Fun(f, (x,), Ret(Ref(x)), App(f, (Lit(1),)))
    t = Fun(g, (y,), Ret(Ref(y)), App(g, (Lit(1),)))
    assert alpha_check(s, t) is not None
    # binding structure of labels must match
    u = Fun(g, (y,), Ret(Ref(y)), App(f, (Lit(1),)))
    assert alpha_check(s, u) is None


def test_alpha_shadowed_labels():
    # labels scope over their own body, so the inner f in t is recursive
    t = Fun(f, (), Ret(Lit(1)), Fun(f, (), App(f, ()), App(f, ())))
    recursive = Fun(f, (), Ret(Lit(1)), Fun(g, (), App(g, ()), App(g, ())))
    calls_outer = Fun(f, (), Ret(Lit(1)), Fun(g, (), App(f, ()), App(g, ())))
    assert alpha_check(recursive, t) is not None
    assert alpha_check(calls_outer, t) is None


def test_rename_apart_preserves_alpha(fig1a):
    r = rename_apart(IDENTITY, free_vars(fig1a), fig1a)
    m = alpha_check(fig1a, r.term)
    assert m is not None and all(m.rho[v] == v for v in free_vars(fig1a))
