import pytest

from ilc.syntax import (
    Ann, App, BinOp, Cofinite, Ctx, EMPTY_CTX, Env, Extern, Fun, IDENTITY, Let, Lit, Ref,
    Renaming, Ret, action, ann_wellformed, beta, bound_vars, ctx_lookup, ctx_restrict, ctx_rewind,
    eval_expr, eval_expr_list, free_vars, label, leaf, occ_vars, rename, var, vars_, wrap,
)

x, y, z, m, n = vars_("x y z m n")
f, g = label("f"), label("g")


def test_eval_expr_examples():
    assert eval_expr(BinOp("+", Lit(1), Lit(2)), Env()) == 3
    assert eval_expr(Ref(x), Env()) is None
    p = var("p")
    assert eval_expr(BinOp("<=", Ref(p), Ref(m)), Env({p: 2, m: 4})) == 1


@pytest.mark.parametrize("op,a,b,want", [
    ("-", 3, 5, -2), ("*", -3, 4, -12), ("/", 7, 2, 3), ("/", -7, 2, -3), ("/", 7, 0, None),
    ("<", 1, 1, 0), ("==", 2, 2, 1), ("!=", 2, 2, 0), ("<=", 3, 2, 0),
])
def test_binops(op, a, b, want):
    assert eval_expr(BinOp(op, Lit(a), Lit(b)), Env()) == want


def test_wrapping():
    big = (1 << 63) - 1
    assert wrap(big + 1) == -(1 << 63)
    assert eval_expr(BinOp("+", Lit(big), Lit(1)), Env()) == -(1 << 63)
    # the one overflowing division
    assert eval_expr(BinOp("/", Lit(-(1 << 63)), Lit(-1)), Env()) == -(1 << 63)


def test_eval_expr_list():
    assert eval_expr_list([Lit(1), BinOp("+", Lit(2), Lit(3))], Env()) == [1, 5]
    assert eval_expr_list([Lit(1), Ref(x)], Env()) is None
    assert eval_expr_list([], Env({x: 1})) == []


def test_beta():
    assert (beta(0), beta(7), beta(-3)) == (0, 1, 1)


def test_var_sets_on_small_terms():
    assert free_vars(Ret(Ref(x))) == {x}
    assert free_vars(Let(x, Lit(7), Ret(Ref(x)))) == frozenset()
    assert bound_vars(Ret(Ref(x))) == frozenset()
    assert bound_vars(Let(x, Lit(7), Ret(Ref(x)))) == {x}
    assert occ_vars(Ret(Lit(5))) == frozenset()
    assert occ_vars(Ret(Ref(x))) == {x}


def test_var_sets_on_fig1a(fig1a):
    assert free_vars(fig1a) == set(vars_("n m"))
    assert bound_vars(fig1a) == set(vars_("i j p c k m"))
    assert occ_vars(fig1a) == set(vars_("i j p c k m n"))


def test_free_vars_of_function_forms():
    s = Fun(f, (x,), Ret(BinOp("+", Ref(x), Ref(y))), App(f, (Ref(z),)))
    assert free_vars(s) == {y, z}
    assert free_vars(Let(x, Extern(action("A")), Ret(Ref(x)))) == frozenset()


def test_ctx_lookup_and_rewind():
    assert ctx_lookup(EMPTY_CTX, f) is None
    assert ctx_lookup(Ctx(((f, 1),)), f) == 1
    assert ctx_lookup(Ctx(((f, 1), (f, 2))), f) == 2
    c = Ctx(((f, 1), (g, 2)))
    assert ctx_rewind(c, f) == Ctx(((f, 1),))
    assert ctx_rewind(Ctx(((f, 1),)), f) == Ctx(((f, 1),))
    assert ctx_rewind(Ctx(((g, 2),)), f) is None


def test_rewind_picks_most_recent():
    c = Ctx(((f, 1), (g, 2), (f, 3), (g, 4)))
    assert ctx_rewind(c, f) == Ctx(((f, 1), (g, 2), (f, 3)))


def test_restrict():
    assert ctx_restrict(EMPTY_CTX, frozenset({x})) == EMPTY_CTX
    lam = Ctx(((f, frozenset({x})),))
    assert ctx_restrict(lam, frozenset({x, y})) == lam
    assert ctx_restrict(lam, frozenset({y})) == Ctx(((f, None),))
    assert ctx_restrict(lam, Cofinite(frozenset({x}))) == Ctx(((f, None),))
    assert ctx_restrict(lam, Cofinite(frozenset({y}))) == lam


def test_rename_examples():
    s = Let(x, Lit(7), Ret(Ref(x)))
    assert rename(IDENTITY, s) == s
    assert rename(Renaming({x: y}), s) == Let(y, Lit(7), Ret(Ref(y)))
    j, p, k, i = vars_("j p k i")
    rho = Renaming({j: i, p: n, k: i})
    assert rename(rho, App(f, (Ref(k), Ref(m)))) == App(f, (Ref(i), Ref(m)))


def test_rename_globals():
    s = Fun(f, (), Ret(Ref(x)), App(f, ()), frozenset({x}))
    assert rename(Renaming({x: y}), s).globals == {y}


def test_ann_wellformed(fig1a):
    from ilc.liveness import live_infer

    assert ann_wellformed(Ret(Ref(x)), leaf({x}))
    assert not ann_wellformed(Ret(Ref(x)), Ann(frozenset({x}), (leaf(),)))
    lr = live_infer(fig1a)
    assert ann_wellformed(lr.term, lr.ann)


def test_env_is_immutable_and_hashable():
    e = Env({x: 1})
    e2 = e.set(y, 2)
    assert dict(e) == {x: 1} and dict(e2) == {x: 1, y: 2}
    assert e2.set(y, None) == e
    assert hash(e2.set(y, None)) == hash(e)


def test_renaming_algebra():
    r1, r2 = Renaming({x: y}), Renaming({y: z})
    assert r1.then(r2)(x) == z
    assert r1.then(r2)(y) == z
    assert not Renaming({x: z, y: z}).injective_on({x, y})
    assert Renaming({x: x}) == IDENTITY


def test_names_round_trip():
    assert var("foo").name == "foo"
    assert var("foo") == var("foo")
    assert str(label("loop")) == "loop"
