from hypothesis import HealthCheck, assume, given, settings, strategies as st

from ilc.equivalence import PartialTrace, traces
from ilc.frontend import ParseError, format_term, parse, parse_term
from ilc.liveness import IllFormed, live_check, live_infer
from ilc.renaming import alpha_check, apart_check, fresh, rename_apart
from ilc.semantics import fconfig, iconfig, run
from ilc.syntax import (
    App, BinOp, BINOPS, Cofinite, Ctx, EMPTY_CTX, Env, Extern, Fun, IDENTITY, If, Let, Lit, Ref,
    Renaming, Ret, Var, action, ctx_restrict, eval_expr, expr_vars, free_vars, label, rename, var,
)

VARS = [var(n) for n in "abcde"]
LABELS = [label(n) for n in ("f", "g")]
ACTIONS = [action(n) for n in ("A", "B")]

exprs = st.recursive(
    st.one_of(st.integers(-5, 5).map(Lit), st.sampled_from(VARS).map(Ref)),
    lambda sub: st.builds(BinOp, st.sampled_from(sorted(BINOPS)), sub, sub),
    max_leaves=6,
)
var_tuples = st.lists(st.sampled_from(VARS), max_size=2, unique=True).map(tuple)


def _terms():
    leaves = st.one_of(
        st.builds(Ret, exprs),
        st.builds(App, st.sampled_from(LABELS), st.lists(exprs, max_size=2).map(tuple)),
    )

    def extend(sub):
        rhs = st.one_of(exprs, st.sampled_from(ACTIONS).map(Extern))
        return st.one_of(
            st.builds(Let, st.sampled_from(VARS), rhs, sub),
            st.builds(If, exprs, sub, sub),
            st.builds(Fun, st.sampled_from(LABELS), var_tuples, sub, sub),
        )

    return st.recursive(leaves, extend, max_leaves=10)


terms = _terms()
envs = st.dictionaries(st.sampled_from(VARS), st.integers(-4, 4)).map(Env)
fast = settings(max_examples=150, deadline=None, suppress_health_check=[HealthCheck.too_slow])


@fast
@given(terms)
def test_print_parse_round_trip(s):
    assert parse_term(format_term(s)) == s


@fast
@given(st.text(alphabet="letinfu x=(){}@,:+-*/<>!0123456789\n", max_size=60))
def test_parser_total(text):
    try:
        parse(text)
    except ParseError:
        pass


@fast
@given(exprs, envs, envs)
def test_eval_depends_only_on_free_vars(e, v1, v2):
    xs = expr_vars(e)
    merged = v2.set_many(xs, [v1.get(x) for x in xs]).set_many(
        [x for x in xs if x not in v1], [None] * sum(1 for x in xs if x not in v1))
    assert eval_expr(e, v1) == eval_expr(e, merged)


ctxs = st.lists(
    st.tuples(st.sampled_from(LABELS),
              st.one_of(st.none(), st.frozensets(st.sampled_from(VARS), max_size=3))),
    max_size=5,
).map(lambda es: Ctx(tuple(es)))


@fast
@given(ctxs, st.sampled_from(LABELS), st.frozensets(st.sampled_from(VARS)))
def test_ctx_invariants(c, f, g):
    pushed = c.push(f, g)
    assert pushed.lookup(f) == g
    assert pushed.rewind(f) == pushed
    r = c.rewind(f)
    if r is not None:
        assert r.lookup(f) == c.lookup(f)
        assert len(r) <= len(c)


@fast
@given(ctxs, st.frozensets(st.sampled_from(VARS)), st.frozensets(st.sampled_from(VARS)))
def test_restrict_laws(c, X, Y):
    once = ctx_restrict(c, X)
    assert ctx_restrict(once, X) == once
    assert ctx_restrict(ctx_restrict(c, X), Y) == ctx_restrict(c, X & Y)
    assert ctx_restrict(c, Cofinite()) == c
    assert len(once) == len(c)


renamings = st.dictionaries(st.sampled_from(VARS), st.sampled_from(VARS)).map(Renaming)


@fast
@given(terms, renamings, renamings)
def test_rename_composition(s, r1, r2):
    assert rename(r2, rename(r1, s)) == rename(r1.then(r2), s)
    assert rename(IDENTITY, s) == s


@fast
@given(st.frozensets(st.integers(0, 20).map(Var)))
def test_fresh_is_fresh_and_small(X):
    v = fresh(X)
    assert v not in X and v.index <= len(X)


@fast
@given(terms, envs, st.integers(0, 12))
def test_traces_fuel_monotone_and_prefix_closed(s, env, k):
    c = fconfig(s, env)
    small, big = traces(c, k).traces, traces(c, k + 1).traces
    assert small <= big
    for t in big:
        for i in range(len(t.events) + 1):
            assert PartialTrace(t.events[:i], True) in big


@fast
@given(terms, envs)
def test_run_agrees_with_traces(s, env):
    assume(not any(isinstance(t, Let) and isinstance(t.rhs, Extern) for t in _nodes(s)))
    for mk in (fconfig, iconfig):
        r = run(mk(s, env), fuel=60)
        ts = traces(mk(s, env), 60).traces
        finished = {t.value for t in ts if not t.open}
        if r.terminated:
            assert finished == {r.value}
        else:
            assert finished == set()


def _nodes(s):
    from ilc.syntax import iter_terms

    return iter_terms(s)


@fast
@given(terms)
def test_inferred_liveness_checks(s):
    try:
        lr = live_infer(s)
    except IllFormed:
        assume(False)
    assert live_check(EMPTY_CTX, lr.live, lr.term, lr.ann)
    assert lr.live <= free_vars(lr.term)


@fast
@given(terms)
def test_rename_apart_properties(s):
    fv = free_vars(s)
    r = rename_apart(IDENTITY, fv, s)
    assert apart_check(fv, r.term) == r.binders
    assert r.binders.isdisjoint(fv)
    m = alpha_check(s, r.term)
    assert m is not None and all(m.rho[x] == x for x in m.rho)
    back = alpha_check(r.term, s)
    assert back is not None and back.rho == m.delta
