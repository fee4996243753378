from ilc.equivalence import (
    Equivalent, Inequivalent, PartialTrace, Unknown, bisim, contradictory, invariance_check,
    trace_equiv, traces,
)
from ilc.semantics import fconfig, iconfig
from ilc.syntax import App, Env, Extern, Fun, Let, Lit, Ref, Ret, action, label, vars_
from ilc.pipeline import compile_program
from conftest import load

x, m, n = vars_("x m n")
f = label("f")
A, B = action("A"), action("B")


def test_traces_of_value():
    ts = traces(fconfig(Ret(Lit(5))), 2)
    assert ts.traces == {PartialTrace((), True), PartialTrace((), False, 5)}


def test_silent_divergence_only_open():
    loop = Fun(f, (), App(f, ()), App(f, ()))
    for fuel in (0, 1, 7, 40):
        assert traces(fconfig(loop), fuel).traces == {PartialTrace((), True)}


def test_extern_traces():
    ts = traces(fconfig(Let(x, Extern(A), Ret(Ref(x)))), 3, (0, 1))
    assert ts.traces == {
        PartialTrace((), True),
        PartialTrace(((0, A),), True), PartialTrace(((1, A),), True),
        PartialTrace(((0, A),), False, 0), PartialTrace(((1, A),), False, 1),
    }


def test_trace_serialization():
    assert str(PartialTrace(((0, A), (1, A)), True)) == "0=A 1=A ..."
    assert str(PartialTrace((), False, 7)) == "-> 7"
    assert str(PartialTrace(((1, A),), False, None)) == "1=A -> bot"


def test_divergence_inequivalent():
    s = load("div1")
    v = trace_equiv(fconfig(s), iconfig(s))
    assert isinstance(v, Inequivalent)
    assert {str(v.witness)} <= {"-> 7", "-> 5"}
    assert isinstance(bisim(fconfig(s), iconfig(s)), Inequivalent)
    assert isinstance(invariance_check(s), Inequivalent)


def test_coherent_right_program_equivalent():
    s = load("coh_right")
    assert isinstance(trace_equiv(fconfig(s), iconfig(s)), Equivalent)
    assert isinstance(invariance_check(s, fuel=64), Equivalent)
    assert isinstance(invariance_check(Ret(Lit(5))), Equivalent)


def test_reflexivity(fig1a):
    c = fconfig(fig1a, Env({n: 2, m: 4}))
    assert isinstance(trace_equiv(c, c, 64), Equivalent)
    assert isinstance(bisim(c, c, 64), Equivalent)


def test_distinct_actions():
    a = fconfig(Let(x, Extern(A), Ret(Ref(x))))
    b = fconfig(Let(x, Extern(B), Ret(Ref(x))))
    assert isinstance(bisim(a, b), Inequivalent)
    assert isinstance(trace_equiv(a, b), Inequivalent)


def test_fig1_pipeline_equivalent(fig1a):
    out = compile_program(fig1a).output
    env = Env({n: 2, m: 4})
    assert isinstance(bisim(fconfig(fig1a, env), iconfig(out, env), 64), Equivalent)


def test_fuel_limits_give_unknown():
    loop = Fun(f, (), App(f, ()), App(f, ()))
    # the loop is cut at the empty prefix, so more fuel might still yield "-> 1"
    assert isinstance(trace_equiv(fconfig(loop), fconfig(Ret(Lit(1))), 10), Unknown)
    assert isinstance(bisim(fconfig(loop), fconfig(Ret(Lit(1))), 10), Unknown)
    # a result the other side can never reach again is a definite difference
    v = trace_equiv(fconfig(Ret(Lit(2))), fconfig(Ret(Lit(1))), 10)
    assert isinstance(v, Inequivalent) and str(v.witness) == "-> 1" and v.side == 2
    slow = Fun(f, (x,), Ret(Ref(x)), App(f, (Lit(1),)))
    assert isinstance(trace_equiv(fconfig(slow), fconfig(Ret(Lit(2))), 0), Unknown)


def test_contradictory():
    e, i, u = Equivalent(1), Inequivalent(PartialTrace((), True), 1), Unknown()
    assert contradictory(e, i) and contradictory(i, e)
    assert not contradictory(e, u) and not contradictory(e, e)
