"""Property checks over generated programs, with shrinking of counterexamples.

Each ``check_*`` function takes a seed and returns ``None`` when the
property holds (or does not apply) and a failure message otherwise.
"""

from __future__ import annotations

import json
import random
from collections.abc import Iterable
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Optional

from .coherence import agree_check, coh_check, coh_ctx_check
from .equivalence import (
    DEFAULT_DOMAIN, Inequivalent, bisim, contradictory,
    format_verdict, invariance_check, trace_equiv,
)
from .frontend import format_term, format_varset, parse
from .gen import GenConfig, gen_env, gen_program
from .liveness import IllFormed, annotate, live_check, live_ctx_check, live_infer, max_live
from .pipeline import StageError, compile_program
from .rassign import PreconditionError, inj_check, names_used, rassign
from .renaming import OrderedFresh, alpha_check, apart_check, fresh, rename_apart, reserved_fresh
from .semantics import (
    Config, External, FConfig, IConfig, Silent, TAU, Terminal, classify,
    reachable_configs, res, strip, successors,
)
from .syntax import (
    App, BinOp, Ctx, EMPTY_CTX, Env, Extern, Fun, IDENTITY, If, Let, Lit, Ref, Renaming, Ret,
    Term, Var, free_vars, iter_terms, rename, rename_ann, subterms,
)

Check = Callable[[Term, "CheckParams"], Optional[str]]


@dataclass(frozen=True)
class CheckParams:
    fuel: int = 256
    domain: tuple[int, ...] = DEFAULT_DOMAIN
    envs: int = 2  # random environments tried per program
    seed: int = 0


def _rng(p: CheckParams, salt: int = 0) -> random.Random:
    return random.Random(p.seed * 7919 + salt)


def _random_env(rng: random.Random, xs: Iterable[Var]) -> Env:
    return Env(gen_env(rng, sorted(xs)))


# ---------------------------------------------------------------------------
# Individual properties


def check_invariance(s: Term, p: CheckParams) -> Optional[str]:
    """Coherent programs behave the same under both readings."""
    try:
        lr = live_infer(s)
    except IllFormed:
        return None
    if not coh_check(EMPTY_CTX, lr.term, lr.ann):
        return None
    rng = _rng(p)
    for _ in range(p.envs):
        env = _random_env(rng, free_vars(s))
        v = invariance_check(lr.term, env, p.fuel, p.domain)
        if isinstance(v, Inequivalent):
            return f"coherent but not invariant under {env!r}: {format_verdict(v)}"
    return None


def _harvest(s: Term, fuel: int, domain, limit: int, imperative: bool) -> list[Config]:
    start = IConfig(EMPTY_CTX, Env(), s) if imperative else FConfig(EMPTY_CTX, Env(), s)
    return reachable_configs(start, fuel, domain, limit)


def _globals_table(s: Term) -> dict[int, frozenset]:
    """id(function body) -> globals, for every function of ``s``."""
    return {id(t.body): t.globals for t in iter_terms(s) if isinstance(t, Fun)}


def check_liveness_sound(s: Term, p: CheckParams) -> Optional[str]:
    """Perturbing variables outside the live set never changes imperative behaviour."""
    try:
        lr = live_infer(s)
    except IllFormed:
        return None
    t = lr.term
    table = _globals_table(t)
    rng = _rng(p, 1)
    start = IConfig(EMPTY_CTX, _random_env(rng, free_vars(t)), t)
    states = reachable_configs(start, 24, p.domain, 48)
    for c in rng.sample(states, min(len(states), 1 + p.envs * 2)):
        lam = c.ctx.map(lambda blk: table[id(blk.body)])
        if not live_ctx_check(c.ctx, lam):
            return f"live_ctx_check rejects a reachable context at {format_term(c.term)}"
        a = annotate(lam, c.term)
        if not live_check(lam, a.live, c.term, a):
            return f"inferred annotation rejected at {format_term(c.term)}"
        dead = sorted((set(c.env) | free_vars(t)) - a.live)
        for _ in range(p.envs):
            env2 = c.env.set_many(dead, [rng.choice((None, rng.randint(-4, 6))) for _ in dead])
            v = bisim(c, IConfig(c.ctx, env2, c.term), p.fuel, p.domain)
            if isinstance(v, Inequivalent):
                return (f"perturbation outside live set {format_varset(a.live)} changed behaviour "
                        f"of {format_term(c.term)}: {format_verdict(v)}")
    return None


def check_coherence_midrun(s: Term, p: CheckParams) -> Optional[str]:
    """Coherent mid-execution states behave like their stripped imperative counterparts."""
    try:
        lr = live_infer(s)
    except IllFormed:
        return None
    t = lr.term
    if not coh_check(EMPTY_CTX, t, lr.ann):
        return None
    table = _globals_table(t)
    rng = _rng(p, 2)
    start = FConfig(EMPTY_CTX, _random_env(rng, free_vars(t)), t)
    states = reachable_configs(start, 24, p.domain, 48)
    for c in rng.sample(states, min(len(states), 1 + p.envs * 2)):
        # keep only the functions whose closure still agrees with the current environment
        lam = Ctx(tuple(
            (f, g if cl.env.agrees(c.env, g) else None)
            for f, cl in c.ctx.entries for g in (table[id(cl.body)],)))
        if not (coh_check(lam, c.term) and coh_ctx_check(c.ctx, lam) and agree_check(c.ctx, c.env, lam)):
            return f"reachable state of a coherent program is not coherent: {format_term(c.term)}"
        v = bisim(c, IConfig(strip(c.ctx), c.env, c.term), p.fuel, p.domain)
        if isinstance(v, Inequivalent):
            return f"coherent state differs from its stripped state at {format_term(c.term)}: {format_verdict(v)}"
    return None


def check_pipeline(s: Term, p: CheckParams) -> Optional[str]:
    """Rename apart + rassign: local injectivity, coherence, alpha, name bound, and semantics."""
    try:
        rep = compile_program(s)
    except StageError as e:
        return f"pipeline stage {e.stage} failed: {e.witness}"
    except PreconditionError as e:
        return f"rassign precondition {e.condition} failed"
    fv = free_vars(s)
    n = len(fv)
    if rep.names is None or rep.names > max(n, rep.k):
        return f"{rep.names} names used, bound is max({n}, {rep.k})"
    order = OrderedFresh(sorted(fv))
    used = names_used(rep.renaming, rep.annotated)
    if any(order.rank(v) >= max(n, rep.k) for v in used):
        return f"names {sorted(used)} not among the {max(n, rep.k)} smallest"
    rng = _rng(p, 3)
    for _ in range(p.envs):
        env = _random_env(rng, fv)
        v = bisim(FConfig(EMPTY_CTX, env, s), IConfig(EMPTY_CTX, env, rep.output), p.fuel, p.domain)
        if isinstance(v, Inequivalent):
            return f"output not equivalent to source: {format_verdict(v)}"
    return None


def check_rassign_policies(s: Term, p: CheckParams) -> Optional[str]:
    """rassign is locally injective for any fresh policy; plain smallest-index obeys the name bound."""
    fv = free_vars(s)
    s2 = rename_apart(IDENTITY, fv, s).term
    lr = live_infer(s2)
    rng = _rng(p, 4)
    # initial renaming: free variables onto the smallest indices, in random order
    targets = [Var(i) for i in range(len(fv))]
    rng.shuffle(targets)
    rho0 = Renaming(zip(sorted(fv), targets))
    for fresh_fn in (fresh, reserved_fresh, OrderedFresh(sorted(fv))):
        rho = rassign(rho0, lr.term, lr.ann, fresh_fn)
        if not inj_check(rho, lr.term, lr.ann):
            return f"rassign with {fresh_fn} is not locally injective"
    rho = rassign(rho0, lr.term, lr.ann, fresh)
    bound = max(len(fv), max_live(lr.ann))
    used = names_used(rho, lr.term)
    if any(v.index >= bound for v in used):
        return f"names {sorted(u.index for u in used)} exceed the {bound} smallest"
    s3, a3 = rename(rho, lr.term), rename_ann(rho, lr.ann)
    if not coh_check(EMPTY_CTX, s3, a3):
        return "renamed program is not coherent"
    maps = alpha_check(s3, lr.term)
    if maps is None:
        return "renamed program is not alpha-equivalent to its source"
    return None


def check_apart(s: Term, p: CheckParams) -> Optional[str]:
    """rename_apart renames apart, introduces only new binders, and respects alpha."""
    fv = free_vars(s)
    for fresh_fn in (reserved_fresh, fresh):
        r = rename_apart(IDENTITY, fv, s, fresh_fn)
        got = apart_check(fv, r.term)
        if got is None or got != r.binders:
            return f"output not renamed apart ({fresh_fn.__name__}): {format_term(r.term)}"
        if not got.isdisjoint(fv):
            return "new binders overlap the scope"
        maps = alpha_check(s, r.term)
        if maps is None or any(maps.rho.get(x, x) != x for x in fv):
            return f"output not alpha-equivalent to input: {format_term(r.term)}"
    try:
        again = parse(format_term(s)).term
    except Exception as e:  # noqa: BLE001 - any failure is a round-trip bug
        return f"round-trip parse failed: {e}"
    if again != s:
        return "round-trip changed the term"
    return None


def _alpha_variant(s: Term, rng: random.Random) -> Term:
    """Rename binders apart with shuffled fresh choices, keeping free variables."""
    fv = free_vars(s)
    offset = rng.randint(0, 50)

    def shuffled(X):
        taken = {x.index for x in X}
        i = 1_000 + offset
        while i in taken:
            i += 1
        return Var(i)

    return rename_apart(IDENTITY, fv, s, shuffled).term


def check_alpha(s: Term, p: CheckParams) -> Optional[str]:
    """Reflexivity, symmetry, transitivity, and soundness of alpha-equivalence."""
    m = alpha_check(s, s)
    if m is None or any(x != y for x, y in m.rho.items()):
        return "not reflexive"
    rng = _rng(p, 5)
    t = _alpha_variant(s, rng)
    u = rename_apart(IDENTITY, free_vars(s), s).term
    st, ts = alpha_check(s, t), alpha_check(t, s)
    if st is None or ts is None:
        return "not symmetric"
    if st.rho != ts.delta or st.delta != ts.rho:
        return "symmetric maps are not swapped"
    tu = alpha_check(t, u)
    su = alpha_check(s, u)
    if tu is None or su is None:
        return "not transitive"
    if any(tu.rho.get(st.rho.get(x, x), st.rho.get(x, x)) != su.rho.get(x, x) for x in free_vars(s)):
        return "transitive maps do not compose"
    env = _random_env(rng, free_vars(s))
    env_t = Env({st.rho.get(x, x): v for x, v in env.items()})
    # only the functional reading is name-insensitive
    v = bisim(FConfig(EMPTY_CTX, env, s), FConfig(EMPTY_CTX, env_t, t), min(p.fuel, 128), p.domain)
    if isinstance(v, Inequivalent):
        return f"alpha-equivalent programs differ: {format_verdict(v)}"
    return None


def mutate(s: Term, rng: random.Random) -> Term:
    """Small semantic perturbation: a literal, a branch swap, or an action change."""
    nodes = list(iter_terms(s))
    target = rng.choice(nodes)

    def bump(e):
        match e:
            case Lit(v):
                return Lit(v + rng.choice((-1, 1)))
            case BinOp(op, l, r):
                return BinOp(op, bump(l), r) if rng.random() < 0.5 else BinOp(op, l, bump(r))
            case Ref():
                return BinOp("+", e, Lit(1))
        return e

    match target:
        case If(c, t, u):
            new = If(c, u, t)
        case Let(x, Extern(a), b):
            new = Let(x, Extern(a if a.index == 0 else type(a)(0)), b) if rng.random() < 0.5 else Let(x, Lit(0), b)
        case Let(x, e, b):
            new = Let(x, bump(e), b)
        case Ret(e):
            new = Ret(bump(e))
        case App(f, args) if args:
            i = rng.randrange(len(args))
            new = App(f, args[:i] + (bump(args[i]),) + args[i + 1:])
        case _:
            new = target
    return replace_subterm(s, target, new)


def replace_subterm(s: Term, target: Term, new: Term) -> Term:
    if s is target:
        return new
    match s:
        case Let(x, rhs, b):
            return Let(x, rhs, replace_subterm(b, target, new))
        case If(c, t, u):
            return If(c, replace_subterm(t, target, new), replace_subterm(u, target, new))
        case Fun(f, ps, b, c, g):
            return Fun(f, ps, replace_subterm(b, target, new), replace_subterm(c, target, new), g)
    return s


def check_oracle_agreement(s: Term, p: CheckParams) -> Optional[str]:
    """Bounded trace equivalence and bisimulation never give contradictory verdicts."""
    rng = _rng(p, 6)
    fuel = min(p.fuel, 48)
    env = _random_env(rng, free_vars(s))
    variants = [s, _alpha_variant(s, rng), mutate(s, rng), mutate(mutate(s, rng), rng)]
    t = variants[p.seed % len(variants)]
    env_t = env
    if t is variants[1]:
        m = alpha_check(s, t)
        env_t = Env({m.rho.get(x, x): v for x, v in env.items()})
    pairs = [(FConfig(EMPTY_CTX, env, s), FConfig(EMPTY_CTX, env_t, t)),
             (FConfig(EMPTY_CTX, env, s), IConfig(EMPTY_CTX, env_t, t))]
    for c1, c2 in pairs:
        tv = trace_equiv(c1, c2, fuel, p.domain)
        bv = bisim(c1, c2, fuel, p.domain)
        if contradictory(tv, bv):
            return f"trace_equiv says {format_verdict(tv)} but bisim says {format_verdict(bv)}"
        for v in (tv, bv):
            if c1.term is c2.term and c1.env == c2.env and type(c1) is type(c2) and isinstance(v, Inequivalent):
                return "identical configurations judged inequivalent"
    return None


def idrs_violation(c: Config, domain: tuple[int, ...]) -> Optional[str]:
    """Internal-determinism axioms at one configuration."""
    succ = successors(c, domain)
    step = classify(c)
    events = [e for e, _ in succ]
    if TAU in events and any(e is not TAU for e in events):
        return "both silent and external transitions"
    if len(set(events)) != len(events):
        return "two transitions share an event"
    match step:
        case Silent():
            if len(succ) != 1:
                return "silent configuration without exactly one successor"
        case External(_, x, _):
            if len(succ) != len(domain):
                return "external configuration without one successor per answer"
            targets = [d for _, d in succ]
            if any(d.term is not targets[0].term or d.ctx != targets[0].ctx for d in targets):
                return "external successors differ beyond the binder"
            if any(d.env.set(x, None) != targets[0].env.set(x, None) for d in targets):
                return "external successors differ beyond the binder"
        case Terminal():
            if succ:
                return "terminal configuration with successors"
    if res(c) is not None and not isinstance(step, Terminal):
        return "configuration with a result is not terminal"
    if isinstance(step, Silent) and isinstance(step.next, FConfig) and isinstance(c.term, App):
        if len(step.next.ctx) > len(c.ctx):
            return "application grew the context"
    return None


def check_idrs(s: Term, p: CheckParams, limit: int = 20) -> Optional[str]:
    for imperative in (False, True):
        for c in _harvest(s, 32, p.domain, limit, imperative):
            msg = idrs_violation(c, p.domain)
            if msg:
                return f"{msg} at {format_term(c.term)}"
    return None


CHECKS: dict[str, Check] = {
    "invariance": check_invariance,
    "liveness": check_liveness_sound,
    "coherence-midrun": check_coherence_midrun,
    "rassign": check_pipeline,
    "rassign-policies": check_rassign_policies,
    "alpha": check_alpha,
    "apart": check_apart,
    "oracle-agreement": check_oracle_agreement,
    "idrs": check_idrs,
}


# ---------------------------------------------------------------------------
# Shrinking and driving


def _literal_shrinks(e):
    match e:
        case Ref():
            yield Lit(0)
        case Lit(v) if v != 0:
            yield Lit(0)
            if abs(v) > 1:
                yield Lit(v // 2)
        case BinOp(op, l, r):
            yield l
            yield r
            for l2 in _literal_shrinks(l):
                yield BinOp(op, l2, r)
            for r2 in _literal_shrinks(r):
                yield BinOp(op, l, r2)


def shrink_candidates(s: Term):
    for node in iter_terms(s):
        for child in subterms(node):
            yield replace_subterm(s, node, child)
        if not isinstance(node, Ret):
            yield replace_subterm(s, node, Ret(Lit(0)))
        match node:
            case Ret(e):
                for e2 in _literal_shrinks(e):
                    yield replace_subterm(s, node, Ret(e2))
            case Let(x, e, b) if not isinstance(e, Extern):
                for e2 in _literal_shrinks(e):
                    yield replace_subterm(s, node, Let(x, e2, b))


def shrink(s: Term, fails: Callable[[Term], bool], budget: int = 500) -> Term:
    """Greedy structural minimization keeping ``fails`` true."""
    from .renaming import reachable_check

    tries = 0
    improved = True
    while improved and tries < budget:
        improved = False
        for cand in shrink_candidates(s):
            tries += 1
            if tries >= budget:
                break
            if cand == s or not reachable_check(cand):
                continue
            if fails(cand):
                s = cand
                improved = True
                break
    return s


@dataclass
class Failure:
    seed: int
    message: str
    program: str
    shrunk: str

    def as_dict(self) -> dict:
        return {"seed": self.seed, "verdict": "fail", "witness": self.message,
                "program": self.program, "shrunk": self.shrunk}


@dataclass
class FuzzReport:
    check: str
    seeds: int
    failures: list[Failure] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def as_dict(self) -> dict:
        return {"stage": f"fuzz:{self.check}", "verdict": "ok" if self.ok else "fail",
                "seeds": self.seeds, "failures": [f.as_dict() for f in self.failures]}


def _safe(check: Check, s: Term, params: CheckParams) -> Optional[str]:
    try:
        return check(s, params)
    except RecursionError:
        return None
    except Exception as e:  # noqa: BLE001 - crashes are failures to report
        return f"crash: {type(e).__name__}: {e}"


def run_seed(check_name: str, seed: int, gen: GenConfig, params: CheckParams) -> Optional[Failure]:
    check = CHECKS[check_name]
    s = gen_program(replace(gen, seed=seed))
    p = replace(params, seed=seed)
    msg = _safe(check, s, p)
    if msg is None:
        return None
    small = shrink(s, lambda t: _safe(check, t, p) is not None)
    return Failure(seed, msg, format_term(s), format_term(small))


def _run_seed_args(args):
    return run_seed(*args)


def fuzz(check_name: str, seeds: Iterable[int], gen: GenConfig = GenConfig(),
         params: CheckParams = CheckParams(), jobs: int = 1,
         corpus: Optional[Path] = None) -> FuzzReport:
    seeds = list(seeds)
    work = [(check_name, seed, gen, params) for seed in seeds]
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(jobs) as pool:
            results = list(pool.map(_run_seed_args, work, chunksize=16))
    else:
        results = [_run_seed_args(w) for w in work]
    report = FuzzReport(check_name, len(seeds), [r for r in results if r is not None])
    if corpus is not None and report.failures:
        corpus.mkdir(parents=True, exist_ok=True)
        for f in report.failures:
            path = corpus / f"{check_name}-{f.seed}.il"
            path.write_text(f"// {f.message}\n{f.shrunk}\n")
            (corpus / f"{check_name}-{f.seed}.json").write_text(json.dumps(f.as_dict(), indent=2))
    return report
