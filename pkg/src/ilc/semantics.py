"""Small-step semantics of IL, functional (closures) and imperative (blocks).

Both readings share one stepping function.  An :class:`FConfig` carries a
context of closures and re-enters the closure environment on application;
an :class:`IConfig` carries a context of blocks and keeps the caller's
environment, so application is a goto with parallel parameter assignment.
"""

from __future__ import annotations

import random
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

from .syntax import (
    App, Action, Ctx, EMPTY_CTX, EMPTY_ENV, Env, Extern, Fun, If, Let, Ret, Term, Var,
    beta, eval_expr, eval_expr_list,
)


@dataclass(frozen=True, slots=True)
class Closure:
    env: Env
    params: tuple[Var, ...]
    body: Term


@dataclass(frozen=True, slots=True)
class Block:
    params: tuple[Var, ...]
    body: Term


@dataclass(frozen=True, slots=True)
class FConfig:
    ctx: Ctx[Closure]
    env: Env
    term: Term

    imperative = False


@dataclass(frozen=True, slots=True)
class IConfig:
    ctx: Ctx[Block]
    env: Env
    term: Term

    imperative = True


Config = Union[FConfig, IConfig]


def fconfig(term: Term, env: Optional[Env] = None, ctx: Optional[Ctx] = None) -> FConfig:
    return FConfig(ctx or EMPTY_CTX, env or EMPTY_ENV, term)


def iconfig(term: Term, env: Optional[Env] = None, ctx: Optional[Ctx] = None) -> IConfig:
    return IConfig(ctx or EMPTY_CTX, env or EMPTY_ENV, term)


# Events: TAU, or (value, action) for an answered system call.
TAU = None
Event = Optional[tuple[int, Action]]


@dataclass(frozen=True, slots=True)
class Silent:
    next: Config


@dataclass(frozen=True, slots=True)
class External:
    action: Action
    binder: Var
    config: Config

    def answer(self, v: int) -> Config:
        c = self.config
        assert isinstance(c.term, Let)
        return type(c)(c.ctx, c.env.set(self.binder, v), c.term.body)


@dataclass(frozen=True, slots=True)
class Terminal:
    pass


TERMINAL = Terminal()
StepOutcome = Union[Silent, External, Terminal]


def classify(c: Config) -> StepOutcome:
    """Decide which rule applies to ``c``; stuck configurations are terminal."""
    s = c.term
    match s:
        case Let(x, Extern(a), _):
            return External(a, x, c)
        case Let(x, e, body):
            v = eval_expr(e, c.env)
            if v is None:
                return TERMINAL
            return Silent(type(c)(c.ctx, c.env.set(x, v), body))
        case If(e, then, orelse):
            v = eval_expr(e, c.env)
            if v is None:
                return TERMINAL
            return Silent(type(c)(c.ctx, c.env, then if beta(v) else orelse))
        case Ret():
            return TERMINAL
        case Fun(f, params, body, cont, _):
            if c.imperative:
                entry = Block(params, body)
            else:
                entry = Closure(c.env, params, body)
            return Silent(type(c)(c.ctx.push(f, entry), c.env, cont))
        case App(f, args):
            vals = eval_expr_list(args, c.env)
            if vals is None:
                return TERMINAL
            callee = c.ctx.lookup(f)
            if callee is None or len(callee.params) != len(vals):
                return TERMINAL
            ctx = c.ctx.rewind(f)
            if c.imperative:
                return Silent(IConfig(ctx, c.env.set_many(callee.params, vals), callee.body))
            return Silent(FConfig(ctx, callee.env.set_many(callee.params, vals), callee.body))
    raise TypeError(f"not a term: {s!r}")


def successors(c: Config, domain: Iterable[int]) -> list[tuple[Event, Config]]:
    """All labelled transitions from ``c`` with system-call answers drawn from ``domain``."""
    match classify(c):
        case Silent(nxt):
            return [(TAU, nxt)]
        case External(a, _, _) as ext:
            return [((v, a), ext.answer(v)) for v in domain]
    return []


def res(c: Config) -> Optional[int]:
    if isinstance(c.term, Ret):
        return eval_expr(c.term.expr, c.env)
    return None


def strip(ctx: Ctx[Closure]) -> Ctx[Block]:
    return ctx.map(lambda cl: Block(cl.params, cl.body))


# ---------------------------------------------------------------------------
# Running


Oracle = Callable[[Action, int], Optional[int]]


def fixed_oracle(value: int) -> Oracle:
    return lambda _a, _n: value


def scripted_oracle(values: Sequence[int]) -> Oracle:
    """Answer the n-th system call with ``values[n]``; ``None`` once the script runs out."""
    return lambda _a, n: values[n] if n < len(values) else None


def seeded_oracle(seed: int, lo: int = -8, hi: int = 8) -> Oracle:
    rng = random.Random(seed)
    return lambda _a, _n: rng.randint(lo, hi)


@dataclass
class RunResult:
    config: Config
    value: Optional[int]
    steps: int
    status: str  # "terminal", "fuel" or "blocked" (oracle gave no answer)
    events: list[tuple[int, Action]] = field(default_factory=list)

    @property
    def terminated(self) -> bool:
        return self.status == "terminal"


def run(c: Config, fuel: int = 100_000, oracle: Optional[Oracle] = None) -> RunResult:
    oracle = oracle or fixed_oracle(0)
    events: list[tuple[int, Action]] = []
    for steps in range(fuel + 1):
        match classify(c):
            case Terminal():
                return RunResult(c, res(c), steps, "terminal", events)
            case _ if steps == fuel:
                break
            case Silent(nxt):
                c = nxt
            case External(a, _, _) as ext:
                v = oracle(a, len(events))
                if v is None:
                    return RunResult(c, None, steps, "blocked", events)
                events.append((v, a))
                c = ext.answer(v)
    return RunResult(c, None, fuel, "fuel", events)


def reachable_configs(c: Config, fuel: int, domain: Iterable[int], limit: int = 10_000) -> list[Config]:
    """Breadth-first sample of configurations reachable from ``c`` within ``fuel`` steps."""
    domain = tuple(domain)
    seen = {c}
    out = [c]
    frontier = [c]
    for _ in range(fuel):
        nxt = []
        for cur in frontier:
            for _, succ in successors(cur, domain):
                if succ not in seen:
                    seen.add(succ)
                    out.append(succ)
                    nxt.append(succ)
                    if len(out) >= limit:
                        return out
        if not nxt:
            break
        frontier = nxt
    return out
