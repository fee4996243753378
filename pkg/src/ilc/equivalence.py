"""Bounded semantic oracles: partial traces, trace equivalence and bisimilarity.

Every procedure here is fuel-bounded.  Fuel counts transition-rule
applications along one explored branch; a branch that runs out of fuel
before reaching a terminal configuration is *cut*, and cuts are what turn
a would-be verdict into :class:`Unknown`.
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass
from typing import Optional, Union

from .semantics import (
    Closure, Config, External, FConfig, IConfig, Silent, Terminal,
    classify, res,
)
from .syntax import Action, EMPTY_CTX, Env, Term

DEFAULT_FUEL = 256
DEFAULT_DOMAIN = (0, 1)
MAX_TRACES = 50_000
MAX_STATES = 200_000


@dataclass(frozen=True, order=True, slots=True)
class PartialTrace:
    """System-call events followed by either "still running" or a result (``None`` is failure)."""

    events: tuple[tuple[int, Action], ...]
    open: bool
    value: Optional[int] = None

    def _sort_key(self):
        end = (0, 0) if self.open else ((1, 0) if self.value is None else (2, self.value))
        return (len(self.events), tuple((v, a.index) for v, a in self.events), end)

    def __str__(self) -> str:
        parts = [f"{v}={a}" for v, a in self.events]
        if self.open:
            parts.append("...")
        else:
            parts.append("-> bot" if self.value is None else f"-> {self.value}")
        return " ".join(parts)


def canonical(traces: Iterable[PartialTrace]) -> list[PartialTrace]:
    return sorted(traces, key=PartialTrace._sort_key)


@dataclass(frozen=True)
class Equivalent:
    fuel: int


@dataclass(frozen=True)
class Inequivalent:
    witness: PartialTrace
    side: int  # which configuration (1 or 2) produces the witness


@dataclass(frozen=True)
class Unknown:
    reason: str = "fuel exhausted"


EquivVerdict = Union[Equivalent, Inequivalent, Unknown]


def _key(c: Config):
    """Hashable identity of a configuration; terms are compared by object identity."""
    def entry(v):
        if v is None:
            return None
        if isinstance(v, Closure):
            return (v.env, v.params, id(v.body))
        return (v.params, id(v.body))
    ctx = tuple((f, entry(v)) for f, v in c.ctx.entries)
    return (c.imperative, ctx, c.env, id(c.term))


# ---------------------------------------------------------------------------
# Traces


class _Budget(Exception):
    pass


@dataclass
class TraceSet:
    traces: frozenset[PartialTrace]
    # event prefixes at which some branch ran out of fuel
    cuts: frozenset[tuple[tuple[int, Action], ...]]
    complete: bool = True  # False when the trace budget was exceeded

    def definite(self, trace: PartialTrace) -> bool:
        """True if more fuel could never add ``trace`` to this set."""
        ev = trace.events
        return not any(ev[: len(cut)] == cut for cut in self.cuts)


def _enumerate(c: Config, fuel: int, domain: tuple[int, ...], memo: dict, limit: int):
    key = (_key(c), fuel)
    hit = memo.get(key)
    if hit is not None:
        return hit
    open_ = PartialTrace((), True)
    traces = {open_}
    cuts: set = set()
    cur, left = c, fuel
    while True:
        step = classify(cur)
        if isinstance(step, Terminal):
            traces.add(PartialTrace((), False, res(cur)))
            break
        if left == 0:
            cuts.add(())
            break
        if isinstance(step, Silent):
            cur, left = step.next, left - 1
            continue
        assert isinstance(step, External)
        for v in domain:
            ev = (v, step.action)
            sub_t, sub_c = _enumerate(step.answer(v), left - 1, domain, memo, limit)
            traces.update(PartialTrace((ev,) + t.events, t.open, t.value) for t in sub_t)
            cuts.update((ev,) + cut for cut in sub_c)
            if len(traces) > limit:
                raise _Budget
        break
    out = (frozenset(traces), frozenset(cuts))
    memo[key] = out
    return out


def traces(c: Config, fuel: int = DEFAULT_FUEL, domain: Iterable[int] = DEFAULT_DOMAIN,
           limit: int = MAX_TRACES) -> TraceSet:
    """All partial traces ``c`` produces within ``fuel`` steps per branch, answers drawn from ``domain``."""
    domain = tuple(domain)
    if not domain:
        raise ValueError("domain must be nonempty")
    try:
        ts, cuts = _enumerate(c, fuel, domain, {}, limit)
    except _Budget:
        return TraceSet(frozenset(), frozenset(), complete=False)
    return TraceSet(ts, cuts)


def trace_equiv(c1: Config, c2: Config, fuel: int = DEFAULT_FUEL,
                domain: Iterable[int] = DEFAULT_DOMAIN, limit: int = MAX_TRACES) -> EquivVerdict:
    domain = tuple(domain)
    t1 = traces(c1, fuel, domain, limit)
    t2 = traces(c2, fuel, domain, limit)
    if not (t1.complete and t2.complete):
        return Unknown("trace budget exceeded")
    if t1.traces == t2.traces:
        return Equivalent(fuel)
    witnesses = [(t, 1) for t in t1.traces - t2.traces if t2.definite(t)]
    witnesses += [(t, 2) for t in t2.traces - t1.traces if t1.definite(t)]
    if not witnesses:
        return Unknown()
    t, side = min(witnesses, key=lambda w: (w[0]._sort_key(), w[1]))
    return Inequivalent(t, side)


# ---------------------------------------------------------------------------
# Bisimulation


def _commit(c: Config, fuel: int):
    """Run silently to a terminal or ready configuration: (kind, config, fuel left)."""
    while True:
        step = classify(c)
        if isinstance(step, Terminal):
            return "terminal", c, fuel, step
        if isinstance(step, External):
            return "ready", c, fuel, step
        if fuel == 0:
            return "cut", c, fuel, step
        c, fuel = step.next, fuel - 1


class _Bisim:
    def __init__(self, domain: tuple[int, ...], max_states: int):
        self.domain = domain
        self.memo: dict = {}
        self.max_states = max_states

    def go(self, c1: Config, c2: Config, f1: int, f2: int) -> EquivVerdict:
        key = (_key(c1), _key(c2), f1, f2)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        if len(self.memo) >= self.max_states:
            raise _Budget
        verdict = self._step(c1, c2, f1, f2)
        self.memo[key] = verdict
        return verdict

    def _step(self, c1, c2, f1, f2) -> EquivVerdict:
        k1, d1, f1, s1 = _commit(c1, f1)
        k2, d2, f2, s2 = _commit(c2, f2)
        if k1 == "terminal" and k2 == "terminal":
            r1, r2 = res(d1), res(d2)
            if r1 == r2:
                return Equivalent(0)
            return Inequivalent(PartialTrace((), False, r1), 1)
        if k1 == "terminal" and k2 == "ready":
            return Inequivalent(PartialTrace((), False, res(d1)), 1)
        if k1 == "ready" and k2 == "terminal":
            return Inequivalent(PartialTrace((), False, res(d2)), 2)
        if k1 == "ready" and k2 == "ready":
            if s1.action != s2.action:
                return Inequivalent(PartialTrace(((self.domain[0], s1.action),), True), 1)
            if f1 == 0 or f2 == 0:
                return Unknown()
            unknown = False
            for v in self.domain:
                sub = self.go(s1.answer(v), s2.answer(v), f1 - 1, f2 - 1)
                if isinstance(sub, Inequivalent):
                    w = sub.witness
                    return Inequivalent(
                        PartialTrace(((v, s1.action),) + w.events, w.open, w.value), sub.side)
                unknown = unknown or isinstance(sub, Unknown)
            return Unknown() if unknown else Equivalent(0)
        return Unknown()


def bisim(c1: Config, c2: Config, fuel: int = DEFAULT_FUEL,
          domain: Iterable[int] = DEFAULT_DOMAIN, max_states: int = MAX_STATES) -> EquivVerdict:
    """Bounded bisimilarity check, each side advancing with its own fuel along every branch."""
    domain = tuple(domain)
    if not domain:
        raise ValueError("domain must be nonempty")
    try:
        v = _Bisim(domain, max_states).go(c1, c2, fuel, fuel)
    except _Budget:
        return Unknown("state budget exceeded")
    return Equivalent(fuel) if isinstance(v, Equivalent) else v


def invariance_check(s: Term, env: Optional[Env] = None, fuel: int = DEFAULT_FUEL,
                     domain: Iterable[int] = DEFAULT_DOMAIN) -> EquivVerdict:
    """Compare the functional and imperative readings of closed program ``s`` under ``env``."""
    env = env if env is not None else Env()
    return bisim(FConfig(EMPTY_CTX, env, s), IConfig(EMPTY_CTX, env, s), fuel, domain)


def is_definite(v: EquivVerdict) -> bool:
    return not isinstance(v, Unknown)


def contradictory(a: EquivVerdict, b: EquivVerdict) -> bool:
    return ((isinstance(a, Equivalent) and isinstance(b, Inequivalent))
            or (isinstance(a, Inequivalent) and isinstance(b, Equivalent)))


def format_verdict(v: EquivVerdict) -> str:
    match v:
        case Equivalent(fuel):
            return f"equivalent (fuel {fuel})"
        case Inequivalent(w, side):
            return f"inequivalent: side {side} alone produces [{w}]"
        case Unknown(reason):
            return f"unknown ({reason})"
    raise TypeError(v)
