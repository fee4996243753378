"""Seeded random generator of well-formed IL programs."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .renaming import applied_in
from .syntax import (
    App, BinOp, Expr, Extern, Fun, If, Label, Let, Lit, Ref, Ret, Term, Var,
    action, label, var,
)

VAR_NAMES = ("x", "y", "z", "w", "u", "t", "r", "q")
LABEL_NAMES = ("f", "g", "h", "k")
ACTION_NAMES = ("A", "B", "C", "D")
OPS = ("+", "-", "*", "/", "<=", "<", "==", "!=")
OP_WEIGHTS = (4, 3, 2, 1, 2, 2, 2, 1)


@dataclass(frozen=True)
class GenConfig:
    seed: int = 0
    depth: int = 6
    var_pool: int = 4
    label_pool: int = 2
    action_pool: int = 2
    extern_prob: float = 0.15
    inputs: int = 0  # how many pool variables may occur free

    @property
    def input_vars(self) -> tuple[Var, ...]:
        return tuple(var(n) for n in VAR_NAMES[: self.inputs])


class _Gen:
    def __init__(self, cfg: GenConfig):
        self.cfg = cfg
        self.rng = random.Random(cfg.seed)
        self.vars = [var(n) for n in VAR_NAMES[: max(1, cfg.var_pool)]]
        self.labels = [label(n) for n in LABEL_NAMES[: max(1, cfg.label_pool)]]
        self.actions = [action(n) for n in ACTION_NAMES[: max(1, cfg.action_pool)]]

    def expr(self, depth: int, scope: tuple[Var, ...]) -> Expr:
        rng = self.rng
        if depth > 0 and rng.random() < 0.35:
            op = rng.choices(OPS, OP_WEIGHTS)[0]
            return BinOp(op, self.expr(depth - 1, scope), self.expr(depth - 1, scope))
        if scope and rng.random() < 0.7:
            return Ref(rng.choice(scope))
        return Lit(rng.randint(-2, 3))

    def leaf(self, scope, labels) -> Term:
        rng = self.rng
        if labels and rng.random() < 0.5:
            f = rng.choice(sorted(labels))
            return App(f, tuple(self.expr(1, scope) for _ in range(labels[f])))
        return Ret(self.expr(1, scope))

    def term(self, depth: int, scope: tuple[Var, ...], labels: dict[Label, int]) -> Term:
        rng = self.rng
        if depth <= 0:
            return self.leaf(scope, labels)
        kind = rng.choices(("let", "if", "fun", "leaf"), (4, 2, 2, 1))[0]
        if kind == "let":
            x = rng.choice(self.vars)
            if rng.random() < self.cfg.extern_prob:
                rhs = Extern(rng.choice(self.actions))
            else:
                rhs = self.expr(2, scope)
            inner = scope if x in scope else scope + (x,)
            return Let(x, rhs, self.term(depth - 1, inner, labels))
        if kind == "if":
            return If(self.expr(2, scope),
                      self.term(depth - 1, scope, labels),
                      self.term(depth - 1, scope, labels))
        if kind == "fun":
            f = rng.choice(self.labels)
            params = tuple(rng.sample(self.vars, rng.randint(0, min(2, len(self.vars)))))
            inner_labels = {**labels, f: len(params)}
            body_scope = scope + tuple(p for p in params if p not in scope)
            body = self.term(depth - 1, body_scope, inner_labels)
            cont = self.term(depth - 1, scope, inner_labels)
            if not applied_in(f, cont):
                call = App(f, tuple(self.expr(1, scope) for _ in params))
                guard = self.expr(1, scope)
                cont = If(guard, cont, call) if rng.random() < 0.5 else If(guard, call, cont)
            return Fun(f, params, body, cont)
        return self.leaf(scope, labels)


def gen_program(cfg: GenConfig) -> Term:
    """A closed (up to ``cfg.inputs``), reachable, depth-bounded program; deterministic in the seed."""
    g = _Gen(cfg)
    if cfg.depth <= 0:
        return Ret(Lit(g.rng.randint(-2, 3)))
    return g.term(cfg.depth, cfg.input_vars, {})


def gen_env(rng: random.Random, xs, lo: int = -3, hi: int = 5) -> dict[Var, int]:
    return {x: rng.randint(lo, hi) for x in xs}
