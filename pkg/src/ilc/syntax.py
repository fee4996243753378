"""Core syntax of IL: identifiers, values, expressions, terms, annotations and contexts."""

from __future__ import annotations

import threading
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass
from typing import Callable, Generic, Optional, TypeVar, Union

# Indices at or above this are never handed out by source interning; the
# reserved-region fresh policy draws from here.
RESERVED_BASE = 1 << 20

_INT_MASK = (1 << 64) - 1
_INT_SIGN = 1 << 63


class Alphabet:
    """Bijective interning table between names and natural indices."""

    def __init__(self, kind: str, generated_prefix: str = "", reserved_prefix: str = ""):
        self.kind = kind
        self._generated_prefix = generated_prefix or kind[0]
        self._reserved_prefix = reserved_prefix or "r"
        self._lock = threading.Lock()
        self._by_name: dict[str, int] = {}
        self._names: dict[int, str] = {}
        self._next = 0

    def intern(self, name: str) -> int:
        with self._lock:
            idx = self._by_name.get(name)
            if idx is not None:
                return idx
            while self._next in self._names:
                self._next += 1
            idx = self._next
            self._next += 1
            self._by_name[name] = idx
            self._names[idx] = name
            return idx

    def name(self, index: int) -> str:
        with self._lock:
            name = self._names.get(index)
            if name is not None:
                return name
            if index >= RESERVED_BASE:
                name = f"{self._reserved_prefix}{index - RESERVED_BASE}"
            else:
                name = f"{self._generated_prefix}{index}"
            while name in self._by_name:
                name += "'"
            self._by_name[name] = index
            self._names[index] = name
            return name


VARIABLES = Alphabet("var", "v", "r")
LABELS = Alphabet("label", "l", "lr")
ACTIONS = Alphabet("action", "a", "ar")


@dataclass(frozen=True, order=True, slots=True)
class Var:
    index: int

    @property
    def name(self) -> str:
        return VARIABLES.name(self.index)

    def __str__(self) -> str:
        return self.name

    def __repr__(self) -> str:
        return self.name


@dataclass(frozen=True, order=True, slots=True)
class Label:
    index: int

    @property
    def name(self) -> str:
        return LABELS.name(self.index)

    def __str__(self) -> str:
        return self.name

    def __repr__(self) -> str:
        return self.name


@dataclass(frozen=True, order=True, slots=True)
class Action:
    index: int

    @property
    def name(self) -> str:
        return ACTIONS.name(self.index)

    def __str__(self) -> str:
        return self.name

    def __repr__(self) -> str:
        return self.name


def var(name: str) -> Var:
    return Var(VARIABLES.intern(name))


def label(name: str) -> Label:
    return Label(LABELS.intern(name))


def action(name: str) -> Action:
    return Action(ACTIONS.intern(name))


def vars_(names: str) -> tuple[Var, ...]:
    """``vars_("x y z")`` -> three interned variables."""
    return tuple(var(n) for n in names.split())


# ---------------------------------------------------------------------------
# Values and expressions


def wrap(v: int) -> int:
    """Reduce an integer to signed 64-bit two's complement."""
    v &= _INT_MASK
    return v - (1 << 64) if v & _INT_SIGN else v


def beta(v: int) -> int:
    return 0 if v == 0 else 1


@dataclass(frozen=True, slots=True)
class Lit:
    value: int


@dataclass(frozen=True, slots=True)
class Ref:
    var: Var


@dataclass(frozen=True, slots=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


Expr = Union[Lit, Ref, BinOp]

BINOPS = ("+", "-", "*", "/", "<=", "<", "==", "!=")


@dataclass(frozen=True, slots=True)
class Extern:
    """The system-call right-hand side ``extern a`` of a let binding."""

    action: Action


ExtExpr = Union[Lit, Ref, BinOp, Extern]


def _div(a: int, b: int) -> Optional[int]:
    if b == 0:
        return None
    q = abs(a) // abs(b)
    return wrap(q if (a < 0) == (b < 0) else -q)


def _apply(op: str, a: int, b: int) -> Optional[int]:
    match op:
        case "+":
            return wrap(a + b)
        case "-":
            return wrap(a - b)
        case "*":
            return wrap(a * b)
        case "/":
            return _div(a, b)
        case "<=":
            return int(a <= b)
        case "<":
            return int(a < b)
        case "==":
            return int(a == b)
        case "!=":
            return int(a != b)
    raise ValueError(f"unknown operator {op!r}")


def eval_expr(e: Expr, env: Mapping[Var, int]) -> Optional[int]:
    """Evaluate ``e`` under ``env``; ``None`` is failure (undefined variable or division by zero)."""
    match e:
        case Lit(v):
            return v
        case Ref(x):
            return env.get(x)
        case BinOp(op, l, r):
            a = eval_expr(l, env)
            if a is None:
                return None
            b = eval_expr(r, env)
            if b is None:
                return None
            return _apply(op, a, b)
    raise TypeError(f"not an expression: {e!r}")


def eval_expr_list(es: Iterable[Expr], env: Mapping[Var, int]) -> Optional[list[int]]:
    out = []
    for e in es:
        v = eval_expr(e, env)
        if v is None:
            return None
        out.append(v)
    return out


def expr_vars(e: ExtExpr) -> frozenset[Var]:
    match e:
        case Lit() | Extern():
            return frozenset()
        case Ref(x):
            return frozenset((x,))
        case BinOp(_, l, r):
            return expr_vars(l) | expr_vars(r)
    raise TypeError(f"not an expression: {e!r}")


def exprs_vars(es: Iterable[ExtExpr]) -> frozenset[Var]:
    out: frozenset[Var] = frozenset()
    for e in es:
        out |= expr_vars(e)
    return out


# ---------------------------------------------------------------------------
# Environments


class Env(Mapping[Var, int]):
    """Immutable variable environment; absent variables are undefined."""

    __slots__ = ("_d", "_hash")

    def __init__(self, items: Union[Mapping[Var, Optional[int]], Iterable[tuple[Var, Optional[int]]]] = ()):
        pairs = items.items() if isinstance(items, Mapping) else items
        self._d = {x: wrap(v) for x, v in pairs if v is not None}
        self._hash: Optional[int] = None

    def __getitem__(self, x: Var) -> int:
        return self._d[x]

    def __iter__(self) -> Iterator[Var]:
        return iter(self._d)

    def __len__(self) -> int:
        return len(self._d)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._d.items()))
        return self._hash

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Env):
            return self._d == other._d
        return NotImplemented

    def __repr__(self) -> str:
        body = ", ".join(f"{x}={v}" for x, v in sorted(self._d.items()))
        return f"Env({{{body}}})"

    def set(self, x: Var, v: Optional[int]) -> "Env":
        return self.set_many((x,), (v,))

    def set_many(self, xs: Iterable[Var], vs: Iterable[Optional[int]]) -> "Env":
        new = Env.__new__(Env)
        d = dict(self._d)
        for x, v in zip(xs, vs):
            if v is None:
                d.pop(x, None)
            else:
                d[x] = wrap(v)
        new._d = d
        new._hash = None
        return new

    def agrees(self, other: Mapping[Var, int], on: Iterable[Var]) -> bool:
        """``self =_X other`` for ``X = on``."""
        return all(self.get(x) == other.get(x) for x in on)


EMPTY_ENV = Env()


# ---------------------------------------------------------------------------
# Terms


@dataclass(frozen=True, slots=True)
class Let:
    var: Var
    rhs: ExtExpr
    body: "Term"


@dataclass(frozen=True, slots=True)
class If:
    cond: Expr
    then: "Term"
    orelse: "Term"


@dataclass(frozen=True, slots=True)
class Ret:
    expr: Expr


@dataclass(frozen=True, slots=True)
class Fun:
    label: Label
    params: tuple[Var, ...]
    body: "Term"
    cont: "Term"
    globals: Optional[frozenset[Var]] = None


@dataclass(frozen=True, slots=True)
class App:
    label: Label
    args: tuple[Expr, ...]


Term = Union[Let, If, Ret, Fun, App]


def subterms(s: Term) -> tuple[Term, ...]:
    match s:
        case Let(_, _, b):
            return (b,)
        case If(_, t, e):
            return (t, e)
        case Fun(_, _, b, c, _):
            return (b, c)
    return ()


def iter_terms(s: Term) -> Iterator[Term]:
    """Pre-order traversal of every subterm of ``s``, ``s`` included."""
    stack = [s]
    while stack:
        t = stack.pop()
        yield t
        stack.extend(reversed(subterms(t)))


def term_size(s: Term) -> int:
    return sum(1 for _ in iter_terms(s))


def free_vars(s: Term) -> frozenset[Var]:
    match s:
        case Let(x, rhs, body):
            return expr_vars(rhs) | (free_vars(body) - {x})
        case If(c, t, e):
            return expr_vars(c) | free_vars(t) | free_vars(e)
        case Ret(e):
            return expr_vars(e)
        case Fun(_, params, body, cont, _):
            return (free_vars(body) - set(params)) | free_vars(cont)
        case App(_, args):
            return exprs_vars(args)
    raise TypeError(f"not a term: {s!r}")


def bound_vars(s: Term) -> frozenset[Var]:
    out: set[Var] = set()
    for t in iter_terms(s):
        match t:
            case Let(x, _, _):
                out.add(x)
            case Fun(_, params, _, _, _):
                out.update(params)
    return frozenset(out)


def occ_vars(s: Term) -> frozenset[Var]:
    return free_vars(s) | bound_vars(s)


def free_labels(s: Term) -> frozenset[Label]:
    match s:
        case Let(_, _, body):
            return free_labels(body)
        case If(_, t, e):
            return free_labels(t) | free_labels(e)
        case Ret():
            return frozenset()
        case Fun(f, _, body, cont, _):
            return (free_labels(body) | free_labels(cont)) - {f}
        case App(f, _):
            return frozenset((f,))
    raise TypeError(f"not a term: {s!r}")


# ---------------------------------------------------------------------------
# Annotations


@dataclass(frozen=True, slots=True)
class Ann:
    """Live-set annotation tree, shaped like the term it annotates."""

    live: frozenset[Var]
    children: tuple["Ann", ...] = ()

    def __iter__(self) -> Iterator["Ann"]:
        stack = [self]
        while stack:
            a = stack.pop()
            yield a
            stack.extend(reversed(a.children))


def leaf(live: Iterable[Var] = ()) -> Ann:
    return Ann(frozenset(live))


def ann_wellformed(s: Term, a: Ann) -> bool:
    subs = subterms(s)
    if len(subs) != len(a.children):
        return False
    return all(ann_wellformed(t, b) for t, b in zip(subs, a.children))


# ---------------------------------------------------------------------------
# Contexts

K = TypeVar("K")
T = TypeVar("T")


@dataclass(frozen=True, slots=True)
class Ctx(Generic[T]):
    """Named definitions, most recent last. An entry holding ``None`` counts as undefined."""

    entries: tuple[tuple[Label, Optional[T]], ...] = ()

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[tuple[Label, Optional[T]]]:
        return iter(self.entries)

    def push(self, name: Label, value: Optional[T]) -> "Ctx[T]":
        return Ctx(self.entries + ((name, value),))

    def _position(self, name: Label) -> Optional[int]:
        for i in range(len(self.entries) - 1, -1, -1):
            if self.entries[i][0] == name:
                return i
        return None

    def lookup(self, name: Label) -> Optional[T]:
        i = self._position(name)
        return None if i is None else self.entries[i][1]

    def rewind(self, name: Label) -> Optional["Ctx[T]"]:
        i = self._position(name)
        if i is None or self.entries[i][1] is None:
            return None
        return Ctx(self.entries[: i + 1])

    def domain(self) -> frozenset[Label]:
        return frozenset(f for f in {n for n, _ in self.entries} if self.lookup(f) is not None)

    def map(self, fn: Callable[[T], Optional[K]]) -> "Ctx[K]":
        return Ctx(tuple((f, None if v is None else fn(v)) for f, v in self.entries))

    def prefix(self, n: int) -> "Ctx[T]":
        return Ctx(self.entries[:n])


EMPTY_CTX: Ctx = Ctx()


def ctx_lookup(c: Ctx[T], f: Label) -> Optional[T]:
    return c.lookup(f)


def ctx_rewind(c: Ctx[T], f: Label) -> Optional[Ctx[T]]:
    return c.rewind(f)


@dataclass(frozen=True, slots=True)
class Cofinite:
    """All variables except ``excluded``; ``Cofinite()`` is the whole alphabet."""

    excluded: frozenset[Var] = frozenset()

    def __contains__(self, x: object) -> bool:
        return x not in self.excluded


ALL_VARS = Cofinite()

VarSet = Union[frozenset, set, Cofinite]


def subset_of(xs: Iterable[Var], bound: VarSet) -> bool:
    if isinstance(bound, Cofinite):
        return bound.excluded.isdisjoint(xs)
    return all(x in bound for x in xs)


def ctx_restrict(lam: Ctx[frozenset[Var]], bound: VarSet) -> Ctx[frozenset[Var]]:
    """Replace every entry whose globals are not within ``bound`` by an undefined entry."""
    return Ctx(tuple(
        (f, g if g is not None and subset_of(g, bound) else None) for f, g in lam.entries
    ))


# ---------------------------------------------------------------------------
# Renamings


class Renaming(Mapping[Var, Var]):
    """Total map on variables, identity outside a finite support."""

    __slots__ = ("_d",)

    def __init__(self, items: Union[Mapping[Var, Var], Iterable[tuple[Var, Var]]] = ()):
        pairs = items.items() if isinstance(items, Mapping) else items
        self._d = {x: y for x, y in pairs if x != y}

    def __call__(self, x: Var) -> Var:
        return self._d.get(x, x)

    def __getitem__(self, x: Var) -> Var:
        return self._d.get(x, x)

    def __iter__(self) -> Iterator[Var]:
        return iter(self._d)

    def __len__(self) -> int:
        return len(self._d)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Renaming):
            return self._d == other._d
        return NotImplemented

    def __hash__(self) -> int:
        return hash(frozenset(self._d.items()))

    def __repr__(self) -> str:
        body = ", ".join(f"{x}->{y}" for x, y in sorted(self._d.items()))
        return f"Renaming({{{body}}})"

    def update(self, xs: Iterable[Var], ys: Iterable[Var]) -> "Renaming":
        d = dict(self._d)
        for x, y in zip(xs, ys):
            d[x] = y
        return Renaming(d)

    def then(self, other: "Renaming") -> "Renaming":
        """``other . self``: apply ``self`` first."""
        keys = set(self._d) | set(other._d)
        return Renaming((x, other(self(x))) for x in keys)

    def image(self, xs: Iterable[Var]) -> frozenset[Var]:
        return frozenset(self(x) for x in xs)

    def injective_on(self, xs: Iterable[Var]) -> bool:
        xs = set(xs)
        return len(self.image(xs)) == len(xs)

    @property
    def support(self) -> frozenset[Var]:
        return frozenset(self._d)


IDENTITY = Renaming()


def rename_expr(rho: Callable[[Var], Var], e: ExtExpr) -> ExtExpr:
    match e:
        case Lit() | Extern():
            return e
        case Ref(x):
            return Ref(rho(x))
        case BinOp(op, l, r):
            return BinOp(op, rename_expr(rho, l), rename_expr(rho, r))
    raise TypeError(f"not an expression: {e!r}")


def rename(rho: Callable[[Var], Var], s: Term) -> Term:
    """Apply ``rho`` to every variable occurrence of ``s``, binders and globals included."""
    match s:
        case Let(x, rhs, body):
            return Let(rho(x), rename_expr(rho, rhs), rename(rho, body))
        case If(c, t, e):
            return If(rename_expr(rho, c), rename(rho, t), rename(rho, e))
        case Ret(e):
            return Ret(rename_expr(rho, e))
        case Fun(f, params, body, cont, glob):
            return Fun(
                f,
                tuple(rho(x) for x in params),
                rename(rho, body),
                rename(rho, cont),
                None if glob is None else frozenset(rho(x) for x in glob),
            )
        case App(f, args):
            return App(f, tuple(rename_expr(rho, e) for e in args))
    raise TypeError(f"not a term: {s!r}")


def rename_ann(rho: Callable[[Var], Var], a: Ann) -> Ann:
    return Ann(frozenset(rho(x) for x in a.live), tuple(rename_ann(rho, b) for b in a.children))


def rename_ctx(rho: Callable[[Var], Var], lam: Ctx[frozenset[Var]]) -> Ctx[frozenset[Var]]:
    return lam.map(lambda g: frozenset(rho(x) for x in g))


def strip_globals(s: Term) -> Term:
    match s:
        case Let(x, rhs, body):
            return Let(x, rhs, strip_globals(body))
        case If(c, t, e):
            return If(c, strip_globals(t), strip_globals(e))
        case Fun(f, params, body, cont, _):
            return Fun(f, params, strip_globals(body), strip_globals(cont), None)
    return s
