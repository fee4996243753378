"""Surface syntax for IL programs: tokenizer, parser and pretty-printer.

Grammar::

    s      ::= ["@" varset] s0
    s0     ::= "let" VAR "=" (expr | "extern" ACTION) "in" s
             | "if" expr "then" s "else" s
             | "fun" LABEL params [":" varset] "=" s "in" s
             | LABEL "(" [expr ("," expr)*] ")"
             | LABEL atom+
             | expr
    params ::= "(" [VAR ("," VAR)*] ")" | VAR+
    varset ::= "{" [VAR ("," VAR)*] "}"

Comments run from ``//`` to the end of the line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from .syntax import (
    Ann, App, BinOp, Expr, Extern, Fun, If, Let, Lit, Ref, Ret, Term,
    action, label, subterms, var, wrap,
)

KEYWORDS = frozenset({"let", "in", "if", "then", "else", "fun", "extern"})

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r\n]+|//[^\n]*)
  | (?P<int>[0-9]+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<op><=|==|!=|[-+*/<=(),{}:@])
""", re.VERBOSE)

_PREC = {"<=": 1, "<": 1, "==": 1, "!=": 1, "+": 2, "-": 2, "*": 3, "/": 3}


class ParseError(Exception):
    def __init__(self, line: int, col: int, message: str):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col
        self.message = message


@dataclass
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(line, pos - line_start + 1, f"unexpected character {text[pos]!r}")
        kind = m.lastgroup
        chunk = m.group()
        if kind != "ws":
            if kind == "ident" and chunk in KEYWORDS:
                kind = "kw"
            tokens.append(Token(kind, chunk, line, pos - line_start + 1))
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


@dataclass
class ParseResult:
    term: Term
    ann: Optional[Ann]
    # id(subterm) -> (line, col) for every subterm of ``term``
    positions: dict[int, tuple[int, int]] = field(default_factory=dict, repr=False)

    def position(self, t: Term) -> Optional[tuple[int, int]]:
        return self.positions.get(id(t))


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0
        self.positions: dict[int, tuple[int, int]] = {}
        self.anns: dict[int, frozenset] = {}
        self.unannotated = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, msg: str, tok: Optional[Token] = None):
        tok = tok or self.tok
        raise ParseError(tok.line, tok.col, msg)

    def advance(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def at(self, text: str) -> bool:
        return self.tok.text == text and self.tok.kind in ("op", "kw")

    def expect(self, text: str) -> Token:
        if not self.at(text):
            found = self.tok.text or "end of input"
            self.error(f"expected {text!r}, found {found!r}")
        return self.advance()

    def ident(self, what: str) -> Token:
        if self.tok.kind != "ident":
            found = self.tok.text or "end of input"
            self.error(f"expected {what}, found {found!r}")
        return self.advance()

    def varset(self) -> frozenset:
        self.expect("{")
        out = []
        if not self.at("}"):
            out.append(var(self.ident("variable").text))
            while self.at(","):
                self.advance()
                out.append(var(self.ident("variable").text))
        self.expect("}")
        return frozenset(out)

    # terms

    def program(self) -> Term:
        s = self.term()
        if self.tok.kind != "eof":
            self.error(f"unexpected {self.tok.text!r} after end of program")
        return s

    def term(self) -> Term:
        live = None
        if self.at("@"):
            self.advance()
            live = self.varset()
        start = self.tok
        s = self.term0()
        self.positions[id(s)] = (start.line, start.col)
        if live is None:
            self.unannotated += 1
        else:
            self.anns[id(s)] = live
        return s

    def term0(self) -> Term:
        tok = self.tok
        if tok.kind == "kw":
            match tok.text:
                case "let":
                    self.advance()
                    x = var(self.ident("variable").text)
                    self.expect("=")
                    if self.at("extern"):
                        self.advance()
                        rhs = Extern(action(self.ident("action").text))
                    else:
                        rhs = self.expr()
                    self.expect("in")
                    return Let(x, rhs, self.term())
                case "if":
                    self.advance()
                    c = self.expr()
                    self.expect("then")
                    t = self.term()
                    self.expect("else")
                    return If(c, t, self.term())
                case "fun":
                    self.advance()
                    f = label(self.ident("label").text)
                    params = []
                    if self.tok.kind == "ident":
                        # paren-free form: fun g x y = ...
                        while self.tok.kind == "ident":
                            params.append(self.advance())
                    else:
                        self.expect("(")
                        if not self.at(")"):
                            params.append(self.ident("parameter"))
                            while self.at(","):
                                self.advance()
                                params.append(self.ident("parameter"))
                        self.expect(")")
                    seen = set()
                    for p in params:
                        if p.text in seen:
                            self.error(f"duplicate parameter {p.text!r}", p)
                        seen.add(p.text)
                    glob = None
                    if self.at(":"):
                        self.advance()
                        glob = self.varset()
                    self.expect("=")
                    body = self.term()
                    self.expect("in")
                    cont = self.term()
                    return Fun(f, tuple(var(p.text) for p in params), body, cont, glob)
            self.error(f"unexpected keyword {tok.text!r}")
        if tok.kind == "ident" and self.toks[self.i + 1].text == "(":
            f = label(self.advance().text)
            self.expect("(")
            args = []
            if not self.at(")"):
                args.append(self.expr())
                while self.at(","):
                    self.advance()
                    args.append(self.expr())
            self.expect(")")
            return App(f, tuple(args))
        if tok.kind == "ident" and self.toks[self.i + 1].kind in ("ident", "int"):
            # juxtaposition: g y 3
            f = label(self.advance().text)
            args = []
            while self.tok.kind in ("ident", "int"):
                args.append(self.atom())
            return App(f, tuple(args))
        return Ret(self.expr())

    # expressions

    def expr(self, min_prec: int = 1) -> Expr:
        left = self.unary()
        while self.tok.kind == "op" and _PREC.get(self.tok.text, 0) >= min_prec:
            op = self.advance().text
            right = self.expr(_PREC[op] + 1)
            left = BinOp(op, left, right)
        return left

    def unary(self) -> Expr:
        if self.at("-"):
            self.advance()
            if self.tok.kind == "int":
                return Lit(wrap(-int(self.advance().text)))
            return BinOp("-", Lit(0), self.unary())
        return self.atom()

    def atom(self) -> Expr:
        tok = self.tok
        if tok.kind == "int":
            self.advance()
            return Lit(wrap(int(tok.text)))
        if tok.kind == "ident":
            self.advance()
            return Ref(var(tok.text))
        if self.at("("):
            self.advance()
            e = self.expr()
            self.expect(")")
            return e
        self.error(f"expected expression, found {tok.text or 'end of input'!r}")


def _build_ann(s: Term, anns: dict[int, frozenset]) -> Ann:
    return Ann(anns[id(s)], tuple(_build_ann(t, anns) for t in subterms(s)))


def parse(text: str) -> ParseResult:
    """Parse program text; raises :class:`ParseError` on malformed input."""
    p = _Parser(text)
    try:
        s = p.program()
    except RecursionError:
        raise ParseError(p.tok.line, p.tok.col, "program nested too deeply") from None
    ann = None
    if p.anns:
        if p.unannotated:
            raise ParseError(1, 1, "live annotations must cover every subterm or none")
        ann = _build_ann(s, p.anns)
    return ParseResult(s, ann, p.positions)


def parse_term(text: str) -> Term:
    return parse(text).term


# ---------------------------------------------------------------------------
# Printing


def _names(xs) -> str:
    return ", ".join(sorted(str(x) for x in xs))


def format_varset(xs) -> str:
    return "{" + _names(xs) + "}"


def format_expr(e, prec: int = 0) -> str:
    match e:
        case Lit(v):
            return str(v)
        case Ref(x):
            return str(x)
        case Extern(a):
            return f"extern {a}"
        case BinOp(op, l, r):
            p = _PREC[op]
            text = f"{format_expr(l, p)} {op} {format_expr(r, p + 1)}"
            return f"({text})" if p < prec else text
    raise TypeError(f"not an expression: {e!r}")


_INDENT = "  "


def _lines(s: Term, a: Optional[Ann]) -> list[str]:
    kids = a.children if a is not None else (None, None)
    match s:
        case Let(x, rhs, body):
            out = [f"let {x} = {format_expr(rhs)} in"] + _lines(body, kids[0])
        case If(c, t, e):
            out = ([f"if {format_expr(c)} then"]
                   + [_INDENT + ln for ln in _lines(t, kids[0])]
                   + ["else"]
                   + [_INDENT + ln for ln in _lines(e, kids[1])])
        case Ret(e):
            out = [format_expr(e)]
        case Fun(f, params, body, cont, glob):
            head = f"fun {f}({', '.join(map(str, params))})"
            if glob is not None:
                head += f" : {format_varset(glob)}"
            rest = _lines(cont, kids[1])
            out = ([head + " ="]
                   + [_INDENT + ln for ln in _lines(body, kids[0])]
                   + ["in " + rest[0]] + rest[1:])
        case App(f, args):
            out = [f"{f}({', '.join(format_expr(e) for e in args)})"]
        case _:
            raise TypeError(f"not a term: {s!r}")
    if a is not None:
        out[0] = f"@{format_varset(a.live)} {out[0]}"
    return out


def format_term(s: Term, ann: Optional[Ann] = None) -> str:
    """Render ``s`` (with ``@{..}`` live sets when ``ann`` is given) as re-parseable text."""
    return "\n".join(_lines(s, ann))
