"""Recursive-descent parser for the expression grammar.

    expr   := term (("+"|"-") term)*
    term   := factor (("*"|"/") factor)*
    factor := "-" factor | power
    power  := atom ("^" factor)?
    atom   := RATIONAL | IDENT | IDENT "(" expr ("," expr)* ")"
            | IDENT "[" digits ("," digits)* "]" "(" expr ("," expr)* ")"
            | "(" expr ")"

``^`` is right-associative and binds tighter than unary minus, so ``-x^2`` is
``-(x^2)`` and ``u1^-3`` is accepted.  ``RATIONAL`` is a single token
(``3/4`` with no blanks), so ``x^3/4`` reads as ``x^(3/4)``.  The bracket form
``f[i,j](...)`` names a derivative jet of a declared function.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import sympy as sp

from .core import BUILTINS, VARS, Context, JetAtom

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^(),\[\]]))"
)

_KERNELS = {
    "exp": sp.exp,
    "ln": sp.log,
    "arctan": sp.atan,
    "sqrt": sp.sqrt,
    "abs": sp.Abs,
    "sin": sp.sin,
    "cos": sp.cos,
}


class ParseError(ValueError):
    def __init__(self, message: str, offset: int | None = None, kind: str = "syntax"):
        self.offset = offset
        self.kind = kind
        where = f" at byte {offset}" if offset is not None else ""
        super().__init__(f"{message}{where}")


@dataclass
class _Tok:
    kind: str
    text: str
    offset: int


def tokenize(text: str) -> list:
    data = text.encode("utf-8")
    if len(data) != len(text):
        bad = next(i for i, ch in enumerate(text) if ord(ch) > 127)
        raise ParseError(f"unexpected character {text[bad]!r}", len(text[:bad].encode()))
    toks, pos = [], 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        toks.append(_Tok(kind, m.group(kind), m.start(kind)))
        pos = m.end()
    toks.append(_Tok("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, ctx: Context):
        self.toks = tokenize(text)
        self.i = 0
        self.ctx = ctx

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, op: str) -> _Tok:
        tok = self.take()
        if tok.text != op or tok.kind == "end":
            found = "end of input" if tok.kind == "end" else repr(tok.text)
            raise ParseError(f"expected {op!r}, found {found}", tok.offset)
        return tok

    def parse(self):
        e = self.expr()
        tok = self.peek()
        if tok.kind != "end":
            raise ParseError(f"unexpected {tok.text!r}", tok.offset)
        return e

    def expr(self):
        terms = [self.term()]
        while self.peek().text in ("+", "-") and self.peek().kind == "op":
            op = self.take().text
            rhs = self.term()
            terms.append(rhs if op == "+" else -rhs)
        return sp.Add(*terms)

    def term(self):
        e = self.factor()
        while self.peek().text in ("*", "/") and self.peek().kind == "op":
            op = self.take()
            rhs = self.factor()
            if op.text == "*":
                e = e * rhs
            else:
                if rhs == 0:
                    raise ParseError("division by zero", op.offset)
                e = e / rhs
        return e

    def factor(self):
        if self.peek().text == "-" and self.peek().kind == "op":
            self.take()
            return -self.factor()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek().text == "^" and self.peek().kind == "op":
            op = self.take()
            ex = self.factor()
            if base == 0 and (ex.is_negative or ex == 0):
                raise ParseError("0 raised to a non-positive power", op.offset)
            return base**ex
        return base

    def args(self):
        self.expect("(")
        out = [self.expr()]
        while self.peek().text == ",":
            self.take()
            out.append(self.expr())
        self.expect(")")
        return out

    def atom(self):
        tok = self.take()
        if tok.kind == "num":
            p, _, q = tok.text.partition("/")
            if q and int(q) == 0:
                raise ParseError("zero denominator", tok.offset)
            return sp.Rational(int(p), int(q) if q else 1)
        if tok.kind == "op" and tok.text == "(":
            e = self.expr()
            self.expect(")")
            return e
        if tok.kind == "ident":
            return self.identifier(tok)
        found = "end of input" if tok.kind == "end" else repr(tok.text)
        raise ParseError(f"unexpected {found}", tok.offset)

    def identifier(self, tok: _Tok):
        name, nxt = tok.text, self.peek()
        if nxt.text == "[" and name in self.ctx.funcs:
            self.take()
            index = [self.jet_index()]
            while self.peek().text == ",":
                self.take()
                index.append(self.jet_index())
            self.expect("]")
            return self.apply_func(tok, self.args(), tuple(index))
        if nxt.text == "(":
            if name in _KERNELS:
                args = self.args()
                if len(args) != 1:
                    raise ParseError(f"{name} takes 1 argument, got {len(args)}", tok.offset, "arity")
                return _KERNELS[name](args[0])
            if name in self.ctx.funcs:
                return self.apply_func(tok, self.args(), None)
            raise ParseError(f"undeclared function {name!r}", tok.offset, "undeclared")
        if name in VARS:
            return VARS[name]
        if name in self.ctx.extra:
            return self.ctx.extra[name]
        if name in self.ctx.aliases:
            return self.ctx.aliases[name]
        if name in self.ctx.params:
            return self.ctx.params[name].symbol
        if name in self.ctx.funcs:
            raise ParseError(f"function {name!r} used without arguments", tok.offset, "arity")
        raise ParseError(f"undeclared identifier {name!r}", tok.offset, "undeclared")

    def jet_index(self) -> int:
        tok = self.take()
        if tok.kind != "num" or "/" in tok.text:
            raise ParseError("jet index must be a non-negative integer", tok.offset)
        return int(tok.text)

    def apply_func(self, tok: _Tok, args: list, index):
        fs = self.ctx.funcs[tok.text]
        if len(args) != fs.arity:
            raise ParseError(
                f"{fs.name} declared with {fs.arity} slot(s), applied to {len(args)}",
                tok.offset,
                "arity",
            )
        if index is not None and len(index) != fs.arity:
            raise ParseError(f"jet index of {fs.name} needs {fs.arity} entries", tok.offset, "arity")
        from .calculus import normalize

        for k, (a, s) in enumerate(zip(args, fs.slots)):
            if a != s and normalize(a - s) != 0:
                raise ParseError(
                    f"argument {k + 1} of {fs.name} differs from its declared slot",
                    tok.offset,
                    "arity",
                )
        return JetAtom(fs, index or (0,) * fs.arity)


def parse(text: str, ctx: Context | None = None):
    """Parse ``text`` into an expression; every identifier must be declared in ``ctx``."""
    return _Parser(text, ctx or Context()).parse()
