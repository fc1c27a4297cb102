"""Recursive-descent parser for the formula surface syntax.

    !phi   phi & psi   phi | psi   phi -> psi   exists v. phi   forall v. phi
    R(x, y)   x = y   x < y   true   false   name

Precedence from loosest: quantifier bodies (extend as far right as possible),
``->`` (right associative), ``|``, ``&``, ``!``. A bare name refers to a named
formula from the ``named`` table.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping

from ..errors import ArityError, FormulaSyntaxError, UnknownSymbolError
from .syntax import (FALSE, TRUE, And, Eq, Exists, Forall, Formula, Implies, Not, Or, Rel,
                     Signature)

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<arrow>->)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<sym>[<>=~*+^%$#@]+)
  | (?P<punct>[()&|!,.])
""", re.VERBOSE)

KEYWORDS = {"exists", "forall", "true", "false"}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    pos: int


def tokenize(text: str) -> list[Token]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            tok = m.group()
            if kind == "sym" and tok == "=":
                kind = "eq"
            elif kind in ("punct", "arrow"):
                kind = tok
            out.append(Token(kind, tok, pos))
        pos = m.end()
    out.append(Token("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text, signature, named):
        self.tokens = tokenize(text)
        self.i = 0
        self.signature = signature
        self.named = named or {}

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def take(self, kind=None) -> Token:
        t = self.tok
        if kind is not None and t.kind != kind:
            want = kind if kind != "end" else "end of input"
            got = t.text or "end of input"
            raise FormulaSyntaxError(f"expected {want!r}, found {got!r}", t.pos)
        self.i += 1
        return t

    def at(self, kind, text=None) -> bool:
        return self.tok.kind == kind and (text is None or self.tok.text == text)

    def formula(self) -> Formula:
        left = self.disjunction()
        if self.at("->"):
            self.take()
            return Implies(left, self.formula())
        return left

    def disjunction(self) -> Formula:
        f = self.conjunction()
        while self.at("|"):
            self.take()
            f = Or(f, self.conjunction())
        return f

    def conjunction(self) -> Formula:
        f = self.unary()
        while self.at("&"):
            self.take()
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        if self.at("!"):
            self.take()
            return Not(self.unary())
        if self.at("ident", "exists") or self.at("ident", "forall"):
            q = self.take().text
            var = self.variable()
            self.take(".")
            body = self.formula()
            return Exists(var, body) if q == "exists" else Forall(var, body)
        return self.primary()

    def variable(self) -> str:
        t = self.take("ident")
        if t.text in KEYWORDS:
            raise FormulaSyntaxError(f"keyword {t.text!r} used as a variable", t.pos)
        return t.text

    def primary(self) -> Formula:
        t = self.tok
        if t.kind == "(":
            self.take()
            f = self.formula()
            self.take(")")
            return f
        if t.kind != "ident":
            raise FormulaSyntaxError(f"unexpected {t.text or 'end of input'!r}", t.pos)
        if t.text == "true":
            self.take()
            return TRUE
        if t.text == "false":
            self.take()
            return FALSE
        nxt = self.tokens[self.i + 1]
        if nxt.kind == "(":
            return self.application()
        if nxt.kind == "eq":
            left = self.variable()
            self.take("eq")
            return Eq(left, self.variable())
        if nxt.kind == "sym":
            left = self.variable()
            sym = self.take("sym")
            right = self.variable()
            return self.relation(sym, (left, right))
        if t.text in self.named:
            self.take()
            return self.named[t.text]
        raise UnknownSymbolError(f"unknown formula name {t.text!r} (at position {t.pos})")

    def application(self) -> Formula:
        name = self.take("ident")
        self.take("(")
        args = [self.variable()]
        while self.at(","):
            self.take()
            args.append(self.variable())
        self.take(")")
        return self.relation(name, tuple(args))

    def relation(self, name_tok: Token, args: tuple) -> Formula:
        name = name_tok.text
        if self.signature is not None:
            if name not in self.signature.arities:
                raise UnknownSymbolError(
                    f"unknown relation symbol {name!r} (at position {name_tok.pos})")
            k = self.signature.arity(name)
            if k != len(args):
                raise ArityError(
                    f"{name} has arity {k} but was applied to {len(args)} argument(s) "
                    f"(at position {name_tok.pos})")
        return Rel(name, args)


def parse_formula(text: str, signature: Signature | None = None,
                  named: Mapping[str, Formula] | None = None) -> Formula:
    """Parse ``text``. With a signature, symbols and arities are checked."""
    p = _Parser(text, signature, named)
    f = p.formula()
    p.take("end")
    return f


def parse_formula_file(text: str, signature: Signature | None = None,
                       named: Mapping[str, Formula] | None = None) -> list[tuple[str, Formula]]:
    """Parse one formula per line; ``name: formula`` lines also define ``name``
    for later lines. Blank lines and ``#`` comments are skipped."""
    table = dict(named or {})
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = re.match(r"^([A-Za-z_][A-Za-z0-9_']*)\s*:(.*)$", line)
        try:
            if m:
                name, body = m.group(1), m.group(2)
                f = parse_formula(body, signature, table)
                table[name] = f
            else:
                name, f = line, parse_formula(line, signature, table)
        except FormulaSyntaxError as exc:
            raise FormulaSyntaxError(f"line {lineno}: {exc}") from None
        out.append((name, f))
    return out
