"""
Expression grammar for differentials and forms.

    expr  := term (("+" | "-") term)*
    term  := unary ("*" unary)*
    unary := ("+" | "-") unary | power
    power := atom ("^" INT)?
    atom  := RATIONAL | NAME | "(" expr ")"

Rational literals are ``3`` or ``3/4``.  Juxtaposition (``2x``) is an error.
Evaluation is delegated to a *ring* object so the same parser serves cdga
elements, module elements and polynomial forms.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction


class ExprError(ValueError):
    def __init__(self, message: str, col: int | None = None, text: str | None = None):
        self.col = col
        self.text = text
        self.bare = message
        where = f" (col {col + 1})" if col is not None else ""
        super().__init__(message + where)


class ScopeError(ExprError):
    pass


_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>\d+(?:/\d+)?)
  | (?P<name>[A-Za-z_À-ɏͰ-Ͽ][\wÀ-ɏͰ-Ͽ⊗·']*)
  | (?P<op>[-+*^()])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    col: int


def tokenize(text: str) -> list[Token]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ExprError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        if kind != "ws":
            out.append(Token(kind, m.group(), pos))
        pos = m.end()
    for a, b in zip(out, out[1:]):
        if a.kind in ("num", "name") and b.kind in ("num", "name") or \
                (a.kind in ("num", "name") and b.text == "(") or (a.text == ")" and b.kind in ("num", "name")):
            raise ExprError("juxtaposition is not allowed; write '*' explicitly", b.col, text)
    out.append(Token("end", "", len(text)))
    return out


# AST nodes are tuples: ("num", Fraction, col) | ("name", str, col) | (op, col, *children)

class _Parser:
    def __init__(self, text):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text):
        t = self.take()
        if t.text != text:
            raise ExprError(f"expected {text!r}", t.col, self.text)
        return t

    def parse(self):
        if self.peek().kind == "end":
            raise ExprError("empty expression", 0, self.text)
        node = self.expr()
        t = self.peek()
        if t.kind != "end":
            raise ExprError(f"unexpected {t.text!r}", t.col, self.text)
        return node

    def expr(self):
        node = self.term()
        while self.peek().text in ("+", "-"):
            t = self.take()
            rhs = self.term()
            node = ("add" if t.text == "+" else "sub", t.col, node, rhs)
        return node

    def term(self):
        node = self.unary()
        while self.peek().text == "*":
            t = self.take()
            node = ("mul", t.col, node, self.unary())
        return node

    def unary(self):
        t = self.peek()
        if t.text in ("-", "+"):
            self.take()
            inner = self.unary()
            return ("neg", t.col, inner) if t.text == "-" else inner
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek().text == "^":
            t = self.take()
            e = self.take()
            if e.kind != "num" or "/" in e.text:
                raise ExprError("exponent must be a non-negative integer", e.col, self.text)
            return ("pow", t.col, base, int(e.text))
        return base

    def atom(self):
        t = self.take()
        if t.kind == "num":
            return ("num", Fraction(t.text), t.col)
        if t.kind == "name":
            return ("name", t.text, t.col)
        if t.text == "(":
            node = self.expr()
            self.expect(")")
            return node
        if t.kind == "end":
            raise ExprError("unexpected end of expression", t.col, self.text)
        raise ExprError(f"unexpected {t.text!r}", t.col, self.text)


def parse(text: str):
    return _Parser(text).parse()


def evaluate(text: str, ring):
    """Parse ``text`` and evaluate it in ``ring``.

    ``ring`` provides ``const(q)``, ``symbol(name)`` (raise KeyError when out
    of scope), ``add(a, b)``, ``neg(a)``, ``mul(a, b)``; ``pow`` is optional.
    Ring methods may raise ValueError, which is re-raised with a column.
    """
    tree = parse(text)

    def ev(node):
        kind = node[0]
        if kind == "num":
            return ring.const(node[1])
        if kind == "name":
            try:
                return ring.symbol(node[1])
            except KeyError:
                raise ScopeError(f"unknown generator {node[1]!r}", node[2], text) from None
        col = node[1]
        try:
            if kind == "neg":
                return ring.neg(ev(node[2]))
            if kind == "add":
                return ring.add(ev(node[2]), ev(node[3]))
            if kind == "sub":
                return ring.add(ev(node[2]), ring.neg(ev(node[3])))
            if kind == "mul":
                return ring.mul(ev(node[2]), ev(node[3]))
            if kind == "pow":
                base = ev(node[2])
                if hasattr(ring, "pow"):
                    return ring.pow(base, node[3])
                out = ring.const(Fraction(1))
                for _ in range(node[3]):
                    out = ring.mul(out, base)
                return out
        except ExprError:
            raise
        except ValueError as exc:
            raise ExprError(str(exc), col, text) from None
        raise AssertionError(kind)

    return ev(tree)


def format_fraction(q: Fraction) -> str:
    return str(q)
