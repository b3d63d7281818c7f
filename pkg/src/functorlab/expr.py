"""Parser for functor expressions over a skeleton.

Grammar (EBNF):

    expr    = term { "+" term } ;
    term    = factor { "*" factor } ;
    factor  = post "^" INT "(" expr ")"
            | "D" "(" expr ")"
            | "(" expr ")"
            | atom ;
    post    = "Sym" | "Gam" | "Lam" ;
    atom    = "k"
            | ( "k" | "kbar" ) "[" hom "]"
            | piece "^" INT "." hom
            | hom ;
    piece   = "S" | "Q" | "L" ;
    hom     = "Hom" "(" object "," "-" ")" ;
    object  = "V" INT | "V(" INT { "," INT } ")" ;

``+`` is direct sum and ``*`` is tensor product (binding tighter).  The atoms
are: k, the constant functor; k[Hom(a,-)], the linearization F_p[A(a,-)];
kbar[Hom(a,-)], its augmentation kernel; Hom(a,-), the additive functor
A(a,-) ⊗ F_p; S^d . Hom(a,-), the degree-d graded piece of the augmentation
filtration; Q^d . Hom(a,-), the quotient F_p[A(a,-)]/I^{d+1}; L^d . Hom(a,-),
the exterior power of A(a,-) ⊗ F_p.  Sym, Gam and Lam post-compose any
expression with symmetric, divided and exterior powers; D is the dual.
"""

from __future__ import annotations

import re

from .category import Obj, Skeleton
from .functors import (
    AdditiveTensor,
    Constant,
    DirectSum,
    DividedPower,
    Dual,
    ExteriorPower,
    Functor,
    GradedPiece,
    HomLinearization,
    ReducedLinearization,
    SymmetricPower,
    Tensor,
    TruncatedGroupAlgebra,
)

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z]+)|(?P<sym>[-+*^.,()\[\]]))")


class ExprError(ValueError):
    pass


def tokenize(text: str) -> list[str]:
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ExprError(f"unexpected character at {pos}: {text[pos:pos + 10]!r}")
        out.append(m.group(m.lastgroup))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, skel: Skeleton, text: str):
        self.skel = skel
        self.toks = tokenize(text)
        self.i = 0

    def peek(self, k: int = 0) -> str | None:
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else None

    def take(self, expected: str | None = None) -> str:
        tok = self.peek()
        if tok is None or (expected is not None and tok != expected):
            raise ExprError(f"expected {expected or 'a token'}, found {tok!r}")
        self.i += 1
        return tok

    def integer(self) -> int:
        tok = self.take()
        if not tok.isdigit():
            raise ExprError(f"expected an integer, found {tok!r}")
        return int(tok)

    def parse(self) -> Functor:
        f = self.expr()
        if self.peek() is not None:
            raise ExprError(f"trailing input at {self.peek()!r}")
        return f

    def expr(self) -> Functor:
        parts = [self.term()]
        while self.peek() == "+":
            self.take()
            parts.append(self.term())
        return parts[0] if len(parts) == 1 else DirectSum(*parts)

    def term(self) -> Functor:
        f = self.factor()
        while self.peek() == "*":
            self.take()
            f = Tensor(f, self.factor())
        return f

    def factor(self) -> Functor:
        tok = self.peek()
        if tok in ("Sym", "Gam", "Lam"):
            self.take()
            self.take("^")
            d = self.integer()
            self.take("(")
            inner = self.expr()
            self.take(")")
            return {"Sym": SymmetricPower, "Gam": DividedPower, "Lam": ExteriorPower}[tok](inner, d)
        if tok == "D":
            self.take()
            self.take("(")
            inner = self.expr()
            self.take(")")
            return Dual(inner)
        if tok == "(":
            self.take()
            inner = self.expr()
            self.take(")")
            return inner
        return self.atom()

    def atom(self) -> Functor:
        tok = self.peek()
        if tok in ("k", "kbar"):
            self.take()
            if self.peek() != "[":
                if tok == "kbar":
                    raise ExprError("kbar needs [Hom(a,-)]")
                return Constant(self.skel)
            self.take("[")
            a = self.hom()
            self.take("]")
            return HomLinearization(self.skel, a) if tok == "k" else ReducedLinearization(self.skel, a)
        if tok in ("S", "Q", "L"):
            self.take()
            self.take("^")
            d = self.integer()
            self.take(".")
            a = self.hom()
            if tok == "S":
                return GradedPiece(self.skel, a, d)
            if tok == "Q":
                return TruncatedGroupAlgebra(self.skel, a, d)
            return ExteriorPower(AdditiveTensor(self.skel, a), d)
        if tok == "Hom":
            return AdditiveTensor(self.skel, self.hom())
        raise ExprError(f"unexpected token {tok!r}")

    def hom(self) -> Obj:
        self.take("Hom")
        self.take("(")
        a = self.obj()
        self.take(",")
        self.take("-")
        self.take(")")
        return a

    def obj(self) -> Obj:
        self.take("V")
        if self.peek() != "(":
            return self.skel.parse_object(f"V{self.integer()}")
        self.take("(")
        ms = [self.integer()]
        while self.peek() == ",":
            self.take()
            ms.append(self.integer())
        self.take(")")
        return self.skel.parse_object("V(" + ",".join(map(str, ms)) + ")")


def parse_functor(skel: Skeleton, text: str) -> Functor:
    """Build the functor described by ``text`` on ``skel``."""
    return _Parser(skel, text).parse()


__all__ = ["ExprError", "parse_functor", "tokenize"]
