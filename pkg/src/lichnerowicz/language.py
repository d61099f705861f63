"""Operator words: AST, parser and printer.

Grammar (juxtaposition composes, right factor acts first)::

    expr     := ["-"] term { ("+" | "-") term }
    term     := [rational] factor { factor }
    factor   := atom [ "^" nat ]
    atom     := gen | rational | "(" expr ")" | "inv" "(" ncpoly ")"
    gen      := g | tr | N | Ncal | C | kappa | grad | div | gradt | divt | box | c
    rational := int [ "/" nat ]

``ncpoly`` is an ``expr`` built from ``Ncal``, ``C``, rationals, sums,
products, powers and parentheses only.  The optional leading minus is a small
convenience on top of the grammar.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

GENERATORS = ("g", "tr", "N", "Ncal", "C", "kappa", "grad", "div", "gradt", "divt", "box", "c")
NC_SYMBOLS = frozenset({"Ncal", "C"})


class ExprSyntaxError(ValueError):
    def __init__(self, message: str, position: int | None = None):
        self.position = position
        where = f" at position {position}" if position is not None else ""
        super().__init__(f"{message}{where}")


class Expr:
    def __str__(self) -> str:
        return pretty_print(self)


@dataclass(frozen=True)
class Gen(Expr):
    name: str


@dataclass(frozen=True)
class Num(Expr):
    value: Fraction


@dataclass(frozen=True)
class Compose(Expr):
    factors: tuple[Expr, ...]


@dataclass(frozen=True)
class Sum(Expr):
    """``signs[i]`` is +1 or -1 for ``terms[i]``."""

    terms: tuple[Expr, ...]
    signs: tuple[int, ...]


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exponent: int


@dataclass(frozen=True)
class Paren(Expr):
    inner: Expr


@dataclass(frozen=True)
class Inv(Expr):
    poly: Expr


_TOKEN = re.compile(r"\s*(?:(\d+(?:/\d+)?)|([A-Za-z]+)|(\^|\+|-|\(|\)))")


def _tokenize(text: str) -> list[tuple[str, object, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            start = len(text) - len(text[pos:].lstrip())
            raise ExprSyntaxError(f"unexpected character {text[start]!r}", start)
        num, word, sym = m.groups()
        start = m.start(m.lastindex)
        if num is not None:
            p, _, q = num.partition("/")
            if q and int(q) == 0:
                raise ExprSyntaxError("zero denominator", start)
            tokens.append(("num", Fraction(int(p), int(q) if q else 1), start))
        elif word is not None:
            if word == "inv":
                tokens.append(("inv", word, start))
            elif word in GENERATORS:
                tokens.append(("gen", word, start))
            else:
                raise ExprSyntaxError(f"unknown symbol {word!r}", start)
        else:
            tokens.append((sym, sym, start))
        pos = m.end()
    tokens.append(("end", None, len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind: str | None = None):
        tok = self.tokens[self.i]
        if kind is not None and tok[0] != kind:
            raise ExprSyntaxError(f"expected {kind!r}", tok[2])
        self.i += 1
        return tok

    def parse(self) -> Expr:
        node = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ExprSyntaxError(f"unexpected token {tok[1]!r}", tok[2])
        return node

    def expr(self) -> Expr:
        terms, signs = [], []
        sign = 1
        if self.peek()[0] == "-":
            self.take()
            sign = -1
        terms.append(self.term())
        signs.append(sign)
        while self.peek()[0] in ("+", "-"):
            signs.append(1 if self.take()[0] == "+" else -1)
            terms.append(self.term())
        if len(terms) == 1 and signs[0] == 1:
            return terms[0]
        return Sum(tuple(terms), tuple(signs))

    def term(self) -> Expr:
        factors = [self.factor()]
        while self.peek()[0] in ("gen", "num", "(", "inv"):
            factors.append(self.factor())
        return factors[0] if len(factors) == 1 else Compose(tuple(factors))

    def factor(self) -> Expr:
        base = self.atom()
        if self.peek()[0] == "^":
            self.take()
            tok = self.take("num")
            if tok[1].denominator != 1:
                raise ExprSyntaxError("exponent must be a natural number", tok[2])
            return Pow(base, int(tok[1]))
        return base

    def atom(self) -> Expr:
        kind, value, pos = self.peek()
        if kind == "gen":
            self.take()
            return Gen(value)
        if kind == "num":
            self.take()
            return Num(value)
        if kind == "(":
            self.take()
            inner = self.expr()
            self.take(")")
            return Paren(inner)
        if kind == "inv":
            self.take()
            self.take("(")
            start = self.peek()[2]
            inner = self.expr()
            self.take(")")
            bad = sorted(symbols(inner) - NC_SYMBOLS)
            if bad or _has_inv(inner):
                what = ", ".join(bad) if bad else "inv"
                raise ExprSyntaxError(f"inv() accepts polynomials in Ncal and C only, got {what}", start)
            return Inv(inner)
        raise ExprSyntaxError("expected an operator, number or '('", pos)


def parse(text: str) -> Expr:
    return _Parser(text).parse()


def symbols(node: Expr) -> set[str]:
    if isinstance(node, Gen):
        return {node.name}
    if isinstance(node, Num):
        return set()
    if isinstance(node, (Compose, Sum)):
        return set().union(*(symbols(t) for t in _children(node)))
    if isinstance(node, Pow):
        return symbols(node.base)
    if isinstance(node, Paren):
        return symbols(node.inner)
    if isinstance(node, Inv):
        return symbols(node.poly)
    raise TypeError(node)


def _children(node):
    return node.factors if isinstance(node, Compose) else node.terms


def _has_inv(node: Expr) -> bool:
    if isinstance(node, Inv):
        return True
    if isinstance(node, (Compose, Sum)):
        return any(_has_inv(t) for t in _children(node))
    if isinstance(node, Pow):
        return _has_inv(node.base)
    if isinstance(node, Paren):
        return _has_inv(node.inner)
    return False


def pretty_print(node: Expr) -> str:
    if isinstance(node, Gen):
        return node.name
    if isinstance(node, Num):
        return str(node.value)
    if isinstance(node, Compose):
        return " ".join(pretty_print(f) for f in node.factors)
    if isinstance(node, Sum):
        out = []
        for i, (t, s) in enumerate(zip(node.terms, node.signs)):
            text = pretty_print(t)
            if i == 0:
                out.append(text if s > 0 else f"-{text}")
            else:
                out.append(f"{'+' if s > 0 else '-'} {text}")
        return " ".join(out)
    if isinstance(node, Pow):
        return f"{pretty_print(node.base)}^{node.exponent}"
    if isinstance(node, Paren):
        return f"({pretty_print(node.inner)})"
    if isinstance(node, Inv):
        return f"inv({pretty_print(node.poly)})"
    raise TypeError(node)


def random_word(seed: int, max_length: int = 5, alphabet=None) -> str:
    """A product of 1..max_length generators drawn with SplitMix64."""
    from .tensors import SplitMix64

    letters = alphabet or ("g", "tr", "N", "gradt", "divt", "box", "C", "kappa", "c")
    rng = SplitMix64(seed)
    length = 1 + rng.below(max_length)
    return " ".join(letters[rng.below(len(letters))] for _ in range(length))
