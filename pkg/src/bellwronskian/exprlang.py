"""A small expression language for scalar functions of ``t``.

Grammar (whitespace is insignificant)::

    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary)*
    unary   := "-" unary | power
    power   := primary ("^" ["-"] INTEGER)?
    primary := NUMBER | "t" | FUNC "(" expr ")" | "(" expr ")"
    FUNC    := "exp" | "sin" | "cos" | "log"
    NUMBER  := digits ["." digits] [("e" | "E") ["+" | "-"] digits]  (or ".5" style)

Exponents are integer literals only; write ``exp(r*log(t))`` for real powers.
Implicit multiplication (``2t``) is rejected.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence, Union

import numpy as np

from .errors import DimensionMismatch, DomainViolation, ExpressionSyntaxError, NonIntegerExponent
from .jets import Jet, MatrixOfJets, jet_elementary

FUNCTIONS = ("exp", "sin", "cos", "log")


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Pow:
    base: "Node"
    exponent: int


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Node"


Node = Union[Num, Var, Neg, BinOp, Pow, Call]

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)


def _tokenize(source: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(source):
        m = _TOKEN.match(source, pos)
        if m is None:
            raise ExpressionSyntaxError(f"unexpected character {source[pos]!r}", pos, source)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(("end", "", len(source)))
    return tokens


class _Parser:
    def __init__(self, source: str):
        self.source = source
        self.tokens = _tokenize(source)
        self.i = 0

    @property
    def tok(self):
        return self.tokens[self.i]

    def error(self, msg: str, cls=ExpressionSyntaxError):
        kind, text, pos = self.tok
        what = "end of input" if kind == "end" else repr(text)
        raise cls(f"{msg}, found {what}", pos, self.source)

    def accept(self, text: str) -> bool:
        if self.tok[0] == "op" and self.tok[1] == text:
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> None:
        if not self.accept(text):
            self.error(f"expected {text!r}")

    def parse(self) -> Node:
        node = self.expr()
        if self.tok[0] != "end":
            self.error("expected operator or end of input")
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.tok[0] == "op" and self.tok[1] in "+-":
            op = self.tok[1]
            self.i += 1
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.tok[0] == "op" and self.tok[1] in "*/":
            op = self.tok[1]
            self.i += 1
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Node:
        if self.accept("-"):
            return Neg(self.unary())
        return self.power()

    def power(self) -> Node:
        base = self.primary()
        if not self.accept("^"):
            return base
        sign = -1 if self.accept("-") else 1
        kind, text, pos = self.tok
        if kind == "num" and not re.fullmatch(r"\d+", text):
            self.error("exponent must be an integer literal", NonIntegerExponent)
        if kind == "name" or (kind == "op" and text == "("):
            self.error("exponent must be an integer literal", NonIntegerExponent)
        if kind != "num":
            self.error("expected integer exponent")
        self.i += 1
        if self.tok[0] == "op" and self.tok[1] == "^":
            self.error("chained exponents need parentheses")
        return Pow(base, sign * int(text))

    def primary(self) -> Node:
        kind, text, pos = self.tok
        if kind == "num":
            value = float(text)
            if not math.isfinite(value):
                self.error("numeric literal out of range")
            self.i += 1
            return Num(value)
        if kind == "name":
            self.i += 1
            if text == "t":
                if self.tok[0] == "op" and self.tok[1] == "(":
                    self.error("'t' is not a function")
                return Var()
            if text in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(text, arg)
            self.i -= 1
            self.error("unknown name")
        if self.accept("("):
            node = self.expr()
            self.expect(")")
            return node
        self.error("expected a number, 't', a function call or '('")


@dataclass(frozen=True)
class FunctionSpec:
    source: str
    ast: Node

    def __str__(self) -> str:
        return self.source


def parse(source: str) -> FunctionSpec:
    return FunctionSpec(source, _Parser(source).parse())


# Printing.  Precedence levels: 1 additive, 2 multiplicative, 3 unary, 4 power/atom.

def _prec(node: Node) -> int:
    if isinstance(node, BinOp):
        return 1 if node.op in "+-" else 2
    if isinstance(node, Neg):
        return 3
    return 4


def _wrap(node: Node, minimum: int) -> str:
    s = unparse(node)
    return f"({s})" if _prec(node) < minimum else s


def unparse(node: Node) -> str:
    """Canonical text form; ``parse(unparse(a)).ast == a``."""
    if isinstance(node, Num):
        return repr(float(node.value))
    if isinstance(node, Var):
        return "t"
    if isinstance(node, Neg):
        return "-" + _wrap(node.operand, 3)
    if isinstance(node, BinOp):
        level = _prec(node)
        return f"{_wrap(node.left, level)} {node.op} {_wrap(node.right, level + 1)}"
    if isinstance(node, Pow):
        base = unparse(node.base)
        if not isinstance(node.base, (Num, Var, Call)):
            base = f"({base})"
        return f"{base}^{node.exponent}"
    if isinstance(node, Call):
        return f"{node.func}({unparse(node.arg)})"
    raise TypeError(f"not an expression node: {node!r}")


def _jet(node: Node, t0: float, order: int) -> Jet:
    if isinstance(node, Num):
        return Jet.constant(node.value, t0, order)
    if isinstance(node, Var):
        return Jet.variable(t0, order)
    if isinstance(node, Neg):
        return -_jet(node.operand, t0, order)
    if isinstance(node, BinOp):
        a, b = _jet(node.left, t0, order), _jet(node.right, t0, order)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        return a / b
    if isinstance(node, Pow):
        base = _jet(node.base, t0, order)
        if node.exponent < 0 and base.coeffs[0] == 0.0:
            raise DomainViolation(f"negative power of zero at t0={t0}")
        return base ** node.exponent
    if isinstance(node, Call):
        return jet_elementary(node.func, _jet(node.arg, t0, order))
    raise TypeError(f"not an expression node: {node!r}")


@lru_cache(maxsize=65536)
def _eval_jet_cached(ast: Node, t0: float, order: int) -> Jet:
    result = _jet(ast, t0, order)
    if not np.all(np.isfinite(result.coeffs)):
        raise DomainViolation(f"non-finite value at t0={t0}")
    return result


def eval_jet(spec: FunctionSpec | str, t0: float, order: int) -> Jet:
    """Jet of order ``order`` of the expression at ``t0``."""
    if isinstance(spec, str):
        spec = parse(spec)
    if order < 0:
        raise ValueError("jet order must be nonnegative")
    try:
        return _eval_jet_cached(spec.ast, float(t0), int(order))
    except (ZeroDivisionError, OverflowError, ValueError) as exc:
        if isinstance(exc, DomainViolation):
            raise
        raise DomainViolation(f"{spec.source!r} at t0={t0}: {exc}") from exc


def eval_value(spec: FunctionSpec | str, t: float) -> float:
    return eval_jet(spec, t, 0).value


INF = math.inf


@dataclass(frozen=True)
class VectorFunctionSpec:
    components: tuple[FunctionSpec, ...]
    domain: tuple[float, float] = (-INF, INF)

    def __post_init__(self):
        if len(self.components) < 1:
            raise DimensionMismatch("a vector function needs at least one component")
        lo, hi = self.domain
        if not lo < hi:
            raise ValueError(f"empty domain {self.domain}")

    @classmethod
    def of(cls, sources: Sequence[str | FunctionSpec], domain=(-INF, INF)) -> VectorFunctionSpec:
        comps = tuple(s if isinstance(s, FunctionSpec) else parse(s) for s in sources)
        return cls(comps, (float(domain[0]), float(domain[1])))

    @property
    def n(self) -> int:
        return len(self.components)

    def eval_jets(self, t0: float, order: int) -> list[Jet]:
        return [eval_jet(c, t0, order) for c in self.components]

    def sources(self) -> list[str]:
        return [c.source for c in self.components]


@dataclass(frozen=True)
class MatrixFunctionSpec:
    """Square matrix whose entries are expressions in ``t``."""

    rows: tuple[tuple[FunctionSpec, ...], ...]

    def __post_init__(self):
        n = len(self.rows)
        if n < 1 or any(len(r) != n for r in self.rows):
            raise DimensionMismatch("matrix function must be square and nonempty")

    @classmethod
    def of(cls, rows: Sequence[Sequence[str | FunctionSpec]]) -> MatrixFunctionSpec:
        return cls(tuple(tuple(e if isinstance(e, FunctionSpec) else parse(e) for e in r) for r in rows))

    @property
    def n(self) -> int:
        return len(self.rows)

    def eval_jets(self, t0: float, order: int) -> MatrixOfJets:
        return MatrixOfJets.from_jets([[eval_jet(e, t0, order) for e in r] for r in self.rows])
