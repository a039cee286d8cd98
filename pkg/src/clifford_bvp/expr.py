"""Expression language for boundary data on the hyperplane w_n = 0.

Grammar (EBNF)::

    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary)*
    unary   := ("-" | "+") unary | atom
    atom    := NUMBER
             | "x" DIGITS                       (coordinate x_k)
             | "e" DIGITS | "e(" INT ("," INT)* ")"   (basis blade)
             | FUNC "(" expr ")"                (exp, sin, cos, sqrt)
             | "pow(" expr "," ["-"] INT ")"
             | ("abs2" | "gauss") "(" "x" ")"
             | "(" expr ")"

``e12`` names the blade e_1 e_2 (only for n <= 9); ``e(1,10)`` works for any
n.  ``e0`` is the identity.  Division is only by scalar-valued expressions.
Boundary expressions may not mention e_n; Clifford literals parsed with
``para_real=False`` may.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from .algebra import Multivector, Signature, blade_name, mask_of, mul_arrays
from .errors import DomainError, ExprSyntaxError, ParaRealViolation

SCALAR_FUNCS = {"exp": np.exp, "sin": np.sin, "cos": np.cos, "sqrt": np.sqrt}
POINT_FUNCS = ("abs2", "gauss")


# ---------------------------------------------------------------- AST


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    index: int


@dataclass(frozen=True)
class Blade:
    mask: int


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    name: str
    arg: "Expr"


@dataclass(frozen=True)
class PointCall:
    """abs2(x) or gauss(x): functions of the whole hyperplane point."""

    name: str


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: int


Expr = Union[Num, Var, Blade, Neg, BinOp, Call, PointCall, Pow]


# ---------------------------------------------------------------- tokenizer

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/(),])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    pos: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(Token(kind, m.group(), pos))
        pos = m.end()
    tokens.append(Token("end", "", len(text)))
    return tokens


# ---------------------------------------------------------------- parser


class _Parser:
    def __init__(self, text: str, sig: Signature, para_real: bool):
        self.text = text
        self.sig = sig
        self.para_real = para_real
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def expect(self, text: str) -> Token:
        if self.tok.text != text:
            raise ExprSyntaxError(f"unexpected {self.tok.text or 'end of input'!r}", self.tok.pos, repr(text))
        return self.advance()

    def parse(self) -> Expr:
        node = self.expr()
        if self.tok.kind != "end":
            raise ExprSyntaxError(f"unexpected {self.tok.text!r}", self.tok.pos, "operator or end of input")
        return node

    def expr(self) -> Expr:
        node = self.term()
        while self.tok.text in ("+", "-"):
            op = self.advance().text
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.unary()
        while self.tok.text in ("*", "/"):
            op = self.advance().text
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Expr:
        if self.tok.text == "-":
            self.advance()
            return Neg(self.unary())
        if self.tok.text == "+":
            self.advance()
            return self.unary()
        return self.atom()

    def atom(self) -> Expr:
        t = self.tok
        if t.kind == "num":
            self.advance()
            return Num(float(t.text))
        if t.text == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        if t.kind == "name":
            return self.name()
        raise ExprSyntaxError(f"unexpected {t.text or 'end of input'!r}", t.pos, "number, name or '('")

    def _blade(self, gens: list[int], pos: int) -> Blade:
        n = self.sig.n
        if any(j > n for j in gens):
            raise ExprSyntaxError(f"blade uses a generator beyond e{n}", pos)
        try:
            mask = mask_of(gens)
        except ValueError as exc:
            raise ExprSyntaxError(str(exc), pos) from None
        if self.para_real and mask & self.sig.en_mask:
            raise ParaRealViolation(f"blade at position {pos} contains e{n}; boundary data must be para-real")
        return Blade(mask)

    def name(self) -> Expr:
        t = self.advance()
        word = t.text
        n = self.sig.n
        if re.fullmatch(r"x\d+", word):
            k = int(word[1:])
            if k >= n:
                raise ExprSyntaxError(f"coordinate {word} out of range x0..x{n - 1}", t.pos)
            return Var(k)
        if word == "e" and self.tok.text == "(":
            self.advance()
            gens = [self._int()]
            while self.tok.text == ",":
                self.advance()
                gens.append(self._int())
            self.expect(")")
            return self._blade(gens, t.pos)
        if re.fullmatch(r"e\d+", word):
            digits = word[1:]
            if digits == "0":
                return Blade(0)
            if n > 9:
                raise ExprSyntaxError(f"ambiguous blade {word} for n > 9, use e(i,j,...)", t.pos)
            return self._blade([int(ch) for ch in digits], t.pos)
        if word in SCALAR_FUNCS:
            self.expect("(")
            arg = self.expr()
            self.expect(")")
            return Call(word, arg)
        if word in POINT_FUNCS:
            self.expect("(")
            if self.tok.text != "x":
                raise ExprSyntaxError(f"{word} takes the point argument x", self.tok.pos, "'x'")
            self.advance()
            self.expect(")")
            return PointCall(word)
        if word == "pow":
            self.expect("(")
            base = self.expr()
            self.expect(",")
            sign = 1
            if self.tok.text == "-":
                self.advance()
                sign = -1
            exponent = sign * self._int()
            self.expect(")")
            return Pow(base, exponent)
        raise ExprSyntaxError(f"unknown name {word!r}", t.pos)

    def _int(self) -> int:
        t = self.tok
        if t.kind != "num" or not t.text.isdigit():
            raise ExprSyntaxError(f"unexpected {t.text or 'end of input'!r}", t.pos, "integer")
        self.advance()
        return int(t.text)


def parse(text: str, sig: Signature, para_real: bool = True) -> Expr:
    """Parse an expression; blades containing e_n raise ParaRealViolation unless para_real=False."""
    return _Parser(text, sig, para_real).parse()


# ---------------------------------------------------------------- printing

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def pretty(node: Expr, n: int) -> str:
    """Render an AST so that parse(pretty(node)) == node."""
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Var):
        return f"x{node.index}"
    if isinstance(node, Blade):
        if node.mask == 0:
            return "e0"
        return blade_name(node.mask, n)
    if isinstance(node, Neg):
        inner = pretty(node.operand, n)
        if isinstance(node.operand, BinOp):
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(node, BinOp):
        prec = _PREC[node.op]
        left = pretty(node.left, n)
        right = pretty(node.right, n)
        if isinstance(node.left, BinOp) and _PREC[node.left.op] < prec:
            left = f"({left})"
        if isinstance(node.right, BinOp) and _PREC[node.right.op] <= prec:
            right = f"({right})"
        return f"{left} {node.op} {right}"
    if isinstance(node, Call):
        return f"{node.name}({pretty(node.arg, n)})"
    if isinstance(node, PointCall):
        return f"{node.name}(x)"
    if isinstance(node, Pow):
        return f"pow({pretty(node.base, n)}, {node.exponent})"
    raise TypeError(f"not an expression node: {node!r}")


# ---------------------------------------------------------------- evaluation


def _scalar_column(values: np.ndarray, what: str) -> np.ndarray:
    if np.any(values[:, 1:] != 0.0):
        raise DomainError(f"{what} needs a scalar-valued argument")
    return values[:, 0]


def evaluate_array(node: Expr, points: np.ndarray, sig: Signature) -> np.ndarray:
    """Evaluate at hyperplane points of shape (N, n); returns (N, 2^n) coefficients."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    n = sig.n
    if points.shape[1] != n:
        raise ValueError(f"hyperplane points need {n} coordinates, got {points.shape[1]}")
    count = points.shape[0]

    def scalar(v) -> np.ndarray:
        out = np.zeros((count, sig.dim))
        out[:, 0] = v
        return out

    def ev(nd: Expr) -> np.ndarray:
        if isinstance(nd, Num):
            return scalar(nd.value)
        if isinstance(nd, Var):
            return scalar(points[:, nd.index])
        if isinstance(nd, Blade):
            out = np.zeros((count, sig.dim))
            out[:, nd.mask] = 1.0
            return out
        if isinstance(nd, Neg):
            return -ev(nd.operand)
        if isinstance(nd, BinOp):
            a, b = ev(nd.left), ev(nd.right)
            if nd.op == "+":
                return a + b
            if nd.op == "-":
                return a - b
            if nd.op == "*":
                return mul_arrays(a, b, n)
            den = _scalar_column(b, "division")
            if np.any(den == 0.0):
                raise DomainError("division by zero")
            return a / den[:, None]
        if isinstance(nd, Call):
            arg = _scalar_column(ev(nd.arg), nd.name)
            if nd.name == "sqrt" and np.any(arg < 0):
                raise DomainError("sqrt of a negative value")
            with np.errstate(over="raise", invalid="raise"):
                try:
                    return scalar(SCALAR_FUNCS[nd.name](arg))
                except FloatingPointError as exc:
                    raise DomainError(f"{nd.name} overflowed: {exc}") from None
        if isinstance(nd, PointCall):
            r2 = np.sum(points**2, axis=1)
            return scalar(r2 if nd.name == "abs2" else np.exp(-r2))
        if isinstance(nd, Pow):
            base = ev(nd.base)
            k = nd.exponent
            if k < 0:
                den = _scalar_column(base, "negative power")
                if np.any(den == 0.0):
                    raise DomainError("negative power of zero")
                return scalar(den ** float(k))
            out = scalar(1.0)
            for _ in range(k):
                out = mul_arrays(out, base, n)
            return out
        raise TypeError(f"not an expression node: {nd!r}")

    return ev(node)


def evaluate(node: Expr, point, sig: Signature) -> Multivector:
    point = np.asarray(point, dtype=float)
    return Multivector(sig, evaluate_array(node, point[None, :], sig)[0])


def uses_point_function(node: Expr, names=("gauss",)) -> bool:
    if isinstance(node, PointCall):
        return node.name in names
    if isinstance(node, (Neg,)):
        return uses_point_function(node.operand, names)
    if isinstance(node, BinOp):
        return uses_point_function(node.left, names) or uses_point_function(node.right, names)
    if isinstance(node, Call):
        return uses_point_function(node.arg, names)
    if isinstance(node, Pow):
        return uses_point_function(node.base, names)
    return False


def parse_multivector(text: str, sig: Signature) -> Multivector:
    """Parse a constant Clifford literal such as ``1.0 - 2.5*e12``."""
    node = parse(text, sig, para_real=False)
    if _uses_point(node):
        raise ExprSyntaxError("a constant literal cannot depend on x", 0, "numbers and blades")
    dummy = np.zeros((1, sig.n))
    return Multivector(sig, evaluate_array(node, dummy, sig)[0])


def _uses_point(node: Expr) -> bool:
    if isinstance(node, (Var, PointCall)):
        return True
    if isinstance(node, Neg):
        return _uses_point(node.operand)
    if isinstance(node, BinOp):
        return _uses_point(node.left) or _uses_point(node.right)
    if isinstance(node, Call):
        return _uses_point(node.arg)
    if isinstance(node, Pow):
        return _uses_point(node.base)
    return False
