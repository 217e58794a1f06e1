"""Deterministic trend expressions theta(t): parsing, evaluation, bounds.

Accepted grammar (whitespace insignificant, source capped at 64 KiB):

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := ('+' | '-') factor | power
    power  := atom ('^' factor)?          right-associative
    atom   := NUMBER | 't' | FUNC '(' expr ')' | '(' expr ')'
    FUNC   := sin | cos | exp | log

'^' binds tighter than unary minus, so "-2^2" is -(2^2) = -4.  Syntax
errors carry the byte offset and the set of tokens that would have been
accepted.  Evaluation guards: divisors smaller than 1e-12 in magnitude,
log of a non-positive argument, fractional powers of negative bases, and
non-finite results all raise ExpressionError.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ExpressionError

__all__ = [
    "Num",
    "TimeVar",
    "Neg",
    "BinOp",
    "Call",
    "TrendExpr",
    "TrendClassSpec",
    "parse",
    "evaluate",
    "to_string",
    "sup_bound",
]

_MAX_SOURCE_BYTES = 64 * 1024
_MAX_DEPTH = 500
_FUNCS = ("sin", "cos", "exp", "log")
_DIV_GUARD = 1e-12


# ---------------------------------------------------------------------------
# syntax tree


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class TimeVar:
    pass


@dataclass(frozen=True)
class Neg:
    child: "TrendExpr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "TrendExpr"
    right: "TrendExpr"


@dataclass(frozen=True)
class Call:
    name: str
    arg: "TrendExpr"


TrendExpr = Num | TimeVar | Neg | BinOp | Call


@dataclass(frozen=True)
class TrendClassSpec:
    """Declared regularity of a trend: Lipschitz constant and Hoelder order.

    `k` whole derivatives with the k-th gamma-Hoelder, so the smoothness
    order is rho = k + gamma.  Metadata for experiment configs; nothing is
    verified against the expression.
    """

    L: float
    k: int
    gamma: float

    def __post_init__(self):
        if not (isinstance(self.L, (int, float)) and math.isfinite(self.L) and self.L > 0):
            raise DomainError(f"Lipschitz constant L must be > 0, got {self.L!r}")
        if not (isinstance(self.k, int) and self.k >= 0):
            raise DomainError(f"k must be an integer >= 0, got {self.k!r}")
        if not (isinstance(self.gamma, (int, float)) and 0.0 < self.gamma <= 1.0):
            raise DomainError(f"gamma must lie in (0, 1], got {self.gamma!r}")

    @property
    def rho(self) -> float:
        return self.k + self.gamma


# ---------------------------------------------------------------------------
# tokenizer

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            at = len(text) - len(stripped)
            raise ExpressionError(f"unexpected character {stripped[0]!r}", at)
        if m.group("num") is not None:
            tokens.append(("num", m.group("num"), m.start("num")))
        elif m.group("ident") is not None:
            tokens.append(("ident", m.group("ident"), m.start("ident")))
        else:
            tokens.append(("op", m.group("op"), m.start("op")))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


# ---------------------------------------------------------------------------
# parser


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def advance(self) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, expected: str):
        kind, value, offset = self.peek()
        found = "end of input" if kind == "end" else repr(value)
        raise ExpressionError(f"expected {expected}, found {found}", offset)

    def parse(self) -> TrendExpr:
        node = self.expr(0)
        if self.peek()[0] != "end":
            self.fail("an operator or end of input")
        return node

    def expr(self, depth: int) -> TrendExpr:
        if depth > _MAX_DEPTH:
            raise ExpressionError("expression nesting too deep", self.peek()[2])
        node = self.term(depth + 1)
        while self.peek()[:2] in (("op", "+"), ("op", "-")):
            op = self.advance()[1]
            node = BinOp(op, node, self.term(depth + 1))
        return node

    def term(self, depth: int) -> TrendExpr:
        node = self.factor(depth + 1)
        while self.peek()[:2] in (("op", "*"), ("op", "/")):
            op = self.advance()[1]
            node = BinOp(op, node, self.factor(depth + 1))
        return node

    def factor(self, depth: int) -> TrendExpr:
        if depth > _MAX_DEPTH:
            raise ExpressionError("expression nesting too deep", self.peek()[2])
        kind, value, _ = self.peek()
        if kind == "op" and value == "-":
            self.advance()
            return Neg(self.factor(depth + 1))
        if kind == "op" and value == "+":
            self.advance()
            return self.factor(depth + 1)
        return self.power(depth + 1)

    def power(self, depth: int) -> TrendExpr:
        node = self.atom(depth + 1)
        if self.peek()[:2] == ("op", "^"):
            self.advance()
            # right-associative; exponent may carry its own sign
            node = BinOp("^", node, self.factor(depth + 1))
        return node

    def atom(self, depth: int) -> TrendExpr:
        kind, value, offset = self.peek()
        if kind == "num":
            self.advance()
            return Num(float(value))
        if kind == "ident":
            self.advance()
            if value == "t":
                return TimeVar()
            if value in _FUNCS:
                if self.peek()[:2] != ("op", "("):
                    self.fail(f"'(' after function {value!r}")
                self.advance()
                arg = self.expr(depth + 1)
                if self.peek()[:2] != ("op", ")"):
                    self.fail("')'")
                self.advance()
                return Call(value, arg)
            raise ExpressionError(
                f"unknown identifier {value!r}; expected 't' or one of "
                + ", ".join(_FUNCS),
                offset,
            )
        if kind == "op" and value == "(":
            self.advance()
            node = self.expr(depth + 1)
            if self.peek()[:2] != ("op", ")"):
                self.fail("')'")
            self.advance()
            return node
        self.fail("a number, 't', a function call, or '('")


def parse(text: str) -> TrendExpr:
    """Parse a trend expression into an immutable tree."""
    if not isinstance(text, str):
        raise ExpressionError(f"trend source must be a string, got {type(text).__name__}")
    if len(text.encode("utf-8")) > _MAX_SOURCE_BYTES:
        raise ExpressionError("trend source exceeds 64 KiB")
    node = _Parser(text).parse()
    return node


# ---------------------------------------------------------------------------
# evaluation


def _eval(node: TrendExpr, t: np.ndarray) -> np.ndarray:
    if isinstance(node, Num):
        return np.full_like(t, node.value)
    if isinstance(node, TimeVar):
        return t
    if isinstance(node, Neg):
        return -_eval(node.child, t)
    if isinstance(node, Call):
        arg = _eval(node.arg, t)
        if node.name == "log":
            if np.any(arg <= 0.0):
                raise ExpressionError("log of a non-positive argument")
            return np.log(arg)
        return getattr(np, node.name)(arg)
    if isinstance(node, BinOp):
        a = _eval(node.left, t)
        b = _eval(node.right, t)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if node.op == "/":
            if np.any(np.abs(b) < _DIV_GUARD):
                raise ExpressionError(f"divisor smaller than {_DIV_GUARD} in magnitude")
            return a / b
        # '^'
        if np.any((a < 0.0) & (np.mod(b, 1.0) != 0.0)):
            raise ExpressionError("fractional power of a negative base")
        with np.errstate(divide="raise", over="ignore"):
            try:
                return np.power(a, b)
            except FloatingPointError as exc:
                raise ExpressionError("power evaluation diverged") from exc
    raise TypeError(f"not a trend node: {node!r}")


def evaluate(expr: TrendExpr, t):
    """Evaluate at a scalar or array of times; non-finite results raise."""
    arr = np.asarray(t, dtype=float)
    # the finiteness check below turns overflow into an error, so the
    # intermediate numpy warnings carry no information
    with np.errstate(over="ignore", invalid="ignore"):
        out = _eval(expr, arr)
    if not np.all(np.isfinite(out)):
        raise ExpressionError("trend evaluation produced a non-finite value")
    if np.isscalar(t) or np.ndim(t) == 0:
        return float(out)
    return out


def to_string(expr: TrendExpr) -> str:
    """Canonical parenthesized text; parse(to_string(e)) == e for parser output."""
    if isinstance(expr, Num):
        return repr(expr.value)
    if isinstance(expr, TimeVar):
        return "t"
    if isinstance(expr, Neg):
        return f"(-{to_string(expr.child)})"
    if isinstance(expr, BinOp):
        return f"({to_string(expr.left)} {expr.op} {to_string(expr.right)})"
    if isinstance(expr, Call):
        return f"{expr.name}({to_string(expr.arg)})"
    raise TypeError(f"not a trend node: {expr!r}")


def sup_bound(expr: TrendExpr, T: float, m: int = 4096) -> float:
    """Sampled sup of |theta| on [0, T], inflated by a 1.05 safety factor.

    Max over m + 1 equispaced points; m must be at least 1000 so narrow
    features are unlikely to slip between samples.
    """
    if not (isinstance(T, (int, float)) and math.isfinite(T) and T > 0):
        raise DomainError(f"T must be a finite positive number, got {T!r}")
    if not (isinstance(m, int) and m >= 1000):
        raise DomainError(f"m must be an integer >= 1000, got {m!r}")
    values = evaluate(expr, np.linspace(0.0, float(T), m + 1))
    return float(np.max(np.abs(values))) * 1.05
