"""A small expression language for scalar fields on R^n.

Grammar (whitespace is insignificant)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := primary ('^' unary)?          # right associative
    primary := NUMBER | VAR | FUNC '(' expr ')' | '(' expr ')'

Variables are ``x1`` .. ``x{dim}``; functions are ``exp log sin cos sinh cosh
tanh sqrt abs``.  There is no implicit multiplication, so ``2x1`` is rejected.

Trees are immutable and compare structurally, which is what makes the
canonical text round trip testable::

    >>> e = parse("x1^2 + 2*x2", 3)
    >>> str(e)
    '((x1 ^ 2.0) + (2.0 * x2))'
    >>> parse(str(e), 3) == e
    True
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DomainError, ParseError

__all__ = [
    "Const", "Var", "Neg", "BinOp", "Call", "Node", "ScalarExpr",
    "FUNCTIONS", "parse", "evaluate", "evaluate_many", "to_canonical_text", "const", "var",
    "diff",
]

FUNCTIONS = ("exp", "log", "sin", "cos", "sinh", "cosh", "tanh", "sqrt", "abs")


@dataclass(frozen=True)
class Const:
    value: float

    def __post_init__(self):
        v = float(self.value)
        if not math.isfinite(v) or v < 0:
            # negative literals are spelled as Neg(Const) so that text round-trips
            raise ValueError(f"constant must be finite and non-negative, got {self.value!r}")
        object.__setattr__(self, "value", v)


@dataclass(frozen=True)
class Var:
    index: int  # 1-based


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    name: str
    arg: "Node"


Node = Union[Const, Var, Neg, BinOp, Call]


def _node_text(node: Node) -> str:
    if isinstance(node, Const):
        return repr(node.value)
    if isinstance(node, Var):
        return f"x{node.index}"
    if isinstance(node, Neg):
        return f"(-{_node_text(node.operand)})"
    if isinstance(node, BinOp):
        return f"({_node_text(node.left)} {node.op} {_node_text(node.right)})"
    return f"{node.name}({_node_text(node.arg)})"


def _free_vars(node: Node, out: set[int]) -> set[int]:
    if isinstance(node, Var):
        out.add(node.index)
    elif isinstance(node, Neg):
        _free_vars(node.operand, out)
    elif isinstance(node, BinOp):
        _free_vars(node.left, out)
        _free_vars(node.right, out)
    elif isinstance(node, Call):
        _free_vars(node.arg, out)
    return out


def _lift(other, dim: int) -> Node:
    if isinstance(other, ScalarExpr):
        if other.dim != dim:
            raise ValueError(f"dimension mismatch: {other.dim} != {dim}")
        return other.root
    x = float(other)
    return Neg(Const(-x)) if x < 0 else Const(x)


@dataclass(frozen=True)
class ScalarExpr:
    """A parsed scalar field in the variables ``x1..x{dim}``."""

    root: Node
    dim: int

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be positive")
        bad = [i for i in _free_vars(self.root, set()) if not 1 <= i <= self.dim]
        if bad:
            raise ValueError(f"variable index out of range for dim {self.dim}: {bad}")

    def __str__(self) -> str:
        return _node_text(self.root)

    def variables(self) -> frozenset[int]:
        """1-based indices of the variables that occur in the tree."""
        return frozenset(_free_vars(self.root, set()))

    def is_constant(self) -> bool:
        return not self.variables()

    def __call__(self, p) -> float:
        return evaluate(self, p)

    def _bin(self, op, other, reflected=False):
        other = _lift(other, self.dim)
        left, right = (other, self.root) if reflected else (self.root, other)
        return ScalarExpr(BinOp(op, left, right), self.dim)

    def __add__(self, other):
        return self._bin("+", other)

    def __radd__(self, other):
        return self._bin("+", other, True)

    def __sub__(self, other):
        return self._bin("-", other)

    def __rsub__(self, other):
        return self._bin("-", other, True)

    def __mul__(self, other):
        return self._bin("*", other)

    def __rmul__(self, other):
        return self._bin("*", other, True)

    def __truediv__(self, other):
        return self._bin("/", other)

    def __rtruediv__(self, other):
        return self._bin("/", other, True)

    def __pow__(self, other):
        return self._bin("^", other)

    def __neg__(self):
        return ScalarExpr(Neg(self.root), self.dim)

    def apply(self, name: str) -> "ScalarExpr":
        if name not in FUNCTIONS:
            raise ValueError(f"unknown function {name!r}")
        return ScalarExpr(Call(name, self.root), self.dim)


def const(value: float, dim: int) -> ScalarExpr:
    return ScalarExpr(_lift(value, dim), dim)


def var(index: int, dim: int) -> ScalarExpr:
    return ScalarExpr(Var(index), dim)


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)
_VAR = re.compile(r"x(\d+)\Z")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(pos, "a number, variable, function or operator", text)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, dim: int):
        self.text = text
        self.dim = dim
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, expected: str):
        raise ParseError(self.peek()[2], expected, self.text)

    def expect(self, value: str):
        if self.peek()[1] != value:
            self.fail(f"'{value}'")
        return self.take()

    def parse(self) -> Node:
        node = self.expr()
        if self.peek()[0] != "end":
            self.fail("an operator or end of input")
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Node:
        if self.peek()[1] == "-":
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Node:
        base = self.primary()
        if self.peek()[1] == "^":
            self.take()
            return BinOp("^", base, self.unary())
        return base

    def primary(self) -> Node:
        kind, value, pos = self.peek()
        if kind == "num":
            self.take()
            return Const(float(value))
        if kind == "ident":
            self.take()
            m = _VAR.match(value)
            if m:
                index = int(m.group(1))
                if not 1 <= index <= self.dim:
                    raise ParseError(pos, f"a variable x1..x{self.dim}", self.text)
                return Var(index)
            if value in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(value, arg)
            raise ParseError(pos, f"a variable x1..x{self.dim} or one of {', '.join(FUNCTIONS)}",
                             self.text)
        if value == "(":
            self.take()
            node = self.expr()
            self.expect(")")
            return node
        self.fail("a number, variable, function or '('")


def parse(text: str, dim: int) -> ScalarExpr:
    """Parse ``text`` into a :class:`ScalarExpr` over ``dim`` variables."""
    if dim < 1:
        raise ValueError("dim must be positive")
    return ScalarExpr(_Parser(text, dim).parse(), dim)


def to_canonical_text(expr: ScalarExpr) -> str:
    """Fully parenthesised text that re-parses to the same tree."""
    return _node_text(expr.root)


# ------------------------------------------------------------- evaluation

def _first_bad(mask, P):
    idx = int(np.flatnonzero(mask)[0])
    return P[idx]


def check_log(a, P):
    bad = a < 0
    if bad.any():
        raise DomainError("log of a negative number", _first_bad(bad, P))


def check_sqrt(a, P):
    bad = a < 0
    if bad.any():
        raise DomainError("sqrt of a negative number", _first_bad(bad, P))


def check_div(b, P):
    bad = b == 0
    if bad.any():
        raise DomainError("division by zero", _first_bad(bad, P))


def check_pow(a, b, P):
    bad = (a < 0) & (b != np.round(b))
    if bad.any():
        raise DomainError("negative base with non-integer exponent", _first_bad(bad, P))


_UFUNC = {
    "exp": np.exp, "log": np.log, "sin": np.sin, "cos": np.cos, "sinh": np.sinh,
    "cosh": np.cosh, "tanh": np.tanh, "sqrt": np.sqrt, "abs": np.abs,
}


def _values(node: Node, P: np.ndarray) -> np.ndarray:
    if isinstance(node, Const):
        return np.full(P.shape[0], node.value)
    if isinstance(node, Var):
        return P[:, node.index - 1].copy()
    if isinstance(node, Neg):
        return -_values(node.operand, P)
    if isinstance(node, BinOp):
        a = _values(node.left, P)
        b = _values(node.right, P)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if node.op == "/":
            check_div(b, P)
            return a / b
        check_pow(a, b, P)
        return np.power(a, b)
    a = _values(node.arg, P)
    if node.name == "log":
        check_log(a, P)
    elif node.name == "sqrt":
        check_sqrt(a, P)
    return _UFUNC[node.name](a)


def as_points(P, dim: int) -> np.ndarray:
    P = np.asarray(P, dtype=float)
    if P.ndim == 1:
        P = P[None, :]
    if P.ndim != 2 or P.shape[1] != dim:
        raise ValueError(f"expected points of dimension {dim}, got shape {P.shape}")
    return P


def evaluate_many(expr: ScalarExpr, P) -> np.ndarray:
    """Evaluate at each row of ``P`` (shape ``(m, dim)``)."""
    P = as_points(P, expr.dim)
    with np.errstate(all="ignore"):
        return _values(expr.root, P)


def evaluate(expr: ScalarExpr, p) -> float:
    """Evaluate at a single point; non-finite results are returned as is."""
    p = np.asarray(p, dtype=float)
    if p.shape != (expr.dim,):
        raise ValueError(f"point has shape {p.shape}, expression needs ({expr.dim},)")
    return float(evaluate_many(expr, p)[0])


# --------------------------------------------------------- differentiation

_ZERO = Const(0.0)
_ONE = Const(1.0)


def _is_zero(node: Node) -> bool:
    return isinstance(node, Const) and node.value == 0.0


def _add(a: Node, b: Node) -> Node:
    if _is_zero(a):
        return b
    if _is_zero(b):
        return a
    return BinOp("+", a, b)


def _sub(a: Node, b: Node) -> Node:
    if _is_zero(b):
        return a
    if _is_zero(a):
        return Neg(b)
    return BinOp("-", a, b)


def _mul(a: Node, b: Node) -> Node:
    if _is_zero(a) or _is_zero(b):
        return _ZERO
    if a == _ONE:
        return b
    if b == _ONE:
        return a
    return BinOp("*", a, b)


def _d(node: Node, k: int) -> Node:
    if isinstance(node, Const):
        return _ZERO
    if isinstance(node, Var):
        return _ONE if node.index == k else _ZERO
    if isinstance(node, Neg):
        d = _d(node.operand, k)
        return _ZERO if _is_zero(d) else Neg(d)
    if isinstance(node, BinOp):
        a, b = node.left, node.right
        da, db = _d(a, k), _d(b, k)
        if node.op == "+":
            return _add(da, db)
        if node.op == "-":
            return _sub(da, db)
        if node.op == "*":
            return _add(_mul(da, b), _mul(a, db))
        if node.op == "/":
            # (a'b - ab') / b^2
            if _is_zero(db):
                return _ZERO if _is_zero(da) else BinOp("/", da, b)
            return BinOp("/", _sub(_mul(da, b), _mul(a, db)), BinOp("^", b, Const(2.0)))
        if not _free_vars(b, set()):
            # a^c -> c a^(c-1) a'
            return _mul(_mul(b, BinOp("^", a, BinOp("-", b, _ONE))), da)
        # a^b -> a^b (b' log a + b a'/a)
        inner = _add(_mul(db, Call("log", a)), _mul(b, BinOp("/", da, a)) if not _is_zero(da) else _ZERO)
        return _mul(node, inner)
    a = node.arg
    da = _d(a, k)
    if _is_zero(da):
        return _ZERO
    name = node.name
    if name == "exp":
        outer = node
    elif name == "log":
        return BinOp("/", da, a)
    elif name == "sin":
        outer = Call("cos", a)
    elif name == "cos":
        outer = Neg(Call("sin", a))
    elif name == "sinh":
        outer = Call("cosh", a)
    elif name == "cosh":
        outer = Call("sinh", a)
    elif name == "tanh":
        outer = BinOp("-", _ONE, BinOp("^", node, Const(2.0)))
    elif name == "sqrt":
        return BinOp("/", da, BinOp("*", Const(2.0), node))
    else:  # abs
        outer = BinOp("/", a, node)
    return _mul(outer, da)


def diff(expr: ScalarExpr, k: int) -> ScalarExpr:
    """Symbolic partial derivative with respect to ``x_k`` (1-based).

    Only zero and unit factors are pruned; no other rewriting happens.
    """
    if not 1 <= k <= expr.dim:
        raise ValueError(f"variable index {k} out of range for dim {expr.dim}")
    return ScalarExpr(_d(expr.root, k), expr.dim)
