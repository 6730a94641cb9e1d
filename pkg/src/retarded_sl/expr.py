"""Scalar functions of ``t`` given as text or as sampled tables.

Expressions use ordinary infix syntax::

    t/2        t*exp(-t)        2^3^2        sqrt(abs(sin(3*t)))

``^`` binds tighter than unary minus, which binds tighter than ``*`` and
``/``; ``^`` is right associative.  The only variable is ``t`` and the only
named constants are ``pi`` and ``e``.

Tables are ascending ``(t, value)`` pairs read from a CSV file with header
``t,value`` and interpolated with a monotone cubic (PCHIP).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence, Union

import numpy as np
from scipy.interpolate import PchipInterpolator

__all__ = [
    "Expr",
    "ParseError",
    "ExprDomainError",
    "SampledFunction",
    "ScalarFunction",
    "parse",
    "evaluate",
    "pretty",
    "load_function",
]

UNARY_FUNCS = ("sin", "cos", "exp", "sqrt", "log", "abs")
BINARY_OPS = {"+": "add", "-": "sub", "*": "mul", "/": "div", "^": "pow"}
_SYMBOL = {v: k for k, v in BINARY_OPS.items()}
_CONSTANTS = {"pi": math.pi, "e": math.e}


class ParseError(ValueError):
    """Malformed expression text."""

    def __init__(self, offset: int, message: str, expected: str = ""):
        self.offset = offset
        self.message = message
        self.expected = expected
        text = f"offset {offset}: {message}"
        if expected:
            text += f" (expected {expected})"
        super().__init__(text)


class ExprDomainError(ArithmeticError):
    """Evaluation left the real domain (log of a non-positive number etc.)."""

    def __init__(self, t: float, node: "Expr", message: str):
        self.t = t
        self.node = node
        super().__init__(f"{message} at t={t!r} in {pretty(node)}")


@dataclass(frozen=True)
class Expr:
    kind: str
    children: tuple["Expr", ...] = ()
    value: float = 0.0

    def __post_init__(self):
        arity = {"const": 0, "var": 0, "neg": 1}
        arity.update({name: 1 for name in UNARY_FUNCS})
        arity.update({name: 2 for name in BINARY_OPS.values()})
        if self.kind not in arity:
            raise ValueError(f"unknown node kind {self.kind!r}")
        if len(self.children) != arity[self.kind]:
            raise ValueError(f"{self.kind} takes {arity[self.kind]} children")

    def __call__(self, t: float) -> float:
        return evaluate(self, t)

    def sample(self, ts) -> np.ndarray:
        return evaluate_array(self, ts)

    @property
    def is_zero(self) -> bool:
        return self.kind == "const" and self.value == 0.0

    def __str__(self) -> str:
        return pretty(self)


# ---------------------------------------------------------------------------
# Parsing

@dataclass
class _Token:
    kind: str  # num, name, op, lparen, rparen, end
    text: str
    offset: int
    value: float = 0.0


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch.isdigit() or (ch == "." and i + 1 < n and text[i + 1].isdigit()):
            j = i
            while j < n and text[j].isdigit():
                j += 1
            if j < n and text[j] == ".":
                j += 1
                while j < n and text[j].isdigit():
                    j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k < n and text[k].isdigit():
                    while k < n and text[k].isdigit():
                        k += 1
                    j = k
            tokens.append(_Token("num", text[i:j], i, float(text[i:j])))
            i = j
        elif ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(_Token("name", text[i:j], i))
            i = j
        elif ch in BINARY_OPS:
            tokens.append(_Token("op", ch, i))
            i += 1
        elif ch == "(":
            tokens.append(_Token("lparen", ch, i))
            i += 1
        elif ch == ")":
            tokens.append(_Token("rparen", ch, i))
            i += 1
        else:
            raise ParseError(i, f"unexpected character {ch!r}")
    tokens.append(_Token("end", "", n))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str, what: str) -> _Token:
        if self.tok.kind != kind:
            raise ParseError(self.tok.offset, f"expected {what}", what)
        return self.advance()

    def parse(self) -> Expr:
        node = self.expr()
        if self.tok.kind != "end":
            raise ParseError(self.tok.offset, f"unexpected {self.tok.text!r}",
                             "operator or end of input")
        return node

    def expr(self) -> Expr:
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = BINARY_OPS[self.advance().text]
            node = Expr(op, (node, self.term()))
        return node

    def term(self) -> Expr:
        node = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = BINARY_OPS[self.advance().text]
            node = Expr(op, (node, self.unary()))
        return node

    def unary(self) -> Expr:
        if self.tok.kind == "op" and self.tok.text == "-":
            self.advance()
            return Expr("neg", (self.unary(),))
        if self.tok.kind == "op" and self.tok.text == "+":
            self.advance()
            return self.unary()
        return self.power()

    def power(self) -> Expr:
        base = self.primary()
        if self.tok.kind == "op" and self.tok.text == "^":
            self.advance()
            # exponent may carry its own sign: 2^-1
            return Expr("pow", (base, self.unary()))
        return base

    def primary(self) -> Expr:
        tok = self.tok
        if tok.kind == "num":
            self.advance()
            return Expr("const", value=tok.value)
        if tok.kind == "lparen":
            self.advance()
            node = self.expr()
            self.expect("rparen", "')'")
            return node
        if tok.kind == "name":
            self.advance()
            if tok.text == "t":
                return Expr("var")
            if tok.text in _CONSTANTS:
                return Expr("const", value=_CONSTANTS[tok.text])
            if tok.text in UNARY_FUNCS:
                self.expect("lparen", "'('")
                arg = self.expr()
                self.expect("rparen", "')'")
                return Expr(tok.text, (arg,))
            raise ParseError(tok.offset, f"unknown name {tok.text!r}",
                             "t, pi, e or a function")
        raise ParseError(tok.offset, "expected expression", "expression")


def parse(text: str) -> Expr:
    """Parse ``text`` into an expression tree; raises :class:`ParseError`."""
    return _Parser(text).parse()


def pretty(node: Expr) -> str:
    """Fully parenthesised text form that reparses to the same tree."""
    kind = node.kind
    if kind == "const":
        return repr(float(node.value))
    if kind == "var":
        return "t"
    if kind == "neg":
        return f"(-{pretty(node.children[0])})"
    if kind in UNARY_FUNCS:
        return f"{kind}({pretty(node.children[0])})"
    left, right = node.children
    return f"({pretty(left)}{_SYMBOL[kind]}{pretty(right)})"


# ---------------------------------------------------------------------------
# Evaluation

def evaluate(node: Expr, t: float) -> float:
    """Evaluate at a scalar ``t`` in double precision."""
    kind = node.kind
    if kind == "const":
        return node.value
    if kind == "var":
        return float(t)
    if kind == "neg":
        return -evaluate(node.children[0], t)
    if kind in UNARY_FUNCS:
        x = evaluate(node.children[0], t)
        if kind == "sin":
            return math.sin(x)
        if kind == "cos":
            return math.cos(x)
        if kind == "abs":
            return abs(x)
        if kind == "sqrt":
            if x < 0:
                raise ExprDomainError(t, node, "sqrt of negative number")
            return math.sqrt(x)
        if kind == "log":
            if x <= 0:
                raise ExprDomainError(t, node, "log of non-positive number")
            return math.log(x)
        try:
            return math.exp(x)
        except OverflowError:
            raise ExprDomainError(t, node, "overflow") from None
    a = evaluate(node.children[0], t)
    b = evaluate(node.children[1], t)
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    if kind == "div":
        if b == 0:
            raise ExprDomainError(t, node, "division by zero")
        return a / b
    if a < 0 and b != int(b):
        raise ExprDomainError(t, node, "non-integer power of negative base")
    if a == 0 and b < 0:
        raise ExprDomainError(t, node, "division by zero")
    try:
        return math.pow(a, b)
    except OverflowError:
        raise ExprDomainError(t, node, "overflow") from None


def evaluate_array(node: Expr, ts) -> np.ndarray:
    """Vectorised evaluation over an array of ``t`` values."""
    ts = np.asarray(ts, dtype=float)
    with np.errstate(all="ignore"):
        out = _eval_vec(node, ts, ts)
    return np.broadcast_to(out, ts.shape).astype(float, copy=True)


def _fail(node: Expr, ts: np.ndarray, mask, message: str):
    mask = np.broadcast_to(mask, ts.shape)
    raise ExprDomainError(float(ts[mask][0]), node, message)


def _eval_vec(node: Expr, x_t: np.ndarray, ts: np.ndarray):
    kind = node.kind
    if kind == "const":
        return np.full(ts.shape, node.value)
    if kind == "var":
        return x_t
    if kind == "neg":
        return -_eval_vec(node.children[0], x_t, ts)
    if kind in UNARY_FUNCS:
        x = _eval_vec(node.children[0], x_t, ts)
        if kind == "sqrt" and np.any(x < 0):
            _fail(node, ts, x < 0, "sqrt of negative number")
        if kind == "log" and np.any(x <= 0):
            _fail(node, ts, x <= 0, "log of non-positive number")
        out = getattr(np, kind)(x)
        if kind == "exp" and not np.all(np.isfinite(out)):
            _fail(node, ts, ~np.isfinite(out), "overflow")
        return out
    a = _eval_vec(node.children[0], x_t, ts)
    b = _eval_vec(node.children[1], x_t, ts)
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    if kind == "div":
        if np.any(b == 0):
            _fail(node, ts, b == 0, "division by zero")
        return a / b
    bad = (a < 0) & (b != np.round(b))
    if np.any(bad):
        _fail(node, ts, bad, "non-integer power of negative base")
    bad = (a == 0) & (b < 0)
    if np.any(bad):
        _fail(node, ts, bad, "division by zero")
    out = np.power(a, b)
    if not np.all(np.isfinite(out)):
        _fail(node, ts, ~np.isfinite(out), "overflow")
    return out


# ---------------------------------------------------------------------------
# Sampled tables

@dataclass(frozen=True, eq=False)
class SampledFunction:
    """Monotone cubic interpolant through ascending ``(t, value)`` samples."""

    t: np.ndarray
    values: np.ndarray
    source: str = ""
    _interp: PchipInterpolator = field(init=False, repr=False)

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if t.ndim != 1 or t.shape != v.shape or len(t) < 2:
            raise ValueError("table needs at least two (t, value) rows")
        if np.any(np.diff(t) <= 0):
            raise ValueError("table t column must be strictly ascending")
        if not np.all(np.isfinite(v)):
            raise ValueError("table values must be finite")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "_interp", PchipInterpolator(t, v))

    @property
    def is_zero(self) -> bool:
        return bool(np.all(self.values == 0.0))

    def __call__(self, t: float) -> float:
        return float(self.sample(np.array([t]))[0])

    def sample(self, ts) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        lo, hi = self.t[0], self.t[-1]
        outside = (ts < lo - 1e-12) | (ts > hi + 1e-12)
        if np.any(outside):
            bad = float(ts[outside][0])
            raise ValueError(f"t={bad!r} outside table range [{lo}, {hi}]")
        return self._interp(np.clip(ts, lo, hi))

    @classmethod
    def from_csv(cls, path) -> "SampledFunction":
        path = Path(path)
        with path.open(newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != ["t", "value"]:
                raise ValueError(f"{path}: expected header 't,value'")
            rows = [(float(r["t"]), float(r["value"])) for r in reader]
        t, v = zip(*rows) if rows else ((), ())
        return cls(np.array(t), np.array(v), source=str(path))

    def to_csv(self, path) -> None:
        with Path(path).open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "value"])
            for t, v in zip(self.t, self.values):
                w.writerow([f"{t:.12g}", f"{v:.12g}"])


ScalarFunction = Union[Expr, SampledFunction]


def load_function(source: Union[str, dict, ScalarFunction], base_dir=None) -> ScalarFunction:
    """Build a function from an expression string or ``{"table": path}``."""
    if isinstance(source, (Expr, SampledFunction)):
        return source
    if isinstance(source, (int, float)):
        return Expr("const", value=float(source))
    if isinstance(source, str):
        return parse(source)
    if isinstance(source, dict) and set(source) == {"table"}:
        path = Path(source["table"])
        if base_dir is not None and not path.is_absolute():
            path = Path(base_dir) / path
        return SampledFunction.from_csv(path)
    raise ValueError(f"cannot build a function from {source!r}")


def sample(func: ScalarFunction, ts: Sequence[float] | np.ndarray) -> np.ndarray:
    return func.sample(np.asarray(ts, dtype=float))
