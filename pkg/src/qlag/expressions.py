"""Time-dependent coefficient expressions: a small arithmetic language over t.

Grammar (caret binds tightest and associates to the right):

    expr   := term  (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := "-" unary | power
    power  := atom ("^" unary)?
    atom   := NUMBER | "pi" | "t" | NAME "(" expr ")" | "(" expr ")"

NAME is one of sin, cos, exp, sqrt, tanh.  ASTs are frozen dataclasses;
parsing, printing, and evaluation are pure functions, so trees can be shared
freely across threads.  ``parse(to_source(ast))`` reproduces ``ast``
structurally for any tree the parser itself can produce.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

__all__ = [
    "ExprError",
    "ExprSyntaxError",
    "ExprNameError",
    "ExprArityError",
    "ExprDomainError",
    "Num",
    "Var",
    "Pi",
    "Neg",
    "Bin",
    "Call",
    "Expr",
    "parse",
    "to_source",
    "eval_expr",
    "as_expr",
    "FUNCTIONS",
]


class ExprError(ValueError):
    """Base class for expression failures; ``offset`` is a byte offset into the source."""

    def __init__(self, message: str, offset: int = -1):
        super().__init__(message)
        self.offset = offset


class ExprSyntaxError(ExprError):
    pass


class ExprNameError(ExprError):
    pass


class ExprArityError(ExprError):
    pass


class ExprDomainError(ExprError):
    """Evaluation left the real domain: sqrt of a negative, division by zero, overflow."""


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    """The time variable t."""


@dataclass(frozen=True)
class Pi:
    pass


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class Bin:
    op: str  # one of + - * / ^
    lhs: "Expr"
    rhs: "Expr"


@dataclass(frozen=True)
class Call:
    fn: str
    arg: "Expr"


Expr = Union[Num, Var, Pi, Neg, Bin, Call]

FUNCTIONS = {
    "sin": math.sin,
    "cos": math.cos,
    "exp": math.exp,
    "sqrt": math.sqrt,
    "tanh": math.tanh,
}

_NUMBER = re.compile(r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")
_NAME = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")


def _byte_offset(src: str, index: int) -> int:
    # Char index == byte offset for ASCII sources; encode to stay honest otherwise.
    return len(src[:index].encode("utf-8"))


class _Tokens:
    """Scanner producing (kind, text, char_index) with one token of lookahead."""

    def __init__(self, src: str):
        self.src = src
        self.pos = 0
        self.current = self._scan()

    def error(self, message: str, index: int | None = None) -> ExprSyntaxError:
        at = self.current[2] if index is None else index
        return ExprSyntaxError(
            f"{message} (byte {_byte_offset(self.src, at)})", _byte_offset(self.src, at)
        )

    def _scan(self) -> tuple[str, str, int]:
        src = self.src
        while self.pos < len(src) and src[self.pos].isspace():
            self.pos += 1
        if self.pos >= len(src):
            return ("end", "", len(src))
        start = self.pos
        ch = src[start]
        if ch.isdigit() or ch == ".":
            m = _NUMBER.match(src, start)
            if m is None:
                raise ExprSyntaxError(
                    f"malformed number (byte {_byte_offset(src, start)})",
                    _byte_offset(src, start),
                )
            self.pos = m.end()
            return ("num", m.group(), start)
        if ch.isalpha() or ch == "_":
            m = _NAME.match(src, start)
            assert m is not None
            self.pos = m.end()
            return ("name", m.group(), start)
        if ch in "+-*/^(),":
            self.pos = start + 1
            return ("op", ch, start)
        raise ExprSyntaxError(
            f"unexpected character {ch!r} (byte {_byte_offset(src, start)})",
            _byte_offset(src, start),
        )

    def advance(self) -> tuple[str, str, int]:
        tok = self.current
        self.current = self._scan()
        return tok

    def accept_op(self, *ops: str) -> str | None:
        kind, text, _ = self.current
        if kind == "op" and text in ops:
            self.advance()
            return text
        return None

    def expect_op(self, op: str) -> None:
        kind, text, _ = self.current
        if kind != "op" or text != op:
            shown = text if text else "end of input"
            raise self.error(f"expected {op!r}, got {shown!r}")
        self.advance()


def parse(source: str) -> Expr:
    """Parse ``source`` into an AST; raises ExprSyntaxError/ExprNameError/ExprArityError."""
    toks = _Tokens(source)
    node = _parse_expr(toks)
    if toks.current[0] != "end":
        raise toks.error(f"trailing input {toks.current[1]!r}")
    return node


def _parse_expr(toks: _Tokens) -> Expr:
    node = _parse_term(toks)
    while (op := toks.accept_op("+", "-")) is not None:
        node = Bin(op, node, _parse_term(toks))
    return node


def _parse_term(toks: _Tokens) -> Expr:
    node = _parse_unary(toks)
    while (op := toks.accept_op("*", "/")) is not None:
        node = Bin(op, node, _parse_unary(toks))
    return node


def _parse_unary(toks: _Tokens) -> Expr:
    if toks.accept_op("-"):
        return Neg(_parse_unary(toks))
    return _parse_power(toks)


def _parse_power(toks: _Tokens) -> Expr:
    node = _parse_atom(toks)
    if toks.accept_op("^"):
        return Bin("^", node, _parse_unary(toks))
    return node


def _parse_atom(toks: _Tokens) -> Expr:
    kind, text, index = toks.current
    if kind == "num":
        toks.advance()
        value = float(text)
        if not math.isfinite(value):
            raise toks.error("numeric literal overflows a float", index)
        return Num(value)
    if kind == "name":
        toks.advance()
        if text == "t":
            return Var()
        if text == "pi":
            return Pi()
        if text in FUNCTIONS:
            toks.expect_op("(")
            arg = _parse_expr(toks)
            extra = 0
            while toks.accept_op(","):
                _parse_expr(toks)
                extra += 1
            if extra:
                raise ExprArityError(
                    f"{text} takes 1 argument, got {1 + extra} "
                    f"(byte {_byte_offset(toks.src, index)})",
                    _byte_offset(toks.src, index),
                )
            toks.expect_op(")")
            return Call(text, arg)
        raise ExprNameError(
            f"unknown identifier {text!r} (byte {_byte_offset(toks.src, index)})",
            _byte_offset(toks.src, index),
        )
    if kind == "op" and text == "(":
        toks.advance()
        node = _parse_expr(toks)
        toks.expect_op(")")
        return node
    shown = text if text else "end of input"
    raise toks.error(f"expected a value, got {shown!r}")


# Printer precedence; parenthesization keeps parse(to_source(ast)) structural.
_PREC_ADD = 10
_PREC_MUL = 20
_PREC_NEG = 25
_PREC_POW = 30
_PREC_ATOM = 100


def _prec(node: Expr) -> int:
    if isinstance(node, Bin):
        return {"+": _PREC_ADD, "-": _PREC_ADD, "*": _PREC_MUL, "/": _PREC_MUL, "^": _PREC_POW}[
            node.op
        ]
    if isinstance(node, Neg):
        return _PREC_NEG
    return _PREC_ATOM


def to_source(node: Expr) -> str:
    """Render an AST back to source text."""
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Var):
        return "t"
    if isinstance(node, Pi):
        return "pi"
    if isinstance(node, Call):
        return f"{node.fn}({to_source(node.arg)})"
    if isinstance(node, Neg):
        inner = to_source(node.arg)
        if _prec(node.arg) < _PREC_NEG:
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(node, Bin):
        lhs, rhs = to_source(node.lhs), to_source(node.rhs)
        if node.op == "^":
            if _prec(node.lhs) <= _PREC_POW:
                lhs = f"({lhs})"
            if _prec(node.rhs) < _PREC_NEG:
                rhs = f"({rhs})"
        else:
            here = _prec(node)
            if _prec(node.lhs) < here:
                lhs = f"({lhs})"
            if _prec(node.rhs) <= here:
                rhs = f"({rhs})"
        return f"{lhs}{node.op}{rhs}"
    raise TypeError(f"not an expression node: {node!r}")


def _checked(value: float) -> float:
    if not math.isfinite(value):
        raise ExprDomainError("overflow to non-finite value")
    return value


def _pow(base: float, exponent: float) -> float:
    try:
        return math.pow(base, exponent)
    except ValueError as exc:  # negative base with fractional exponent, 0^negative
        raise ExprDomainError(f"pow domain error: {base!r}^{exponent!r}") from exc
    except OverflowError as exc:
        raise ExprDomainError("overflow to non-finite value") from exc


def eval_expr(node: Expr, t: float) -> float:
    """Evaluate at time t.  Raises ExprDomainError on domain errors and overflow."""
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return t
    if isinstance(node, Pi):
        return math.pi
    if isinstance(node, Neg):
        return -eval_expr(node.arg, t)
    if isinstance(node, Call):
        arg = eval_expr(node.arg, t)
        try:
            return _checked(FUNCTIONS[node.fn](arg))
        except ValueError as exc:
            raise ExprDomainError(f"{node.fn} domain error at argument {arg!r}") from exc
        except OverflowError as exc:
            raise ExprDomainError("overflow to non-finite value") from exc
    if isinstance(node, Bin):
        lhs = eval_expr(node.lhs, t)
        rhs = eval_expr(node.rhs, t)
        if node.op == "+":
            return _checked(lhs + rhs)
        if node.op == "-":
            return _checked(lhs - rhs)
        if node.op == "*":
            return _checked(lhs * rhs)
        if node.op == "/":
            try:
                return _checked(lhs / rhs)
            except ZeroDivisionError as exc:
                raise ExprDomainError("division by zero") from exc
        if node.op == "^":
            return _checked(_pow(lhs, rhs))
    raise TypeError(f"not an expression node: {node!r}")


def as_expr(value: "Expr | str | float | int") -> Expr:
    """Coerce a string (parsed), bare number, or AST into an AST."""
    if isinstance(value, (Num, Var, Pi, Neg, Bin, Call)):
        return value
    if isinstance(value, str):
        return parse(value)
    if isinstance(value, bool):
        raise TypeError("bool is not a coefficient value")
    if isinstance(value, (int, float)):
        v = float(value)
        if not math.isfinite(v):
            raise ExprDomainError("non-finite constant")
        return Neg(Num(-v)) if v < 0 else Num(v)
    raise TypeError(f"cannot convert {value!r} to an expression")
