"""Declarative field files.

Grammar (one statement per line, ``#`` starts a comment, blank lines ignored)::

    file       := statement*
    statement  := "dimension" INTEGER
                | "f" INDEX "=" expr
                | "rates" "=" number ("," number)*
    expr       := term (("+" | "-") term)*
    term       := unary (("*" | "/") unary)*
    unary      := ("+" | "-") unary | power
    power      := atom ("^" unary)?               # right-associative
    atom       := NUMBER | "w" INDEX | "sqrt" "(" expr ")"
                | "pow" "(" expr "," expr ")" | "(" expr ")"
    number     := ("+" | "-")? NUMBER
    NUMBER     := DIGITS ("." DIGITS?)? (("e" | "E") ("+" | "-")? DIGITS)?
                | "." DIGITS (("e" | "E") ("+" | "-")? DIGITS)?
    INDEX      := DIGITS without sign, 1 <= INDEX <= dimension

``dimension`` must precede every ``f`` line and each component ``f1..fd``
appears exactly once.  The optional ``rates`` line (d positive numbers)
marks the file as the interaction part of a Kolmogorov system
``w_i (b_i + f_i(w))``.  ``a^b`` and ``pow(a, b)`` reject negative ``a``
with non-integer ``b``; ``sqrt`` rejects negative arguments.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import FieldEvaluationError, FieldParseError
from .field import VectorField

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t]+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^(),=])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str, lineno: int) -> list[Token]:
    text = text.split("#", 1)[0]
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise FieldParseError(f"unexpected character {text[pos]!r}", lineno, pos + 1)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(Token(kind, m.group(), lineno, pos + 1))
        pos = m.end()
    return tokens


def _sqrt(x):
    if x < 0.0:
        raise FieldEvaluationError(f"sqrt of negative value {x}")
    return math.sqrt(x)


def _pow(a, b):
    if a < 0.0 and b != int(b):
        raise FieldEvaluationError(f"negative base {a} raised to non-integer power {b}")
    if a == 0.0 and b < 0.0:
        raise FieldEvaluationError("zero raised to a negative power")
    return float(a) ** b


class _Parser:
    def __init__(self, tokens: list[Token], dimension: int, lineno: int, eol_col: int):
        self.tokens = tokens
        self.pos = 0
        self.dimension = dimension
        self.lineno = lineno
        self.eol_col = eol_col

    def peek(self) -> Optional[Token]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def error(self, message: str, tok: Optional[Token] = None):
        if tok is None:
            tok = self.peek()
        if tok is None:
            raise FieldParseError(message + " (at end of line)", self.lineno, self.eol_col)
        raise FieldParseError(message, tok.line, tok.col)

    def next(self) -> Token:
        tok = self.peek()
        if tok is None:
            self.error("unexpected end of expression")
        self.pos += 1
        return tok

    def expect(self, text: str) -> Token:
        tok = self.peek()
        if tok is None or tok.text != text:
            self.error(f"expected {text!r}")
        self.pos += 1
        return tok

    def expr(self) -> str:
        out = self.term()
        while (tok := self.peek()) is not None and tok.text in ("+", "-"):
            self.pos += 1
            out = f"({out} {tok.text} {self.term()})"
        return out

    def term(self) -> str:
        out = self.unary()
        while (tok := self.peek()) is not None and tok.text in ("*", "/"):
            self.pos += 1
            out = f"({out} {tok.text} {self.unary()})"
        return out

    def unary(self) -> str:
        tok = self.peek()
        if tok is not None and tok.text in ("+", "-"):
            self.pos += 1
            return f"({tok.text}{self.unary()})"
        return self.power()

    def power(self) -> str:
        base = self.atom()
        tok = self.peek()
        if tok is not None and tok.text == "^":
            self.pos += 1
            return f"_pow({base}, {self.unary()})"
        return base

    def atom(self) -> str:
        tok = self.next()
        if tok.kind == "number":
            return repr(float(tok.text))
        if tok.kind == "name":
            m = re.fullmatch(r"w([1-9]\d*)", tok.text)
            if m:
                idx = int(m.group(1))
                if idx > self.dimension:
                    self.error(f"variable {tok.text} exceeds dimension {self.dimension}", tok)
                return f"w[{idx - 1}]"
            if tok.text == "sqrt":
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return f"_sqrt({arg})"
            if tok.text == "pow":
                self.expect("(")
                a = self.expr()
                self.expect(",")
                b = self.expr()
                self.expect(")")
                return f"_pow({a}, {b})"
            self.error(f"unknown name {tok.text!r}", tok)
        if tok.text == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        self.error(f"unexpected {tok.text!r}", tok)

    def done(self):
        tok = self.peek()
        if tok is not None:
            self.error(f"unexpected {tok.text!r}")


def _parse_number_list(tokens: list[Token], lineno: int, eol_col: int) -> list[float]:
    vals = []
    i = 0
    expect_value = True
    while i < len(tokens):
        tok = tokens[i]
        if expect_value:
            sign = 1.0
            if tok.text in ("+", "-"):
                sign = -1.0 if tok.text == "-" else 1.0
                i += 1
                if i >= len(tokens):
                    raise FieldParseError("expected a number (at end of line)", lineno, eol_col)
                tok = tokens[i]
            if tok.kind != "number":
                raise FieldParseError(f"expected a number, got {tok.text!r}", tok.line, tok.col)
            vals.append(sign * float(tok.text))
        elif tok.text != ",":
            raise FieldParseError(f"expected ',', got {tok.text!r}", tok.line, tok.col)
        expect_value = not expect_value
        i += 1
    if expect_value:
        raise FieldParseError("expected a number (at end of line)", lineno, eol_col)
    return vals


@dataclass(frozen=True)
class FieldDefinition:
    dimension: int
    expressions: tuple[str, ...]
    rates: Optional[tuple[float, ...]]
    field: VectorField
    source: str = ""


def parse_field(text: str, name: str = "", clip_negative: bool = True) -> FieldDefinition:
    """Parse a field definition; raises :class:`FieldParseError` with line/column."""
    dimension = None
    dim_line = 0
    components: dict[int, tuple[str, str]] = {}
    rates = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        tokens = _tokenize(raw, lineno)
        if not tokens:
            continue
        eol_col = len(raw.split("#", 1)[0].rstrip()) + 1
        head = tokens[0]
        if head.text == "dimension":
            if dimension is not None:
                raise FieldParseError(f"dimension already declared on line {dim_line}", head.line, head.col)
            if len(tokens) != 2 or tokens[1].kind != "number" or not re.fullmatch(r"\d+", tokens[1].text):
                bad = tokens[1] if len(tokens) > 1 else None
                raise FieldParseError(
                    "dimension expects one positive integer",
                    lineno,
                    bad.col if bad else eol_col,
                )
            dimension = int(tokens[1].text)
            if dimension < 1:
                raise FieldParseError("dimension must be positive", lineno, tokens[1].col)
            dim_line = lineno
        elif head.text == "rates":
            if len(tokens) < 2 or tokens[1].text != "=":
                raise FieldParseError("expected '=' after 'rates'", lineno, tokens[1].col if len(tokens) > 1 else eol_col)
            if rates is not None:
                raise FieldParseError("rates already declared", head.line, head.col)
            rates = _parse_number_list(tokens[2:], lineno, eol_col)
            if any(r <= 0.0 for r in rates):
                raise FieldParseError("rates must be strictly positive", lineno, tokens[2].col)
            rates_tok = head
        else:
            m = re.fullmatch(r"f([1-9]\d*)", head.text) if head.kind == "name" else None
            if m is None:
                raise FieldParseError(f"expected 'dimension', 'rates' or a component 'fN', got {head.text!r}", head.line, head.col)
            if dimension is None:
                raise FieldParseError("'dimension' must be declared before components", head.line, head.col)
            idx = int(m.group(1))
            if idx > dimension:
                raise FieldParseError(f"component {head.text} exceeds dimension {dimension}", head.line, head.col)
            if idx in components:
                raise FieldParseError(f"component {head.text} defined twice", head.line, head.col)
            if len(tokens) < 2 or tokens[1].text != "=":
                raise FieldParseError(f"expected '=' after {head.text}", lineno, tokens[1].col if len(tokens) > 1 else eol_col)
            parser = _Parser(tokens[2:], dimension, lineno, eol_col)
            if parser.peek() is None:
                parser.error("empty expression")
            code = parser.expr()
            parser.done()
            src = raw.split("#", 1)[0].split("=", 1)[1].strip()
            components[idx] = (code, src)

    if dimension is None:
        raise FieldParseError("empty field definition: missing 'dimension'", 1, 1)
    missing = [i for i in range(1, dimension + 1) if i not in components]
    if missing:
        raise FieldParseError(f"missing component(s) {', '.join(f'f{i}' for i in missing)}", len(text.splitlines()) or 1, 1)
    if rates is not None and len(rates) != dimension:
        raise FieldParseError(f"rates has {len(rates)} entries, expected {dimension}", rates_tok.line, rates_tok.col)

    body = ", ".join(components[i][0] for i in range(1, dimension + 1))
    namespace = {"_sqrt": _sqrt, "_pow": _pow}
    func = eval(f"lambda w: ({body},)", namespace)  # noqa: S307 - body built from validated tokens

    def evaluate(w, _func=func):
        # python floats: faster scalar arithmetic, and 1/0 raises
        vals = np.asarray(w, dtype=float).tolist()
        try:
            return np.array(_func(vals), dtype=float)
        except ZeroDivisionError as exc:
            raise FieldEvaluationError(f"division by zero at {vals}", w) from exc
        except OverflowError as exc:
            raise FieldEvaluationError(f"overflow at {vals}", w) from exc

    vf = VectorField(dimension, evaluate, None, name=name, clip_negative=clip_negative)
    exprs = tuple(components[i][1] for i in range(1, dimension + 1))
    return FieldDefinition(dimension, exprs, None if rates is None else tuple(rates), vf, text)


def load_field(path, clip_negative: bool = True) -> FieldDefinition:
    with open(path) as fh:
        text = fh.read()
    return parse_field(text, name=str(path), clip_negative=clip_negative)


def format_field(dimension: int, expressions, rates=None) -> str:
    lines = [f"dimension {dimension}"]
    lines += [f"f{i} = {e}" for i, e in enumerate(expressions, start=1)]
    if rates is not None:
        lines.append("rates = " + ", ".join(repr(float(r)) for r in rates))
    return "\n".join(lines) + "\n"
