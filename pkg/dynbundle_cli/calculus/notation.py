"""Textual notation for smooth maps.

Grammar (lowest precedence first)::

    pipe     := sum ( "|>" sum )*              f |> g  is  g o f
    sum      := product ( ("+" | "-") product )*
    product  := unary ( ("*" | "/") unary )*   literal * e  is a scaling
    unary    := "-" unary | power
    power    := postfix ( "^" INT )?
    postfix  := atom ( "[" INT ("," INT)* "]" )*
    atom     := NUMBER | "x" | "x" INT | "[" NUMBER, ... "]"
              | MATRIX "@" postfix
              | FUNC "(" pipe ")"          FUNC in sin cos exp recip norm
              | "lift" "(" pipe ")"        the tangent lift; body reads R^(n/2)
              | "guard" "(" NUMBER "," pipe ( "," pipe )? ")"
              | "bilin" "(" TENSOR "," pipe "," pipe ")"
              | "(" pipe ")" | "(" pipe "," ")" | "(" pipe ( "," pipe )+ ")"

``x`` is the whole input, ``x3`` its fourth coordinate. The right operand of
``|>`` reads the output of the left one. ``to_text`` prints fully
parenthesised text, and ``parse_expression(to_text(f), n) == f`` for every
tree the parser produces.
"""

from __future__ import annotations

import re
from typing import Optional

import numpy as np

from dynbundle_cli.calculus.errors import ContractError
from dynbundle_cli.calculus.smoothmap import (
    Add,
    Bilinear,
    Compose,
    Const,
    Cos,
    Exp,
    Guarded,
    Input,
    Linear,
    Mul,
    Norm,
    Pow,
    Recip,
    Scale,
    Select,
    Sin,
    SmoothMap,
    TangentLift,
    Tuple,
)


class NotationError(ContractError):
    """Malformed expression text."""

    def __init__(self, message: str, position: Optional[int] = None):
        self.position = position
        if position is not None:
            message = f"{message} at column {position + 1}"
        super().__init__(message)


_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<number>\d+\.\d*(?:[eE][+-]?\d+)?|\d+(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_]*\d*)"
    r"|(?P<op>\|>|[-+*/^@()\[\],])"
    r")"
)

_UNARY = {"sin": Sin, "cos": Cos, "exp": Exp, "recip": Recip, "norm": Norm}
_COORD = re.compile(r"x(\d+)")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            bad = len(text) - len(text[pos:].lstrip())
            raise NotationError(f"unexpected character {text[bad]!r}", bad)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, dim: int):
        self.tokens = _tokenize(text)
        self.i = 0
        self.dims = [dim]

    # token helpers -------------------------------------------------------
    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def next(self) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def accept(self, value: str) -> bool:
        kind, text, _ = self.peek()
        if kind in ("op", "name") and text == value:
            self.i += 1
            return True
        return False

    def expect(self, value: str) -> None:
        if not self.accept(value):
            kind, text, pos = self.peek()
            raise NotationError(f"expected {value!r}, found {text or 'end of input'!r}", pos)

    @property
    def dim(self) -> int:
        return self.dims[-1]

    def number(self) -> float:
        sign = -1.0 if self.accept("-") else 1.0
        kind, text, pos = self.next()
        if kind != "number":
            raise NotationError(f"expected a number, found {text or 'end of input'!r}", pos)
        return sign * float(text)

    def integer(self) -> int:
        kind, text, pos = self.next()
        if kind != "number" or not text.isdigit():
            raise NotationError(f"expected an integer, found {text or 'end of input'!r}", pos)
        return int(text)

    def nested_numbers(self):
        """A bracketed list of numbers or of nested lists."""
        self.expect("[")
        items = []
        while True:
            if self.peek()[1] == "[":
                items.append(self.nested_numbers())
            else:
                items.append(self.number())
            if not self.accept(","):
                break
        self.expect("]")
        return items

    def build(self, factory, *args):
        try:
            return factory(*args)
        except ContractError as exc:
            raise NotationError(exc.message, self.peek()[2]) from exc

    # grammar -------------------------------------------------------------
    def parse(self) -> SmoothMap:
        node = self.pipe()
        kind, text, pos = self.peek()
        if kind != "end":
            raise NotationError(f"unexpected {text!r}", pos)
        return node

    def pipe(self) -> SmoothMap:
        node = self.sum()
        while self.accept("|>"):
            self.dims.append(node.codomain_dim)
            try:
                outer = self.sum()
            finally:
                self.dims.pop()
            node = self.build(Compose, outer, node)
        return node

    def sum(self) -> SmoothMap:
        node, _ = self.product()
        while True:
            if self.accept("+"):
                right, _ = self.product()
                node = self.build(Add, node, right)
            elif self.accept("-"):
                right, _ = self.product()
                node = self.build(Add, node, Scale(-1.0, right))
            else:
                return node

    def product(self) -> tuple[SmoothMap, bool]:
        node, literal = self.unary()
        while True:
            if self.accept("*"):
                right, _ = self.unary()
                if literal:
                    node = Scale(node.values[0], right)
                else:
                    node = self.build(Mul, node, right)
                literal = False
            elif self.accept("/"):
                right, _ = self.unary()
                node = self.build(Mul, node, Recip(right))
                literal = False
            else:
                return node, literal

    def unary(self) -> tuple[SmoothMap, bool]:
        if self.peek()[1] == "-":
            if self.tokens[self.i + 1][0] == "number":
                value = self.number()
                return self.power(Const((value,), self.dim), literal=True)
            self.next()
            node, _ = self.unary()
            return Scale(-1.0, node), False
        return self.power(*self.atom())

    def power(self, node: SmoothMap, literal: bool) -> tuple[SmoothMap, bool]:
        while self.accept("["):
            indices = [self.integer()]
            while self.accept(","):
                indices.append(self.integer())
            self.expect("]")
            node = self.build(Select, node, tuple(indices))
            literal = False
        if self.accept("^"):
            node = self.build(Pow, node, self.integer())
            literal = False
        return node, literal

    def atom(self) -> tuple[SmoothMap, bool]:
        kind, text, pos = self.peek()
        if kind == "number":
            self.next()
            return Const((float(text),), self.dim), True
        if text == "[":
            values = self.nested_numbers()
            if values and isinstance(values[0], list):
                self.expect("@")
                arg, _ = self.power(*self.atom())
                matrix = tuple(tuple(float(c) for c in row) for row in values)
                return self.build(Linear, matrix, arg), False
            return self.build(Const, tuple(float(v) for v in values), self.dim), False
        if text == "(":
            self.next()
            first = self.pipe()
            if self.accept(")"):
                return first, False
            parts = [first]
            while self.accept(","):
                if self.peek()[1] == ")":
                    break
                parts.append(self.pipe())
            self.expect(")")
            return self.build(Tuple, tuple(parts)), False
        if kind == "name":
            self.next()
            return self.named(text, pos), False
        raise NotationError(f"unexpected {text or 'end of input'!r}", pos)

    def named(self, name: str, pos: int) -> SmoothMap:
        if name == "x":
            return Input(self.dim)
        m = _COORD.fullmatch(name)
        if m:
            return self.build(Select, Input(self.dim), (int(m.group(1)),))
        if name in _UNARY:
            self.expect("(")
            arg = self.pipe()
            self.expect(")")
            return _UNARY[name](arg)
        if name == "lift":
            if self.dim % 2:
                raise NotationError(f"lift needs an even input dimension, have {self.dim}", pos)
            self.expect("(")
            self.dims.append(self.dim // 2)
            try:
                base = self.pipe()
            finally:
                self.dims.pop()
            self.expect(")")
            return TangentLift(base)
        if name == "guard":
            self.expect("(")
            radius = self.number()
            self.expect(",")
            body = self.pipe()
            gauge = self.pipe() if self.accept(",") else None
            self.expect(")")
            return self.build(Guarded, radius, body, gauge)
        if name == "bilin":
            self.expect("(")
            tensor = self.nested_numbers()
            self.expect(",")
            left = self.pipe()
            self.expect(",")
            right = self.pipe()
            self.expect(")")
            nested = tuple(tuple(tuple(float(c) for c in row) for row in plane) for plane in tensor)
            return self.build(Bilinear, nested, left, right)
        raise NotationError(f"unknown name {name!r}", pos)


def parse_expression(text: str, dim: int) -> SmoothMap:
    """Parse ``text`` into a map reading R^dim."""
    if dim < 1:
        raise NotationError(f"input dimension must be >= 1, got {dim}")
    return _Parser(text, dim).parse()


def _num(v: float) -> str:
    return repr(float(v))


def _numbers(values) -> str:
    arr = np.asarray(values)
    if arr.ndim == 1:
        return "[" + ", ".join(_num(v) for v in arr) + "]"
    return "[" + ", ".join(_numbers(row) for row in arr) + "]"


def to_text(f: SmoothMap) -> str:
    """Print ``f`` in the notation accepted by ``parse_expression``."""
    if isinstance(f, Input):
        return "x"
    if isinstance(f, Const):
        if len(f.values) == 1:
            return _num(f.values[0])
        return _numbers(f.values)
    if isinstance(f, Select):
        if isinstance(f.arg, Input) and len(f.indices) == 1:
            return f"x{f.indices[0]}"
        return f"({to_text(f.arg)})[{', '.join(str(i) for i in f.indices)}]"
    if isinstance(f, Linear):
        return f"{_numbers(f.matrix)} @ ({to_text(f.arg)})"
    if isinstance(f, Add):
        return f"({to_text(f.left)}) + ({to_text(f.right)})"
    if isinstance(f, Scale):
        return f"{_num(f.factor)} * ({to_text(f.arg)})"
    if isinstance(f, Mul):
        return f"({to_text(f.left)}) * ({to_text(f.right)})"
    if isinstance(f, Tuple):
        if len(f.parts) == 1:
            return f"({to_text(f.parts[0])},)"
        return "(" + ", ".join(to_text(p) for p in f.parts) + ")"
    if isinstance(f, Compose):
        return f"({to_text(f.inner)}) |> ({to_text(f.outer)})"
    if isinstance(f, Pow):
        return f"({to_text(f.arg)})^{f.k}"
    if isinstance(f, (Sin, Cos, Exp, Recip, Norm)):
        name = {Sin: "sin", Cos: "cos", Exp: "exp", Recip: "recip", Norm: "norm"}[type(f)]
        return f"{name}({to_text(f.arg)})"
    if isinstance(f, TangentLift):
        return f"lift({to_text(f.base)})"
    if isinstance(f, Guarded):
        gauge = "" if f.gauge is None else f", {to_text(f.gauge)}"
        return f"guard({_num(f.radius)}, {to_text(f.body)}{gauge})"
    if isinstance(f, Bilinear):
        return f"bilin({_numbers(f.tensor)}, {to_text(f.left)}, {to_text(f.right)})"
    raise ContractError(f"no notation for node {type(f).__name__}")
