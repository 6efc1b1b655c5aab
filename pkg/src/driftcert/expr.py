"""Probability expressions over the state index ``i``.

The grammar is a restricted subset of Python arithmetic: numeric literals,
the name ``i``, named constants (substituted at parse time), ``+ - * /``,
powers written ``**`` or ``^``, unary minus and parentheses.  Expressions
evaluate on plain floats and on numpy arrays alike.
"""

from __future__ import annotations

import ast
from fractions import Fraction
from typing import Mapping

import numpy as np

from .errors import SpecParseError

_ALLOWED_NODES = (
    ast.Expression,
    ast.BinOp,
    ast.UnaryOp,
    ast.Constant,
    ast.Name,
    ast.Load,
    ast.Add,
    ast.Sub,
    ast.Mult,
    ast.Div,
    ast.Pow,
    ast.USub,
    ast.UAdd,
)


class _Substitute(ast.NodeTransformer):
    def __init__(self, constants: Mapping[str, float]):
        self.constants = constants

    def visit_Name(self, node):
        if node.id == "i":
            return node
        if node.id not in self.constants:
            raise SpecParseError(f"unknown name {node.id!r} in expression")
        value = self.constants[node.id]
        if isinstance(value, Fraction):
            value = float(value)
        return ast.copy_location(ast.Constant(value=value), node)


class Expr:
    """A compiled, canonicalized expression in ``i``."""

    __slots__ = ("source", "depends_on_i", "_code")

    def __init__(self, text: str, constants: Mapping[str, float] | None = None):
        if isinstance(text, (int, float)) and not isinstance(text, bool):
            text = repr(text)
        if not isinstance(text, str):
            raise SpecParseError(f"expression must be a string, got {type(text).__name__}")
        try:
            tree = ast.parse(text.replace("^", "**"), mode="eval")
        except SyntaxError as exc:
            raise SpecParseError(f"cannot parse expression {text!r}: {exc.msg}") from None
        for node in ast.walk(tree):
            if not isinstance(node, _ALLOWED_NODES):
                raise SpecParseError(
                    f"disallowed construct {type(node).__name__} in {text!r}"
                )
            if isinstance(node, ast.Constant) and (
                isinstance(node.value, bool) or not isinstance(node.value, (int, float))
            ):
                raise SpecParseError(f"non-numeric literal in {text!r}")
        tree = ast.fix_missing_locations(_Substitute(constants or {}).visit(tree))
        self.source = ast.unparse(tree)
        self.depends_on_i = any(
            isinstance(n, ast.Name) and n.id == "i" for n in ast.walk(tree)
        )
        self._code = compile(tree, "<expr>", "eval")

    def __call__(self, i):
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            try:
                value = eval(self._code, {"__builtins__": {}}, {"i": i})
            except (ZeroDivisionError, OverflowError):
                value = float("nan")
        if isinstance(i, np.ndarray):
            value = np.asarray(value, dtype=float)
            if value.shape != i.shape:
                value = np.broadcast_to(value, i.shape).astype(float)
            return value
        return float(value)

    def __eq__(self, other):
        return isinstance(other, Expr) and other.source == self.source

    def __hash__(self):
        return hash(self.source)

    def __repr__(self):
        return f"Expr({self.source!r})"

    def __str__(self):
        return self.source


def parse_expr(text, constants: Mapping[str, float] | None = None) -> Expr:
    return Expr(text, constants)
