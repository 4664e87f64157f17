"""Closed-form symbol expressions such as ``"(2+sin(x))*L(k)^2"``.

Expressions are parsed with :mod:`ast` and evaluated node by node over numpy
arrays; nothing is passed to ``eval``.  Available names: ``x``, ``k`` (``n``
is an alias on the lattice), ``L`` (the weight), ``i``, ``pi`` and the
functions below.  ``^`` means power.
"""

from __future__ import annotations

import ast
import operator

import numpy as np

from .errors import PsidoError

FUNCTIONS = {
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "exp": np.exp,
    "log": np.log,
    "sqrt": lambda z: np.sqrt(z + 0j) if np.any(np.real(z) < 0) else np.sqrt(z),
    "abs": np.abs,
    "conj": np.conj,
    "re": np.real,
    "im": np.imag,
    "sign": np.sign,
}

CONSTANTS = {"pi": np.pi, "i": 1j, "e": np.e}

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}
_UNOPS = {ast.USub: operator.neg, ast.UAdd: operator.pos}


class ExpressionError(PsidoError, ValueError):
    """Malformed or unsupported symbol expression."""


class SymbolExpression:
    """Parsed expression, callable as ``expr(x, k)`` with a weight for ``L``."""

    def __init__(self, text: str, k_name: str = "k"):
        self.text = text
        self.k_name = k_name
        try:
            self.tree = ast.parse(text.replace("^", "**"), mode="eval")
        except SyntaxError as exc:
            raise ExpressionError(f"cannot parse {text!r}: {exc.msg} at column {exc.offset}") from None
        self.names = set()
        self._validate(self.tree.body)

    def _validate(self, node) -> None:
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            self._validate(node.left)
            self._validate(node.right)
        elif isinstance(node, ast.UnaryOp) and type(node.op) in _UNOPS:
            self._validate(node.operand)
        elif isinstance(node, ast.Constant) and isinstance(node.value, (int, float, complex)):
            pass
        elif isinstance(node, ast.Name):
            if node.id not in ("x", self.k_name, *CONSTANTS):
                raise ExpressionError(f"unknown name {node.id!r} in {self.text!r}")
            self.names.add(node.id)
        elif isinstance(node, ast.Call) and isinstance(node.func, ast.Name):
            if node.func.id != "L" and node.func.id not in FUNCTIONS:
                raise ExpressionError(f"unknown function {node.func.id!r} in {self.text!r}")
            if len(node.args) != 1 or node.keywords:
                raise ExpressionError(f"{node.func.id}() takes exactly one argument")
            self.names.add(node.func.id)
            self._validate(node.args[0])
        else:
            raise ExpressionError(f"unsupported syntax {ast.dump(node)[:40]} in {self.text!r}")

    @property
    def uses_x(self) -> bool:
        return "x" in self.names

    def __call__(self, x, k, weight=None):
        env = {"x": x, self.k_name: k}

        def ev(node):
            if isinstance(node, ast.BinOp):
                left, right = ev(node.left), ev(node.right)
                if isinstance(node.op, ast.Pow) and _fractional(right) and np.any(np.real(left) < 0):
                    left = np.asarray(left, dtype=complex)
                return _BINOPS[type(node.op)](left, right)
            if isinstance(node, ast.UnaryOp):
                return _UNOPS[type(node.op)](ev(node.operand))
            if isinstance(node, ast.Constant):
                return node.value
            if isinstance(node, ast.Name):
                return env[node.id] if node.id in env else CONSTANTS[node.id]
            if node.func.id == "L":
                if weight is None:
                    raise ExpressionError("expression uses L(k) but no weight was given")
                return weight(np.real(ev(node.args[0])))
            return FUNCTIONS[node.func.id](ev(node.args[0]))

        return ev(self.tree.body)


def _fractional(p) -> bool:
    return np.ndim(p) > 0 or not float(np.real(p)).is_integer()
