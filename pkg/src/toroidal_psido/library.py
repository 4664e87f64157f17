"""Named built-in symbols and construction of symbols from config specs."""

from __future__ import annotations

import numpy as np

from .errors import PreconditionError
from .expressions import SymbolExpression
from .symbols import LATTICE, TORUS, Symbol, multiplier
from .weights import WeightFunction, bracket, require_valid, weight_from_spec

# name -> (expression, order as a function of the parameters, default parameters)
TORUS_BUILTINS = {
    "one": ("1", lambda p: 0.0, {}),
    "bracket": ("L(k)^{m}", lambda p: p["m"], {"m": 1}),
    "bessel": ("L(k)^(-{s})", lambda p: -p["s"], {"s": 1}),
    "modulated": ("(2+sin(x))*L(k)^{m}", lambda p: p["m"], {"m": 1}),
    "touching": ("(1+sin(x))*L(k)^{m}", lambda p: p["m"], {"m": 1}),
    "shift": ("exp(i*x)", lambda p: 0.0, {}),
    "cos_decay": ("(2+cos(x))/L(k)", lambda p: -1.0, {}),
    "exp_sin": ("exp(sin(x))*L(k)^{m}", lambda p: p["m"], {"m": 0}),
    "strong": ("(2+sin(x))*L(k)^(2*{m}) + i*L(k)^{m}", lambda p: 2 * p["m"], {"m": 1}),
}

LATTICE_BUILTINS = {
    "lattice_one": ("1", lambda p: 0.0, {}),
    "lattice_bracket": ("L(n)^{m}", lambda p: p["m"], {"m": 1}),
    "lattice_decay": ("(2+cos(x))/L(n)", lambda p: -1.0, {}),
    "lattice_shift": ("exp(i*x)/L(n)", lambda p: -1.0, {}),
    "lattice_modulated": ("(2+sin(x))*L(n)^{m}", lambda p: p["m"], {"m": 2}),
}


def _parse_builtin(text: str):
    name, _, rest = text.partition(":")
    params = {}
    for item in filter(None, (s.strip() for s in rest.split(","))):
        key, eq, value = item.partition("=")
        if not eq:
            raise PreconditionError(f"built-in parameter {item!r} must look like key=value")
        params[key.strip()] = float(value)
    return name.strip(), params


def builtin_symbol(text: str, weight: WeightFunction | None = None) -> Symbol:
    """Symbol from a name such as ``"bessel:s=1"`` or ``"lattice_bracket:m=2"``."""
    name, params = _parse_builtin(text)
    table = TORUS_BUILTINS if name in TORUS_BUILTINS else LATTICE_BUILTINS
    if name not in table:
        known = sorted(TORUS_BUILTINS) + sorted(LATTICE_BUILTINS)
        raise PreconditionError(f"unknown built-in symbol {name!r}; choose from {known}")
    template, order_of, defaults = table[name]
    params = {**defaults, **params}
    expr = template.format(**{k: repr(v) for k, v in params.items()})
    side = TORUS if table is TORUS_BUILTINS else LATTICE
    return expression_symbol(expr, float(order_of(params)), weight=weight, side=side, name=text)


def expression_symbol(expr: str, order: float, rho: float | None = None, weight: WeightFunction | None = None,
                      side: str = TORUS, name: str | None = None, resolution: int = 64) -> Symbol:
    """Symbol from a closed-form expression over ``x``, ``k`` (or ``n``) and ``L``."""
    weight = weight or bracket()
    parsed = SymbolExpression(expr, "n" if side == LATTICE else "k")
    rho = 1.0 / weight.mu if rho is None else rho

    def func(x, k):
        return parsed(x, k, weight)

    kwargs = dict(rho=rho, weight=weight, side=side, name=name or expr, resolution=resolution)
    if not parsed.uses_x:
        return multiplier(lambda k: np.asarray(func(0.0, k)) + 0 * k, order, **kwargs)
    return Symbol.from_function(func, order, **kwargs)


def symbol_from_spec(spec) -> Symbol:
    """Build a symbol from a string (built-in name) or a dict spec.

    Dict keys: ``builtin`` or ``expr``; ``order`` (required with ``expr``);
    optional ``rho``, ``weight``, ``side`` and ``resolution``.
    """
    if isinstance(spec, str):
        spec = {"builtin": spec}
    spec = dict(spec)
    weight = require_valid(weight_from_spec(spec.get("weight")))
    if "builtin" in spec:
        sym = builtin_symbol(spec["builtin"], weight)
        if "order" in spec:
            sym = sym.with_(order=float(spec["order"]))
        return sym
    if "expr" not in spec:
        raise PreconditionError("symbol spec needs either 'builtin' or 'expr'")
    if "order" not in spec:
        raise PreconditionError("symbol spec with 'expr' needs a declared 'order'")
    return expression_symbol(spec["expr"], float(spec["order"]), spec.get("rho"), weight,
                             spec.get("side", TORUS), spec.get("name"), int(spec.get("resolution", 64)))


def all_builtins(side: str | None = None) -> list[Symbol]:
    names = []
    if side in (None, TORUS):
        names += list(TORUS_BUILTINS)
    if side in (None, LATTICE):
        names += list(LATTICE_BUILTINS)
    return [builtin_symbol(n) for n in names]
