"""Command-line front end.

Each subcommand reads an optional JSON config (``--config``), lets flags
override its fields, prints a JSON report and writes CSV side outputs.

Exit codes: 0 success, 1 config error, 2 hypothesis failure (inconsistent
class, not elliptic, not compact, Garding hypotheses), 3 numerical failure
(solver failure, inconclusive compactness).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import io
from .calculus import parametrix, parametrix_residual
from .diagnostics import (
    compactness_verdict,
    garding_constants,
    garding_lattice,
    garding_spot_check,
    sharp_garding_constant,
)
from .errors import GardingFailure, NotEllipticError, PreconditionError, PsidoError, SingularSymbolError, SolverFailure
from .expressions import ExpressionError, SymbolExpression
from .fourier_core import GridFunction
from .library import symbol_from_spec
from .solver import lambda0_estimate, solve
from .symbols import LATTICE, check_M_membership

EXIT_OK, EXIT_CONFIG, EXIT_HYPOTHESIS, EXIT_NUMERICAL = 0, 1, 2, 3


class ConfigError(PsidoError, ValueError):
    """Config file or flag value that cannot be used."""


# field -> (type, default); None default means required
SCHEMA = {
    "classify": {"alpha_max": (int, 2), "beta_max": (int, 2), "windows": (list, [32, 64, 128])},
    "parametrix": {"L": (list, [1, 2, 3]), "N": (int, 32), "R": (int, "auto"), "k_min": (int, 8),
                   "k_max": (int, 24), "derivative": (str, "falling")},
    "compactness": {"K0": (int, 16), "N_list": (list, [16, 32, 64])},
    "garding": {"m": (float, None), "N_list": (list, [16, 32, 64]), "sharp": (bool, False),
                "samples": (int, 500)},
    "solve": {"lam": (float, "auto"), "f": (str, "exp(cos(x))"), "N": (int, 64), "M": (int, 256),
              "tol": (float, 1e-8), "precondition": (bool, False), "L": (int, 2), "m": (float, "auto")},
}
COMMON = {"symbol": (object, None), "order": (float, "auto"), "rho": (float, "auto"), "weight": (object, None),
          "side": (str, "torus"), "seed": (int, 0), "out": (str, ""), "output_dir": (str, ".")}


@dataclass
class RunConfig:
    subcommand: str
    values: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.values[key]

    def symbol(self):
        spec = self.values["symbol"]
        if isinstance(spec, dict):
            spec = dict(spec)
        elif _looks_builtin(spec):
            spec = {"builtin": spec}
        else:
            spec = {"expr": spec}
        for key in ("order", "rho", "weight", "side"):
            value = self.values.get(key)
            if value not in (None, "auto") and key not in spec:
                spec[key] = value
        if "expr" in spec and "order" not in spec:
            raise ConfigError("field 'order': required when 'symbol' is an expression")
        try:
            return symbol_from_spec(spec)
        except ExpressionError as exc:
            raise ConfigError(f"field 'symbol': {exc}") from None
        except PreconditionError as exc:
            raise ConfigError(f"field 'symbol': {exc}") from None


def _looks_builtin(text: str) -> bool:
    from .library import LATTICE_BUILTINS, TORUS_BUILTINS

    return text.partition(":")[0].strip() in {**TORUS_BUILTINS, **LATTICE_BUILTINS}


def _coerce(name, kind, value):
    if value is None or kind is object:
        return value
    if isinstance(value, str) and value == "auto":
        return value
    try:
        if kind is list:
            if isinstance(value, str):
                value = [v for v in value.replace(",", " ").split()]
            return [float(v) if "." in str(v) else int(v) for v in value]
        if kind is bool:
            if isinstance(value, str):
                return value.lower() in ("1", "true", "yes")
            return bool(value)
        return kind(value)
    except (TypeError, ValueError):
        raise ConfigError(f"field {name!r}: cannot read {value!r} as {kind.__name__}") from None


def load_config(subcommand: str, path: str | None, overrides: dict) -> RunConfig:
    """Merge defaults, the JSON config file and non-None flag overrides, then validate."""
    raw = {}
    if path:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
        if not isinstance(raw, dict):
            raise ConfigError(f"{path}: top level must be an object")
        raw.pop("subcommand", None)
    schema = {**COMMON, **SCHEMA[subcommand]}
    unknown = set(raw) - set(schema)
    if unknown:
        raise ConfigError(f"unknown field(s) {sorted(unknown)} for {subcommand}")
    merged = {}
    for name, (kind, default) in schema.items():
        value = overrides.get(name)
        if value is None:
            value = raw.get(name, default)
        if value is None and name != "weight":
            raise ConfigError(f"field {name!r}: required for {subcommand}")
        merged[name] = _coerce(name, kind, value)
    return RunConfig(subcommand, merged)


def _emit(cfg: RunConfig, payload: dict) -> None:
    text = io.write_json(payload, cfg["out"] or None)
    print(text)


def _outdir(cfg: RunConfig) -> Path:
    path = Path(cfg["output_dir"])
    path.mkdir(parents=True, exist_ok=True)
    return path


def cmd_classify(cfg: RunConfig) -> int:
    s = cfg.symbol()
    report = check_M_membership(s, cfg["alpha_max"], cfg["beta_max"], cfg["windows"])
    _emit(cfg, {"symbol": s.name, "order": s.order, "rho": s.rho, "verdict": report.verdict,
                "S_verdict": report.sigma.verdict, "offending": report.offending,
                "S_table": report.sigma.entries, "kDelta_table": report.k_delta.entries})
    return EXIT_OK if report.consistent else EXIT_HYPOTHESIS


def cmd_parametrix(cfg: RunConfig) -> int:
    s = cfg.symbol()
    N = cfg["N"]
    R = None if cfg["R"] == "auto" else cfg["R"]
    summary = {"symbol": s.name, "N": N, "profiles": []}
    out = _outdir(cfg)
    for L in cfg["L"]:
        try:
            par = parametrix(s, int(L), R, cfg["derivative"])
        except (NotEllipticError, SingularSymbolError) as exc:
            _emit(cfg, {"symbol": s.name, "error": str(exc), "elliptic": False})
            return EXIT_HYPOTHESIS
        prof = parametrix_residual(s, par.symbol, N)
        path = out / f"parametrix_L{int(L)}.csv"
        prof.to_csv(path)
        beyond = prof.interior & (np.abs(prof.ks) >= 2 * par.R)
        entry = {"L": int(L), "R": par.R, "csv": str(path)}
        if max(prof.left[beyond].max(), prof.right[beyond].max()) < 1e-12:
            entry["slope"] = "exact beyond cutoff"
        else:
            entry["slope_left"] = prof.slope("left", cfg["k_min"], cfg["k_max"], s.weight)
            entry["slope_right"] = prof.slope("right", cfg["k_min"], cfg["k_max"], s.weight)
            entry["expected"] = -s.rho * int(L)
        summary["profiles"].append(entry)
    _emit(cfg, summary)
    return EXIT_OK


def cmd_compactness(cfg: RunConfig) -> int:
    s = cfg.symbol()
    report = compactness_verdict(s, cfg["K0"], cfg["N_list"])
    payload = report.to_dict()
    payload.pop("gohberg", None)
    payload["symbol"] = s.name
    _emit(cfg, payload)
    return {"compact": EXIT_OK, "not compact": EXIT_HYPOTHESIS}.get(report.verdict, EXIT_NUMERICAL)


def cmd_garding(cfg: RunConfig) -> int:
    s = cfg.symbol()
    m = cfg["m"]
    if cfg["sharp"]:
        try:
            report = sharp_garding_constant(s, m, cfg["N_list"])
        except PreconditionError as exc:
            _emit(cfg, {"symbol": s.name, "error": str(exc)})
            return EXIT_HYPOTHESIS
        _emit(cfg, {"symbol": s.name, **report.to_dict()})
        return EXIT_OK if report.bounded else EXIT_NUMERICAL
    if s.side == LATTICE:
        report = garding_lattice(s, m, cfg["N_list"], seed=cfg["seed"])
    else:
        report = garding_constants(s, m, cfg["N_list"])
        if report.passed:
            margin = garding_spot_check(s, m, report.C0, report.C1, max(cfg["N_list"]), cfg["samples"], cfg["seed"])
            report.details["spot_check"] = {"samples": cfg["samples"], "worst_relative_margin": margin}
    _emit(cfg, {"symbol": s.name, **report.to_dict()})
    return EXIT_OK if report.passed else EXIT_HYPOTHESIS


def _rhs(cfg: RunConfig) -> GridFunction:
    try:
        expr = SymbolExpression(cfg["f"])
    except ExpressionError as exc:
        raise ConfigError(f"field 'f': {exc}") from None
    if "k" in expr.names or "L" in expr.names:
        raise ConfigError("field 'f': right-hand side may only depend on x")
    return GridFunction.from_function(lambda x: expr(x, 0.0), cfg["M"])


def cmd_solve(cfg: RunConfig) -> int:
    s = cfg.symbol()
    f = _rhs(cfg)
    m = s.order / 2 if cfg["m"] == "auto" else cfg["m"]
    lam = cfg["lam"]
    try:
        if lam == "auto":
            lam = lambda0_estimate(s, m)
        result = solve(s, float(lam), f, cfg["N"], cfg["tol"], cfg["precondition"], L=cfg["L"])
    except (NotEllipticError, GardingFailure) as exc:
        _emit(cfg, {"symbol": s.name, "error": str(exc)})
        return EXIT_HYPOTHESIS
    except SolverFailure as exc:
        _emit(cfg, {"symbol": s.name, "error": str(exc), "condition": exc.condition})
        return EXIT_NUMERICAL
    path = _outdir(cfg) / "u.csv"
    io.grid_to_csv(result.u, path)
    _emit(cfg, {"symbol": s.name, **result.to_dict(), "u_csv": str(path)})
    return EXIT_OK if result.converged else EXIT_NUMERICAL


COMMANDS = {"classify": cmd_classify, "parametrix": cmd_parametrix, "compactness": cmd_compactness,
            "garding": cmd_garding, "solve": cmd_solve}


class _Parser(argparse.ArgumentParser):
    # usage errors are config errors, not hypothesis failures
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="toroidal-psido", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON config file; flags override its fields")
        p.add_argument("--symbol", help="built-in name (e.g. 'bessel:s=1') or expression in x, k, L(k)")
        p.add_argument("--order", type=float, help="declared order m of an expression symbol")
        p.add_argument("--rho", type=float)
        p.add_argument("--weight", type=json.loads, help='weight spec as JSON, e.g. \'{"name": "bracket"}\'')
        p.add_argument("--side", choices=["torus", "lattice"])
        p.add_argument("--seed", type=int)
        p.add_argument("--out", help="write the JSON report here as well as to stdout")
        p.add_argument("--output-dir", dest="output_dir", help="directory for CSV outputs")
        for field_name, (kind, _) in SCHEMA[name].items():
            flags = ["--" + field_name.replace("_", "-")]
            if field_name == "lam":
                flags.insert(0, "--lambda")
            if kind is bool:
                p.add_argument(*flags, dest=field_name, action="store_true", default=None)
            elif kind is list:
                p.add_argument(*flags, dest=field_name, nargs="+")
            else:
                p.add_argument(*flags, dest=field_name)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {k: v for k, v in vars(args).items() if k not in ("subcommand", "config")}
    try:
        cfg = load_config(args.subcommand, args.config, overrides)
        return COMMANDS[args.subcommand](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SolverFailure, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
