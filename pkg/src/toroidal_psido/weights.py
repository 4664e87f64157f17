"""Weight functions on the integer lattice and numerical checks of their axioms.

A weight ``Lambda`` must satisfy the two-sided growth bound

    C0 (1 + |k|)^mu0 <= Lambda(k) <= C1 (1 + |k|)^mu1

and, for ``gamma`` in ``{0, 1}``, the difference estimate

    |k^gamma Delta^(alpha + gamma) Lambda(k)| <= C Lambda(k)^(1 - alpha / mu).

Both quantify over all of Z, so the checks below report window suprema and
their trend across doubling windows instead of certificates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Callable

import numpy as np

from .errors import InvalidWeightError, OutOfWindowError
from .reports import DiagnosticsReport

DEFAULT_WINDOW = 256


@dataclass(frozen=True, eq=False)
class WeightFunction:
    """Positive function on Z with declared growth and difference exponents."""

    func: Callable[[np.ndarray], np.ndarray]
    mu0: float
    mu1: float
    mu: float
    C0: float | None = None
    C1: float | None = None
    name: str = "custom"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.mu0 <= self.mu1 <= self.mu:
            raise InvalidWeightError(
                f"exponents must satisfy mu0 <= mu1 <= mu, got ({self.mu0}, {self.mu1}, {self.mu})")
        if self.mu <= 0:
            raise InvalidWeightError("difference exponent mu must be positive")

    def __call__(self, k) -> np.ndarray:
        values = np.asarray(self.func(np.asarray(k, dtype=float)), dtype=float)
        if not np.all(values > 0):
            bad = np.asarray(k)[values <= 0] if np.ndim(k) else k
            raise InvalidWeightError(f"weight {self.name} is not positive at k = {bad}")
        return values

    def eval(self, k: int) -> float:
        return float(self(k))

    def spec(self) -> dict:
        return {"name": self.name, **self.params}


def bracket() -> WeightFunction:
    """Japanese bracket ``<k> = (1 + k^2)^(1/2)``."""
    return power_bracket(1)


def power_bracket(p: int) -> WeightFunction:
    """``(1 + k^(2p))^(1/(2p))``; the growth constants are attained at k = 1 and k = 0."""
    if p < 1:
        raise ValueError("p must be a positive integer")

    def func(k, p=p):
        return (1.0 + k ** (2 * p)) ** (1.0 / (2 * p))

    name = "bracket" if p == 1 else "power_bracket"
    return WeightFunction(func, 1.0, 1.0, 1.0, C0=2.0 ** (1.0 / (2 * p)) / 2.0, C1=1.0,
                          name=name, params={} if p == 1 else {"p": p})


def constant_weight(value: float = 1.0) -> WeightFunction:
    if value <= 0:
        raise InvalidWeightError("constant weight must be positive")
    return WeightFunction(lambda k: np.full(np.shape(k), float(value)), 0.0, 0.0, 1.0,
                          C0=value, C1=value, name="constant", params={"value": value})


def tabulated_weight(table: dict, mu0: float, mu1: float, mu: float, name: str = "table") -> WeightFunction:
    """Weight given by sampled values; evaluation outside the table raises."""
    keys = np.array(sorted(int(k) for k in table))
    vals = np.array([float(table[k] if k in table else table[str(k)]) for k in keys])
    lo, hi = keys[0], keys[-1]
    if not np.array_equal(keys, np.arange(lo, hi + 1)):
        raise InvalidWeightError("tabulated weight must cover a contiguous range of k")

    def func(k):
        k = np.asarray(k)
        if np.any(k < lo) or np.any(k > hi):
            raise OutOfWindowError(f"weight table covers [{lo}, {hi}], requested {k.min()}..{k.max()}")
        return vals[(np.rint(k).astype(int) - lo)]

    return WeightFunction(func, mu0, mu1, mu, name=name, params={"range": [int(lo), int(hi)]})


BUILTIN_WEIGHTS = {
    "bracket": lambda **kw: bracket(),
    "power_bracket": lambda p=1, **kw: power_bracket(int(p)),
    "constant": lambda value=1.0, **kw: constant_weight(float(value)),
}


def weight_from_spec(spec) -> WeightFunction:
    """Build a weight from ``{"name": ..., params}`` or a table spec with exponents."""
    if spec is None:
        return bracket()
    if isinstance(spec, str):
        spec = {"name": spec}
    spec = dict(spec)
    if "table" in spec:
        return tabulated_weight(spec["table"], spec["mu0"], spec["mu1"], spec.get("mu", spec["mu1"]))
    name = spec.pop("name", "bracket")
    if name not in BUILTIN_WEIGHTS:
        raise InvalidWeightError(f"unknown weight {name!r}; choose from {sorted(BUILTIN_WEIGHTS)}")
    return BUILTIN_WEIGHTS[name](**spec)


def _window(K: int) -> np.ndarray:
    return np.arange(-K, K + 1)


def _tight_constants(w: WeightFunction, K: int):
    k = _window(K)
    lam = w(k)
    lower = lam / (1.0 + np.abs(k)) ** w.mu0
    upper = lam / (1.0 + np.abs(k)) ** w.mu1
    return lower.min(), int(k[lower.argmin()]), upper.max(), int(k[upper.argmax()])


def verify_growth(w: WeightFunction, K: int = DEFAULT_WINDOW, trend_tol: float = 0.1) -> DiagnosticsReport:
    """Tightest two-sided growth constants on ``|k| <= K`` and a doubling-window trend check.

    Fails if a declared constant is violated on the window, or if the tightest
    lower (upper) constant keeps shrinking (growing) by more than ``trend_tol``
    across the last doubling, which signals a wrong exponent.
    """
    if K < 1:
        raise ValueError("window must have K >= 1")
    c0, k0, c1, k1 = _tight_constants(w, K)
    offending = []
    if w.C0 is not None and c0 < w.C0 * (1 - 1e-12):
        offending.append({"bound": "lower", "k": k0, "ratio": c0, "declared": w.C0})
    if w.C1 is not None and c1 > w.C1 * (1 + 1e-12):
        offending.append({"bound": "upper", "k": k1, "ratio": c1, "declared": w.C1})

    trend = []
    Ks = sorted({max(1, K // 8), max(1, K // 4), max(1, K // 2), K})
    for Kw in Ks:
        a, _, b, _ = _tight_constants(w, Kw)
        trend.append({"K": Kw, "C0": a, "C1": b})
    if len(trend) >= 2:
        prev, last = trend[-2], trend[-1]
        if last["C0"] < prev["C0"] * (1 - trend_tol):
            offending.append({"bound": "lower-trend", "k": k0, "ratio": last["C0"] / prev["C0"]})
        if last["C1"] > prev["C1"] * (1 + trend_tol):
            offending.append({"bound": "upper-trend", "k": k1, "ratio": last["C1"] / prev["C1"]})

    return DiagnosticsReport(
        name="weight_growth",
        passed=not offending,
        constants={"C0": c0, "C1": c1, "mu0": w.mu0, "mu1": w.mu1},
        window=K,
        details={"trend": trend, "argmin_k": k0, "argmax_k": k1},
        offending=offending,
    )


def lattice_difference(values_at, k: np.ndarray, order: int) -> np.ndarray:
    """``Delta^order`` of ``values_at`` at ``k`` via the binomial formula."""
    total = np.zeros(np.shape(k), dtype=np.result_type(values_at(k), float))
    for j in range(order + 1):
        total = total + (-1) ** (order - j) * comb(order, j) * values_at(k + j)
    return total


def verify_difference_estimate(w: WeightFunction, alpha_max: int = 2, K: int = DEFAULT_WINDOW) -> DiagnosticsReport:
    """Empirical ``C_{alpha,gamma} = sup |k^gamma Delta^(alpha+gamma) Lambda| / Lambda^(1 - alpha/mu)``."""
    if alpha_max < 1:
        raise ValueError("alpha_max must be at least 1")
    k = _window(K).astype(float)
    lam = w(k)
    constants = {}
    for gamma in (0, 1):
        for alpha in range(alpha_max + 1):
            diff = lattice_difference(w, k, alpha + gamma)
            ratio = np.abs(k ** gamma * diff) / lam ** (1.0 - alpha / w.mu)
            constants[f"alpha={alpha},gamma={gamma}"] = float(ratio.max())
    return DiagnosticsReport(
        name="weight_difference_estimate",
        passed=all(np.isfinite(v) for v in constants.values()),
        constants=constants,
        window=K,
        details={"mu": w.mu, "alpha_max": alpha_max},
    )


def require_valid(w: WeightFunction) -> WeightFunction:
    """Reject weights failing :func:`verify_growth` on the default window."""
    report = verify_growth(w, _table_window(w))
    if not report.passed:
        raise InvalidWeightError(f"weight {w.name} fails the growth check: {report.offending}")
    return w


def _table_window(w: WeightFunction) -> int:
    rng = w.params.get("range")
    if rng is None:
        return DEFAULT_WINDOW
    return max(1, min(DEFAULT_WINDOW, -rng[0], rng[1]))
