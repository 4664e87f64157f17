"""Composition and adjoint expansions, ellipticity, and parametrix construction.

Expansion terms pair a k-difference ``Delta^alpha`` of one symbol with an
x-Fourier multiplier of order ``alpha`` applied to the other.  Two multipliers
are available:

``"falling"`` (default)
    ``j -> C(j, alpha)``, the binomial coefficient of the x-frequency ``j``.
    This is the Newton-series form of the lattice shift ``k -> k + j`` and
    makes the expansions exact when summed to all orders.
``"plain"``
    ``j -> j^alpha / alpha!``, i.e. ``(-i)^alpha d_x^alpha / alpha!``, the
    Euclidean Taylor form.  It agrees with ``"falling"`` for ``alpha <= 1``
    and loses the expected decay from the third term on.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from math import factorial

import numpy as np

from .errors import NotEllipticError, PreconditionError, SingularSymbolError
from .fourier_core import frequencies, grid
from .quantization import DenseOperator, matrix
from .reports import ReportMixin
from .symbols import (
    Symbol,
    band_cutoff,
    falling_binomial,
    fit_order,
    forward_difference,
    x_bandwidth,
    x_multiplier,
)

DERIVATIVES = ("falling", "plain")


def expansion_multiplier(s: Symbol, alpha: int, derivative: str = "falling") -> Symbol:
    """x-multiplier of order ``alpha`` used in the expansions."""
    if derivative not in DERIVATIVES:
        raise ValueError(f"derivative must be one of {DERIVATIVES}")
    if alpha == 0:
        return s
    if s.x_independent:
        return s.with_(provider=lambda ks, M: np.zeros((M, ks.size), dtype=complex), name=f"X{alpha}[{s.name}]")
    if derivative == "falling":
        return x_multiplier(s, lambda j: falling_binomial(j, alpha), f"X{alpha}[{s.name}]")
    return x_multiplier(s, lambda j: np.asarray(j, dtype=float) ** alpha / factorial(alpha), f"P{alpha}[{s.name}]")


def _sum_symbols(parts: list[Symbol], template: Symbol, order: float, name: str) -> Symbol:
    def provider(ks, M):
        total = np.zeros((M, ks.size), dtype=complex)
        for p in parts:
            total += p.values(ks, M)
        return total

    return template.with_(provider=provider, order=order, name=name,
                          x_independent=all(p.x_independent for p in parts),
                          resolution=max(p.resolution for p in parts))


def composition_terms(left: Symbol, right: Symbol, K_terms: int, derivative: str = "falling") -> list[Symbol]:
    """Terms ``Delta^alpha(left) * X_alpha(right)`` for ``alpha < K_terms``."""
    if K_terms < 1:
        raise PreconditionError("need at least one expansion term")
    if left.side != right.side:
        raise ValueError("cannot compose symbols living on different sides")
    return [forward_difference(left, a) * expansion_multiplier(right, a, derivative) for a in range(K_terms)]


def compose(left: Symbol, right: Symbol, K_terms: int = 3, derivative: str = "falling") -> Symbol:
    """Symbol of ``T_left T_right`` truncated after ``K_terms`` terms; order ``m + m'``."""
    terms = composition_terms(left, right, K_terms, derivative)
    return _sum_symbols(terms, left, left.order + right.order, f"compose[{left.name}, {right.name}; {K_terms}]")


def formal_adjoint(s: Symbol, K_terms: int = 3, derivative: str = "falling") -> Symbol:
    """Symbol of ``T_sigma^*`` truncated after ``K_terms`` terms."""
    if K_terms < 1:
        raise PreconditionError("need at least one expansion term")
    c = s.conj()
    terms = [forward_difference(expansion_multiplier(c, a, derivative), a) for a in range(K_terms)]
    return _sum_symbols(terms, s, s.order, f"adjoint[{s.name}; {K_terms}]")


def interior_residual(approx: DenseOperator, exact: np.ndarray, B: int, k_min: int = 0) -> float:
    """Max-abs of ``approx - exact`` over rows ``|k| <= N - B`` and columns ``k_min <= |l| <= N - B``."""
    N = approx.N
    ks = frequencies(N)
    rows = np.abs(ks) <= N - B
    cols = rows & (np.abs(ks) >= k_min)
    return float(np.abs(approx.matrix - exact)[np.ix_(rows, cols)].max())


def column_profile(approx: DenseOperator, exact: np.ndarray, B: int):
    """``l -> max_k |approx - exact|`` over interior rows and columns; returns ``(ls, profile)``."""
    N = approx.N
    ks = frequencies(N)
    inner = np.abs(ks) <= N - B
    diff = np.abs(approx.matrix - exact)[np.ix_(inner, inner)]
    return ks[inner], diff.max(axis=0)


def decay_slope(ks, profile, k_min: int, k_max: int, weight=None) -> float:
    """Fitted exponent of ``profile`` against ``Lambda(k)`` on ``k_min <= |k| <= k_max``."""
    ks = np.asarray(ks)
    sel = (np.abs(ks) >= k_min) & (np.abs(ks) <= k_max)
    return fit_order(ks[sel], np.asarray(profile)[sel], weight)


# ---------------------------------------------------------------- ellipticity


@dataclass
class EllipticityReport(ReportMixin):
    C: float
    R: int | None
    is_elliptic: bool
    window: int
    strong: bool = False
    c_table: list = field(default_factory=list)


def _ellipticity_grid(s: Symbol) -> int:
    # multiple of 4 so the extremes of sin and cos are grid points
    M = max(s.resolution, 64)
    return M + (-M) % 4


def _lower_constant(s: Symbol, R: int, K: int, strong: bool, M: int) -> float:
    ks = np.concatenate([np.arange(-K, -R + 1), np.arange(max(R, 0), K + 1)])
    ks = np.unique(ks)
    vals = s.values(ks, M)
    num = vals.real if strong else np.abs(vals)
    return float((num / s.weight(ks.astype(float))[None, :] ** s.order).min())


def _ellipticity(s: Symbol, K: int, R_grid, c_min: float, stability_tol: float, strong: bool) -> EllipticityReport:
    if R_grid is None:
        R_grid = [0] + [2 ** p for p in range(int(np.log2(max(K, 2))))]
    R_grid = sorted(int(R) for R in R_grid if R <= K // 2)
    M = _ellipticity_grid(s)
    table = []
    chosen = None
    for R in R_grid:
        C = _lower_constant(s, R, K, strong, M)
        C2 = _lower_constant(s, R, 2 * K, strong, M)
        stable = C2 >= C * (1 - stability_tol) if C > 0 else False
        table.append({"R": R, "C": C, "C_doubled": C2, "stable": stable})
        if chosen is None and C >= c_min and stable:
            chosen = table[-1]
    if chosen is None:
        best = max(table, key=lambda r: r["C"]) if table else {"C": 0.0}
        return EllipticityReport(best["C"], None, False, K, strong, table)
    return EllipticityReport(min(chosen["C"], chosen["C_doubled"]), chosen["R"], True, K, strong, table)


def m_ellipticity(s: Symbol, K: int = 128, R_grid=None, c_min: float = 1e-8,
                  stability_tol: float = 0.1) -> EllipticityReport:
    """Smallest ``R`` in ``R_grid`` with ``min |sigma| / Lambda^m >= c_min`` on ``R <= |k| <= K``, stably."""
    return _ellipticity(s, K, R_grid, c_min, stability_tol, strong=False)


def strong_m_ellipticity(s: Symbol, K: int = 128, R_grid=None, c_min: float = 1e-8,
                         stability_tol: float = 0.1) -> EllipticityReport:
    """As :func:`m_ellipticity` with ``Re sigma`` in place of ``|sigma|``."""
    return _ellipticity(s, K, R_grid, c_min, stability_tol, strong=True)


# ---------------------------------------------------------------- inverse symbols and parametrices


def inverse_cutoff_symbol(s: Symbol, R_inner: float, R_outer: float, floor: float = 1e-14) -> Symbol:
    """``psi(k) / sigma`` with ``psi = 0`` for ``|k| <= R_inner`` and ``psi = 1`` for ``|k| >= R_outer``."""
    if not R_outer > R_inner >= 0:
        raise PreconditionError("need R_outer > R_inner >= 0")

    def provider(ks, M):
        psi = band_cutoff(ks, R_inner, R_outer)
        out = np.zeros((M, ks.size), dtype=complex)
        live = psi > 0
        if np.any(live):
            den = s.values(ks[live], M)
            bad = np.abs(den) < floor
            if np.any(bad):
                j, c = np.argwhere(bad)[0]
                raise SingularSymbolError(f"{s.name} vanishes near x={grid(M)[j]:.4g}, k={ks[live][c]}")
            out[:, live] = psi[live][None, :] / den
        return out

    return s.with_(provider=provider, order=-s.order, name=f"inv[{s.name}]")


@dataclass(frozen=True, eq=False)
class Parametrix:
    """``tau = sum_l tau_l`` with the individual terms kept for inspection."""

    symbol: Symbol
    terms: tuple
    R: int
    derivative: str
    ellipticity: EllipticityReport | None = None


def parametrix(s: Symbol, L: int = 3, R: int | None = None, derivative: str = "falling",
               K: int = 128) -> Parametrix:
    """Left parametrix of an elliptic symbol from the recursive construction.

    ``tau_0 = psi / sigma`` with ``psi`` vanishing for ``|k| <= R`` and equal to
    one for ``|k| >= 2R``, then

        tau_l = -[ sum_{j<l} X_{l-j}(sigma) * Delta^(l-j) tau_j ] * tau_0,

    where ``X`` is the expansion multiplier.  ``R`` defaults to the threshold
    found by :func:`m_ellipticity` (at least 1, so the cutoff band is nonempty).
    """
    if L < 1:
        raise PreconditionError("expansion length L must be at least 1")
    report = m_ellipticity(s, K)
    if not report.is_elliptic:
        raise NotEllipticError(f"{s.name} is not elliptic on |k| <= {K} (best lower constant {report.C:.3g})")
    R_eff = max(int(report.R if R is None else R), 1)
    if R is not None and R < (report.R or 0):
        raise NotEllipticError(f"threshold R={R} is below the ellipticity threshold {report.R}")
    tau0 = inverse_cutoff_symbol(s, R_eff, 2 * R_eff).with_(name="tau_0")
    taus = [tau0]
    for l in range(1, L):
        parts = [expansion_multiplier(s, l - j, derivative) * forward_difference(taus[j], l - j) for j in range(l)]
        inner = _sum_symbols(parts, s, s.order - s.rho * l, f"rec{l}")
        taus.append((-inner * tau0).with_(order=-s.order - s.rho * l, name=f"tau_{l}"))
    total = _sum_symbols(taus, tau0, -s.order, f"parametrix[{s.name}; L={L}]")
    return Parametrix(total, tuple(taus), R_eff, derivative, report)


@dataclass
class ResidualProfile(ReportMixin):
    """Per-column residuals of ``T S - I`` (left) and ``S T - I`` (right)."""

    ks: np.ndarray
    left: np.ndarray
    right: np.ndarray
    interior: np.ndarray

    def slope(self, side: str, k_min: int, k_max: int, weight=None) -> float:
        prof = self.left if side == "left" else self.right
        sel = self.interior
        return decay_slope(self.ks[sel], prof[sel], k_min, k_max, weight)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["k", "residual_left", "residual_right"])
            for k, a, b in zip(self.ks[self.interior], self.left[self.interior], self.right[self.interior]):
                w.writerow([int(k), repr(float(a)), repr(float(b))])


def parametrix_residual(s: Symbol, t: Symbol, N: int) -> ResidualProfile:
    """``k -> ||(T S - I) e_k||_2`` and ``||(S T - I) e_k||_2`` with ``S = matrix(s)``, ``T = matrix(t)``.

    ``interior`` marks ``|k| <= N - max(2B, N // 8)`` with ``B`` the
    x-bandwidth of ``s``.  The extra ``N // 8`` margin covers ``t``, whose
    x-bandwidth is unbounded for a parametrix (it contains ``1 / sigma``).
    """
    S = matrix(s, N).matrix
    T = matrix(t, N).matrix
    eye = np.eye(S.shape[0])
    ks = frequencies(N)
    B = min(x_bandwidth(s, ks, M=max(s.resolution, 4 * N + 4)), N // 4)
    left = np.linalg.norm(T @ S - eye, axis=0)
    right = np.linalg.norm(S @ T - eye, axis=0)
    return ResidualProfile(ks, left, right, np.abs(ks) <= N - max(2 * B, N // 8))
