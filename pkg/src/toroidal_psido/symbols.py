"""Symbols on T x Z (or Z x T), their difference calculus and class diagnostics.

A :class:`Symbol` is driven by a single primitive, ``values(ks, M)``, which
returns an ``(M, len(ks))`` array whose column ``c`` holds the samples of
``x -> sigma(x, ks[c])`` on the uniform M-point grid.  Smoothness in ``x`` is
represented by band-limited interpolation of those samples, so x-derivatives
are spectral.  Lattice symbols ``sigma(n, x)`` use the same storage with the
roles of the arguments swapped in the natural-order call.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from math import comb, factorial
from typing import Callable, Sequence

import numpy as np

from .errors import OutOfWindowError, PreconditionError, SingularSymbolError
from .fourier_core import fft_frequencies, from_x_coefficients, grid, trig_interpolate, x_coefficients
from .reports import DiagnosticsReport, ReportMixin
from .weights import WeightFunction, bracket, require_valid

Provider = Callable[[np.ndarray, int], np.ndarray]

TORUS = "torus"
LATTICE = "lattice"


def _as_ks(k) -> np.ndarray:
    return np.atleast_1d(np.asarray(k)).astype(np.int64).ravel()


@dataclass(frozen=True, eq=False)
class Symbol:
    """Complex function on the grid x window with a declared class ``(m, rho, Lambda)``."""

    provider: Provider
    order: float
    rho: float = 1.0
    weight: WeightFunction = field(default_factory=bracket)
    side: str = TORUS
    name: str = "symbol"
    resolution: int = 64
    x_independent: bool = False
    k_range: tuple[int, int] | None = None
    source: Callable | None = None

    def __post_init__(self):
        if self.side not in (TORUS, LATTICE):
            raise ValueError(f"side must be {TORUS!r} or {LATTICE!r}")
        if not 0 < self.rho <= 1.0 / self.weight.mu + 1e-12:
            raise PreconditionError(f"rho must lie in (0, 1/mu] = (0, {1.0 / self.weight.mu}], got {self.rho}")
        if self.resolution < 4:
            raise ValueError("resolution must be at least 4")

    @classmethod
    def from_function(cls, func, order: float, **kwargs) -> "Symbol":
        """Wrap ``func(x, k)`` broadcasting over an ``(M, 1)`` x-column and a ``(1, n)`` k-row.

        For lattice symbols ``func`` is still called as ``func(x, n)``; use
        :func:`lattice_symbol` to pass a natural-order ``func(n, x)``.
        """
        def provider(ks, M):
            x = grid(M)[:, None]
            k = ks[None, :].astype(float)
            return np.broadcast_to(np.asarray(func(x, k), dtype=complex), (M, ks.size))

        kwargs.setdefault("source", func)
        return cls(provider, order, **kwargs)

    def values(self, k, M: int | None = None) -> np.ndarray:
        """Samples ``sigma(x_j, k_c)`` as an ``(M, n)`` complex array."""
        ks = _as_ks(k)
        M = self.resolution if M is None else M
        if self.k_range is not None:
            lo, hi = self.k_range
            if ks.size and (ks.min() < lo or ks.max() > hi):
                raise OutOfWindowError(
                    f"{self.name} is only defined for {lo} <= k <= {hi}, requested {ks.min()}..{ks.max()}")
        out = np.asarray(self.provider(ks, M), dtype=complex)
        if out.shape != (M, ks.size):
            raise ValueError(f"symbol provider returned shape {out.shape}, expected {(M, ks.size)}")
        return out

    def __call__(self, a, b):
        """Natural-order evaluation: ``sigma(x, k)`` on the torus, ``sigma(n, x)`` on the lattice.

        Arbitrary x points are evaluated by trigonometric interpolation at
        ``resolution``; scalar inputs give a scalar.
        """
        x, k = (a, b) if self.side == TORUS else (b, a)
        x_arr, k_arr = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(k))
        flat_k = _as_ks(k_arr)
        uniq, inverse = np.unique(flat_k, return_inverse=True)
        coeffs = x_coefficients(self.values(uniq, self.resolution))
        x_flat = x_arr.ravel()
        out = np.empty(x_flat.size, dtype=complex)
        for c in range(uniq.size):
            sel = inverse == c
            out[sel] = trig_interpolate(coeffs[:, c], x_flat[sel])
        out = out.reshape(x_arr.shape)
        return out[()] if out.ndim == 0 else out

    def with_(self, **changes) -> "Symbol":
        if "provider" in changes:
            # the closed form no longer describes a derived symbol
            changes.setdefault("source", None)
        return replace(self, **changes)

    def conj(self) -> "Symbol":
        return self.with_(provider=lambda ks, M, p=self.provider: np.conj(p(ks, M)), name=f"conj({self.name})")

    def __neg__(self) -> "Symbol":
        return self * -1.0

    def __add__(self, other) -> "Symbol":
        if isinstance(other, Symbol):
            _check_compatible(self, other)
            order = max(self.order, other.order)
            name = f"({self.name} + {other.name})"
            xi = self.x_independent and other.x_independent
            p, q = self, other
            return self.with_(provider=lambda ks, M: p.values(ks, M) + q.values(ks, M), order=order,
                              name=name, x_independent=xi, resolution=max(p.resolution, q.resolution),
                              k_range=_join_range(p.k_range, q.k_range))
        p = self
        return self.with_(provider=lambda ks, M: p.values(ks, M) + other, name=f"({self.name} + {other})",
                          order=max(self.order, 0.0))

    __radd__ = __add__

    def __sub__(self, other) -> "Symbol":
        return self + (-other)

    def __rsub__(self, other) -> "Symbol":
        return (-self) + other

    def __mul__(self, other) -> "Symbol":
        if isinstance(other, Symbol):
            _check_compatible(self, other)
            p, q = self, other
            return self.with_(provider=lambda ks, M: p.values(ks, M) * q.values(ks, M),
                              order=p.order + q.order, name=f"{p.name}*{q.name}",
                              x_independent=p.x_independent and q.x_independent,
                              resolution=max(p.resolution, q.resolution),
                              k_range=_join_range(p.k_range, q.k_range))
        p = self
        return self.with_(provider=lambda ks, M: p.values(ks, M) * other, name=f"{other}*{self.name}")

    __rmul__ = __mul__

    def divided_by(self, other: "Symbol", floor: float = 1e-14) -> "Symbol":
        """Pointwise quotient; raises :class:`SingularSymbolError` where ``|other| < floor``."""
        _check_compatible(self, other)
        p, q = self, other

        def provider(ks, M):
            den = q.values(ks, M)
            bad = np.abs(den) < floor
            if np.any(bad):
                j, c = np.argwhere(bad)[0]
                raise SingularSymbolError(f"{q.name} vanishes near x={grid(M)[j]:.4g}, k={ks[c]}")
            return p.values(ks, M) / den

        return self.with_(provider=provider, order=p.order - q.order, name=f"{p.name}/{q.name}",
                          x_independent=p.x_independent and q.x_independent,
                          resolution=max(p.resolution, q.resolution))


def _check_compatible(a: Symbol, b: Symbol) -> None:
    if a.side != b.side:
        raise ValueError(f"cannot combine a {a.side} symbol with a {b.side} symbol")


def _join_range(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return (max(a[0], b[0]), min(a[1], b[1]))


def lattice_symbol(func, order: float, **kwargs) -> Symbol:
    """Lattice symbol from a natural-order ``func(n, x)``."""
    return Symbol.from_function(lambda x, k: func(k, x), order, side=LATTICE, **kwargs)


def multiplier(func, order: float, **kwargs) -> Symbol:
    """x-independent symbol ``sigma(x, k) = func(k)``."""
    def provider(ks, M):
        return np.broadcast_to(np.asarray(func(ks.astype(float)), dtype=complex)[None, :], (M, ks.size))

    kwargs.setdefault("source", lambda x, k: func(np.asarray(k, dtype=float)) + 0 * np.asarray(x))
    return Symbol(provider, order, x_independent=True, **kwargs)


def tabulated_symbol(table: np.ndarray, k_min: int, order: float, **kwargs) -> Symbol:
    """Symbol from an ``(M0, n)`` table of samples for ``k = k_min .. k_min + n - 1``.

    Evaluation at other grid sizes interpolates in ``x``; frequencies outside
    the table raise :class:`OutOfWindowError`.
    """
    table = np.asarray(table, dtype=complex)
    coeffs = x_coefficients(table)
    M0, n = table.shape

    def provider(ks, M):
        cols = coeffs[:, ks - k_min]
        if M == M0:
            return table[:, ks - k_min]
        return trig_interpolate(cols, grid(M))

    return Symbol(provider, order, k_range=(k_min, k_min + n - 1),
                  resolution=kwargs.pop("resolution", M0), **kwargs)


def forward_difference(s: Symbol, alpha: int = 1) -> Symbol:
    """``Delta^alpha sigma(x, k) = sum_j (-1)^(alpha-j) C(alpha, j) sigma(x, k + j)``; order drops by rho*alpha."""
    if alpha < 0:
        raise ValueError("difference order must be nonnegative")
    if alpha == 0:
        return s

    return s.with_(provider=lambda ks, M: _difference_sum(s, ks, M, alpha, +1),
                   order=s.order - s.rho * alpha, name=f"D{alpha}[{s.name}]")


def backward_difference(s: Symbol, alpha: int = 1) -> Symbol:
    """Iterated ``sigma(k) - sigma(k - 1)``."""
    if alpha < 0:
        raise ValueError("difference order must be nonnegative")
    if alpha == 0:
        return s
    return s.with_(provider=lambda ks, M: _difference_sum(s, ks, M, alpha, -1),
                   order=s.order - s.rho * alpha, name=f"Db{alpha}[{s.name}]")


def _difference_sum(s: Symbol, ks: np.ndarray, M: int, alpha: int, direction: int) -> np.ndarray:
    shifts = np.arange(alpha + 1)
    # one evaluation over every shifted frequency at once
    stacked = s.values((ks[None, :] + direction * shifts[:, None]).ravel(), M).reshape(M, alpha + 1, ks.size)
    if direction > 0:
        signs = np.array([(-1) ** (alpha - j) * comb(alpha, j) for j in shifts], dtype=float)
    else:
        signs = np.array([(-1) ** j * comb(alpha, j) for j in shifts], dtype=float)
    return np.einsum("j,mjn->mn", signs, stacked)


def falling_binomial(j: np.ndarray, alpha: int) -> np.ndarray:
    """``C(j, alpha) = j (j-1) ... (j-alpha+1) / alpha!`` for signed integer ``j``."""
    out = np.ones(np.shape(j), dtype=float)
    for t in range(alpha):
        out = out * (np.asarray(j, dtype=float) - t)
    return out / factorial(alpha)


def x_multiplier(s: Symbol, mult: Callable[[np.ndarray], np.ndarray], name: str) -> Symbol:
    """Apply the Fourier multiplier ``mult(j)`` in ``x`` (column by column).

    Coefficients are computed at ``max(M, resolution)`` points, so the result
    is exact for symbols whose x-bandwidth that grid resolves.
    """
    def provider(ks, M):
        Mc = max(M, s.resolution)
        c = x_coefficients(s.values(ks, Mc))
        # roundoff in high x-frequencies would be amplified by polynomial multipliers
        c[np.abs(c) < 1e-15 * np.abs(c).max(axis=0, initial=0.0)[None, :]] = 0.0
        freq = fft_frequencies(Mc)
        m = np.asarray(mult(freq), dtype=complex)
        if Mc % 2 == 0:
            m[Mc // 2] = 0.5 * (mult(np.array([Mc // 2]))[0] + mult(np.array([-Mc // 2]))[0])
        c = c * m[:, None]
        if Mc == M:
            return from_x_coefficients(c)
        return trig_interpolate(c, grid(M))

    return s.with_(provider=provider, name=name)


def x_derivative(s: Symbol, beta: int = 1) -> Symbol:
    """Spectral ``d^beta / dx^beta`` of the symbol; order unchanged."""
    if beta < 0:
        raise ValueError("derivative order must be nonnegative")
    if beta == 0:
        return s
    if s.x_independent:
        return s.with_(provider=lambda ks, M: np.zeros((M, ks.size), dtype=complex), name=f"dx{beta}[{s.name}]")
    return x_multiplier(s, lambda j: (1j * j) ** beta, f"dx{beta}[{s.name}]")


def x_bandwidth(s: Symbol, ks, tol: float = 1e-12, M: int | None = None) -> int:
    """Smallest ``B`` with x-coefficient mass beyond ``|j| > B`` below ``tol`` (relative, per column)."""
    M = max(s.resolution, M or 0)
    c = np.abs(x_coefficients(s.values(ks, M)))
    freq = np.abs(fft_frequencies(M))
    col_mass = c.sum(axis=0)
    col_mass[col_mass == 0] = 1.0
    rel = c / col_mass[None, :]
    for B in range(M // 2 + 1):
        if rel[freq > B].sum(axis=0).max(initial=0.0) < tol:
            return B
    return M // 2


# ---------------------------------------------------------------- class diagnostics


@dataclass
class SeminormTable(ReportMixin):
    """Empirical constants ``C_{alpha,beta}`` per window for one declared order."""

    entries: dict
    windows: list
    order: float
    rho: float
    verdict: str
    offending: list = field(default_factory=list)
    resolution: int = 64

    @property
    def consistent(self) -> bool:
        return self.verdict == "consistent"

    def constant(self, alpha: int, beta: int, window: int | None = None) -> float:
        series = self.entries[f"alpha={alpha},beta={beta}"]
        if window is None:
            return series[-1]["C"]
        return next(e["C"] for e in series if e["K"] == window)


def _seminorm_scan(s: Symbol, alpha: int, beta: int, K: int, M: int, order: float):
    ks = np.arange(-K, K + 1)
    vals = x_derivative(forward_difference(s, alpha), beta).values(ks, M)
    ratio = np.abs(vals).max(axis=0) / s.weight(ks.astype(float)) ** (order - s.rho * alpha)
    i = int(ratio.argmax())
    return float(ratio[i]), int(ks[i])


def seminorm_estimate(s: Symbol, alpha: int, beta: int, K: int = 128, M: int | None = None,
                      order: float | None = None) -> float:
    """``sup_{x_j, |k| <= K} |Delta^alpha d_x^beta sigma| / Lambda(k)^(m - rho*alpha)``."""
    M = M or s.resolution
    if M < 2 * beta + 2:
        raise PreconditionError(f"x-grid of {M} points too coarse for derivative order {beta}")
    return _seminorm_scan(s, alpha, beta, K, M, s.order if order is None else order)[0]


def check_S_membership(s: Symbol, alpha_max: int = 2, beta_max: int = 2,
                       windows: Sequence[int] = (32, 64, 128), order: float | None = None,
                       growth_tol: float = 0.1, M: int | None = None) -> SeminormTable:
    """Scan every ``(alpha, beta)`` seminorm across doubling windows.

    A seminorm that rises by more than ``growth_tol`` (relative) between two
    consecutive windows is read as a growth trend and makes the verdict
    ``"inconsistent"``.
    """
    order = s.order if order is None else order
    M = M or s.resolution
    windows = sorted(windows)
    entries, offending = {}, []
    for alpha in range(alpha_max + 1):
        for beta in range(beta_max + 1):
            series = []
            for K in windows:
                C, k_at = _seminorm_scan(s, alpha, beta, K, M, order)
                series.append({"K": K, "C": C, "k": k_at})
            entries[f"alpha={alpha},beta={beta}"] = series
            for prev, cur in zip(series, series[1:]):
                if not np.isfinite(cur["C"]) or cur["C"] > prev["C"] * (1 + growth_tol) + 1e-13:
                    offending.append({"alpha": alpha, "beta": beta, "k": cur["k"],
                                      "growth": cur["C"] / prev["C"] if prev["C"] else float("inf")})
                    break
    return SeminormTable(entries, list(windows), order, s.rho,
                         "inconsistent" if offending else "consistent", offending, M)


def weighted_k_difference(s: Symbol) -> Symbol:
    """``k * Delta sigma``, kept at the order of ``sigma``."""
    d = forward_difference(s, 1)
    return d.with_(provider=lambda ks, M: ks[None, :] * d.values(ks, M), order=s.order,
                   name=f"k*D[{s.name}]", x_independent=s.x_independent)


@dataclass
class MembershipReport(ReportMixin):
    verdict: str
    sigma: SeminormTable
    k_delta: SeminormTable

    @property
    def consistent(self) -> bool:
        return self.verdict == "consistent"

    @property
    def offending(self) -> list:
        return ([dict(o, gamma=0) for o in self.sigma.offending]
                + [dict(o, gamma=1) for o in self.k_delta.offending])


def check_M_membership(s: Symbol, alpha_max: int = 2, beta_max: int = 2,
                       windows: Sequence[int] = (32, 64, 128), order: float | None = None,
                       growth_tol: float = 0.1, M: int | None = None) -> MembershipReport:
    """S-membership of both ``sigma`` (gamma=0) and ``k * Delta sigma`` (gamma=1) at the same order."""
    order = s.order if order is None else order
    t0 = check_S_membership(s, alpha_max, beta_max, windows, order, growth_tol, M)
    t1 = check_S_membership(weighted_k_difference(s), alpha_max, beta_max, windows, order, growth_tol, M)
    verdict = "consistent" if t0.consistent and t1.consistent else "inconsistent"
    return MembershipReport(verdict, t0, t1)


# ---------------------------------------------------------------- cutoffs and asymptotic sums


def _smooth_step(s: np.ndarray) -> np.ndarray:
    """0 for s <= 0, 1 for s >= 1, exp-based C-infinity monotone bridge in between."""
    s = np.asarray(s, dtype=float)

    def f(t):
        pos = t > 0
        return np.where(pos, np.exp(-1.0 / np.where(pos, t, 1.0)), 0.0)

    a, b = f(s), f(1.0 - s)
    return a / (a + b)


def cutoff_psi(t, eps: float = 1.0):
    """``psi(eps * t)`` with ``psi = 0`` on ``|t| <= 1/2`` and ``psi = 1`` on ``|t| >= 1``."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    u = np.abs(np.asarray(t, dtype=float)) * eps
    out = _smooth_step(2.0 * u - 1.0)
    return float(out) if np.ndim(out) == 0 else out


def band_cutoff(k, inner: float, outer: float):
    """0 for ``|k| <= inner``, 1 for ``|k| >= outer``, smooth in between."""
    if not outer > inner:
        raise ValueError("outer radius must exceed inner radius")
    u = (np.abs(np.asarray(k, dtype=float)) - inner) / (outer - inner)
    out = _smooth_step(u)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True, eq=False)
class AsymptoticSum:
    """``sigma = sum_j psi(eps_j k) sigma_j`` together with its term data."""

    terms: tuple
    eps: tuple
    symbol: Symbol

    def active_terms(self, k: int) -> list[int]:
        """Indices ``j`` whose cutoff is nonzero at ``k``; always a finite prefix."""
        return [j for j, e in enumerate(self.eps) if cutoff_psi(k, e) > 0]


def _auto_eps0(sigmas: Sequence[Symbol], K: int = 1024) -> float:
    # largest dyadic eps0 making term j at most 2^-j relative to the previous order
    for p in range(0, 40):
        eps0 = 2.0 ** -p
        ok = True
        for j in range(1, len(sigmas)):
            eps_j = eps0 * 2.0 ** -j
            k_lo = int(np.floor(0.5 / eps_j)) + 1
            if k_lo > K:
                continue
            ks = np.concatenate([np.arange(-K, -k_lo + 1), np.arange(k_lo, K + 1)])
            s = sigmas[j]
            ratio = np.abs(s.values(ks)).max(axis=0) / s.weight(ks.astype(float)) ** sigmas[j - 1].order
            if ratio.max() > 2.0 ** -j:
                ok = False
                break
        if ok:
            return eps0
    raise PreconditionError("could not find a cutoff scale for the asymptotic sum")


def asymptotic_sum(sigmas: Sequence[Symbol], eps_rule=None, check_membership: bool = False) -> AsymptoticSum:
    """Glue symbols of strictly decreasing order into one symbol with cutoffs.

    ``eps_rule`` is a float ``eps0`` (giving ``eps_j = 2^-j eps0``), a callable
    ``j -> eps_j``, or ``None`` to pick ``eps0`` automatically so that the
    ``j``-th term contributes at most ``2^-j`` at the previous order.
    """
    sigmas = list(sigmas)
    if not sigmas:
        raise PreconditionError("asymptotic sum needs at least one term")
    orders = [s.order for s in sigmas]
    if any(b >= a for a, b in zip(orders, orders[1:])):
        raise PreconditionError(f"orders must be strictly decreasing, got {orders}")
    if check_membership:
        for s in sigmas:
            report = check_M_membership(s, 1, 1, (32, 64))
            if not report.consistent:
                raise PreconditionError(f"term {s.name} fails the class check: {report.offending}")
    if eps_rule is None:
        eps_rule = _auto_eps0(sigmas)
    if callable(eps_rule):
        eps = tuple(float(eps_rule(j)) for j in range(len(sigmas)))
    else:
        eps = tuple(float(eps_rule) * 2.0 ** -j for j in range(len(sigmas)))
    if any(e <= 0 for e in eps) or any(b >= a for a, b in zip(eps, eps[1:])):
        raise PreconditionError("eps_j must be positive and strictly decreasing")

    def provider(ks, M):
        total = np.zeros((M, ks.size), dtype=complex)
        for s, e in zip(sigmas, eps):
            w = cutoff_psi(ks, e)
            live = w > 0
            if np.any(live):
                total[:, live] += w[live][None, :] * s.values(ks[live], M)
        return total

    head = sigmas[0]
    symbol = head.with_(provider=provider, name="asum[" + ", ".join(s.name for s in sigmas) + "]",
                        x_independent=all(s.x_independent for s in sigmas),
                        resolution=max(s.resolution for s in sigmas))
    return AsymptoticSum(tuple(sigmas), eps, symbol)


def fit_order(ks, profile, weight: WeightFunction | None = None) -> float:
    """Least-squares slope of ``log profile`` against ``log Lambda(k)``."""
    ks = np.asarray(ks, dtype=float)
    profile = np.asarray(profile, dtype=float)
    keep = profile > 0
    if keep.sum() < 2:
        return float("-inf")
    lam = (weight or bracket())(ks[keep])
    return float(np.polyfit(np.log(lam), np.log(profile[keep]), 1)[0])


def remainder_order(full: Symbol, partial: Symbol, k_min: int, k_max: int) -> float:
    """Empirical order of ``full - partial`` from ``sup_x`` over ``k_min <= |k| <= k_max``."""
    ks = np.concatenate([np.arange(-k_max, -k_min + 1), np.arange(k_min, k_max + 1)])
    diff = np.abs(full.values(ks) - partial.values(ks)).max(axis=0)
    return fit_order(ks, diff, full.weight)


def require_valid_weight(s: Symbol) -> Symbol:
    require_valid(s.weight)
    return s


def growth_report(table: SeminormTable, name: str) -> DiagnosticsReport:
    return DiagnosticsReport(name=name, passed=table.consistent,
                             constants={k: v[-1]["C"] for k, v in table.entries.items()},
                             window=table.windows[-1], details={"windows": table.windows},
                             offending=table.offending)
