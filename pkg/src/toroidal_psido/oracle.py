"""Brute-force reference computations.

Everything here works from a plain scalar callable ``sigma(x, k)`` and
explicit loops, and imports nothing from the fast paths it is used to
check.  Costs are ``O(N^2 M)`` or worse, so keep ``N <= 64`` and ``M <= 256``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

ScalarSymbol = Callable[[float, int], complex]


@dataclass(frozen=True)
class OracleConfig:
    N: int = 32
    M: int = 128
    tolerance: float = 1e-10
    symbols: Sequence[str] = field(default_factory=tuple)


def _grid(M: int) -> list[float]:
    return [2.0 * math.pi * j / M for j in range(M)]


def quantization_oracle(sigma: ScalarSymbol, f_samples: Sequence[complex], N: int) -> np.ndarray:
    """``(1/2pi) sum_{|k|<=N} int exp(ik(x-y)) sigma(x,k) f(y) dy`` at every grid point.

    The y-integral is the M-point trapezoid rule on the grid of ``f_samples``.
    """
    f = np.asarray(f_samples, dtype=complex)
    M = f.size
    xs = _grid(M)
    ys = np.array(xs)
    # integral over y: (1/2pi) * (2pi/M) * sum_j exp(-iky_j) f(y_j)
    fk = {k: complex(np.sum(np.exp(-1j * k * ys) * f)) / M for k in range(-N, N + 1)}
    out = np.zeros(M, dtype=complex)
    for i, x in enumerate(xs):
        acc = 0j
        for k in range(-N, N + 1):
            acc += cmath.exp(1j * k * x) * complex(sigma(x, k)) * fk[k]
        out[i] = acc
    return out


def galerkin_oracle(sigma: ScalarSymbol, N: int, M: int = 256) -> np.ndarray:
    """Entry ``(k, l) = (1/M) sum_j sigma(x_j, l) exp(-i (k - l) x_j)`` by explicit loops."""
    xs = _grid(M)
    size = 2 * N + 1
    A = np.zeros((size, size), dtype=complex)
    for b, l in enumerate(range(-N, N + 1)):
        col = [complex(sigma(x, l)) for x in xs]
        for a, k in enumerate(range(-N, N + 1)):
            A[a, b] = sum(c * cmath.exp(-1j * (k - l) * x) for c, x in zip(col, xs)) / M
    return A


def composition_oracle(sigma: ScalarSymbol, tau: ScalarSymbol, N: int, M: int = 256) -> np.ndarray:
    """Product of the two truncated Galerkin matrices."""
    return galerkin_oracle(sigma, N, M) @ galerkin_oracle(tau, N, M)


def is_x_independent(sigma: ScalarSymbol, ks: Sequence[int], samples: int = 7, tol: float = 1e-13) -> bool:
    xs = [2.0 * math.pi * (j + 0.37) / samples for j in range(samples)]
    for k in ks:
        ref = complex(sigma(0.0, k))
        if any(abs(complex(sigma(x, k)) - ref) > tol * max(1.0, abs(ref)) for x in xs):
            return False
    return True


def diagonal_gohberg_oracle(sigma: ScalarSymbol, N: int, K0: int | None = None):
    """Exact tail supremum and singular values for an x-independent symbol.

    Returns ``(d, singular_values)`` where ``d = max_{K0 <= |k| <= N} |sigma(k)|``
    (``K0`` defaults to ``N // 2``) and the singular values are ``|sigma(k)|``
    sorted in decreasing order.
    """
    ks = list(range(-N, N + 1))
    if not is_x_independent(sigma, ks):
        raise ValueError("diagonal oracle only applies to x-independent symbols")
    K0 = N // 2 if K0 is None else K0
    mags = [abs(complex(sigma(0.0, k))) for k in ks]
    d = max(m for k, m in zip(ks, mags) if abs(k) >= K0)
    return d, sorted(mags, reverse=True)


def lattice_oracle(sigma_nx: Callable[[int, float], complex], f: Sequence[complex], M: int) -> np.ndarray:
    """``(1/M) sum_j exp(i n x_j) sigma(n, x_j) sum_m f(m) exp(-i m x_j)`` on ``|n| <= N``."""
    f = list(f)
    N = (len(f) - 1) // 2
    xs = _grid(M)
    Ff = [sum(f[m + N] * cmath.exp(-1j * m * x) for m in range(-N, N + 1)) for x in xs]
    return np.array([sum(cmath.exp(1j * n * x) * complex(sigma_nx(n, x)) * F for x, F in zip(xs, Ff)) / M
                     for n in range(-N, N + 1)])
