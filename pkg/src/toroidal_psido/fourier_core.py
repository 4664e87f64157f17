"""Discrete Fourier conventions on the circle and on the integer lattice.

Convention used throughout the package (no other is ever mixed in)::

    f_hat(k) = (1 / 2pi) * integral_0^{2pi} exp(-i k x) f(x) dx
    f(x)     = sum_k exp(i k x) f_hat(k)

so that the quantization ``T_sigma f(x) = sum_k exp(ikx) sigma(x, k) f_hat(k)``
reduces to the identity for ``sigma = 1``.  The circle is parameterized by
``[0, 2pi)`` and sampled on the uniform grid ``x_j = 2 pi j / M``.

Norms use Lebesgue measure on ``[0, 2pi)``, hence ``||1||_{L2} = sqrt(2 pi)``.
The lattice Fourier transform ``F_Z`` is normalized to be unitary from
``l2(Z)`` onto ``L2(T)`` with that measure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AliasingError

TWO_PI = 2.0 * np.pi


def grid(M: int) -> np.ndarray:
    """Uniform grid ``2 pi j / M`` for ``j = 0..M-1``."""
    if M < 1:
        raise ValueError(f"grid size must be positive, got {M}")
    return TWO_PI * np.arange(M) / M


def frequencies(N: int) -> np.ndarray:
    """Symmetric integer frequency window ``-N..N``."""
    if N < 0:
        raise ValueError(f"truncation radius must be nonnegative, got {N}")
    return np.arange(-N, N + 1)


def fft_frequencies(M: int) -> np.ndarray:
    """Signed integer frequency attached to each slot of a length-M FFT."""
    return np.fft.fftfreq(M, d=1.0 / M).round().astype(int)


def _check_band(M: int, N: int) -> None:
    if M < 2 * N + 1:
        raise AliasingError(f"grid of {M} points cannot resolve frequencies |k| <= {N} (need M >= {2 * N + 1})")


@dataclass(frozen=True)
class GridFunction:
    """Periodic function sampled at ``x_j = 2 pi j / M``."""

    samples: np.ndarray

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=complex).reshape(-1)
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    @property
    def M(self) -> int:
        return self.samples.shape[0]

    @property
    def x(self) -> np.ndarray:
        return grid(self.M)

    @classmethod
    def from_function(cls, func, M: int) -> "GridFunction":
        return cls(np.broadcast_to(func(grid(M)), (M,)))

    def __add__(self, other: "GridFunction") -> "GridFunction":
        return GridFunction(self.samples + other.samples)

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        return GridFunction(self.samples - other.samples)

    def __mul__(self, scalar) -> "GridFunction":
        return GridFunction(self.samples * scalar)

    __rmul__ = __mul__


@dataclass(frozen=True)
class CoeffVector:
    """Coefficients indexed by ``k = -N..N`` (stored in that order)."""

    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=complex).reshape(-1)
        if coeffs.shape[0] % 2 != 1:
            raise ValueError("coefficient vector must have odd length 2N+1")
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def N(self) -> int:
        return (self.coeffs.shape[0] - 1) // 2

    @property
    def freqs(self) -> np.ndarray:
        return frequencies(self.N)

    def at(self, k: int) -> complex:
        if abs(k) > self.N:
            return 0j
        return complex(self.coeffs[k + self.N])

    def truncate(self, N: int) -> "CoeffVector":
        """Restrict to ``|k| <= N`` or zero-extend when ``N`` exceeds the current radius."""
        out = np.zeros(2 * N + 1, dtype=complex)
        r = min(N, self.N)
        out[N - r:N + r + 1] = self.coeffs[self.N - r:self.N + r + 1]
        return CoeffVector(out)

    @classmethod
    def from_mapping(cls, values: dict, N: int) -> "CoeffVector":
        out = np.zeros(2 * N + 1, dtype=complex)
        for k, v in values.items():
            out[int(k) + N] = v
        return cls(out)

    def __add__(self, other: "CoeffVector") -> "CoeffVector":
        N = max(self.N, other.N)
        return CoeffVector(self.truncate(N).coeffs + other.truncate(N).coeffs)

    def __sub__(self, other: "CoeffVector") -> "CoeffVector":
        N = max(self.N, other.N)
        return CoeffVector(self.truncate(N).coeffs - other.truncate(N).coeffs)

    def __mul__(self, scalar) -> "CoeffVector":
        return CoeffVector(self.coeffs * scalar)

    __rmul__ = __mul__


def forward_transform(f: GridFunction, N: int) -> CoeffVector:
    """Coefficients ``(1/M) sum_j f(x_j) exp(-i k x_j)`` for ``|k| <= N``."""
    _check_band(f.M, N)
    full = np.fft.fft(f.samples) / f.M
    return CoeffVector(full[frequencies(N) % f.M])


def inverse_transform(c: CoeffVector, M: int) -> GridFunction:
    """Samples of ``sum_{|k|<=N} c(k) exp(i k x)`` on the M-point grid."""
    _check_band(M, c.N)
    full = np.zeros(M, dtype=complex)
    full[c.freqs % M] = c.coeffs
    return GridFunction(np.fft.ifft(full) * M)


def l2_norm(f: GridFunction) -> float:
    """``(2 pi / M * sum_j |f(x_j)|^2)^(1/2)``."""
    return float(np.sqrt(TWO_PI / f.M * np.sum(np.abs(f.samples) ** 2)))


def coefficient_l2_norm(c: CoeffVector) -> float:
    """L2 norm of ``sum_k c(k) e^{ikx}`` computed on the coefficient side (Plancherel)."""
    return float(np.sqrt(TWO_PI * np.sum(np.abs(c.coeffs) ** 2)))


def spectral_derivative(f: GridFunction, order: int = 1, N: int | None = None) -> GridFunction:
    """Multiply coefficients by ``(ik)^order`` and transform back.

    ``N`` defaults to the largest band the grid resolves, ``(M - 1) // 2``.
    """
    if order < 0:
        raise ValueError("derivative order must be nonnegative")
    if N is None:
        N = (f.M - 1) // 2
    c = forward_transform(f, N)
    return inverse_transform(CoeffVector(c.coeffs * (1j * c.freqs) ** order), f.M)


def x_coefficients(values: np.ndarray) -> np.ndarray:
    """FFT coefficients along axis 0 of an ``(M, ...)`` array of grid samples.

    Slot ``j`` holds the coefficient of ``exp(i * fft_frequencies(M)[j] * x)``.
    """
    return np.fft.fft(values, axis=0) / values.shape[0]


def from_x_coefficients(coeffs: np.ndarray) -> np.ndarray:
    """Inverse of :func:`x_coefficients`."""
    return np.fft.ifft(coeffs, axis=0) * coeffs.shape[0]


def trig_interpolate(coeffs: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Evaluate the trigonometric polynomial with FFT-ordered ``coeffs`` at points ``x``.

    ``coeffs`` has shape ``(M,)`` or ``(M, n)``; the result has shape
    ``x.shape`` or ``x.shape + (n,)``.  For even ``M`` the Nyquist
    coefficient is split evenly between ``+-M/2`` so real data stays real.
    """
    M = coeffs.shape[0]
    x = np.asarray(x, dtype=float)
    freq = fft_frequencies(M).astype(float)
    c = np.array(coeffs, dtype=complex)
    out = np.exp(1j * np.multiply.outer(x, freq)) @ c
    if M % 2 == 0:
        half = 0.5 * c[M // 2]
        # slot M/2 was evaluated at -M/2 with full weight; move half to +M/2
        shift = np.exp(1j * (M // 2) * x) - np.exp(-1j * (M // 2) * x)
        out = out + np.multiply.outer(shift, half)
    return out


def lattice_fourier(f: CoeffVector, M: int) -> GridFunction:
    """Unitary ``F_Z f(x) = (2 pi)^(-1/2) sum_n f(n) exp(-i n x)`` sampled on the M-grid."""
    _check_band(M, f.N)
    x = grid(M)
    n = f.freqs
    return GridFunction(np.exp(-1j * np.outer(x, n)) @ f.coeffs / np.sqrt(TWO_PI))


def inverse_lattice_fourier(g: GridFunction, N: int) -> CoeffVector:
    """``(F_Z^{-1} g)(n) = (2 pi)^(-1/2) integral exp(i n x) g(x) dx`` by M-point quadrature."""
    _check_band(g.M, N)
    n = frequencies(N)
    weights = TWO_PI / g.M
    return CoeffVector(np.exp(1j * np.outer(n, g.x)) @ g.samples * weights / np.sqrt(TWO_PI))
