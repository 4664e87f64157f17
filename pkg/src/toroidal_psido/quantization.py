"""Quantization of symbols: action on grid functions, Galerkin matrices, lattice operators."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import AliasingError
from .fourier_core import (
    TWO_PI,
    CoeffVector,
    GridFunction,
    forward_transform,
    frequencies,
    grid,
    x_coefficients,
)
from .symbols import LATTICE, TORUS, Symbol, multiplier
from .weights import WeightFunction


@dataclass(frozen=True, eq=False)
class DenseOperator:
    """Complex ``(2N+1) x (2N+1)`` matrix on coefficients ``k, l = -N..N``."""

    matrix: np.ndarray

    def __post_init__(self):
        A = np.array(self.matrix, dtype=complex)
        if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] % 2 != 1:
            raise ValueError(f"expected a square matrix of odd size, got {A.shape}")
        if not np.all(np.isfinite(A)):
            raise ValueError("operator matrix has non-finite entries")
        A.setflags(write=False)
        object.__setattr__(self, "matrix", A)

    @property
    def N(self) -> int:
        return (self.matrix.shape[0] - 1) // 2

    @property
    def freqs(self) -> np.ndarray:
        return frequencies(self.N)

    def __matmul__(self, other):
        if isinstance(other, DenseOperator):
            return DenseOperator(self.matrix @ other.matrix)
        if isinstance(other, CoeffVector):
            return CoeffVector(self.matrix @ other.truncate(self.N).coeffs)
        return self.matrix @ other

    def __add__(self, other: "DenseOperator") -> "DenseOperator":
        return DenseOperator(self.matrix + other.matrix)

    def __sub__(self, other: "DenseOperator") -> "DenseOperator":
        return DenseOperator(self.matrix - other.matrix)

    def interior(self, B: int) -> np.ndarray:
        """Block of rows and columns with ``|k| <= N - B``."""
        n = self.N - B
        if n < 0:
            raise ValueError(f"bandwidth {B} leaves no interior at N={self.N}")
        sl = slice(B, 2 * self.N + 1 - B)
        return self.matrix[sl, sl]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["k", "l", "re", "im"])
            ks = self.freqs
            for a, k in enumerate(ks):
                for b, l in enumerate(ks):
                    z = self.matrix[a, b]
                    w.writerow([k, l, repr(float(z.real)), repr(float(z.imag))])

    @classmethod
    def from_csv(cls, path) -> "DenseOperator":
        rows = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        N = int(rows[:, 0].max())
        A = np.zeros((2 * N + 1, 2 * N + 1), dtype=complex)
        A[rows[:, 0].astype(int) + N, rows[:, 1].astype(int) + N] = rows[:, 2] + 1j * rows[:, 3]
        return cls(A)


def _require_side(s: Symbol, side: str) -> None:
    if s.side != side:
        raise ValueError(f"expected a {side} symbol, got a {s.side} symbol ({s.name})")


def matrix_resolution(s: Symbol, N: int) -> int:
    """x-grid used for Galerkin assembly: the symbol's resolution or the next power of two >= 4N+2."""
    return max(s.resolution, 1 << int(np.ceil(np.log2(4 * N + 2))))


def apply(s: Symbol, f: GridFunction, N: int) -> GridFunction:
    """``x_j -> sum_{|k|<=N} exp(i k x_j) sigma(x_j, k) f_hat(k)`` on the grid of ``f``.

    The grid must resolve ``|k| <= N`` (``M >= 2N+1``); the result is the
    exact value of the quantized operator at the grid points.
    """
    _require_side(s, TORUS)
    fhat = forward_transform(f, N)
    ks = fhat.freqs
    phase = np.exp(1j * np.outer(f.x, ks))
    return GridFunction((phase * s.values(ks, f.M)) @ fhat.coeffs)


def matrix(s: Symbol, N: int) -> DenseOperator:
    """Galerkin matrix with entry ``(k, l) = sigma_hat(k - l, l)``."""
    _require_side(s, TORUS)
    ks = frequencies(N)
    M = matrix_resolution(s, N)
    if s.x_independent:
        return DenseOperator(np.diag(s.values(ks, 1)[0]))
    c = x_coefficients(s.values(ks, M))
    rows = (ks[:, None] - ks[None, :]) % M
    return DenseOperator(np.take_along_axis(c, rows, axis=0))


def x_bandwidth(s: Symbol, N: int, tol: float = 1e-12) -> int:
    """Bandwidth in ``x`` of the columns used by :func:`matrix` at truncation ``N``."""
    from .symbols import x_bandwidth as _bw

    return _bw(s, frequencies(N), tol, matrix_resolution(s, N))


def adjoint_matrix(A: DenseOperator) -> DenseOperator:
    return DenseOperator(A.matrix.conj().T)


def lattice_apply(s: Symbol, f: CoeffVector, M: int) -> CoeffVector:
    """``(T f)(n) = (1/M) sum_j exp(i n x_j) sigma(n, x_j) sum_m f(m) exp(-i m x_j)`` for ``|n| <= N``.

    This is the normalized-measure integral over the circle by M-point
    quadrature.  Sequences live on ``|n| <= N`` with zero extension.
    """
    _require_side(s, LATTICE)
    N = f.N
    if M < 2 * N + 1:
        raise AliasingError(f"lattice quadrature on {M} points cannot resolve |n| <= {N}")
    x = grid(M)
    n = f.freqs
    Ff = np.exp(-1j * np.outer(x, n)) @ f.coeffs
    vals = s.values(n, M)
    return CoeffVector(np.einsum("jn,jn,j->n", np.exp(1j * np.outer(x, n)), vals, Ff) / M)


def lattice_matrix(s: Symbol, N: int, M: int) -> DenseOperator:
    """Matrix of :func:`lattice_apply` on the window, from the quadrature formula in closed form."""
    _require_side(s, LATTICE)
    if M < 2 * N + 1:
        raise AliasingError(f"lattice quadrature on {M} points cannot resolve |n| <= {N}")
    n = frequencies(N)
    c = x_coefficients(s.values(n, M))
    # (1/M) sum_j sigma(n, x_j) exp(-i (m - n) x_j) is the x-coefficient at m - n
    rows = (n[None, :] - n[:, None]) % M
    return DenseOperator(np.take_along_axis(c, rows.T, axis=0).T)


def duality_transfer(s: Symbol) -> Symbol:
    """Torus symbol ``tau(x, k) = conj(sigma(-k, x))`` of a lattice symbol."""
    _require_side(s, LATTICE)
    return s.with_(provider=lambda ks, M: np.conj(s.values(-ks, M)), side=TORUS,
                   name=f"dual[{s.name}]",
                   k_range=None if s.k_range is None else (-s.k_range[1], -s.k_range[0]))


def duality_identity_check(s: Symbol, N: int, M: int) -> float:
    """Max entry-wise gap between ``T_sigma`` and ``F_Z^{-1} T_tau^* F_Z`` on ``|n| <= N``.

    The left side is assembled column by column from :func:`lattice_apply`.
    ``F_Z`` sends ``f`` to a function with Fourier coefficients
    ``(2 pi)^(-1/2) f(-k)``, so the right side is the adjoint of
    ``matrix(tau)`` conjugated by the index flip ``k -> -k``.
    """
    n = frequencies(N)
    eye = np.eye(n.size)
    left = np.column_stack([lattice_apply(s, CoeffVector(eye[:, c]), M).coeffs for c in range(n.size)])
    tau_star = adjoint_matrix(matrix(duality_transfer(s), N)).matrix
    right = tau_star[::-1, ::-1]
    return float(np.abs(left - right).max())


def bessel_potential(s: float, w: WeightFunction) -> Symbol:
    """``J_s`` with symbol ``Lambda(k)^(-s)``."""
    return multiplier(lambda k: w(k) ** (-s), -s, rho=1.0 / w.mu, weight=w, name=f"J[{s}]")


def weighted_operator_norm(A: DenseOperator, w: WeightFunction, s_from: float, s_to: float) -> float:
    """Norm of ``A`` from the ``s_from`` weighted Sobolev space to the ``s_to`` one."""
    lam = w(A.freqs.astype(float))
    B = (lam ** s_to)[:, None] * A.matrix / (lam ** s_from)[None, :]
    return float(np.linalg.norm(B, 2))


def boundedness_trend(sym: Symbol, s: float = 0.0, N_list=(8, 16, 32, 64), growth_tol: float = 0.05) -> dict:
    """Sobolev ``H^s -> H^(s-m)`` norms of the truncations; ``bounded`` if the last step grows < growth_tol."""
    records = [{"N": N, "norm": weighted_operator_norm(matrix(sym, N), sym.weight, s, s - sym.order)}
               for N in N_list]
    norms = [r["norm"] for r in records]
    nondecreasing = all(b >= a * (1 - 1e-10) for a, b in zip(norms, norms[1:]))
    bounded = len(norms) < 2 or norms[-1] <= norms[-2] * (1 + growth_tol)
    return {"records": records, "nondecreasing": nondecreasing, "bounded": bounded}


def coefficient_energy(A: DenseOperator, c: np.ndarray) -> complex:
    """``(A c, c)`` in L2, i.e. ``2 pi <A c, c>`` for coefficient vectors."""
    return complex(TWO_PI * np.vdot(c, A.matrix @ c))
