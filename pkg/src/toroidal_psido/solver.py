"""Galerkin solves of ``(T_sigma + lambda) u = f`` on the circle.

The iterative path is GMRES with a two-level left preconditioner: the
parametrix matrix on ``|k| >= 2R`` and an exact dense solve on the cutoff band
``|k| < 2R``, where the parametrix symbol vanishes by construction.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse.linalg as spla

from .calculus import parametrix, strong_m_ellipticity
from .diagnostics import garding_constants
from .errors import NotEllipticError, PreconditionError, SolverFailure
from .fourier_core import (
    CoeffVector,
    GridFunction,
    coefficient_l2_norm,
    forward_transform,
    frequencies,
    inverse_transform,
)
from .quantization import apply, matrix, matrix_resolution
from .reports import ReportMixin
from .symbols import Symbol, x_bandwidth


@dataclass
class SolveResult(ReportMixin):
    u: GridFunction
    coeffs: CoeffVector
    residual: float
    relative_residual: float
    iterations: int
    preconditioned: bool
    method: str
    lam: float
    converged: bool = True
    condition: float | None = None

    def to_dict(self) -> dict:
        d = super().to_dict()
        d.pop("u")
        d.pop("coeffs")
        d["N"] = self.coeffs.N
        return d


def lambda0_estimate(s: Symbol, m: float, N_list=(16, 32, 64), **options) -> float:
    """Shift ``lambda_0 = C1`` from the Garding constants; requires strong ellipticity."""
    report = strong_m_ellipticity(s, max(max(N_list), 32))
    if not report.is_elliptic:
        raise NotEllipticError(f"{s.name} is not strongly elliptic (best lower constant {report.C:.3g})")
    return float(garding_constants(s, m, N_list, **options).require().C1)


def galerkin_residual(s: Symbol, lam: float, u: CoeffVector, f: CoeffVector) -> float:
    """L2 norm of the ``|k| <= N`` part of ``T_sigma u + lambda u - f``, evaluated through :func:`apply`."""
    N = u.N
    B = x_bandwidth(s, frequencies(N), M=matrix_resolution(s, N))
    M = 1 << int(np.ceil(np.log2(2 * (N + B) + 2)))
    ug = inverse_transform(u, M)
    r = apply(s, ug, N) + ug * lam - inverse_transform(f.truncate(N), M)
    return coefficient_l2_norm(forward_transform(r, N))


def two_level_preconditioner(s: Symbol, A: np.ndarray, L: int = 2) -> tuple[np.ndarray, int]:
    """``P = T (I - Pi) + Pi A_low^{-1} Pi`` with ``T`` the parametrix matrix and ``Pi`` the band ``|k| < 2R``."""
    N = (A.shape[0] - 1) // 2
    par = parametrix(s, L)
    T = matrix(par.symbol, N).matrix
    low = np.abs(frequencies(N)) < 2 * par.R
    P = T.copy()
    P[:, low] = 0.0
    idx = np.flatnonzero(low)
    P[np.ix_(idx, idx)] += np.linalg.inv(A[np.ix_(idx, idx)])
    return P, par.R


def solve(s: Symbol, lam: float, f: GridFunction, N: int, tol: float = 1e-10, precondition: bool = False,
          method: str | None = None, L: int = 2, lambda0: float | None = None, m: float | None = None,
          check_lambda: bool = False, force: bool = False, maxiter: int = 500) -> SolveResult:
    """Solve the truncated system ``(matrix(sigma, N) + lambda) u_hat = f_hat``.

    ``method`` is ``"direct"`` (dense LU) or ``"gmres"``; it defaults to
    GMRES when ``precondition`` is set and to the direct solve otherwise.
    With ``check_lambda`` the shift is compared against ``lambda0`` (computed
    if not given); a shift below it raises unless ``force`` is set, in which
    case only a warning is issued.  The reported residual is recomputed
    through :func:`apply`, not through the solve matrix.
    """
    method = method or ("gmres" if precondition else "direct")
    if method not in ("direct", "gmres"):
        raise ValueError("method must be 'direct' or 'gmres'")
    if check_lambda:
        if lambda0 is None:
            lambda0 = lambda0_estimate(s, s.order / 2 if m is None else m)
        if lam < lambda0 - 1e-12:
            msg = f"shift {lam} is below the coercivity threshold {lambda0}"
            if not force:
                raise PreconditionError(msg)
            warnings.warn(msg, stacklevel=2)

    fhat = forward_transform(f, N)
    A = matrix(s, N).matrix + lam * np.eye(2 * N + 1)
    b = fhat.coeffs
    f_norm = coefficient_l2_norm(fhat)
    condition = None

    if method == "direct":
        condition = float(np.linalg.cond(A))
        if not np.isfinite(condition) or condition > 1e14:
            raise SolverFailure(f"system is numerically singular (condition {condition:.3g})", condition=condition)
        uhat = np.linalg.solve(A, b)
        iterations, converged = 1, True
    else:
        if precondition:
            P, _ = two_level_preconditioner(s, A, L)
        else:
            P = np.eye(A.shape[0])
        count = [0]

        def tick(_):
            count[0] += 1

        op = spla.LinearOperator(A.shape, matvec=lambda v: P @ (A @ v), dtype=complex)
        rhs = P @ b
        uhat, info = spla.gmres(op, rhs, rtol=tol * 1e-2, atol=0.0, restart=maxiter, maxiter=maxiter,
                                callback=tick, callback_type="pr_norm")
        iterations, converged = max(count[0], 1), info == 0

    u = CoeffVector(uhat)
    residual = galerkin_residual(s, lam, u, fhat)
    rel = residual / f_norm if f_norm > 0 else residual
    result = SolveResult(inverse_transform(u, f.M), u, residual, rel, iterations, precondition, method, lam,
                         converged and rel <= tol, condition)
    if not converged:
        raise SolverFailure(f"GMRES did not converge in {maxiter} iterations (relative residual {rel:.3g})",
                            partial=result)
    return result


@dataclass
class UniquenessReport(ReportMixin):
    sigma_min: float
    unique: bool
    N: int
    lower_bound: float | None = None


def uniqueness_check(s: Symbol, lam: float, N: int, tol: float = 1e-10, C0: float | None = None,
                     m: float | None = None) -> UniquenessReport:
    """Smallest singular value of ``matrix(sigma, N) + lambda``; ``unique`` when it exceeds ``tol``.

    When ``C0`` is given, ``lower_bound = C0 * min_k Lambda(k)^(2m)`` is the
    value the Garding inequality predicts.
    """
    A = matrix(s, N).matrix + lam * np.eye(2 * N + 1)
    smin = float(np.linalg.svd(A, compute_uv=False)[-1])
    bound = None
    if C0 is not None:
        m = s.order / 2 if m is None else m
        bound = float(C0 * (s.weight(frequencies(N).astype(float)) ** (2 * m)).min())
    return UniquenessReport(smin, smin > tol, N, bound)
