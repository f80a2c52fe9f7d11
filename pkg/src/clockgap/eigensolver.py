"""Lowest eigenpairs of symmetric tridiagonal matrices.

Eigenvalues come from bisection on the Sturm (LDL^T inertia) count, started
from the Gershgorin interval.  Eigenvectors, when requested, come from inverse
iteration with a partially pivoted tridiagonal LU solve.  The inner loops are
compiled with numba; everything is deterministic.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numba
import numpy as np

from .errors import ConvergenceError, ParameterError
from .operators import TridiagonalOperator

__all__ = [
    "SolverConfig",
    "SpectrumResult",
    "sturm_count",
    "smallest_eigenvalues",
    "two_lowest",
    "inverse_iteration",
]

_EPS = np.finfo(np.float64).eps
_CLUSTER_SEP = 1e-8
_MAX_INVERSE_ITERS = 5


@dataclass(frozen=True)
class SolverConfig:
    abs_tol: float = 1e-12
    max_bisection_iters: int = 200
    want_vectors: bool = False

    def __post_init__(self):
        if not (self.abs_tol > 0 and np.isfinite(self.abs_tol)):
            raise ParameterError(f"abs_tol must be positive, got {self.abs_tol}")
        if self.max_bisection_iters < 60:
            raise ParameterError(
                f"max_bisection_iters must be >= 60, got {self.max_bisection_iters}"
            )


@dataclass(frozen=True, eq=False)
class SpectrumResult:
    eigenvalues: np.ndarray
    abs_tol: float
    dim: int
    eigenvectors: Optional[np.ndarray] = field(default=None)
    """Shape ``(k, dim)``; row ``i`` pairs with ``eigenvalues[i]``."""

    def __len__(self):
        return self.eigenvalues.size


def _pivmin(T: TridiagonalOperator) -> float:
    return _EPS * max(T.norm_inf(), 1.0)


@numba.njit(cache=True)
def _count(diag, off2, x, pivmin):
    # Number of negative pivots of T - xI; a pivot with |q| < pivmin is
    # replaced by +/-pivmin, zero going to +pivmin so exact hits count as ">= x".
    n = diag.size
    count = 0
    q = diag[0] - x
    for i in range(n):
        if i > 0:
            q = (diag[i] - x) - off2[i - 1] / q
        if q < 0.0:
            if q > -pivmin:
                q = -pivmin
            count += 1
        elif q < pivmin:
            q = pivmin
    return count


@numba.njit(cache=True)
def _bisect(diag, off2, k, lo, hi, abs_tol, max_iter, pivmin, lower, upper):
    # lower[i] / upper[i] bracket the i-th smallest eigenvalue; every Sturm
    # count tightens all k brackets.  Returns the failing index or -1.
    for i in range(k):
        lower[i] = lo
        upper[i] = hi
    for i in range(k):
        it = 0
        while upper[i] - lower[i] > 2.0 * abs_tol:
            if it >= max_iter:
                return i
            mid = 0.5 * (lower[i] + upper[i])
            if mid <= lower[i] or mid >= upper[i]:
                return i
            c = _count(diag, off2, mid, pivmin)
            for j in range(k):
                if j < c:
                    if mid < upper[j]:
                        upper[j] = mid
                elif mid > lower[j]:
                    lower[j] = mid
            it += 1
    return -1


@numba.njit(cache=True)
def _shifted_solve(diag, off, shift, rhs, tiny):
    # Solve (T - shift I) x = rhs with partial pivoting (LU with one extra
    # upper band, as in LAPACK gttrf/gttrs); zero pivots become `tiny`.
    n = diag.size
    d = diag - shift
    du = off.copy()
    dl = off.copy()
    du2 = np.zeros(max(n - 2, 0))
    ipiv = np.zeros(n - 1, dtype=np.bool_)
    x = rhs.copy()
    for i in range(n - 1):
        if abs(d[i]) >= abs(dl[i]):
            if d[i] == 0.0:
                d[i] = tiny
            fact = dl[i] / d[i]
            dl[i] = fact
            d[i + 1] -= fact * du[i]
        else:
            fact = d[i] / dl[i]
            d[i] = dl[i]
            dl[i] = fact
            temp = du[i]
            du[i] = d[i + 1]
            d[i + 1] = temp - fact * d[i + 1]
            if i < n - 2:
                du2[i] = du[i + 1]
                du[i + 1] = -fact * du[i + 1]
            ipiv[i] = True
    if d[n - 1] == 0.0:
        d[n - 1] = tiny
    for i in range(n - 1):
        if ipiv[i]:
            temp = x[i]
            x[i] = x[i + 1]
            x[i + 1] = temp - dl[i] * x[i + 1]
        else:
            x[i + 1] -= dl[i] * x[i]
    x[n - 1] /= d[n - 1]
    if n > 1:
        x[n - 2] = (x[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2]
    for i in range(n - 3, -1, -1):
        x[i] = (x[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i]
    return x


def sturm_count(T: TridiagonalOperator, x: float) -> int:
    """Number of eigenvalues of ``T`` strictly less than ``x``."""
    x = float(x)
    if not np.isfinite(x):
        raise ParameterError(f"shift must be finite, got {x}")
    return int(_count(T.diag, T.offdiag**2, x, _pivmin(T)))


def inverse_iteration(T: TridiagonalOperator, eigenvalues, abs_tol: float = 1e-12) -> np.ndarray:
    """Unit eigenvectors for the given (accurate) eigenvalues, one per row.

    Vectors whose eigenvalues lie within 1e-8 of an earlier one are
    Gram-Schmidt orthogonalized against it after every solve.
    """
    lam = np.asarray(eigenvalues, dtype=np.float64)
    n = T.dim
    norm = max(T.norm_inf(), 1.0)
    tiny = _EPS * norm
    target = 1e-12 * (norm + np.abs(lam).max(initial=0.0)) + abs_tol
    rng = np.random.default_rng(20240613)
    vecs = np.empty((lam.size, n))
    for i, mu in enumerate(lam):
        cluster = [j for j in range(i) if abs(lam[j] - mu) < _CLUSTER_SEP]
        x = rng.standard_normal(n)
        x /= np.linalg.norm(x)
        for _ in range(_MAX_INVERSE_ITERS):
            y = _shifted_solve(T.diag, T.offdiag, mu, x, tiny)
            for j in cluster:
                y -= (vecs[j] @ y) * vecs[j]
            nrm = np.linalg.norm(y)
            if not np.isfinite(nrm) or nrm == 0.0:
                y = rng.standard_normal(n)
                nrm = np.linalg.norm(y)
            x = y / nrm
            if np.linalg.norm(T @ x - mu * x) <= target:
                break
        vecs[i] = x
    return vecs


def smallest_eigenvalues(
    T: TridiagonalOperator, k: int, cfg: SolverConfig | None = None
) -> SpectrumResult:
    """The ``k`` smallest eigenvalues, each bracketed to half-width ``cfg.abs_tol``.

    Raises :class:`ConvergenceError` if a bracket cannot be narrowed within
    ``cfg.max_bisection_iters`` Sturm counts (e.g. ``abs_tol`` below the
    floating-point spacing of the eigenvalue).
    """
    cfg = cfg or SolverConfig()
    if int(k) != k or not 1 <= k <= T.dim:
        raise ParameterError(f"k must satisfy 1 <= k <= {T.dim}, got {k}")
    k = int(k)
    lo, hi = T.gershgorin()
    # widen by a few ulps so the end points strictly enclose the spectrum
    pad = 4 * _EPS * max(abs(lo), abs(hi), 1.0)
    lo, hi = lo - pad, hi + pad
    lower = np.empty(k)
    upper = np.empty(k)
    failed = _bisect(
        T.diag, T.offdiag**2, k, lo, hi, cfg.abs_tol,
        cfg.max_bisection_iters, _pivmin(T), lower, upper,
    )
    if failed >= 0:
        raise ConvergenceError(
            f"eigenvalue {failed} not bracketed to {cfg.abs_tol:g} "
            f"within {cfg.max_bisection_iters} iterations",
            bracket=(float(lower[failed]), float(upper[failed])),
            index=int(failed),
        )
    values = 0.5 * (lower + upper)
    values.setflags(write=False)
    vectors = inverse_iteration(T, values, cfg.abs_tol) if cfg.want_vectors else None
    return SpectrumResult(values, cfg.abs_tol, T.dim, vectors)


def two_lowest(T: TridiagonalOperator, cfg: SolverConfig | None = None) -> tuple[float, float]:
    res = smallest_eigenvalues(T, 2, cfg)
    return float(res.eigenvalues[0]), float(res.eigenvalues[1])
