"""Clock-model operators stored as symmetric tridiagonal (diag, offdiag) pairs.

Every Hamiltonian here has the form

    s * (-Lap_d) + (1 - s) * I + c * |e1><e1|

where ``-Lap_d`` is the Neumann discrete Laplacian (diagonal 1/2, 1, ..., 1, 1/2
and off-diagonal -1/2).  Vectors are plain 1-D float arrays; index 0 is the
first site ``e1``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import DimensionError, ParameterError

__all__ = [
    "TridiagonalOperator",
    "ClockFamilySpec",
    "build_neumann_laplacian",
    "build_h0",
    "build_hj",
    "quadratic_form",
    "difference_energy",
    "eigen_residuals",
    "basis_vector",
    "constant_vector",
]


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=np.float64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class TridiagonalOperator:
    """Real symmetric tridiagonal matrix.

    ``offdiag[i]`` couples sites ``i`` and ``i + 1`` in both directions.
    Arrays are copied and made read-only on construction.
    """

    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        diag = _frozen(self.diag)
        offdiag = _frozen(self.offdiag)
        if diag.ndim != 1 or offdiag.ndim != 1:
            raise DimensionError("diag and offdiag must be 1-D")
        if diag.size < 2:
            raise DimensionError(f"dimension must be >= 2, got {diag.size}")
        if offdiag.size != diag.size - 1:
            raise DimensionError(
                f"offdiag has length {offdiag.size}, expected {diag.size - 1}"
            )
        if not (np.all(np.isfinite(diag)) and np.all(np.isfinite(offdiag))):
            raise ParameterError("operator entries must be finite")
        object.__setattr__(self, "diag", diag)
        object.__setattr__(self, "offdiag", offdiag)

    @property
    def dim(self) -> int:
        return self.diag.size

    def matvec(self, u) -> np.ndarray:
        u = _as_vector(u, self.dim)
        out = self.diag * u
        out[:-1] += self.offdiag * u[1:]
        out[1:] += self.offdiag * u[:-1]
        return out

    __matmul__ = matvec

    def gershgorin(self) -> tuple[float, float]:
        """Interval containing every eigenvalue."""
        radius = np.zeros(self.dim)
        off = np.abs(self.offdiag)
        radius[:-1] += off
        radius[1:] += off
        return float(np.min(self.diag - radius)), float(np.max(self.diag + radius))

    def norm_inf(self) -> float:
        off = np.abs(self.offdiag)
        rows = np.abs(self.diag)
        rows[:-1] += off
        rows[1:] += off
        return float(rows.max())

    def to_dense(self) -> np.ndarray:
        """Dense copy, for small-d cross-checks only."""
        return (
            np.diag(self.diag)
            + np.diag(self.offdiag, 1)
            + np.diag(self.offdiag, -1)
        )

    def __eq__(self, other):
        if not isinstance(other, TridiagonalOperator):
            return NotImplemented
        return np.array_equal(self.diag, other.diag) and np.array_equal(
            self.offdiag, other.offdiag
        )

    __hash__ = None


def _as_vector(u, dim: int | None = None) -> np.ndarray:
    u = np.asarray(u, dtype=np.float64)
    if u.ndim != 1:
        raise DimensionError("vector must be 1-D")
    if dim is not None and u.size != dim:
        raise DimensionError(f"vector has length {u.size}, expected {dim}")
    if not np.all(np.isfinite(u)):
        raise ParameterError("vector entries must be finite")
    return u


def _check_dim(d) -> int:
    if int(d) != d:
        raise DimensionError(f"dimension must be an integer, got {d!r}")
    d = int(d)
    if d < 2:
        raise DimensionError(f"dimension must be >= 2, got {d}")
    return d


def _check_s(s) -> float:
    s = float(s)
    if not 0.0 <= s <= 1.0:
        raise ParameterError(f"s must lie in [0, 1], got {s}")
    return s


def basis_vector(d: int, k: int = 0) -> np.ndarray:
    """``e_{k+1}`` in 0-based indexing; ``basis_vector(d)`` is ``e1``."""
    e = np.zeros(_check_dim(d))
    e[k] = 1.0
    return e


def constant_vector(d: int) -> np.ndarray:
    """Normalized constant vector with entries ``1/sqrt(d)``."""
    d = _check_dim(d)
    return np.full(d, 1.0 / np.sqrt(d))


def build_neumann_laplacian(d: int) -> TridiagonalOperator:
    d = _check_dim(d)
    diag = np.ones(d)
    diag[0] = diag[-1] = 0.5
    return TridiagonalOperator(diag, np.full(d - 1, -0.5))


def build_hj(d: int, s: float, b: float) -> TridiagonalOperator:
    """Block Hamiltonian ``s(-Lap) + (1-s)I + (b - (1-s))|e1><e1|``.

    Only the first diagonal entry depends on ``b``; it equals ``s/2 + b``.
    """
    d = _check_dim(d)
    s = _check_s(s)
    b = float(b)
    if not (b >= 0.0 and np.isfinite(b)):
        raise ParameterError(f"boundary weight b must be finite and >= 0, got {b}")
    diag = np.ones(d)
    diag[-1] = 1.0 - 0.5 * s
    diag[0] = 0.5 * s + b
    return TridiagonalOperator(diag, np.full(d - 1, -0.5 * s))


def build_h0(d: int, s: float) -> TridiagonalOperator:
    """``s(-Lap) + (1-s)I - (1-s)|e1><e1|``, i.e. :func:`build_hj` with b = 0."""
    return build_hj(d, s, 0.0)


def quadratic_form(T: TridiagonalOperator, u) -> float:
    u = _as_vector(u, T.dim)
    return float(u @ (T @ u))


def difference_energy(u) -> float:
    """Half the squared norm of the forward differences ``u_k - u_{k+1}``."""
    u = _as_vector(u)
    if u.size < 2:
        raise DimensionError("difference_energy needs at least 2 entries")
    du = np.diff(u)
    return 0.5 * float(du @ du)


def eigen_residuals(d: int, s: float, b: float, lam: float, u) -> tuple[float, float, float]:
    """Residuals of the clock recurrence and its two boundary conditions.

    With sites numbered ``1..d`` the eigen-equation of ``build_hj(d, s, b)`` is

        (s/2)(u_{k-1} + u_{k+1}) = (1 - lam) u_k          k = 2..d-1
        u_1 (b + s/2 - lam)      = (s/2) u_2
        (1 - s/2 - lam) u_d      = (s/2) u_{d-1}

    This is the single place where 1-based site labels are translated: site
    ``k`` lives at array index ``k - 1``.  Returns ``(interior, left, right)``
    absolute residuals; ``interior`` is the max over k and is 0 when d = 2.
    """
    d = _check_dim(d)
    u = _as_vector(u, d)
    half = 0.5 * s
    if d > 2:
        interior = half * (u[:-2] + u[2:]) - (1.0 - lam) * u[1:-1]
        interior_res = float(np.max(np.abs(interior)))
    else:
        interior_res = 0.0
    left = abs(u[0] * (b + half - lam) - half * u[1])
    right = abs((1.0 - half - lam) * u[d - 1] - half * u[d - 2])
    return interior_res, float(left), float(right)


@dataclass(frozen=True)
class ClockFamilySpec:
    """Block-diagonal family: dimension plus ``(b, multiplicity)`` entries.

    Exactly one entry is the ``b = 0`` block with multiplicity 1; every other
    weight must be >= 1.  Entries are normalized to sorted, merged form so
    equal weights collapse into one entry with summed multiplicity.
    """

    dim: int
    blocks: tuple[tuple[float, int], ...]

    def __post_init__(self):
        dim = _check_dim(self.dim)
        merged: dict[float, int] = {}
        for b, mult in self.blocks:
            b = float(b)
            if int(mult) != mult or mult < 1:
                raise ParameterError(f"multiplicity must be a positive integer, got {mult!r}")
            if not np.isfinite(b) or b < 0:
                raise ParameterError(f"boundary weight must be finite and >= 0, got {b}")
            if 0.0 < b < 1.0:
                raise ParameterError(f"non-zero boundary weights must be >= 1, got {b}")
            merged[b] = merged.get(b, 0) + int(mult)
        if not merged:
            raise ParameterError("family needs at least one block")
        if merged.get(0.0) != 1:
            raise ParameterError(
                "family must contain the b = 0 block exactly once, "
                f"found multiplicity {merged.get(0.0, 0)}"
            )
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "blocks", tuple(sorted(merged.items())))

    @classmethod
    def from_weights(cls, dim: int, weights: Iterable) -> "ClockFamilySpec":
        """Family with the implicit ``b = 0`` block prepended.

        ``weights`` items are either a weight ``b`` or a ``(b, multiplicity)`` pair.
        """
        blocks = [(0.0, 1)]
        for w in weights:
            if isinstance(w, tuple):
                blocks.append((float(w[0]), int(w[1])))
            else:
                blocks.append((float(w), 1))
        return cls(dim, tuple(blocks))

    def with_dim(self, dim: int) -> "ClockFamilySpec":
        return ClockFamilySpec(dim, self.blocks)

    @property
    def nonzero_blocks(self) -> tuple[tuple[float, int], ...]:
        return tuple((b, m) for b, m in self.blocks if b != 0.0)

    @property
    def total_blocks(self) -> int:
        return sum(m for _, m in self.blocks)

    def label(self) -> str:
        parts = []
        for b, m in self.nonzero_blocks:
            txt = f"{b:g}"
            parts.append(txt if m == 1 else f"{txt}x{m}")
        return ",".join(parts) if parts else "h0"
