"""Closed-form spectral quantities and variational gap bounds.

All formulas take the exact operator dimension ``d``; nothing is rounded to
``d +/- 1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ParameterError
from .operators import _check_dim, _check_s

__all__ = [
    "AnalyticEigenpair",
    "BoundCurve",
    "mu0_exact",
    "lemma_spectrum",
    "neumann_spectrum",
    "variational_upper",
    "crossing_point",
    "lambda2_lower",
    "gap_lower_g",
    "gap_floor",
    "block_lower_bound",
    "chain_bound",
    "bound_curve",
]


@dataclass(frozen=True)
class AnalyticEigenpair:
    n: int
    theta: float
    lam: float


def _one_minus_cos(theta: float) -> float:
    # 1 - cos(t) = 2 sin^2(t/2), free of cancellation for small t
    return 2.0 * math.sin(0.5 * theta) ** 2


def mu0_exact(d: int) -> float:
    """Lowest eigenvalue of ``-Lap_d + 1/2 |e1><e1|``: ``1 - cos(pi/(2d+1))``."""
    d = _check_dim(d)
    return _one_minus_cos(math.pi / (2 * d + 1))


def lemma_spectrum(d: int) -> list[AnalyticEigenpair]:
    """All ``d`` eigenvalues of ``-Lap_d + 1/2 |e1><e1|``, ascending.

    The eigenvector for index ``n`` is ``u_k = sin(k theta)``, k = 1..d.
    """
    d = _check_dim(d)
    out = []
    for n in range(1, d + 1):
        theta = (2 * n - 1) * math.pi / (2 * d + 1)
        out.append(AnalyticEigenpair(n, theta, _one_minus_cos(theta)))
    return out


def neumann_spectrum(d: int) -> list[float]:
    """Eigenvalues ``1 - cos(n pi / d)``, n = 0..d-1, of the Neumann Laplacian."""
    d = _check_dim(d)
    return [_one_minus_cos(n * math.pi / d) for n in range(d)]


def crossing_point(d: int) -> float:
    """Where ``s/2`` meets ``(1-s)(d-1)/d``: ``(2d-2)/(3d-2)``."""
    d = _check_dim(d)
    return (2 * d - 2) / (3 * d - 2)


def variational_upper(d: int, s: float) -> float:
    """Upper bound on the ground energy of H0(s) from the trial vectors e1 and
    the normalized constant vector."""
    d = _check_dim(d)
    s = _check_s(s)
    return min(0.5 * s, (1.0 - s) * (d - 1) / d)


def lambda2_lower(d: int, s: float, mu0: float | None = None) -> float:
    """Max-min lower bound ``(1-s) + s mu0`` on the second eigenvalue of H0(s)."""
    s = _check_s(s)
    mu0 = mu0_exact(d) if mu0 is None else mu0
    return (1.0 - s) + s * mu0


def gap_lower_g(d: int, s: float, mu0: float | None = None) -> float:
    """Piecewise lower bound on ``lambda2 - lambda1`` for H0(s).

    ``(2 - 3s)/2 + s mu0`` up to the crossing point, ``(1-s)/d + s mu0`` after.
    """
    d = _check_dim(d)
    s = _check_s(s)
    mu0 = mu0_exact(d) if mu0 is None else mu0
    if s <= crossing_point(d):
        return 0.5 * (2.0 - 3.0 * s) + s * mu0
    return (1.0 - s) / d + s * mu0


def gap_floor(d: int) -> float:
    d = _check_dim(d)
    return 1.0 / (2.0 * d * d)


def block_lower_bound(d: int, s: float, b: float, mu0: float | None = None) -> float:
    """Lower bound ``s mu0 + (1-s)`` on the spectrum of ``build_hj(d, s, b)``.

    Only valid for ``b >= 1``; the value itself does not depend on ``b``.
    """
    if not b >= 1.0:
        raise ParameterError(f"block bound requires b >= 1, got {b}")
    return lambda2_lower(d, s, mu0)


def chain_bound(d: int) -> float:
    """``s_c * mu0``, the minimum of the piecewise bound over ``[0, s_c]``."""
    return crossing_point(d) * mu0_exact(d)


@dataclass(frozen=True)
class BoundCurve:
    d: int
    s: float
    upper_e1: float
    upper_const: float
    upper_min: float
    s_c: float
    mu0: float
    lambda2_lower: float
    gap_lower: float
    block_lower: float
    floor: float


def bound_curve(d: int, s: float, mu0: float | None = None) -> BoundCurve:
    """Every analytic quantity at ``(d, s)``.

    ``mu0`` may be overridden, which the self-test uses to inject a wrong value.
    """
    d = _check_dim(d)
    s = _check_s(s)
    mu0 = mu0_exact(d) if mu0 is None else float(mu0)
    upper_e1 = 0.5 * s
    upper_const = (1.0 - s) * (d - 1) / d
    lam2 = lambda2_lower(d, s, mu0)
    return BoundCurve(
        d=d,
        s=s,
        upper_e1=upper_e1,
        upper_const=upper_const,
        upper_min=min(upper_e1, upper_const),
        s_c=crossing_point(d),
        mu0=mu0,
        lambda2_lower=lam2,
        gap_lower=gap_lower_g(d, s, mu0),
        block_lower=lam2,
        floor=gap_floor(d),
    )
