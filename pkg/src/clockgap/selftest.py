"""Small-d invariant suite behind ``clockgap selftest``.

Each check returns a :class:`CheckResult`; a check never raises for a failed
comparison.  ``mu0_error`` scales every use of the closed-form ground energy
by ``1 + mu0_error`` so the suite can be shown to catch a wrong value.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import bounds
from .certifier import certify_rows, family_two_lowest, sweep
from .eigensolver import SolverConfig, smallest_eigenvalues
from .operators import (
    ClockFamilySpec,
    build_h0,
    build_hj,
    build_neumann_laplacian,
    difference_energy,
    eigen_residuals,
    quadratic_form,
)

SMALL_DIMS = range(2, 13)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _result(name, worst, limit, what="max error"):
    return CheckResult(name, bool(worst <= limit), f"{what} {worst:.3e} (limit {limit:.1e})")


def run_selftest(tol: float = 1e-12, mu0_error: float = 0.0) -> list[CheckResult]:
    cfg = SolverConfig(abs_tol=tol)
    vcfg = SolverConfig(abs_tol=tol, want_vectors=True)
    val_limit = max(1e-10, 100.0 * tol)
    res_limit = max(1e-9, 100.0 * tol)

    def mu0(d):
        return bounds.mu0_exact(d) * (1.0 + mu0_error)

    out = []

    worst = 0.0
    for d in SMALL_DIMS:
        T = build_neumann_laplacian(d)
        got = smallest_eigenvalues(T, d, cfg).eigenvalues
        worst = max(worst, np.abs(got - np.linalg.eigvalsh(T.to_dense())).max())
        worst = max(worst, np.abs(got - bounds.neumann_spectrum(d)).max())
    out.append(_result("neumann spectrum vs closed form and dense", worst, val_limit))

    worst = 0.0
    for d in SMALL_DIMS:
        got = smallest_eigenvalues(build_hj(d, 1.0, 0.5), d, cfg).eigenvalues
        expect = np.array([p.lam for p in bounds.lemma_spectrum(d)])
        expect[0] = mu0(d)
        worst = max(worst, np.abs(got - expect).max())
    out.append(_result("boundary-loaded spectrum vs closed form", worst, val_limit))

    worst = 0.0
    for d in (2, 3, 7, 12):
        for s in (0.0, 0.3, 0.65, 1.0):
            for b in (0.0, 0.5, 1.0, 3.0):
                T = build_hj(d, s, b)
                r = smallest_eigenvalues(T, d, vcfg)
                scale = T.norm_inf() + np.abs(r.eigenvalues).max()
                for lam, u in zip(r.eigenvalues, r.eigenvectors):
                    worst = max(worst, max(eigen_residuals(d, s, b, lam, u)) / scale)
                    worst = max(worst, np.linalg.norm(T @ u - lam * u) / scale)
    out.append(_result("eigenpair residuals", worst, res_limit, "max scaled residual"))

    low_upper = high_lower = low_gap = 0.0
    for d in range(3, 13):
        for row in sweep(d, None, 51, cfg):
            m = mu0(d)
            low_upper = max(low_upper, row.lambda1 - row.upper_min)
            high_lower = max(high_lower, bounds.lambda2_lower(d, row.s, m) - row.lambda2)
            low_gap = max(low_gap, bounds.gap_lower_g(d, row.s, m) - row.gap)
    out.append(_result("lambda1 <= trial-vector bound", low_upper, res_limit, "max violation"))
    out.append(_result("lambda2 >= max-min bound", high_lower, res_limit, "max violation"))
    out.append(_result("gap >= piecewise bound", low_gap, res_limit, "max violation"))

    above = all(mu0(d) > 1.0 / d**2 for d in range(5, 200))
    below = all(mu0(d) < 1.0 / d**2 for d in (2, 3, 4))
    out.append(CheckResult(
        "mu0 vs 1/d^2 threshold at d = 5",
        above and below,
        f"mu0 > 1/d^2 for 5..199: {above}; mu0 < 1/d^2 for 2..4: {below}",
    ))

    rng = np.random.default_rng(7)
    worst = 0.0
    for d in (2, 5, 17):
        T = build_neumann_laplacian(d)
        for _ in range(50):
            u = rng.standard_normal(d)
            worst = max(worst, abs(quadratic_form(T, u) - difference_energy(u)) / (u @ u))
    out.append(_result("difference-operator factorization", worst, 1e-12))

    worst = 0.0
    for d in (3, 6, 11):
        T = build_h0(d, 0.4)
        lam1 = smallest_eigenvalues(T, 1, cfg).eigenvalues[0]
        for _ in range(50):
            u = rng.standard_normal(d)
            worst = max(worst, lam1 - quadratic_form(T, u) / (u @ u))
    out.append(_result("ground energy below Rayleigh quotients", worst, tol, "max violation"))

    ident = blk = 0.0
    for d in (3, 8):
        spec = ClockFamilySpec.from_weights(d, [1.0, 2.0, (7.0, 2)])
        for s in np.linspace(0.0, 1.0, 21):
            big1, big2 = family_two_lowest(spec, s, cfg)
            lam1 = smallest_eigenvalues(build_h0(d, s), 1, cfg).eigenvalues[0]
            ident = max(ident, abs(big1 - lam1))
            blk = max(blk, bounds.lambda2_lower(d, s, mu0(d)) - big2)
    out.append(_result("family ground energy equals H0's", ident, 2.0 * tol + 1e-15))
    out.append(_result("family Lambda2 >= block bound", blk, res_limit, "max violation"))

    failures = []
    for d in range(2, 9):
        spec = ClockFamilySpec.from_weights(d, [1.0])
        for fam in (None, spec):
            cert = certify_rows(d, fam, sweep(d, fam, 101, cfg, mu0(d)), cfg)
            if not cert.verdict_floor:
                failures.append(d)
    out.append(CheckResult(
        "gap floor 1/(2d^2), d = 2..8",
        not failures,
        "all certified" if not failures else f"failed for d = {failures}",
    ))
    return out
