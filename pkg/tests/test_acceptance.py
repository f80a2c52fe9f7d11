"""Exit criteria, one test per criterion, each recorded as a PASS/FAIL line."""
import math
import subprocess
import sys
import time

import numpy as np
import pytest

from clockgap.bounds import (
    gap_floor,
    gap_lower_g,
    lambda2_lower,
    lemma_spectrum,
    mu0_exact,
    variational_upper,
)
from clockgap.certifier import certify_rows, refine_minimum, sweep
from clockgap.eigensolver import SolverConfig, smallest_eigenvalues, two_lowest
from clockgap.operators import (
    ClockFamilySpec,
    build_h0,
    build_hj,
    build_neumann_laplacian,
    difference_energy,
    quadratic_form,
)

CFG = SolverConfig()
GRID_SIZE = 1001
THEOREM_DIMS = range(2, 257)
FAMILIES = {"{1}": [1.0], "{1,2,7}": [1.0, 2.0, 7.0], "{1x2}": [(1.0, 2)]}


@pytest.fixture(scope="module")
def h0_runs():
    """(rows, certificate) per d for H0 on the 1001-point grid."""
    runs = {}
    for d in THEOREM_DIMS:
        rows = sweep(d, None, GRID_SIZE, CFG)
        runs[d] = rows, certify_rows(d, None, rows, CFG)
    return runs


def test_ac1_lemma_closed_form(record):
    worst = 0.0
    for d in (2, 3, 4, 8, 16, 64, 256, 1024):
        vals = smallest_eigenvalues(build_hj(d, 1.0, 0.5), d, CFG).eigenvalues
        expect = np.array([1 - math.cos((2 * n - 1) * math.pi / (2 * d + 1)) for n in range(1, d + 1)])
        worst = max(worst, float(np.abs(vals - expect).max()))
    assert record("AC1", worst <= 1e-10, f"boundary-loaded full spectrum, max |err| = {worst:.2e} (<= 1e-10)")


def test_ac2_theorem_a(h0_runs, record):
    bad = []
    worst_margin = math.inf
    for d, (_, cert) in h0_runs.items():
        margin = cert.refined_min_gap - (gap_floor(d) - 1e-10)
        worst_margin = min(worst_margin, margin / gap_floor(d))
        if margin < 0:
            bad.append(d)
    ok = not bad
    record("AC2", ok, f"min g >= 1/(2d^2) for d=2..256; failures {bad}; worst relative margin {worst_margin:.3f}")
    assert ok


@pytest.mark.parametrize("label", list(FAMILIES))
def test_ac3_theorem_b(label, record):
    bad_floor, bad_ident = [], []
    worst_ident = 0.0
    for d in THEOREM_DIMS:
        spec = ClockFamilySpec.from_weights(d, FAMILIES[label])
        rows = sweep(d, spec, GRID_SIZE, CFG)
        cert = certify_rows(d, spec, rows, CFG)
        if cert.refined_min_gap < gap_floor(d) - 1e-10:
            bad_floor.append(d)
        ident = max(abs(r.Lambda1 - r.lambda1) for r in rows)
        worst_ident = max(worst_ident, ident)
        if ident > 1e-9:
            bad_ident.append(d)
    ok = not bad_floor and not bad_ident
    record(
        "AC3",
        ok,
        f"family {label}: min G >= 1/(2d^2) failures {bad_floor}; "
        f"max |Lambda1 - lambda1| = {worst_ident:.1e} (<= 1e-9)",
    )
    assert ok


def test_ac4_bound_sandwich(h0_runs, record):
    upper = lower2 = lowergap = -math.inf
    for d, (rows, _) in h0_runs.items():
        for r in rows:
            upper = max(upper, r.lambda1 - variational_upper(d, r.s))
            lower2 = max(lower2, lambda2_lower(d, r.s) - r.lambda2)
            if d >= 3:
                lowergap = max(lowergap, gap_lower_g(d, r.s) - r.gap)
    ok = upper <= 1e-9 and lower2 <= 1e-9 and lowergap <= 1e-9
    record(
        "AC4",
        ok,
        f"max violations: upper {upper:.1e}, lambda2 {lower2:.1e}, piecewise gap {lowergap:.1e} (all <= 1e-9)",
    )
    assert ok


def test_ac5_mu0_asymptote(record):
    dims = np.unique(np.geomspace(50, 10**5, 200).astype(int))
    excess = [abs(d * d * mu0_exact(int(d)) - math.pi**2 / 8) * d for d in dims]
    worst = max(excess)
    record("AC5", worst <= 1.5, f"max d*|d^2 mu0 - pi^2/8| = {worst:.4f} over {dims.size} d in [50, 1e5] (<= 1.5)")
    assert worst <= 1.5


def test_ac6_mu0_threshold(record):
    above = [d for d in range(5, 10**4 + 1) if not mu0_exact(d) > 1 / d**2]
    below = [d for d in (2, 3, 4) if not mu0_exact(d) < 1 / d**2]
    ok = not above and not below
    record("AC6", ok, f"mu0 > 1/d^2 for all d in 5..1e4 (exceptions {above}); mu0 < 1/d^2 for d=2,3,4 (exceptions {below})")
    assert ok


def test_ac7_exact_d2(record):
    # 1e-12 on the gap needs each eigenvalue to 5e-13, hence the tighter bisection width
    cfg = SolverConfig(abs_tol=1e-13)
    worst = 0.0
    for s in np.linspace(0.0, 1.0, 101):
        l1, l2 = two_lowest(build_h0(2, s), cfg)
        worst = max(worst, abs((l2 - l1) - math.sqrt(1 - 2 * s + 2 * s * s)))
    s_min, g_min = refine_minimum(2, None, (0.0, 1.0), cfg)
    ok = worst <= 1e-12 and abs(s_min - 0.5) <= 1e-6 and abs(g_min - math.sqrt(0.5)) <= 1e-9
    record("AC7", ok, f"d=2 gap max |err| = {worst:.1e} (<= 1e-12); argmin s = {s_min:.8f} (0.5 +- 1e-6)")
    assert ok


def test_ac8_performance(record):
    two_lowest(build_h0(16, 0.5), CFG)  # compile outside the timed region
    T = build_h0(10**6, 0.5)
    t0 = time.perf_counter()
    res = smallest_eigenvalues(T, 2, CFG)
    elapsed = time.perf_counter() - t0
    l1, l2 = res.eigenvalues
    sane = l1 <= variational_upper(10**6, 0.5) + 1e-9 and l2 >= lambda2_lower(10**6, 0.5) - 1e-9
    ok = elapsed <= 2.0 and res.abs_tol == 1e-12 and sane
    record("AC8", ok, f"d=1e6 two lowest in {elapsed:.2f} s (<= 2 s); lambda = ({l1:.12f}, {l2:.12f})")
    assert ok


def test_ac9_factorization(record):
    rng = np.random.default_rng(2024)
    worst = 0.0
    for d in (2, 17, 128):
        lap = build_neumann_laplacian(d)
        for _ in range(1000):
            u = rng.standard_normal(d) * rng.uniform(0.1, 10.0)
            worst = max(worst, abs(quadratic_form(lap, u) - difference_energy(u)) / (u @ u))
    record("AC9", worst <= 1e-12, f"max |<u,-Lap u> - 1/2 sum|du|^2| / |u|^2 = {worst:.1e} (<= 1e-12)")
    assert worst <= 1e-12


def _cli(*args):
    return subprocess.run(
        [sys.executable, "-m", "clockgap", *args], capture_output=True, text=True, check=False
    ).returncode


def test_ac10_cli_contract(record):
    certify_code = _cli("certify", "--d", "2..64")
    inject_code = _cli("selftest", "--inject-mu0", "0.1")
    malformed = [_cli("certify", "--d", "2..x"), _cli("sweep", "--nope"), _cli("spectrum", "--d", "3")]
    ok = certify_code == 0 and inject_code == 1 and malformed == [2, 2, 2]
    record("AC10", ok, f"certify exit {certify_code} (0); injected selftest exit {inject_code} (1); malformed {malformed} (2)")
    assert ok
