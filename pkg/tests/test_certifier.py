import json
import math

import numpy as np
import pytest
from scipy.linalg import block_diag

from clockgap.bounds import crossing_point, gap_floor, mu0_exact
from clockgap.certifier import (
    GapCertificate,
    certify,
    certify_rows,
    family_two_lowest,
    golden_section_min,
    refine_minimum,
    sweep,
)
from clockgap.eigensolver import SolverConfig, smallest_eigenvalues, two_lowest
from clockgap.errors import ParameterError
from clockgap.operators import ClockFamilySpec, build_h0, build_hj


def dense_family_two_lowest(spec, s):
    mats = []
    for b, m in spec.blocks:
        mats.extend([build_hj(spec.dim, s, b).to_dense()] * m)
    return np.linalg.eigvalsh(block_diag(*mats))[:2]


def gap_d2(s):
    return math.sqrt(1 - 2 * s + 2 * s * s)


class TestFamily:
    def test_single_block(self):
        spec = ClockFamilySpec(6, ((0.0, 1),))
        for s in (0.0, 0.4, 1.0):
            assert family_two_lowest(spec, s) == two_lowest(build_h0(6, s))

    def test_d3_dense(self):
        spec = ClockFamilySpec.from_weights(3, [1.0])
        big = family_two_lowest(spec, 0.5)
        np.testing.assert_allclose(big, dense_family_two_lowest(spec, 0.5), atol=2e-12)
        assert big[0] == two_lowest(build_h0(3, 0.5))[0]

    def test_repeated_block(self):
        d, s = 7, 0.8
        spec = ClockFamilySpec.from_weights(d, [(1.0, 2)])
        lam1, lam2 = two_lowest(build_h0(d, s))
        low1 = smallest_eigenvalues(build_hj(d, s, 1.0), 1).eigenvalues[0]
        assert low1 > lam1
        assert family_two_lowest(spec, s)[1] == min(lam2, low1)

    @pytest.mark.parametrize("d", [2, 3, 5, 8])
    @pytest.mark.parametrize("weights", [[1.0], [1.0, 2.0, 7.0], [(1.0, 2)], [(1.0, 3), 1.5]])
    def test_matches_dense(self, d, weights):
        spec = ClockFamilySpec.from_weights(d, weights)
        for s in np.linspace(0.0, 1.0, 11):
            np.testing.assert_allclose(
                family_two_lowest(spec, s), dense_family_two_lowest(spec, s), atol=2e-12
            )

    def test_adding_blocks_never_raises_lambda2(self):
        d = 12
        weights = [5.0, 1.0, 2.0, 1.0, 1.5]
        for s in np.linspace(0.0, 1.0, 41):
            prev = math.inf
            for n in range(len(weights) + 1):
                spec = ClockFamilySpec.from_weights(d, weights[:n])
                big2 = family_two_lowest(spec, s)[1]
                assert big2 <= prev
                prev = big2


class TestSweep:
    def test_d2_three_points(self):
        rows = sweep(2, None, 3)
        np.testing.assert_allclose([r.gap for r in rows], [1.0, math.sqrt(0.5), 1.0], atol=2e-12)
        assert [r.s for r in rows] == [0.0, 0.5, 1.0]

    @pytest.mark.parametrize("d", [2, 5, 33])
    def test_endpoint_rows(self, d):
        rows = sweep(d, None, 5)
        assert rows[0].gap == pytest.approx(1.0, abs=2e-12)
        assert rows[-1].gap == pytest.approx(1 - math.cos(math.pi / d), abs=2e-12)

    def test_row_fields(self):
        spec = ClockFamilySpec.from_weights(10, [1, 2, 7])
        for r in sweep(10, spec, 21):
            assert r.gap >= 0 and r.family_gap >= 0
            assert r.margin_vs_floor == r.family_gap - r.floor
            assert r.floor == gap_floor(10)
            assert all(
                math.isfinite(v) for v in (r.upper_min, r.lambda2_lower, r.gap_lower, r.floor)
            )
        for r in sweep(10, None, 21):
            assert r.Lambda1 is None and r.family_gap is None
            assert r.margin_vs_floor == r.gap - r.floor

    def test_explicit_grid(self):
        rows = sweep(4, None, [1.0, 0.0, 0.3])
        assert [r.s for r in rows] == [0.0, 0.3, 1.0]
        with pytest.raises(ParameterError):
            sweep(4, None, [0.0, 0.5])
        with pytest.raises(ParameterError):
            sweep(4, None, 1)

    def test_deterministic(self):
        spec = ClockFamilySpec.from_weights(9, [1, 3])
        assert sweep(9, spec, 31) == sweep(9, spec, 31)


class TestRefine:
    def test_d2(self):
        s, g = refine_minimum(2, None, (0.0, 1.0))
        assert abs(s - 0.5) <= 1e-6
        assert abs(g - math.sqrt(0.5)) <= 1e-9

    def test_d10_near_crossing(self):
        sc = crossing_point(10)
        s, g = refine_minimum(10, None, (sc - 0.05, sc + 0.05))
        assert sc - 0.05 <= s <= sc + 0.05
        assert g >= gap_floor(10)

    def test_degenerate_bracket(self):
        s, g = refine_minimum(5, None, (0.3, 0.3))
        assert s == 0.3
        l1, l2 = two_lowest(build_h0(5, 0.3))
        assert g == pytest.approx(l2 - l1, abs=1e-12)

    def test_bad_brackets(self):
        with pytest.raises(ParameterError):
            refine_minimum(5, None, (0.6, 0.4))
        with pytest.raises(ParameterError):
            refine_minimum(5, None, (-0.1, 0.4))

    def test_golden_section_quadratic(self):
        s, f = golden_section_min(lambda x: (x - 0.123) ** 2, 0.0, 1.0)
        assert abs(s - 0.123) <= 1e-6
        assert f <= 1e-12

    def test_golden_section_endpoint_minimum(self):
        s, f = golden_section_min(lambda x: -x, 0.0, 1.0)
        assert s == 1.0 and f == -1.0


class TestCertify:
    def test_d2(self):
        cert = certify(2)
        assert cert.verdict_floor
        assert cert.refined_min_gap == pytest.approx(math.sqrt(0.5), abs=1e-9)
        assert cert.verdict_lower is None
        assert not cert.chain_bound_ge_floor

    def test_d10_family(self):
        cert = certify(10, ClockFamilySpec.from_weights(10, [1, 2, 7]))
        assert cert.verdict_floor and cert.verdict_lambda1_identity
        assert cert.verdict_upper and cert.verdict_lower

    def test_endpoints_only(self):
        cert = certify(10, None, grid_size=2)
        assert cert.verdict_floor
        assert cert.low_resolution
        assert cert.refined_min_gap >= mu0_exact(10) - 1e-12

    def test_refined_below_grid(self):
        cfg = SolverConfig()
        rows = sweep(40, None, 201, cfg)
        cert = certify_rows(40, None, rows, cfg)
        assert all(cert.refined_min_gap <= r.gap + cfg.abs_tol for r in rows)
        assert cert.refined_min_gap <= cert.grid_min_gap

    def test_wrong_bounds_flip_verdicts(self):
        # a grossly inflated mu0 makes the analytic lower curve exceed the gap
        cfg = SolverConfig()
        rows = sweep(20, None, 101, cfg, mu0=10 * mu0_exact(20))
        cert = certify_rows(20, None, rows, cfg)
        assert cert.verdict_lower is False
        assert cert.verdict_floor

    @pytest.mark.parametrize("d", [3, 17, 64])
    def test_small_d_family_and_plain(self, d):
        for spec in (None, ClockFamilySpec.from_weights(d, [(1.0, 2)])):
            cert = certify(d, spec, grid_size=201)
            assert cert.verdict_floor and cert.verdict_upper and cert.verdict_lower
            assert cert.refined_min_gap >= gap_floor(d)

    def test_json_round_trip(self):
        cert = certify(6, ClockFamilySpec.from_weights(6, [1, (2, 3)]), grid_size=51)
        back = GapCertificate.from_dict(json.loads(json.dumps(cert.to_dict())))
        assert back == cert
        assert back.family == cert.family

    def test_deterministic_except_timestamp(self):
        a = certify(7, None, grid_size=51).to_dict()
        b = certify(7, None, grid_size=51).to_dict()
        a.pop("timestamp"), b.pop("timestamp")
        assert json.dumps(a) == json.dumps(b)
