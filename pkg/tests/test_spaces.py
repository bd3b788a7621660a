import io

import numpy as np
import pytest

import radialmp as rm
from radialmp.errors import GridMismatchError, ParameterError
from radialmp.grid import Region
from radialmp.spaces import k_weights

ONE = rm.PotentialSpec.pure_power(1, 0)


class TestNormA:
    def test_zero_function(self, grid6, ex2_pots):
        A, _, _ = ex2_pots
        assert rm.norm_A(rm.DiscreteRadialFunction.zeros(grid6), A) == 0.0

    def test_hat_closed_form(self):
        # kinks snapped to nodes make the rule exact for A = 1
        g = rm.build_grid(3, 1e-3, 10.0, 2000)
        i1 = g.snap(1.0)[0]
        im = g.snap(1.5)[0]
        i2 = g.snap(2.0)[0]
        r1, rmid, r2 = g.nodes[i1], g.nodes[im], g.nodes[i2]
        vals = np.zeros(g.size)
        vals[i1 : im + 1] = (g.nodes[i1 : im + 1] - r1) / (rmid - r1)
        vals[im : i2 + 1] = (r2 - g.nodes[im : i2 + 1]) / (r2 - rmid)
        u = rm.DiscreteRadialFunction(g, vals)
        s1, s2 = 1 / (rmid - r1), 1 / (r2 - rmid)
        exact = 4 * np.pi * (s1**2 * (rmid**3 - r1**3) / 3 + s2**2 * (r2**3 - rmid**3) / 3)
        assert rm.norm_A(u, ONE) ** 2 == pytest.approx(exact, rel=1e-3)

    def test_homogeneity_exact(self, grid6, ex2_pots, rng):
        A, _, _ = ex2_pots
        u = rm.random_bump_profile(grid6, rng)
        assert rm.norm_A(u.scaled(3.0), A) == pytest.approx(3.0 * rm.norm_A(u, A), rel=1e-14)


class TestInnerProduct:
    def test_norm_identity(self, grid6, ex2_pots, rng):
        A, V, _ = ex2_pots
        u = rm.random_bump_profile(grid6, rng)
        nb = rm.norm_bundle(u, A, V)
        assert rm.inner_product_X(u, u, A, V) == pytest.approx(nb.norm_X**2, rel=1e-12)
        assert nb.norm_X**2 == pytest.approx(nb.norm_A**2 + nb.norm_V**2, rel=1e-12)

    def test_symmetry_exact(self, grid6, ex2_pots, rng):
        A, V, _ = ex2_pots
        for _ in range(10):
            u = rm.random_bump_profile(grid6, rng)
            h = rm.random_bump_profile(grid6, rng)
            assert rm.inner_product_X(u, h, A, V) == rm.inner_product_X(h, u, A, V)

    def test_cauchy_schwarz(self, grid6, ex2_pots, rng):
        A, V, _ = ex2_pots
        for _ in range(100):
            u = rm.random_bump_profile(grid6, rng)
            h = rm.random_bump_profile(grid6, rng)
            lhs = rm.inner_product_X(u, h, A, V) ** 2
            rhs = rm.inner_product_X(u, u, A, V) * rm.inner_product_X(h, h, A, V)
            assert lhs <= rhs * (1 + 1e-12)

    def test_grid_mismatch(self, grid6, grid3, ex2_pots, rng):
        A, V, _ = ex2_pots
        u = rm.random_bump_profile(grid6, rng)
        h = rm.random_bump_profile(grid3, rng)
        with pytest.raises(GridMismatchError):
            rm.inner_product_X(u, h, A, V)

    def test_region_splits(self, grid6, ex2_pots, rng):
        A, V, _ = ex2_pots
        u = rm.random_bump_profile(grid6, rng)
        nb = rm.norm_bundle(u, A, V, split_R=1.0)
        ball, comp = nb.splits["ball"], nb.splits["complement"]
        assert ball.norm_A**2 + comp.norm_A**2 == pytest.approx(nb.norm_A**2, rel=1e-12)
        assert ball.norm_V**2 + comp.norm_V**2 == pytest.approx(nb.norm_V**2, rel=1e-12)


class TestNormLqK:
    def test_zero(self, grid6, ex2_pots):
        _, _, K = ex2_pots
        assert rm.norm_LqK(rm.DiscreteRadialFunction.zeros(grid6), K, 2.0) == 0.0

    def test_plateau_volume(self):
        g = rm.build_grid(3, 1e-4, 1e2, 4000)
        a = float(g.nodes[g.snap(0.5)[0]])
        b = float(g.nodes[g.snap(5.0)[0]])
        h = 0.7
        vals = np.where((g.nodes >= a) & (g.nodes <= b), h, 0.0)
        u = rm.DiscreteRadialFunction(g, vals)
        vol = 4 * np.pi / 3 * (b**3 - a**3)
        assert rm.norm_LqK(u, ONE, 2.0) == pytest.approx(h * np.sqrt(vol), rel=1e-2)

    def test_region_monotone(self, grid6, ex2_pots, rng):
        _, _, K = ex2_pots
        u = rm.random_bump_profile(grid6, rng)
        assert rm.norm_LqK(u, K, 3.0, Region.ball(1.0)) <= rm.norm_LqK(u, K, 3.0)

    def test_q_validation(self, grid6, ex2_pots, rng):
        _, _, K = ex2_pots
        u = rm.random_bump_profile(grid6, rng)
        with pytest.raises(ParameterError):
            rm.norm_LqK(u, K, 1.0)


def _dense_scan_sum_norm(u, K, q1, q2, n=10_000):
    """Brute-force threshold scan straight from the definition."""
    x = np.abs(u.values)
    w = k_weights(u.grid, K)
    thresholds = np.linspace(0.0, x.max(), n)
    mask = x[None, :] > thresholds[:, None]
    big = (mask * (w * x**q1)[None, :]).sum(axis=1) ** (1 / q1)
    small = (~mask * (w * x**q2)[None, :]).sum(axis=1) ** (1 / q2)
    vals = np.maximum(big, small)
    k = int(np.argmin(vals))
    return float(vals[k]), float(thresholds[k])


class TestSumNorm:
    def test_zero(self, grid6, ex2_pots):
        _, _, K = ex2_pots
        assert rm.sum_norm(rm.DiscreteRadialFunction.zeros(grid6), K, 3, 5) == (0.0, 0.0)

    def test_bounded_function_one_sided(self, grid6, ex2_pots, rng):
        _, _, K = ex2_pots
        u = rm.random_bump_profile(grid6, rng)
        val, T = rm.sum_norm(u, K, 3.0, 5.0)
        # the full q2-side decomposition is always a candidate
        assert val <= rm.norm_LqK(u, K, 5.0) * (1 + 1e-12)
        assert val <= rm.norm_LqK(u, K, 3.0) * (1 + 1e-12)

    def test_matches_dense_scan(self, ex2_pots, rng):
        _, _, K = ex2_pots
        g = rm.build_grid(6, 1e-4, 1e2, 300)
        for _ in range(10):
            u = rm.random_bump_profile(g, rng)
            val, _ = rm.sum_norm(u, K, 3.0, 5.0)
            scan, _ = _dense_scan_sum_norm(u, K, 3.0, 5.0)
            assert val <= scan * (1 + 1e-12)
            assert abs(val - scan) <= 1e-8 * max(scan, 1e-300)

    def test_homogeneity(self, grid6, ex2_pots, rng):
        _, _, K = ex2_pots
        u = rm.random_bump_profile(grid6, rng)
        v1, t1 = rm.sum_norm(u, K, 3.0, 5.0)
        v2, t2 = rm.sum_norm(u.scaled(2.5), K, 3.0, 5.0)
        assert v2 == pytest.approx(2.5 * v1, rel=1e-12)
        assert t2 == pytest.approx(2.5 * t1, rel=1e-12)

    def test_triangle_inequality(self, ex2_pots, rng):
        _, _, K = ex2_pots
        g = rm.build_grid(6, 1e-4, 1e2, 300)
        for _ in range(20):
            u = rm.random_bump_profile(g, rng)
            v = rm.random_bump_profile(g, rng)
            s = rm.DiscreteRadialFunction(g, u.values + v.values)
            lhs, _ = rm.sum_norm(s, K, 3.0, 5.0)
            ru, _ = rm.sum_norm(u, K, 3.0, 5.0)
            rv, _ = rm.sum_norm(v, K, 3.0, 5.0)
            assert lhs <= (ru + rv) * (1 + 1e-10)


class TestEmbeddingConstant:
    def test_empirical_constant_stabilizes(self, rng):
        # ||u||_{L^{p0}(ball)} + ||u||_{L^{pinf}(complement)} <= C ||u||_A
        A = rm.PotentialSpec.max_power(1, -2, 1, -3, declared_a0=-3.0, declared_ainf=-2.0)
        g = rm.build_grid(6, 1e-6, 1e3, 400)
        p0, pinf = 12.0, 6.0
        ratios = []
        for _ in range(1000):
            u = rm.random_bump_profile(g, rng)
            na = rm.norm_A(u, A)
            if na == 0:
                continue
            val = rm.norm_LqK(u, ONE, p0, Region.ball(1.0)) + rm.norm_LqK(
                u, ONE, pinf, Region.complement(1.0)
            )
            ratios.append(val / na)
        half, full = max(ratios[:500]), max(ratios)
        assert full <= 1.5 * half  # empirical max stable under sample doubling
        assert full < np.inf


class TestDecayChecks:
    def test_zero_function_passes(self, grid3, ex1_pots):
        A, _, _ = ex1_pots
        u = rm.DiscreteRadialFunction.zeros(grid3)
        chk = rm.verify_decay_infinity(u, A, 1.0)
        assert chk.passed and chk.max_ratio == 0.0

    def test_constant_A_tail(self):
        # A = 1 (a_inf = 0), N = 3: C = (4 pi N-2... ) ** -1/2 with C_inf = 1
        g = rm.build_grid(3, 1e-3, 50.0, 3000)
        vals = np.maximum(0.0, 2.0 - g.nodes)
        vals[-1] = 0.0
        u = rm.DiscreteRadialFunction(g, vals)
        chk = rm.verify_decay_infinity(u, ONE, 1.0, a_inf=0.0)
        assert chk.C_bound == pytest.approx((4 * np.pi) ** -0.5, rel=1e-12)
        assert chk.passed

    def test_random_battery_infinity(self, grid3, ex1_pots, rng):
        A, _, _ = ex1_pots
        for _ in range(200):
            u = rm.random_bump_profile(grid3, rng)
            chk = rm.verify_decay_infinity(u, A, 1.0)
            assert chk.passed

    def test_random_battery_origin(self, grid3, ex1_pots, rng):
        A, _, _ = ex1_pots
        for _ in range(200):
            u = rm.random_bump_profile(grid3, rng, Region.ball(1.0))
            chk = rm.verify_decay_origin(u, A, 1.0)
            assert chk.passed

    def test_support_violation(self, grid3, ex1_pots, rng):
        A, _, _ = ex1_pots
        u = rm.random_bump_profile(grid3, rng, Region.complement(1.0))
        if np.any(u.values != 0):
            with pytest.raises(ParameterError):
                rm.verify_decay_origin(u, A, 0.5)


def test_csv_round_trip(grid3, rng):
    u = rm.random_bump_profile(grid3, rng)
    buf = io.StringIO()
    u.to_csv(buf)
    buf.seek(0)
    assert buf.readline().strip() == "r,value"
    buf.seek(0)
    back = rm.DiscreteRadialFunction.from_csv(buf, N=3)
    assert np.array_equal(back.values, u.values)
    assert np.array_equal(back.grid.nodes, u.grid.nodes)
