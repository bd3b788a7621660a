import math

import numpy as np
import pytest

import radialmp as rm
from radialmp.errors import DomainError, ExtrapolationRefused, FitFailedError
from radialmp.grid import Region


class TestEval:
    def test_min_power_crossover(self):
        A = rm.PotentialSpec.min_power(1, 2, 1, 1.5)
        assert A(4.0) == pytest.approx(8.0, rel=1e-15)  # min{16, 8}

    def test_constant(self):
        one = rm.PotentialSpec.pure_power(1, 0)
        for r in (1e-9, 0.3, 7.0, 1e9):
            assert one(r) == 1.0

    def test_max_power(self):
        A = rm.PotentialSpec.max_power(1, -2, 1, -3)
        assert A(0.5) == pytest.approx(8.0, rel=1e-15)  # max{4, 8}

    def test_crossover_continuity(self):
        # unique crossover at r_c = (c2/c1)^{1/(e1-e2)}
        A = rm.PotentialSpec.min_power(2.0, 1.0, 0.5, 3.0)
        rc = (0.5 / 2.0) ** (1.0 / (1.0 - 3.0))
        lo, hi = A(rc * (1 - 1e-12)), A(rc * (1 + 1e-12))
        assert lo == pytest.approx(hi, rel=1e-9)

    def test_log_space_extremes(self):
        A = rm.PotentialSpec.pure_power(3.0, -2.0)
        assert A(1e-8) == pytest.approx(3e16, rel=1e-12)
        assert A(1e8) == pytest.approx(3e-16, rel=1e-12)
        assert np.isfinite(A.log_eval(1e-300))

    def test_domain_error(self):
        A = rm.PotentialSpec.pure_power(1, 2)
        with pytest.raises(DomainError):
            A(0.0)
        with pytest.raises(DomainError):
            A(-1.0)

    def test_table_interpolation_and_hull(self):
        pts = [(0.1, 0.01), (1.0, 1.0), (10.0, 100.0)]  # r^2 in log-log
        T = rm.PotentialSpec.tabulated(pts)
        assert T(0.5) == pytest.approx(0.25, rel=1e-12)
        with pytest.raises(ExtrapolationRefused):
            T(0.01)
        T2 = rm.PotentialSpec.tabulated(pts, extrapolate=True)
        assert T2(0.01) == pytest.approx(1e-4, rel=1e-9)

    def test_eval_potential_alias(self):
        A = rm.PotentialSpec.exp_scaled(2.0, 0.5)
        assert rm.eval_potential(A, 2.0) == pytest.approx(2.0 * math.e, rel=1e-14)


class TestFitAsymptotics:
    def test_example1_ends(self, ex1_pots):
        A, _, _ = ex1_pots
        e0, lo0, hi0 = rm.fit_asymptotics(A, "zero")
        assert e0 == pytest.approx(2.0, abs=1e-9)
        einf, loi, hii = rm.fit_asymptotics(A, "infinity")
        assert einf == pytest.approx(1.5, abs=1e-9)

    def test_pure_power_exact(self):
        for c, e in [(2.5, 1.0), (0.3, -2.2), (1.0, 0.0)]:
            P = rm.PotentialSpec.pure_power(c, e)
            for end in ("zero", "infinity"):
                ee, lo, hi = rm.fit_asymptotics(P, end)
                assert ee == pytest.approx(e, abs=1e-9)
                assert lo == pytest.approx(c, rel=1e-9)
                assert hi == pytest.approx(c, rel=1e-9)

    def test_exp_fit_fails_at_infinity(self):
        E = rm.PotentialSpec.exp_scaled(1, 2)
        with pytest.raises(FitFailedError) as err:
            rm.fit_asymptotics(E, "infinity")
        assert err.value.residual is not None and err.value.residual > 1e-3

    def test_min_max_dominant_branch_randomized(self, rng):
        # min picks the larger exponent at 0 and the smaller at infinity;
        # max the other way around
        for _ in range(25):
            c1, c2 = rng.uniform(0.2, 5.0, size=2)
            e1, e2 = rng.uniform(-3.0, 3.0, size=2)
            if abs(e1 - e2) < 0.1:
                continue
            mn = rm.PotentialSpec.min_power(c1, e1, c2, e2)
            mx = rm.PotentialSpec.max_power(c1, e1, c2, e2)
            assert rm.fit_asymptotics(mn, "zero")[0] == pytest.approx(max(e1, e2), abs=1e-6)
            assert rm.fit_asymptotics(mn, "infinity")[0] == pytest.approx(min(e1, e2), abs=1e-6)
            assert rm.fit_asymptotics(mx, "zero")[0] == pytest.approx(min(e1, e2), abs=1e-6)
            assert rm.fit_asymptotics(mx, "infinity")[0] == pytest.approx(max(e1, e2), abs=1e-6)


class TestHypothesisA:
    def test_example2(self, ex2_pots):
        A, _, _ = ex2_pots
        rep = rm.check_hypothesis_A(A, 6)
        assert rep.passed
        assert rep.a0_est == pytest.approx(-3.0, abs=1e-9)
        assert rep.ainf_est == pytest.approx(-2.0, abs=1e-9)

    def test_boundary_exponent_allowed(self):
        rep = rm.check_hypothesis_A(rm.PotentialSpec.pure_power(1, 2), 3)
        assert rep.passed
        assert rep.a0_est == pytest.approx(2.0, abs=1e-9)

    def test_too_singular_fails(self):
        rep = rm.check_hypothesis_A(rm.PotentialSpec.pure_power(1, -2), 3)
        assert not rep.passed
        assert any("outside" in m for m in rep.messages)

    def test_examples_all_pass(self, ex1_pots, ex2_pots, ex3_pots):
        for (A, _, _), N, a0, ainf in [
            (ex1_pots, 3, 2.0, 1.5),
            (ex2_pots, 6, -3.0, -2.0),
            (ex3_pots, 6, -3.0, -2.0),
        ]:
            rep = rm.check_hypothesis_A(A, N)
            assert rep.passed
            assert rep.a0_est == pytest.approx(a0, abs=1e-9)
            assert rep.ainf_est == pytest.approx(ainf, abs=1e-9)

    def test_fit_failure_reported_not_raised(self):
        rep = rm.check_hypothesis_A(rm.PotentialSpec.exp_scaled(1, 1), 3)
        assert not rep.passed
        assert any("fit failed" in m for m in rep.messages)


class TestHypothesisKV:
    def test_example2_threshold(self, ex2_pots):
        _, _, K = ex2_pots
        rep = rm.check_hypothesis_K(K, 6, -3.0, -2.0)
        assert rep.passed
        # max{12/11, 12/10}
        assert rep.s_required == pytest.approx(1.2, abs=1e-12)
        assert rep.s_used == pytest.approx(2.2, abs=1e-12)

    def test_constant_K(self):
        rep = rm.check_hypothesis_K(rm.PotentialSpec.pure_power(1, 0), 3, 2.0, 1.5)
        assert rep.passed

    def test_exponential_K(self, ex3_pots):
        _, _, K = ex3_pots
        rep = rm.check_hypothesis_K(K, 6, -3.0, -2.0)
        assert rep.passed

    def test_V_nonnegative_and_local(self, ex1_pots, ex3_pots):
        assert rm.check_hypothesis_V(ex1_pots[1]).passed
        assert rm.check_hypothesis_V(ex3_pots[1]).passed


class TestRatioBound:
    def test_example3_exact_one(self, ex3_pots):
        _, V, K = ex3_pots
        lam = rm.ratio_bound(K, V, 0.0, 0.5, Region.complement(1.0))
        assert abs(lam - 1.0) <= 1e-9

    def test_identical_ratio(self):
        one = rm.PotentialSpec.pure_power(1, 0)
        assert rm.ratio_bound(one, one, 0.0, 1.0, Region.ball(1.0)) == pytest.approx(1.0)

    def test_example1_ball(self, ex1_pots):
        _, V, K = ex1_pots
        # sup_{r<=1} max{r^1/2, r^3/2} / r^1/2 = 1
        lam = rm.ratio_bound(K, V, 0.5, 0.0, Region.ball(1.0))
        assert abs(lam - 1.0) <= 1e-9

    def test_divergence_detected(self):
        one = rm.PotentialSpec.pure_power(1, 0)
        Vq = rm.PotentialSpec.pure_power(1, 2)
        # K/V = r^{-2} blows up toward the origin
        assert rm.ratio_bound(one, Vq, 0.0, 1.0, Region.ball(1.0)) == math.inf

    def test_monotone_in_region(self, ex1_pots):
        _, V, K = ex1_pots
        lams = [
            rm.ratio_bound(K, V, 0.5, 0.0, Region.ball(R)) for R in (0.5, 1.0, 2.0, 4.0)
        ]
        assert all(b >= a for a, b in zip(lams, lams[1:]))
        lams_c = [
            rm.ratio_bound(K, V, 1.5, 0.0, Region.complement(R)) for R in (4.0, 2.0, 1.0)
        ]
        assert all(b >= a for a, b in zip(lams_c, lams_c[1:]))


def test_json_round_trip(ex1_pots, ex3_pots):
    for spec in (*ex1_pots, *ex3_pots, rm.PotentialSpec.tabulated([(0.1, 1.0), (1.0, 2.0)])):
        assert rm.PotentialSpec.from_json(spec.to_json()) == spec
