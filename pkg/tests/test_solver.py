import numpy as np
import pytest

import radialmp as rm
from radialmp.errors import EscapeFailedError
from radialmp.functional import derivative, energy
from radialmp.spaces import k_weights


@pytest.fixture(scope="module")
def ex2_setup(ex2_pots):
    A, V, K = ex2_pots
    g = rm.build_grid(6, 1e-6, 1e3, 1000)
    return g, A, V, K


@pytest.fixture(scope="module")
def solved(ex2_setup):
    g, A, V, K = ex2_setup
    cfg = rm.SolveConfig(grid=g, A=A, V=V, K=K, nl=rm.Nonlinearity.pure_power(5), seed=0)
    return cfg, rm.solve(cfg)


ZERO_NL = rm.Nonlinearity.custom(lambda t: 0.0, lambda t: 0.0, 3, 5)


class TestEscapeDirection:
    def test_negative_energy_scaling(self, ex2_setup):
        g, A, V, K = ex2_setup
        nl = rm.Nonlinearity.min_power(3, 5)
        one = rm.PotentialSpec.pure_power(1, 0)
        psi, lam = rm.build_escape_direction(one, g, nl, A, V)
        assert energy(psi.scaled(lam), A, V, one, nl).total < 0
        assert np.all(psi.values >= 0) and psi.values.max() == 1.0

    def test_zero_scaling_zero_energy(self, ex2_setup):
        g, A, V, K = ex2_setup
        nl = rm.Nonlinearity.min_power(3, 5)
        psi, _ = rm.build_escape_direction(K, g, nl, A, V)
        assert energy(psi.scaled(0.0), A, V, K, nl).total == 0.0

    def test_monotone_past_the_hump(self, ex2_setup):
        g, A, V, K = ex2_setup
        nl = rm.Nonlinearity.min_power(3, 5)
        psi, lam = rm.build_escape_direction(K, g, nl, A, V)
        I1 = energy(psi.scaled(lam), A, V, K, nl).total
        I2 = energy(psi.scaled(2 * lam), A, V, K, nl).total
        assert I1 < 0 and I2 < I1

    def test_subquadratic_failure(self, ex2_setup):
        g, A, V, K = ex2_setup
        with pytest.raises(EscapeFailedError):
            rm.build_escape_direction(K, g, ZERO_NL, A, V)


class TestSolve:
    def test_converged_properties(self, solved):
        cfg, res = solved
        assert res.converged
        assert res.residual < cfg.residual_tol
        assert res.nehari_defect < 1e-8
        assert np.all(res.u.values >= 0.0)
        assert res.energy.total > 0.0

    def test_weak_form_on_random_directions(self, solved, ex2_setup, rng):
        g, A, V, K = ex2_setup
        cfg, res = solved
        nl = cfg.nl
        un = rm.norm_bundle(res.u, A, V).norm_X
        for _ in range(50):
            h = rm.random_bump_profile(g, rng)
            hn = rm.norm_bundle(h, A, V).norm_X
            assert abs(derivative(res.u, h, A, V, K, nl)) <= 2 * cfg.residual_tol * un * hn

    def test_energy_positivity_identity(self, solved, ex2_setup):
        g, A, V, K = ex2_setup
        cfg, res = solved
        nl = cfg.nl
        wK = k_weights(g, K)
        u = res.u.values
        ident = np.dot(wK, 0.5 * rm.f_eval(nl, u) * u - rm.F_eval(nl, u))
        assert res.energy.total == pytest.approx(ident, rel=1e-8)
        floor = (0.5 - 1 / nl.theta) * nl.theta * np.dot(wK, rm.F_eval(nl, u))
        assert res.energy.total >= floor * (1 - 1e-10)

    def test_determinism(self, ex2_setup):
        g, A, V, K = ex2_setup
        cfg = rm.SolveConfig(
            grid=g, A=A, V=V, K=K, nl=rm.Nonlinearity.pure_power(5), seed=11, restarts=2
        )
        r1, r2 = rm.solve(cfg), rm.solve(cfg)
        assert r1.iterations == r2.iterations
        assert r1.energy.total == r2.energy.total
        assert np.array_equal(r1.u.values, r2.u.values)

    def test_V_scaling_raises_energy(self, solved, ex2_setup):
        g, A, V, K = ex2_setup
        cfg, res = solved
        V4 = rm.PotentialSpec.pure_power(4, -4)
        res4 = rm.solve(
            rm.SolveConfig(grid=g, A=A, V=V4, K=K, nl=rm.Nonlinearity.pure_power(5), seed=0)
        )
        assert res4.converged
        assert res4.energy.total > res.energy.total

    def test_zero_nonlinearity_diagnostic(self, ex2_setup):
        g, A, V, K = ex2_setup
        res = rm.solve(rm.SolveConfig(grid=g, A=A, V=V, K=K, nl=ZERO_NL, restarts=2, seed=0))
        assert res.converged
        assert np.all(res.u.values == 0.0)
        assert res.energy.total == 0.0

    def test_min_power_different_growths(self, ex2_setup):
        g, A, V, K = ex2_setup
        cfg = rm.SolveConfig(
            grid=g, A=A, V=V, K=K, nl=rm.Nonlinearity.min_power(3, 13), seed=0
        )
        res = rm.solve(cfg)
        assert res.converged and res.energy.total > 0
        assert np.all(res.u.values >= 0)

    def test_restart_energies_reported(self, solved):
        _, res = solved
        assert len(res.restart_energies) == 5
        assert all(r["converged"] for r in res.restart_energies)


class TestPSResidual:
    def test_zero_point(self, ex2_setup):
        g, A, V, K = ex2_setup
        nl = rm.Nonlinearity.min_power(3, 5)
        assert rm.ps_residual(rm.DiscreteRadialFunction.zeros(g), A, V, K, nl) == 0.0

    def test_converged_solution(self, solved, ex2_setup):
        g, A, V, K = ex2_setup
        cfg, res = solved
        un = rm.norm_bundle(res.u, A, V).norm_X
        assert rm.ps_residual(res.u, A, V, K, cfg.nl) <= cfg.residual_tol * un

    def test_generic_point_positive(self, ex2_setup, rng):
        g, A, V, K = ex2_setup
        nl = rm.Nonlinearity.min_power(3, 5)
        u = rm.random_bump_profile(g, rng)
        assert rm.ps_residual(u, A, V, K, nl) > 0.0


class TestGeometry:
    def test_mountain_pass_certificate(self, solved):
        cfg, _ = solved
        geo = rm.verify_geometry(cfg)
        assert geo.passed
        assert geo.floor_best > 0 and geo.rho_best > 0
        assert geo.escape_energy < 0 and geo.escape_norm > geo.rho_best

    def test_quadratic_floor_exact(self, ex2_setup):
        g, A, V, K = ex2_setup
        geo = rm.verify_geometry(rm.SolveConfig(grid=g, A=A, V=V, K=K, nl=ZERO_NL))
        for f, r in zip(geo.floors, geo.rho_ladder):
            assert f == pytest.approx(0.5 * r**2, abs=1e-15)

    def test_alpha_mp_positive(self, solved):
        _, res = solved
        assert res.geometry["alpha_mp"] > 0
        assert res.geometry["rho"] > 0
