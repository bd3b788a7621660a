"""Nonnegative nontrivial critical points of I by Nehari-constrained descent.

Each iterate is rescaled onto the set where I'(u)[u] = 0 (every positive ray
crosses it exactly once for the built-in superquadratic forms), then moved
against the Riesz gradient of I in the X metric with an Armijo backtracking
line search.  Once the relative dual residual is small the iteration hands
over to a damped Newton solve of the discrete weak equation, which converges
quadratically; the descent phase guarantees the Newton start is inside the
mountain-pass well rather than at zero.  Restarts with independent seeds
guard against landing on higher critical values.
"""

from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_banded
from scipy.optimize import brentq

from . import _kernels as kern
from .errors import EscapeFailedError, NoScaleError, ParameterError  # noqa: F401
from .functional import (
    EnergyBreakdown,
    Nonlinearity,
    _f_values,
    _F_weighted_sum,
    _fu_weighted_sum,
)
from .grid import RadialGrid
from .potentials import PotentialSpec
from .spaces import DiscreteRadialFunction, energy_form, k_weights

log = logging.getLogger(__name__)


@dataclass
class SolveConfig:
    grid: RadialGrid
    A: PotentialSpec
    V: PotentialSpec
    K: PotentialSpec
    nl: Nonlinearity
    max_iter: int = 5000
    residual_tol: float = 1e-6
    shrink: float = 0.5
    sufficient_decrease: float = 1e-4
    restarts: int = 5
    seed: int = 0
    newton_trigger: float = 0.05

    def __post_init__(self):
        if self.residual_tol <= 0 or self.max_iter < 1 or self.restarts < 1:
            raise ParameterError("tolerances and iteration counts must be positive")


@dataclass
class SolveResult:
    u: DiscreteRadialFunction
    energy: EnergyBreakdown
    residual: float
    nehari_defect: float
    iterations: int
    converged: bool
    geometry: dict = field(default_factory=dict)
    restart_energies: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "energy": {
                "quadratic": self.energy.quadratic,
                "potential": self.energy.potential,
                "total": self.energy.total,
            },
            "residual": self.residual,
            "nehari_defect": self.nehari_defect,
            "iterations": self.iterations,
            "converged": self.converged,
            "geometry": self.geometry,
            "restart_energies": self.restart_energies,
        }


class _Problem:
    """Assembled discrete problem shared by the solver internals."""

    def __init__(self, grid, A, V, K, nl):
        self.grid = grid
        self.nl = nl
        self.ef = energy_form(grid, A, V)
        self.wK = k_weights(grid, K)

    def energy(self, values: np.ndarray) -> float:
        return 0.5 * self.ef.norm_X2(values) - _F_weighted_sum(self.nl, values, self.wK)

    def breakdown(self, values: np.ndarray) -> EnergyBreakdown:
        return EnergyBreakdown(
            quadratic=0.5 * self.ef.norm_X2(values),
            potential=_F_weighted_sum(self.nl, values, self.wK),
        )

    def gradient(self, values: np.ndarray) -> np.ndarray:
        b = self.ef.gram_mv(values) - self.wK * _f_values(self.nl, values)
        return self.ef.gram_solve(b)

    def norm_X(self, values: np.ndarray) -> float:
        return float(np.sqrt(self.ef.norm_X2(values)))

    def nehari_lambda(self, values: np.ndarray, rel_tol: float = 1e-13) -> float:
        """Ray crossing of I'(λu)[u] = 0: closed form for pure powers,
        safeguarded Newton otherwise."""
        vals = np.abs(values) if self.nl.form == "min_power_odd" else values
        vals = np.ascontiguousarray(vals)
        if kern.wpospow(vals, self.wK, 1.0) <= 0.0:
            raise NoScaleError("positive part carries no K mass")
        a2 = self.ef.norm_X2(values)
        if a2 <= 0.0:
            raise NoScaleError("zero energy norm")
        nl = self.nl
        if nl.form == "pure_power" or nl.q1 == nl.q2:
            S = kern.wpospow(vals, self.wK, nl.q1)
            if S <= 0.0:
                raise NoScaleError("positive part carries no K mass")
            return (a2 / S) ** (1.0 / (nl.q1 - 2.0))

        def phi(lam):
            return lam * a2 - _fu_weighted_sum(nl, values, self.wK, lam)

        hi = 1.0
        for _ in range(400):
            if phi(hi) < 0.0:
                break
            hi *= 2.0
        else:
            raise NoScaleError("no ray crossing found")
        # φ(0+) > 0 since f is superquadratic; walk down to a positive bracket
        lo = 0.5 * hi
        for _ in range(400):
            if phi(lo) > 0.0:
                break
            hi = lo
            lo *= 0.5
        else:
            raise NoScaleError("no positive side found on the ray")
        return float(brentq(phi, lo, hi, rtol=max(rel_tol, 1e-15), maxiter=200))

    def fprime_values(self, values: np.ndarray) -> np.ndarray:
        nl = self.nl
        t = np.abs(values) if nl.form == "min_power_odd" else np.maximum(values, 0.0)
        qm, qM = min(nl.q1, nl.q2), max(nl.q1, nl.q2)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(
                t <= 1.0,
                (qM - 1.0) * np.where(t > 0, t, 0.0) ** (qM - 2.0),
                (qm - 1.0) * t ** (qm - 2.0),
            )
        out[t == 0.0] = 0.0
        return out


def build_escape_direction(
    K: PotentialSpec,
    grid: RadialGrid,
    nl: Nonlinearity,
    A: PotentialSpec,
    V: PotentialSpec,
    max_doublings: int = 60,
) -> tuple[DiscreteRadialFunction, float]:
    """A fixed radial bump ψ and a scaling λ with I(λψ) < 0.

    ψ is a C¹ piecewise-cubic plateau bump: 1 on (δ, 1/δ), 0 outside
    (δ/2, 1 + 1/δ), where δ is chosen so K stays above δ on a sampled
    annulus around r = 1.  λ doubles from 1 until the energy drops below
    zero and below everything seen along the ray.
    """
    window = grid.nodes[(grid.nodes >= 0.5) & (grid.nodes <= 2.0)]
    if window.size == 0:
        raise ParameterError("grid does not resolve the unit annulus")
    k_min = float(np.min(K(window)))
    delta = min(1.0 / 3.0, 0.5 * k_min)
    if delta <= 0:
        raise ParameterError("K vanishes near the unit annulus")

    def smooth(t):
        t = np.clip(t, 0.0, 1.0)
        return 3.0 * t**2 - 2.0 * t**3

    r = grid.nodes
    psi = np.zeros_like(r)
    up = (r >= 0.5 * delta) & (r < delta)
    psi[up] = smooth((r[up] - 0.5 * delta) / (0.5 * delta))
    psi[(r >= delta) & (r <= 1.0 / delta)] = 1.0
    down = (r > 1.0 / delta) & (r < 1.0 + 1.0 / delta)
    psi[down] = 1.0 - smooth(r[down] - 1.0 / delta)
    prob = _Problem(grid, A, V, K, nl)
    lam = 1.0
    best_seen = np.inf
    for _ in range(max_doublings):
        val = prob.energy(lam * psi)
        if val < 0.0 and val < best_seen:
            return DiscreteRadialFunction(grid, psi), lam
        best_seen = min(best_seen, val)
        lam *= 2.0
    raise EscapeFailedError(
        "no negative-energy scaling within the doubling budget; "
        "check that the growth exponents exceed 2"
    )


def _newton_polish(prob: _Problem, values: np.ndarray, tol_abs: float, max_iter: int = 60):
    """Damped Newton on the discrete weak equation Gu = wK f(u).

    The Jacobian G − diag(wK f'(u)) is generally indefinite (the target is a
    saddle point of I), so the banded solve uses partial pivoting.  Returns
    (values, residual_norm, ok).
    """
    n = prob.ef._n
    g = prob.gradient(values)
    res = prob.norm_X(g)
    for _ in range(max_iter):
        if res <= tol_abs:
            return values, res, True
        fp = prob.fprime_values(values)
        ab = np.zeros((3, n))
        ab[0, 1:] = prob.ef._off
        ab[1, :] = prob.ef._diag - prob.wK[:n] * fp[:n]
        ab[2, :-1] = prob.ef._off
        rhs = prob.ef.gram_mv(values) - prob.wK * _f_values(prob.nl, values)
        try:
            step = solve_banded((1, 1), ab, rhs[:n])
        except Exception:
            return values, res, False
        if not np.all(np.isfinite(step)):
            return values, res, False
        tau = 1.0
        for _ in range(12):
            trial = values.copy()
            trial[:n] = values[:n] - tau * step
            g_t = prob.gradient(trial)
            res_t = prob.norm_X(g_t)
            if res_t < res:
                values, res = trial, res_t
                break
            tau *= 0.5
        else:
            return values, res, False
    return values, res, res <= tol_abs


def _seed_profile(grid: RadialGrid, psi: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Randomized positive bump: the escape profile modulated by a smooth
    log-radial wave plus a random radial shift of its plateau."""
    r = grid.nodes
    lr = np.log(r)
    phase = rng.uniform(0, 2 * np.pi)
    freq = rng.uniform(0.2, 1.0)
    mod = 1.0 + 0.5 * np.sin(freq * lr + phase)
    center = rng.uniform(-1.0, 1.0)
    shifted = np.interp(lr - center, lr, psi, left=0.0, right=0.0)
    out = np.maximum(shifted * mod, 0.0)
    out[-1] = 0.0
    return out


def ps_residual(
    u: DiscreteRadialFunction,
    A: PotentialSpec,
    V: PotentialSpec,
    K: PotentialSpec,
    nl: Nonlinearity,
) -> float:
    """Dual norm of I'(u): the X norm of its Riesz gradient."""
    prob = _Problem(u.grid, A, V, K, nl)
    return prob.norm_X(prob.gradient(u.values))


def _plain_descent(prob: _Problem, u0: np.ndarray, cfg: SolveConfig):
    """Unconstrained descent for the coercive case (f contributes nothing
    along this seed); converges to the trivial critical point."""
    u = u0.copy()
    I_u = prob.energy(u)
    for it in range(1, cfg.max_iter + 1):
        g = prob.gradient(u)
        gn2 = prob.ef.norm_X2(g)
        if np.sqrt(gn2) <= cfg.residual_tol * max(prob.norm_X(u), 1.0):
            return u, it, True, False
        s = 1.0
        for _ in range(40):
            v = u - s * g
            I_v = prob.energy(v)
            if I_v <= I_u - cfg.sufficient_decrease * s * gn2:
                u, I_u = v, I_v
                break
            s *= cfg.shrink
        else:
            return u, it, False, False
    return u, cfg.max_iter, False, False


def _single_solve(prob: _Problem, u0: np.ndarray, cfg: SolveConfig):
    """One descent run: (values, iterations, converged, via_ray)."""
    u = u0.copy()
    try:
        u *= prob.nehari_lambda(u)
    except NoScaleError:
        return _plain_descent(prob, u0, cfg)
    I_u = prob.energy(u)
    step = 1.0
    it = 0
    trigger = cfg.newton_trigger
    while it < cfg.max_iter:
        it += 1
        g = prob.gradient(u)
        gn2 = prob.ef.norm_X2(g)
        un = prob.norm_X(u)
        rel = np.sqrt(gn2) / max(un, 1e-300)
        if rel <= trigger:
            u_new, res, ok = _newton_polish(prob, u, tol_abs=0.01 * cfg.residual_tol * un)
            # Newton must not collapse into the trivial solution u = 0
            if ok and prob.norm_X(u_new) > 0.3 * un and prob.energy(u_new) > 0:
                return u_new, it, True, True
            trigger = 0.1 * rel  # retry Newton only after real descent progress
        if rel <= cfg.residual_tol:
            return u, it, True, True
        s = step
        accepted = False
        for _ in range(40):
            v = u - s * g
            try:
                lam = prob.nehari_lambda(v)
            except NoScaleError:
                s *= cfg.shrink
                continue
            v = lam * v
            I_v = prob.energy(v)
            if I_v <= I_u - cfg.sufficient_decrease * s * gn2:
                u, I_u = v, I_v
                step = min(4.0, s * 2.0)
                accepted = True
                break
            s *= cfg.shrink
        if not accepted:
            return u, it, rel <= cfg.residual_tol, True
    return u, it, False, True


def solve(config: SolveConfig, initial: DiscreteRadialFunction | None = None) -> SolveResult:
    """Best nonnegative critical point over independent restarts.

    Converged restarts with positive energy are ranked by energy and the
    lowest wins; the trivial critical point u = 0 is reported only when no
    restart found anything else (e.g. the f ≡ 0 diagnostic mode).  An
    ``initial`` guess replaces the first restart's random seed (useful for
    grid-refinement warm starts).

    After the iteration converges, nodal values more negative than
    −1e−12·max|u| indicate a step-size bug (the zero extension of f makes
    negative wells energetically unstable); smaller ones are clamped to 0,
    the iterate is re-projected onto the Nehari set, and all diagnostics
    are recomputed on the clamped function.
    """
    prob = _Problem(config.grid, config.A, config.V, config.K, config.nl)
    try:
        psi, escape_lam = build_escape_direction(
            config.K, config.grid, config.nl, config.A, config.V
        )
    except EscapeFailedError:
        # coercive diagnostic mode: keep a bump for seeding, no escape scale
        k0, _ = config.grid.snap(1.0)
        bump = np.exp(-np.log(config.grid.nodes / config.grid.nodes[k0]) ** 2)
        bump[-1] = 0.0
        psi, escape_lam = DiscreteRadialFunction(config.grid, bump), float("nan")
    seeds = np.random.SeedSequence(config.seed).spawn(config.restarts)

    def run_restart(item):
        idx, sk = item
        rng = np.random.default_rng(sk)
        if idx == 0 and initial is not None:
            u0 = np.asarray(initial.values, dtype=np.float64).copy()
            u0[-1] = 0.0
        else:
            u0 = _seed_profile(config.grid, psi.values, rng)
            for _ in range(3):
                if kern.wpospow(np.ascontiguousarray(u0), prob.wK, 1.0) > 0:
                    break
                u0 = _seed_profile(config.grid, psi.values, rng)
        return _single_solve(prob, u0, config)

    threads = max(1, int(os.environ.get("RADIALMP_THREADS", "1")))
    if threads > 1 and config.restarts > 1:
        with ThreadPoolExecutor(max_workers=min(threads, config.restarts)) as pool:
            runs = list(pool.map(run_restart, enumerate(seeds)))
    else:
        runs = [run_restart(item) for item in enumerate(seeds)]

    best = None  # (values, energy, converged, nontrivial)
    restart_energies = []
    total_iters = 0
    for vals, iters, conv, via_ray in runs:
        total_iters += iters
        I_val = prob.energy(vals)
        nontrivial = conv and via_ray and I_val > 0
        restart_energies.append({"energy": I_val, "iterations": iters, "converged": conv})
        if best is None:
            best = (vals, I_val, conv, nontrivial)
            continue
        _, b_I, b_conv, b_nt = best
        better = (
            (nontrivial and not b_nt)
            or (nontrivial and b_nt and I_val < b_I)
            or (conv and not b_conv and not b_nt)
        )
        if better:
            best = (vals, I_val, conv, nontrivial)
    vals, _, converged, nontrivial = best
    if converged and not nontrivial:
        # descent sank to the trivial critical point; drop round-off residue
        vals = np.zeros_like(vals)
    # clamp discretization-level negative values, then re-project
    peak = float(np.max(np.abs(vals))) if vals.size else 0.0
    floor = -1e-12 * peak
    clipped = np.where(vals < 0.0, np.where(vals >= floor, 0.0, vals), vals)
    if np.any(clipped < 0.0):
        log.warning("solution has negative values beyond clamp tolerance")
        clipped = np.maximum(clipped, 0.0)
    vals = clipped
    if converged and nontrivial:
        try:
            vals = prob.nehari_lambda(vals) * vals
        except NoScaleError:
            converged = False
    g = prob.gradient(vals)
    un = prob.norm_X(vals)
    denom = un if un > 0 else 1.0  # trivial critical point: absolute residual
    residual = prob.norm_X(g) / denom
    defect = abs(prob.ef.inner(vals, g)) / denom**2
    u_fn = DiscreteRadialFunction(config.grid, vals)
    rho = un / 10.0
    rng = np.random.default_rng(np.random.SeedSequence(config.seed + 1))
    alpha_mp = _sphere_floor(prob, rho, 100, rng) if un > 0 else 0.0
    converged = bool(converged and residual <= config.residual_tol)
    return SolveResult(
        u=u_fn,
        energy=prob.breakdown(vals),
        residual=residual,
        nehari_defect=defect,
        iterations=total_iters,
        converged=converged,
        geometry={"rho": rho, "alpha_mp": alpha_mp, "escape_lambda": escape_lam},
        restart_energies=restart_energies,
    )


def _sphere_floor(prob: _Problem, rho: float, n_dirs: int, rng) -> float:
    """min of I over random points with ‖·‖_X = rho."""
    lo = np.inf
    M = prob.grid.size
    for _ in range(n_dirs):
        v = rng.standard_normal(M)
        v[-1] = 0.0
        nv = prob.norm_X(v)
        if nv == 0:
            continue
        lo = min(lo, prob.energy((rho / nv) * v))
    return float(lo)


@dataclass
class GeometryReport:
    rho_best: float
    floor_best: float
    rho_ladder: list
    floors: list
    c3: float
    c4: float
    escape_lambda: float
    escape_norm: float
    escape_energy: float
    passed: bool


def verify_geometry(
    config: SolveConfig,
    n_dirs: int = 200,
    rho_lo: float = 1e-3,
    rho_hi: float = 1.0,
    n_rho: int = 13,
) -> GeometryReport:
    """Empirical mountain-pass certificate.

    Samples I on X spheres of radius ρ over a log ladder, fits nonnegative
    c3, c4 with ∫K F(u) ≤ c3 ρ^{q1} + c4 ρ^{q2} on the samples, reports the
    largest ρ whose empirical floor min I is positive, and checks the
    escape direction leaves the ball with negative energy.
    """
    prob = _Problem(config.grid, config.A, config.V, config.K, config.nl)
    rng = np.random.default_rng(np.random.SeedSequence(config.seed + 2))
    rhos = np.geomspace(rho_lo, rho_hi, n_rho)
    floors = []
    pot_max = []
    M = config.grid.size
    for rho in rhos:
        lo = np.inf
        pm = 0.0
        for _ in range(n_dirs):
            v = rng.standard_normal(M)
            v[-1] = 0.0
            nv = prob.norm_X(v)
            if nv == 0:
                continue
            w = (rho / nv) * v
            pot = _F_weighted_sum(prob.nl, w, prob.wK)
            pm = max(pm, pot)
            lo = min(lo, 0.5 * rho**2 - pot)
        floors.append(float(lo))
        pot_max.append(pm)
    # least squares for the envelope coefficients, clipped to >= 0
    B = np.column_stack([rhos ** prob.nl.q1, rhos ** prob.nl.q2])
    coef, *_ = np.linalg.lstsq(B, np.asarray(pot_max), rcond=None)
    c3, c4 = float(max(coef[0], 0.0)), float(max(coef[1], 0.0))
    positive = [(r, f) for r, f in zip(rhos, floors) if f > 0]
    if positive:
        rho_best, floor_best = max(positive, key=lambda t: t[0])
    else:
        rho_best, floor_best = 0.0, float("-inf")
    try:
        psi, lam = build_escape_direction(config.K, config.grid, config.nl, config.A, config.V)
        esc_vals = lam * psi.values
        esc_norm = prob.norm_X(esc_vals)
        esc_energy = prob.energy(esc_vals)
        escaped = esc_energy < 0 and esc_norm > rho_best
    except EscapeFailedError:
        lam, esc_norm, esc_energy = float("nan"), 0.0, float("nan")
        escaped = False  # coercive: no mountain-pass geometry to certify
    passed = bool(positive) and escaped
    return GeometryReport(
        rho_best=float(rho_best),
        floor_best=float(floor_best),
        rho_ladder=[float(r) for r in rhos],
        floors=floors,
        c3=c3,
        c4=c4,
        escape_lambda=lam,
        escape_norm=esc_norm,
        escape_energy=esc_energy,
        passed=passed,
    )
