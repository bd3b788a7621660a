"""Embedding supremum probes.

S0(q, R) and Sinf(q, R) are the suprema of ∫ K |u|^q over the unit sphere
of X, restricted to the ball of radius R and to its complement.  Their decay
as R → 0 / R → ∞ is the compactness mechanism, with predicted power laws
S0 ~ R^{+delta0} and Sinf ~ R^{−deltainf}.

The discrete estimates maximize the weighted q-mass by projected gradient
ascent in the X metric (ascend along the Riesz representative of the
objective's differential, renormalize, backtrack), with restarts seeded at
bumps of different radial scales.  Discrete maximizers are feasible points
of the continuum problem, so every estimate is a lower bound; a decay study
compares the fitted slope of those lower bounds against the predicted
exponent, a one-sided but genuine falsification channel.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels as kern
from .errors import ParameterError
from .exponents import ProblemParams, exponent_report
from .grid import RadialGrid, Region, sphere_area
from .potentials import PotentialSpec
from .spaces import energy_form, k_weights


@dataclass
class ProbeResult:
    q: float
    radii: list
    estimates: list
    fitted_slope: float
    predicted_delta: float
    restarts_used: int
    converged_flags: list

    def __post_init__(self):
        r = np.asarray(self.radii)
        if np.any(np.diff(r) <= 0):
            raise ParameterError("radii must be strictly increasing")
        if any(e < 0 for e in self.estimates):
            raise ParameterError("estimates must be nonnegative")

    def to_json(self) -> dict:
        return dict(self.__dict__)


def _region_k_weights(grid: RadialGrid, K: PotentialSpec, region: Region) -> np.ndarray:
    w = sphere_area(grid.N) * grid.region_node_weights(region) * np.asarray(
        K(grid.nodes), dtype=np.float64
    )
    return np.ascontiguousarray(w)


def _ascend(ef, wq, q, u0, max_iter, tol):
    """Maximize sum(wq |u|^q) on the discrete X sphere from u0.

    Monotone by construction (backtracking accepts only increases).
    Returns (values, objective, converged).
    """
    u = u0.copy()
    u[-1] = 0.0
    nu = np.sqrt(ef.norm_X2(u))
    if nu == 0.0:
        return u, 0.0, False
    u /= nu
    phi = kern.wabspow(u, wq, q)
    step = 1.0
    stall = 0
    for _ in range(max_iter):
        grad = q * wq * np.abs(u) ** (q - 1.0) * np.sign(u)
        d = ef.gram_solve(grad)
        s = step
        improved = False
        for _ in range(30):
            v = u + s * d
            v[-1] = 0.0
            nv = np.sqrt(ef.norm_X2(v))
            if nv > 0:
                v /= nv
                phi_v = kern.wabspow(v, wq, q)
                if phi_v > phi:
                    rel_gain = (phi_v - phi) / max(phi_v, 1e-300)
                    u, phi = v, phi_v
                    step = min(s * 2.0, 1e6)
                    improved = True
                    break
            s *= 0.5
        if not improved:
            return u, phi, True  # no ascent direction left at any step size
        if rel_gain < tol:
            stall += 1
            if stall >= 3:
                return u, phi, True
        else:
            stall = 0
    return u, phi, False


def _seed_bumps(grid, region, n, rng):
    """Log-radial gaussian bumps at n scales inside the region, jittered."""
    lr = np.log(grid.nodes)
    if region.kind == "ball":
        lo, hi = np.log(grid.r_min * 10), np.log(region.hi)
    else:
        lo, hi = np.log(region.lo), np.log(grid.r_max / 10)
    if hi <= lo:
        lo, hi = np.log(grid.r_min), np.log(grid.r_max)
    centers = np.linspace(lo, hi, n)
    widths = rng.uniform(0.5, 2.0, size=n)
    for c, w in zip(centers, widths):
        c = c + rng.uniform(-0.2, 0.2)
        yield np.exp(-(((lr - c) / w) ** 2))


def _estimate(
    grid, A, V, K, q, region, restarts, max_iter, tol, seed, warm_start=None
):
    ef = energy_form(grid, A, V)
    wq = _region_k_weights(grid, K, region)
    if not np.any(wq > 0):
        return 0.0, True, None
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    best_phi = 0.0
    best_u = None
    flags = []
    seeds = []
    if warm_start is not None:
        seeds.append(warm_start.copy())
    smooth = 1.0 - (grid.nodes / grid.r_max) ** 2
    seeds.append(smooth)
    n_bumps = max(restarts - len(seeds), 0)
    seeds.extend(_seed_bumps(grid, region, n_bumps, rng))
    for u0 in seeds[:max(restarts, len(seeds))]:
        u, phi, conv = _ascend(ef, wq, q, np.asarray(u0, dtype=np.float64), max_iter, tol)
        flags.append(conv)
        if phi > best_phi:
            best_phi, best_u = phi, u
    return best_phi, all(flags), best_u


def estimate_S0(
    q: float,
    R: float,
    grid: RadialGrid,
    A: PotentialSpec,
    V: PotentialSpec,
    K: PotentialSpec,
    restarts: int = 8,
    max_iter: int = 2000,
    tol: float = 1e-8,
    seed: int = 0,
    full_output: bool = False,
):
    """Lower-bound estimate of the small-ball supremum S0(q, R)."""
    if q <= 1:
        raise ParameterError("q must exceed 1")
    k, _ = grid.snap(R)
    region = Region.ball(float(grid.nodes[k]))
    val, conv, u = _estimate(grid, A, V, K, q, region, restarts, max_iter, tol, seed)
    if full_output:
        return val, {"converged": conv, "maximizer": u, "snapped_R": float(grid.nodes[k])}
    return val


def estimate_Sinfty(
    q: float,
    R: float,
    grid: RadialGrid,
    A: PotentialSpec,
    V: PotentialSpec,
    K: PotentialSpec,
    restarts: int = 8,
    max_iter: int = 2000,
    tol: float = 1e-8,
    seed: int = 0,
    full_output: bool = False,
):
    """Lower-bound estimate of the far-field supremum Sinf(q, R)."""
    if q <= 1:
        raise ParameterError("q must exceed 1")
    k, _ = grid.snap(R)
    region = Region.complement(float(grid.nodes[k]))
    val, conv, u = _estimate(grid, A, V, K, q, region, restarts, max_iter, tol, seed)
    if full_output:
        return val, {"converged": conv, "maximizer": u, "snapped_R": float(grid.nodes[k])}
    return val


def decay_study(
    end: str,
    q: float,
    radii,
    params: ProblemParams,
    grid: RadialGrid,
    A: PotentialSpec,
    V: PotentialSpec,
    K: PotentialSpec,
    restarts: int = 8,
    max_iter: int = 2000,
    tol: float = 1e-8,
    seed: int = 0,
) -> ProbeResult:
    """Estimate the supremum at each radius and fit the log-log slope.

    Radii are processed with the region growing (R increasing for the ball,
    decreasing for the complement) and each estimate warm-starts from the
    previous maximizer, so estimates inherit the exact set monotonicity of
    the suprema.  The predicted exponent allows the degenerate endpoint
    q = q* (prediction 0); q strictly outside the admissible side raises.
    """
    radii = sorted(float(r) for r in radii)
    if len(radii) < 3:
        raise ParameterError("need at least 3 radii to fit a slope")
    rep = exponent_report(params)
    if end == "zero":
        lo = max(1.0, float(2 * params.beta0))
        qstar = rep.qstar0
        if not (lo < q <= qstar):
            raise ParameterError(f"q={q} outside ({lo}, {float(qstar)}] for the zero end")
        predicted = float(rep.delta0(q))
        order = radii  # growing ball
    elif end == "infinity":
        qstar = max(1.0, float(2 * params.betainf), float(rep.qstarinf))
        if q < qstar:
            raise ParameterError(f"q={q} below {qstar} for the infinity end")
        predicted = float(rep.deltainf(q))
        order = radii[::-1]  # growing complement
    else:
        raise ParameterError("end must be 'zero' or 'infinity'")
    est = {}
    flags = {}
    warm = None
    for i, R in enumerate(order):
        k, _ = grid.snap(R)
        region = Region.ball(float(grid.nodes[k])) if end == "zero" else Region.complement(
            float(grid.nodes[k])
        )
        val, conv, u = _estimate(
            grid, A, V, K, q, region, restarts, max_iter, tol, seed + i, warm_start=warm
        )
        est[R] = val
        flags[R] = conv
        warm = u
    estimates = [est[R] for R in radii]
    if any(e <= 0 for e in estimates):
        slope = float("nan")
    else:
        slope = float(np.polyfit(np.log(radii), np.log(estimates), 1)[0])
    return ProbeResult(
        q=q,
        radii=radii,
        estimates=estimates,
        fitted_slope=slope,
        predicted_delta=predicted,
        restarts_used=restarts,
        converged_flags=[flags[R] for R in radii],
    )
