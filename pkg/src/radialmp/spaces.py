"""Discrete weighted norms: ‖·‖_A, ‖·‖_X, L^q_K, the two-exponent sum norm,
and pointwise decay verification.

A DiscreteRadialFunction is nodal; its radial derivative is the forward
difference on each cell, with the diffusion weight A evaluated at the cell's
geometric midpoint.  On a graded mesh this keeps the discrete energy
positive definite and makes ‖u‖_X² = ‖u‖_A² + ‖u‖_V² hold by construction.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import _kernels as kern
from .errors import GridMismatchError, ParameterError, SingularOperatorError
from .grid import RadialGrid, Region, sphere_area
from .potentials import PotentialSpec, fit_asymptotics


@dataclass(eq=False)
class DiscreteRadialFunction:
    """Nodal values of a radial function on a RadialGrid."""

    grid: RadialGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.ascontiguousarray(self.values, dtype=np.float64)
        if v.shape != self.grid.nodes.shape:
            raise GridMismatchError("values length does not match the grid")
        if not np.all(np.isfinite(v)):
            raise ParameterError("nodal values must be finite")
        self.values = v

    @staticmethod
    def zeros(grid: RadialGrid) -> "DiscreteRadialFunction":
        return DiscreteRadialFunction(grid, np.zeros(grid.size))

    @staticmethod
    def from_callable(grid: RadialGrid, fn) -> "DiscreteRadialFunction":
        return DiscreteRadialFunction(grid, np.asarray(fn(grid.nodes), dtype=np.float64))

    def scaled(self, c: float) -> "DiscreteRadialFunction":
        return DiscreteRadialFunction(self.grid, c * self.values)

    def to_csv(self, path_or_buf) -> None:
        buf = path_or_buf if hasattr(path_or_buf, "write") else open(path_or_buf, "w")
        try:
            buf.write("r,value\n")
            for r, v in zip(self.grid.nodes, self.values):
                buf.write(f"{r:.17g},{v:.17g}\n")
        finally:
            if buf is not path_or_buf:
                buf.close()

    @staticmethod
    def from_csv(path_or_buf, N: int) -> "DiscreteRadialFunction":
        if hasattr(path_or_buf, "read"):
            data = np.loadtxt(path_or_buf, delimiter=",", skiprows=1)
        else:
            data = np.loadtxt(path_or_buf, delimiter=",", skiprows=1)
        grid = RadialGrid(N=N, nodes=data[:, 0], grading="custom")
        return DiscreteRadialFunction(grid, data[:, 1])


def _same_grid(u: DiscreteRadialFunction, h: DiscreteRadialFunction) -> None:
    if u.grid is not h.grid:
        if (
            u.grid.N != h.grid.N
            or u.grid.size != h.grid.size
            or not np.array_equal(u.grid.nodes, h.grid.nodes)
        ):
            raise GridMismatchError("operands live on different grids")


class EnergyForm:
    """Assembled discrete X inner product for one (grid, A, V) triple.

    gA holds per-cell stiffness ω_N A(mid) mass / h², wV the nodal mass
    weights ω_N w V(r).  The reduced tridiagonal Gram matrix (outer node
    pinned to zero) is symmetric positive definite: A > 0 and the Dirichlet
    row excludes the constant mode even when V ≡ 0.
    """

    def __init__(self, grid: RadialGrid, A: PotentialSpec, V: PotentialSpec):
        self.grid = grid
        self.A = A
        self.V = V
        wN = sphere_area(grid.N)
        mass = grid.cell_left + grid.cell_right
        a_mid = np.asarray(A(grid.midpoints), dtype=np.float64)
        self.gA = np.ascontiguousarray(wN * a_mid * mass / grid.heights**2)
        v_nodes = np.asarray(V(grid.nodes), dtype=np.float64)
        self.wV = np.ascontiguousarray(wN * grid.node_weights * v_nodes)
        if not (np.all(np.isfinite(self.gA)) and np.all(np.isfinite(self.wV))):
            raise SingularOperatorError(
                "non-finite energy weights; potential overflow on this grid"
            )
        if np.any(self.gA <= 0) or np.any(self.wV < 0):
            raise SingularOperatorError("energy weights must be positive (A) / nonnegative (V)")
        n = grid.size - 1
        diag = np.zeros(n)
        diag += self.gA[:n]
        diag[1:] += self.gA[: n - 1]
        diag += self.wV[:n]
        self._diag = np.ascontiguousarray(diag)
        self._off = np.ascontiguousarray(-self.gA[: n - 1])
        self._n = n

    # -- quadratic forms ------------------------------------------------
    def norm_A2(self, values: np.ndarray, region: Region | None = None) -> float:
        if region is None:
            return kern.cell_energy(values, self.gA)
        i0, i1 = self.grid.cell_range(region)
        if i1 <= i0:
            return 0.0
        return kern.cell_energy(
            np.ascontiguousarray(values[i0 : i1 + 1]), np.ascontiguousarray(self.gA[i0:i1])
        )

    def norm_V2(self, values: np.ndarray, region: Region | None = None) -> float:
        if region is None:
            return kern.wsum2(values, self.wV)
        w = sphere_area(self.grid.N) * self.grid.region_node_weights(region) * np.asarray(
            self.V(self.grid.nodes), dtype=np.float64
        )
        return kern.wsum2(values, np.ascontiguousarray(w))

    def norm_X2(self, values: np.ndarray, region: Region | None = None) -> float:
        return self.norm_A2(values, region) + self.norm_V2(values, region)

    def inner(self, u: np.ndarray, v: np.ndarray) -> float:
        return kern.cell_inner(u, v, self.gA) + kern.winner(u, v, self.wV)

    # -- the reduced Gram operator --------------------------------------
    def gram_mv(self, values: np.ndarray) -> np.ndarray:
        """y with y_j = (u | e_j)_X for the interior nodes, y[-1] = 0."""
        n = self._n
        y = np.zeros_like(values)
        y[:n] = kern.tridiag_mv(self._off, self._diag, self._off, np.ascontiguousarray(values[:n]))
        y[n - 1] -= self.gA[n - 1] * values[n]
        return y

    def gram_solve(self, rhs: np.ndarray) -> np.ndarray:
        """Solve (g | e_j)_X = rhs_j for interior j; g[-1] = 0."""
        n = self._n
        g = np.zeros(self.grid.size)
        g[:n] = kern.tridiag_solve(
            self._off, self._diag, self._off, np.ascontiguousarray(rhs[:n])
        )
        if not np.all(np.isfinite(g)):
            raise SingularOperatorError("Gram solve produced non-finite values")
        return g


@lru_cache(maxsize=32)
def energy_form(grid: RadialGrid, A: PotentialSpec, V: PotentialSpec) -> EnergyForm:
    return EnergyForm(grid, A, V)


@lru_cache(maxsize=32)
def k_weights(grid: RadialGrid, K: PotentialSpec) -> np.ndarray:
    """Nodal quadrature weights ω_N w_j K(r_j) for ∫ K(·) dx."""
    w = sphere_area(grid.N) * grid.node_weights * np.asarray(K(grid.nodes), dtype=np.float64)
    if not np.all(np.isfinite(w)):
        raise SingularOperatorError("non-finite K weights; potential overflow on this grid")
    return np.ascontiguousarray(w)


# -- public norm operations ---------------------------------------------


def norm_A(u: DiscreteRadialFunction, A: PotentialSpec, region: Region | None = None) -> float:
    """(∫ A |∇u|² dx)^{1/2} over the region (default: everything)."""
    one = PotentialSpec.pure_power(1.0, 0.0)
    return float(np.sqrt(energy_form(u.grid, A, one).norm_A2(u.values, region)))


@dataclass
class NormBundle:
    norm_A: float
    norm_V: float
    norm_X: float
    splits: dict = field(default_factory=dict)


def norm_bundle(
    u: DiscreteRadialFunction,
    A: PotentialSpec,
    V: PotentialSpec,
    split_R: float | None = None,
) -> NormBundle:
    ef = energy_form(u.grid, A, V)

    def bundle(region):
        a2 = ef.norm_A2(u.values, region)
        v2 = ef.norm_V2(u.values, region)
        return NormBundle(np.sqrt(a2), np.sqrt(v2), np.sqrt(a2 + v2))

    out = bundle(None)
    if split_R is not None:
        out.splits = {
            "ball": bundle(Region.ball(split_R)),
            "complement": bundle(Region.complement(split_R)),
        }
    return out


def inner_product_X(
    u: DiscreteRadialFunction,
    h: DiscreteRadialFunction,
    A: PotentialSpec,
    V: PotentialSpec,
) -> float:
    """(u|h) = ∫ A ∇u·∇h dx + ∫ V u h dx."""
    _same_grid(u, h)
    return energy_form(u.grid, A, V).inner(u.values, h.values)


def norm_LqK(
    u: DiscreteRadialFunction,
    K: PotentialSpec,
    q: float,
    region: Region | None = None,
) -> float:
    """(∫_region K |u|^q dx)^{1/q}."""
    if q <= 1:
        raise ParameterError(f"q must exceed 1, got {q}")
    if region is None:
        w = k_weights(u.grid, K)
    else:
        w = np.ascontiguousarray(
            sphere_area(u.grid.N)
            * u.grid.region_node_weights(region)
            * np.asarray(K(u.grid.nodes), dtype=np.float64)
        )
    return float(kern.wabspow(u.values, w, q) ** (1.0 / q))


def sum_norm(
    u: DiscreteRadialFunction, K: PotentialSpec, q1: float, q2: float
) -> tuple[float, float]:
    """Computational norm of L^{q1}_K + L^{q2}_K via level-set decompositions.

    Minimizes over thresholds T the max of ‖u·1_{|u|>T}‖_{q1} and
    ‖u·1_{|u|≤T}‖_{q2}.  The objective is a right-continuous step function
    of T whose pieces change only at nodal |u| values, so the exact minimum
    over the whole threshold family is the minimum over those candidates;
    it is evaluated with sorted prefix sums.  Returns (value, threshold).
    """
    if q1 <= 1 or q2 <= 1:
        raise ParameterError("q1, q2 must exceed 1")
    x = np.abs(u.values)
    peak = float(x.max()) if x.size else 0.0
    if peak == 0.0:
        return 0.0, 0.0
    w = k_weights(u.grid, K)
    order = np.argsort(x, kind="stable")
    xs = x[order]
    p1 = (w[order] * xs**q1).cumsum()
    p2 = (w[order] * xs**q2).cumsum()
    tot1 = p1[-1]
    # candidate thresholds: 0 and each distinct |u| value
    uniq, last_idx = np.unique(xs, return_index=True)
    # index of the last occurrence of each unique value
    last = np.searchsorted(xs, uniq, side="right") - 1
    cands = np.concatenate([[0.0], uniq])
    big = np.empty_like(cands)
    small = np.empty_like(cands)
    # T = 0: the |u| > 0 part carries everything except exact zeros
    nz = np.searchsorted(xs, 0.0, side="right")
    big[0] = tot1 - (p1[nz - 1] if nz > 0 else 0.0)
    small[0] = 0.0
    big[1:] = tot1 - p1[last]
    small[1:] = p2[last]
    f = np.maximum(big ** (1.0 / q1), small ** (1.0 / q2))
    k = int(np.argmin(f))
    return float(f[k]), float(cands[k])


def random_bump_profile(
    grid: RadialGrid,
    rng: np.random.Generator,
    support: Region | None = None,
    n_bumps: int = 3,
) -> DiscreteRadialFunction:
    """Random smooth nodal profile with exact compact support.

    Sum of a few log-radial gaussians, windowed to a random node range inside
    ``support`` and hard-zeroed outside it (decay checks need exact support).
    """
    if support is None:
        support = Region.all()
    i0, i1 = grid.cell_range(support)
    if i1 - i0 < 4:
        raise ParameterError("support region too small for a bump")
    j0 = int(rng.integers(i0, i1 - 2))
    j1 = int(rng.integers(j0 + 2, i1 + 1))
    lr = np.log(grid.nodes)
    u = np.zeros(grid.size)
    for _ in range(n_bumps):
        c = rng.uniform(lr[j0], lr[j1])
        w = rng.uniform(0.3, 2.0)
        a = rng.uniform(-1.0, 1.0)
        u += a * np.exp(-(((lr - c) / w) ** 2))
    # taper to zero at the window edges, then cut exactly
    t = np.zeros(grid.size)
    t[j0 : j1 + 1] = np.sin(np.linspace(0.0, np.pi, j1 - j0 + 1)) ** 2
    u *= t
    # exact support: sin(pi) is only ~1e-16, cut the endpoints hard
    u[: j0 + 1] = 0.0
    u[j1:] = 0.0
    return DiscreteRadialFunction(grid, u)


@dataclass
class DecayCheck:
    max_ratio: float
    C_bound: float
    passed: bool
    exponent: float
    C_end: float


def _end_constant(A: PotentialSpec, a: float, r_samples: np.ndarray) -> float:
    """inf of A(r)/r^a over the sample points, in log space."""
    la = np.asarray(A.log_eval(r_samples), dtype=np.float64)
    return float(np.exp(np.min(la - a * np.log(r_samples))))


def verify_decay_infinity(
    u: DiscreteRadialFunction,
    A: PotentialSpec,
    R: float,
    slack: float = 0.05,
    a_inf: float | None = None,
) -> DecayCheck:
    """Check |u(r)| ≤ C r^{−(N+a∞−2)/2} ‖u‖_{A, complement(R)} nodewise.

    C = (ω_N C_∞(R) (N+a∞−2))^{−1/2} with C_∞(R) = inf_{r≥R} A(r)/r^{a∞}
    sampled at nodes and cell midpoints.  ``slack`` covers interpolation
    and quadrature error of the discrete tail norm.
    """
    grid = u.grid
    if a_inf is None:
        a_inf = A.declared_ainf
    if a_inf is None:
        a_inf, _, _ = fit_asymptotics(A, "infinity")
    expo = (grid.N + a_inf - 2) / 2.0
    if expo <= 0:
        raise ParameterError("decay exponent requires a_inf > 2 - N")
    k, _ = grid.snap(R)
    Rn = float(grid.nodes[k])
    samples = np.concatenate([grid.nodes[k:], grid.midpoints[k:]])
    C_end = _end_constant(A, a_inf, samples)
    C_bound = (sphere_area(grid.N) * C_end * (grid.N + a_inf - 2)) ** -0.5
    denom2 = energy_form(grid, A, PotentialSpec.pure_power(1.0, 0.0)).norm_A2(
        u.values, Region.complement(Rn)
    )
    tail_vals = np.abs(u.values[k:])
    if denom2 <= 0.0:
        ratio = 0.0 if np.all(tail_vals == 0.0) else np.inf
    else:
        ratio = float(np.max(tail_vals * grid.nodes[k:] ** expo) / np.sqrt(denom2))
    return DecayCheck(
        max_ratio=ratio,
        C_bound=C_bound,
        passed=bool(ratio <= C_bound * (1.0 + slack)),
        exponent=expo,
        C_end=C_end,
    )


def verify_decay_origin(
    u: DiscreteRadialFunction,
    A: PotentialSpec,
    R: float,
    slack: float = 0.05,
    a_0: float | None = None,
) -> DecayCheck:
    """Check |u(r)| ≤ C r^{−(N+a₀−2)/2} ‖u‖_{A, ball(R)} for u supported in
    the ball of radius R (values at r ≥ R must vanish)."""
    grid = u.grid
    if a_0 is None:
        a_0 = A.declared_a0
    if a_0 is None:
        a_0, _, _ = fit_asymptotics(A, "zero")
    expo = (grid.N + a_0 - 2) / 2.0
    if expo <= 0:
        raise ParameterError("decay exponent requires a_0 > 2 - N")
    k, _ = grid.snap(R)
    Rn = float(grid.nodes[k])
    if np.any(u.values[k:] != 0.0):
        raise ParameterError("u must vanish at and beyond R (support in the ball)")
    samples = np.concatenate([grid.nodes[: k + 1], grid.midpoints[:k]])
    C_end = _end_constant(A, a_0, samples)
    C_bound = (sphere_area(grid.N) * C_end * (grid.N + a_0 - 2)) ** -0.5
    denom2 = energy_form(grid, A, PotentialSpec.pure_power(1.0, 0.0)).norm_A2(
        u.values, Region.ball(Rn)
    )
    head = np.abs(u.values[:k])
    if denom2 <= 0.0:
        ratio = 0.0 if np.all(head == 0.0) else np.inf
    else:
        ratio = float(np.max(head * grid.nodes[:k] ** expo) / np.sqrt(denom2)) if k else 0.0
    return DecayCheck(
        max_ratio=ratio,
        C_bound=C_bound,
        passed=bool(ratio <= C_bound * (1.0 + slack)),
        exponent=expo,
        C_end=C_end,
    )
