"""The nonlinearity f, its primitive F, the energy functional

    I(u) = ½ ∫ A |∇u|² + ½ ∫ V u² − ∫ K F(u),

its directional derivative, the Riesz gradient in the discrete X metric,
and the ray scaling onto the set where I'(λu)[u] = 0.

The built-in f(t) = min{t^{q1−1}, t^{q2−1}} (zero for t ≤ 0, odd variant
available) has crossover at t = 1; with qm = min(q1,q2), qM = max(q1,q2)
its exact primitive is F(t) = t^qM/qM on [0,1] and 1/qM + (t^qm − 1)/qm
beyond.  Both f(t)/t nondecreasing and the superquadratic bound
θ F(t) ≤ f(t) t with θ = qm hold piecewise, which is what the ray scaling
and the descent solver rely on.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels as kern
from .errors import NoScaleError, ParameterError
from .potentials import PotentialSpec
from .spaces import DiscreteRadialFunction, EnergyForm, _same_grid, energy_form, k_weights


@dataclass(frozen=True)
class Nonlinearity:
    """Growth law of the right-hand side."""

    form: str  # min_power | min_power_odd | pure_power | custom
    q1: float
    q2: float
    f_fn: object = None
    F_fn: object = None
    theta_hint: float | None = None

    @staticmethod
    def min_power(q1: float, q2: float) -> "Nonlinearity":
        return Nonlinearity("min_power", float(q1), float(q2))

    @staticmethod
    def min_power_odd(q1: float, q2: float) -> "Nonlinearity":
        return Nonlinearity("min_power_odd", float(q1), float(q2))

    @staticmethod
    def pure_power(q: float) -> "Nonlinearity":
        return Nonlinearity("pure_power", float(q), float(q))

    @staticmethod
    def custom(f_fn, F_fn, q1: float, q2: float, theta: float | None = None) -> "Nonlinearity":
        return Nonlinearity("custom", float(q1), float(q2), f_fn=f_fn, F_fn=F_fn, theta_hint=theta)

    def __post_init__(self):
        if self.form not in ("min_power", "min_power_odd", "pure_power", "custom"):
            raise ParameterError(f"unknown nonlinearity form {self.form!r}")
        if self.form != "custom" and not (self.q1 > 2 and self.q2 > 2):
            raise ParameterError("built-in forms need q1, q2 > 2")
        if self.form == "custom" and (self.f_fn is None or self.F_fn is None):
            raise ParameterError("custom form needs both f and F callables")

    @property
    def theta(self) -> float:
        if self.theta_hint is not None:
            return self.theta_hint
        return min(self.q1, self.q2)

    @property
    def growth_m(self) -> float:
        """The coefficient in F(t) >= m min{t^q1, t^q2} (built-in forms)."""
        return 1.0 / max(self.q1, self.q2)

    def to_json(self) -> dict:
        if self.form == "pure_power":
            return {"form": "pure_power", "q": self.q1}
        return {"form": self.form, "q1": self.q1, "q2": self.q2}

    @staticmethod
    def from_json(obj: dict) -> "Nonlinearity":
        form = obj.get("form", "min_power")
        if form == "pure_power":
            return Nonlinearity.pure_power(obj["q"])
        if form in ("min_power", "min_power_odd"):
            maker = getattr(Nonlinearity, form)
            return maker(obj["q1"], obj["q2"])
        raise ParameterError(f"unknown nonlinearity form {form!r}")


def f_eval(nl: Nonlinearity, t):
    """f(t), vectorized."""
    scalar = np.isscalar(t)
    t = np.atleast_1d(np.asarray(t, dtype=np.float64))
    if nl.form == "custom":
        out = np.asarray([nl.f_fn(x) for x in t], dtype=np.float64)
    elif nl.form == "min_power_odd":
        out = np.sign(t) * kern.minpow_f(np.ascontiguousarray(np.abs(t)), nl.q1, nl.q2)
    else:
        out = kern.minpow_f(np.ascontiguousarray(t), nl.q1, nl.q2)
    return float(out[0]) if scalar else out


def F_eval(nl: Nonlinearity, t):
    """F(t) = ∫₀^t f, exact piecewise for the built-in forms."""
    scalar = np.isscalar(t)
    t = np.atleast_1d(np.asarray(t, dtype=np.float64))
    if nl.form == "custom":
        out = np.asarray([nl.F_fn(x) for x in t], dtype=np.float64)
    else:
        s = np.abs(t) if nl.form == "min_power_odd" else np.maximum(t, 0.0)
        qm, qM = min(nl.q1, nl.q2), max(nl.q1, nl.q2)
        out = np.where(s <= 1.0, s**qM / qM, 1.0 / qM + (s**qm - 1.0) / qm)
    return float(out[0]) if scalar else out


def _F_weighted_sum(nl: Nonlinearity, values: np.ndarray, w: np.ndarray) -> float:
    if nl.form == "custom":
        return float(np.dot(w, F_eval(nl, values)))
    v = np.abs(values) if nl.form == "min_power_odd" else values
    return kern.minpow_F(np.ascontiguousarray(v), w, nl.q1, nl.q2)


def _fu_weighted_sum(nl: Nonlinearity, values: np.ndarray, w: np.ndarray, lam: float) -> float:
    """Σ w f(λ u) u."""
    if nl.form == "custom":
        return float(np.dot(w, f_eval(nl, lam * values) * values))
    v = np.abs(values) if nl.form == "min_power_odd" else values
    return kern.minpow_fu(np.ascontiguousarray(v), w, lam, nl.q1, nl.q2)


def _f_values(nl: Nonlinearity, values: np.ndarray) -> np.ndarray:
    if nl.form == "custom":
        return f_eval(nl, values)
    if nl.form == "min_power_odd":
        return np.sign(values) * kern.minpow_f(np.ascontiguousarray(np.abs(values)), nl.q1, nl.q2)
    return kern.minpow_f(np.ascontiguousarray(values), nl.q1, nl.q2)


@dataclass
class FHypothesisReport:
    passed: bool
    theta: float
    M: float
    t0: float | None
    m: float | None
    odd: bool | None
    messages: list = field(default_factory=list)


def check_f_hypotheses(nl: Nonlinearity, n_samples: int = 61) -> FHypothesisReport:
    """Sample-based verification of the growth hypotheses.

    On a log ladder over [1e-6, 1e6] (and its negatives) checks
      (f1)  |f(t)| ≤ M min{|t|^{q1−1}, |t|^{q2−1}}   (M = 1 for built-ins)
      (f2)  0 ≤ θ F(t) ≤ f(t) t with θ = min{q1, q2}, and some F(t0) > 0
      (f3)  F(t) ≥ m min{t^{q1}, t^{q2}} for t > 0 with m = 1/max{q1, q2}
      (f4)  oddness, when the form claims it
    """
    t_pos = np.logspace(-6, 6, n_samples)
    ladder = np.concatenate([-t_pos[::-1], [0.0], t_pos])
    theta = nl.theta
    builtin = nl.form != "custom"
    M = 1.0 if builtin else 0.0
    rep = FHypothesisReport(
        passed=True,
        theta=theta,
        M=M,
        t0=None,
        m=nl.growth_m if builtin else None,
        odd=None,
    )
    f_vals = f_eval(nl, ladder)
    F_vals = F_eval(nl, ladder)
    envelope = np.minimum(np.abs(ladder) ** (nl.q1 - 1), np.abs(ladder) ** (nl.q2 - 1))
    if builtin:
        bad = np.abs(f_vals) > M * envelope * (1 + 1e-12)
        if np.any(bad):
            rep.passed = False
            rep.messages.append(f"(f1) fails at t={ladder[bad][0]:.3g}")
    else:
        with np.errstate(divide="ignore", invalid="ignore"):
            ratios = np.where(envelope > 0, np.abs(f_vals) / envelope, 0.0)
        M = float(np.max(ratios))
        rep.M = M
        if not np.isfinite(M) or M > 1e8:
            rep.passed = False
            k = int(np.argmax(ratios))
            rep.messages.append(f"(f1) ratio unbounded near t={ladder[k]:.3g}")
    ar_lo = theta * F_vals
    ar_hi = f_vals * ladder
    bad = (ar_lo < -1e-12) | (ar_lo > ar_hi * (1 + 1e-12) + 1e-300)
    if np.any(bad):
        rep.passed = False
        rep.messages.append(f"(f2) fails at t={ladder[bad][0]:.3g}")
    pos = np.nonzero(F_vals > 0)[0]
    if pos.size:
        rep.t0 = float(ladder[pos[0]])
    else:
        rep.passed = False
        rep.messages.append("(f2) F(t0) > 0 has no witness on the ladder")
    if builtin:
        floor = rep.m * np.minimum(t_pos**nl.q1, t_pos**nl.q2)
        Fp = F_eval(nl, t_pos)
        if np.any(Fp < floor * (1 - 1e-12)):
            rep.passed = False
            k = int(np.argmax(Fp < floor * (1 - 1e-12)))
            rep.messages.append(f"(f3) fails at t={t_pos[k]:.3g}")
    if nl.form == "min_power_odd":
        rep.odd = bool(np.all(f_eval(nl, -t_pos) == -f_eval(nl, t_pos)))
        if not rep.odd:
            rep.passed = False
            rep.messages.append("(f4) odd extension violated")
    return rep


@dataclass
class EnergyBreakdown:
    quadratic: float
    potential: float

    @property
    def total(self) -> float:
        return self.quadratic - self.potential


def energy(
    u: DiscreteRadialFunction,
    A: PotentialSpec,
    V: PotentialSpec,
    K: PotentialSpec,
    nl: Nonlinearity,
) -> EnergyBreakdown:
    ef = energy_form(u.grid, A, V)
    wK = k_weights(u.grid, K)
    quad = 0.5 * ef.norm_X2(u.values)
    pot = _F_weighted_sum(nl, u.values, wK)
    return EnergyBreakdown(quadratic=quad, potential=pot)


def derivative(
    u: DiscreteRadialFunction,
    h: DiscreteRadialFunction,
    A: PotentialSpec,
    V: PotentialSpec,
    K: PotentialSpec,
    nl: Nonlinearity,
) -> float:
    """I'(u)[h] = (u|h)_X − ∫ K f(u) h dx."""
    _same_grid(u, h)
    ef = energy_form(u.grid, A, V)
    wK = k_weights(u.grid, K)
    return ef.inner(u.values, h.values) - kern.winner(
        np.ascontiguousarray(_f_values(nl, u.values)), h.values, wK
    )


def x_gradient(
    u: DiscreteRadialFunction,
    A: PotentialSpec,
    V: PotentialSpec,
    K: PotentialSpec,
    nl: Nonlinearity,
) -> DiscreteRadialFunction:
    """Riesz representative g of I'(u) in the discrete X inner product:
    (g|h)_X = I'(u)[h] for every discrete test direction h."""
    ef = energy_form(u.grid, A, V)
    wK = k_weights(u.grid, K)
    b = ef.gram_mv(u.values) - wK * _f_values(nl, u.values)
    return DiscreteRadialFunction(u.grid, ef.gram_solve(b))


def nehari_scale(
    u: DiscreteRadialFunction,
    A: PotentialSpec,
    V: PotentialSpec,
    K: PotentialSpec,
    nl: Nonlinearity,
    rel_tol: float = 1e-12,
    max_doublings: int = 400,
) -> float:
    """λ > 0 with I'(λu)[u] = 0, by doubling then bisection.

    Well defined because f(t)/t is nondecreasing for the built-in forms, so
    φ(λ) = λ ‖u‖² − ∫ K f(λu) u has exactly one sign change on (0, ∞)
    whenever the positive part of u sees K.
    """
    ef = energy_form(u.grid, A, V)
    wK = k_weights(u.grid, K)
    vals = np.abs(u.values) if nl.form == "min_power_odd" else u.values
    if kern.wpospow(np.ascontiguousarray(vals), wK, 1.0) <= 0.0:
        raise NoScaleError("positive part of u carries no K mass")
    a2 = ef.norm_X2(u.values)
    if a2 <= 0.0:
        raise NoScaleError("u has zero energy norm")

    def phi(lam: float) -> float:
        return lam * a2 - _fu_weighted_sum(nl, u.values, wK, lam)

    hi = 1.0
    for _ in range(max_doublings):
        if phi(hi) < 0.0:
            break
        hi *= 2.0
    else:
        raise NoScaleError("no sign change found while doubling the ray parameter")
    lo = 0.0
    while hi - lo > rel_tol * hi:
        mid = 0.5 * (lo + hi)
        if phi(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
