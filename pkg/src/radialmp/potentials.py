"""Radial potential specs, asymptotic fitting, and admissibility checks.

A potential is described symbolically (pure power, min/max of two powers,
scaled exponential, or a log-log table) so that values and logarithms can be
evaluated without overflow across twenty decades of r.  Asymptotic exponents
at 0 and ∞ are recovered by least-squares slope fitting of log V against
log r on a geometric sample ladder, which is exact (to round-off) for the
piecewise-power forms this package targets.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .errors import DomainError, ExtrapolationRefused, FitFailedError, ParameterError
from .grid import Region

log = logging.getLogger(__name__)

# log-space power evaluation kicks in outside this range
_DIRECT_LO = 1e-6
_DIRECT_HI = 1e6
# slack for comparing fitted exponents against interval bounds
_EXPONENT_TOL = 1e-8


@dataclass(frozen=True)
class PotentialSpec:
    """Symbolic radial potential with optional declared asymptotics.

    forms:
      pure_power  c r^e                      terms=((c, e),)
      min_power   min{c1 r^e1, c2 r^e2}      terms=((c1, e1), (c2, e2))
      max_power   max{c1 r^e1, c2 r^e2}      terms же
      exp         c e^{k r}                  exp_c, exp_k
      table       log-log interpolation      points=((r, v), ...)
    """

    form: str
    terms: tuple = ()
    exp_c: float = 1.0
    exp_k: float = 0.0
    points: tuple = ()
    declared_a0: float | None = None
    declared_ainf: float | None = None
    extrapolate: bool = False

    # -- constructors -------------------------------------------------
    @staticmethod
    def pure_power(c: float, e: float, **kw) -> "PotentialSpec":
        return PotentialSpec("pure_power", terms=((float(c), float(e)),), **kw)

    @staticmethod
    def min_power(c1, e1, c2, e2, **kw) -> "PotentialSpec":
        return PotentialSpec(
            "min_power", terms=((float(c1), float(e1)), (float(c2), float(e2))), **kw
        )

    @staticmethod
    def max_power(c1, e1, c2, e2, **kw) -> "PotentialSpec":
        return PotentialSpec(
            "max_power", terms=((float(c1), float(e1)), (float(c2), float(e2))), **kw
        )

    @staticmethod
    def exp_scaled(c: float, k: float, **kw) -> "PotentialSpec":
        return PotentialSpec("exp", exp_c=float(c), exp_k=float(k), **kw)

    @staticmethod
    def tabulated(points, extrapolate: bool = False, **kw) -> "PotentialSpec":
        pts = tuple(sorted((float(r), float(v)) for r, v in points))
        if len(pts) < 2:
            raise ParameterError("table needs at least two sample points")
        if any(r <= 0 or v <= 0 for r, v in pts):
            raise ParameterError("table points must have r > 0 and value > 0")
        return PotentialSpec("table", points=pts, extrapolate=extrapolate, **kw)

    def __post_init__(self):
        if self.form in ("pure_power", "min_power", "max_power"):
            want = 1 if self.form == "pure_power" else 2
            if len(self.terms) != want:
                raise ParameterError(f"{self.form} needs {want} (c, e) term(s)")
            if any(c <= 0 for c, _ in self.terms):
                raise ParameterError("power coefficients must be positive")
        elif self.form == "exp":
            if self.exp_c <= 0:
                raise ParameterError("exp form needs c > 0")
        elif self.form != "table":
            raise ParameterError(f"unknown potential form {self.form!r}")

    # -- evaluation ----------------------------------------------------
    def log_eval(self, r):
        """log of the potential; exact in log space for every form."""
        r = np.asarray(r, dtype=np.float64)
        if np.any(r <= 0) or not np.all(np.isfinite(r)):
            raise DomainError("potentials are defined for finite r > 0 only")
        lr = np.log(r)
        if self.form == "exp":
            return math.log(self.exp_c) + self.exp_k * r
        if self.form == "table":
            pr = np.log([p[0] for p in self.points])
            pv = np.log([p[1] for p in self.points])
            if not self.extrapolate and (np.any(lr < pr[0]) or np.any(lr > pr[-1])):
                raise ExtrapolationRefused(
                    "query outside table hull; rebuild the spec with extrapolate=True"
                )
            # np.interp clamps outside the hull; extend with the edge slopes
            out = np.interp(lr, pr, pv)
            if self.extrapolate:
                lo = lr < pr[0]
                hi = lr > pr[-1]
                if np.any(lo):
                    s = (pv[1] - pv[0]) / (pr[1] - pr[0])
                    out = np.where(lo, pv[0] + s * (lr - pr[0]), out)
                if np.any(hi):
                    s = (pv[-1] - pv[-2]) / (pr[-1] - pr[-2])
                    out = np.where(hi, pv[-1] + s * (lr - pr[-1]), out)
            return out
        branches = [math.log(c) + e * lr for c, e in self.terms]
        if self.form == "pure_power":
            return branches[0]
        stack = np.stack(branches)
        # log is increasing, so min/max commute with it
        return stack.min(axis=0) if self.form == "min_power" else stack.max(axis=0)

    def __call__(self, r):
        """Potential value; powers switch to log space for extreme r."""
        scalar = np.isscalar(r)
        r = np.atleast_1d(np.asarray(r, dtype=np.float64))
        if np.any(r <= 0) or not np.all(np.isfinite(r)):
            raise DomainError("potentials are defined for finite r > 0 only")
        if self.form in ("pure_power", "min_power", "max_power"):
            extreme = (r < _DIRECT_LO) | (r > _DIRECT_HI)
            vals = np.empty_like(r)
            if np.any(~extreme):
                rr = r[~extreme]
                branches = np.stack([c * rr**e for c, e in self.terms])
                if self.form == "pure_power":
                    direct = branches[0]
                elif self.form == "min_power":
                    direct = branches.min(axis=0)
                else:
                    direct = branches.max(axis=0)
                vals[~extreme] = direct
            if np.any(extreme):
                vals[extreme] = np.exp(self.log_eval(r[extreme]))
            out = vals
        else:
            out = np.exp(self.log_eval(r))
        return float(out[0]) if scalar else out

    # -- serialization ---------------------------------------------------
    def to_json(self) -> dict:
        extra = {}
        if self.declared_a0 is not None:
            extra["a0"] = self.declared_a0
        if self.declared_ainf is not None:
            extra["ainf"] = self.declared_ainf
        if self.form in ("pure_power", "min_power", "max_power"):
            terms = [{"c": c, "e": e} for c, e in self.terms]
            if self.form == "pure_power":
                return {"form": "pure_power", **terms[0], **extra}
            return {"form": self.form, "terms": terms, **extra}
        if self.form == "exp":
            return {"form": "exp", "c": self.exp_c, "k": self.exp_k, **extra}
        return {
            "form": "table",
            "points": [[r, v] for r, v in self.points],
            "extrapolate": self.extrapolate,
            **extra,
        }

    @staticmethod
    def from_json(obj: dict) -> "PotentialSpec":
        form = obj.get("form")
        kw = {}
        if "a0" in obj:
            kw["declared_a0"] = float(obj["a0"])
        if "ainf" in obj:
            kw["declared_ainf"] = float(obj["ainf"])
        if form == "pure_power":
            return PotentialSpec.pure_power(obj.get("c", 1.0), obj["e"], **kw)
        if form in ("min_power", "max_power"):
            terms = obj["terms"]
            if len(terms) != 2:
                raise ParameterError(f"{form} needs exactly two terms")
            (t1, t2) = terms
            maker = PotentialSpec.min_power if form == "min_power" else PotentialSpec.max_power
            return maker(t1.get("c", 1.0), t1["e"], t2.get("c", 1.0), t2["e"], **kw)
        if form == "exp":
            return PotentialSpec.exp_scaled(obj.get("c", 1.0), obj["k"], **kw)
        if form == "table":
            return PotentialSpec.tabulated(
                obj["points"], extrapolate=bool(obj.get("extrapolate", False)), **kw
            )
        raise ParameterError(f"unknown potential form {form!r}")


def eval_potential(spec: PotentialSpec, r):
    """Functional alias for spec(r)."""
    return spec(r)


@dataclass
class HypothesisReport:
    """Outcome of an admissibility check with the quantities that decided it."""

    passed: bool
    a0_est: float | None = None
    ainf_est: float | None = None
    liminf0: float | None = None
    limsup0: float | None = None
    liminf_inf: float | None = None
    limsup_inf: float | None = None
    s_required: float | None = None
    s_used: float | None = None
    messages: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {k: v for k, v in self.__dict__.items()}


def _ladder(end: str, start: float = 0.1, n_points: int = 40) -> np.ndarray:
    step = 10.0 ** (0.25 if end == "infinity" else -0.25)
    base = 10.0 if end == "infinity" else start
    return base * step ** np.arange(n_points)


def fit_asymptotics(
    spec: PotentialSpec,
    end: str,
    n_points: int = 40,
    residual_tol: float = 1e-3,
) -> tuple[float, float, float]:
    """Fit (exponent, liminf, limsup) of spec(r)/r^e at one end.

    The exponent is the least-squares slope of log spec vs log r over the
    tail half of a geometric ladder; liminf/limsup are min/max of
    spec(r)/r^exponent over the same tail.  Raises FitFailedError when the
    log-log residual exceeds ``residual_tol`` (e.g. exponential growth).
    """
    if end not in ("zero", "infinity"):
        raise ParameterError(f"end must be 'zero' or 'infinity', got {end!r}")
    r = _ladder(end, n_points=n_points)
    tail = r[n_points // 2 :]
    logv = np.asarray(spec.log_eval(tail), dtype=np.float64)
    logr = np.log(tail)
    slope, intercept = np.polyfit(logr, logv, 1)
    residual = float(np.max(np.abs(slope * logr + intercept - logv)))
    if residual > residual_tol:
        raise FitFailedError(
            f"log-log fit residual {residual:.3g} exceeds {residual_tol:.3g} "
            f"at the {end} end (not power-like)",
            residual=residual,
        )
    ratios = np.exp(logv - slope * logr)
    return float(slope), float(ratios.min()), float(ratios.max())


def check_hypothesis_A(spec: PotentialSpec, N: int) -> HypothesisReport:
    """Diffusion-weight admissibility: both end exponents in (2−N, 2] with
    positive finite limit ratios."""
    rep = HypothesisReport(passed=True)
    for end in ("zero", "infinity"):
        try:
            e, lo, hi = fit_asymptotics(spec, end)
        except FitFailedError as exc:
            rep.passed = False
            rep.messages.append(f"A: asymptotic fit failed at {end}: {exc}")
            continue
        if end == "zero":
            rep.a0_est, rep.liminf0, rep.limsup0 = e, lo, hi
        else:
            rep.ainf_est, rep.liminf_inf, rep.limsup_inf = e, lo, hi
        if not (e > 2 - N + _EXPONENT_TOL and e <= 2 + _EXPONENT_TOL):
            rep.passed = False
            rep.messages.append(
                f"A: exponent {e:.6g} at {end} outside ({2 - N}, 2]"
            )
        if not (lo > 0 and np.isfinite(hi)):
            rep.passed = False
            rep.messages.append(f"A: limit ratios at {end} not in (0, inf)")
    return rep


def check_hypothesis_V(spec: PotentialSpec) -> HypothesisReport:
    """V must be nonnegative and locally integrable on (0, ∞).

    Vanishing V is allowed; it just forces β = 0 in the ratio bounds, which
    the report notes.
    """
    rep = HypothesisReport(passed=True)
    r = np.geomspace(1e-8, 1e3, 200)
    with np.errstate(over="ignore"):
        vals = spec(r)
    if np.any(vals < 0):
        rep.passed = False
        rep.messages.append("V: negative value sampled")
    if np.min(vals) == 0.0:
        rep.messages.append("V: vanishes somewhere; use beta = 0 in ratio bounds")
    for a, b in ((1e-3, 1.0), (1.0, 1e3)):
        try:
            lv = _log_quad_finite(spec, 1.0, a, b)
        except Exception as exc:
            rep.passed = False
            rep.messages.append(f"V: quadrature failed on [{a}, {b}]: {exc}")
            continue
        if not np.isfinite(lv):
            rep.passed = False
            rep.messages.append(f"V: integral over [{a}, {b}] did not converge")
    return rep


def _log_quad_finite(spec: PotentialSpec, s: float, a: float, b: float) -> float:
    """log ∫_a^b spec(r)^s dr, computed with the peak factored out so that
    exponentially large integrands stay in range."""
    grid = np.geomspace(a, b, 200)
    peak = float(np.max(s * np.asarray(spec.log_eval(grid))))
    val, _ = quad(lambda r: math.exp(s * float(spec.log_eval(r)) - peak), a, b, limit=400)
    if val <= 0 or not np.isfinite(val):
        return math.inf
    return peak + math.log(val)


def check_hypothesis_K(
    spec_K: PotentialSpec, N: int, a0: float, ainf: float
) -> HypothesisReport:
    """Local integrability of K^s for s above the admissibility threshold.

    s_required = max{2N/(N−a0+2), 2N/(N−a∞+2)}; the check uses
    s = s_required + 1 and integrates K^s over representative compacts
    [1e-3, 1] and [1, 1e3] by adaptive quadrature in the log domain.
    """
    for name, a in (("a0", a0), ("ainf", ainf)):
        if not (2 - N < a <= 2):
            raise ParameterError(f"{name}={a} outside (2-N, 2] for N={N}")
    s_req = max(2 * N / (N - a0 + 2), 2 * N / (N - ainf + 2))
    s_used = s_req + 1.0
    rep = HypothesisReport(passed=True, s_required=s_req, s_used=s_used)
    for a, b in ((1e-3, 1.0), (1.0, 1e3)):
        try:
            lv = _log_quad_finite(spec_K, s_used, a, b)
        except Exception as exc:  # quad blowing up counts as divergence
            rep.passed = False
            rep.messages.append(f"K: quadrature failed on [{a}, {b}]: {exc}")
            continue
        if not np.isfinite(lv):
            rep.passed = False
            rep.messages.append(f"K: ∫ K^{s_used:.4g} over [{a}, {b}] diverged")
    return rep


def ratio_bound(
    spec_K: PotentialSpec,
    spec_V: PotentialSpec,
    alpha: float,
    beta: float,
    region: Region,
    n_samples: int = 10_000,
    r_lo: float = 1e-8,
    r_hi: float = 1e8,
    growth_tol: float = 0.01,
) -> float:
    """sup over the region of K(r) / (r^α V(r)^β), +inf when it blows up.

    Evaluated in log space so exponential potentials cannot overflow.  The
    sup is declared infinite when the per-decade running sup keeps growing
    by more than ``growth_tol`` for three consecutive decades toward the
    region's open end, or when V vanishes at a sample with β > 0.
    """
    if not (0 <= beta <= 1):
        raise ParameterError(f"beta must lie in [0, 1], got {beta}")
    if region.kind == "ball":
        r = np.geomspace(r_lo, region.hi, n_samples)
        open_toward_zero = True
    elif region.kind == "complement":
        r = np.geomspace(region.lo, r_hi, n_samples)
        open_toward_zero = False
    else:
        raise ParameterError("ratio_bound regions are ball(R) or complement(R)")
    log_ratio = np.asarray(spec_K.log_eval(r), dtype=np.float64) - alpha * np.log(r)
    if beta > 0:
        lv = np.asarray(spec_V.log_eval(r), dtype=np.float64)
        if np.any(np.isneginf(lv)) or np.any(np.isnan(lv)):
            log.warning("ratio_bound: V vanishes on the sampled region with beta > 0")
            return math.inf
        log_ratio = log_ratio - beta * lv
    # group into decades ordered toward the open end of the region
    decades = np.floor(np.log10(r)).astype(int)
    order = np.unique(decades)
    if open_toward_zero:
        order = order[::-1]
    sups = []
    for d in order:
        m = decades == d
        if np.any(m):
            sups.append(float(np.max(log_ratio[m])))
    running = np.maximum.accumulate(sups)
    if len(running) >= 4:
        last = running[-4:]
        steps = np.diff(last)
        if np.all(steps > math.log1p(growth_tol)):
            return math.inf
    top = float(np.max(log_ratio))
    return math.exp(top) if top < 709 else math.inf
