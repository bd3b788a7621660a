"""Closed-form exponent calculus for the weighted-space admissibility analysis.

Everything here is a field operation on the inputs, so the computations run
in exact rational arithmetic (every float is converted to the rational it
represents) and identities like q*(a, α*(a, β), β) = max{1, 2β} hold with
tolerance zero.  Results are ``fractions.Fraction``; callers wanting floats
convert at the end.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .errors import ParameterError


def _frac(x) -> Fraction:
    try:
        return Fraction(x)
    except (OverflowError, ValueError, TypeError) as exc:
        raise ParameterError(f"not a finite rational value: {x!r}") from exc


def _check_a(N: int, a: Fraction, name: str) -> None:
    if not (2 - N < a <= 2):
        raise ParameterError(f"{name}={a} outside (2-N, 2] for N={N}")


@dataclass(frozen=True)
class BaseExponents:
    p0: Fraction
    pinf: Fraction
    pstar: Fraction
    a: Fraction
    sigma: Fraction


def base_exponents(N: int, a0, ainf) -> BaseExponents:
    """p0 = 2N/(N+a0−2), p∞ = 2N/(N+a∞−2), p* = min, a = max, σ = (p*)'."""
    a0, ainf = _frac(a0), _frac(ainf)
    _check_a(N, a0, "a0")
    _check_a(N, ainf, "ainf")
    p0 = Fraction(2 * N) / (N + a0 - 2)
    pinf = Fraction(2 * N) / (N + ainf - 2)
    a = max(a0, ainf)
    pstar = min(p0, pinf)
    sigma = Fraction(2 * N) / (N - a + 2)
    return BaseExponents(p0=p0, pinf=pinf, pstar=pstar, a=a, sigma=sigma)


def alpha_star(a, beta, N: int) -> Fraction:
    """Threshold max{2β − 1 − N/2 − aβ + a/2, −(1−β)N}; the interval of
    admissible small-ball exponents is nonempty exactly when α exceeds it."""
    a, beta = _frac(a), _frac(beta)
    _check_a(N, a, "a")
    if not (0 <= beta <= 1):
        raise ParameterError(f"beta={beta} outside [0, 1]")
    b1 = 2 * beta - 1 - Fraction(N, 2) - a * beta + a / 2
    b2 = -(1 - beta) * N
    return max(b1, b2)


def q_star(a, alpha, beta, N: int) -> Fraction:
    """Endpoint exponent 2 (α − 2β + N + aβ) / (N + a − 2)."""
    a, alpha, beta = _frac(a), _frac(alpha), _frac(beta)
    _check_a(N, a, "a")
    if not (0 <= beta <= 1):
        raise ParameterError(f"beta={beta} outside [0, 1]")
    return 2 * (alpha - 2 * beta + N + a * beta) / (N + a - 2)


def q_tilde(N: int, a, s) -> Fraction:
    """Interpolation exponent 2 (1 + 1/N − 1/s) − a/N, defined for s > σ."""
    a, s = _frac(a), _frac(s)
    _check_a(N, a, "a")
    sigma = Fraction(2 * N) / (N - a + 2)
    if s <= sigma:
        raise ParameterError(f"s={s} must exceed the conjugate exponent {sigma}")
    return 2 * (1 + Fraction(1, N) - 1 / s) - a / N


@dataclass(frozen=True)
class ProblemParams:
    """Dimension, end exponents of A, ratio-bound parameters, and the K
    integrability exponent s (optional, only q̃ needs it)."""

    N: int
    a0: Fraction
    ainf: Fraction
    alpha0: Fraction
    alphainf: Fraction
    beta0: Fraction
    betainf: Fraction
    s: Fraction | None = None

    def __post_init__(self):
        if self.N < 3:
            raise ParameterError(f"N >= 3 required, got {self.N}")
        for name in ("a0", "ainf", "alpha0", "alphainf", "beta0", "betainf"):
            object.__setattr__(self, name, _frac(getattr(self, name)))
        if self.s is not None:
            object.__setattr__(self, "s", _frac(self.s))
        _check_a(self.N, self.a0, "a0")
        _check_a(self.N, self.ainf, "ainf")
        for name in ("beta0", "betainf"):
            b = getattr(self, name)
            if not (0 <= b <= 1):
                raise ParameterError(f"{name}={b} outside [0, 1]")


@dataclass(frozen=True)
class Intervals:
    """Open admissible intervals I1 = (lo1, hi1), I2 = (lo2, ∞) and their
    intersection (None when empty)."""

    lo1: Fraction
    hi1: Fraction
    lo2: Fraction
    i1_empty: bool
    overlap: tuple[Fraction, Fraction] | None

    def q1_admissible(self, q) -> bool:
        q = _frac(q)
        return not self.i1_empty and self.lo1 < q < self.hi1

    def q2_admissible(self, q) -> bool:
        return self.lo2 < _frac(q)


def admissible_intervals(p: ProblemParams) -> Intervals:
    lo1 = max(Fraction(1), 2 * p.beta0)
    hi1 = q_star(p.a0, p.alpha0, p.beta0, p.N)
    lo2 = max(Fraction(1), 2 * p.betainf, q_star(p.ainf, p.alphainf, p.betainf, p.N))
    i1_empty = not (lo1 < hi1)
    if i1_empty or not (max(lo1, lo2) < hi1):
        overlap = None
    else:
        overlap = (max(lo1, lo2), hi1)
    return Intervals(lo1=lo1, hi1=hi1, lo2=lo2, i1_empty=i1_empty, overlap=overlap)


def decay_exponents(p: ProblemParams, q1, q2) -> tuple[Fraction, Fraction]:
    """Predicted power-law rates of the embedding suprema.

    delta0  = (N + a0 − 2)(q*(a0, α0, β0) − q1)/2  (small-ball sup ~ R^delta0)
    deltainf = (N + a∞ − 2)(q2 − q*(a∞, α∞, β∞))/2 (far-field sup ~ R^−deltainf)

    The three β cases of the underlying estimates all reduce to this single
    expression; tests/test_exponents.py re-derives the reduction symbolically.
    """
    q1, q2 = _frac(q1), _frac(q2)
    iv = admissible_intervals(p)
    if not iv.q1_admissible(q1):
        raise ParameterError(f"q1={q1} outside I1=({iv.lo1}, {iv.hi1})")
    if not iv.q2_admissible(q2):
        raise ParameterError(f"q2={q2} outside I2=({iv.lo2}, inf)")
    delta0 = (p.N + p.a0 - 2) * (iv.hi1 - q1) / 2
    qstar_inf = q_star(p.ainf, p.alphainf, p.betainf, p.N)
    deltainf = (p.N + p.ainf - 2) * (q2 - qstar_inf) / 2
    return delta0, deltainf


@dataclass(frozen=True)
class ExponentReport:
    """All derived exponents for one problem instance."""

    N: int
    p0: Fraction
    pinf: Fraction
    pstar: Fraction
    a: Fraction
    sigma: Fraction
    qtilde: Fraction | None
    alphastar0: Fraction
    alphastarinf: Fraction
    qstar0: Fraction
    qstarinf: Fraction
    intervals: Intervals
    nu0: Fraction
    nuinf: Fraction
    delta0: Callable[[float], Fraction]
    deltainf: Callable[[float], Fraction]

    def to_json(self) -> dict:
        def num(x):
            return {"exact": str(x), "value": float(x)}

        iv = self.intervals
        out = {
            "N": self.N,
            "p0": num(self.p0),
            "pinf": num(self.pinf),
            "pstar": num(self.pstar),
            "a": num(self.a),
            "sigma": num(self.sigma),
            "qtilde": num(self.qtilde) if self.qtilde is not None else None,
            "alphastar0": num(self.alphastar0),
            "alphastarinf": num(self.alphastarinf),
            "qstar0": num(self.qstar0),
            "qstarinf": num(self.qstarinf),
            "nu0": num(self.nu0),
            "nuinf": num(self.nuinf),
            "I1": None if iv.i1_empty else {"lo": num(iv.lo1), "hi": num(iv.hi1)},
            "I1_empty": iv.i1_empty,
            "I2": {"lo": num(iv.lo2)},
            "overlap": None
            if iv.overlap is None
            else {"lo": num(iv.overlap[0]), "hi": num(iv.overlap[1])},
        }
        return out


def exponent_report(p: ProblemParams) -> ExponentReport:
    base = base_exponents(p.N, p.a0, p.ainf)
    iv = admissible_intervals(p)
    qtilde = None
    if p.s is not None and p.s > base.sigma:
        qtilde = q_tilde(p.N, base.a, p.s)
    nu0 = (p.N + p.a0 - 2) / 2
    nuinf = (p.N + p.ainf - 2) / 2
    qstar0 = iv.hi1
    qstarinf = q_star(p.ainf, p.alphainf, p.betainf, p.N)

    def delta0(q1) -> Fraction:
        return (p.N + p.a0 - 2) * (qstar0 - _frac(q1)) / 2

    def deltainf(q2) -> Fraction:
        return (p.N + p.ainf - 2) * (_frac(q2) - qstarinf) / 2

    return ExponentReport(
        N=p.N,
        p0=base.p0,
        pinf=base.pinf,
        pstar=base.pstar,
        a=base.a,
        sigma=base.sigma,
        qtilde=qtilde,
        alphastar0=alpha_star(p.a0, p.beta0, p.N),
        alphastarinf=alpha_star(p.ainf, p.betainf, p.N),
        qstar0=qstar0,
        qstarinf=qstarinf,
        intervals=iv,
        nu0=nu0,
        nuinf=nuinf,
        delta0=delta0,
        deltainf=deltainf,
    )
