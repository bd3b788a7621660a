"""Built-in example problems and their expected exponent tables.

Three benchmark configurations exercise the main regimes: power-law
potentials whose admissible intervals do not overlap (1), inverse-power
potentials with an overlap window (2), and exponentially growing V and K
handled through the ratio bound with β = 1/2 at infinity (3).  The expected
values are the known closed forms in N and are used by the
``reproduce-examples`` subcommand as an end-to-end regression table.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import ParameterError

_GRID = {"r_min": 1e-6, "r_max": 1e3, "nodes": 1500, "grading": "geometric"}
_SOLVER = {"max_iter": 5000, "residual_tol": 1e-6, "restarts": 5}
_PROBE = {"restarts": 8, "max_iter": 2000, "tol": 1e-8}


def example_config(idx: int, N: int) -> dict:
    """JSON-ready config for built-in example ``idx`` in dimension N."""
    if idx == 1:
        if N < 3:
            raise ParameterError("example 1 needs N >= 3")
        return {
            "N": N,
            "potentials": {
                "A": {
                    "form": "min_power",
                    "terms": [{"c": 1, "e": 2}, {"c": 1, "e": 1.5}],
                    "a0": 2.0,
                    "ainf": 1.5,
                },
                "V": {"form": "min_power", "terms": [{"c": 1, "e": 0}, {"c": 1, "e": -0.5}]},
                "K": {"form": "max_power", "terms": [{"c": 1, "e": 0.5}, {"c": 1, "e": 1.5}]},
            },
            "ratio_params": {
                "alpha0": 0.5,
                "beta0": 0.0,
                "alphainf": 1.5,
                "betainf": 0.0,
                "R1": 1.0,
                "R2": 1.0,
            },
            "f": {"form": "min_power", "q1": 2.05, "q2": 4.0},
            "grid": dict(_GRID),
            "solver": dict(_SOLVER),
            "probe": dict(_PROBE),
            "seed": 0,
        }
    if idx == 2:
        if N < 6:
            raise ParameterError("example 2 needs N >= 6")
        return {
            "N": N,
            "potentials": {
                "A": {
                    "form": "max_power",
                    "terms": [{"c": 1, "e": -2}, {"c": 1, "e": -3}],
                    "a0": -3.0,
                    "ainf": -2.0,
                },
                "V": {"form": "pure_power", "c": 1, "e": -4},
                "K": {"form": "min_power", "terms": [{"c": 1, "e": 0}, {"c": 1, "e": -2}]},
            },
            "ratio_params": {
                "alpha0": 0.0,
                "beta0": 0.0,
                "alphainf": -2.0,
                "betainf": 0.0,
                "R1": 1.0,
                "R2": 1.0,
            },
            "f": {"form": "pure_power", "q": 5.0},
            "grid": dict(_GRID),
            "solver": dict(_SOLVER),
            "probe": dict(_PROBE),
            "seed": 0,
        }
    if idx == 3:
        if N < 6:
            raise ParameterError("example 3 needs N >= 6")
        return {
            "N": N,
            "potentials": {
                "A": {
                    "form": "max_power",
                    "terms": [{"c": 1, "e": -2}, {"c": 1, "e": -3}],
                    "a0": -3.0,
                    "ainf": -2.0,
                },
                "V": {"form": "exp", "c": 1, "k": 2},
                "K": {"form": "exp", "c": 1, "k": 1},
            },
            "ratio_params": {
                "alpha0": 0.0,
                "beta0": 0.0,
                "alphainf": 0.0,
                "betainf": 0.5,
                "R1": 1.0,
                "R2": 1.0,
            },
            "f": {"form": "pure_power", "q": 5.0},
            # exp(2r) overflows the energy weights past r ~ 350; keep the
            # domain small, the potentials confine hard anyway
            "grid": {"r_min": 1e-6, "r_max": 40.0, "nodes": 1500, "grading": "geometric"},
            "solver": dict(_SOLVER),
            "probe": dict(_PROBE),
            "seed": 0,
        }
    raise ParameterError(f"no built-in example {idx}")


def expected_values(idx: int, N: int) -> dict:
    """Closed-form exponent expectations for example ``idx``."""
    if idx == 1:
        return {
            "a0": Fraction(2),
            "ainf": Fraction(3, 2),
            "qstar0": Fraction(2 * N + 1, N),
            "qstarinf": Fraction(4 * N + 6, 2 * N - 1),
            "overlap": None,
        }
    if idx in (2, 3):
        qstar0 = Fraction(2 * N, N - 5)
        qstarinf = Fraction(2 * (N - 2), N - 4)
        out = {
            "a0": Fraction(-3),
            "ainf": Fraction(-2),
            "qstar0": qstar0,
            "qstarinf": qstarinf,
            "overlap": (qstarinf, qstar0) if qstarinf < qstar0 else None,
        }
        if idx == 3:
            out["lambda_inf"] = 1.0
        return out
    raise ParameterError(f"no built-in example {idx}")
