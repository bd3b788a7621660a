"""Command-line driver: configuration parsing, subcommand dispatch, reports.

Subcommands
    check               hypothesis checks for A, V, K and the ratio bounds
    exponents           full exponent report (table + JSON)
    solve               run the variational solver, write solution CSV + report
    probe               decay study of an embedding supremum, write CSV
    verify-estimates    randomized nodewise decay-bound batteries
    reproduce-examples  built-in example problems vs their expected tables

Every JSON artifact carries the sha256 of the canonical config and the seed,
so identical inputs produce byte-identical reports.  Exit codes: 0 success,
2 validation failure, 3 non-convergence, 64 usage.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from fractions import Fraction

import numpy as np

from . import presets
from .errors import RadialMPError
from .exponents import ProblemParams, base_exponents, exponent_report
from .functional import Nonlinearity
from .grid import Region, build_grid
from .potentials import PotentialSpec, check_hypothesis_A, check_hypothesis_K, check_hypothesis_V, fit_asymptotics, ratio_bound
from .probes import decay_study
from .solver import SolveConfig, solve, verify_geometry
from .spaces import random_bump_profile, verify_decay_infinity, verify_decay_origin

_SUBCOMMANDS = (
    "check",
    "exponents",
    "solve",
    "probe",
    "verify-estimates",
    "reproduce-examples",
)

_USAGE = (
    "usage: radialmp {check,exponents,solve,probe,verify-estimates,"
    "reproduce-examples} [--config PATH] [--out PATH] [--report PATH] "
    "[--seed INT] [--N INT] [--quiet] ...\n"
)


def _jsonable(x):
    """Make reports JSON-safe and deterministic (Fractions, inf, numpy)."""
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, Fraction):
        return {"exact": str(x), "value": float(x)}
    if isinstance(x, (np.floating, np.integer)):
        x = x.item()
    if isinstance(x, float):
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if math.isnan(x):
            return "nan"
    return x


def _dump(obj, path=None, quiet=False):
    text = json.dumps(_jsonable(obj), sort_keys=True, indent=2) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    if not quiet and not path:
        sys.stdout.write(text)


def _config_sha(cfg: dict) -> str:
    canon = json.dumps(cfg, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


class _Bundle:
    """Config translated into package objects."""

    def __init__(self, cfg: dict, N_override=None, seed_override=None):
        self.cfg = cfg
        self.sha = _config_sha(cfg)
        self.N = int(N_override if N_override is not None else cfg.get("N", 3))
        pot = cfg.get("potentials", {})
        try:
            self.A = PotentialSpec.from_json(pot["A"])
            self.V = PotentialSpec.from_json(pot["V"])
            self.K = PotentialSpec.from_json(pot["K"])
        except KeyError as exc:
            raise RadialMPError(f"config missing potential block {exc}") from exc
        g = cfg.get("grid", {})
        self.grid = build_grid(
            self.N,
            float(g.get("r_min", 1e-6)),
            float(g.get("r_max", 1e3)),
            int(g.get("nodes", 1500)),
            grading=g.get("grading", "geometric"),
        )
        self.nl = Nonlinearity.from_json(cfg["f"]) if "f" in cfg else None
        self.seed = int(seed_override if seed_override is not None else cfg.get("seed", 0))
        rp = cfg.get("ratio_params", {})
        self.alpha0 = float(rp.get("alpha0", 0.0))
        self.beta0 = float(rp.get("beta0", 0.0))
        self.alphainf = float(rp.get("alphainf", 0.0))
        self.betainf = float(rp.get("betainf", 0.0))
        self.R1 = float(rp.get("R1", 1.0))
        self.R2 = float(rp.get("R2", 1.0))
        self.solver_opts = cfg.get("solver", {})
        self.probe_opts = cfg.get("probe", {})

    def asymptotics(self) -> tuple[float, float]:
        a0 = self.A.declared_a0
        ainf = self.A.declared_ainf
        if a0 is None:
            a0, _, _ = fit_asymptotics(self.A, "zero")
        if ainf is None:
            ainf, _, _ = fit_asymptotics(self.A, "infinity")
        return a0, ainf

    def problem_params(self) -> ProblemParams:
        a0, ainf = self.asymptotics()
        s = self.cfg.get("s")
        if s is None:
            # exact: s_required is the Hölder conjugate of p*, use sigma + 1
            s = base_exponents(self.N, Fraction(a0).limit_denominator(10**9),
                               Fraction(ainf).limit_denominator(10**9)).sigma + 1
        return ProblemParams(
            N=self.N,
            a0=a0,
            ainf=ainf,
            alpha0=self.alpha0,
            alphainf=self.alphainf,
            beta0=self.beta0,
            betainf=self.betainf,
            s=s,
        )

    def stamp(self, payload: dict) -> dict:
        payload["config_sha256"] = self.sha
        payload["seed"] = self.seed
        return payload


def _load_config(path: str) -> dict:
    with open(path) as fh:
        text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise RadialMPError(
            f"malformed JSON in {path}: line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc


def _add_common(p: argparse.ArgumentParser, need_config=True):
    p.add_argument("--config", required=need_config, help="problem config JSON")
    p.add_argument("--out", default=None, help="output path")
    p.add_argument("--report", default=None, help="report JSON path")
    p.add_argument("--seed", type=int, default=None, help="seed override")
    p.add_argument("--N", type=int, default=None, help="dimension override")
    p.add_argument("--quiet", action="store_true")


def _cmd_check(args) -> int:
    b = _Bundle(_load_config(args.config), args.N, args.seed)
    rep_A = check_hypothesis_A(b.A, b.N)
    rep_V = check_hypothesis_V(b.V)
    ok = rep_A.passed and rep_V.passed
    out = {"A": rep_A.to_json(), "V": rep_V.to_json()}
    if rep_A.passed:
        a0, ainf = b.asymptotics()
        rep_K = check_hypothesis_K(b.K, b.N, a0, ainf)
        out["K"] = rep_K.to_json()
        ok = ok and rep_K.passed
        lam0 = ratio_bound(b.K, b.V, b.alpha0, b.beta0, Region.ball(b.R1))
        laminf = ratio_bound(b.K, b.V, b.alphainf, b.betainf, Region.complement(b.R2))
        out["ratio"] = {
            "zero": {"alpha": b.alpha0, "beta": b.beta0, "R": b.R1, "Lambda": lam0},
            "infinity": {
                "alpha": b.alphainf,
                "beta": b.betainf,
                "R": b.R2,
                "Lambda": laminf,
            },
        }
        ok = ok and math.isfinite(lam0) and math.isfinite(laminf)
    out["passed"] = ok
    _dump(b.stamp(out), args.out or args.report, args.quiet)
    if not args.quiet and (args.out or args.report):
        print("check:", "PASS" if ok else "FAIL")
        for sec in ("A", "V", "K"):
            for msg in out.get(sec, {}).get("messages", []):
                print(f"  {msg}")
    return 0 if ok else 2


def _print_exponent_table(rep, quiet):
    if quiet:
        return
    j = rep.to_json()
    rows = [
        ("p0", j["p0"]), ("pinf", j["pinf"]), ("pstar", j["pstar"]),
        ("a", j["a"]), ("sigma", j["sigma"]), ("qtilde", j["qtilde"]),
        ("alphastar0", j["alphastar0"]), ("alphastarinf", j["alphastarinf"]),
        ("qstar0", j["qstar0"]), ("qstarinf", j["qstarinf"]),
        ("nu0", j["nu0"]), ("nuinf", j["nuinf"]),
    ]
    print(f"{'quantity':<14}{'exact':>14}{'value':>18}")
    for name, cell in rows:
        if cell is None:
            print(f"{name:<14}{'-':>14}{'-':>18}")
        else:
            print(f"{name:<14}{cell['exact']:>14}{cell['value']:>18.12g}")
    iv = j["I1"]
    print("I1:", "empty" if j["I1_empty"] else f"({iv['lo']['exact']}, {iv['hi']['exact']})")
    print("I2:", f"({j['I2']['lo']['exact']}, inf)")
    ov = j["overlap"]
    print("I1 ∩ I2:", "empty" if ov is None else f"({ov['lo']['exact']}, {ov['hi']['exact']})")


def _cmd_exponents(args) -> int:
    b = _Bundle(_load_config(args.config), args.N, args.seed)
    rep = exponent_report(b.problem_params())
    _print_exponent_table(rep, args.quiet)
    _dump(b.stamp({"exponents": rep.to_json()}), args.out or args.report, quiet=True)
    if not args.out and not args.report and not args.quiet:
        _dump(b.stamp({"exponents": rep.to_json()}))
    return 0


def _cmd_solve(args) -> int:
    b = _Bundle(_load_config(args.config), args.N, args.seed)
    if b.nl is None:
        raise RadialMPError("config has no nonlinearity block 'f'")
    params = b.problem_params()
    rep = exponent_report(params)
    iv = rep.intervals
    for name, q, admissible in (
        ("q1", b.nl.q1, iv.q1_admissible(b.nl.q1)),
        ("q2", b.nl.q2, iv.q2_admissible(b.nl.q2)),
    ):
        if not admissible:
            print(f"warning: {name}={q} outside its admissible interval; "
                  "the compactness theory does not cover this run", file=sys.stderr)
    so = b.solver_opts
    cfg = SolveConfig(
        grid=b.grid, A=b.A, V=b.V, K=b.K, nl=b.nl,
        max_iter=int(so.get("max_iter", 5000)),
        residual_tol=float(so.get("residual_tol", 1e-6)),
        restarts=int(so.get("restarts", 5)),
        seed=b.seed,
    )
    result = solve(cfg)
    out_csv = args.out or "solution.csv"
    with open(out_csv, "w") as fh:
        fh.write("r,u\n")
        for r, v in zip(b.grid.nodes, result.u.values):
            fh.write(f"{r:.17g},{v:.17g}\n")
    report = b.stamp(
        {
            "solve": result.to_json(),
            "exponents": rep.to_json(),
            "solution_csv": out_csv,
        }
    )
    _dump(report, args.report, quiet=True)
    if not args.quiet:
        e = result.energy
        print(
            f"solve: converged={result.converged} iterations={result.iterations} "
            f"I(u)={e.total:.8g} residual={result.residual:.3g} "
            f"nehari_defect={result.nehari_defect:.3g}"
        )
    return 0 if result.converged else 3


def _parse_radii(text: str) -> list[float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise RadialMPError("radii must be start:stop:count, e.g. 1e-3:1e-1:8")
    lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    if not (0 < lo < hi) or n < 3:
        raise RadialMPError("radii need 0 < start < stop and count >= 3")
    return list(np.geomspace(lo, hi, n))


def _cmd_probe(args) -> int:
    b = _Bundle(_load_config(args.config), args.N, args.seed)
    radii = _parse_radii(args.radii)
    po = b.probe_opts
    result = decay_study(
        args.end,
        args.q,
        radii,
        b.problem_params(),
        b.grid,
        b.A,
        b.V,
        b.K,
        restarts=int(po.get("restarts", 8)),
        max_iter=int(po.get("max_iter", 2000)),
        tol=float(po.get("tol", 1e-8)),
        seed=b.seed,
    )
    out_csv = args.out or "probe.csv"
    with open(out_csv, "w") as fh:
        fh.write("R,S_estimate,converged\n")
        for R, S, c in zip(result.radii, result.estimates, result.converged_flags):
            fh.write(f"{R:.17g},{S:.17g},{int(c)}\n")
    _dump(b.stamp({"probe": result.to_json()}), args.report, quiet=True)
    if not args.quiet:
        print(
            f"probe {args.end}: fitted slope {result.fitted_slope:.4g}, "
            f"predicted {'+' if args.end == 'zero' else '-'}{result.predicted_delta:.4g}"
        )
    return 0 if all(result.converged_flags) else 3


def _cmd_verify_estimates(args) -> int:
    b = _Bundle(_load_config(args.config), args.N, args.seed)
    rng = np.random.default_rng(np.random.SeedSequence(b.seed))
    a0, ainf = b.asymptotics()
    R_in, R_out = b.R1, b.R2
    n = args.trials
    worst = {"origin": 0.0, "infinity": 0.0}
    fails = {"origin": 0, "infinity": 0}
    for _ in range(n):
        u = random_bump_profile(b.grid, rng, Region.ball(R_in))
        chk = verify_decay_origin(u, b.A, R_in, a_0=a0)
        worst["origin"] = max(worst["origin"], chk.max_ratio / chk.C_bound)
        fails["origin"] += 0 if chk.passed else 1
        u = random_bump_profile(b.grid, rng)
        chk = verify_decay_infinity(u, b.A, R_out, a_inf=ainf)
        worst["infinity"] = max(worst["infinity"], chk.max_ratio / chk.C_bound)
        fails["infinity"] += 0 if chk.passed else 1
    ok = fails["origin"] == 0 and fails["infinity"] == 0
    out = b.stamp(
        {
            "trials": n,
            "failures": fails,
            "worst_ratio_over_bound": worst,
            "passed": ok,
        }
    )
    _dump(out, args.out or args.report, args.quiet)
    if not args.quiet:
        print(f"verify-estimates: {'PASS' if ok else 'FAIL'} over {n} trials, "
              f"worst ratio/bound origin={worst['origin']:.4f} "
              f"infinity={worst['infinity']:.4f}")
    return 0 if ok else 3


def _cmd_reproduce_examples(args) -> int:
    N = args.N if args.N is not None else 6
    rows = []
    all_pass = True
    for idx in (1, 2, 3):
        try:
            cfg = presets.example_config(idx, N)
        except RadialMPError as exc:
            rows.append((f"example {idx}", "-", "-", f"SKIP ({exc})"))
            continue
        b = _Bundle(cfg, None, args.seed)
        want = presets.expected_values(idx, N)
        a0_fit, _, _ = fit_asymptotics(b.A, "zero")
        ainf_fit, _, _ = fit_asymptotics(b.A, "infinity")
        checks = [
            (f"ex{idx} a0 fit", float(want["a0"]), a0_fit,
             abs(a0_fit - want["a0"]) < 1e-9),
            (f"ex{idx} ainf fit", float(want["ainf"]), ainf_fit,
             abs(ainf_fit - want["ainf"]) < 1e-9),
        ]
        rep = exponent_report(b.problem_params())
        checks.append(
            (f"ex{idx} qstar0", str(want["qstar0"]), str(rep.qstar0),
             rep.qstar0 == want["qstar0"])
        )
        checks.append(
            (f"ex{idx} qstarinf", str(want["qstarinf"]), str(rep.qstarinf),
             rep.qstarinf == want["qstarinf"])
        )
        ov, want_ov = rep.intervals.overlap, want["overlap"]
        checks.append(
            (f"ex{idx} I1∩I2",
             "empty" if want_ov is None else f"({want_ov[0]}, {want_ov[1]})",
             "empty" if ov is None else f"({ov[0]}, {ov[1]})",
             ov == want_ov)
        )
        if "lambda_inf" in want:
            lam = ratio_bound(b.K, b.V, b.alphainf, b.betainf, Region.complement(b.R2))
            checks.append(
                (f"ex{idx} Lambda_inf", want["lambda_inf"], lam,
                 abs(lam - want["lambda_inf"]) <= 1e-9)
            )
        for name, expected, got, ok in checks:
            rows.append((name, expected, got, "PASS" if ok else "FAIL"))
            all_pass = all_pass and ok
    if not args.quiet:
        wid = max(len(r[0]) for r in rows) + 2
        for name, expected, got, verdict in rows:
            print(f"{name:<{wid}}expected={expected!s:<18}got={got!s:<22}{verdict}")
    if args.out or args.report:
        _dump(
            {
                "N": N,
                "rows": [
                    {"name": n, "expected": e, "got": g, "verdict": v}
                    for n, e, g, v in rows
                ],
                "passed": all_pass,
            },
            args.out or args.report,
            quiet=True,
        )
    return 0 if all_pass else 2


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv or argv[0] in ("-h", "--help"):
        sys.stdout.write(_USAGE)
        return 0
    cmd = argv[0]
    if cmd not in _SUBCOMMANDS:
        sys.stderr.write(_USAGE)
        return 64
    p = argparse.ArgumentParser(prog=f"radialmp {cmd}")
    if cmd == "probe":
        _add_common(p)
        p.add_argument("--end", choices=("zero", "infinity"), required=True)
        p.add_argument("--q", type=float, required=True)
        p.add_argument("--radii", required=True, help="start:stop:count (log spaced)")
    elif cmd == "verify-estimates":
        _add_common(p)
        p.add_argument("--trials", type=int, default=200)
    elif cmd == "reproduce-examples":
        _add_common(p, need_config=False)
    else:
        _add_common(p)
    args = p.parse_args(argv[1:])
    handler = {
        "check": _cmd_check,
        "exponents": _cmd_exponents,
        "solve": _cmd_solve,
        "probe": _cmd_probe,
        "verify-estimates": _cmd_verify_estimates,
        "reproduce-examples": _cmd_reproduce_examples,
    }[cmd]
    try:
        return handler(args)
    except RadialMPError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
