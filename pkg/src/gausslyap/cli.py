"""Command-line front end.

Subcommands:
    exact       quadrature value plus every applicable closed form, with deltas
    simulate    Monte Carlo estimate(s) of the top exponent(s)
    spike       spike-model numbers: quadrature, exact complex value, expansion
    free-limit  free-probability prediction and the finite-d error
    figure      CSV sweeps reproducing the paper-style figures
    compare     quadrature + closed forms vs Monte Carlo with a 3-SE verdict

Output is JSON by default (CSV for figure sweeps).  Reports are byte-stable:
the same request with the same seed produces identical bytes.  Exit codes:
0 success, 2 validation error, 3 quadrature convergence failure,
4 statistical FAIL (an analytic-vs-MC comparison beyond 5 standard errors).

Environment: LYAP_THREADS caps the worker count for figure sweeps.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import closed_forms as cf
from .asymptotics import (
    free_limit,
    spike_complex_asymptotic,
    spike_exact_complex,
    spike_real_asymptotic,
    spike_tail_integral,
)
from .errors import ConvergenceError, InvalidSpectrumError
from .quadrature import QuadConfig, largest_exponent
from .simulate import SimConfig, mc_largest, mc_top_k
from .spectrum import Beta, SpikeModel, Spectrum, make_spectrum, min_gap, spike_spectrum

__all__ = ["main", "build_parser"]

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_CONVERGENCE = 3
EXIT_STATISTICAL = 4


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _round17(obj):
    """Normalize every float in a JSON-ready structure through 17 significant digits."""
    if isinstance(obj, float):
        return float(_fmt(obj))
    if isinstance(obj, dict):
        return {k: _round17(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round17(v) for v in obj]
    return obj


def _emit(text: str, out_path: str | None) -> None:
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w") as fh:
            fh.write(text)


def _emit_json(doc: dict, out_path: str | None) -> None:
    _emit(json.dumps(_round17(doc), indent=2, sort_keys=True) + "\n", out_path)


def _emit_csv(header: list[str], rows: list[list], out_path: str | None) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) if isinstance(v, float) else v for v in row])
    _emit(buf.getvalue(), out_path)


def _error_exit(kind: str, message: str) -> int:
    sys.stderr.write(json.dumps({"error": {"type": kind, "message": message}}) + "\n")
    return {"validation": EXIT_VALIDATION, "convergence": EXIT_CONVERGENCE}[kind]


def _parse_grid(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _workers() -> int:
    env = os.environ.get("LYAP_THREADS", "")
    if env.strip():
        return max(1, int(env))
    return min(8, os.cpu_count() or 1)


def _parallel_map(fn, items):
    n = _workers()
    if n == 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))  # order-deterministic


# ---------------------------------------------------------------------------
# request plumbing


def _load_spectrum(args) -> Spectrum:
    sources = [args.sigma2 is not None, args.spike_d is not None or args.spike_theta is not None]
    if sum(sources) != 1:
        raise InvalidSpectrumError(
            "provide exactly one spectrum source: --sigma2 or --spike-d/--spike-theta"
        )
    if args.sigma2 is not None:
        text = args.sigma2
        if text.startswith("@"):
            with open(text[1:]) as fh:
                text = fh.read()
        data = json.loads(text)
        if not isinstance(data, list):
            raise InvalidSpectrumError("--sigma2 must be a JSON array of sigma^2 values")
        return make_spectrum(data)
    if args.spike_d is None or args.spike_theta is None:
        raise InvalidSpectrumError("spike source needs both --spike-d and --spike-theta")
    return spike_spectrum(SpikeModel(args.spike_d, args.spike_theta))


def _quad_config(args) -> QuadConfig:
    return QuadConfig(
        rel_tol=args.rel_tol,
        abs_tol=args.abs_tol,
        max_subdivisions=args.max_subdivisions,
    )


def _sim_config(args, top_k: int = 1) -> SimConfig:
    return SimConfig(
        seed=args.seed,
        n_steps=args.steps,
        n_reps=args.reps,
        renorm_every=args.renorm_every,
        top_k=top_k,
        burn_in=args.burn_in,
    )


def _request_echo(args, command: str) -> dict:
    echo = {"command": command, "beta": args.beta, "format": args.format, "seed": args.seed}
    if args.sigma2 is not None:
        echo["sigma2"] = args.sigma2
    if args.spike_d is not None:
        echo["spike_d"] = args.spike_d
        echo["spike_theta"] = args.spike_theta
    return echo


def _applicable_closed_forms(beta: Beta, s: Spectrum) -> list[tuple[str, float]]:
    """Every closed form matching this (beta, d, spectrum shape)."""
    out = []
    d = s.d
    iso = max(s.sigma_sq) - min(s.sigma_sq) == 0.0
    distinct = d >= 2 and min_gap(s) >= 1e-8 * max(s.y)
    if iso:
        sig = s.sigma_sq[0]
        if beta == Beta.REAL:
            out.append(("newman_isotropic", cf.newman_exponents(d, sig)[0]))
        elif beta == Beta.COMPLEX:
            out.append(("complex_isotropic", cf.complex_iso_exponents(d, sig)[0]))
        else:
            out.append(("quaternion_isotropic", cf.quaternion_iso_exponents(d, sig)[0]))
    if beta == Beta.REAL and d == 2:
        out.append(("mannion_2x2", cf.mannion_2x2(s)))
    if beta == Beta.REAL and d == 3:
        y1, y2, _ = sorted(s.y, reverse=True)
        if (y1 - y2) > 1e-8 * y1:
            out.append(("real_3x3_elliptic", cf.real_3x3_elliptic(s)))
    if beta == Beta.REAL and d >= 2 and d % 2 == 0:
        half = sorted(s.y)
        lo, hi = half[: d // 2], half[d // 2:]
        if all(a == b for a, b in zip(lo, hi)) and (
            len(lo) == 1 or min(b - a for a, b in zip(lo, lo[1:])) >= 1e-8 * max(lo)
        ):
            out.append(("real_paired", cf.real_paired_spectrum(lo)))
    if beta == Beta.COMPLEX and distinct:
        out.append(("forrester_k1", cf.forrester_kth_complex(1, s)))
    if beta == Beta.QUATERNION and (d == 1 or distinct):
        out.append(("quaternion_residue", cf.quaternion_largest(s)))
    return out


# ---------------------------------------------------------------------------
# subcommands


def _cmd_exact(args) -> int:
    s = _load_spectrum(args)
    beta = Beta(args.beta)
    quad = largest_exponent(beta, s, _quad_config(args))
    results = [{"method": "quadrature", "value": quad.value, "quad_error": quad.quad_error}]
    deltas = {}
    for name, value in _applicable_closed_forms(beta, s):
        results.append({"method": f"closed_form:{name}", "value": value})
        deltas[name] = value - quad.value
    doc = {
        "request": _request_echo(args, "exact"),
        "results": results,
        "deltas": deltas,
        "verdict": None,
    }
    _emit_json(doc, args.out)
    return EXIT_OK


def _cmd_simulate(args) -> int:
    s = _load_spectrum(args)
    beta = Beta(args.beta)
    results = []
    if args.top_k > 1:
        ests = mc_top_k(beta, s, _sim_config(args, top_k=args.top_k))
        for i, est in enumerate(ests, start=1):
            results.append(
                {"method": "monte_carlo", "exponent_index": i,
                 "value": est.value, "std_error": est.std_error}
            )
    else:
        est = mc_largest(beta, s, _sim_config(args))
        results.append({"method": "monte_carlo", "value": est.value, "std_error": est.std_error})
    doc = {
        "request": _request_echo(args, "simulate"),
        "results": results,
        "deltas": {},
        "verdict": None,
    }
    _emit_json(doc, args.out)
    return EXIT_OK


def _cmd_spike(args) -> int:
    if args.spike_d is None or args.spike_theta is None:
        raise InvalidSpectrumError("spike command needs --spike-d and --spike-theta")
    model = SpikeModel(args.spike_d, args.spike_theta)
    s = spike_spectrum(model)
    beta = Beta(args.beta)
    quad = largest_exponent(beta, s, _quad_config(args))
    results = [{"method": "quadrature", "value": quad.value, "quad_error": quad.quad_error}]
    if beta == Beta.COMPLEX:
        results.append(
            {"method": "closed_form:spike_exact_complex",
             "value": 0.5 * spike_exact_complex(model.theta, model.d)}
        )
        results.append(
            {"method": "asymptotic", "value": 0.5 * spike_complex_asymptotic(model.d, model.t)}
        )
    elif beta == Beta.REAL:
        results.append(
            {"method": "asymptotic", "value": 0.5 * spike_real_asymptotic(model.d, model.t)}
        )
    results.append(
        {"method": "closed_form:free_prediction", "value": free_limit(math.fsum(s.sigma_sq))}
    )
    deltas = {r["method"]: r["value"] - quad.value for r in results[1:]}
    doc = {
        "request": _request_echo(args, "spike"),
        "results": results,
        "deltas": deltas,
        "verdict": None,
    }
    _emit_json(doc, args.out)
    return EXIT_OK


def _cmd_free_limit(args) -> int:
    s = _load_spectrum(args)
    beta = Beta(args.beta)
    lam = math.fsum(s.sigma_sq)  # trace of Sigma = (1/d) sum of d*sigma_i^2
    prediction = free_limit(lam)
    quad = largest_exponent(beta, s, _quad_config(args))
    doc = {
        "request": _request_echo(args, "free-limit"),
        "results": [
            {"method": "quadrature", "value": quad.value, "quad_error": quad.quad_error},
            {"method": "closed_form:free_prediction", "value": prediction},
        ],
        "deltas": {"free_prediction": quad.value - prediction},
        "verdict": None,
    }
    _emit_json(doc, args.out)
    return EXIT_OK


def _figure_spike(args) -> tuple[list[str], list[list]]:
    t_grid = _parse_grid(args.grid) if args.grid else list(
        np.logspace(math.log10(0.1), math.log10(10.0), 20)
    )
    cfgq = _quad_config(args)
    points = [
        (t, d, beta)
        for d in (2, 100)
        for beta in (1, 2)
        for t in t_grid
    ]

    def row(point):
        t, d, beta = point
        theta = d / t
        s = make_spectrum([1.0] * (d - 1) + [theta])
        exact = largest_exponent(beta, s, cfgq).value
        # dimension-free tail + log d: valid as a curve even where t >= d
        asym = 0.5 * (math.log(d) + spike_tail_integral(beta, t))
        return [float(t), d, beta, exact, asym, 0.5 * math.log1p(1.0 / t)]

    return (
        ["t", "d", "beta", "mu1_exact", "mu1_asymptotic", "free_prediction"],
        _parallel_map(row, points),
    )


def _figure_free_error(args) -> tuple[list[str], list[list]]:
    d_grid = [int(v) for v in _parse_grid(args.grid)] if args.grid else [10, 20, 50, 100, 200]
    cfgq = _quad_config(args)
    profiles = {
        "half_1_3": lambda d: [1.0] * (d // 2) + [3.0] * (d - d // 2),
        "uniform_1_3": lambda d: list(np.linspace(1.0, 3.0, d)),
    }
    points = [
        (d, beta, name)
        for name in sorted(profiles)
        for beta in (1, 2)
        for d in d_grid
    ]

    def row(point):
        d, beta, name = point
        thetas = profiles[name](d)
        s = make_spectrum([v / d for v in thetas])
        err = largest_exponent(beta, s, cfgq).value - free_limit(math.fsum(thetas) / d)
        return [d, beta, name, err]

    return ["d", "beta", "profile", "error"], _parallel_map(row, points)


def _figure_beta_compare(args) -> tuple[list[str], list[list]]:
    theta_grid = _parse_grid(args.grid) if args.grid else list(np.linspace(1.0, 10.0, 10))
    cfgq = _quad_config(args)
    points = [
        (i, theta, beta)
        for i, (theta, beta) in enumerate(
            (theta, beta) for beta in (1, 2, 4) for theta in theta_grid
        )
    ]

    def row(point):
        index, theta, beta = point
        s = make_spectrum([1.0, theta])
        exact = largest_exponent(beta, s, cfgq).value
        cfg = SimConfig(
            seed=args.seed + index + 1, n_steps=args.steps, n_reps=args.reps,
            renorm_every=args.renorm_every, burn_in=args.burn_in,
        )
        est = mc_largest(beta, s, cfg)
        return [float(theta), beta, exact, est.value, est.std_error]

    return (
        ["theta", "beta", "mu1", "mu1_mc", "mc_std_error"],
        _parallel_map(row, points),
    )


def _cmd_figure(args) -> int:
    kinds = {
        "spike": _figure_spike,
        "free-error": _figure_free_error,
        "beta-compare": _figure_beta_compare,
    }
    header, rows = kinds[args.which](args)
    _emit_csv(header, rows, args.out)
    return EXIT_OK


def _cmd_compare(args) -> int:
    s = _load_spectrum(args)
    beta = Beta(args.beta)
    quad = largest_exponent(beta, s, _quad_config(args))
    results = [{"method": "quadrature", "value": quad.value, "quad_error": quad.quad_error}]
    for name, value in _applicable_closed_forms(beta, s):
        results.append({"method": f"closed_form:{name}", "value": value})
    comparisons = []
    if args.top_k > 1:
        ests = mc_top_k(beta, s, _sim_config(args, top_k=args.top_k))
        for i, est in enumerate(ests, start=1):
            if i == 1:
                analytic = quad.value
                reference = "quadrature"
            elif beta == Beta.COMPLEX:
                analytic = cf.forrester_kth_complex(i, s)
                reference = f"forrester_k{i}"
            elif max(s.sigma_sq) == min(s.sigma_sq):
                iso = {
                    Beta.REAL: cf.newman_exponents,
                    Beta.QUATERNION: cf.quaternion_iso_exponents,
                }[beta](s.d, s.sigma_sq[0])
                analytic = iso[i - 1]
                reference = f"isotropic_k{i}"
            else:
                continue  # no analytic reference for this exponent
            comparisons.append((f"mu_{i}", analytic, reference, est))
            results.append(
                {"method": "monte_carlo", "exponent_index": i,
                 "value": est.value, "std_error": est.std_error}
            )
    else:
        est = mc_largest(beta, s, _sim_config(args))
        comparisons.append(("mu_1", quad.value, "quadrature", est))
        results.append({"method": "monte_carlo", "value": est.value, "std_error": est.std_error})

    deltas = {}
    worst = 0.0
    for label, analytic, reference, est in comparisons:
        z = abs(est.value - analytic) / est.std_error
        worst = max(worst, z)
        deltas[label] = {
            "analytic": analytic,
            "reference": reference,
            "monte_carlo": est.value,
            "std_error": est.std_error,
            "z_score": z,
            "pass_3se": bool(z <= 3.0),
        }
    verdict = "PASS" if worst <= 3.0 else "FAIL"
    doc = {
        "request": _request_echo(args, "compare"),
        "results": results,
        "deltas": deltas,
        "verdict": verdict,
    }
    _emit_json(doc, args.out)
    return EXIT_STATISTICAL if worst > 5.0 else EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gausslyap",
        description="Lyapunov exponents of products of Gaussian random matrices",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, figure=False):
        p.add_argument("--beta", type=int, choices=[1, 2, 4], default=1,
                       help="ensemble: 1 real, 2 complex, 4 quaternion")
        p.add_argument("--sigma2", type=str, default=None,
                       help="covariance eigenvalues as a JSON array, or @file")
        p.add_argument("--spike-d", type=int, default=None, help="spike model dimension")
        p.add_argument("--spike-theta", type=float, default=None, help="spike eigenvalue > 1")
        p.add_argument("--rel-tol", type=float, default=1e-10)
        p.add_argument("--abs-tol", type=float, default=1e-12)
        p.add_argument("--max-subdivisions", type=int, default=2000)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--steps", type=int, default=100_000)
        p.add_argument("--reps", type=int, default=32)
        p.add_argument("--renorm-every", type=int, default=1)
        p.add_argument("--burn-in", type=int, default=100)
        p.add_argument("--top-k", type=int, default=1)
        p.add_argument("--format", choices=["json", "csv"],
                       default="csv" if figure else "json")
        p.add_argument("--out", type=str, default=None, help="output path (default stdout)")

    p = sub.add_parser("exact", help="quadrature plus applicable closed forms")
    add_common(p)
    p.set_defaults(func=_cmd_exact)

    p = sub.add_parser("simulate", help="Monte Carlo estimate")
    add_common(p)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("spike", help="spike-model values and expansion")
    add_common(p)
    p.set_defaults(func=_cmd_spike)

    p = sub.add_parser("free-limit", help="free-probability prediction and error")
    add_common(p)
    p.set_defaults(func=_cmd_free_limit)

    p = sub.add_parser("figure", help="CSV data for the paper-style figures")
    p.add_argument("which", choices=["spike", "free-error", "beta-compare"])
    p.add_argument("--grid", type=str, default=None,
                   help="comma-separated grid override (t, d, or theta values)")
    add_common(p, figure=True)
    p.set_defaults(func=_cmd_figure)

    p = sub.add_parser("compare", help="analytic vs Monte Carlo with PASS/FAIL verdict")
    add_common(p)
    p.set_defaults(func=_cmd_compare)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InvalidSpectrumError, ValueError, OSError, json.JSONDecodeError) as exc:
        return _error_exit("validation", str(exc))
    except ConvergenceError as exc:
        return _error_exit("convergence", str(exc))


if __name__ == "__main__":
    sys.exit(main())
