"""Command-line entry point: ``moment-wasserstein <subcommand> ...``.

Generator specs (``orlicz --input`` and the ``generator`` key of experiment
configs) use ``family[:key=value,...]``:

    iid_gaussian (gaussian)         d
    iid_uniform (uniform)           d
    ar1_gaussian (ar1)              rho, d
    common_shock (shock)            sigma_z, d
    wigner_spectrum (wigner)
    bounded_exchangeable (exchangeable)
    rank_one                        angle, polar, d
    student_t                       dof   (orlicz only; diagnostic)
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import harness
from .errors import MomentWassersteinError
from .generators import generate_row, parse_generator
from .jackson import NAMED_FUNCTIONS, approximate_lipschitz, measure_sup_error
from .measure import EmpiricalMeasure, w1_distance
from .orlicz import orlicz_norm_empirical, student_t_sample, verify_moment_bound, verify_tail_bound
from .sliced import VectorMeasure, build_sphere_net, sliced_sup_w1


def _read_table(path) -> np.ndarray:
    data = np.loadtxt(path, delimiter=",", ndmin=2, comments="#")
    if data.size == 0:
        raise MomentWassersteinError(f"{path}: no data")
    return data


def _scalar_measure(path) -> EmpiricalMeasure:
    data = _read_table(path)
    if data.shape[1] == 1:
        return EmpiricalMeasure.from_samples(data[:, 0])
    if data.shape[1] == 2:
        return EmpiricalMeasure.from_samples(data[:, 0], data[:, 1])
    raise MomentWassersteinError(f"{path}: expected one value per line and an optional weight column")


def _vector_measure(path, weighted: bool) -> VectorMeasure:
    data = _read_table(path)
    if weighted:
        return VectorMeasure.from_samples(data[:, :-1], data[:, -1])
    return VectorMeasure.from_samples(data)


def _print_json(obj) -> None:
    print(json.dumps(harness._jsonable(obj), indent=2))


def cmd_approx(args) -> int:
    if args.function not in NAMED_FUNCTIONS:
        raise MomentWassersteinError(f"unknown function {args.function!r}; choose from {sorted(NAMED_FUNCTIONS)}")
    f = NAMED_FUNCTIONS[args.function]
    approx = approximate_lipschitz(f, args.B, args.m)
    err = measure_sup_error(f, approx, args.grid)
    if args.json:
        _print_json({"function": args.function, "measured_sup_error": err, **approx.to_dict()})
        return 0
    print(f"function={args.function} B={args.B} m={args.m}")
    print(f"measured sup error = {err:.6e}   bound 18B/m = {approx.sup_error_bound:.6e}")
    print(f"{'j':>3} {'c_j':>24} {'6B*3^(m-j)':>14} {'margin':>14}")
    for j, (c, b, mg) in enumerate(zip(approx.coeffs, approx.coeff_bounds, approx.coeff_margins)):
        print(f"{j:>3} {c:>24.16e} {b:>14.6e} {mg:>14.6e}")
    return 0


def _orlicz_sample(args) -> np.ndarray:
    path = Path(args.input)
    if path.exists():
        return _read_table(path)[:, 0]
    family, _, rest = args.input.partition(":")
    if family == "student_t":
        dof = float(rest.partition("=")[2]) if rest else 3.0
        return student_t_sample(dof, args.n, args.seed)
    spec = parse_generator(args.input, n=args.n, seed=args.seed)
    row = generate_row(spec)
    if row.ndim != 1:
        raise MomentWassersteinError("orlicz needs a scalar generator")
    return row


def cmd_orlicz(args) -> int:
    x = _orlicz_sample(args)
    est = orlicz_norm_empirical(x, args.r, args.tol)
    out = {"r": args.r, "sample_size": est.sample_size, "K": est.K, "lower": est.lower}
    if args.verify_moments:
        rep = verify_moment_bound(x, args.r, est.K)
        out["moment_ratios"] = rep.ratios
        out["fitted_C1"] = rep.fitted_C1
    if args.verify_tails:
        t = est.K * np.linspace(0.5, 4.0, 8) if est.K > 0 else np.linspace(0.5, 4.0, 8)
        rep = verify_tail_bound(x, args.r, est.K, t)
        out["tail_t"] = rep.t_grid
        out["tail_empirical"] = rep.empirical
        out["fitted_c"] = rep.fitted_c
    _print_json(out)
    return 0


def cmd_w1(args) -> int:
    print(repr(w1_distance(_scalar_measure(args.a), _scalar_measure(args.b))))
    return 0


def cmd_sliced(args) -> int:
    mu = _vector_measure(args.a, args.weighted)
    nu = _vector_measure(args.b, args.weighted)
    net = build_sphere_net(mu.d, args.epsilon)
    res = sliced_sup_w1(mu, nu, net)
    _print_json({
        "net_size": len(net),
        "epsilon": net.epsilon,
        "net_sup": res.value,
        "slack": res.slack,
        "argmax": net.directions[int(np.argmax(res.per_direction))],
    })
    return 0


def _run(args, estimate: bool) -> int:
    config = harness.ExperimentConfig.from_json(args.config)
    if args.output:
        config.output = args.output
    report = harness.run_experiment(config, estimate=estimate)
    if config.output is None:
        sys.stdout.write(report.to_csv())
    else:
        print(f"wrote {Path(config.output).with_suffix('.csv')} and .json")
    print(json.dumps(harness._jsonable(report.flags)), file=sys.stderr)
    return report.exit_code


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="moment-wasserstein",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("approx", help="certified Chebyshev-Jackson approximation of a named function")
    a.add_argument("--function", required=True, help=f"one of {sorted(NAMED_FUNCTIONS)}")
    a.add_argument("--B", type=float, required=True)
    a.add_argument("--m", type=int, required=True)
    a.add_argument("--grid", type=int, default=100_000)
    a.add_argument("--json", action="store_true")
    a.set_defaults(func=cmd_approx)

    o = sub.add_parser("orlicz", help="empirical truncated Orlicz norm")
    o.add_argument("--input", required=True, help="CSV path or generator spec")
    o.add_argument("--r", type=float, required=True)
    o.add_argument("--n", type=int, default=10_000, help="sample size for generator input")
    o.add_argument("--seed", type=int, default=0)
    o.add_argument("--tol", type=float, default=1e-9)
    o.add_argument("--verify-moments", action="store_true")
    o.add_argument("--verify-tails", action="store_true")
    o.set_defaults(func=cmd_orlicz)

    w = sub.add_parser("w1", help="exact 1D Wasserstein-1 distance between two CSV samples")
    w.add_argument("--a", required=True)
    w.add_argument("--b", required=True)
    w.set_defaults(func=cmd_w1)

    s = sub.add_parser("sliced", help="max over a sphere net of projected W1")
    s.add_argument("--a", required=True)
    s.add_argument("--b", required=True)
    s.add_argument("--epsilon", type=float, required=True)
    s.add_argument("--weighted", action="store_true", help="last CSV column holds weights")
    s.set_defaults(func=cmd_sliced)

    for name, est in (("experiment", True), ("certify", False)):
        e = sub.add_parser(name, help="run a JSON-configured experiment" if est else "hypotheses and bound only")
        e.add_argument("--config", required=True)
        e.add_argument("--output", help="overrides the config's output path")
        e.set_defaults(func=lambda args, est=est: _run(args, est))
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (MomentWassersteinError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return harness.EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
