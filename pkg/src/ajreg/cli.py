"""Command-line front end.

Exit status: 0 on success, 2 on usage errors (bad flags, invalid parameters,
points outside the cube), 3 on numerical failures (rank deficiency, n < M,
quadrature budget exceeded).
"""
import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import _io, harness
from .analysis import chernoff_bound, project, projection_error, spectrum
from .estimator import SOLVERS, FittedModel, build_design, fit, gram, mse, predict, predict_truncated
from .exceptions import NumericalError
from .polynomials import JacobiParams
from .sampling import apply_target, read_csv, sample_beta
from .space import dimension, enumerate_space

EXIT_USAGE = 2
EXIT_NUMERICAL = 3


def _emit(text, out=None):
    if out:
        _io.atomic_write_text(out, text)
    else:
        sys.stdout.write(text)


def _space_args(p, with_n=False):
    p.add_argument("--N", type=int, required=True, help="total degree cap")
    p.add_argument("--m", type=int, required=True, help="interaction order, 1 <= m <= min(d, N)")
    p.add_argument("--d", type=int, required=True, help="input dimension")
    p.add_argument("--alpha", type=float, default=-0.5, help="Jacobi parameter >= -1/2 (default -0.5)")
    if with_n:
        p.add_argument("--n", type=int, required=True, help="number of sample points")


def cmd_dim(args):
    if args.list:
        _emit(_io.dumps(enumerate_space(args.N, args.m, args.d, args.alpha).to_dict()))
    else:
        print(dimension(args.N, args.m, args.d))


def cmd_sample(args):
    sample = sample_beta(args.n, args.d, args.alpha, args.seed)
    if args.target:
        target = harness.get_target(args.target, args.d, args.domain)
        noise_seed = args.seed if args.noise_seed is None else args.noise_seed
        sample = apply_target(sample, target, args.sigma, noise_seed)
    _emit(sample.to_csv(), args.out)


def _resolve(base, path):
    path = Path(path)
    return path if path.is_absolute() else base / path


def _load_fit_config(path):
    path = Path(path)
    with open(path) as fh:
        cfg = json.load(fh)
    unknown = set(cfg) - {"space", "data", "solver", "K_f", "test", "output"}
    if unknown:
        raise ValueError(f"unknown fit config keys: {sorted(unknown)}")
    return cfg, path.parent


def cmd_fit(args):
    cfg, base = _load_fit_config(args.config)
    sp = cfg["space"]
    space = enumerate_space(sp["N"], sp["m"], sp["d"], sp.get("alpha", -0.5))
    data = cfg["data"]
    truth = None
    if "csv" in data:
        train = read_csv(_resolve(base, data["csv"]))
        if train.responses is None:
            raise ValueError("training CSV needs a y column")
    elif "target" in data:
        truth = harness.get_target(data["target"], space.d, data.get("domain", "unit"))
        smp = data.get("sampling", {})
        seed = int(smp.get("seed", 0))
        train = sample_beta(int(smp["n"]), space.d, space.params, seed)
        train = apply_target(train, truth, float(smp.get("sigma", 0.0)), smp.get("noise_seed", seed))
    else:
        raise ValueError("data needs either 'csv' or 'target'")

    model = fit(build_design(space, train), train.responses, cfg.get("solver", SOLVERS[0]), cfg.get("K_f"))
    report = {"kappa2_G": model.diagnostics["kappa2_G"], "residual_norm": model.diagnostics["residual_norm"]}

    test = cfg.get("test")
    if test:
        if "csv" in test:
            ts = read_csv(_resolve(base, test["csv"]))
            report["test_mse"] = float(np.mean((predict(model, ts.points) - ts.responses) ** 2))
        elif truth is not None:
            ts = sample_beta(int(test["n_test"]), space.d, space.params, int(test.get("seed", 0)), role="test")
            report["test_mse"] = mse(model, ts, truth)
            report["test_mse_truncated"] = mse(model, ts, truth, truncated=True)
        else:
            raise ValueError("test needs a csv or a target-driven data section")

    out = args.out or cfg.get("output") or base / "model.json"
    _io.write_json(_resolve(base, out) if not args.out else out, model.to_dict())
    sys.stdout.write(_io.dumps(report))


def cmd_predict(args):
    with open(args.model) as fh:
        model = FittedModel.from_dict(json.load(fh))
    pts = read_csv(args.csv).points
    yhat = predict_truncated(model, pts) if args.truncated else predict(model, pts)
    header = [f"x{i + 1}" for i in range(pts.shape[1])] + ["yhat"]
    _emit(_io.csv_text(header, np.hstack([pts, yhat[:, None]]).tolist()), args.out)


def cmd_spectrum(args):
    space = enumerate_space(args.N, args.m, args.d, args.alpha)
    if args.csv_input:
        sample = read_csv(args.csv_input)
    else:
        sample = sample_beta(args.n, args.d, space.params, args.seed)
    meta = {"N": args.N, "m": args.m, "d": args.d, "n": sample.n, "alpha": space.alpha, "seed": args.seed}
    rep = spectrum(gram(build_design(space, sample)), meta)
    if args.csv:
        _io.atomic_write_text(args.csv, rep.to_csv())
    _emit(_io.dumps(rep.to_dict()), args.out)


def cmd_bound(args):
    b = chernoff_bound(args.N, args.m, args.d, args.n, JacobiParams(args.alpha), args.delta)
    sys.stdout.write(_io.dumps(b.to_dict()))


def cmd_project(args):
    space = enumerate_space(args.N, args.m, args.d, args.alpha)
    target = harness.get_target(args.target, args.d, args.domain)
    proj = project(space, target, args.method, args.budget, args.q, args.seed)
    out = {
        "space": space.to_dict(),
        "method": proj.method,
        "nodes": proj.nodes,
        "coefficients": proj.coefficients,
    }
    if proj.stderr is not None:
        out["stderr"] = proj.stderr
    else:
        out["projection_error_sq"] = projection_error(space, target, proj.coefficients, q=args.q)
    _emit(_io.dumps(out), args.out)


def cmd_experiment(args):
    if args.config:
        config = harness.ExperimentConfig.from_json(args.config)
    elif args.preset:
        config = harness.preset(args.preset)
    else:
        raise ValueError("experiment needs --config or --preset")
    if args.seeds is not None:
        config.seeds = list(range(args.seeds))
        config.validate()
    outdir = args.out or config.output
    if not outdir:
        raise ValueError("experiment needs --out (or 'output' in the config)")
    records, spectra = harness.run(config, args.jobs)
    paths = harness.write_outputs(config, records, spectra, outdir)
    sys.stdout.write(Path(paths[0]).read_text())


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ajreg", description="Least-squares regression on ANOVA Jacobi polynomial spaces."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dim", help="dimension of the ANOVA space")
    _space_args(p)
    p.add_argument("--list", action="store_true", help="print the basis as JSON instead")
    p.set_defaults(func=cmd_dim)

    p = sub.add_parser("sample", help="draw a Beta design (optionally with responses) as CSV")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--alpha", type=float, default=-0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--target", help="named target (additive_4d, kriging_4d) or expression in x1..xd")
    p.add_argument("--domain", choices=harness.DOMAINS, default="unit",
                   help="evaluate the target on [0,1] ('unit', mapped) or on [-1,1] ('cube')")
    p.add_argument("--sigma", type=float, default=0.0, help="Gaussian noise standard deviation")
    p.add_argument("--noise-seed", type=int, default=None, help="noise stream seed (default: --seed)")
    p.add_argument("--out", help="output CSV (default stdout)")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("fit", help="fit the estimator from a fit.json config")
    p.add_argument("--config", required=True, help="fit.json path")
    p.add_argument("--out", help="model JSON path (default: config 'output' or model.json beside it)")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("predict", help="evaluate a fitted model on CSV points")
    p.add_argument("--model", required=True)
    p.add_argument("--csv", required=True, help="CSV with x1..xd columns")
    p.add_argument("--truncated", action="store_true", help="clamp predictions to [-K_f, K_f]")
    p.add_argument("--out", help="output CSV (default stdout)")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("spectrum", help="eigenvalues and condition number of the Gram matrix")
    _space_args(p)
    p.add_argument("--n", type=int, default=None, help="sample size (ignored with --csv-input)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv-input", help="use design points from this CSV instead of sampling")
    p.add_argument("--csv", help="also write index,eigenvalue CSV here")
    p.add_argument("--out", help="JSON report path (default stdout)")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("bound", help="matrix Chernoff bound on the condition number")
    _space_args(p, with_n=True)
    p.add_argument("--delta", type=float, required=True, help="deviation parameter in (0, 1]")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("project", help="orthogonal projection coefficients of a target")
    _space_args(p)
    p.add_argument("--target", required=True)
    p.add_argument("--domain", choices=harness.DOMAINS, default="unit")
    p.add_argument("--method", choices=["auto", "tensor-quadrature", "monte-carlo"], default="auto")
    p.add_argument("--budget", type=int, default=None,
                   help="max tensor nodes (quadrature) or number of draws (monte-carlo)")
    p.add_argument("--q", type=int, default=None, help="quadrature points per axis (default N + 12)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="JSON path (default stdout)")
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("experiment", help="run an experiment sweep and write tables")
    p.add_argument("--config", help="experiment JSON config")
    p.add_argument("--preset", choices=sorted(harness.PRESETS))
    p.add_argument("--seeds", type=int, default=None, help="override: use seeds 0..SEEDS-1")
    p.add_argument("--out", help="output directory")
    p.add_argument("--jobs", type=int, default=1, help="worker threads (AJREG_THREADS overrides)")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "spectrum" and args.n is None and not args.csv_input:
        parser.error("spectrum needs --n or --csv-input")
    try:
        args.func(args)
    except NumericalError as exc:
        print(f"ajreg: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, KeyError, OSError) as exc:
        print(f"ajreg: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return 0


if __name__ == "__main__":
    sys.exit(main())
