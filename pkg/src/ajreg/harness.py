"""Reproducible experiment sweeps: condition numbers and regression MSE tables.

An :class:`ExperimentConfig` sweeps ``designs x alphas x N`` (and ``sigmas``
for regression runs) over a list of seeds.  Without a target the sweep
studies the spectrum of the Gram matrix; with a target it fits the estimator
and measures the test MSE against the noiseless truth.  Three presets mirror
the reference studies of this package.
"""
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from . import _io
from .analysis import spectrum
from .estimator import SOLVERS, build_design, fit, gram, mse
from .polynomials import JacobiParams
from .sampling import apply_target, sample_beta
from .space import enumerate_space

__all__ = [
    "TargetFunction",
    "target_additive_4d",
    "target_kriging_4d",
    "get_target",
    "ExperimentConfig",
    "preset",
    "run",
    "run_example1",
    "run_example2",
    "run_example3",
    "write_outputs",
    "resolve_jobs",
]

DOMAINS = ("unit", "cube")


def _to_domain(X, domain):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if np.any(np.abs(X) > 1):
        raise ValueError("target evaluated outside [-1, 1]^d")
    if domain == "unit":
        return 0.5 * (X + 1.0)
    if domain == "cube":
        return X
    raise ValueError(f"domain must be one of {DOMAINS}, got {domain!r}")


def target_additive_4d(X, domain="unit"):
    """Additive test function of four variables.

    With ``domain="unit"`` cube coordinates are first mapped to [0, 1] by
    ``t -> (t + 1) / 2``; ``"cube"`` evaluates the formula on the raw
    coordinates.
    """
    x, y, z, t = _to_domain(X, domain).T
    sz = np.sin(2 * np.pi * z)
    st, ct = np.sin(2 * np.pi * t), np.cos(2 * np.pi * t)
    return (
        x + (2 * y - 1) ** 2 + sz / (2 - sz)
        + 0.1 * st + 0.2 * ct + 0.3 * st**2 + 0.4 * ct**3 + 0.5 * st**3
    )


def target_kriging_4d(X, domain="unit"):
    """Two-bump Kriging test function of four variables (same ``domain`` rule)."""
    x1, x2, x3, x4 = _to_domain(X, domain).T
    tail = -0.5 * (x3**2 + x4**2)
    return (
        1.0
        + np.exp(-2 * ((x1 - 1) ** 2 + x2**2) + tail)
        + np.exp(-2 * (x1**2 + (x2 - 1) ** 2) + tail)
    )


_NAMED = {"additive_4d": (target_additive_4d, 4), "kriging_4d": (target_kriging_4d, 4)}

_EXPR_NAMES = {
    name: getattr(np, name)
    for name in ("sin", "cos", "tan", "exp", "log", "sqrt", "abs", "tanh", "arctan", "pi", "e")
}


@dataclass(frozen=True)
class TargetFunction:
    """A named regression function, vectorized over rows of an (n, d) array."""

    name: str
    d: int
    domain: str = "unit"

    def __post_init__(self):
        if self.domain not in DOMAINS:
            raise ValueError(f"domain must be one of {DOMAINS}")

    def __call__(self, X):
        if self.name in _NAMED:
            return _NAMED[self.name][0](X, self.domain)
        return self._eval_expression(X)

    def _eval_expression(self, X):
        Z = _to_domain(X, self.domain)
        env = dict(_EXPR_NAMES)
        env.update({f"x{i + 1}": Z[:, i] for i in range(Z.shape[1])})
        out = eval(self.name, {"__builtins__": {}}, env)  # noqa: S307 - numeric namespace only
        return np.broadcast_to(np.asarray(out, dtype=float), (Z.shape[0],)).copy()


def get_target(name, d=None, domain="unit"):
    """Resolve a named target or an expression in ``x1..xd`` (e.g. ``"x1 * cos(x2)"``)."""
    if name in _NAMED:
        arity = _NAMED[name][1]
        if d is not None and d != arity:
            raise ValueError(f"target {name} takes d={arity}, config has d={d}")
        return TargetFunction(name, arity, domain)
    if d is None:
        raise ValueError("expression targets need the dimension d")
    target = TargetFunction(name, int(d), domain)
    target(np.zeros((1, int(d))))  # fail early on a malformed expression
    return target


@dataclass
class ExperimentConfig:
    experiment: str = "custom"
    N: list = field(default_factory=lambda: [2, 3, 4, 5])
    m: int = 2
    designs: list = field(default_factory=lambda: [[4, 900]])
    alphas: list = field(default_factory=lambda: [-0.5])
    sigmas: list = field(default_factory=lambda: [0.0])
    n_test: int = None
    seeds: list = field(default_factory=lambda: list(range(20)))
    target: str = None
    domain: str = "unit"
    solver: str = "orthogonal-factorization"
    spectra: bool = False
    output: str = None

    def __post_init__(self):
        self.N = [int(v) for v in self.N]
        self.designs = [[int(d), int(n)] for d, n in self.designs]
        self.alphas = [JacobiParams(a).alpha for a in self.alphas]
        self.sigmas = [float(s) for s in self.sigmas]
        self.seeds = [int(s) for s in self.seeds]
        self.validate()

    def validate(self):
        if not self.seeds:
            raise ValueError("seeds must be nonempty")
        if any(s < 0 for s in self.sigmas):
            raise ValueError("sigma entries must be >= 0")
        if self.solver not in SOLVERS:
            raise ValueError(f"solver must be one of {SOLVERS}")
        for d, n in self.designs:
            if n < 1:
                raise ValueError("n must be >= 1")
            for N in self.N:
                enumerate_space(N, self.m, d)  # raises on an invalid triple
            if self.target is not None:
                get_target(self.target, d, self.domain)

    @property
    def is_regression(self):
        return self.target is not None

    def to_dict(self):
        """Everything needed to re-derive the results (the output path is not)."""
        out = asdict(self)
        out.pop("output")
        return out

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        base = data.pop("preset", None) or (
            data.get("experiment") if data.get("experiment") in PRESETS else None
        )
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        if base is not None:
            return replace(preset(base), **data)
        return cls(**data)

    @classmethod
    def from_json(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


PRESETS = {
    "example1": dict(
        experiment="example1", N=[2, 3, 4, 5], m=2, designs=[[4, 900], [6, 1600]],
        alphas=[-0.5, 0.5], seeds=list(range(50)), spectra=True,
    ),
    "example2": dict(
        experiment="example2", N=[4, 6, 8, 10], m=1, designs=[[4, 900]], alphas=[-0.5],
        sigmas=[0.0, 0.1, 0.5], n_test=900, seeds=list(range(20)),
        target="additive_4d", domain="unit",
    ),
    "example3": dict(
        experiment="example3", N=[4, 5, 6], m=2, designs=[[4, 1600]], alphas=[-0.5],
        sigmas=[0.0, 0.1, 0.5], n_test=400, seeds=list(range(20)),
        target="kriging_4d", domain="cube",
    ),
}


def preset(name, **overrides):
    """Config for one of ``example1``, ``example2``, ``example3``."""
    if name not in PRESETS:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    return ExperimentConfig(**{**PRESETS[name], **overrides})


def resolve_jobs(jobs=None):
    """Worker count: ``AJREG_THREADS`` overrides ``jobs``; default 1."""
    env = os.environ.get("AJREG_THREADS")
    if env:
        return max(1, int(env))
    return max(1, int(jobs or 1))


def _map(fn, items, jobs):
    if jobs <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _condition_trial(space, n, seed):
    sample = sample_beta(n, space.d, space.params, seed)
    return spectrum(gram(build_design(space, sample)))


def _regression_trial(space, n, n_test, target, sigma, solver, seed):
    train = apply_target(sample_beta(n, space.d, space.params, seed), target, sigma)
    model = fit(build_design(space, train), train.responses, solver)
    test = sample_beta(n_test, space.d, space.params, seed, role="test")
    return (
        mse(model, test, target),
        mse(model, test, target, truncated=True),
        model.diagnostics["kappa2_G"],
    )


def _summary(values, prefix):
    v = np.asarray(values, dtype=float)
    return {
        f"{prefix}_mean": float(v.mean()),
        f"{prefix}_median": float(np.median(v)),
        f"{prefix}_sd": float(v.std(ddof=1)) if v.size > 1 else 0.0,
    }


def run(config, jobs=None):
    """Execute a sweep; returns ``(records, spectra)``.

    ``spectra`` maps a file stem to a :class:`~ajreg.analysis.SpectrumReport`
    (condition studies with ``config.spectra`` only).  Results are identical
    for any worker count.
    """
    jobs = resolve_jobs(jobs)
    records, spectra = [], {}
    for d, n in config.designs:
        for alpha in config.alphas:
            for N in config.N:
                space = enumerate_space(N, config.m, d, alpha)
                base = {"d": d, "n": n, "alpha": alpha, "N": N, "m": config.m, "M": space.size}
                if config.is_regression:
                    records.extend(_regression_rows(config, space, base, n, jobs))
                    continue
                reports = _map(lambda s: _condition_trial(space, n, s), config.seeds, jobs)
                kappas = [r.kappa2 for r in reports]
                rec = dict(base, seeds=config.seeds, kappa=kappas)
                rec.update(_summary(kappas, "kappa"))
                rec["lambda_min_median"] = float(np.median([r.lambda_min for r in reports]))
                rec["lambda_max_median"] = float(np.median([r.lambda_max for r in reports]))
                records.append(rec)
                if config.spectra:
                    for s, rep in zip(config.seeds, reports):
                        spectra[f"{_stem(config.experiment, d, N, config.m, alpha)}_seed{s}"] = rep
    return records, spectra


def _regression_rows(config, space, base, n, jobs):
    target = get_target(config.target, space.d, config.domain)
    n_test = n if config.n_test is None else config.n_test
    rows = []
    for sigma in config.sigmas:
        out = _map(
            lambda s: _regression_trial(space, n, n_test, target, sigma, config.solver, s),
            config.seeds,
            jobs,
        )
        rec = dict(base, n_test=n_test, sigma=sigma, seeds=config.seeds)
        rec["mse"] = [o[0] for o in out]
        rec["mse_truncated"] = [o[1] for o in out]
        rec.update(_summary(rec["mse"], "mse"))
        rec.update(_summary(rec["mse_truncated"], "mse_truncated"))
        rec["kappa_median"] = float(np.median([o[2] for o in out]))
        rows.append(rec)
    return rows


def run_example1(config=None, jobs=None):
    return run(config or preset("example1"), jobs)[0]


def run_example2(config=None, jobs=None):
    return run(config or preset("example2"), jobs)[0]


def run_example3(config=None, jobs=None):
    return run(config or preset("example3"), jobs)[0]


def _num(x):
    return format(float(x), "g")


def _stem(experiment, d, N, m, alpha, sigma=None):
    stem = f"{experiment}_d{d}_N{N}_m{m}_alpha{_num(alpha)}"
    return stem if sigma is None else f"{stem}_sigma{_num(sigma)}"


_TABLE_COLUMNS = {
    False: ["d", "n", "alpha", "N", "m", "M", "kappa_mean", "kappa_median", "kappa_sd",
            "lambda_min_median", "lambda_max_median"],
    True: ["d", "n", "n_test", "alpha", "N", "m", "M", "sigma", "mse_mean", "mse_median", "mse_sd",
           "mse_truncated_mean", "mse_truncated_sd", "kappa_median"],
}


def write_outputs(config, records, spectra, outdir):
    """Write the table CSV, its JSON sidecar, per-row raw CSVs and spectra.

    Returns the list of written paths.
    """
    outdir = Path(outdir)
    reg = config.is_regression
    exp = config.experiment
    written = []

    cols = _TABLE_COLUMNS[reg]
    table = _io.csv_text(cols, ([_cell(rec[c]) for c in cols] for rec in records))
    path = outdir / f"{exp}_table.csv"
    _io.atomic_write_text(path, table)
    written.append(path)

    path = outdir / f"{exp}_table.json"
    _io.write_json(path, {"config": config.to_dict(), "records": records})
    written.append(path)

    for rec in records:
        stem = _stem(exp, rec["d"], rec["N"], rec["m"], rec["alpha"], rec.get("sigma"))
        if reg:
            rows = zip(rec["seeds"], rec["mse"], rec["mse_truncated"])
            text = _io.csv_text(["seed", "mse", "mse_truncated"], rows)
        else:
            text = _io.csv_text(["seed", "kappa2"], zip(rec["seeds"], rec["kappa"]))
        path = outdir / f"{stem}.csv"
        _io.atomic_write_text(path, text)
        written.append(path)

    for stem, rep in spectra.items():
        path = outdir / "spectra" / f"{stem}.csv"
        _io.atomic_write_text(path, rep.to_csv())
        written.append(path)
    return written


def _cell(v):
    return float(v) if isinstance(v, float) else v
