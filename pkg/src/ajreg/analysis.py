"""Stability and risk diagnostics for the random Gram matrix."""
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from ._io import csv_text
from .estimator import build_design, fit, predict
from .exceptions import AsymmetryError, BudgetExceededError
from .polynomials import JacobiParams, bound_D, gauss_jacobi
from .sampling import apply_target, sample_beta
from .space import dimension, eval_basis, eval_design_row

__all__ = [
    "SpectrumReport",
    "ChernoffBound",
    "Projection",
    "BiasVarianceReport",
    "spectrum",
    "chernoff_bound",
    "gershgorin_cap",
    "row_sum_cap",
    "project",
    "projection_error",
    "bias_variance_report",
    "risk_bound",
]

SYMMETRY_TOL = 1e-12
CLAMP_TOL = 1e-12
QUADRATURE_BUDGET = 10**7


@dataclass(frozen=True, eq=False)
class SpectrumReport:
    eigenvalues: np.ndarray
    lambda_min: float
    lambda_max: float
    kappa2: float
    meta: dict = field(default_factory=dict)

    def to_csv(self):
        return csv_text(["index", "eigenvalue"], enumerate(self.eigenvalues.tolist()))

    def to_dict(self):
        return {
            "meta": self.meta,
            "lambda_min": self.lambda_min,
            "lambda_max": self.lambda_max,
            "kappa2": self.kappa2,
            "eigenvalues": self.eigenvalues,
        }


def spectrum(G, meta=None):
    """Sorted eigenvalues and 2-norm condition number of a symmetric PSD matrix."""
    G = np.asarray(G, dtype=float)
    if G.ndim != 2 or G.shape[0] != G.shape[1]:
        raise ValueError("G must be square")
    scale = max(1.0, float(np.max(np.abs(G)))) if G.size else 1.0
    if np.max(np.abs(G - G.T), initial=0.0) > SYMMETRY_TOL * scale:
        raise AsymmetryError("Gram matrix is not symmetric")
    ev = np.linalg.eigvalsh(G)
    if ev[0] < -CLAMP_TOL:
        warnings.warn(f"negative eigenvalue {ev[0]:.3g} in a Gram matrix", RuntimeWarning, stacklevel=2)
    ev = np.where((ev < 0) & (ev >= -CLAMP_TOL), 0.0, ev)
    lo, hi = float(ev[0]), float(ev[-1])
    kappa = hi / lo if lo > 0 else math.inf
    return SpectrumReport(ev, lo, hi, kappa, dict(meta or {}))


@dataclass(frozen=True)
class ChernoffBound:
    delta: float
    probability_lower_bound: float
    L: float
    kappa_cap: float
    lambda_min_bound: float
    lambda_max_bound: float
    M: int
    D: float

    @property
    def vacuous(self):
        return self.probability_lower_bound <= 0.0

    def to_dict(self):
        return {
            "delta": self.delta,
            "probability_lower_bound": self.probability_lower_bound,
            "kappa_cap": self.kappa_cap,
            "vacuous": self.vacuous,
            "L": self.L,
            "M": self.M,
            "D": self.D,
            "lambda_min_lower_bound": self.lambda_min_bound,
            "lambda_max_upper_bound": self.lambda_max_bound,
        }


def chernoff_bound(N, m, d, n, params, delta):
    """Probability lower bounds for ``kappa2(G) <= (1+delta)/(1-delta)``.

    Also reports the one-sided bounds ``P(lambda_min >= 1 - delta)`` (factor
    2 in the exponent) and ``P(lambda_max <= 1 + delta)`` (factor 3).
    Vacuous (negative) values are returned unclamped.
    """
    delta = float(delta)
    if not 0.0 < delta <= 1.0:
        raise ValueError(f"delta must lie in (0, 1], got {delta}")
    if int(n) < 1:
        raise ValueError("n must be >= 1")
    M = dimension(N, m, d)
    D = bound_D(params, N)
    DM = D ** (2 * m) * M
    expo = delta**2 * n / DM
    kappa_cap = (1 + delta) / (1 - delta) if delta < 1 else math.inf
    return ChernoffBound(
        delta=delta,
        probability_lower_bound=1.0 - 2 * M * math.exp(-expo / 3),
        L=DM / n,
        kappa_cap=kappa_cap,
        lambda_min_bound=1.0 - M * math.exp(-expo / 2),
        lambda_max_bound=1.0 - M * math.exp(-expo / 3),
        M=M,
        D=D,
    )


def row_sum_cap(psi, h0d, n):
    """Gershgorin row-sum cap for the rank-one matrix ``(h0d/n) psi psi^T``."""
    a = np.abs(np.asarray(psi, dtype=float))
    # |psi_i|^2 + sum_{j != i} |psi_i psi_j| = |psi_i| * sum_j |psi_j|
    return float(h0d / n * np.max(a) * np.sum(a))


def gershgorin_cap(space, x, n):
    """Gershgorin bound on the largest eigenvalue of one summand of ``G`` at ``x``."""
    return row_sum_cap(eval_design_row(space, x), space.params.h0**space.d, n)


@dataclass(frozen=True, eq=False)
class Projection:
    coefficients: np.ndarray
    stderr: np.ndarray
    method: str
    nodes: int


def _tensor_chunks(rule, d, chunk):
    """Yield (points, weights) blocks of the tensor-product rule."""
    q = rule.order
    total = q**d
    for start in range(0, total, chunk):
        flat = np.arange(start, min(start + chunk, total))
        digits = np.array(np.unravel_index(flat, (q,) * d)).T
        yield rule.nodes[digits], np.prod(rule.weights[digits], axis=1)


def _resolve_method(space, method, q):
    if method == "auto":
        return "tensor-quadrature" if q**space.d <= QUADRATURE_BUDGET else "monte-carlo"
    if method not in ("tensor-quadrature", "monte-carlo"):
        raise ValueError(f"unknown projection method {method!r}")
    return method


def _default_order(space):
    return space.N + 12


def project(space, f, method="auto", budget=None, q=None, seed=0, chunk=1 << 15):
    """Orthogonal projection coefficients ``C_j = <f, Psi_j>_alpha``.

    ``tensor-quadrature`` uses a ``q``-point Gauss rule per axis (default
    ``q = N + 12``) and needs ``q**d <= budget`` (default 10**7 nodes);
    ``monte-carlo`` draws ``budget`` points (default 10**5) from the Beta law
    and reports standard errors.  ``auto`` picks quadrature when it fits the
    default node budget.
    """
    q = _default_order(space) if q is None else int(q)
    method = _resolve_method(space, method, q)
    h0d = space.params.h0**space.d
    if method == "tensor-quadrature":
        budget = QUADRATURE_BUDGET if budget is None else int(budget)
        if q**space.d > budget:
            raise BudgetExceededError(f"tensor rule needs {q}**{space.d} nodes > budget {budget}")
        rule = gauss_jacobi(space.params, q)
        C = np.zeros(space.size)
        for X, w in _tensor_chunks(rule, space.d, chunk):
            C += (w * np.asarray(f(X), dtype=float)) @ eval_basis(space, X)
        return Projection(C, None, method, q**space.d)

    n = 10**5 if budget is None else int(budget)
    X = sample_beta(n, space.d, space.params, seed).points
    vals = np.asarray(f(X), dtype=float)[:, None] * eval_basis(space, X)
    C = h0d * vals.mean(axis=0)
    se = h0d * vals.std(axis=0, ddof=1) / math.sqrt(n)
    return Projection(C, se, method, n)


def projection_error(space, f, coefficients=None, q=None, chunk=1 << 15):
    """Squared weighted norm ``|f - sum_j C_j Psi_j|_alpha^2`` by tensor quadrature.

    Uses the projection coefficients of ``f`` when ``coefficients`` is omitted.
    """
    q = _default_order(space) if q is None else int(q)
    if q**space.d > QUADRATURE_BUDGET:
        raise BudgetExceededError(f"tensor rule needs {q}**{space.d} nodes")
    if coefficients is None:
        coefficients = project(space, f, "tensor-quadrature", q=q, chunk=chunk).coefficients
    rule = gauss_jacobi(space.params, q)
    total = 0.0
    for X, w in _tensor_chunks(rule, space.d, chunk):
        r = np.asarray(f(X), dtype=float) - eval_basis(space, X) @ coefficients
        total += float(w @ r**2)
    return total


@dataclass(frozen=True, eq=False)
class BiasVarianceReport:
    bias_sq: float
    variance: float
    mse_mean: float
    mse_sd: float
    variances: np.ndarray
    mses: np.ndarray

    def to_dict(self):
        return {
            "bias_sq": self.bias_sq,
            "variance": self.variance,
            "mse_mean": self.mse_mean,
            "mse_sd": self.mse_sd,
        }


def bias_variance_report(space, f, sigma, n, trials=10, seeds=None, n_test=None, q=None):
    """Empirical split of the weighted L2 risk into projection error and variance.

    All three quantities are squared ``alpha``-weighted norms:

    * ``bias_sq`` is ``|f - Pi f|^2`` by tensor quadrature;
    * ``variance`` averages ``|f_hat - Pi f|^2 = |C_hat - C|^2`` (Parseval)
      over the trials;
    * ``mse_mean``/``mse_sd`` summarize ``|f - f_hat|^2`` estimated on
      ``n_test`` held-out Beta points per trial (``h0**d`` times the plain
      empirical MSE).
    """
    seeds = list(range(trials)) if seeds is None else [int(s) for s in seeds]
    if len(seeds) < 2:
        raise ValueError("need at least two trials")
    n_test = n if n_test is None else int(n_test)
    proj = project(space, f, "tensor-quadrature", q=q).coefficients
    bias_sq = projection_error(space, f, proj, q=q)
    h0d = space.params.h0**space.d
    variances, mses = [], []
    for s in seeds:
        train = apply_target(sample_beta(n, space.d, space.params, s), f, sigma)
        model = fit(build_design(space, train), train.responses)
        variances.append(float(np.sum((model.coefficients - proj) ** 2)))
        Xt = sample_beta(n_test, space.d, space.params, s, role="test").points
        mses.append(h0d * float(np.mean((predict(model, Xt) - f(Xt)) ** 2)))
    variances, mses = np.array(variances), np.array(mses)
    return BiasVarianceReport(
        bias_sq, float(variances.mean()), float(mses.mean()), float(mses.std(ddof=1)), variances, mses
    )


def risk_bound(N, m, d, n, params, delta, K_f, sigma, bias_sq):
    """Right-hand side of the truncated-estimator risk bound (diagnostic reference curve)."""
    if not isinstance(params, JacobiParams):
        params = JacobiParams(params)
    space_M = dimension(N, m, d)
    D2m = bound_D(params, N) ** (2 * m)
    h0d = params.h0**d
    tail = 4 * K_f**2 * h0d * space_M * math.exp(-(delta**2) * n / (2 * D2m * space_M))
    var = space_M / (n * (1 - delta) ** 2) * (D2m * bias_sq + sigma**2 * h0d)
    return tail + var + bias_sq
