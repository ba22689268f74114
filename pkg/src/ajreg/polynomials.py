"""Orthonormal symmetric Jacobi polynomials on [-1, 1].

All polynomials here carry equal parameters (alpha, alpha) and are orthonormal
for the weight ``(1 - x**2)**alpha``.  Evaluation runs the three-term
recurrence of the orthonormal family directly, which stays O(1) in magnitude
and never forms Gamma functions of large arguments.
"""
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import gammaln

from ._io import csv_text
from ._validation import check_abscissae

__all__ = [
    "JacobiParams",
    "QuadratureRule",
    "norm_constant",
    "eval_normalized",
    "eval_batch",
    "sup_norm_bound",
    "sup_norm_sum_bound",
    "gauss_jacobi",
    "bound_D",
    "mass_bound_constant",
]


@dataclass(frozen=True)
class JacobiParams:
    """Parameter ``alpha >= -1/2`` with a lazily filled cache of ``h_k``.

    The cache is write-once per degree; concurrent fills store the same value.
    """

    alpha: float
    _h: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        alpha = float(self.alpha)
        if not math.isfinite(alpha) or alpha < -0.5:
            raise ValueError(f"alpha must be >= -1/2, got {self.alpha!r}")
        object.__setattr__(self, "alpha", alpha)

    def __hash__(self):
        return hash(self.alpha)

    @property
    def h0(self):
        """Total mass of the weight, ``2**(2a+1) * B(a+1, a+1)``."""
        return norm_constant(self, 0)

    @property
    def is_chebyshev(self):
        return self.alpha == -0.5


def _as_params(params):
    return params if isinstance(params, JacobiParams) else JacobiParams(params)


def norm_constant(params, k):
    """Squared weighted norm ``h_k`` of the classical ``P_k^(a,a)``.

    Evaluated in log-Gamma space so that degrees in the thousands do not
    overflow.
    """
    params = _as_params(params)
    k = int(k)
    if k < 0:
        raise ValueError(f"degree must be >= 0, got {k}")
    cached = params._h.get(k)
    if cached is not None:
        return cached
    a = params.alpha
    if k == 0:
        # (2a+1) * Gamma(2a+1) = Gamma(2a+2) removes the 0/0 at a = -1/2.
        log_den = gammaln(2 * a + 2)
    else:
        log_den = gammaln(k + 1) + math.log(2 * k + 2 * a + 1) + gammaln(k + 2 * a + 1)
    value = math.exp((2 * a + 1) * math.log(2.0) + 2 * gammaln(k + a + 1) - log_den)
    params._h[k] = value
    return value


def _recurrence_b(alpha, K):
    """Monic recurrence coefficients ``b_1..b_K`` (``p_{k+1} = x p_k - b_k p_{k-1}``)."""
    b = np.empty(K)
    if K == 0:
        return b
    b[0] = 1.0 / (2 * alpha + 3)
    k = np.arange(2, K + 1, dtype=float)
    b[1:] = k * (k + 2 * alpha) / ((2 * k + 2 * alpha + 1) * (2 * k + 2 * alpha - 1))
    return b


def eval_batch(params, max_degree, xs):
    """Evaluate degrees ``0..max_degree`` at every abscissa.

    Returns an array of shape ``xs.shape + (max_degree + 1,)``; a scalar or
    1-D input of length n gives ``(n, max_degree + 1)``.
    """
    params = _as_params(params)
    N = int(max_degree)
    if N < 0:
        raise ValueError("max_degree must be >= 0")
    x = check_abscissae(xs, "xs")
    out = np.empty(x.shape + (N + 1,))
    out[..., 0] = 1.0 / math.sqrt(params.h0)
    if N == 0:
        return out
    sb = np.sqrt(_recurrence_b(params.alpha, N))
    out[..., 1] = x * out[..., 0] / sb[0]
    for k in range(1, N):
        out[..., k + 1] = (x * out[..., k] - sb[k - 1] * out[..., k - 1]) / sb[k]
    return out


def eval_normalized(params, k, x):
    """Orthonormal ``P~_k^(a)(x)``; scalar in, scalar out."""
    k = int(k)
    if k < 0:
        raise ValueError(f"degree must be >= 0, got {k}")
    values = eval_batch(params, k, np.atleast_1d(x))[..., k]
    return float(values[0]) if np.ndim(x) == 0 else values


def mass_bound_constant(params):
    """``C(a) = (pi (a + 3/4) / e**2) ** (1/4)``; bounds ``1/sqrt(h_0)`` from above."""
    a = _as_params(params).alpha
    return (math.pi * (a + 0.75) / math.e**2) ** 0.25


def _eta(alpha):
    return math.pi**0.25 * math.exp(alpha + 0.75) / math.sqrt(2.0)


def sup_norm_bound(params, k):
    """Upper bound on ``max |P~_k^(a)|`` over [-1, 1]."""
    params = _as_params(params)
    k = int(k)
    if k < 0:
        raise ValueError("degree must be >= 0")
    if k == 0:
        return mass_bound_constant(params)
    if params.is_chebyshev:
        return 2.0 / math.sqrt(math.pi)
    return _eta(params.alpha) * k ** (params.alpha + 0.5)


def sup_norm_sum_bound(params, N):
    """Upper bound on ``sum_{k<=N} max |P~_k^(a)|`` for ``N >= 1``."""
    params = _as_params(params)
    if int(N) < 1:
        raise ValueError("N must be >= 1")
    p = params.alpha + 1.5
    return _eta(params.alpha) * (int(N) + 1) ** p / p


def bound_D(params, N):
    """Per-factor sup-norm constant used in the basis and Chernoff bounds."""
    params = _as_params(params)
    if int(N) < 1:
        raise ValueError("N must be >= 1")
    if params.is_chebyshev:
        return 2.0
    a = params.alpha
    return math.pi**0.75 * int(N) ** (a + 0.5) * math.exp(a + 0.75)


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss rule for the weight ``(1 - x**2)**alpha``."""

    nodes: np.ndarray
    weights: np.ndarray
    order: int
    alpha: float

    def integrate(self, values):
        """Weighted sum along the first axis of ``values`` (evaluated at ``nodes``)."""
        return np.tensordot(self.weights, values, axes=(0, 0))

    def to_csv(self):
        return csv_text(["node", "weight"], zip(self.nodes.tolist(), self.weights.tolist()))


def gauss_jacobi(params, q):
    """``q``-point Gauss rule via the eigen-decomposition of the Jacobi matrix.

    Nodes and weights are symmetrized so that ``x_i == -x_{q-1-i}`` holds
    exactly.
    """
    params = _as_params(params)
    q = int(q)
    if q < 1:
        raise ValueError("quadrature order must be >= 1")
    if q == 1:
        return QuadratureRule(np.zeros(1), np.array([params.h0]), 1, params.alpha)
    offdiag = np.sqrt(_recurrence_b(params.alpha, q - 1))
    nodes, vecs = eigh_tridiagonal(np.zeros(q), offdiag)
    weights = params.h0 * vecs[0] ** 2
    nodes = 0.5 * (nodes - nodes[::-1])
    weights = 0.5 * (weights + weights[::-1])
    return QuadratureRule(nodes, weights, q, params.alpha)
