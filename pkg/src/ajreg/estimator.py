"""Least-squares estimator on an ANOVA Jacobi space.

The functional layer (:func:`build_design`, :func:`gram`, :func:`fit`,
:func:`predict`, :func:`predict_truncated`, :func:`mse`) follows the scaled
design-matrix formulation: with ``s = h_0**(d/2) / sqrt(n)`` the design is
``F[i, j] = s * Psi_j(X_i)`` and ``E[F.T @ F]`` is the identity under the
Beta design law.  :class:`JacobiAnovaRegressor` wraps it as a scikit-learn
estimator.
"""
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted, validate_data

from .exceptions import RankDeficiencyError, UndersampledError
from .sampling import SampleSet
from .space import BasisSpace, enumerate_space, eval_basis

__all__ = [
    "DesignMatrix",
    "FittedModel",
    "SOLVERS",
    "build_design",
    "gram",
    "fit",
    "predict",
    "predict_truncated",
    "mse",
    "JacobiAnovaRegressor",
    "JacobiAnovaFeatures",
]

SOLVERS = ("orthogonal-factorization", "normal-equations")
RANK_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class DesignMatrix:
    entries: np.ndarray
    space: BasisSpace
    scale: float

    @property
    def n(self):
        return self.entries.shape[0]


def _scale(space, n):
    return space.params.h0 ** (space.d / 2) / math.sqrt(n)


def build_design(space, sample):
    """Scaled design matrix for ``sample`` (a :class:`SampleSet` or an (n, d) array)."""
    X = sample.points if isinstance(sample, SampleSet) else np.asarray(sample, dtype=float)
    if X.ndim != 2 or X.shape[1] != space.d:
        raise ValueError(f"sample dimension {X.shape[-1]} does not match space dimension {space.d}")
    s = _scale(space, X.shape[0])
    return DesignMatrix(s * eval_basis(space, X), space, s)


def gram(design):
    """``G = F.T @ F``, symmetrized."""
    F = design.entries if isinstance(design, DesignMatrix) else design
    G = F.T @ F
    return 0.5 * (G + G.T)


@dataclass(frozen=True, eq=False)
class FittedModel:
    coefficients: np.ndarray
    space: BasisSpace
    truncation_level: float = None
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=float).reshape(-1)
        if c.shape[0] != self.space.size:
            raise ValueError(f"expected {self.space.size} coefficients, got {c.shape[0]}")
        object.__setattr__(self, "coefficients", c)

    def to_dict(self):
        return {
            "space": self.space.to_dict(),
            "coefficients": self.coefficients,
            "K_f": self.truncation_level,
            "diagnostics": self.diagnostics,
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            np.asarray(data["coefficients"], dtype=float),
            BasisSpace.from_dict(data["space"]),
            data.get("K_f"),
            dict(data.get("diagnostics", {})),
        )


def _singular_values(A):
    return scipy.linalg.svdvals(A)


def fit(design, Y, solver="orthogonal-factorization", truncation_level=None):
    """Least-squares coefficients for responses ``Y``.

    ``normal-equations`` solves ``G C = F.T (s Y)`` by Cholesky;
    ``orthogonal-factorization`` (default) solves ``min |F C - s Y|`` through a
    QR factorization of ``F`` without forming ``G``.  When no truncation level
    is given it defaults to ``max |Y_i|``.

    Raises
    ------
    UndersampledError
        If ``n < M``.
    RankDeficiencyError
        If ``sigma_min(F) < 1e-12 * sigma_max(F)``.
    """
    if solver not in SOLVERS:
        raise ValueError(f"solver must be one of {SOLVERS}, got {solver!r}")
    F, space = design.entries, design.space
    n, M = F.shape
    Y = np.asarray(Y, dtype=float).reshape(-1)
    if Y.shape[0] != n:
        raise ValueError(f"Y has {Y.shape[0]} entries, design has {n} rows")
    if n < M:
        raise UndersampledError(n, M)
    rhs = design.scale * Y

    if solver == "orthogonal-factorization":
        Q, R = scipy.linalg.qr(F, mode="economic")
        sv = _singular_values(R)
        _check_rank(sv)
        C = scipy.linalg.solve_triangular(R, Q.T @ rhs)
    else:
        G = gram(design)
        sv = np.sqrt(np.clip(np.linalg.eigvalsh(G)[::-1], 0.0, None))
        _check_rank(sv)
        C = scipy.linalg.cho_solve(scipy.linalg.cho_factor(G), F.T @ rhs)

    diagnostics = {
        "solver": solver,
        "n": n,
        "M": M,
        "kappa2_G": float((sv[0] / sv[-1]) ** 2),
        "residual_norm": float(np.linalg.norm(F @ C - rhs)),
    }
    if truncation_level is None:
        truncation_level = float(np.max(np.abs(Y)))
    return FittedModel(C, space, float(truncation_level), diagnostics)


def _check_rank(sv):
    if sv[-1] < RANK_RTOL * sv[0]:
        raise RankDeficiencyError(
            f"design is numerically rank deficient (sigma_min/sigma_max = {sv[-1] / sv[0]:.3g})"
        )


def predict(model, X):
    """Raw estimator ``sum_j C_j Psi_j(x)``; one value per row of ``X``."""
    return eval_basis(model.space, X) @ model.coefficients


def _clamp(values, K):
    return np.sign(values) * np.minimum(K, np.abs(values))


def predict_truncated(model, X, K_f=None):
    """Estimator clamped to ``[-K_f, K_f]`` (``K_f`` defaults to the model's level)."""
    K = model.truncation_level if K_f is None else K_f
    if K is None:
        raise ValueError("model has no truncation level; pass K_f")
    if K < 0:
        raise ValueError("truncation level must be >= 0")
    return _clamp(predict(model, X), float(K))


def mse(model, test, truth, truncated=False):
    """Empirical mean squared error against the noiseless truth on ``test`` points."""
    X = test.points if isinstance(test, SampleSet) else np.asarray(test, dtype=float)
    pred = predict_truncated(model, X) if truncated else predict(model, X)
    return float(np.mean((pred - np.asarray(truth(X), dtype=float)) ** 2))


class JacobiAnovaRegressor(RegressorMixin, BaseEstimator):
    """Least-squares regressor on the ANOVA Jacobi space ``P_{N,m,d}``.

    Parameters
    ----------
    degree : int
        Total degree cap ``N``.
    order : int
        Interaction order ``m``; at most ``min(d, degree)``.
    alpha : float
        Jacobi parameter (>= -1/2).  Training inputs should be drawn from the
        matching Beta(alpha+1, alpha+1) law on [-1, 1]^d for the stability
        guarantees to apply.
    solver : {"orthogonal-factorization", "normal-equations"}
    truncation : None, "auto" or float
        Clamp level for ``predict``.  ``None`` disables clamping, ``"auto"``
        uses ``max |y|`` seen during ``fit``.

    Attributes
    ----------
    space_ : BasisSpace
    coef_ : ndarray of shape (M,)
    model_ : FittedModel
    condition_number_ : float
        2-norm condition number of the Gram matrix.
    """

    def __init__(self, degree=4, order=2, alpha=-0.5, solver="orthogonal-factorization", truncation=None):
        self.degree = degree
        self.order = order
        self.alpha = alpha
        self.solver = solver
        self.truncation = truncation

    def fit(self, X, y):
        X, y = validate_data(self, X, y, y_numeric=True)
        self.space_ = enumerate_space(self.degree, self.order, X.shape[1], self.alpha)
        K_f = None if self.truncation in (None, "auto") else float(self.truncation)
        self.model_ = fit(build_design(self.space_, X), y, self.solver, K_f)
        self.coef_ = self.model_.coefficients
        self.condition_number_ = self.model_.diagnostics["kappa2_G"]
        return self

    def predict(self, X):
        check_is_fitted(self, "model_")
        X = validate_data(self, X, reset=False)
        if self.truncation is None:
            return predict(self.model_, X)
        return predict_truncated(self.model_, X)


class JacobiAnovaFeatures(TransformerMixin, BaseEstimator):
    """Map inputs in [-1, 1]^d to the orthonormal ANOVA Jacobi basis values."""

    def __init__(self, degree=4, order=2, alpha=-0.5):
        self.degree = degree
        self.order = order
        self.alpha = alpha

    def fit(self, X, y=None):
        X = validate_data(self, X)
        self.space_ = enumerate_space(self.degree, self.order, X.shape[1], self.alpha)
        return self

    def transform(self, X):
        check_is_fitted(self, "space_")
        return eval_basis(self.space_, validate_data(self, X, reset=False))

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "space_")
        names = []
        for u, k in self.space_.indices:
            names.append("1" if not u else "*".join(f"P{kt}(x{ut})" for ut, kt in zip(u, k)))
        return np.asarray(names, dtype=object)
