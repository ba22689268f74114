"""ANOVA-truncated multivariate Jacobi spaces.

A basis function is identified by a subset ``u`` of the coordinates and a
strictly positive degree vector ``k`` on ``u``.  Coordinates are 0-based in
the Python API (``u = (0, 2)`` means the first and third inputs); the JSON
form written by the CLI uses the same convention.
"""
import itertools
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ._validation import check_points, check_positive_int
from .polynomials import JacobiParams, eval_batch

__all__ = [
    "AnovaIndex",
    "BasisSpace",
    "dimension",
    "dimension_upper_bound",
    "enumerate_space",
    "eval_phi",
    "eval_design_row",
    "eval_basis",
]


class AnovaIndex(NamedTuple):
    u: tuple
    k: tuple

    @property
    def order(self):
        return len(self.u)

    @property
    def degree(self):
        return sum(self.k)

    def to_dict(self):
        return {"u": list(self.u), "k": list(self.k)}


def _validate_triple(N, m, d):
    N = check_positive_int(N, "N")
    m = check_positive_int(m, "m")
    d = check_positive_int(d, "d")
    if m > min(d, N):
        raise ValueError(f"interaction order m={m} exceeds min(d, N)={min(d, N)}")
    return N, m, d


def dimension(N, m, d):
    """Exact dimension ``sum_{k<=m} C(d, k) C(N, k)``."""
    N, m, d = _validate_triple(N, m, d)
    return sum(math.comb(d, k) * math.comb(N, k) for k in range(m + 1))


def dimension_upper_bound(N, m, d):
    """Closed-form upper bound on :func:`dimension`.

    Three regimes: ``m <= min/2``, ``min/2 < m < min`` and ``m == min`` where
    ``min``/``max`` refer to ``min(d, N)``/``max(d, N)``.
    """
    N, m, d = _validate_triple(N, m, d)
    lo, hi = min(d, N), max(d, N)
    if m == lo:
        log_b = (
            0.5 * math.log(math.pi / ((2 * d + 2 * N + 1) * math.e))
            + (d + 0.5) * math.log1p(N / (d + 0.5))
            + (N + 0.5) * math.log1p(d / (N + 0.5))
        )
    elif 2 * m <= lo:
        log_b = (
            math.log(math.pi / math.e)
            + 2 * (hi - m + 0.5) * math.log1p(m / (lo - m + 0.5))
            + 2 * m * math.log((hi + 0.5) / (m + 0.5))
        )
    elif 2 * m <= hi:
        log_b = lo * math.log(2.0) + (hi - m) * math.log1p(m / (hi - m)) + m * math.log(hi / m)
    else:
        # The entropy bound on partial binomial sums needs m <= hi/2; past
        # that only sum_k C(hi, k) <= 2**hi survives.
        log_b = (lo + hi) * math.log(2.0)
    return math.exp(log_b)


def _compositions(s, p):
    """Compositions of ``s`` into ``p`` positive parts, lexicographic."""
    if p == 1:
        yield (s,)
        return
    for first in range(1, s - p + 2):
        for rest in _compositions(s - first, p - 1):
            yield (first,) + rest


@dataclass(frozen=True, eq=False)
class BasisSpace:
    """Ordered basis of the ANOVA space for ``(N, m, d, alpha)``.

    Order: interaction order ``|u|`` ascending, then ``u`` lexicographic, then
    ``k`` by total degree and lexicographic within a degree.  Position 0 is
    the constant function.
    """

    N: int
    m: int
    d: int
    params: JacobiParams
    indices: tuple

    @property
    def alpha(self):
        return self.params.alpha

    @property
    def size(self):
        return len(self.indices)

    def __len__(self):
        return len(self.indices)

    def position(self, index):
        return self._lookup()[AnovaIndex(tuple(index[0]), tuple(index[1]))]

    def _lookup(self):
        table = self.__dict__.get("_table")
        if table is None:
            table = {idx: j for j, idx in enumerate(self.indices)}
            object.__setattr__(self, "_table", table)
        return table

    def _layout(self):
        """Per-order gather arrays used by :func:`eval_basis`."""
        layout = self.__dict__.get("_layout_cache")
        if layout is None:
            h0 = self.params.h0
            layout = []
            orders = np.array([idx.order for idx in self.indices])
            for p in range(self.m + 1):
                cols = np.flatnonzero(orders == p)
                U = np.array([self.indices[j].u for j in cols], dtype=np.intp).reshape(len(cols), p)
                K = np.array([self.indices[j].k for j in cols], dtype=np.intp).reshape(len(cols), p)
                layout.append((cols, U, K, h0 ** (-(self.d - p) / 2)))
            object.__setattr__(self, "_layout_cache", layout)
        return layout

    def to_dict(self, with_indices=True):
        out = {"N": self.N, "m": self.m, "d": self.d, "alpha": self.alpha, "M": self.size}
        if with_indices:
            out["indices"] = [idx.to_dict() for idx in self.indices]
        return out

    @classmethod
    def from_dict(cls, data):
        space = enumerate_space(data["N"], data["m"], data["d"], data["alpha"])
        if "indices" in data:
            listed = [AnovaIndex(tuple(e["u"]), tuple(e["k"])) for e in data["indices"]]
            if listed != list(space.indices):
                raise ValueError("index list does not match the canonical enumeration")
        return space


def enumerate_space(N, m, d, params=-0.5):
    """Build the :class:`BasisSpace` for ``(N, m, d)``."""
    N, m, d = _validate_triple(N, m, d)
    if not isinstance(params, JacobiParams):
        params = JacobiParams(params)
    indices = [AnovaIndex((), ())]
    for p in range(1, m + 1):
        for u in itertools.combinations(range(d), p):
            for s in range(p, N + 1):
                indices.extend(AnovaIndex(u, k) for k in _compositions(s, p))
    return BasisSpace(N, m, d, params, tuple(indices))


def eval_basis(space, X):
    """Basis values ``Psi_j(x_i)`` as an ``(n, M)`` array."""
    X = check_points(X, space.d)
    P = eval_batch(space.params, space.N, X)  # (n, d, N+1)
    out = np.empty((X.shape[0], space.size))
    for cols, U, K, factor in space._layout():
        if len(cols) == 0:
            continue
        block = np.full((X.shape[0], len(cols)), factor)
        for t in range(U.shape[1]):
            block *= P[:, U[:, t], K[:, t]]
        out[:, cols] = block
    return out


def eval_design_row(space, x):
    """Basis values at a single point, length ``M``."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError("eval_design_row takes a single point")
    return eval_basis(space, x[None, :])[0]


def eval_phi(space, j, x):
    """Value of the basis function at position ``j`` (0-based) at point ``x``."""
    j = int(j)
    if not 0 <= j < space.size:
        raise IndexError(f"basis position {j} outside [0, {space.size})")
    x = check_points(x, space.d)[0]
    u, k = space.indices[j]
    value = space.params.h0 ** (-(space.d - len(u)) / 2)
    if u:
        P = eval_batch(space.params, max(k), x[list(u)])
        for t, kt in enumerate(k):
            value *= P[t, kt]
    return float(value)
