"""Seeded Beta(a+1, a+1) designs on [-1, 1]^d and noisy responses.

Every random stream is derived from ``(seed, role, index)`` through
:class:`numpy.random.SeedSequence` and drives a counter-based Philox
generator, so the point stream and the noise stream of one seed never
overlap and regenerate bit-for-bit.
"""
import csv
import io
from dataclasses import dataclass, replace

import numpy as np

from ._io import csv_text
from ._validation import check_points, check_positive_int
from .polynomials import JacobiParams

__all__ = ["SampleSet", "stream", "sample_beta", "apply_target", "read_csv"]

ROLES = {"points": 1, "noise": 2, "test": 3, "projection": 4, "trial": 5}


def stream(seed, role="points", index=0):
    """Independent generator for ``(seed, role, index)``."""
    if role not in ROLES:
        raise ValueError(f"unknown stream role {role!r}")
    ss = np.random.SeedSequence(int(seed), spawn_key=(ROLES[role], int(index)))
    return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True, eq=False)
class SampleSet:
    points: np.ndarray
    responses: np.ndarray = None
    seed: int = None
    alpha: float = None
    sigma: float = 0.0
    noise_seed: int = None

    def __post_init__(self):
        pts = check_points(self.points, name="points")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        if self.responses is not None:
            y = np.asarray(self.responses, dtype=float).reshape(-1)
            if y.shape[0] != pts.shape[0]:
                raise ValueError("responses and points differ in length")
            y.setflags(write=False)
            object.__setattr__(self, "responses", y)

    @property
    def n(self):
        return self.points.shape[0]

    @property
    def d(self):
        return self.points.shape[1]

    def to_csv(self):
        header = [f"x{i + 1}" for i in range(self.d)]
        cols = [self.points]
        if self.responses is not None:
            header.append("y")
            cols.append(self.responses[:, None])
        return csv_text(header, np.hstack(cols).tolist())


def _beta_via_gamma(rng, shape, size):
    g1 = rng.standard_gamma(shape, size)
    g2 = rng.standard_gamma(shape, size)
    return g1 / (g1 + g2)


def sample_beta(n, d, params, seed, role="points"):
    """Draw ``n`` i.i.d. points with density proportional to ``prod (1 - x_i**2)**a``.

    ``role`` selects the stream; held-out sets use ``"test"`` so that they
    never coincide with the training points of the same seed.
    """
    n = check_positive_int(n, "n")
    d = check_positive_int(d, "d")
    if not isinstance(params, JacobiParams):
        params = JacobiParams(params)
    rng = stream(seed, role)
    t = _beta_via_gamma(rng, params.alpha + 1.0, (n, d))
    return SampleSet(2.0 * t - 1.0, seed=int(seed), alpha=params.alpha)


def apply_target(sample, f, sigma=0.0, noise_seed=None):
    """Attach ``Y = f(X) + eps`` with Gaussian ``eps`` of standard deviation ``sigma``.

    ``f`` maps an ``(n, d)`` array to ``n`` values.  The noise stream is keyed
    by ``noise_seed`` (default: the sample's own seed) and never touches the
    points.
    """
    sigma = float(sigma)
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    y = np.asarray(f(sample.points), dtype=float).reshape(-1)
    if noise_seed is None:
        noise_seed = sample.seed if sample.seed is not None else 0
    if sigma > 0:
        y = y + sigma * stream(noise_seed, "noise").standard_normal(y.shape[0])
    return replace(sample, responses=y, sigma=sigma, noise_seed=int(noise_seed))


def read_csv(source):
    """Parse ``x1..xd[,y]`` CSV text or a path into a :class:`SampleSet`."""
    if isinstance(source, str) and "\n" in source:
        fh = io.StringIO(source)
    else:
        fh = open(source, newline="")
    with fh:
        rows = list(csv.reader(fh))
    header, body = [h.strip() for h in rows[0]], [r for r in rows[1:] if r]
    xcols = [i for i, h in enumerate(header) if h.startswith("x")]
    if not xcols:
        raise ValueError("CSV has no x1..xd columns")
    data = np.array(body, dtype=float).reshape(len(body), len(header))
    y = data[:, header.index("y")] if "y" in header else None
    return SampleSet(data[:, xcols], responses=y)
