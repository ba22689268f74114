import numpy as np

from .exceptions import DomainError

# Points produced by an affine map of [0, 1] can overshoot by an ulp or two.
_CUBE_SLACK = 4 * np.finfo(float).eps


def check_points(X, d=None, name="X"):
    """Return ``X`` as a C-contiguous float array of shape (n, d) inside the cube.

    A 1-D input is read as a single point.  Coordinates within a few ulps of
    the boundary are clipped onto it; anything further out raises
    :class:`DomainError`.
    """
    X = np.array(X, dtype=float, ndmin=1)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2:
        raise ValueError(f"{name} must be 1-D or 2-D, got shape {X.shape}")
    if d is not None and X.shape[1] != d:
        raise ValueError(f"{name} has {X.shape[1]} coordinates, expected {d}")
    if not np.all(np.isfinite(X)):
        raise DomainError(f"{name} contains non-finite values")
    if np.any(np.abs(X) > 1 + _CUBE_SLACK):
        worst = float(np.max(np.abs(X)))
        raise DomainError(f"{name} leaves [-1, 1] (max |x| = {worst:.17g})")
    return np.ascontiguousarray(np.clip(X, -1.0, 1.0))


def check_abscissae(x, name="x"):
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)) or np.any(np.abs(x) > 1 + _CUBE_SLACK):
        raise DomainError(f"{name} must lie in [-1, 1]")
    return np.clip(x, -1.0, 1.0)


def check_positive_int(value, name, minimum=1):
    if isinstance(value, (bool, np.bool_)) or int(value) != value:
        raise ValueError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return value
