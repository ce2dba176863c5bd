"""Input validation helpers shared by the public functions and estimators."""

import numbers

import numpy as np

from .exceptions import InvalidParameter


def check_positive(value, name):
    if not isinstance(value, numbers.Real) or not np.isfinite(value) or value <= 0:
        raise InvalidParameter(f"{name} must be a positive finite real, got {value!r}")
    return float(value)


def check_int(value, name, minimum=0):
    if isinstance(value, (bool, np.bool_)) or not isinstance(value, numbers.Integral):
        raise InvalidParameter(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise InvalidParameter(f"{name} must be >= {minimum}, got {value}")
    return int(value)


def check_alpha(alpha):
    alpha = check_positive(alpha, "alpha")
    if alpha <= 2:
        raise InvalidParameter(f"path-loss exponent must exceed 2, got {alpha}")
    return alpha


def check_pmf(probs, name="pmf", atol=1e-9):
    """Return ``probs`` as a float array after checking it is a pmf."""
    p = np.asarray(probs, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise InvalidParameter(f"{name} must be a non-empty 1-d sequence")
    if np.any(p < 0) or not np.all(np.isfinite(p)):
        raise InvalidParameter(f"{name} has negative or non-finite entries")
    if abs(p.sum() - 1.0) > atol:
        raise InvalidParameter(f"{name} sums to {p.sum():.12g}, expected 1")
    return p


def check_random_state(seed):
    """Turn ``seed`` into a ``numpy.random.Generator``."""
    if isinstance(seed, np.random.Generator):
        return seed
    if seed is None or isinstance(seed, (numbers.Integral, np.random.SeedSequence)):
        return np.random.default_rng(seed)
    raise InvalidParameter(f"cannot build a random generator from {seed!r}")
