"""Per-cell user-count distribution for Poisson-Voronoi cells.

The number of UEs falling in the Voronoi cell of a random AP, with UE and AP
densities in ratio ``ratio``, is approximated by a negative-binomial law with
shape ``c``::

    Pr{K} = 3.5**c * Gamma(K + c) * ratio**K / (Gamma(c) * K! * (3.5 + ratio)**(K + c))

``c = 3.5`` describes a random cell; ``c = 4.5`` describes the cell serving a
typical user, counting only the *other* users in it.
"""

from dataclasses import dataclass
from math import lgamma, log

import numpy as np
from scipy import stats
from scipy.special import gammaln

from ._validation import check_int, check_positive
from .exceptions import InvalidParameter, TailMassTooLarge

RANDOM_CELL_SHAPE = 3.5
TAGGED_CELL_SHAPE = 4.5
TAIL_TOLERANCE = 1e-9

_AREA_SHAPE = 3.5


@dataclass(frozen=True, eq=False)
class LoadPmf:
    """Truncated and renormalised pmf of a cell's UE count ``K = 0..k_max``."""

    ratio: float
    c: float
    probs: np.ndarray
    tail_mass: float = 0.0

    @property
    def k_max(self):
        return self.probs.size - 1

    @property
    def support(self):
        return np.arange(self.probs.size)

    def mean(self):
        return pmf_moment(self, 1)

    def cdf(self):
        return np.cumsum(self.probs)

    def key(self):
        """Hashable identity, used for caching derived distributions."""
        return self.probs.tobytes()

    @classmethod
    def degenerate(cls, k):
        """Point mass at ``K = k``; handy for conditioning on a known load."""
        k = check_int(k, "k")
        probs = np.zeros(k + 1)
        probs[k] = 1.0
        return cls(ratio=float("nan"), c=float("nan"), probs=probs)

    @classmethod
    def from_probs(cls, probs):
        probs = np.asarray(probs, dtype=float)
        return cls(ratio=float("nan"), c=float("nan"), probs=probs / probs.sum())


def _tail_mass(ratio, c, k_max):
    # scipy's nbinom(n, p) has pmf C(k+n-1, k) p^n (1-p)^k, matching the law
    # above with n = c and p = 3.5 / (3.5 + ratio)
    return float(stats.nbinom.sf(k_max, c, _AREA_SHAPE / (_AREA_SHAPE + ratio)))


def default_k_max(ratio, c=RANDOM_CELL_SHAPE, tail=1e-12):
    """Smallest truncation bound leaving less than ``tail`` mass beyond it."""
    p = _AREA_SHAPE / (_AREA_SHAPE + ratio)
    k = int(stats.nbinom.isf(tail, c, p))
    while _tail_mass(ratio, c, k) >= tail:
        k += 1
    return max(k, 1)


def log_load_pmf(k, ratio, c):
    """Log of the untruncated pmf at integer ``k`` (scalar)."""
    return (c * log(_AREA_SHAPE) + lgamma(k + c) + k * log(ratio)
            - lgamma(c) - lgamma(k + 1) - (k + c) * log(_AREA_SHAPE + ratio))


def cell_load_pmf(ratio, c=RANDOM_CELL_SHAPE, k_max=None):
    """Build the UE-count pmf of a cell, truncated at ``k_max``.

    Evaluated in log-gamma form so large ``K`` does not overflow. Raises
    ``TailMassTooLarge`` when the discarded mass beyond ``k_max`` is 1e-9 or
    more. ``k_max=None`` picks a bound with less than 1e-12 tail mass.
    """
    ratio = check_positive(ratio, "ratio")
    c = check_positive(c, "c")
    if k_max is None:
        k_max = default_k_max(ratio, c)
    k_max = check_int(k_max, "k_max", minimum=1)

    tail = _tail_mass(ratio, c, k_max)
    if not tail < TAIL_TOLERANCE:
        raise TailMassTooLarge(
            f"tail mass {tail:.3g} beyond k_max={k_max} for ratio={ratio}, c={c}")

    k = np.arange(k_max + 1, dtype=float)
    logp = (c * log(_AREA_SHAPE) + gammaln(k + c) + k * log(ratio)
            - gammaln(c) - gammaln(k + 1) - (k + c) * log(_AREA_SHAPE + ratio))
    probs = np.exp(logp)
    probs /= probs.sum()
    return LoadPmf(ratio=ratio, c=c, probs=probs, tail_mass=tail)


def tagged_cell_extra_load_pmf(ratio, k_max=None):
    """Pmf of the UEs sharing the typical UE's cell, excluding the typical UE."""
    return cell_load_pmf(ratio, TAGGED_CELL_SHAPE, k_max)


def pmf_moment(pmf, order):
    """Raw moment ``sum K**order * Pr{K}`` of a load pmf (order 1 or 2)."""
    if order not in (1, 2):
        raise InvalidParameter("order must be 1 or 2")
    probs = pmf.probs if isinstance(pmf, LoadPmf) else np.asarray(pmf, dtype=float)
    k = np.arange(probs.size, dtype=float)
    return float(np.sum(k ** order * probs))
