"""Choice of the subchannel count that minimises rate outage.

For a target rate ``r0`` the analytic rate outage ``F_R(r0)`` is evaluated for
every ``N`` in ``1..n_max`` and the smallest minimiser is kept. Sweeping
``r0`` gives an outage frontier; since the optimal ``N`` changes with ``r0``
the frontier is *not* a cdf.
"""

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ._validation import check_int, check_positive
from .analytic import ChannelParams, rate_cdf
from .exceptions import InvalidParameter
from .load import cell_load_pmf, tagged_cell_extra_load_pmf
from .schemes import Scheme, access_profile

DEFAULT_N_MAX = 200


@dataclass
class OptimizationResult:
    r0: float
    n_star: int
    outage: float
    evaluated: list = field(default_factory=list)

    def outage_at(self, n):
        return dict(self.evaluated)[n]


@lru_cache(maxsize=2048)
def cached_profile(scheme, n, m_max, ratio, k_max=None, sdma_rule="min"):
    """Exact access profile for one ``(scheme, N, M_max, ratio)`` setup."""
    load = cell_load_pmf(ratio, k_max=k_max)
    extra = tagged_cell_extra_load_pmf(ratio, k_max=k_max)
    return access_profile(Scheme.parse(scheme), load, extra, n, m_max,
                          sdma_rule=sdma_rule)


def outage_curve(r_values, n, m_max, scheme, ratio, params, sdma_rule="min"):
    """Analytic ``F_R`` at ``r_values`` for a fixed subchannel count."""
    profile = cached_profile(Scheme.parse(scheme), n, m_max, float(ratio),
                             sdma_rule=sdma_rule)
    return np.atleast_1d(rate_cdf(np.asarray(r_values, dtype=float), profile.joint,
                                  n, params, profile.mtilde))


def _outage_table(r_values, m_max, scheme, n_max, ratio, params, sdma_rule):
    n_max = check_int(n_max, "n_max", 1)
    check_int(m_max, "m_max", 1)
    check_positive(ratio, "ratio")
    return np.array([outage_curve(r_values, n, m_max, scheme, ratio, params, sdma_rule)
                     for n in range(1, n_max + 1)])


def _pick(r0, column):
    # np.argmin returns the first minimiser, i.e. the smallest N on ties
    best = int(np.argmin(column))
    evaluated = [(n + 1, float(v)) for n, v in enumerate(column)]
    return OptimizationResult(float(r0), best + 1, float(column[best]), evaluated)


def optimal_subchannels(r0, m_max, scheme, n_max=DEFAULT_N_MAX, ratio=10.0,
                        params=ChannelParams(), sdma_rule="min"):
    """Exhaustive search of ``N`` in ``1..n_max`` minimising ``F_R(r0)``."""
    check_positive(r0, "r0")
    table = _outage_table([r0], m_max, scheme, n_max, ratio, params, sdma_rule)
    return _pick(r0, table[:, 0])


def outage_frontier(r_grid, m_max, scheme, n_max=DEFAULT_N_MAX, ratio=10.0,
                    params=ChannelParams(), sdma_rule="min"):
    """Independent optimisation of ``N`` at every rate in ``r_grid``."""
    r_grid = np.asarray(r_grid, dtype=float)
    if r_grid.ndim != 1 or np.any(np.diff(r_grid) <= 0) or np.any(r_grid <= 0):
        raise InvalidParameter("r_grid must be positive and strictly increasing")
    table = _outage_table(r_grid, m_max, scheme, n_max, ratio, params, sdma_rule)
    return [_pick(r, table[:, j]) for j, r in enumerate(r_grid)]
