"""scikit-learn style wrappers around the functional core.

The models here have no training data: ``fit`` builds the load and access
distributions (or runs the simulation) from the constructor parameters, and
``predict`` evaluates the resulting rate cdf at the rates in ``X``.
"""

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .analytic import ChannelParams, rate_cdf, sir_cdf
from .config import DEFAULT_SEED
from .load import cell_load_pmf, tagged_cell_extra_load_pmf
from .optimize import DEFAULT_N_MAX, outage_frontier
from .schemes import Scheme, access_profile, degenerate_profile
from .simulate import SimWindow, simulate_records


def _as_rates(X):
    x = np.asarray(X, dtype=float)
    if x.ndim == 2 and x.shape[1] == 1:
        x = x[:, 0]
    if x.ndim != 1:
        raise ValueError("X must be 1-d or a single column")
    if np.any(x < 0) or not np.all(np.isfinite(x)):
        raise ValueError("rates must be finite and non-negative")
    return x


class _RateModel(BaseEstimator):
    def transform(self, X):
        """Rate cdf values as a column vector."""
        return self.predict(X)[:, None]

    def fit_transform(self, X, y=None):
        return self.fit(X, y).transform(X)


class AnalyticRateModel(_RateModel):
    """Analytic user-rate cdf for one network configuration."""

    def __init__(self, ratio=10.0, alpha=4.0, theta0=1.0, n_subchannels=5, m_max=1,
                 scheme="scheme1", sdma_rule="min", k_max=None, full_buffer=False):
        self.ratio = ratio
        self.alpha = alpha
        self.theta0 = theta0
        self.n_subchannels = n_subchannels
        self.m_max = m_max
        self.scheme = scheme
        self.sdma_rule = sdma_rule
        self.k_max = k_max
        self.full_buffer = full_buffer

    def fit(self, X=None, y=None):
        self.params_ = ChannelParams(self.alpha, self.theta0)
        if self.full_buffer:
            self.profile_ = degenerate_profile(self.m_max, self.m_max)
        else:
            self.load_ = cell_load_pmf(self.ratio, k_max=self.k_max)
            self.extra_load_ = tagged_cell_extra_load_pmf(self.ratio, k_max=self.k_max)
            self.profile_ = access_profile(Scheme.parse(self.scheme), self.load_,
                                           self.extra_load_, self.n_subchannels, self.m_max,
                                           sdma_rule=self.sdma_rule)
        self.activity_ = self.profile_.activity()
        return self

    def predict(self, X):
        """``Pr{R <= r}`` for every rate ``r`` in ``X``."""
        check_is_fitted(self, "profile_")
        rates = _as_rates(X)
        return np.atleast_1d(rate_cdf(rates, self.profile_.joint, self.n_subchannels,
                                      self.params_, self.profile_.mtilde))

    def sir_cdf(self, thetas):
        check_is_fitted(self, "profile_")
        m_pmf = self.profile_.m_pmf()
        return np.array([sir_cdf(t, m_pmf, self.profile_.mtilde, self.alpha)
                         for t in np.atleast_1d(np.asarray(thetas, dtype=float))])


class SimulatedRateModel(_RateModel):
    """Empirical user-rate cdf from independent network realizations."""

    def __init__(self, ratio=10.0, alpha=4.0, theta0=1.0, n_subchannels=5, m_max=1,
                 scheme="scheme1", sdma_rule="min", full_buffer=False, n_samples=10_000,
                 radius=20.0, guard_fraction=0.5, random_state=DEFAULT_SEED, n_jobs=1):
        self.ratio = ratio
        self.alpha = alpha
        self.theta0 = theta0
        self.n_subchannels = n_subchannels
        self.m_max = m_max
        self.scheme = scheme
        self.sdma_rule = sdma_rule
        self.full_buffer = full_buffer
        self.n_samples = n_samples
        self.radius = radius
        self.guard_fraction = guard_fraction
        self.random_state = random_state
        self.n_jobs = n_jobs

    def fit(self, X=None, y=None):
        params = ChannelParams(self.alpha, self.theta0)
        window = SimWindow(self.radius, self.guard_fraction)
        self.records_ = simulate_records(self.n_samples, self.random_state, self.scheme,
                                         self.n_subchannels, self.m_max, self.ratio, params,
                                         window, self.sdma_rule, self.full_buffer, self.n_jobs)
        probes = self.records_["active"][self.records_["active"] >= 0]
        self.activity_ = float(probes.mean()) if probes.size else float("nan")
        return self

    def predict(self, X):
        check_is_fitted(self, "records_")
        rates = np.sort(self.records_["rate"])
        return np.searchsorted(rates, _as_rates(X), side="right") / rates.size

    def sir_cdf(self, thetas):
        check_is_fitted(self, "records_")
        sir = np.sort(self.records_["sir"])
        return np.searchsorted(sir, np.asarray(thetas, dtype=float), side="right") / sir.size


class SubchannelSelector(BaseEstimator):
    """Rate-outage-optimal number of subchannels for each target rate."""

    def __init__(self, m_max=1, scheme="scheme1", n_max=DEFAULT_N_MAX, ratio=10.0,
                 alpha=4.0, theta0=1.0, sdma_rule="min"):
        self.m_max = m_max
        self.scheme = scheme
        self.n_max = n_max
        self.ratio = ratio
        self.alpha = alpha
        self.theta0 = theta0
        self.sdma_rule = sdma_rule

    def _solve(self, rates):
        grid = np.unique(rates)
        results = outage_frontier(grid, self.m_max, self.scheme, self.n_max, self.ratio,
                                  ChannelParams(self.alpha, self.theta0), self.sdma_rule)
        return {r.r0: r for r in results}

    def fit(self, X, y=None):
        self.results_ = self._solve(_as_rates(X))
        return self

    def _lookup(self, X):
        check_is_fitted(self, "results_")
        rates = _as_rates(X)
        missing = [r for r in np.unique(rates) if float(r) not in self.results_]
        if missing:
            self.results_.update(self._solve(np.array(missing)))
        return [self.results_[float(r)] for r in rates]

    def predict(self, X):
        """Optimal ``N`` for each target rate in ``X``."""
        return np.array([r.n_star for r in self._lookup(X)])

    def outage(self, X):
        """Minimised rate outage for each target rate in ``X``."""
        return np.array([r.outage for r in self._lookup(X)])
