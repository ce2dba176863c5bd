import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from smallcell import (AnalyticRateModel, ChannelParams, SimulatedRateModel,
                       SubchannelSelector, optimal_subchannels)
from smallcell.optimize import outage_curve


def test_analytic_model_matches_functional_core():
    model = AnalyticRateModel(n_subchannels=10, m_max=2, scheme="scheme2").fit()
    rates = np.array([0.0, 0.1, 0.3])
    ref = outage_curve(rates, 10, 2, "scheme2", 10.0, ChannelParams())
    np.testing.assert_array_equal(model.predict(rates), ref)
    assert model.transform(rates[:, None]).shape == (3, 1)
    assert 0 < model.activity_ < 1


def test_params_round_trip():
    model = AnalyticRateModel(n_subchannels=7)
    params = model.get_params()
    assert params["n_subchannels"] == 7
    other = clone(model).set_params(m_max=3)
    assert other.m_max == 3 and model.m_max == 1


def test_unfitted_raises():
    with pytest.raises(NotFittedError):
        AnalyticRateModel().predict([0.1])


def test_full_buffer_baseline():
    model = AnalyticRateModel(n_subchannels=1, full_buffer=True).fit()
    assert model.sir_cdf([1.0])[0] == pytest.approx(1 - 1 / (1 + np.pi / 4), abs=1e-9)


def test_simulated_model_is_seeded():
    a = SimulatedRateModel(n_samples=120, random_state=3).fit()
    b = SimulatedRateModel(n_samples=120, random_state=3).fit()
    grid = np.linspace(0, 0.5, 11)
    np.testing.assert_array_equal(a.predict(grid), b.predict(grid))
    assert np.all(np.diff(a.predict(grid)) >= 0)
    assert np.all(np.diff(a.sir_cdf([0.1, 1, 10])) >= 0)


def test_selector_matches_search():
    sel = SubchannelSelector(m_max=1, n_max=20).fit([0.1, 0.5])
    for r in (0.1, 0.5, 0.8):
        ref = optimal_subchannels(r, 1, "scheme1", n_max=20)
        assert sel.predict([r])[0] == ref.n_star
        assert sel.outage([r])[0] == ref.outage


def test_rejects_bad_rates():
    model = AnalyticRateModel().fit()
    with pytest.raises(ValueError):
        model.predict([-0.1])
    with pytest.raises(ValueError):
        model.predict(np.zeros((2, 2)))
