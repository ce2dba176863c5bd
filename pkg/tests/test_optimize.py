import numpy as np
import pytest

from smallcell import ChannelParams, optimal_subchannels, outage_curve, outage_frontier

PARAMS = ChannelParams(4.0, 1.0)


def test_small_rate_prefers_many_subchannels():
    res = optimal_subchannels(0.05, 1, "scheme1", n_max=60, params=PARAMS)
    assert res.n_star > 1
    assert res.outage < res.outage_at(1)


def test_result_is_argmin_with_smallest_tie():
    res = optimal_subchannels(0.3, 2, "scheme2", n_max=30, params=PARAMS)
    values = dict(res.evaluated)
    assert res.outage == min(values.values())
    assert res.n_star == min(n for n, v in values.items() if v == res.outage)
    assert sorted(values) == list(range(1, 31))


def test_outage_curve_matches_search():
    res = optimal_subchannels(0.4, 1, "scheme1", n_max=12, params=PARAMS)
    for n in (1, 5, 12):
        assert outage_curve([0.4], n, 1, "scheme1", 10.0, PARAMS)[0] == res.outage_at(n)


def test_frontier_below_single_channel_and_deterministic():
    grid = np.array([0.1, 0.5, 1.0, 1.5])
    a = outage_frontier(grid, 2, "scheme1", n_max=40, params=PARAMS)
    b = outage_frontier(grid, 2, "scheme1", n_max=40, params=PARAMS)
    for x, y in zip(a, b):
        assert (x.r0, x.n_star, x.outage) == (y.r0, y.n_star, y.outage)
        assert 0 <= x.outage <= x.outage_at(1) <= 1


@pytest.mark.parametrize("bad", [[0.5, 0.2], [0.0, 0.1], [[0.1]]])
def test_frontier_rejects_bad_grid(bad):
    with pytest.raises(ValueError):
        outage_frontier(bad, 1, "scheme1", n_max=3)


def test_rejects_bad_target():
    with pytest.raises(ValueError):
        optimal_subchannels(0.0, 1, "scheme1", n_max=3)
