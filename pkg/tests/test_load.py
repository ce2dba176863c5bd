import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from conftest import nb_pmf_oracle
from smallcell import (InvalidParameter, LoadPmf, TailMassTooLarge, cell_load_pmf,
                       pmf_moment, tagged_cell_extra_load_pmf)


def test_empty_cell_probability(load10):
    assert load10.probs[0] == pytest.approx(nb_pmf_oracle(0, 10.0, 3.5), rel=1e-12)
    assert load10.probs[0] == pytest.approx(8.87e-3, abs=5e-6)


@pytest.mark.parametrize("k", [0, 1, 5, 10, 37, 90])
def test_entries_match_high_precision_oracle(load10, k):
    assert load10.probs[k] == pytest.approx(nb_pmf_oracle(k, 10.0, 3.5), rel=1e-9)


def test_mean_equals_ratio(load10):
    assert load10.mean() == pytest.approx(10.0, rel=1e-6)
    assert pmf_moment(cell_load_pmf(10.0, k_max=200), 1) == pytest.approx(10.0, rel=1e-6)


def test_more_than_forty_ues_is_rare():
    pmf = cell_load_pmf(10.0, k_max=200)
    assert pmf.probs[41:].sum() < 1e-3


def test_tagged_cell_is_heavier(load10, extra10):
    oracle_mean = sum(k * nb_pmf_oracle(k, 10.0, 4.5) for k in range(300))
    assert extra10.mean() == pytest.approx(oracle_mean, rel=1e-9)
    assert extra10.mean() > 10.0
    size = max(load10.k_max, extra10.k_max) + 1
    a = np.pad(load10.probs, (0, size - load10.probs.size)).cumsum()
    b = np.pad(extra10.probs, (0, size - extra10.probs.size)).cumsum()
    assert np.all(b <= a + 1e-15)


def test_tiny_ratio_collapses_to_zero():
    pmf = tagged_cell_extra_load_pmf(1e-9, k_max=50)
    assert pmf.probs[0] == pytest.approx(1.0, abs=1e-8)


def test_moments_of_simple_pmfs():
    assert pmf_moment(np.array([0.5, 0.5]), 1) == 0.5
    assert pmf_moment(LoadPmf.degenerate(3), 2) == 9.0
    with pytest.raises(InvalidParameter):
        pmf_moment(LoadPmf.degenerate(3), 3)


def test_large_ratio_is_stable():
    pmf = cell_load_pmf(50.0, k_max=2000)
    assert np.all(np.isfinite(pmf.probs))
    assert pmf.mean() == pytest.approx(50.0, rel=1e-6)


def test_truncation_too_tight():
    with pytest.raises(TailMassTooLarge):
        cell_load_pmf(10.0, k_max=20)


@pytest.mark.parametrize("bad", [0.0, -1.0, float("nan")])
def test_rejects_bad_ratio(bad):
    with pytest.raises(InvalidParameter):
        cell_load_pmf(bad)


def test_matches_negative_binomial(load10):
    ref = stats.nbinom.pmf(np.arange(load10.k_max + 1), 3.5, 3.5 / 13.5)
    np.testing.assert_allclose(load10.probs, ref / ref.sum(), rtol=1e-10, atol=1e-300)


@settings(max_examples=40, deadline=None)
@given(ratio=st.floats(0.05, 30.0), c=st.sampled_from([3.5, 4.5]))
def test_normalised_and_mean_property(ratio, c):
    pmf = cell_load_pmf(ratio, c=c)
    assert abs(pmf.probs.sum() - 1.0) < 1e-9
    assert np.all(pmf.probs >= 0)
    assert pmf.probs[0] > 0
    assert pmf.mean() == pytest.approx(ratio * c / 3.5, rel=1e-6)


@pytest.mark.parametrize("ratio", [0.5, 2.0, 10.0])
def test_mean_identity(ratio):
    assert cell_load_pmf(ratio).mean() == pytest.approx(ratio, rel=1e-6)
