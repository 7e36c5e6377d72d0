import numpy as np
import pytest

from openasep.errors import ParameterError
from openasep.generic import numeric_steady_state
from openasep.gillespie import SimConfig, simulate
from openasep.model import BoundaryRates
from openasep.observables import current, density_profile

Z_BOUND = 4.0

RATES = BoundaryRates(0.8, 0.6, 0.3, 0.2, 1.6, 3)


def test_same_seed_is_bit_identical():
    a = simulate(SimConfig(RATES, 200_000, seed=3))
    b = simulate(SimConfig(RATES, 200_000, seed=3))
    assert a.current_mean == b.current_mean
    np.testing.assert_array_equal(a.density_mean, b.density_mean)
    c = simulate(SimConfig(RATES, 200_000, seed=4))
    assert c.current_mean != a.current_mean


def test_estimates_agree_with_exact_values():
    est = simulate(SimConfig(RATES, 2_000_000, seed=0))
    exact = numeric_steady_state(RATES)
    z = (est.current_mean - current(exact, RATES)) / est.current_stderr
    assert abs(z) <= Z_BOUND
    zd = (est.density_mean - density_profile(exact, RATES)) / est.density_stderr
    assert np.max(np.abs(zd)) <= Z_BOUND
    zb = (est.bond_current_mean - current(exact, RATES)) / est.bond_current_stderr
    assert np.max(np.abs(zb)) <= Z_BOUND


def test_standard_error_scales_with_run_length():
    short = [simulate(SimConfig(RATES, 250_000, seed=s)).current_stderr for s in range(4)]
    long = [simulate(SimConfig(RATES, 1_000_000, seed=s)).current_stderr for s in range(4)]
    # four times the events should roughly halve the error
    assert 0.3 <= np.mean(long) / np.mean(short) <= 0.75


def test_time_series_thinning():
    est = simulate(SimConfig(RATES, 10_000, seed=1, thin=100))
    assert est.time_series.shape == (100, 2)
    assert np.all(np.diff(est.time_series[:, 0]) > 0)
    assert est.time_series[:, 1].max() <= RATES.n_sites


@pytest.mark.parametrize("kwargs", [
    dict(n_events=100, burn_in_events=200),
    dict(n_events=100, batch_count=5),
    dict(n_events=15, burn_in_events=10),
    dict(n_events=100, thin=-1),
])
def test_invalid_configs(kwargs):
    with pytest.raises(ParameterError):
        SimConfig(RATES, **kwargs)


def test_requires_positive_rates():
    with pytest.raises(ParameterError):
        simulate(SimConfig(RATES.with_(alpha=0.0), 1000))
