import numpy as np
import pytest
from hypothesis import given, settings

from openasep.chiral import KinkState, kink_vector
from openasep.errors import ParameterError, SingularPointError
from openasep.generic import numeric_steady_state
from openasep.model import BoundaryRates, solve_beta, solve_delta
from openasep.observables import (
    bond_currents,
    current,
    current_m1,
    current_m2,
    current_operator_local,
    density_m0,
    density_m1,
    density_profile,
    large_n_current_asymptote,
    normalization,
    observables,
    right_boundary_current,
    single_kink_current_overlap,
    single_kink_overlap,
)
from openasep.steady import steady_state

from strategies import boundary_rates, random_class_rates

CLOSED_FORM_RTOL = 1e-9
CONSERVATION_TOL = 1e-12


@settings(max_examples=40, deadline=None)
@given(boundary_rates(max_sites=6))
def test_current_is_conserved_along_the_chain(rates):
    vec = numeric_steady_state(rates)
    j = current(vec, rates)
    np.testing.assert_allclose(bond_currents(vec, rates), j, atol=CONSERVATION_TOL)
    assert right_boundary_current(vec, rates) == pytest.approx(j, abs=CONSERVATION_TOL)


@pytest.mark.parametrize("n", [2, 3, 5, 7])
def test_class_zero_has_no_current(n):
    rates = random_class_rates(np.random.default_rng(n), n, 0)
    vec = steady_state(rates, 0)
    assert abs(current(vec, rates)) <= CONSERVATION_TOL
    np.testing.assert_allclose(density_profile(vec, rates), density_m0(rates), rtol=CLOSED_FORM_RTOL)


@pytest.mark.parametrize("n", [2, 3, 4, 6, 8])
def test_single_kink_current_and_density(n):
    rates = random_class_rates(np.random.default_rng(10 + n), n, 1)
    vec = numeric_steady_state(rates)
    assert current_m1(rates) == pytest.approx(current(vec, rates), rel=CLOSED_FORM_RTOL)
    np.testing.assert_allclose(density_m1(rates), density_profile(vec, rates), rtol=CLOSED_FORM_RTOL)


@pytest.mark.parametrize("n", [3, 4, 5, 6, 8])
def test_two_kink_current(n):
    rates = random_class_rates(np.random.default_rng(20 + n), n, 2)
    vec = numeric_steady_state(rates)
    assert current_m2(rates) == pytest.approx(current(vec, rates), rel=CLOSED_FORM_RTOL)


@pytest.mark.parametrize("q, solver", [(1.5, solve_beta), (0.6, solve_delta)])
@pytest.mark.parametrize("m", [1, 2])
def test_large_chain_asymptote(q, solver, m):
    exact = {1: current_m1, 2: current_m2}[m]
    gaps = []
    for n in (10, 20, 40):
        rates = solver(BoundaryRates(0.7, 0.9, 0.5, 1.0, q, n), m)
        gaps.append(abs(exact(rates) / large_n_current_asymptote(rates, m) - 1))
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[1] <= 0.05


def test_two_kink_asymptote_is_scaled_single_kink():
    rates = BoundaryRates(0.7, 0.1, 0.5, 1.0, 1.5, 20)
    ratio = large_n_current_asymptote(rates, 2) / large_n_current_asymptote(rates, 1)
    assert ratio == pytest.approx(rates.q + 1)


def test_asymptote_branch_checked():
    rates = BoundaryRates(0.7, 0.1, 0.5, 1.0, 1.5, 20)
    with pytest.raises(ParameterError):
        large_n_current_asymptote(rates, 1, branch="q<1")
    with pytest.raises(ParameterError):
        large_n_current_asymptote(rates, 3)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_single_kink_overlaps(n):
    rates = BoundaryRates(0.6, 0.8, 0.9, 0.4, 1.7, n)
    jmat = np.kron(current_operator_local(rates), np.eye(2 ** (n - 1)))
    for pos in range(n + 1):
        vec = kink_vector(KinkState((pos,), n), rates).real
        assert vec.sum() == pytest.approx(single_kink_overlap(pos, rates), rel=1e-12)
        overlap = (jmat @ vec).sum()
        assert overlap == pytest.approx(single_kink_current_overlap(pos, rates), rel=1e-12, abs=1e-12)


def test_observables_are_scale_invariant():
    rates = random_class_rates(np.random.default_rng(7), 4, 1)
    vec = steady_state(rates, 1)
    a, b = observables(vec, rates), observables(-3.0 * vec, rates)
    assert a.current == pytest.approx(b.current)
    np.testing.assert_allclose(a.density, b.density)


def test_zero_overlap_is_singular():
    with pytest.raises(SingularPointError):
        normalization(np.array([1.0, -1.0, 0.0, 0.0]))
