import numpy as np
import pytest
from hypothesis import given, settings

from openasep.errors import ConstraintError, ParameterError
from openasep.generic import angle_between, numeric_steady_state
from openasep.model import BoundaryRates, build_markov_generator, solve_delta
from openasep.steady import (
    g_left,
    m1_recursion_lines,
    pairwise_sum,
    state_table,
    steady_state,
    verify_m1_recursion,
)

from strategies import class_rates, random_class_rates

NULL_TOL = 1e-10
ANGLE_TOL = 1e-8
RECURSION_TOL = 1e-12


def null_residual(rates, vec):
    return np.linalg.norm(build_markov_generator(rates) @ vec) / np.linalg.norm(vec)


@settings(max_examples=60, deadline=None)
@given(class_rates(max_sites=6))
def test_closed_form_is_null_vector(drawn):
    rates, m = drawn
    vec = steady_state(rates, m)
    assert null_residual(rates, vec) <= NULL_TOL
    assert angle_between(vec, numeric_steady_state(rates)) <= ANGLE_TOL


@settings(max_examples=40, deadline=None)
@given(class_rates(max_sites=6))
def test_normalized_steady_state_is_probability(drawn):
    rates, m = drawn
    vec = steady_state(rates, m, normalize=True)
    assert vec.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all(vec > 0)


def test_class_zero_is_product_measure():
    rates = random_class_rates(np.random.default_rng(0), 5, 0)
    vec = steady_state(rates, 0)
    q, al, ga = rates.q, rates.alpha, rates.gamma
    product = np.ones(1)
    for k in range(rates.n_sites):
        product = np.kron(product, [ga, al * q ** k])
    np.testing.assert_allclose(vec, product, rtol=1e-12)


def test_g_left_of_zero_is_one():
    assert g_left(0, BoundaryRates(0.3, 0.4, 0.5, 0.6, 2.0, 3)) == 1.0


def test_wrong_class_rejected():
    rates = random_class_rates(np.random.default_rng(1), 4, 2)
    with pytest.raises(ConstraintError) as info:
        steady_state(rates, 1)
    assert info.value.residual > 0
    with pytest.raises(ParameterError):
        steady_state(rates, 5)


def test_unenforced_evaluation_is_not_null_off_class():
    rates = random_class_rates(np.random.default_rng(2), 4, 1)
    off = rates.with_(delta=1.2 * rates.delta)
    assert null_residual(off, steady_state(off, 1, enforce_constraint=False)) > 1e-4


@pytest.mark.parametrize("n", [2, 3, 4, 6, 8])
def test_single_kink_recursion_holds_in_class(n):
    rates = random_class_rates(np.random.default_rng(n), n, 1)
    assert verify_m1_recursion(rates)["max"] <= RECURSION_TOL


def test_single_kink_recursion_detects_violation():
    rates = random_class_rates(np.random.default_rng(3), 4, 1)
    lines = m1_recursion_lines(rates.with_(delta=1.01 * rates.delta))
    assert lines["right_boundary"] > 1e-4
    assert lines["bulk"] <= RECURSION_TOL


def test_pairwise_sum_matches_sum():
    rows = np.random.default_rng(4).normal(size=(37, 8))
    np.testing.assert_allclose(pairwise_sum(rows), rows.sum(axis=0), rtol=1e-13)


def test_state_table_rows():
    rates = random_class_rates(np.random.default_rng(5), 3, 1)
    rows = state_table(steady_state(rates, 1), 3)
    assert [r["bitstring"] for r in rows[:3]] == ["000", "001", "010"]
    assert len(rows) == 8


def test_cancelling_expansion_stays_null():
    # alternating coefficients cancel by ~1e10 here; the sum is redone in multiprecision
    rates = solve_delta(BoundaryRates(1.3333, 1.9612, 1.79, 1.0, 0.3436, 8), 8)
    vec = steady_state(rates, 8)
    assert null_residual(rates, vec) <= NULL_TOL
    assert angle_between(vec, numeric_steady_state(rates, "solve")) <= ANGLE_TOL
