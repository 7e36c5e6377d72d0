import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from openasep.integrability import (
    commutator_residual,
    generator_commutator_residual,
    k_minus,
    k_plus,
    markov_from_transfer,
    r_matrix,
    re_residual,
    transfer_derivative_fd,
    transfer_matrix,
    ybe_residual,
)
from openasep.model import BoundaryRates, build_markov_generator, rates_to_reflection_params, solve_delta

from reference_values import TABLE1_RATES
from strategies import boundary_rates, random_points, random_rates

IDENTITY_TOL = 1e-11
COMMUTATOR_TOL = 1e-9
ANALYTIC_TOL = 1e-8
FD_TOL = 1e-6
BRUTE_TOL = 1e-12
N_POINTS = 100


def _embed_pair(op4, i, j, n):
    """Operator on tensor factors (i, j) of n qubits, by explicit index loops."""
    dim = 2 ** n
    out = np.zeros((dim, dim), dtype=complex)
    op = op4.reshape(2, 2, 2, 2)
    for s in range(dim):
        bits = [(s >> (n - 1 - k)) & 1 for k in range(n)]
        for bi in range(2):
            for bj in range(2):
                v = op[bi, bj, bits[i], bits[j]]
                if v == 0:
                    continue
                nb = list(bits)
                nb[i], nb[j] = bi, bj
                out[sum(b << (n - 1 - k) for k, b in enumerate(nb)), s] += v
    return out


def brute_transfer(x, rates):
    """tr_0 K+ R_0N..R_01 K- R_10..R_N0 on the full (N+1)-qubit space."""
    n_sites, q = rates.n_sites, rates.q
    params = rates_to_reflection_params(rates)
    n = n_sites + 1
    rest = np.eye(2 ** n_sites)
    u = np.kron(k_plus(x, params, q), rest)
    for j in range(n_sites, 0, -1):
        u = u @ _embed_pair(r_matrix(x, q), 0, j, n)
    u = u @ np.kron(k_minus(x, params), rest)
    for j in range(1, n_sites + 1):
        u = u @ _embed_pair(r_matrix(x, q), j, 0, n)
    u = u.reshape(2, 2 ** n_sites, 2, 2 ** n_sites)
    return u[0, :, 0, :] + u[1, :, 1, :]


def test_yang_baxter_at_random_points():
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(N_POINTS):
        x, y, z = random_points(rng, 3)
        q = rng.uniform(0.2, 3.0)
        worst = max(worst, ybe_residual(x, y, z, q))
    assert worst <= IDENTITY_TOL


def test_reflection_equations_at_random_points():
    rng = np.random.default_rng(12)
    worst_re = worst_dual = 0.0
    for _ in range(N_POINTS):
        rates = random_rates(rng, 4)
        x, y = random_points(rng, 2)
        re, dual = re_residual(x, y, rates)
        worst_re, worst_dual = max(worst_re, re), max(worst_dual, dual)
    assert worst_re <= IDENTITY_TOL
    assert worst_dual <= IDENTITY_TOL


def test_r_matrix_regular_at_one():
    q = 0.7
    r = r_matrix(1.0, q)
    swap = np.eye(4)[[0, 2, 1, 3]]
    np.testing.assert_allclose(r, (q - 1) * swap, atol=1e-15)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_transfer_matrix_matches_literal_product(n):
    rng = np.random.default_rng(n)
    rates = random_rates(rng, n)
    for x in random_points(rng, 3):
        ref = brute_transfer(x, rates)
        np.testing.assert_allclose(transfer_matrix(x, rates), ref,
                                   atol=BRUTE_TOL * np.abs(ref).max())


@settings(max_examples=15, deadline=None)
@given(boundary_rates(max_sites=6), st.floats(min_value=-3, max_value=3),
       st.floats(min_value=-3, max_value=3))
def test_transfer_matrices_commute(rates, phase_x, phase_y):
    x, y = 0.9 * np.exp(1j * phase_x), 1.2 * np.exp(1j * phase_y)
    assert commutator_residual(x, y, rates) <= COMMUTATOR_TOL
    assert generator_commutator_residual(x, rates) <= COMMUTATOR_TOL


def test_analytic_derivative_matches_finite_difference():
    rates = BoundaryRates(**TABLE1_RATES)
    _, dtau = transfer_matrix(1.0, rates, derivative=True)
    fd = transfer_derivative_fd(rates, 1.0, 1e-4)
    np.testing.assert_allclose(dtau, fd, atol=1e-9 * np.abs(dtau).max())


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_generator_from_log_derivative(n):
    rng = np.random.default_rng(100 + n)
    rates = random_rates(rng, n)
    gen = build_markov_generator(rates)
    scale = np.linalg.norm(gen)
    analytic = markov_from_transfer(rates, "analytic")
    fd = markov_from_transfer(rates, "fd")
    assert np.linalg.norm(analytic - gen) / scale <= ANALYTIC_TOL
    assert np.linalg.norm(fd - gen) / scale <= FD_TOL


def test_generator_recovered_inside_constraint_class():
    rates = solve_delta(BoundaryRates(0.23, 0.32, 0.17, 1.0, 0.5, 4), 2)
    gen = build_markov_generator(rates)
    rec = markov_from_transfer(rates)
    assert np.linalg.norm(rec - gen) / np.linalg.norm(gen) <= ANALYTIC_TOL
