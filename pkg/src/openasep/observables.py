"""
Stationary observables of the open ASEP.

Expectations are ratios against the left steady state (the all-ones
covector), so vectors need not be normalized or sign-fixed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ParameterError, SingularPointError
from .model import BoundaryRates

NORM_FLOOR = 1e-300


@dataclass(frozen=True)
class ObservableSet:
    current: float
    density: np.ndarray
    normalization: float

    def as_dict(self) -> dict:
        return {
            "current": float(self.current),
            "density": [float(x) for x in self.density],
            "normalization": float(self.normalization),
        }


def _site_view(state: np.ndarray, n_sites: int) -> np.ndarray:
    state = np.asarray(state)
    if state.shape != (2 ** n_sites,):
        raise ParameterError(f"state has shape {state.shape}, expected ({2 ** n_sites},)")
    return state.reshape((2,) * n_sites)


def normalization(state: np.ndarray) -> complex:
    """<Phi|state> with the all-ones left steady state."""
    total = np.sum(state)
    if abs(total) <= NORM_FLOOR:
        raise SingularPointError("state has zero overlap with the left steady state")
    return total


def site_marginal(state: np.ndarray, n_sites: int, site: int) -> np.ndarray:
    """Un-normalized (empty, occupied) weights at a single site (1-based)."""
    t = _site_view(state, n_sites)
    axes = tuple(a for a in range(n_sites) if a != site - 1)
    return t.sum(axis=axes)


def pair_marginal(state: np.ndarray, n_sites: int, site: int) -> np.ndarray:
    """Un-normalized 2x2 weights of sites (site, site + 1)."""
    t = _site_view(state, n_sites)
    axes = tuple(a for a in range(n_sites) if a not in (site - 1, site))
    return t.sum(axis=axes)


def _real(value):
    return float(np.real(value)) if np.isrealobj(value) or abs(np.imag(value)) <= 1e-12 * abs(value) else complex(value)


def current(state: np.ndarray, rates: BoundaryRates) -> float:
    """Left-boundary current alpha P(site 1 empty) - gamma P(site 1 occupied)."""
    norm = normalization(state)
    w = site_marginal(state, rates.n_sites, 1) / norm
    return _real(rates.alpha * w[0] - rates.gamma * w[1])


def right_boundary_current(state: np.ndarray, rates: BoundaryRates) -> float:
    norm = normalization(state)
    w = site_marginal(state, rates.n_sites, rates.n_sites) / norm
    return _real(rates.beta * w[1] - rates.delta * w[0])


def bond_currents(state: np.ndarray, rates: BoundaryRates) -> np.ndarray:
    """Net rightward current across each of the N - 1 bulk bonds."""
    norm = normalization(state)
    q = rates.q
    out = []
    for k in range(1, rates.n_sites):
        p = pair_marginal(state, rates.n_sites, k) / norm
        out.append(q / (q + 1) * p[1, 0] - p[0, 1] / (q + 1))
    return np.real_if_close(np.array(out))


def density_profile(state: np.ndarray, rates: BoundaryRates) -> np.ndarray:
    """<n_k> for k = 1..N."""
    norm = normalization(state)
    t = _site_view(state, rates.n_sites)
    out = []
    for k in range(rates.n_sites):
        axes = tuple(a for a in range(rates.n_sites) if a != k)
        out.append(t.sum(axis=axes)[1] / norm)
    return np.real_if_close(np.array(out))


def observables(state: np.ndarray, rates: BoundaryRates) -> ObservableSet:
    return ObservableSet(current(state, rates), density_profile(state, rates),
                         _real(normalization(state)))


# --------------------------------------------------------------------------
# closed forms
# --------------------------------------------------------------------------

def density_m0(rates: BoundaryRates) -> np.ndarray:
    q, al, ga = rates.q, rates.alpha, rates.gamma
    x = al * q ** np.arange(rates.n_sites)
    return x / (ga + x)


def _m1_denominator(rates: BoundaryRates) -> float:
    n, q = rates.n_sites, rates.q
    al, be, ga, de = rates.alpha, rates.beta, rates.gamma, rates.delta
    return (2 * (n - 1) * (1 - q ** 2)
            + (q + 1) * (al / ga + be / de - ga * q / al - de * q / be)
            + (1 - q) * (1 / ga + 1 / de + q / al + q / be))


def current_m1(rates: BoundaryRates) -> float:
    rates.require_positive()
    return -(rates.q - 1) ** 2 / _m1_denominator(rates)


def density_m1(rates: BoundaryRates) -> np.ndarray:
    rates.require_positive()
    n, q = rates.n_sites, rates.q
    al, be, ga, de = rates.alpha, rates.beta, rates.gamma, rates.delta
    k = np.arange(1, n + 1, dtype=float)
    qk1, qk2 = q ** (k - 1), q ** (k - 2)
    t1 = ((al * ga / (be * de)) * (be ** 2 + 2 * be * de * (q - 1) * (k - n) - de ** 2 * q)
          + al ** 2 * qk1 - ga ** 2 * q ** (2 - k)) / ((1 - q) * (ga + al * qk1))
    t2 = (al ** 2 * qk1 - ga ** 2 * q ** (2 - k) - al ** 2 + 2 * al * ga * (k - 1) * (q - 1)
          + ga ** 2 * q) / ((q - 1) * (ga + al * qk2))
    t3 = (al + ga * q) / ((q + 1) * (ga + al * qk2))
    t4 = al * ga * (be + de * q) / (be * de * (q + 1) * (ga + al * qk1))
    return 1 + (q ** 2 - 1) / al * (t1 + t2 + t3 + t4) / _m1_denominator(rates)


def current_m2(rates: BoundaryRates) -> float:
    rates.require_positive()
    n, q = rates.n_sites, rates.q
    al, be, ga, de = rates.alpha, rates.beta, rates.gamma, rates.delta
    ratio = al * ga / (be * de)
    ms = np.arange(1, n)
    lead = np.sum(q ** (-ms) * (ga + al * q ** (ms - 2.0)) ** 2)
    left_factor = (al + ga * q ** 2 + al * q + ga * q - q) * (al + ga * q)
    a1 = al * ga * (q ** 2 - 1) * ((q + 1) * q ** 3 * lead + q * ratio * (be + de * q) - left_factor)
    double = 0.0
    for nn in range(1, n - 1):
        for mm in range(nn + 1, n):
            double += q ** (-mm - nn) * (ga + al * q ** (mm - 2)) ** 2 * (ga + al * q ** (nn - 1)) ** 2
    second = np.sum(q ** (-ms) * (ga + al * q ** (ms - 1.0)) ** 2)
    a2 = (q ** 4 * (q + 1) ** 3 * double
          + q ** 3 * (q + 1) ** 2 * (q * ga + al) * lead
          + q ** 2 * (q + 1) ** 2 * ratio * (be + de * q) * second
          - ratio ** 2 * (be + de * q ** 2 + be * q + de * q - q) * (be + de * q) * (be + de * q ** 2)
          - left_factor * (al + ga * q ** 2)
          + q * (q + 1) * ratio * (al + ga * q) * (be + de * q))
    return float(a1 / a2)


def large_n_current_asymptote(rates: BoundaryRates, m: int, branch: Optional[str] = None) -> float:
    """Leading large-N current in constraint class m in {1, 2}.

    ``branch`` may be given as ``"q>1"`` (beta small) or ``"q<1"`` (delta
    small); it must agree with the sign of q - 1.
    """
    if m not in (1, 2):
        raise ParameterError("large-N asymptotes exist for M = 1 and M = 2 only")
    q, n = rates.q, rates.n_sites
    al, be, ga, de = rates.alpha, rates.beta, rates.gamma, rates.delta
    natural = "q>1" if q > 1 else "q<1"
    if branch is not None and branch != natural:
        raise ParameterError(f"branch {branch!r} does not match q = {q}")
    if q > 1:
        rates.require_positive("alpha")
        value = ga * de * (q - 1) ** 2 * q ** (1 - n) / (al * (de + de * q + q - 1))
        return value * (q + 1) if m == 2 else value
    rates.require_positive("gamma")
    power = n - 2 if m == 1 else n - 3
    value = -al * be * (q - 1) ** 2 * q ** power / (ga * (be + be * q - q + 1))
    return value * (q + 1) if m == 2 else value


# --------------------------------------------------------------------------
# single-kink overlap identities
# --------------------------------------------------------------------------

def single_kink_overlap(n: int, rates: BoundaryRates) -> float:
    """Closed form of <Phi|n> for the single-kink vector |n>."""
    q, al, ga = rates.q, rates.alpha, rates.gamma
    prod = np.prod([ga + al * q ** (k - 1) for k in range(1, rates.n_sites)])
    return (ga + al * q ** (n - 1)) * prod


def single_kink_current_overlap(n: int, rates: BoundaryRates) -> float:
    """Closed form of <Phi|j|n>: nonzero only for the kink at 0."""
    if n != 0:
        return 0.0
    q, al, ga = rates.q, rates.alpha, rates.gamma
    prod = np.prod([ga + al * q ** (k - 1) for k in range(1, rates.n_sites)])
    return al * ga * (1 - 1 / q) * prod


def current_operator_local(rates: BoundaryRates) -> np.ndarray:
    """Single-site current operator at the left boundary."""
    return np.array([[0.0, -rates.gamma], [rates.alpha, 0.0]])
