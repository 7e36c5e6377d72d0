"""
Closed-form right steady state in a constraint class.

Under alpha*beta*q^(N-1-M) = gamma*delta the steady state is a finite sum over
the symmetric kink set with coefficient ``kappa(m0, mN) * f(l_1..l_M)``.
Coefficients are used exactly as printed, with no reduction onto an
independent subset. The coefficients alternate in sign, so for long chains
far from q = 1 the sum cancels heavily; such cases are re-evaluated in
multiprecision arithmetic.
"""

from __future__ import annotations

from typing import List, Optional, Sequence

import mpmath
import numpy as np

from .chiral import KinkState, enumerate_basis, kink_vector
from .errors import ConstraintError, ParameterError
from .model import BoundaryRates, constraint_class, constraint_residual, state_bits


def _g(n: int, q: float, inject: float, extract: float) -> float:
    # shared form of g_l (alpha, gamma) and g_r (beta, delta)
    if n == 0:
        return 1.0
    qn = q ** n
    denom = (qn - 1) * (extract + inject * q ** (-n))
    first = (q - 1) / ((q + 1) * denom)
    second = (q ** (n - 1) - 1) * (extract + inject * q ** (1 - n)) / denom
    return first - second


def g_left(n: int, rates: BoundaryRates) -> float:
    return _g(n, rates.q, rates.alpha, rates.gamma)


def g_right(n: int, rates: BoundaryRates) -> float:
    return _g(n, rates.q, rates.beta, rates.delta)


def _f(kinks: Sequence[int], q, al, ga):
    out = 1
    for s, l in enumerate(sorted(kinks), start=1):
        out *= ga * q ** (-l) + al * q ** (-s)
    return out


def _kappa(m0: int, m_n: int, q, al, be, ga, de):
    out = 1
    for s in range(1, m0 + 1):
        out *= _g(s, q, al, ga)
    for s in range(1, m_n + 1):
        out *= _g(s, q, be, de)
    return out


def f_coefficient(kinks: Sequence[int], rates: BoundaryRates) -> float:
    """prod_s (gamma q^-l_s + alpha q^-s) over the sorted kink positions."""
    return float(_f(kinks, rates.q, rates.alpha, rates.gamma))


def kappa(m0: int, m_n: int, rates: BoundaryRates) -> float:
    return float(_kappa(m0, m_n, rates.q, rates.alpha, rates.beta, rates.gamma, rates.delta))


def expansion_terms(rates: BoundaryRates, m: int):
    """(kink state, coefficient) pairs of the steady-state expansion."""
    return [(s, kappa(s.m0, s.m_n, rates) * f_coefficient(s.kinks, rates))
            for s in enumerate_basis(m, rates.n_sites)]


def pairwise_sum(rows: np.ndarray) -> np.ndarray:
    """Sum along axis 0 with a fixed binary tree (bitwise reproducible)."""
    rows = np.asarray(rows)
    while rows.shape[0] > 1:
        if rows.shape[0] % 2:
            rows = np.concatenate([rows[:-2], rows[-2:-1] + rows[-1:]])
        rows = rows[0::2] + rows[1::2]
    return rows[0]


#: relative cancellation above which the sum is redone in multiprecision
CANCELLATION_LIMIT = 1e3
_GUARD_DIGITS = 20


def _multiprecision_sum(rates: BoundaryRates, m: int, digits: int) -> np.ndarray:
    """The expansion evaluated with ``digits`` significant digits, rounded to float."""
    with mpmath.workdps(digits):
        q, al, be, ga, de = (mpmath.mpf(float(v)) for v in
                             (rates.q, rates.alpha, rates.beta, rates.gamma, rates.delta))
        total = np.array([mpmath.mpf(0)] * rates.dim, dtype=object)
        for state in enumerate_basis(m, rates.n_sites):
            vec = np.array([_kappa(state.m0, state.m_n, q, al, be, ga, de)
                            * _f(state.kinks, q, al, ga)], dtype=object)
            for z in state.phases():
                vec = np.kron(vec, np.array([ga, al * q ** int(z)], dtype=object))
            total = total + vec
        return np.array([float(x) for x in total])


def _check_class(rates: BoundaryRates, m: int) -> None:
    found = constraint_class(rates)
    if found is None or found.m != m:
        res = constraint_residual(rates, m)
        raise ConstraintError(
            f"rates are not in constraint class {m} (residual {res:.3e})", residual=res
        )


def steady_state(rates: BoundaryRates, m: int, enforce_constraint: bool = True,
                 normalize: bool = False) -> np.ndarray:
    """Right steady state built from the chiral kink expansion.

    With ``enforce_constraint=False`` the same formulas are evaluated at
    arbitrary rates, which is what the generic-boundary decomposition uses.
    """
    if int(m) != m or not 0 <= m <= rates.n_sites:
        raise ParameterError(f"M must be an integer in [0, {rates.n_sites}], got {m}")
    m = int(m)
    rates.require_positive()
    if enforce_constraint:
        _check_class(rates, m)
    terms = expansion_terms(rates, m)
    rows = np.array([c * kink_vector(s, rates).real for s, c in terms])
    vec = pairwise_sum(rows)
    cancellation = np.linalg.norm(np.abs(rows).sum(axis=0)) / max(np.linalg.norm(vec), 1e-300)
    if cancellation > CANCELLATION_LIMIT:
        digits = 16 + int(np.ceil(np.log10(cancellation))) + _GUARD_DIGITS
        vec = _multiprecision_sum(rates, m, digits)
    if normalize:
        total = vec.sum()
        vec = vec / total
        if np.any(vec < 0):
            raise ConstraintError("steady state has entries of mixed sign; cannot normalize")
    return vec


def m1_coefficients(rates: BoundaryRates) -> np.ndarray:
    """chi_0 ... chi_N of the single-kink expansion."""
    n, q, al, ga = rates.n_sites, rates.q, rates.alpha, rates.gamma
    f = np.array([ga * q ** (-k) + al / q for k in range(n + 1)])
    chi = f.copy()
    chi[0] = g_left(1, rates) * f[0]
    chi[n] = g_right(1, rates) * f[n]
    return chi


def m1_recursion_lines(rates: BoundaryRates, chi: Optional[np.ndarray] = None) -> dict:
    """Relative residual of every line of the single-kink recursion."""
    n, q = rates.n_sites, rates.q
    al, be, ga, de = rates.alpha, rates.beta, rates.gamma, rates.delta
    chi = m1_coefficients(rates) if chi is None else np.asarray(chi)
    hop_r, hop_l = q / (q + 1), 1 / (q + 1)
    head = (al + q * ga) / q
    tail = be + q * de

    def rel(lhs, rhs):
        scale = max(abs(lhs), abs(rhs), 1e-300)
        return abs(lhs - rhs) / scale

    out = {}
    bulk = [rel(chi[k], hop_r * chi[k + 1] + hop_l * chi[k - 1]) for k in range(2, n - 1)]
    out["bulk"] = max(bulk) if bulk else 0.0
    if n >= 3:
        out["first"] = rel(chi[1], hop_r * chi[2] + head * chi[0])
        out["last"] = rel(chi[n - 1], tail * chi[n] + hop_l * chi[n - 2])
    else:
        out["first"] = out["last"] = rel(chi[1], head * chi[0] + tail * chi[2])
    out["left_boundary"] = rel((al + ga) * chi[0], hop_r * chi[1])
    out["right_boundary"] = rel((be + de) * chi[n], hop_l * chi[n - 1])
    return out


def verify_m1_recursion(rates: BoundaryRates) -> dict:
    """Residual report for the single-kink recursion; ``max`` is the worst line."""
    rates.require_positive()
    lines = m1_recursion_lines(rates)
    lines["max"] = max(lines.values())
    return lines


def state_table(vector: np.ndarray, n_sites: int) -> List[dict]:
    """Rows (index, bitstring, component) for export."""
    vector = np.asarray(vector)
    if vector.shape != (2 ** n_sites,):
        raise ParameterError("vector dimension does not match the chain length")
    rows = []
    for idx, value in enumerate(vector):
        rows.append({
            "index": idx,
            "bitstring": "".join(str(b) for b in state_bits(idx, n_sites)),
            "component": float(np.real(value)) if np.isrealobj(vector) else complex(value),
        })
    return rows
