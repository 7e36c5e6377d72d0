"""
Open ASEP parameters, Hilbert-space indexing and the Markov generator.

Conventions shared by every module:

* site ``k`` (1-based) is the ``k``-th tensor factor, site 1 is the most
  significant bit of the flat index;
* local basis order is (empty, occupied), i.e. ``tau = 0`` then ``tau = 1``;
* operators act on column vectors (probability vectors are kets), so every
  column of the generator sums to zero.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace
from functools import reduce
from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import DenseLimitError, ParameterError

#: largest chain handled with dense 2^N x 2^N matrices
DENSE_LIMIT = 12
#: largest chain handled by the sparse steady-state path
SPARSE_LIMIT = 14
#: |q - 1| below this is treated as the (unsupported) symmetric point
Q_ONE_GUARD = 1e-8

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
NUMBER = np.array([[0.0, 0.0], [0.0, 1.0]])


@dataclass(frozen=True)
class BoundaryRates:
    """Physical parameters of the open chain.

    Bulk particles hop right at ``q/(q+1)`` and left at ``1/(q+1)``;
    ``alpha``/``gamma`` inject/extract at site 1, ``delta``/``beta``
    inject/extract at site N.
    """

    alpha: float
    beta: float
    gamma: float
    delta: float
    q: float
    n_sites: int

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma", "delta", "q"):
            value = getattr(self, name)
            if not np.isfinite(value):
                raise ParameterError(f"{name} must be finite, got {value!r}")
        if min(self.alpha, self.beta, self.gamma, self.delta) < 0:
            raise ParameterError("boundary rates must be non-negative")
        if self.q <= 0:
            raise ParameterError(f"q must be positive, got {self.q}")
        if abs(self.q - 1.0) <= Q_ONE_GUARD:
            raise ParameterError("q = 1 (symmetric exclusion) is not supported")
        if int(self.n_sites) != self.n_sites or self.n_sites < 2:
            raise ParameterError(f"n_sites must be an integer >= 2, got {self.n_sites}")
        object.__setattr__(self, "n_sites", int(self.n_sites))

    @property
    def dim(self) -> int:
        return 2 ** self.n_sites

    @property
    def boundary_sum(self) -> float:
        return self.alpha + self.beta + self.gamma + self.delta

    def with_(self, **changes) -> "BoundaryRates":
        return replace(self, **changes)

    def require_positive(self, *names: str) -> None:
        names = names or ("alpha", "beta", "gamma", "delta")
        bad = [n for n in names if not getattr(self, n) > 0]
        if bad:
            raise ParameterError(f"operation requires strictly positive {', '.join(bad)}")

    def as_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "gamma": self.gamma,
            "delta": self.delta,
            "q": self.q,
            "n_sites": self.n_sites,
        }


@dataclass(frozen=True)
class ReflectionParams:
    """Boundary parameters (a, b, c, d) of the K-matrices."""

    a: complex
    b: complex
    c: complex
    d: complex

    def as_tuple(self):
        return (self.a, self.b, self.c, self.d)


@dataclass(frozen=True)
class ConstraintClass:
    """Integer M with alpha*beta*q^(N-1-M) = gamma*delta, and its residual."""

    m: int
    residual: float


# --------------------------------------------------------------------------
# indexing
# --------------------------------------------------------------------------

def state_index(bits: Sequence[int]) -> int:
    """Flat index of an occupation bitstring (site 1 most significant)."""
    idx = 0
    for b in bits:
        if b not in (0, 1):
            raise ParameterError(f"occupations must be 0 or 1, got {b!r}")
        idx = (idx << 1) | int(b)
    return idx


def state_bits(index: int, n_sites: int) -> tuple:
    if not 0 <= index < 2 ** n_sites:
        raise ParameterError(f"index {index} out of range for {n_sites} sites")
    return tuple((index >> (n_sites - 1 - k)) & 1 for k in range(n_sites))


def occupation_table(n_sites: int) -> np.ndarray:
    """Array of shape (2^N, N) with the occupation of every site in every state."""
    idx = np.arange(2 ** n_sites)
    shifts = n_sites - 1 - np.arange(n_sites)
    return ((idx[:, None] >> shifts[None, :]) & 1).astype(np.int8)


def _check_dense(n_sites: int, limit: int = DENSE_LIMIT) -> None:
    if n_sites > limit:
        raise DenseLimitError(f"N={n_sites} exceeds the dense limit {limit}")


def embed(op: np.ndarray, first_site: int, n_sites: int) -> np.ndarray:
    """Embed a local operator acting on consecutive sites starting at ``first_site`` (1-based)."""
    width = int(round(math.log2(op.shape[0])))
    left = 2 ** (first_site - 1)
    right = 2 ** (n_sites - first_site - width + 1)
    if right < 1:
        raise ParameterError("operator does not fit in the chain")
    return reduce(np.kron, (np.eye(left), op, np.eye(right)))


# --------------------------------------------------------------------------
# local generators
# --------------------------------------------------------------------------

def bond_generator(q: float) -> np.ndarray:
    m = np.zeros((4, 4))
    m[1, 1] = -1.0 / (q + 1)
    m[1, 2] = q / (q + 1)
    m[2, 1] = 1.0 / (q + 1)
    m[2, 2] = -q / (q + 1)
    return m


def left_generator(rates: BoundaryRates) -> np.ndarray:
    return np.array([[-rates.alpha, rates.gamma], [rates.alpha, -rates.gamma]])


def right_generator(rates: BoundaryRates) -> np.ndarray:
    return np.array([[-rates.delta, rates.beta], [rates.delta, -rates.beta]])


def build_markov_generator(rates: BoundaryRates) -> np.ndarray:
    """Dense generator of the open ASEP as a real ``(2^N, 2^N)`` array."""
    n = rates.n_sites
    _check_dense(n)
    gen = embed(left_generator(rates), 1, n) + embed(right_generator(rates), n, n)
    bond = bond_generator(rates.q)
    for k in range(1, n):
        gen += embed(bond, k, n)
    return gen


def build_sparse_generator(rates: BoundaryRates) -> sp.csr_matrix:
    """Same operator as :func:`build_markov_generator` in CSR form."""
    n = rates.n_sites
    _check_dense(n, SPARSE_LIMIT)
    dim = 2 ** n
    idx = np.arange(dim)
    occ = occupation_table(n)
    rows, cols, vals = [], [], []

    def add(mask, target, rate):
        if rate == 0:
            return
        src = idx[mask]
        rows.extend((target[mask], src))
        cols.extend((src, src))
        vals.extend((np.full(src.size, rate), np.full(src.size, -rate)))

    top = 1 << (n - 1)
    add(occ[:, 0] == 0, idx + top, rates.alpha)
    add(occ[:, 0] == 1, idx - top, rates.gamma)
    add(occ[:, -1] == 0, idx + 1, rates.delta)
    add(occ[:, -1] == 1, idx - 1, rates.beta)
    q = rates.q
    for k in range(n - 1):
        hi, lo = 1 << (n - 1 - k), 1 << (n - 2 - k)
        add((occ[:, k] == 1) & (occ[:, k + 1] == 0), idx - hi + lo, q / (q + 1))
        add((occ[:, k] == 0) & (occ[:, k + 1] == 1), idx + hi - lo, 1.0 / (q + 1))
    if not rows:
        return sp.csr_matrix((dim, dim))
    return sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(dim, dim)
    )


# --------------------------------------------------------------------------
# gauge transformation to the XXZ chain
# --------------------------------------------------------------------------

def gauge_matrix(rates: BoundaryRates, rho: complex) -> np.ndarray:
    if rho == 0:
        raise ParameterError("gauge parameter rho must be non-zero")
    q = rates.q
    diag = np.array([1.0 + 0j])
    for site in range(1, rates.n_sites + 1):
        diag = np.kron(diag, np.array([1.0, rho * q ** ((1 - site) / 2)]))
    return np.diag(diag)


def xxz_prefactor(q: float) -> float:
    """Scalar s with M = s * G^-1 H G."""
    return math.sqrt(q) / (2 * (1 + q))


def build_xxz_hamiltonian(rates: BoundaryRates, rho: complex) -> np.ndarray:
    """Open XXZ Hamiltonian with the constrained non-diagonal boundary fields."""
    if rho == 0:
        raise ParameterError("gauge parameter rho must be non-zero")
    n = rates.n_sites
    _check_dense(n)
    q, al, be, ga, de = rates.q, rates.alpha, rates.beta, rates.gamma, rates.delta
    sq = math.sqrt(q)
    rho = complex(rho)
    dim = 2 ** n
    ham = np.zeros((dim, dim), dtype=complex)
    delta_xxz = (q + 1) / (2 * sq)
    bond = (
        np.kron(SIGMA_X, SIGMA_X)
        + np.kron(SIGMA_Y, SIGMA_Y)
        + delta_xxz * (np.kron(SIGMA_Z, SIGMA_Z) - np.eye(4))
    )
    for k in range(1, n):
        ham += embed(bond, k, n)
    h1 = (q + 1) * np.array([
        (ga + al * rho ** 2) / (sq * rho),
        1j * (ga - al * rho ** 2) / (sq * rho),
        (ga - al) / sq,
    ])
    up = q ** ((n - 1) / 2)
    down = q ** ((1 - n) / 2)
    hn = (q + 1) * np.array([
        (be * up + de * rho ** 2 * down) / (sq * rho),
        1j * (be * up - de * rho ** 2 * down) / (sq * rho),
        (be - de) / sq,
    ])
    paulis = (SIGMA_X, SIGMA_Y, SIGMA_Z)
    ham += embed(sum(c * s for c, s in zip(h1, paulis)), 1, n)
    ham += embed(sum(c * s for c, s in zip(hn, paulis)), n, n)
    ham += (q - 1) / (2 * sq) * (embed(SIGMA_Z, 1, n) - embed(SIGMA_Z, n, n))
    ham -= (q + 1) * ((al + ga) / sq + (be + de) / sq) * np.eye(dim)
    return ham


def hermitian_gauge(rates: BoundaryRates) -> float:
    """rho = sqrt(gamma/alpha), which makes H Hermitian in the M = 0 class."""
    rates.require_positive("alpha", "gamma")
    return math.sqrt(rates.gamma / rates.alpha)


# --------------------------------------------------------------------------
# reflection parameters
# --------------------------------------------------------------------------

def _sorted_pair(r1: complex, r2: complex):
    # descending real part, ties by descending imaginary part
    k1 = (round(r1.real, 12), round(r1.imag, 12))
    k2 = (round(r2.real, 12), round(r2.imag, 12))
    return (r1, r2) if k1 >= k2 else (r2, r1)


def _boundary_pair(q: float, in_rate: float, out_rate: float):
    prod = -in_rate / out_rate
    total = (1 - q) / (out_rate * (q + 1)) - 1 - prod
    disc = cmath.sqrt(total * total - 4 * prod)
    r1, r2 = (total + disc) / 2, (total - disc) / 2
    r1, r2 = (complex(r1), complex(r2))
    if abs(r1.imag) < 1e-15 * max(1.0, abs(r1)) and abs(r2.imag) < 1e-15 * max(1.0, abs(r2)):
        r1, r2 = complex(r1.real), complex(r2.real)
    return _sorted_pair(r1, r2)


def rates_to_reflection_params(rates: BoundaryRates) -> ReflectionParams:
    """Solve alpha, gamma -> (a, c) and beta, delta -> (b, d)."""
    if rates.gamma == 0 or rates.delta == 0:
        raise ParameterError("gamma = 0 or delta = 0: reflection parameters degenerate")
    a, c = _boundary_pair(rates.q, rates.alpha, rates.gamma)
    b, d = _boundary_pair(rates.q, rates.beta, rates.delta)
    return ReflectionParams(a, b, c, d)


def reflection_params_to_rates(params: ReflectionParams, q: float, n_sites: int) -> BoundaryRates:
    a, b, c, d = params.as_tuple()
    left = (a + 1) * (c + 1) * (q + 1)
    right = (b + 1) * (d + 1) * (q + 1)
    vals = [(q - 1) * a * c / left, (q - 1) * b * d / right, (1 - q) / left, (1 - q) / right]
    for v in vals:
        if abs(complex(v).imag) > 1e-10 * max(1.0, abs(v)):
            raise ParameterError("reflection parameters do not map to real rates")
    al, be, ga, de = (complex(v).real for v in vals)
    return BoundaryRates(al, be, ga, de, q, n_sites)


# --------------------------------------------------------------------------
# constraint classes
# --------------------------------------------------------------------------

def constraint_residual(rates: BoundaryRates, m: int) -> float:
    return abs(rates.alpha * rates.beta * rates.q ** (rates.n_sites - 1 - m) - rates.gamma * rates.delta)


def constraint_class(rates: BoundaryRates, tol: Optional[float] = None) -> Optional[ConstraintClass]:
    """Constraint class M in [0, N] if one holds within ``tol`` (default 1e-10*gamma*delta)."""
    if tol is None:
        tol = 1e-10 * rates.gamma * rates.delta
    best = min(range(rates.n_sites + 1), key=lambda m: constraint_residual(rates, m))
    res = constraint_residual(rates, best)
    if res <= tol and rates.gamma * rates.delta > 0:
        return ConstraintClass(best, res)
    return None


def theta(rates: BoundaryRates) -> float:
    """log_q(alpha*beta*q^(N-1) / (gamma*delta))."""
    if not rates.gamma * rates.delta > 0:
        raise ParameterError("theta needs gamma*delta > 0")
    if not rates.alpha * rates.beta > 0:
        raise ParameterError("theta needs alpha*beta > 0")
    n = rates.n_sites
    return (math.log(rates.alpha * rates.beta / (rates.gamma * rates.delta)) + (n - 1) * math.log(rates.q)) / math.log(rates.q)


def solve_delta(rates: BoundaryRates, m: float) -> BoundaryRates:
    """Return ``rates`` with delta chosen so that theta = m (constraint class m when integer)."""
    rates.require_positive("alpha", "beta", "gamma")
    delta = rates.alpha * rates.beta * rates.q ** (rates.n_sites - 1 - m) / rates.gamma
    return rates.with_(delta=delta)


def solve_beta(rates: BoundaryRates, m: float) -> BoundaryRates:
    rates.require_positive("alpha", "gamma", "delta")
    beta = rates.gamma * rates.delta / (rates.alpha * rates.q ** (rates.n_sites - 1 - m))
    return rates.with_(beta=beta)
