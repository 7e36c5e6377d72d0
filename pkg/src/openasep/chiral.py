"""
Factorized chiral vectors with kinks and the invariant subspaces they span.

A kink state is a non-decreasing list of positions ``0 <= n_1 <= ... <= n_M <= N``.
Site ``r`` carries the local vector ``phi(z_r) = (gamma, alpha q^z_r)`` with
phase ``z_r = (r - 1) - #{i : n_i < r}``: the phase grows by one per site
except across a kink.
"""

from __future__ import annotations

import cmath
import itertools
from dataclasses import dataclass
from math import comb
from typing import Iterable, List, Optional, Sequence

import numpy as np

from .errors import ParameterError
from .model import BoundaryRates, bond_generator, left_generator, right_generator

SIGMA_Z_REAL = np.diag([1.0, -1.0])
RANK_RTOL = 1e-10


@dataclass(frozen=True)
class KinkState:
    """Sorted kink positions on a chain of ``n_sites`` sites."""

    kinks: tuple
    n_sites: int

    def __post_init__(self):
        ks = tuple(int(k) for k in self.kinks)
        if any(k < 0 or k > self.n_sites for k in ks):
            raise ParameterError(f"kink positions must lie in [0, {self.n_sites}], got {ks}")
        object.__setattr__(self, "kinks", tuple(sorted(ks)))

    @property
    def m(self) -> int:
        return len(self.kinks)

    @property
    def m0(self) -> int:
        return sum(1 for k in self.kinks if k == 0)

    @property
    def m_n(self) -> int:
        return sum(1 for k in self.kinks if k == self.n_sites)

    @property
    def interior(self) -> tuple:
        return tuple(k for k in self.kinks if 0 < k < self.n_sites)

    @property
    def is_symmetric_member(self) -> bool:
        """True when the interior positions are strictly increasing."""
        inner = self.interior
        return all(a < b for a, b in zip(inner, inner[1:]))

    def phases(self) -> np.ndarray:
        """Phase path z_1 ... z_N."""
        ks = np.asarray(self.kinks)
        r = np.arange(1, self.n_sites + 1)
        below = (ks[None, :] < r[:, None]).sum(axis=1) if ks.size else np.zeros_like(r)
        return (r - 1) - below


def phi(x: complex, rates: BoundaryRates) -> np.ndarray:
    """Local chiral vector (gamma, alpha q^x)."""
    return np.array([rates.gamma, rates.alpha * rates.q ** x], dtype=complex)


def tilde_shift(rates: BoundaryRates) -> complex:
    """x_0 with q^x_0 = -gamma/alpha (principal branch)."""
    rates.require_positive("alpha", "gamma")
    return cmath.log(-rates.gamma / rates.alpha) / np.log(rates.q)


def phi_tilde(x: complex, rates: BoundaryRates) -> np.ndarray:
    """phi(x + x_0) = (gamma, -gamma q^x)."""
    return np.array([rates.gamma, -rates.gamma * rates.q ** x], dtype=complex)


def _product_vector(locals_: Iterable[np.ndarray]) -> np.ndarray:
    out = np.ones(1, dtype=complex)
    for v in locals_:
        out = np.kron(out, v)
    return out


def kink_vector(state: KinkState, rates: BoundaryRates, tilde: bool = False) -> np.ndarray:
    """Tensor product of local chiral vectors along the phase path."""
    if rates.n_sites != state.n_sites:
        raise ParameterError("kink state and rates disagree on the chain length")
    if not tilde:
        rates.require_positive("alpha", "gamma")
    local = phi_tilde if tilde else phi
    return _product_vector(local(int(z), rates) for z in state.phases())


def kink_vector_blockwise(state: KinkState, rates: BoundaryRates) -> np.ndarray:
    """Same vector assembled block by block between consecutive kinks."""
    n = state.n_sites
    bounds = (0,) + state.kinks + (n,)
    locals_ = []
    for block, (lo, hi) in enumerate(zip(bounds[:-1], bounds[1:])):
        for site in range(lo + 1, hi + 1):
            locals_.append(phi(site - 1 - block, rates))
    return _product_vector(locals_)


# --------------------------------------------------------------------------
# enumeration
# --------------------------------------------------------------------------

def enumerate_basis(m: int, n_sites: int) -> List[KinkState]:
    """Full symmetric kink set: m0 zeros, strictly increasing interior, mN copies of N."""
    if m < 0:
        raise ParameterError(f"kink number must be non-negative, got {m}")
    out = []
    for m0 in range(m + 1):
        for m_n in range(m - m0 + 1):
            k = m - m0 - m_n
            for inner in itertools.combinations(range(1, n_sites), k):
                out.append(KinkState((0,) * m0 + inner + (n_sites,) * m_n, n_sites))
    return out


def independent_basis(m: int, n_sites: int) -> List[KinkState]:
    """Linearly independent subset: m0 zeros followed by 1 <= j_1 < ... < j_k <= N."""
    if m < 0:
        raise ParameterError(f"kink number must be non-negative, got {m}")
    out = []
    for m0 in range(m + 1):
        for inner in itertools.combinations(range(1, n_sites + 1), m - m0):
            out.append(KinkState((0,) * m0 + inner, n_sites))
    return out


def symmetric_set_size(m: int, n_sites: int) -> int:
    return sum(comb(n_sites - 1, k) * (m - k + 1) for k in range(0, min(m, n_sites - 1) + 1))


def subspace_dimension(m: int, n_sites: int) -> int:
    return sum(comb(n_sites, k) for k in range(0, min(m, n_sites) + 1))


def basis_matrix(states: Sequence[KinkState], rates: BoundaryRates, tilde: bool = False) -> np.ndarray:
    """Columns are the kink vectors of ``states``."""
    if not states:
        return np.zeros((rates.dim, 0), dtype=complex)
    return np.column_stack([kink_vector(s, rates, tilde) for s in states])


def invariant_family(rates: BoundaryRates, m: int) -> np.ndarray:
    """Chiral vectors expected to span the subspace selected by constraint class m."""
    return basis_matrix(enumerate_basis(m, rates.n_sites), rates)


def tilde_family(rates: BoundaryRates) -> np.ndarray:
    """Shifted chiral vectors with N - 1 kinks; their span is invariant for any rates."""
    return basis_matrix(enumerate_basis(rates.n_sites - 1, rates.n_sites), rates, tilde=True)


# --------------------------------------------------------------------------
# linear-algebra diagnostics
# --------------------------------------------------------------------------

def _unit_columns(vectors: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(vectors, axis=0)
    norms[norms == 0] = 1.0
    return vectors / norms


def numerical_rank(vectors: np.ndarray, rtol: float = RANK_RTOL) -> int:
    """Rank from singular values of the column-normalized family."""
    if vectors.size == 0:
        return 0
    s = np.linalg.svd(_unit_columns(vectors), compute_uv=False)
    return int(np.sum(s > rtol * s[0]))


def orthonormal_span(vectors: np.ndarray, rtol: float = RANK_RTOL) -> np.ndarray:
    if vectors.size == 0:
        return np.zeros((vectors.shape[0], 0), dtype=complex)
    u, s, _ = np.linalg.svd(_unit_columns(vectors), full_matrices=False)
    return u[:, s > rtol * s[0]]


def check_invariant_subspace(vectors: np.ndarray, operator: np.ndarray,
                             rtol: float = RANK_RTOL) -> float:
    """||(I - P_V) A V|| / ||A V||, with P_V the orthogonal projector onto span(V).

    When ``A V`` is itself numerically zero (e.g. V spans the kernel) the
    leak is normalized by ||A|| ||V|| instead, so the ratio stays meaningful.
    """
    vectors = np.asarray(vectors)
    if vectors.ndim == 1:
        vectors = vectors[:, None]
    basis = orthonormal_span(vectors, rtol)
    image = operator @ vectors
    leak = image - basis @ (basis.conj().T @ image)
    num = np.linalg.norm(leak)
    den = np.linalg.norm(image)
    floor = np.linalg.norm(operator) * np.linalg.norm(vectors)
    if den <= 1e-13 * floor:
        den = floor
    if den == 0:
        return 0.0
    return float(num / den)


# --------------------------------------------------------------------------
# local relations
# --------------------------------------------------------------------------

def local_relation_residuals(x: complex, rates: BoundaryRates) -> dict:
    """Residuals of the local divergence relations satisfied by phi at phase x."""
    rates.require_positive("alpha", "gamma")
    q, al, be, ga, de = rates.q, rates.alpha, rates.beta, rates.gamma, rates.delta
    bond = bond_generator(q)
    sz = SIGMA_Z_REAL
    eye2 = np.eye(2)
    p0, p1, pm = phi(x, rates), phi(x + 1, rates), phi(x - 1, rates)
    qx = q ** x

    def rel(lhs, rhs, ref):
        return float(np.linalg.norm(lhs - rhs) / max(np.linalg.norm(ref), 1e-300))

    out = {}
    pair_up = np.kron(p0, p1)
    out["bond_shifted"] = rel(bond @ pair_up, 0 * pair_up, pair_up)
    pair = np.kron(p0, p0)
    rhs = (q - 1) / (2 * (q + 1)) * (np.kron(sz, eye2) - np.kron(eye2, sz)) @ pair
    out["bond_equal"] = rel(bond @ pair, rhs, pair)
    lhs = left_generator(rates) @ p0
    rhs = (1 - 1 / qx) * ((al * qx - ga) * p0 + (al * qx + ga) * (sz @ p0)) / 2
    out["left_boundary"] = rel(lhs, rhs, p0)
    lhs = right_generator(rates) @ p0
    src = (al * be - ga * de / qx) / (2 * al * ga)
    rhs = src * ((al * qx - ga) * p0 + (al * qx + ga) * (sz @ p0))
    out["right_boundary"] = rel(lhs, rhs, p0)
    zp = sz @ p0
    forward = (q + 1) / (q - 1) * p0 - 2 / (q - 1) * p1
    backward = (1 + q) / (1 - q) * p0 + 2 * q / (q - 1) * pm
    out["sigma_forward"] = rel(zp, forward, p0)
    out["sigma_backward"] = rel(zp, backward, p0)
    return out


def verify_local_relations(rates: BoundaryRates, sample_phases: Iterable[complex]) -> dict:
    """Maximum residual of every local relation over ``sample_phases``."""
    worst: dict = {}
    for x in sample_phases:
        for name, value in local_relation_residuals(x, rates).items():
            worst[name] = max(worst.get(name, 0.0), value)
    worst["max"] = max(worst.values()) if worst else 0.0
    return worst
