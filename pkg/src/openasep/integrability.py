"""
R-matrix, boundary K-matrices, the double-row transfer matrix and the
identities tying them to the Markov generator.

The auxiliary space is never materialised: every product in the transfer
matrix is carried as a 2x2 array of ``2^N x 2^N`` physical-space blocks, and a
local R-factor is applied to a block by reshaping the site axis out.
"""

from __future__ import annotations

from typing import Optional, Tuple

import numpy as np

from .errors import DenseLimitError, SingularPointError
from .model import BoundaryRates, ReflectionParams, build_markov_generator, rates_to_reflection_params

TRANSFER_LIMIT = 10

_SWAP = np.eye(4)[[0, 2, 1, 3]]


# --------------------------------------------------------------------------
# local matrices
# --------------------------------------------------------------------------

def r_matrix(x: complex, q: float) -> np.ndarray:
    """Bulk R-matrix on V1 (x) V2 with all four diagonal corners equal to q - x."""
    a = q - x
    return np.array(
        [
            [a, 0, 0, 0],
            [0, 1 - x, (q - 1) * x, 0],
            [0, q - 1, q * (1 - x), 0],
            [0, 0, 0, a],
        ],
        dtype=complex,
    )


def r_matrix_derivative(q: float) -> np.ndarray:
    """d R / d x (constant, since R is linear in x)."""
    return np.array(
        [[-1, 0, 0, 0], [0, -1, q - 1, 0], [0, 0, -q, 0], [0, 0, 0, -1]], dtype=complex
    )


def k_minus(x: complex, params: ReflectionParams) -> np.ndarray:
    a, c = params.a, params.c
    return np.array(
        [
            [(a * c + 1) * x ** 2 + (a + c) * x, x ** 2 - 1],
            [a * c * (1 - x ** 2), (a * c + 1) + (a + c) * x],
        ],
        dtype=complex,
    )


def k_minus_derivative(x: complex, params: ReflectionParams) -> np.ndarray:
    a, c = params.a, params.c
    return np.array(
        [[2 * (a * c + 1) * x + (a + c), 2 * x], [-2 * a * c * x, a + c]], dtype=complex
    )


def k_plus(x: complex, params: ReflectionParams, q: float) -> np.ndarray:
    b, d = params.b, params.d
    return np.array(
        [
            [(b * d + 1) * q ** 2 + (b + d) * q * x, b * d * (q ** 2 - x ** 2)],
            [q * (x ** 2 - q ** 2), (b * d + 1) * q * x ** 2 + (b + d) * q ** 2 * x],
        ],
        dtype=complex,
    )


def k_plus_derivative(x: complex, params: ReflectionParams, q: float) -> np.ndarray:
    b, d = params.b, params.d
    return np.array(
        [
            [(b + d) * q, -2 * b * d * x],
            [2 * q * x, 2 * (b * d + 1) * q * x + (b + d) * q ** 2],
        ],
        dtype=complex,
    )


def partial_transpose_first(op: np.ndarray) -> np.ndarray:
    """Transpose of a two-site operator in its first tensor factor."""
    return op.reshape(2, 2, 2, 2).transpose(2, 1, 0, 3).reshape(4, 4)


def r_tilde(x: complex, q: float) -> np.ndarray:
    """((R^{t1})^{-1})^{t1}."""
    rt = partial_transpose_first(r_matrix(x, q))
    try:
        if np.linalg.cond(rt) > 1e13:
            raise np.linalg.LinAlgError
        inv = np.linalg.inv(rt)
    except np.linalg.LinAlgError:
        raise SingularPointError(f"R^t1 is singular at x = {x!r}") from None
    return partial_transpose_first(inv)


def swap_conjugate(op: np.ndarray) -> np.ndarray:
    """R_21 = P R_12 P."""
    return _SWAP @ op @ _SWAP


def _rel(lhs: np.ndarray, rhs: np.ndarray) -> float:
    scale = np.linalg.norm(lhs)
    if scale == 0:
        scale = max(np.linalg.norm(rhs), 1.0)
    return float(np.linalg.norm(lhs - rhs) / scale)


# --------------------------------------------------------------------------
# Yang-Baxter and reflection equations
# --------------------------------------------------------------------------

def ybe_residual(x: complex, y: complex, z: complex, q: float) -> float:
    """Relative Frobenius residual of R12(x/y) R13(x/z) R23(y/z) = R23 R13 R12."""
    eye2 = np.eye(2)
    p23 = np.kron(eye2, _SWAP)

    def r12(u):
        return np.kron(r_matrix(u, q), eye2)

    def r23(u):
        return np.kron(eye2, r_matrix(u, q))

    def r13(u):
        return p23 @ r12(u) @ p23

    lhs = r12(x / y) @ r13(x / z) @ r23(y / z)
    rhs = r23(y / z) @ r13(x / z) @ r12(x / y)
    return _rel(lhs, rhs)


def re_residual(x: complex, y: complex, rates: BoundaryRates,
                params: Optional[ReflectionParams] = None) -> Tuple[float, float]:
    """Relative residuals of the reflection equation and of its dual."""
    params = params or rates_to_reflection_params(rates)
    q = rates.q
    eye2 = np.eye(2)

    def on1(k):
        return np.kron(k, eye2)

    def on2(k):
        return np.kron(eye2, k)

    def r21(u):
        return swap_conjugate(r_matrix(u, q))

    r12 = lambda u: r_matrix(u, q)
    km_x, km_y = k_minus(x, params), k_minus(y, params)
    lhs = r12(x / y) @ on1(km_x) @ r21(y * x) @ on2(km_y)
    rhs = on2(km_y) @ r12(x * y) @ on1(km_x) @ r21(x / y)
    re = _rel(lhs, rhs)

    kp_x, kp_y = k_plus(x, params, q), k_plus(y, params, q)
    rt12 = r_tilde(y * x, q)
    rt21 = swap_conjugate(rt12)
    lhs = r12(x / y) @ on1(kp_y) @ rt12 @ on2(kp_x)
    rhs = on2(kp_x) @ rt21 @ on1(kp_y) @ r21(x / y)
    return re, _rel(lhs, rhs)


# --------------------------------------------------------------------------
# transfer matrix
# --------------------------------------------------------------------------

def _left_site(blocks: np.ndarray, local: np.ndarray, site: int, n: int) -> np.ndarray:
    """R_{0,site} @ X for X stored as (2, 2, D, D) auxiliary blocks."""
    dim = 2 ** n
    left, right = 2 ** (site - 1), 2 ** (n - site)
    x = blocks.reshape(2, 2, left, 2, right, dim)
    r4 = local.reshape(2, 2, 2, 2).transpose(0, 2, 1, 3)  # [a, c, i, j]
    out = np.einsum("acij,cbljrd->ablird", r4, x, optimize=True)
    return out.reshape(2, 2, dim, dim)


def _right_site(blocks: np.ndarray, local: np.ndarray, site: int, n: int) -> np.ndarray:
    """X @ R_{site,0}."""
    dim = 2 ** n
    left, right = 2 ** (site - 1), 2 ** (n - site)
    x = blocks.reshape(2, 2, dim, left, 2, right)
    s4 = local.reshape(2, 2, 2, 2).transpose(1, 3, 0, 2)  # [c, b, i, j]
    out = np.einsum("acdljr,cbji->abdlir", x, s4, optimize=True)
    return out.reshape(2, 2, dim, dim)


def _check_size(n: int, limit: int) -> None:
    if n > limit:
        raise DenseLimitError(f"N={n} exceeds the transfer-matrix limit {limit}")


def transfer_matrix(x: complex, rates: BoundaryRates, *, derivative: bool = False,
                    params: Optional[ReflectionParams] = None,
                    limit: int = TRANSFER_LIMIT):
    """Double-row transfer matrix tau(x); with ``derivative=True`` returns (tau, dtau/dx)."""
    n = rates.n_sites
    _check_size(n, limit)
    params = params or rates_to_reflection_params(rates)
    q = rates.q
    dim = 2 ** n
    eye = np.eye(dim)
    r = r_matrix(x, q)
    km = k_minus(x, params)
    kp = k_plus(x, params, q)
    blocks = km[:, :, None, None] * eye
    if not derivative:
        for site in range(1, n + 1):
            blocks = _right_site(blocks, r, site, n)
        for site in range(1, n + 1):
            blocks = _left_site(blocks, r, site, n)
        return np.einsum("ab,bads->ds", kp, blocks)

    dr = r_matrix_derivative(q)
    dblocks = k_minus_derivative(x, params)[:, :, None, None] * eye
    for site in range(1, n + 1):
        dblocks = _right_site(dblocks, r, site, n) + _right_site(blocks, dr, site, n)
        blocks = _right_site(blocks, r, site, n)
    for site in range(1, n + 1):
        dblocks = _left_site(dblocks, r, site, n) + _left_site(blocks, dr, site, n)
        blocks = _left_site(blocks, r, site, n)
    dkp = k_plus_derivative(x, params, q)
    tau = np.einsum("ab,bads->ds", kp, blocks)
    dtau = np.einsum("ab,bads->ds", kp, dblocks) + np.einsum("ab,bads->ds", dkp, blocks)
    return tau, dtau


def commutator_residual(x: complex, y: complex, rates: BoundaryRates) -> float:
    """||[tau(x), tau(y)]|| / (||tau(x)|| ||tau(y)||)."""
    tx, ty = transfer_matrix(x, rates), transfer_matrix(y, rates)
    return float(np.linalg.norm(tx @ ty - ty @ tx) / (np.linalg.norm(tx) * np.linalg.norm(ty)))


def generator_commutator_residual(x: complex, rates: BoundaryRates) -> float:
    """||[tau(x), M]|| / (||tau(x)|| ||M||)."""
    tx = transfer_matrix(x, rates)
    gen = build_markov_generator(rates)
    return float(np.linalg.norm(tx @ gen - gen @ tx) / (np.linalg.norm(tx) * np.linalg.norm(gen)))


def transfer_derivative_fd(rates: BoundaryRates, x0: complex = 1.0, step: float = 1e-6,
                           params: Optional[ReflectionParams] = None) -> np.ndarray:
    """Central difference of tau at x0, one Richardson step (error O(step^4))."""
    def central(h):
        return (transfer_matrix(x0 + h, rates, params=params)
                - transfer_matrix(x0 - h, rates, params=params)) / (2 * h)

    # tau is a polynomial in x, so larger steps are harmless and reduce roundoff
    coarse, fine = central(2 * step), central(step)
    return (4 * fine - coarse) / 3


def markov_from_transfer(rates: BoundaryRates, method: str = "analytic", step: float = 1e-6,
                         return_constant: bool = False):
    """Recover the generator from the logarithmic derivative of tau at x = 1.

    The additive constant is fixed by matching traces with the directly
    assembled generator.
    """
    params = rates_to_reflection_params(rates)
    q = rates.q
    if method == "analytic":
        tau1, dtau = transfer_matrix(1.0, rates, derivative=True, params=params)
    elif method in ("fd", "finite-difference"):
        tau1 = transfer_matrix(1.0, rates, params=params)
        dtau = transfer_derivative_fd(rates, 1.0, step, params)
    else:
        raise ValueError(f"unknown derivative method {method!r}")
    if not np.all(np.isfinite(tau1)) or np.linalg.cond(tau1) > 1e12:
        raise SingularPointError("tau(1) is singular")
    log_der = (1 - q) / (2 * (1 + q)) * np.linalg.solve(tau1.T, dtau.T).T
    gen = build_markov_generator(rates)
    const = np.trace(log_der - gen) / gen.shape[0]
    recovered = log_der - const * np.eye(gen.shape[0])
    if return_constant:
        return recovered, complex(const)
    return recovered
