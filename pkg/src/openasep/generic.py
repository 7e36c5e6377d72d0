"""
Generic-boundary tools: numerical steady state, parameter scans and the
decomposition of the steady state onto the constraint-class states.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
from typing import Iterable, List, Optional, Sequence

import numpy as np
import scipy.linalg as sla
import scipy.sparse.linalg as spla

from .chiral import numerical_rank
from .errors import DenseLimitError, NullSpaceError, ParameterError
from .model import (
    DENSE_LIMIT,
    SPARSE_LIMIT,
    BoundaryRates,
    build_markov_generator,
    build_sparse_generator,
    solve_delta,
    theta,
)
from .observables import current, density_profile
from .steady import steady_state

#: largest N for which the eigen-decomposition route is used by default
EIG_LIMIT = 8
SIGN_BAND = 1e-12


def _null_by_eig(gen: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eig(gen)
    scale = max(1.0, float(np.abs(gen).max()))
    zero = np.abs(w) <= 1e-9 * scale
    if zero.sum() != 1:
        raise NullSpaceError(f"generator kernel has dimension {int(zero.sum())}, expected 1")
    i = int(np.argmin(np.abs(w)))
    if abs(w[i]) > 1e-10 * scale:
        raise NullSpaceError(f"smallest eigenvalue {w[i]:.3e} is not numerically zero")
    return np.real_if_close(v[:, i], tol=1e6)


def _null_by_solve(gen: np.ndarray) -> np.ndarray:
    # rows of a generator sum to the zero row, so one can be traded for normalization
    a = gen.copy()
    a[0, :] = 1.0
    rhs = np.zeros(a.shape[0])
    rhs[0] = 1.0
    try:
        lu = sla.lu_factor(a, check_finite=True)
    except (ValueError, sla.LinAlgError) as exc:
        raise NullSpaceError(str(exc)) from None
    if np.min(np.abs(np.diag(lu[0]))) <= 1e-14 * np.abs(a).max():
        raise NullSpaceError("generator kernel is not one-dimensional")
    return sla.lu_solve(lu, rhs)


def _null_by_sparse(rates: BoundaryRates) -> np.ndarray:
    gen = build_sparse_generator(rates).tolil()
    dim = gen.shape[0]
    gen[0, :] = 1.0
    a = gen.tocsc()
    rhs = np.zeros(dim)
    rhs[0] = 1.0
    ilu = spla.spilu(a, drop_tol=1e-2, fill_factor=3)
    precond = spla.LinearOperator((dim, dim), ilu.solve)
    vec, info = spla.gmres(a, rhs, M=precond, rtol=1e-13, atol=0, restart=100, maxiter=2000)
    if info != 0:
        raise NullSpaceError(f"GMRES did not converge (info={info})")
    return vec


def numeric_steady_state(rates: BoundaryRates, method: str = "auto") -> np.ndarray:
    """Probability-normalized null vector of the generator.

    ``method`` is ``"eig"`` (dense eigen-decomposition), ``"solve"`` (dense LU
    with one row replaced by the normalization) or ``"sparse"`` (ILU-GMRES).
    """
    rates.require_positive()
    n = rates.n_sites
    if method == "auto":
        method = "eig" if n <= EIG_LIMIT else ("solve" if n <= 10 else "sparse")
    if method == "eig":
        if n > DENSE_LIMIT:
            raise DenseLimitError(f"N={n} exceeds the dense limit {DENSE_LIMIT}")
        vec = _null_by_eig(build_markov_generator(rates))
    elif method == "solve":
        if n > DENSE_LIMIT:
            raise DenseLimitError(f"N={n} exceeds the dense limit {DENSE_LIMIT}")
        vec = _null_by_solve(build_markov_generator(rates))
    elif method == "sparse":
        if n > SPARSE_LIMIT:
            raise DenseLimitError(f"N={n} exceeds the sparse limit {SPARSE_LIMIT}")
        vec = _null_by_sparse(rates)
    else:
        raise ParameterError(f"unknown method {method!r}")
    vec = np.real(vec) / np.real(vec.sum())
    return vec


def angle_between(u: np.ndarray, v: np.ndarray) -> float:
    """Angle between the lines spanned by u and v."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    u = u / np.linalg.norm(u)
    v = v / np.linalg.norm(v)
    overlap = np.vdot(v, u)
    return float(np.arctan2(np.linalg.norm(u - overlap * v), abs(overlap)))


# --------------------------------------------------------------------------
# omega decomposition
# --------------------------------------------------------------------------

@dataclass
class DecompositionResult:
    omega: np.ndarray
    residual: float
    rank: int
    rank_deficient: bool
    theta: float

    @property
    def ratios(self) -> np.ndarray:
        """omega_k / omega_N."""
        return self.omega / self.omega[-1]

    def ratios_to(self, j: int) -> np.ndarray:
        return self.omega / self.omega[j]

    def as_row(self, delta: float) -> dict:
        row = {"delta": delta, "theta": self.theta}
        row.update({f"omega_{k}": float(w) for k, w in enumerate(self.omega)})
        row["residual"] = self.residual
        return row


def class_states(rates: BoundaryRates) -> np.ndarray:
    """Columns Phi_0 ... Phi_N from the constraint-class formulas at the given rates."""
    return np.column_stack([
        steady_state(rates, k, enforce_constraint=False) for k in range(rates.n_sites + 1)
    ])


def omega_decomposition(rates: BoundaryRates, target: Optional[np.ndarray] = None,
                        rtol: float = 1e-12) -> DecompositionResult:
    """Least-squares coefficients of the steady state on {Phi_k}."""
    rates.require_positive()
    phi = numeric_steady_state(rates) if target is None else np.asarray(target)
    family = class_states(rates)
    rank = numerical_rank(family, 1e-10)
    omega, _, _, _ = sla.lstsq(family, phi, cond=rtol, lapack_driver="gelsy")
    residual = float(np.linalg.norm(phi - family @ omega) / np.linalg.norm(phi))
    return DecompositionResult(np.asarray(omega), residual, rank,
                               rank < family.shape[1], theta(rates))


def omega_product_factor(rates: BoundaryRates, k: int) -> float:
    """prod_{m != k} (alpha beta q^(N-1-m) - gamma delta)."""
    n = rates.n_sites
    ab, gd = rates.alpha * rates.beta, rates.gamma * rates.delta
    return float(np.prod([ab * rates.q ** (n - 1 - m) - gd for m in range(n + 1) if m != k]))


# --------------------------------------------------------------------------
# scans
# --------------------------------------------------------------------------

def rates_at(template: BoundaryRates, vary: str, value) -> BoundaryRates:
    if vary == "theta":
        return solve_delta(template, value)
    if vary == "delta":
        return template.with_(delta=float(value))
    if vary in ("N", "n", "n_sites"):
        return template.with_(n_sites=int(value))
    raise ParameterError(f"cannot vary {vary!r}; use theta, delta or N")


def current_sign_expected(rates: BoundaryRates) -> int:
    """sign(q^theta - 1)."""
    return _sign(rates.q ** theta(rates) - 1.0)


def _sign(value: float, band: float = SIGN_BAND) -> int:
    return 0 if abs(value) <= band else int(np.sign(value))


def _ordered_map(func, items: list, workers: int) -> list:
    """Map preserving input order; processes are used only when workers > 1."""
    if workers < 1:
        raise ParameterError("workers must be at least 1")
    if workers == 1 or len(items) < 2:
        return [func(item) for item in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


def _current_row(value, template: BoundaryRates, vary: str) -> dict:
    rates = rates_at(template, vary, value)
    method = "auto" if rates.n_sites <= 10 else "sparse"
    j = current(numeric_steady_state(rates, method), rates)
    return {"vary_value": value, "theta": theta(rates), "current": float(j),
            "expected_sign": current_sign_expected(rates)}


def scan_current(template: BoundaryRates, vary: str, grid: Iterable, workers: int = 1) -> List[dict]:
    """Rows (vary_value, theta, current) from the numerical steady state."""
    grid = list(grid)
    if not grid:
        raise ParameterError("scan grid is empty")
    return _ordered_map(partial(_current_row, template=template, vary=vary), grid, workers)


def sign_agreement(rows: Sequence[dict], band: float = SIGN_BAND) -> bool:
    """True when every row's current has the sign of q^theta - 1 (zero within ``band``)."""
    for row in rows:
        got = _sign(row["current"], band)
        if got != row["expected_sign"] and got != 0:
            return False
        if row["expected_sign"] == 0 and got != 0:
            return False
    return True


def sign_changes(values: Sequence[float], band: float = SIGN_BAND) -> int:
    signs = [s for s in (_sign(v, band) for v in values) if s != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _density_rows(th: float, template: BoundaryRates) -> List[dict]:
    rates = solve_delta(template, th)
    prof = density_profile(numeric_steady_state(rates), rates)
    return [{"theta": float(th), "site": k + 1, "density": float(d)} for k, d in enumerate(prof)]


def scan_density(template: BoundaryRates, theta_values: Iterable[float], workers: int = 1) -> List[dict]:
    """Rows (theta, site, density)."""
    blocks = _ordered_map(partial(_density_rows, template=template), list(theta_values), workers)
    return [row for block in blocks for row in block]


def _omega_row(d: float, template: BoundaryRates) -> dict:
    return omega_decomposition(template.with_(delta=float(d))).as_row(float(d))


def scan_omega(template: BoundaryRates, deltas: Iterable[float], workers: int = 1) -> List[dict]:
    """Rows (delta, theta, omega_0..omega_N, residual)."""
    return _ordered_map(partial(_omega_row, template=template), [float(d) for d in deltas], workers)


def is_monotone(values: Sequence[float], increasing: bool) -> bool:
    diffs = np.diff(np.asarray(values, dtype=float))
    return bool(np.all(diffs > 0) if increasing else np.all(diffs < 0))
