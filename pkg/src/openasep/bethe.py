"""
T-Q relations, Bethe ansatz equations and their numerical solution.

Four homogeneous T-Q relations are available. Kinds I and III share the
function pair (a_1, d_1), kinds II and IV share (a_2, d_2). The root count
is N - 1 (I), 0 (II), N - 1 - M (III) and M (IV), where M is the constraint
class of the rates.

Bethe equations are solved in pole-cleared polynomial form, in logarithmic
coordinates, by batched multi-start Newton iteration.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import ConstraintError, ParameterError, SingularPointError
from .model import BoundaryRates, ReflectionParams, constraint_class, rates_to_reflection_params

SCHEMA_VERSION = "openasep.bethe/1"

#: accepted sets have max normalized residual below this
ACCEPT_TOL = 1e-10
#: Newton stops once the residual is below this
NEWTON_TOL = 1e-12
#: residual accepted for runs whose Newton step has stalled at roundoff
STALL_TOL = 1e-8
#: rejection radius around the singular points of the energy and the equations
SINGULAR_RADIUS = 1e-6
POLE_RADIUS = 1e-8


class TQKind(enum.Enum):
    I = "I"
    II = "II"
    III = "III"
    IV = "IV"

    @property
    def uses_first_pair(self) -> bool:
        return self in (TQKind.I, TQKind.III)

    def root_count(self, n_sites: int, m: Optional[int] = None) -> int:
        if self is TQKind.I:
            return n_sites - 1
        if self is TQKind.II:
            return 0
        if m is None:
            raise ParameterError(f"kind {self.value} needs the constraint class M")
        return n_sites - 1 - m if self is TQKind.III else m

    def subspace_dimension(self, n_sites: int, m: Optional[int] = None) -> int:
        from math import comb

        if self is TQKind.I:
            return 2 ** n_sites - 1
        if self is TQKind.II:
            return 1
        if m is None:
            raise ParameterError(f"kind {self.value} needs the constraint class M")
        dim4 = sum(comb(n_sites, k) for k in range(m + 1))
        return dim4 if self is TQKind.IV else 2 ** n_sites - dim4

    @classmethod
    def parse(cls, value) -> "TQKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).upper())
        except ValueError:
            raise ParameterError(f"unknown T-Q kind {value!r}") from None


@dataclass
class BetheRootSet:
    """Bethe roots of one T-Q relation, or the symbolic infinite string."""

    kind: TQKind
    roots: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))
    is_infinite_string: bool = False
    string_size: int = 0
    residual: float = 0.0
    ill_conditioned: bool = False

    def __post_init__(self):
        self.kind = TQKind.parse(self.kind)
        self.roots = np.asarray(self.roots, dtype=complex).reshape(-1)
        if self.is_infinite_string:
            if self.kind is not TQKind.IV:
                raise ParameterError("the infinite string belongs to kind IV")
            if self.roots.size:
                raise ParameterError("the infinite string is symbolic and carries no finite roots")

    @property
    def size(self) -> int:
        return self.string_size if self.is_infinite_string else self.roots.size

    def to_record(self, rates: Optional[BoundaryRates] = None) -> dict:
        rec = {
            "schema": SCHEMA_VERSION,
            "kind": self.kind.value,
            "roots": [[float(z.real), float(z.imag)] for z in self.roots],
            "is_infinite_string": self.is_infinite_string,
            "string_size": self.string_size,
            "residual": float(self.residual),
            "ill_conditioned": self.ill_conditioned,
        }
        if rates is not None:
            e = eigenvalue_from_roots(self, rates)
            rec["E"] = [float(e.real), float(e.imag)]
        return rec

    @classmethod
    def from_record(cls, rec: dict) -> "BetheRootSet":
        roots = [complex(re, im) for re, im in rec.get("roots", [])]
        return cls(TQKind.parse(rec["kind"]), np.array(roots, dtype=complex),
                   bool(rec.get("is_infinite_string", False)), int(rec.get("string_size", 0)),
                   float(rec.get("residual", 0.0)), bool(rec.get("ill_conditioned", False)))


def string_solution(m: int) -> BetheRootSet:
    """All M roots at infinity with equally spaced phases (the steady state)."""
    if m < 0:
        raise ParameterError("string size must be non-negative")
    return BetheRootSet(TQKind.IV, is_infinite_string=True, string_size=int(m))


def string_proxy(m: int, radius: float, phase: float = 0.0) -> np.ndarray:
    """Finite stand-in nu_j = R exp(2 pi i j / M) for the infinite string."""
    j = np.arange(1, m + 1)
    return radius * np.exp(1j * (2 * np.pi * j / m + phase))


# --------------------------------------------------------------------------
# T-Q functions
# --------------------------------------------------------------------------

def _linear_factors(kind: TQKind, params: ReflectionParams, q: float):
    """(slope, intercept) pairs of the boundary factors of a(x) and d(x)."""
    ps = params.as_tuple()
    if kind.uses_first_pair:
        return [(p, 1.0) for p in ps], [(1.0, p * q) for p in ps]
    return [(1.0, p) for p in ps], [(p, q) for p in ps]


def tq_functions(kind: TQKind, x, rates: BoundaryRates, params: Optional[ReflectionParams] = None):
    """(a(x), d(x)) of the T-Q relation of ``kind``, including the 1/(q - x^2) factor."""
    kind = TQKind.parse(kind)
    params = params or rates_to_reflection_params(rates)
    q, n = rates.q, rates.n_sites
    x = np.asarray(x, dtype=complex)
    if np.any(np.abs(x * x - q) <= 1e-14 * max(1.0, q)):
        raise SingularPointError("x^2 = q is a pole of the T-Q functions")
    a_lin, d_lin = _linear_factors(kind, params, q)
    a = (q ** 3 - q * x ** 2) / (q - x ** 2) * (q - x) ** (2 * n)
    d = (1 - x ** 2) / (q - x ** 2) * (q * (1 - x) ** 2) ** n
    for s, c in a_lin:
        a = a * (s * x + c)
    for s, c in d_lin:
        d = d * (s * x + c)
    return a, d


def q_polynomial(x, roots: Sequence[complex], q: float):
    x = np.asarray(x, dtype=complex)
    out = np.ones_like(x)
    for lam in roots:
        out = out * (lam - x) * (lam * x - q)
    return out


def tq_lambda(kind, x, roots: Optional[Sequence[complex]], rates: BoundaryRates,
              params: Optional[ReflectionParams] = None) -> complex:
    """Transfer-matrix eigenvalue Lambda(x) of the given T-Q relation.

    ``roots`` may be a :class:`BetheRootSet`; the infinite string is
    evaluated as its exact limit.
    """
    if isinstance(roots, BetheRootSet):
        if roots.is_infinite_string:
            a, d = tq_functions(TQKind.IV, x, rates, params)
            # each ratio Q(qx)/Q(x) -> q per root, cancelling the q^-M prefactor
            return complex(a + d)
        kind = roots.kind
        roots = roots.roots
    kind = TQKind.parse(kind)
    roots = np.asarray([] if roots is None else roots, dtype=complex)
    a, d = tq_functions(kind, x, rates, params)
    if kind is TQKind.II:
        if roots.size:
            raise ParameterError("kind II takes no Bethe roots")
        return complex(a + d)
    q = rates.q
    n = roots.size
    qx = q_polynomial(x, roots, q)
    if np.any(np.abs(qx) == 0) or (n and np.min(np.abs(np.asarray(x) - roots)) <= 1e-14 * max(1.0, abs(x))):
        raise SingularPointError("x is a zero of the Q-polynomial")
    up = q_polynomial(q * np.asarray(x), roots, q)
    down = q_polynomial(np.asarray(x) / q, roots, q)
    return complex(a * q ** (-n) * up / qx + d * q ** n * down / qx)


# --------------------------------------------------------------------------
# Bethe equations
# --------------------------------------------------------------------------

class _System:
    """Pole-cleared Bethe equations in log form, vectorized over starts."""

    def __init__(self, kind: TQKind, rates: BoundaryRates, params: ReflectionParams):
        self.kind = kind
        self.q = rates.q
        self.n = rates.n_sites
        self.a_lin, self.d_lin = _linear_factors(kind, params, rates.q)

    def log_prefactors(self, x):
        q, n = self.q, self.n
        la = np.log(q * (q * q - x * x) + 0j) + 2 * n * np.log(q - x + 0j)
        dla = -2 * x / (q * q - x * x) - 2 * n / (q - x)
        ld = np.log(1 - x * x + 0j) + n * np.log(q + 0j) + 2 * n * np.log(1 - x + 0j)
        dld = -2 * x / (1 - x * x) - 2 * n / (1 - x)
        for s, c in self.a_lin:
            la = la + np.log(s * x + c)
            dla = dla + s / (s * x + c)
        for s, c in self.d_lin:
            ld = ld + np.log(s * x + c)
            dld = dld + s / (s * x + c)
        return la, dla, ld, dld

    def evaluate(self, lam: np.ndarray):
        """Scaled residual F, Jacobian dF/dlam and the per-equation scale, for lam of shape (S, n)."""
        q = self.q
        n = lam.shape[1]
        la, dla, ld, dld = self.log_prefactors(lam)
        lj = lam[:, :, None]
        lk = lam[:, None, :]
        d1, d2 = lk - lj / q, lk * lj - q * q
        a1, a2 = lk - q * lj, lk * lj - 1
        log_d = ld + np.sum(np.log(d1) + np.log(d2), axis=2)
        log_a = la + np.sum(np.log(a1) + np.log(a2), axis=2)
        # derivative wrt lam_k through the k-th factor
        dd_k = 1 / d1 + lj / d2
        da_k = 1 / a1 + lj / a2
        # derivative wrt lam_j through every factor
        dd_j = dld + np.sum(-1 / (q * d1) + lk / d2, axis=2)
        da_j = dla + np.sum(-q / a1 + lk / a2, axis=2)
        eye = np.eye(n, dtype=bool)[None]
        jd = np.where(eye, 0, dd_k) + eye * (np.diagonal(dd_k, axis1=1, axis2=2) + dd_j)[:, :, None]
        ja = np.where(eye, 0, da_k) + eye * (np.diagonal(da_k, axis1=1, axis2=2) + da_j)[:, :, None]
        top = np.maximum(log_d.real, log_a.real)
        wd = np.exp(log_d - top)
        wa = np.exp(log_a - top)
        f = wd + wa
        jac = wd[:, :, None] * jd + wa[:, :, None] * ja
        scale = np.maximum(np.abs(wd), np.abs(wa))
        return f, jac, scale


def _kind_and_count(kind, rates: BoundaryRates) -> Tuple[TQKind, int]:
    kind = TQKind.parse(kind)
    if kind in (TQKind.III, TQKind.IV):
        cls = constraint_class(rates)
        if cls is None:
            raise ConstraintError(f"kind {kind.value} requires rates in a constraint class")
        return kind, kind.root_count(rates.n_sites, cls.m)
    return kind, kind.root_count(rates.n_sites)


def bae_residual(root_set: BetheRootSet, rates: BoundaryRates,
                 params: Optional[ReflectionParams] = None) -> np.ndarray:
    """Per-root |D_j + A_j| / max(|D_j|, |A_j|) of the pole-cleared equations."""
    if root_set.is_infinite_string:
        return np.zeros(root_set.string_size)
    roots = root_set.roots
    if roots.size == 0:
        return np.zeros(0)
    if not np.all(np.isfinite(roots)):
        raise ParameterError("bae_residual needs finite roots")
    params = params or rates_to_reflection_params(rates)
    system = _System(root_set.kind, rates, params)
    with np.errstate(all="ignore"):
        f, _, scale = system.evaluate(roots[None, :])
    return np.abs(f[0]) / scale[0]


def string_bae_sides(m: int, radius: float, rates: BoundaryRates,
                     params: Optional[ReflectionParams] = None, phase: float = 0.0):
    """Both sides of the kind-IV rational Bethe equations on the finite string proxy.

    Returns arrays (lhs, rhs) over j, with lhs = d_2/a_2 and
    rhs = -prod_k (nu_k - q nu_j)(nu_k nu_j - 1) / ((nu_k - nu_j/q)(nu_k nu_j - q^2)).
    """
    nu = string_proxy(m, radius, phase)
    a, d = tq_functions(TQKind.IV, nu, rates, params)
    q = rates.q
    lj, lk = nu[:, None], nu[None, :]
    rhs = -np.prod((lk - q * lj) * (lk * lj - 1) / ((lk - lj / q) * (lk * lj - q * q)), axis=1)
    return d / a, rhs


# --------------------------------------------------------------------------
# canonical form and filters
# --------------------------------------------------------------------------

def canonical_roots(roots: Sequence[complex], q: float) -> np.ndarray:
    """Map each root to modulus >= sqrt(q) under lam -> q/lam, then sort by (Re, Im)."""
    roots = np.asarray(roots, dtype=complex).copy()
    sq = np.sqrt(q)
    mod = np.abs(roots)
    inside = mod < sq * (1 - 1e-12)
    roots[inside] = q / roots[inside]
    # on the circle the involution is conjugation; keep the upper half
    circle = np.abs(np.abs(roots) - sq) <= 1e-12 * sq
    roots[circle & (roots.imag < 0)] = np.conj(roots[circle & (roots.imag < 0)])
    order = np.lexsort((roots.imag, roots.real))
    return roots[order]


def canonical(root_set: BetheRootSet, q: float) -> BetheRootSet:
    if root_set.is_infinite_string:
        return root_set
    return BetheRootSet(root_set.kind, canonical_roots(root_set.roots, q), False, 0,
                        root_set.residual, root_set.ill_conditioned)


def _admissible(roots: np.ndarray, q: float) -> bool:
    """Reject roots near singular points and pairs related by equality or the involution."""
    if roots.size == 0:
        return True
    mod = np.abs(roots)
    if mod.max() > 1e6 or mod.min() < 1e-6:
        return False
    sq = np.sqrt(q)
    marks = np.array([1, -1, q, -q, sq, -sq])
    if np.min(np.abs(roots[:, None] - marks[None, :])) < SINGULAR_RADIUS:
        return False
    n = roots.size
    for i in range(n):
        for j in range(i + 1, n):
            if abs(roots[i] - roots[j]) < SINGULAR_RADIUS * abs(roots[i]):
                return False
            prod = roots[i] * roots[j]
            if abs(prod - q) < SINGULAR_RADIUS * abs(prod):
                return False
    return True


def _same_set(u: np.ndarray, v: np.ndarray, tol: float) -> bool:
    if u.size != v.size:
        return False
    if u.size == 0:
        return True
    cost = np.abs(u[:, None] - v[None, :]) / np.maximum(1.0, np.abs(u[:, None]))
    rows, cols = linear_sum_assignment(cost)
    return bool(np.max(cost[rows, cols]) <= tol)


def deduplicate(sets: Iterable[BetheRootSet], q: float, tol: float = 1e-8) -> List[BetheRootSet]:
    """Drop sets equal up to permutation and the involution (keeps the best residual)."""
    unique: List[BetheRootSet] = []
    for s in sets:
        c = canonical(s, q)
        for i, u in enumerate(unique):
            if u.kind is c.kind and not u.is_infinite_string and _same_set(u.roots, c.roots, tol):
                if c.residual < u.residual:
                    unique[i] = c
                break
        else:
            unique.append(c)
    return unique


# --------------------------------------------------------------------------
# Newton solver
# --------------------------------------------------------------------------

def _initial_logs(n_starts: int, n: int, seed: int) -> np.ndarray:
    out = np.empty((n_starts, n), dtype=complex)
    lo, hi = np.log(1e-2), np.log(1e2)
    for i in range(n_starts):
        rng = np.random.default_rng([seed, i])
        out[i] = rng.uniform(lo, hi, n) + 1j * rng.uniform(-np.pi, np.pi, n)
    return out


def _solve_steps(jac: np.ndarray, f: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.solve(jac, -f[..., None])[..., 0]
    except np.linalg.LinAlgError:
        out = np.full_like(f, np.nan)
        for i in range(f.shape[0]):
            try:
                out[i] = np.linalg.solve(jac[i], -f[i])
            except np.linalg.LinAlgError:
                pass
        return out


def newton(system: _System, u: np.ndarray, max_iter: int = 200, tol: float = NEWTON_TOL,
           stall_tol: float = STALL_TOL):
    """Batched damped Newton in u = log(lam); returns (u, residual, converged, stalled)."""
    n_starts = u.shape[0]
    u = u.copy()
    active = np.ones(n_starts, dtype=bool)
    converged = np.zeros(n_starts, dtype=bool)
    stalled = np.zeros(n_starts, dtype=bool)
    residual = np.full(n_starts, np.inf)
    blowup = np.log(1e8)
    for _ in range(max_iter):
        idx = np.nonzero(active)[0]
        if idx.size == 0:
            break
        lam = np.exp(u[idx])
        with np.errstate(all="ignore"):
            f, jac, scale = system.evaluate(lam)
            res = np.max(np.abs(f) / scale, axis=1)
            res = np.where(np.isfinite(res), res, np.inf)
            residual[idx] = res
            ok = res < tol
            converged[idx[ok]] = True
            step = _solve_steps(jac * lam[:, None, :], f)
            bad = ~np.all(np.isfinite(step), axis=1)
            step = np.where(bad[:, None], 0, step)
            size = np.max(np.abs(step), axis=1)
            damp = np.where(size > 1, 1 / np.maximum(size, 1e-300), 1.0)
            tiny = (~bad) & (size < 1e-13 * (1 + np.max(np.abs(u[idx]), axis=1))) & (res <= stall_tol)
            stalled[idx[tiny & ~ok]] = True
            u[idx] = u[idx] + step * damp[:, None]
        escaped = (np.abs(u[idx].real) > blowup).any(axis=1)
        active[idx[ok | bad | tiny | escaped]] = False
    return u, residual, converged, stalled


def solve_baes(kind, rates: BoundaryRates, n_starts: int = 2000, seed: int = 0,
               max_iter: int = 200, tol: float = NEWTON_TOL, dedup_tol: float = 1e-8,
               accept_tol: float = ACCEPT_TOL, conjugate_closure: bool = False) -> List[BetheRootSet]:
    """Multi-start Newton solution of the Bethe equations of ``kind``.

    Starts are drawn with log-uniform moduli in [1e-2, 1e2] and uniform
    phases, one generator per start seeded by (seed, start index). Runs
    whose step stalls at roundoff with residual below ``STALL_TOL`` are kept
    and flagged ``ill_conditioned``. With ``conjugate_closure`` the
    elementwise conjugate of every found set is polished and added, which is
    legitimate for real rates and fills gaps left by the random starts.
    """
    kind, n = _kind_and_count(kind, rates)
    if kind is TQKind.II:
        raise ParameterError("kind II has no Bethe roots to solve for")
    if n < 0:
        return []
    if n == 0:
        return [BetheRootSet(kind, np.zeros(0, dtype=complex))]
    params = rates_to_reflection_params(rates)
    system = _System(kind, rates, params)
    u0 = _initial_logs(n_starts, n, seed)
    u, residual, converged, stalled = newton(system, u0, max_iter, tol)
    found = []
    for i in np.nonzero(converged | stalled)[0]:
        roots = np.exp(u[i])
        if not _admissible(roots, rates.q):
            continue
        found.append(BetheRootSet(kind, roots, residual=float(residual[i]),
                                  ill_conditioned=bool(stalled[i] and residual[i] > accept_tol)))
    unique = deduplicate(found, rates.q, dedup_tol)
    if conjugate_closure:
        mirrored = []
        for s in unique:
            if np.allclose(np.sort_complex(s.roots), np.sort_complex(np.conj(s.roots)), rtol=1e-10, atol=0):
                continue
            twin = polish(BetheRootSet(kind, np.conj(s.roots)), rates, max_iter=20,
                          tol=tol, stall_tol=STALL_TOL)
            if twin.residual <= STALL_TOL and _admissible(twin.roots, rates.q):
                mirrored.append(twin)
        unique = deduplicate(unique + mirrored, rates.q, dedup_tol)
    return unique


def polish(root_set: BetheRootSet, rates: BoundaryRates, max_iter: int = 50,
           tol: float = 1e-14, stall_tol: float = STALL_TOL) -> BetheRootSet:
    """Refine a root set (e.g. 4-decimal table values) by Newton iteration."""
    if root_set.is_infinite_string or root_set.roots.size == 0:
        return root_set
    params = rates_to_reflection_params(rates)
    system = _System(root_set.kind, rates, params)
    u, residual, converged, stalled = newton(system, np.log(root_set.roots)[None, :], max_iter, tol,
                                           stall_tol)
    roots = np.exp(u[0])
    res = float(np.max(bae_residual(BetheRootSet(root_set.kind, roots), rates, params)))
    return BetheRootSet(root_set.kind, roots, residual=res,
                        ill_conditioned=res > ACCEPT_TOL)


# --------------------------------------------------------------------------
# energies and spectrum matching
# --------------------------------------------------------------------------

def eigenvalue_from_roots(root_set: BetheRootSet, rates: BoundaryRates) -> complex:
    """Generator eigenvalue carried by a root set."""
    if root_set.is_infinite_string or root_set.kind is TQKind.II:
        return 0j
    q = rates.q
    roots = root_set.roots
    if roots.size and (np.min(np.abs(roots - 1)) <= POLE_RADIUS or np.min(np.abs(roots - q)) <= POLE_RADIUS):
        raise SingularPointError("a Bethe root sits at 1 or q, where the energy has a pole")
    e = (1 - q) ** 2 / (q + 1) * np.sum(roots / ((roots - 1) * (roots - q)))
    if root_set.kind.uses_first_pair:
        e = e - rates.boundary_sum
    return complex(e)


@dataclass(frozen=True)
class QuasiMomentum:
    p: complex
    exp_ip: complex
    epsilon: complex


def quasi_momentum(root_set: BetheRootSet, q: float) -> List[QuasiMomentum]:
    """exp(i p_j) = (nu_j - q) / (sqrt(q) (nu_j - 1)); epsilon_j its deviation from 1/sqrt(q)."""
    sq = np.sqrt(q)
    if root_set.is_infinite_string:
        limit = 1 / sq
        return [QuasiMomentum(complex(-1j * np.log(limit + 0j)), complex(limit), 0j)
                for _ in range(root_set.string_size)]
    if root_set.kind is not TQKind.IV:
        raise ParameterError("quasi-momenta are defined for kind IV roots")
    out = []
    for nu in root_set.roots:
        if abs(nu - 1) <= POLE_RADIUS:
            raise SingularPointError("nu = 1 is a pole of the quasi-momentum")
        e = (nu - q) / (sq * (nu - 1))
        out.append(QuasiMomentum(complex(-1j * np.log(e)), complex(e), complex(e - 1 / sq)))
    return out


@dataclass
class MatchReport:
    matched: List[Tuple[int, int, float]]
    unmatched_levels: List[int]
    duplicate_sets: List[int]
    spurious_sets: List[int]
    energies: np.ndarray
    exact: np.ndarray

    @property
    def complete(self) -> bool:
        return not self.unmatched_levels

    def max_error(self) -> float:
        return max((e for _, _, e in self.matched), default=0.0)

    def summary(self) -> dict:
        return {
            "matched": len(self.matched),
            "unmatched_levels": len(self.unmatched_levels),
            "duplicates": len(self.duplicate_sets),
            "spurious": len(self.spurious_sets),
            "max_error": self.max_error(),
        }


def match_spectrum(root_sets: Sequence[BetheRootSet], exact_eigenvalues: Sequence[complex],
                   rates: Optional[BoundaryRates] = None, energies: Optional[Sequence[complex]] = None,
                   tol: float = 1e-8) -> MatchReport:
    """Greedy bipartite matching of root-set energies to exact levels by |dE|."""
    exact = np.asarray(exact_eigenvalues, dtype=complex)
    if energies is None:
        if root_sets and rates is None:
            raise ParameterError("rates are needed to turn root sets into energies")
        energies = [eigenvalue_from_roots(s, rates) for s in root_sets]
    energies = np.asarray(energies, dtype=complex).reshape(-1)
    pairs = []
    if energies.size and exact.size:
        dist = np.abs(energies[:, None] - exact[None, :])
        for flat in np.argsort(dist, axis=None, kind="stable"):
            i, j = divmod(int(flat), exact.size)
            if dist[i, j] > tol:
                break
            pairs.append((i, j, float(dist[i, j])))
    used_sets, used_levels, matched = set(), set(), []
    for i, j, d in pairs:
        if i in used_sets or j in used_levels:
            continue
        used_sets.add(i)
        used_levels.add(j)
        matched.append((j, i, d))
    matched.sort()
    duplicates, spurious = [], []
    for i in range(energies.size):
        if i in used_sets:
            continue
        near = exact.size and np.min(np.abs(exact - energies[i])) <= tol
        (duplicates if near else spurious).append(i)
    unmatched = [j for j in range(exact.size) if j not in used_levels]
    return MatchReport(matched, unmatched, duplicates, spurious, energies, exact)


def dumps_root_sets(sets: Sequence[BetheRootSet], rates: Optional[BoundaryRates] = None) -> str:
    return json.dumps({"schema": SCHEMA_VERSION,
                       "root_sets": [s.to_record(rates) for s in sets]}, indent=2)


def loads_root_sets(text: str) -> List[BetheRootSet]:
    data = json.loads(text)
    if data.get("schema") != SCHEMA_VERSION:
        raise ParameterError(f"unsupported schema {data.get('schema')!r}")
    return [BetheRootSet.from_record(r) for r in data["root_sets"]]
