"""Exact steady states, integrability checks and Bethe roots of the open ASEP."""

from .errors import (
    AsepError,
    ConstraintError,
    DenseLimitError,
    NullSpaceError,
    ParameterError,
    SingularPointError,
)
from .model import (
    BoundaryRates,
    ConstraintClass,
    ReflectionParams,
    build_markov_generator,
    build_sparse_generator,
    build_xxz_hamiltonian,
    constraint_class,
    rates_to_reflection_params,
    reflection_params_to_rates,
    solve_beta,
    solve_delta,
    theta,
)
from .steady import steady_state
from .observables import ObservableSet, current, density_profile
from .generic import numeric_steady_state, omega_decomposition
from .bethe import BetheRootSet, TQKind, match_spectrum, solve_baes, string_solution

__version__ = "0.1.0"

__all__ = [
    "AsepError", "ConstraintError", "DenseLimitError", "NullSpaceError", "ParameterError",
    "SingularPointError", "BoundaryRates", "ConstraintClass", "ReflectionParams",
    "build_markov_generator", "build_sparse_generator", "build_xxz_hamiltonian",
    "constraint_class", "rates_to_reflection_params", "reflection_params_to_rates",
    "solve_beta", "solve_delta", "theta", "steady_state", "current", "density_profile",
    "ObservableSet", "numeric_steady_state", "omega_decomposition", "BetheRootSet", "TQKind",
    "match_spectrum", "solve_baes", "string_solution",
]
