"""Named parameter sets for the reference tables and figures."""

from __future__ import annotations

import numpy as np

from .errors import ParameterError
from .model import BoundaryRates, solve_delta

_TABLE_CLASS_BASE = dict(alpha=0.23, beta=0.32, gamma=0.17, q=0.5, n_sites=4)

#: constraint class used by each table preset (None: generic rates)
TABLE_CLASS = {"table1": None, "table2": 1, "table3": 2, "table4": 3, "table5": 4}


def table_rates(name: str) -> BoundaryRates:
    """Rates of a table preset; delta is solved for the class of tables 2 to 5."""
    if name == "table1":
        return BoundaryRates(0.23, 0.32, 0.47, 0.6, 0.1, 4)
    if name in TABLE_CLASS:
        base = BoundaryRates(delta=1.0, **_TABLE_CLASS_BASE)
        return solve_delta(base, TABLE_CLASS[name])
    raise ParameterError(f"unknown preset {name!r}")


FIG2_LEFT = dict(alpha=1.30, beta=0.46, gamma=2.11, n_sites=8, q_values=(0.5, 1.1, 2.5))
FIG2_RIGHT = BoundaryRates(1.30, 0.40, 2.10, 0.70, 1.35, 2)
#: the sparse solver caps the chain length below the 16 sites of the reference plot
FIG2_RIGHT_SIZES = tuple(range(2, 15))
FIG3 = dict(alpha=1.30, beta=0.46, gamma=2.11, n_sites=8, q_values=(0.5, 2.0))
FIG4 = BoundaryRates(0.51, 1.27, 0.83, 1.0, 1.62, 4)


def fig2_left_templates():
    return [BoundaryRates(FIG2_LEFT["alpha"], FIG2_LEFT["beta"], FIG2_LEFT["gamma"], 1.0, q,
                          FIG2_LEFT["n_sites"]) for q in FIG2_LEFT["q_values"]]


def fig2_left_thetas(n_sites: int = 8, points: int = 33) -> np.ndarray:
    return np.linspace(-2.0, 2.0 * n_sites, points)


def fig3_templates():
    return [BoundaryRates(FIG3["alpha"], FIG3["beta"], FIG3["gamma"], 1.0, q, FIG3["n_sites"])
            for q in FIG3["q_values"]]


def fig3_thetas(n_sites: int = 8):
    return (0.0, 3.5, n_sites - 1.0, float(n_sites), 2.0 * n_sites)


def fig4_deltas(points: int = 41) -> np.ndarray:
    """delta grid covering theta from about -1 to N + 1."""
    t = FIG4
    lo = t.alpha * t.beta * t.q ** (t.n_sites - 1 - (t.n_sites + 1)) / t.gamma
    hi = t.alpha * t.beta * t.q ** (t.n_sites - 1 + 1) / t.gamma
    return np.geomspace(lo, hi, points)


def fig4_integer_deltas():
    t = FIG4
    return [solve_delta(t, j).delta for j in range(t.n_sites + 1)]
