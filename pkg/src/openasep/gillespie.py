"""
Exact-clock kinetic Monte Carlo of the open ASEP.

The trajectory loop runs in a numba kernel fed with chunks of uniforms drawn
from a seeded ``numpy.random.Generator``, so results are bit-identical for a
given seed and independent of chunking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numba
import numpy as np

from .errors import ParameterError
from .model import BoundaryRates

CHUNK_EVENTS = 1 << 20


@dataclass(frozen=True)
class SimConfig:
    rates: BoundaryRates
    n_events: int
    burn_in_events: Optional[int] = None
    seed: int = 0
    batch_count: int = 20
    thin: int = 0

    def __post_init__(self):
        if self.burn_in_events is None:
            object.__setattr__(self, "burn_in_events", self.n_events // 10)
        if self.n_events <= self.burn_in_events:
            raise ParameterError("n_events must exceed burn_in_events")
        if self.burn_in_events < 0:
            raise ParameterError("burn_in_events must be non-negative")
        if self.batch_count < 10:
            raise ParameterError("batch_count must be at least 10")
        if (self.n_events - self.burn_in_events) < self.batch_count:
            raise ParameterError("fewer measured events than batches")
        if self.thin < 0:
            raise ParameterError("thin must be non-negative")


@dataclass
class SimEstimate:
    current_mean: float
    current_stderr: float
    density_mean: np.ndarray
    density_stderr: np.ndarray
    bond_current_mean: np.ndarray
    bond_current_stderr: np.ndarray
    total_time: float
    n_events: int
    seed: int
    time_series: Optional[np.ndarray] = field(default=None, repr=False)

    def as_dict(self) -> dict:
        return {
            "current_mean": self.current_mean,
            "current_stderr": self.current_stderr,
            "density_mean": self.density_mean.tolist(),
            "density_stderr": self.density_stderr.tolist(),
            "bond_current_mean": self.bond_current_mean.tolist(),
            "bond_current_stderr": self.bond_current_stderr.tolist(),
            "total_time": self.total_time,
            "n_events": self.n_events,
            "seed": self.seed,
        }


@numba.njit(cache=True)
def _run_chunk(occ, params, uniforms, start, burn_in, batch_size, n_batches,
               clock, b_time, b_dens, b_left, b_bond, thin, series):
    """Advance the chain by ``uniforms.shape[0]`` events; returns (clock, status)."""
    n = occ.shape[0]
    alpha, beta, gamma, delta, right, left = params
    n_ev = uniforms.shape[0]
    for e in range(n_ev):
        total = 0.0
        if occ[0] == 0:
            total += alpha
        else:
            total += gamma
        if occ[n - 1] == 0:
            total += delta
        else:
            total += beta
        for k in range(n - 1):
            if occ[k] == 1 and occ[k + 1] == 0:
                total += right
            elif occ[k] == 0 and occ[k + 1] == 1:
                total += left
        if total <= 0.0:
            return clock, 1
        dt = -math.log(1.0 - uniforms[e, 0]) / total
        g = start + e
        b = -1
        if g >= burn_in:
            b = (g - burn_in) // batch_size
            if b >= n_batches:
                b = n_batches - 1
            b_time[b] += dt
            for k in range(n):
                if occ[k] == 1:
                    b_dens[b, k] += dt
        clock += dt
        target = uniforms[e, 1] * total
        acc = 0.0
        done = False
        # left boundary
        if occ[0] == 0:
            acc += alpha
            if target < acc:
                occ[0] = 1
                if b >= 0:
                    b_left[b] += 1.0
                done = True
        else:
            acc += gamma
            if target < acc:
                occ[0] = 0
                if b >= 0:
                    b_left[b] -= 1.0
                done = True
        if not done:
            for k in range(n - 1):
                if occ[k] == 1 and occ[k + 1] == 0:
                    acc += right
                    if target < acc:
                        occ[k] = 0
                        occ[k + 1] = 1
                        if b >= 0:
                            b_bond[b, k] += 1.0
                        done = True
                        break
                elif occ[k] == 0 and occ[k + 1] == 1:
                    acc += left
                    if target < acc:
                        occ[k] = 1
                        occ[k + 1] = 0
                        if b >= 0:
                            b_bond[b, k] -= 1.0
                        done = True
                        break
        if not done:
            # right boundary (also absorbs roundoff at the top of the range)
            if occ[n - 1] == 0:
                occ[n - 1] = 1
            else:
                occ[n - 1] = 0
        if thin > 0 and g % thin == 0:
            row = g // thin
            series[row, 0] = clock
            series[row, 1] = occ.sum()
    return clock, 0


def _ratio_stats(counts: np.ndarray, times: np.ndarray):
    """Pooled ratio and batch-means standard error."""
    per_batch = counts / times[(...,) + (None,) * (counts.ndim - 1)]
    mean = counts.sum(axis=0) / times.sum()
    stderr = per_batch.std(axis=0, ddof=1) / math.sqrt(times.size)
    return mean, stderr


def simulate(config: SimConfig) -> SimEstimate:
    """Run one trajectory and return batch-means estimates of current and density."""
    rates = config.rates
    rates.require_positive()
    n = rates.n_sites
    q = rates.q
    params = np.array([rates.alpha, rates.beta, rates.gamma, rates.delta,
                       q / (q + 1), 1 / (q + 1)])
    rng = np.random.default_rng(config.seed)
    occ = np.zeros(n, dtype=np.int64)
    measured = config.n_events - config.burn_in_events
    batch_size = measured // config.batch_count
    nb = config.batch_count
    b_time = np.zeros(nb)
    b_dens = np.zeros((nb, n))
    b_left = np.zeros(nb)
    b_bond = np.zeros((nb, n - 1))
    rows = (config.n_events - 1) // config.thin + 1 if config.thin else 1
    series = np.zeros((rows, 2))
    clock = 0.0
    done = 0
    while done < config.n_events:
        size = min(CHUNK_EVENTS, config.n_events - done)
        uniforms = rng.random((size, 2))
        clock, status = _run_chunk(occ, params, uniforms, done, config.burn_in_events,
                                   batch_size, nb, clock, b_time, b_dens, b_left, b_bond,
                                   config.thin, series)
        if status:
            raise ParameterError("total transition rate vanished; chain is absorbing")
        done += size
    cur, cur_err = _ratio_stats(b_left, b_time)
    dens, dens_err = _ratio_stats(b_dens, b_time)
    bond, bond_err = _ratio_stats(b_bond, b_time)
    return SimEstimate(float(cur), float(cur_err), dens, dens_err, bond, bond_err,
                       float(b_time.sum()), config.n_events, config.seed,
                       series if config.thin else None)
