"""Closed-form average ages for the multi-source M/M/1 queue.

All functions take loads normalised by the shared service rate and scale
the result by ``1/mu``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .core import Discipline, SourceLoads, AgeVector
from .errors import UnstableLoad, InvalidLoads
from .optimize import golden_section


@dataclass(frozen=True)
class LcfsSMoments:
    expected_t: float
    expected_d: float
    expected_d2: float
    age: float


@dataclass(frozen=True)
class LargeNAges:
    fcfs: Optional[float]  # None when rho >= 1
    lcfs_s: float
    lcfs_w: float


def _check_index(loads, i):
    if not 0 <= i < loads.n:
        raise IndexError(f"source index {i} out of range for {loads.n} sources")


def _stable_total(loads):
    rho = loads.total()
    if rho >= 1.0:
        raise UnstableLoad(rho)
    return rho


def fcfs_age(loads: SourceLoads, i: int) -> float:
    _check_index(loads, i)
    rho = _stable_total(loads)
    ri = loads.rhos[i]
    ro = loads.other_load(i)
    val = (ri * ri * (1.0 - rho * ro) / ((1.0 - rho) * (1.0 - ro) ** 3)
           + 1.0 / (1.0 - ro) + 1.0 / ri)
    return val / loads.mu


def fcfs_single_age(rho: float, mu: float = 1.0) -> float:
    if not rho > 0:
        raise InvalidLoads(f"load must be > 0, got {rho}")
    if rho >= 1.0:
        raise UnstableLoad(rho)
    if not mu > 0:
        raise InvalidLoads(f"service rate must be > 0, got {mu}")
    return (rho * rho / (1.0 - rho) + 1.0 + 1.0 / rho) / mu


def fcfs_single_optimal_load(tol: float = 1e-6) -> float:
    """Load minimising the single-source FCFS age (about 0.53)."""
    x, _ = golden_section(lambda r: fcfs_single_age(r, 1.0), 1e-9, 1.0 - 1e-9, tol)
    return x


def fcfs_eyw(loads: SourceLoads, i: int) -> float:
    """E[YW]: interarrival times times waiting times of source ``i`` updates."""
    _check_index(loads, i)
    rho = _stable_total(loads)
    ri = loads.rhos[i]
    ro = loads.other_load(i)
    val = (ri * (1.0 - rho * ro) / ((1.0 - rho) * (1.0 - ro) ** 3)
           + ro / (ri * (1.0 - ro)))
    return val / (loads.mu * loads.mu)


def lcfs_s_age(loads: SourceLoads, i: int) -> float:
    _check_index(loads, i)
    return (1.0 + loads.total()) / loads.rhos[i] / loads.mu


def alpha_w(rho: float) -> float:
    if rho < 0 or math.isnan(rho):
        raise InvalidLoads(f"alpha_w needs rho >= 0, got {rho}")
    p = 1.0 + rho + rho * rho
    return (p * p + 2.0 * rho ** 3) / (p * (1.0 + rho) ** 2)


def lcfs_w_age(loads: SourceLoads, i: int) -> float:
    _check_index(loads, i)
    rho = loads.total()
    return (alpha_w(rho) + (1.0 + rho * rho / (1.0 + rho)) / loads.rhos[i]) / loads.mu


def lcfs_s_moments(loads: SourceLoads, i: int) -> LcfsSMoments:
    """System time and inter-departure moments behind the LCFS-S age.

    The inter-departure interval D between delivered source-``i`` updates is
    a geometric number of idle+busy blocks.
    """
    _check_index(loads, i)
    mu = loads.mu
    lam = loads.total() * mu
    lam_i = loads.rhos[i] * mu
    et = 1.0 / (lam + mu)
    ed = (mu + lam) / (lam_i * mu)
    ratio = lam / lam_i
    ed2 = 2.0 * ratio * (ratio * (1.0 / lam + 1.0 / mu) ** 2 - 1.0 / (lam * mu))
    return LcfsSMoments(et, ed, ed2, et + ed2 / (2.0 * ed))


def large_n_ages(rho: float, n: int, mu: float = 1.0) -> LargeNAges:
    """Limiting per-source ages for ``n`` symmetric sources at total load ``rho``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not rho > 0:
        raise InvalidLoads(f"load must be > 0, got {rho}")
    scale = n / mu
    fcfs = None
    if rho < 1.0:
        fcfs = scale * ((1.0 + rho) * rho * rho / (n ** 3 * (1.0 - rho) ** 3)
                        + 1.0 / (n * (1.0 - rho)) + 1.0 / rho)
    lcfs_s = scale * (1.0 + 1.0 / rho)
    lcfs_w = scale * (1.0 + 1.0 / (rho * (1.0 + rho)))
    return LargeNAges(fcfs, lcfs_s, lcfs_w)


def fcfs_optimal_symmetric_load(n: int) -> float:
    if n < 1:
        raise ValueError("n must be >= 1")
    s = math.sqrt(n)
    return s / (s + 1.0)


_AGE_FUNCS = {
    Discipline.FCFS: fcfs_age,
    Discipline.LCFS_S: lcfs_s_age,
    Discipline.LCFS_W: lcfs_w_age,
}


def age(loads: SourceLoads, i: int, discipline) -> float:
    return _AGE_FUNCS[Discipline.parse(discipline)](loads, i)


def ages(loads: SourceLoads, discipline) -> AgeVector:
    fn = _AGE_FUNCS[Discipline.parse(discipline)]
    return AgeVector(tuple(fn(loads, i) for i in range(loads.n)))


def sum_age(loads: SourceLoads, discipline) -> float:
    return ages(loads, discipline).total()
