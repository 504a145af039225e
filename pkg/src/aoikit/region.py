"""Load-region analyses built on the closed-form ages.

Age contours at fixed total load, sum-age minimisation, best-policy maps,
the LCFS-W/LCFS-S crossover predicate and non-cooperative rate adaptation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import closed_form as cf
from .core import Discipline, SourceLoads, AgeVector
from .errors import UnstableLoad, InvalidLoads
from .optimize import golden_section

# tie-break order for the policy map
POLICY_ORDER = (Discipline.FCFS, Discipline.LCFS_W, Discipline.LCFS_S)
TIE_TOL = 1e-9


@dataclass(frozen=True)
class RegionPoint:
    rhos: tuple
    total: float
    ages: Dict[Discipline, AgeVector]


@dataclass
class RegionGrid:
    points: List[RegionPoint] = field(default_factory=list)

    def csv_rows(self):
        """Rows ``(rho1, rho2, ..., age1, age2, ..., discipline)`` one per point and discipline."""
        for p in self.points:
            for d, av in p.ages.items():
                yield (*p.rhos, *av.ages, d.value)

    def csv_header(self):
        n = len(self.points[0].rhos) if self.points else 2
        return ([f"rho{i + 1}" for i in range(n)] + [f"age{i + 1}" for i in range(n)]
                + ["discipline"])


@dataclass(frozen=True)
class MinSumResult:
    rho_star: tuple
    sum_age: float
    limit_sum_age: Optional[float] = None  # LCFS: infimum as total load grows without bound


@dataclass
class AdaptTrajectory:
    iterations: List[tuple]
    converged: bool
    fixed_point: Optional[tuple]


@dataclass
class PolicyCell:
    fraction: float  # rho1 / rho
    total: float
    best: Discipline
    sums: Dict[Discipline, float]

    @property
    def rhos(self):
        return (self.fraction * self.total, (1.0 - self.fraction) * self.total)


def age_contour(total_rho: float, discipline, mu: float = 1.0, grid_points: int = 101,
                margin: float = 1e-3, disciplines: Sequence = ()) -> RegionGrid:
    """Two-source ages along ``rho1 + rho2 = total_rho`` for rho1 in [margin, total - margin]."""
    disc = Discipline.parse(discipline)
    discs = [disc] + [Discipline.parse(d) for d in disciplines if Discipline.parse(d) != disc]
    if grid_points < 2:
        raise ValueError("grid_points must be >= 2")
    if not total_rho > 2 * margin:
        raise InvalidLoads(f"total load {total_rho} too small for margin {margin}")
    if disc is Discipline.FCFS and total_rho >= 1.0:
        raise UnstableLoad(total_rho)
    grid = RegionGrid()
    for r1 in np.linspace(margin, total_rho - margin, grid_points):
        loads = SourceLoads(mu, (float(r1), float(total_rho - r1)))
        ages = {}
        for d in discs:
            if d is Discipline.FCFS and total_rho >= 1.0:
                continue
            ages[d] = cf.ages(loads, d)
        grid.points.append(RegionPoint(loads.rhos, total_rho, ages))
    return grid


def min_sum_age(discipline, n: int, mu: float = 1.0, rho_max: float = 2.0,
                tol: float = 1e-6) -> MinSumResult:
    """Sum-age minimising loads for ``n`` sources.

    Both LCFS sum ages fall monotonically in total load, so the equal split at
    ``rho_max`` is reported together with the unconstrained limit.
    """
    disc = Discipline.parse(discipline)
    if n < 1:
        raise ValueError("n must be >= 1")

    def sym(rho):
        return SourceLoads(mu, (rho / n,) * n)

    if disc is Discipline.FCFS:
        rho, val = golden_section(lambda r: cf.sum_age(sym(r), disc), 1e-9, 1.0 - 1e-9, tol)
        return MinSumResult(sym(rho).rhos, val)
    val = cf.sum_age(sym(rho_max), disc)
    if disc is Discipline.LCFS_S:
        limit = n * n / mu
    else:
        limit = n * (n + 1) / mu
    return MinSumResult(sym(rho_max).rhos, val, limit)


def best_policy(loads: SourceLoads):
    """Return ``(best discipline, {discipline: sum age})``; FCFS is skipped when unstable."""
    sums = {}
    for d in POLICY_ORDER:
        if d is Discipline.FCFS and loads.total() >= 1.0:
            continue
        sums[d] = cf.sum_age(loads, d)
    lowest = min(sums.values())
    for d in POLICY_ORDER:
        if d in sums and sums[d] <= lowest + TIE_TOL * max(1.0, abs(lowest)):
            return d, sums
    raise AssertionError("unreachable")


def best_policy_map(fractions: Sequence[float], totals: Sequence[float],
                    mu: float = 1.0) -> List[PolicyCell]:
    """Tag each ``(rho1/rho, rho)`` cell with the sum-age minimising discipline."""
    cells = []
    for rho in totals:
        for f in fractions:
            if not (0.0 < f < 1.0 and rho > 0):
                raise InvalidLoads(f"cell ({f}, {rho}) outside 0 < rho1/rho < 1, rho > 0")
            loads = SourceLoads(mu, (f * rho, (1.0 - f) * rho))
            best, sums = best_policy(loads)
            cells.append(PolicyCell(float(f), float(rho), best, sums))
    return cells


def policy_grid(n_fraction: int, n_total: int, fraction_max: float = 0.5,
                rho_max: float = 2.0):
    """Open grids: fractions ``fraction_max*k/n`` (k=1..n) and totals ``rho_max*k/n`` (k=1..n-1).

    Doubling both counts yields a grid containing every original point.
    """
    fractions = [fraction_max * k / n_fraction for k in range(1, n_fraction + 1)]
    totals = [rho_max * k / n_total for k in range(1, n_total)]
    return fractions, totals


def crossover(loads: SourceLoads) -> bool:
    """True iff LCFS-W has strictly smaller sum age than LCFS-S.

    Compares the mean inverse load share against ``(1 + rho) * alpha_w(rho)``.
    """
    rho = loads.total()
    mean_inv = sum(rho / r for r in loads.rhos) / loads.n
    return mean_inv > (1.0 + rho) * cf.alpha_w(rho)


def crossover_source(loads: SourceLoads, i: int) -> bool:
    """Per-source form: LCFS-W age of source ``i`` is below its LCFS-S age."""
    rho = loads.total()
    return rho / loads.rhos[i] > (1.0 + rho) * cf.alpha_w(rho)


def fcfs_best_response_approx(other: float) -> float:
    """Closed-form approximation to the age-minimising load against ``other``."""
    resid = 1.0 - other
    return resid / 2.0 + resid * resid / 32.0


def fcfs_best_response_exact(other: float, mu: float = 1.0, tol: float = 1e-10) -> float:
    """Load minimising the FCFS age of one source facing aggregate load ``other``."""
    if other >= 1.0:
        return 0.0
    hi = 1.0 - other
    x, _ = golden_section(lambda r: cf.fcfs_age(SourceLoads(mu, (r, other)) if other > 0
                                                else SourceLoads(mu, (r,)), 0),
                          hi * 1e-9, hi * (1.0 - 1e-9), tol)
    return x


LOAD_FLOOR = 1e-9


def rate_adapt(n: int, init: Sequence[float], max_iters: int = 200, tol: float = 1e-6,
               response: str = "approx", mu: float = 1.0) -> AdaptTrajectory:
    """Synchronous best-response iteration for ``n`` FCFS sources.

    Every source simultaneously replies to the others' previous loads. Loads
    that the map would drive to zero or below are held at a tiny positive floor.
    """
    rho = [float(r) for r in init]
    if len(rho) != n or n < 1:
        raise ValueError(f"init must have n={n} entries")
    if any(not 0.0 < r < 1.0 for r in rho):
        raise InvalidLoads("initial loads must lie in (0, 1)")
    if response == "approx":
        reply = fcfs_best_response_approx
    elif response == "exact":
        def reply(o):
            return fcfs_best_response_exact(o, mu)
    else:
        raise ValueError("response must be 'approx' or 'exact'")
    history = [tuple(rho)]
    for _ in range(max_iters):
        total = math.fsum(rho)
        nxt = [max(reply(total - r), LOAD_FLOOR) for r in rho]
        step = max(abs(a - b) for a, b in zip(nxt, rho))
        rho = nxt
        history.append(tuple(rho))
        if step < tol:
            return AdaptTrajectory(history, True, tuple(rho))
    return AdaptTrajectory(history, False, None)
