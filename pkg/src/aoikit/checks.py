"""Cross-validation checks backing ``verify`` and the acceptance suite.

Each check returns a :class:`CheckResult`; none of them raise on a failed
comparison so a report can list every outcome.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

import numpy as np

from . import closed_form as cf
from . import region
from .core import Discipline, SourceLoads
from .errors import AoIError, UnstableModel
from .optimize import golden_section
from .shs import ShsModel, Transition, build_reference_model, solve_age, transient
from .sim import SimConfig, simulate

LCFS_S_KINDS = ("lcfs_s_3state", "lcfs_s_2state", "lcfs_s_fake")
BUILTIN_KINDS = LCFS_S_KINDS + ("lcfs_w",)


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0
    values: Dict[str, float] = field(default_factory=dict)

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] {self.name}: {self.detail} ({self.seconds:.2f}s)"


def _rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def _nan_high(x):
    return math.inf if math.isnan(x) else x


def _timed(name, fn, budget=None):
    t0 = time.perf_counter()
    try:
        passed, detail, values = fn()
    except AoIError as exc:
        passed, detail, values = False, f"{type(exc).__name__}: {exc}", {}
    dt = time.perf_counter() - t0
    if budget is not None and dt > budget:
        passed = False
        detail += f"; runtime {dt:.2f}s over budget {budget}s"
    return CheckResult(name, bool(passed), detail, dt, values)


def random_rate_grid(n=100, seed=12345):
    """``n`` random (lambda1, lambda2, mu) triples."""
    rng = np.random.default_rng(seed)
    lam = rng.uniform(0.05, 3.0, size=(n, 2))
    mu = rng.uniform(0.25, 4.0, size=n)
    return [(float(a), float(b), float(m)) for (a, b), m in zip(lam, mu)]


# criterion 1
def check_fcfs_optimum():
    def run():
        res = region.min_sum_age("fcfs", 2, mu=1.0)
        r1 = res.rho_star[0]
        a1 = cf.fcfs_age(SourceLoads(1.0, res.rho_star), 0)
        a_mu2 = cf.fcfs_age(SourceLoads(2.0, res.rho_star), 0)
        a_single = cf.fcfs_single_age(0.531, 1.0)
        ok = (abs(r1 - 0.306) <= 0.002 and abs(a1 - 5.30) <= 0.01
              and abs(a_mu2 - 2.65) <= 0.01 and abs(a_single - 3.48) <= 0.01)
        detail = (f"rho*={r1:.4f} (0.306+-0.002), age={a1:.4f} (5.30+-0.01), "
                  f"mu=2 age={a_mu2:.4f} (2.65+-0.01), single 0.531 age={a_single:.4f} (3.48+-0.01)")
        return ok, detail, {"rho_star": r1, "age": a1, "age_mu2": a_mu2, "age_single": a_single}
    return _timed("fcfs_two_source_optimum", run, budget=1.0)


# criterion 2
def check_nash_fixed_point():
    def run():
        tr2 = region.rate_adapt(2, (0.5, 0.5), max_iters=200, tol=1e-6)
        tr3 = region.rate_adapt(3, (0.3, 0.3, 0.3), max_iters=200, tol=1e-6)
        if not tr2.converged:
            return False, "N=2 iteration did not converge", {}
        rho = tr2.fixed_point[0]
        age = cf.fcfs_age(SourceLoads(1.0, tr2.fixed_point), 0)
        ok_rho = abs(rho - 0.342) <= 0.001
        ok_age = abs(age - 5.4390) <= 0.001
        ok3 = not tr3.converged
        detail = (f"N=2 rho={rho:.6f} (0.342+-0.001) {'ok' if ok_rho else 'off'}, "
                  f"age={age:.5f} (5.4390+-0.001) {'ok' if ok_age else 'off'}, "
                  f"N=3 converged={tr3.converged} (expect False)")
        return ok_rho and ok_age and ok3, detail, {"rho": rho, "age": age}
    return _timed("nash_fixed_point", run, budget=1.0)


# criterion 3
def check_shs_closure(grid=None, builder: Callable = build_reference_model, tol=1e-9):
    def run():
        pts = grid if grid is not None else random_rate_grid()
        worst = {k: 0.0 for k in BUILTIN_KINDS}
        pair = 0.0
        errors = {}

        def age_of(kind, l1, l2, mu):
            try:
                return solve_age(builder(kind, l1, l2, mu)).age
            except AoIError as exc:
                errors.setdefault(kind, type(exc).__name__)
                return math.nan

        for l1, l2, mu in pts:
            loads = SourceLoads.from_rates((l1, l2), mu)
            s_ref = cf.lcfs_s_age(loads, 0)
            w_ref = cf.lcfs_w_age(loads, 0)
            s_vals = []
            for kind in LCFS_S_KINDS:
                a = age_of(kind, l1, l2, mu)
                s_vals.append(a)
                worst[kind] = max(worst[kind], _rel(a, s_ref), key=_nan_high)
            a = age_of("lcfs_w", l1, l2, mu)
            worst["lcfs_w"] = max(worst["lcfs_w"], _rel(a, w_ref), key=_nan_high)
            for i in range(3):
                for j in range(i + 1, 3):
                    pair = max(pair, _rel(s_vals[i], s_vals[j]), key=_nan_high)
        bad = [k for k, v in worst.items() if not v < tol]
        ok = not bad and pair < tol
        top = max(worst.values(), key=_nan_high)
        detail = (f"{len(pts)} points, max rel err {top:.2e}, "
                  f"LCFS-S pairwise {pair:.2e} (< {tol:g})")
        if bad:
            detail += "; failing models: " + ", ".join(
                k + (f" ({errors[k]})" if k in errors else "") for k in bad)
        return ok, detail, dict(worst, pairwise=pair)
    return _timed("shs_closed_form_closure", run, budget=5.0)


# criterion 4
def check_symbolic_spot(points=((0.4, 0.7, 1.0), (1.3, 0.2, 2.5), (0.05, 2.0, 0.7))):
    def run():
        err = 0.0
        for l1, l2, mu in points:
            r1, r2 = l1 / mu, l2 / mu
            rho = r1 + r2
            sol = solve_age(build_reference_model("lcfs_s_3state", l1, l2, mu))
            pi_ref = np.array([1.0, r1, r2]) / (1.0 + rho)
            c = 1.0 / (mu * (1.0 + rho))
            v_ref = [c * ((1 + r2) / r1 + 1 / (1 + rho)),
                     c * (1 + rho + r1 / (1 + rho)),
                     c * (r2 * (1 + rho) / r1 + r2 / (1 + rho))]
            err = max(err, np.max(np.abs(sol.pi.pi - pi_ref)))
            for q in range(3):
                err = max(err, _rel(sol.v[q, 0], v_ref[q]))
            sol_w = solve_age(build_reference_model("lcfs_w", l1, l2, mu))
            cpi = 1.0 / (1.0 + rho + rho * rho)
            err = max(err, np.max(np.abs(sol_w.pi.pi - cpi * np.array([1.0, rho, rho * rho]))))
            v11 = rho / (mu * (1 + rho) * r1) - cpi * (1 + rho + rho ** 3) / (mu * (1 + rho) ** 2)
            err = max(err, _rel(sol_w.v[1, 1], v11))
        return err < 1e-9, f"max deviation {err:.2e} (< 1e-9)", {"max_err": err}
    return _timed("symbolic_spot_checks", run)


def never_reset_model(rate=1.0) -> ShsModel:
    """One state whose only transition leaves the age untouched."""
    t = Transition.from_mapping(0, 0, rate, [0], 1)
    return ShsModel(1, 1, np.array([[1.0]]), [t], [[]])


# criterion 5
def check_stability(grid=None):
    def run():
        pts = grid if grid is not None else random_rate_grid(20, seed=7)
        worst_abs = -math.inf
        worst_res = 0.0
        for l1, l2, mu in pts:
            for kind in BUILTIN_KINDS:
                sol = solve_age(build_reference_model(kind, l1, l2, mu))
                worst_abs = max(worst_abs, sol.spectral_abscissa)
                worst_res = max(worst_res, sol.residual)
        try:
            solve_age(never_reset_model())
            flagged = False
        except UnstableModel:
            flagged = True
        ok = worst_abs < 0 and worst_res < 1e-10 and flagged
        detail = (f"max abscissa {worst_abs:.3e} (< 0), max residual {worst_res:.2e} (< 1e-10), "
                  f"never-reset flagged unstable={flagged}")
        return ok, detail, {"abscissa": worst_abs, "residual": worst_res}
    return _timed("stability_machinery", run)


# criterion 6
def check_transient(l1=0.6, l2=0.9, mu=1.3):
    def run():
        model = build_reference_model("lcfs_s_3state", l1, l2, mu)
        sol = solve_age(model)
        pi0 = np.zeros(model.num_states)
        pi0[0] = 1.0
        dt = 0.05 / max(model.departure_rates())
        tr = transient(model, pi0, None, t_end=200.0 / mu, dt=dt)
        k50 = int(np.argmin(np.abs(tr.times - 50.0 / mu)))
        pi_err = float(np.max(np.abs(tr.pi_t[k50] - sol.pi.pi)))
        age_err = abs(float(tr.ages()[-1]) - sol.age)
        ok = pi_err < 1e-6 and age_err < 1e-4
        detail = f"|pi(50/mu)-pi|={pi_err:.2e} (< 1e-6), |age(200/mu)-age|={age_err:.2e} (< 1e-4)"
        return ok, detail, {"pi_err": pi_err, "age_err": age_err}
    return _timed("transient_convergence", run)


def _sim(disc, rhos, n, seed):
    cfg = SimConfig(SourceLoads(1.0, rhos), disc, n, seed=seed)
    return simulate(cfg)


# criterion 7
def check_simulation_closure(deliveries=10_000_000, seed=2024,
                             cases=((0.3, 0.3), (0.5, 0.5)), budget=300.0):
    def run():
        parts, ok = [], True
        vals = {}
        for rhos in cases:
            loads = SourceLoads(1.0, rhos)
            for disc in Discipline:
                if disc is Discipline.FCFS and loads.total() >= 1.0:
                    continue
                res = _sim(disc, rhos, deliveries, seed)
                ref = cf.ages(loads, disc).ages
                for i, s in enumerate(res.sources):
                    z = (s.age_area - ref[i]) / s.stderr_age
                    gap = abs(s.age_area - s.age_ratio) / s.age_area
                    good = abs(z) <= 3.0 and gap < 0.01
                    ok &= good
                    vals[f"{disc.value}{rhos}[{i}]"] = z
                    if not good or i == 0:
                        parts.append(f"{disc.value} {rhos}[{i}] sim={s.age_area:.4f} "
                                     f"ref={ref[i]:.4f} z={z:+.2f} gap={gap:.1e}"
                                     + ("" if good else " FAIL"))
        return ok, "; ".join(parts), vals
    return _timed("simulation_closure", run, budget=budget)


# criterion 8
def check_eyw(deliveries=10_000_000, seed=2024):
    def run():
        loads = SourceLoads(1.0, (0.3, 0.3))
        res = _sim(Discipline.FCFS, loads.rhos, deliveries, seed)
        s = res.sources[0]
        ref = cf.fcfs_eyw(loads, 0)
        z = (s.mean_yw - ref) / s.stderr_yw
        ok = abs(z) <= 3.0 and s.corr_yw < 0
        detail = (f"E[YW] sim={s.mean_yw:.4f}+-{s.stderr_yw:.4f} ref={ref:.4f} z={z:+.1f} (|z|<=3), "
                  f"corr(Y,W)={s.corr_yw:.4f} (< 0)")
        return ok, detail, {"z": z, "corr": s.corr_yw}
    return _timed("fcfs_eyw", run)


# criterion 9
def check_alpha_w_bounds(samples=10_000, seed=99):
    def run():
        rng = np.random.default_rng(seed)
        rhos = np.concatenate([[0.0, 100.0], rng.uniform(0.0, 100.0, samples - 2)])
        vals = np.array([cf.alpha_w(float(r)) for r in rhos])
        at0 = cf.alpha_w(0.0)
        ok = bool(np.all((vals > 0.837) & (vals < 1.09))) and at0 == 1.0
        detail = f"min {vals.min():.5f} max {vals.max():.5f} in (0.837, 1.09), alpha_w(0)={at0!r}"
        return ok, detail, {"min": float(vals.min()), "max": float(vals.max())}
    return _timed("alpha_w_bounds", run)


# criterion 10
def check_large_n(n=10_000):
    def run():
        exact = all(cf.fcfs_optimal_symmetric_load(k) == math.sqrt(k) / (math.sqrt(k) + 1.0)
                    for k in (1, 2, 5, 100, n))
        # dominant large-N terms, minimised numerically
        num, _ = golden_section(lambda r: 1.0 / (n * (1.0 - r)) + 1.0 / r, 1e-9, 1 - 1e-9, 1e-12)
        rho = cf.fcfs_optimal_symmetric_load(n)
        lim = cf.large_n_ages(rho, n)
        rw, rs = lim.lcfs_w / lim.fcfs, lim.lcfs_s / lim.fcfs
        ok = exact and abs(num - rho) < 1e-6 and _rel(rw, 1.5) <= 0.05 and _rel(rs, 2.0) <= 0.05
        detail = (f"rho*_N formula exact={exact}, numeric argmin gap {abs(num - rho):.1e}; "
                  f"N={n}: W/F={rw:.4f} (1.5+-5%), S/F={rs:.4f} (2+-5%)")
        return ok, detail, {"w_over_f": rw, "s_over_f": rs}
    return _timed("large_n_limits", run)


# criterion 11
def check_crossover(samples=1000, seed=31):
    def run():
        rng = np.random.default_rng(seed)
        bad = 0
        for _ in range(samples):
            n = int(rng.integers(2, 6))
            rhos = tuple(float(x) for x in rng.uniform(0.01, 3.0, size=n))
            loads = SourceLoads(1.0, rhos)
            direct = cf.sum_age(loads, "lcfs-w") < cf.sum_age(loads, "lcfs-s")
            bad += region.crossover(loads) != direct
        return bad == 0, f"{bad} disagreements on {samples} random load vectors", {"bad": bad}
    return _timed("crossover_predicate", run)


def fault_injection():
    """Closure check against a builtin whose reset map has been corrupted; must fail."""
    def corrupted(kind, l1, l2, mu):
        m = build_reference_model(kind, l1, l2, mu)
        if kind != "lcfs_s_fake":
            return m
        ts = list(m.transitions)
        t = ts[0]
        ts[0] = Transition.from_mapping(t.src, t.dst, t.rate, [1, None], m.cont_dim)
        return m.with_transitions(ts)

    res = check_shs_closure(grid=random_rate_grid(10, seed=3), builder=corrupted)
    caught = not res.passed and "lcfs_s_fake" in res.detail
    return CheckResult("fault_injection", caught,
                       f"corrupted lcfs_s_fake reset detected by {res.name}: {caught}",
                       res.seconds)


FAST_CHECKS = (check_fcfs_optimum, check_nash_fixed_point, check_shs_closure, check_symbolic_spot,
               check_stability, check_transient, check_alpha_w_bounds, check_large_n,
               check_crossover, fault_injection)
FULL_CHECKS = (check_simulation_closure, check_eyw)


def run_checks(level="fast", only: Optional[List[str]] = None) -> List[CheckResult]:
    if level not in ("fast", "full"):
        raise ValueError("level must be 'fast' or 'full'")
    checks = FAST_CHECKS + (FULL_CHECKS if level == "full" else ())
    out = []
    for fn in checks:
        if only and fn.__name__ not in only:
            continue
        out.append(fn())
    return out
