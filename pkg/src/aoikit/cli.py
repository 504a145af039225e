"""Command-line entry point: ``aoi {closed,shs,sim,region,verify}``.

Exit codes: 0 success, 1 domain error or failed verification, 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from importlib import metadata

import numpy as np

from . import closed_form as cf
from . import checks, region
from .core import Discipline, SourceLoads, parse_rhos
from .errors import AoIError
from .shs import ShsModel, build_reference_model, solve_age, transient, KINDS
from .sim import SimConfig, simulate

DISCIPLINES = [d.value for d in Discipline]


def _version():
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "unknown"


@dataclass
class RunManifest:
    argv: list
    config: dict
    seeds: list = field(default_factory=list)
    version: str = field(default_factory=_version)
    started: str = ""
    finished: str = ""

    def to_dict(self):
        return {"argv": self.argv, "config": self.config, "seeds": self.seeds,
                "version": self.version, "started": self.started, "finished": self.finished}


def _now():
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


class UsageError(Exception):
    """Argument combination argparse cannot express; exits with code 2."""


def _loads(args) -> SourceLoads:
    rho = getattr(args, "rho", None)
    lam = getattr(args, "lambdas", None)
    if (rho is None) == (lam is None):
        raise UsageError("give exactly one of --rho or --lambda")
    if rho is not None:
        return SourceLoads(args.mu, parse_rhos(rho))
    return SourceLoads.from_rates(parse_rhos(lam), args.mu)


def _add_loads(p, required_mu=True):
    p.add_argument("--mu", type=float, default=1.0, help="service rate (default 1)")
    p.add_argument("--rho", help="comma separated per-source offered loads")
    p.add_argument("--lambda", dest="lambdas", help="comma separated per-source arrival rates")


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, Discipline):
        return x.value
    return x


# Command handlers return (payload dict, optional (header, rows) table).

def cmd_closed(args):
    loads = _loads(args)
    disc = Discipline.parse(args.discipline)
    av = cf.ages(loads, disc)
    out = {"discipline": disc.value, "mu": loads.mu, "rhos": list(loads.rhos),
           "total_load": loads.total(), "per_source_ages": list(av.ages), "sum_age": av.total()}
    if disc is Discipline.FCFS:
        out["eyw"] = [cf.fcfs_eyw(loads, i) for i in range(loads.n)]
    if disc is Discipline.LCFS_S:
        out["moments"] = [vars(cf.lcfs_s_moments(loads, i)) for i in range(loads.n)]
    rows = [(i + 1, loads.rhos[i], a) for i, a in enumerate(av.ages)]
    return out, (["source", "rho", "age"], rows)


def _model_from_args(args) -> ShsModel:
    if getattr(args, "model", None):
        with open(args.model) as fh:
            return ShsModel.from_dict(json.load(fh))
    if getattr(args, "kind", None):
        return build_reference_model(args.kind, args.lambda1, args.lambda2, args.mu)
    raise UsageError("give --model FILE or --kind")


def cmd_shs(args):
    if args.shs_cmd == "transient":
        model = _model_from_args(args)
        pi0 = np.zeros(model.num_states)
        pi0[0] = 1.0
        tr = transient(model, pi0, None, t_end=args.t_end, dt=args.dt,
                       sample_every=args.sample_every)
        ages = tr.ages()
        out = {"times": tr.times, "pi": tr.pi_t, "age": ages, "final_age": float(ages[-1])}
        header = ["t"] + [f"pi{q}" for q in range(model.num_states)] + ["age"]
        rows = [(t, *p, a) for t, p, a in zip(tr.times, tr.pi_t, ages)]
        return out, (header, rows)
    model = _model_from_args(args)
    sol = solve_age(model)
    out = sol.to_dict()
    if args.shs_cmd == "builtin":
        out["kind"] = args.kind
    rows = [(q, sol.pi.pi[q], *sol.v[q]) for q in range(model.num_states)]
    header = ["state", "pi"] + [f"v{j}" for j in range(model.cont_dim)]
    return out, (header, rows)


def cmd_sim(args):
    loads = _loads(args)
    cfg = SimConfig(loads, args.discipline, args.horizon, horizon_kind=args.horizon_kind,
                    warmup_fraction=args.warmup, seed=args.seed, reps=args.reps,
                    queue_cap=args.queue_cap,
                    record_limit=args.record_limit if args.records_csv else 0)
    res = simulate(cfg)
    out = res.to_dict()
    out["discipline"] = cfg.discipline.value
    out["analytic"] = (list(cf.ages(loads, cfg.discipline).ages)
                       if cfg.discipline is not Discipline.FCFS or loads.total() < 1 else None)
    if args.records_csv:
        with open(args.records_csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["source", "gen_time", "delivery_time", "interarrival", "system_time",
                        "waiting_time"])
            for r in res.records:
                w.writerow([r.source + 1, r.gen_time, r.delivery_time, r.interarrival,
                            r.system_time, r.waiting_time])
        out["records_csv"] = args.records_csv
    rows = [(i + 1, s.age_area, s.age_ratio, s.stderr_age, s.deliveries)
            for i, s in enumerate(res.sources)]
    return out, (["source", "age_area", "age_ratio", "stderr", "deliveries"], rows)


def cmd_region(args):
    rc = args.region_cmd
    if rc == "contour":
        grid = region.age_contour(args.total, args.discipline, args.mu, args.grid_points,
                                  args.margin, args.also or ())
        rows = list(grid.csv_rows())
        header = grid.csv_header()
        return {"total_load": args.total, "rows": [dict(zip(header, r)) for r in rows]}, (header, rows)
    if rc == "min-sum":
        res = region.min_sum_age(args.discipline, args.n, args.mu, args.rho_max)
        out = {"discipline": Discipline.parse(args.discipline).value, "rho_star": res.rho_star,
               "sum_age": res.sum_age, "limit_sum_age": res.limit_sum_age}
        return out, (["n", "rho_i", "sum_age"], [(args.n, res.rho_star[0], res.sum_age)])
    if rc == "policy-map":
        fr, tot = region.policy_grid(args.fractions, args.totals, rho_max=args.rho_max)
        cells = region.best_policy_map(fr, tot, args.mu)
        header = ["fraction", "rho", "rho1", "rho2", "best"] + [f"sum_{d}" for d in DISCIPLINES]
        rows = [(c.fraction, c.total, *c.rhos, c.best.value,
                 *[c.sums.get(Discipline.parse(d), "") for d in DISCIPLINES]) for c in cells]
        return {"cells": [dict(zip(header, r)) for r in rows]}, (header, rows)
    if rc == "adapt":
        init = parse_rhos(args.init) if args.init else (0.5,) * args.n
        tr = region.rate_adapt(args.n, init, args.max_iters, args.tol, args.response)
        out = {"converged": tr.converged, "fixed_point": tr.fixed_point,
               "iterations": len(tr.iterations) - 1, "trajectory": tr.iterations}
        if tr.converged:
            out["ages"] = list(cf.ages(SourceLoads(1.0, tr.fixed_point), "fcfs").ages)
        header = ["iter"] + [f"rho{i + 1}" for i in range(args.n)]
        return out, (header, [(k, *r) for k, r in enumerate(tr.iterations)])
    if rc == "crossover":
        loads = _loads(args)
        out = {"rhos": list(loads.rhos), "lcfs_w_better": region.crossover(loads),
               "per_source": [region.crossover_source(loads, i) for i in range(loads.n)],
               "sum_lcfs_s": cf.sum_age(loads, "lcfs-s"), "sum_lcfs_w": cf.sum_age(loads, "lcfs-w")}
        return out, (["lcfs_w_better"], [(out["lcfs_w_better"],)])
    raise UsageError(f"unknown region command {rc}")


def cmd_verify(args):
    results = checks.run_checks(args.level, args.only)
    for r in results:
        print(r.line(), file=sys.stderr)
    out = {"level": args.level, "passed": all(r.passed for r in results),
           "checks": [{"name": r.name, "passed": r.passed, "detail": r.detail,
                       "seconds": r.seconds} for r in results]}
    rows = [(r.name, "PASS" if r.passed else "FAIL", r.detail) for r in results]
    return out, (["check", "status", "detail"], rows)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="aoi", description="Age of information for multi-source queues.")
    p.add_argument("--version", action="version", version=f"%(prog)s {_version()}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--csv", action="store_true", help="emit CSV instead of JSON")
    sub = p.add_subparsers(dest="cmd", required=True)

    c = sub.add_parser("closed", parents=[common], help="closed-form per-source ages")
    c.add_argument("--discipline", required=True, choices=DISCIPLINES)
    _add_loads(c)
    c.set_defaults(func=cmd_closed)

    s = sub.add_parser("shs", help="stochastic hybrid system solver")
    ssub = s.add_subparsers(dest="shs_cmd", required=True)
    solve = ssub.add_parser("solve", parents=[common], help="solve a JSON model")
    solve.add_argument("--model", required=True)
    builtin = ssub.add_parser("builtin", parents=[common], help="solve a reference model")
    tr = ssub.add_parser("transient", parents=[common], help="integrate pi(t), v(t) from state 0")
    tr.add_argument("--model")
    for sp, req in ((builtin, True), (tr, False)):
        sp.add_argument("--kind", required=req, choices=KINDS)
        sp.add_argument("--lambda1", type=float, default=0.5)
        sp.add_argument("--lambda2", type=float, default=0.5)
        sp.add_argument("--mu", type=float, default=1.0)
    tr.add_argument("--t-end", type=float, default=50.0)
    tr.add_argument("--dt", type=float, default=0.01)
    tr.add_argument("--sample-every", type=int, default=10)
    s.set_defaults(func=cmd_shs)

    m = sub.add_parser("sim", parents=[common], help="Monte Carlo simulation")
    m.add_argument("--discipline", required=True, choices=DISCIPLINES)
    _add_loads(m)
    m.add_argument("--horizon", type=float, default=1e6,
                   help="delivered updates (default) or time span, see --horizon-kind")
    m.add_argument("--horizon-kind", choices=["deliveries", "time"], default="deliveries")
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--warmup", type=float, default=0.1, help="warm-up fraction")
    m.add_argument("--reps", type=int, default=1)
    m.add_argument("--queue-cap", type=int, default=10_000_000)
    m.add_argument("--records-csv", help="write delivery records to this CSV")
    m.add_argument("--record-limit", type=int, default=100_000)
    m.set_defaults(func=cmd_sim)

    r = sub.add_parser("region", help="load-region analyses")
    rsub = r.add_subparsers(dest="region_cmd", required=True)
    ct = rsub.add_parser("contour", parents=[common])
    ct.add_argument("--total", type=float, required=True, help="total offered load")
    ct.add_argument("--discipline", required=True, choices=DISCIPLINES)
    ct.add_argument("--also", nargs="*", choices=DISCIPLINES, help="extra disciplines")
    ct.add_argument("--mu", type=float, default=1.0)
    ct.add_argument("--grid-points", type=int, default=101)
    ct.add_argument("--margin", type=float, default=1e-3)
    ms = rsub.add_parser("min-sum", parents=[common])
    ms.add_argument("--discipline", required=True, choices=DISCIPLINES)
    ms.add_argument("--n", type=int, default=2)
    ms.add_argument("--mu", type=float, default=1.0)
    ms.add_argument("--rho-max", type=float, default=2.0)
    pm = rsub.add_parser("policy-map", parents=[common])
    pm.add_argument("--fractions", type=int, default=50, help="cells along rho1/rho in (0, 0.5]")
    pm.add_argument("--totals", type=int, default=50, help="cells along rho in (0, rho-max)")
    pm.add_argument("--rho-max", type=float, default=2.0)
    pm.add_argument("--mu", type=float, default=1.0)
    ad = rsub.add_parser("adapt", parents=[common])
    ad.add_argument("--n", type=int, default=2)
    ad.add_argument("--init", help="comma separated initial loads (default 0.5 each)")
    ad.add_argument("--max-iters", type=int, default=200)
    ad.add_argument("--tol", type=float, default=1e-6)
    ad.add_argument("--response", choices=["approx", "exact"], default="approx")
    cx = rsub.add_parser("crossover", parents=[common])
    _add_loads(cx)
    r.set_defaults(func=cmd_region)

    v = sub.add_parser("verify", parents=[common], help="run the cross-validation suite")
    v.add_argument("--level", choices=["fast", "full"], default="fast")
    v.add_argument("--only", nargs="*", help="restrict to these check function names")
    v.set_defaults(func=cmd_verify)
    return p


def _emit(args, payload, table, manifest):
    if args.csv and table is not None:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(table[0])
        w.writerows(table[1])
        text = buf.getvalue()
        if args.out:
            with open(args.out + ".manifest.json", "w") as fh:
                json.dump(manifest.to_dict(), fh, indent=2)
    else:
        payload = dict(payload, manifest=manifest.to_dict())
        text = json.dumps(_jsonable(payload), indent=2) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)  # exits 2 on usage errors
    config = {k: v for k, v in vars(args).items() if k not in ("func", "out", "csv")}
    manifest = RunManifest(argv, config, [args.seed] if hasattr(args, "seed") else [],
                           started=_now())
    try:
        payload, table = args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except (AoIError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    manifest.finished = _now()
    _emit(args, payload, table, manifest)
    if args.cmd == "verify" and not payload["passed"]:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
