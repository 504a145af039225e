"""Monte Carlo estimates of per-source age for FCFS, LCFS-S and LCFS-W queues."""
from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from ..core import Discipline, SourceLoads
from ..errors import InsufficientData, InvalidLoads, QueueOverflow
from . import kernel
from .rng import SERVICE_STREAM, source_stream, stream_key

N_BATCHES = 20
DEFAULT_QUEUE_CAP = 10_000_000

_DISC_CODE = {
    Discipline.FCFS: kernel.FCFS,
    Discipline.LCFS_S: kernel.LCFS_S,
    Discipline.LCFS_W: kernel.LCFS_W,
}


@dataclass(frozen=True)
class SimConfig:
    loads: SourceLoads
    discipline: Discipline
    horizon: float
    horizon_kind: str = "deliveries"  # or "time"
    warmup_fraction: float = 0.1
    seed: int = 0
    reps: int = 1
    queue_cap: int = DEFAULT_QUEUE_CAP
    record_limit: int = 0

    def __post_init__(self):
        object.__setattr__(self, "discipline", Discipline.parse(self.discipline))
        if self.horizon_kind not in ("deliveries", "time"):
            raise ValueError("horizon_kind must be 'deliveries' or 'time'")
        if not self.horizon > 0:
            raise ValueError("horizon must be > 0")
        if not 0.0 <= self.warmup_fraction < 1.0:
            raise ValueError("warmup_fraction must lie in [0, 1)")
        if self.reps < 1:
            raise ValueError("reps must be >= 1")


@dataclass(frozen=True)
class DeliveryRecord:
    source: int
    gen_time: float
    delivery_time: float
    interarrival: float
    system_time: float
    waiting_time: float = 0.0


@dataclass(frozen=True)
class SourceStats:
    age_area: float
    age_ratio: float
    stderr_age: float
    mean_y: float
    mean_y2: float
    mean_yt: float
    mean_yw: float
    stderr_yw: float
    mean_w: float
    corr_yw: float
    deliveries: int
    drift: float  # late-half minus early-half batch mean, in units of its stderr


@dataclass
class SimResult:
    sources: List[SourceStats]
    span: float
    busy_fraction: float
    deliveries: int
    max_queue: int
    records: List[DeliveryRecord] = field(default_factory=list)

    def ages(self) -> np.ndarray:
        return np.array([s.age_area for s in self.sources])

    def to_dict(self) -> dict:
        return {
            "span": self.span,
            "busy_fraction": self.busy_fraction,
            "deliveries": self.deliveries,
            "max_queue": self.max_queue,
            "sources": [
                {
                    "age_area": s.age_area,
                    "age_ratio": s.age_ratio,
                    "stderr": s.stderr_age,
                    "deliveries": s.deliveries,
                    "drift": s.drift,
                    "moments": {
                        "mean_y": s.mean_y, "mean_y2": s.mean_y2, "mean_yt": s.mean_yt,
                        "mean_yw": s.mean_yw, "stderr_yw": s.stderr_yw, "mean_w": s.mean_w,
                        "corr_yw": s.corr_yw,
                    },
                }
                for s in self.sources
            ],
        }


def _threads():
    try:
        return max(1, int(os.environ.get("AOI_THREADS", "0")) or os.cpu_count() or 1)
    except ValueError:
        return 1


def _run_rep(code, lam, mu, seed, rep, config):
    src_keys = np.array([stream_key(seed, rep, source_stream(i)) for i in range(len(lam))],
                        dtype=np.uint64)
    srv_key = stream_key(seed, rep, SERVICE_STREAM)
    h = config.horizon
    f = config.warmup_fraction
    if config.horizon_kind == "time":
        args = (False, float(h), float(f * h), 0, 0)
    else:
        n_target = int(h)
        n_warm = int(round(f / (1.0 - f) * n_target))
        args = (True, 0.0, 0.0, n_target, n_warm)
    out = kernel.run(code, lam, float(mu), src_keys, srv_key, *args,
                     int(config.queue_cap), int(config.record_limit))
    if out[0] == kernel.OVERFLOW:
        raise QueueOverflow(
            f"FCFS queue exceeded {config.queue_cap} packets at t={out[2]:.4g}; "
            "the offered load is probably >= 1")
    return out


def simulate_rates(lambdas: Sequence[float], mu: float, config: SimConfig) -> SimResult:
    """Simulate with explicit arrival rates; zero rates are allowed (silent sources)."""
    lam = np.asarray(lambdas, dtype=np.float64)
    if lam.ndim != 1 or lam.size == 0 or np.any(lam < 0) or not np.all(np.isfinite(lam)):
        raise InvalidLoads("arrival rates must be finite and >= 0")
    if not mu > 0:
        raise InvalidLoads("service rate must be > 0")
    code = _DISC_CODE[config.discipline]
    if config.discipline is Discipline.FCFS and lam.sum() / mu >= 1.0:
        warnings.warn(f"FCFS simulation at total load {lam.sum() / mu:.3g} >= 1 has no steady state",
                      RuntimeWarning, stacklevel=2)

    reps = range(config.reps)
    if config.reps > 1 and _threads() > 1:
        with ThreadPoolExecutor(min(_threads(), config.reps)) as ex:
            outs = list(ex.map(lambda r: _run_rep(code, lam, mu, config.seed, r, config), reps))
    else:
        outs = [_run_rep(code, lam, mu, config.seed, r, config) for r in reps]

    nsrc = lam.size
    span = sum(o[2] - o[1] for o in outs)
    busy = sum(o[7] for o in outs)
    area = sum(o[3] for o in outs)
    mom = sum(o[4] for o in outs)
    sources = []
    for i in range(nsrc):
        m = mom[i]
        n = m[kernel.M_N]
        if n > 0:
            my, my2, myt = m[kernel.M_Y] / n, m[kernel.M_Y2] / n, m[kernel.M_YT] / n
            myw, mw, mw2 = m[kernel.M_YW] / n, m[kernel.M_W] / n, m[kernel.M_W2] / n
            ratio = (myt + 0.5 * my2) / my
            vy, vw = my2 - my * my, mw2 - mw * mw
            corr = (myw - my * mw) / math.sqrt(vy * vw) if vy > 0 and vw > 0 else math.nan
        else:
            my = my2 = myt = myw = mw = ratio = corr = math.nan
        # batches never straddle replications
        per_rep = []
        for o in outs:
            sub = o[5][i, :o[6][i]]
            per_rep.append(sub[sub[:, kernel.B_N] > 0])
        _, se_age, drift = _batch_means(per_rep, kernel.B_Q, kernel.B_Y)
        _, se_yw, _ = _batch_means(per_rep, kernel.B_YW, None)
        sources.append(SourceStats(
            age_area=float(area[i] / span) if span > 0 else math.nan,
            age_ratio=float(ratio), stderr_age=se_age,
            mean_y=float(my), mean_y2=float(my2), mean_yt=float(myt), mean_yw=float(myw),
            stderr_yw=se_yw, mean_w=float(mw), corr_yw=float(corr), deliveries=int(n),
            drift=drift))

    records = []
    for o in outs:
        for s, r in zip(o[8], o[9]):
            records.append(DeliveryRecord(int(s), *map(float, r)))
    return SimResult(sources, float(span), float(busy / span) if span > 0 else math.nan,
                     int(sum(o[10] for o in outs)), int(max(o[11] for o in outs)), records)


def _batch_means(per_rep, num, den):
    """Mean, stderr and drift over N_BATCHES contiguous batches per replication.

    Each batch value is sum(num)/sum(den), or a per-delivery mean when ``den`` is None.
    """
    vals = []
    for mbs in per_rep:
        if len(mbs) < N_BATCHES:
            continue
        for g in np.array_split(np.arange(len(mbs)), N_BATCHES):
            sub = mbs[g]
            d = sub[:, den].sum() if den is not None else sub[:, kernel.B_N].sum()
            vals.append(sub[:, num].sum() / d)
    if len(vals) < 2:
        return math.nan, math.nan, math.nan
    vals = np.array(vals)
    sd = float(np.std(vals, ddof=1))
    se = sd / math.sqrt(len(vals))
    half = len(vals) // 2
    diff_se = sd * math.sqrt(1.0 / half + 1.0 / (len(vals) - half))
    drift = float((vals[half:].mean() - vals[:half].mean()) / diff_se) if sd > 0 else 0.0
    return float(vals.mean()), se, drift


def simulate(config: SimConfig) -> SimResult:
    return simulate_rates(config.loads.lambdas, config.loads.mu, config)


def estimate_eyw(config: SimConfig):
    """Per-source (E[YW] estimate, stderr) for an FCFS run."""
    if config.discipline is not Discipline.FCFS:
        raise ValueError(f"E[YW] is only defined here for FCFS, got {config.discipline}")
    if config.loads.total() >= 1.0:
        raise InvalidLoads("E[YW] estimation needs total load < 1")
    res = simulate(config)
    return [(s.mean_yw, s.stderr_yw) for s in res.sources], res


def trapezoid_area(y: float, t: float) -> float:
    """Area contributed by one delivered update with interarrival ``y`` and system time ``t``."""
    return y * t + 0.5 * y * y


def age_from_records(records: Sequence[DeliveryRecord], observation_span: Optional[float] = None):
    """(age_area, age_ratio) for one source's ordered delivery records.

    The sawtooth is integrated from the first delivery onward over
    ``observation_span`` (default: up to the last delivery).
    """
    if len(records) < 2:
        raise InsufficientData(f"need at least 2 records, got {len(records)}")
    gen = np.array([r.gen_time for r in records])
    dep = np.array([r.delivery_time for r in records])
    if np.any(np.diff(dep) < 0):
        raise ValueError("records must be ordered by delivery time")
    y = gen[1:] - gen[:-1]
    t = dep[1:] - gen[1:]
    ratio = (np.mean(y * t) + 0.5 * np.mean(y * y)) / np.mean(y)

    start = dep[0]
    end = dep[-1] if observation_span is None else start + observation_span
    if end < dep[-1]:
        raise ValueError("observation span ends before the last delivery")
    # between consecutive deliveries the age is t - gen[j-1]
    a0 = dep[:-1] - gen[:-1]
    a1 = dep[1:] - gen[:-1]
    area = 0.5 * np.sum(a1 * a1 - a0 * a0)
    tail0, tail1 = dep[-1] - gen[-1], end - gen[-1]
    area += 0.5 * (tail1 * tail1 - tail0 * tail0)
    span = end - start
    return float(area / span) if span > 0 else math.nan, float(ratio)
