import numpy as np
import pytest

from aoikit import closed_form as cf
from aoikit.core import SourceLoads
from aoikit.errors import InsufficientData, QueueOverflow
from aoikit.sim import (DeliveryRecord, SimConfig, age_from_records, estimate_eyw, simulate,
                        simulate_rates, trapezoid_area)
from aoikit.sim.rng import exponential, stream_key, uniform

LONG = 10_000_000

FCFS_MULTI = pytest.mark.xfail(
    strict=True,
    reason="multi-source FCFS closed form differs from the simulated queue by about 0.8%; "
           "an independent Lindley-recursion simulation agrees with this simulator")


def cfg(disc, rhos, n, seed=1, **kw):
    return SimConfig(SourceLoads(1.0, rhos), disc, n, seed=seed, **kw)


def test_lcfs_s_long_run():
    s = simulate(cfg("lcfs-s", (0.5, 0.5), LONG)).sources[0]
    assert abs(s.age_area - 4.0) <= 3 * s.stderr_age
    assert abs(s.age_area - s.age_ratio) / s.age_area < 0.01


def test_lcfs_w_long_run_two_sigma():
    loads = SourceLoads(1.0, (0.5, 0.5))
    s = simulate(cfg("lcfs-w", loads.rhos, LONG, seed=4)).sources[0]
    assert abs(s.age_area - cf.lcfs_w_age(loads, 0)) <= 2 * s.stderr_age


@FCFS_MULTI
def test_fcfs_reported_optimum_long_run():
    s = simulate(cfg("fcfs", (0.306, 0.306), LONG)).sources[0]
    assert abs(s.age_area - 5.30) <= 3 * s.stderr_age


@pytest.mark.parametrize("rho", [0.3, 0.5, 0.6])
def test_fcfs_single_source(rho):
    s = simulate(cfg("fcfs", (rho,), 2_000_000, seed=9)).sources[0]
    assert abs(s.age_area - cf.fcfs_single_age(rho)) <= 4 * s.stderr_age


def test_zero_rate_source_matches_single_source():
    c = cfg("lcfs-w", (0.4,), 200_000)
    one = simulate_rates([0.4], 1.0, c).sources[0]
    two = simulate_rates([0.4, 0.0], 1.0, c).sources[0]
    assert one == two


@pytest.mark.parametrize("disc", ["fcfs", "lcfs-s", "lcfs-w"])
def test_deterministic_given_seed(disc):
    a = simulate(cfg(disc, (0.3, 0.2), 50_000, seed=3)).to_dict()
    b = simulate(cfg(disc, (0.3, 0.2), 50_000, seed=3)).to_dict()
    c = simulate(cfg(disc, (0.3, 0.2), 50_000, seed=4)).to_dict()
    assert a == b and a != c


def test_reps_and_time_horizon():
    res = simulate(cfg("lcfs-s", (0.3, 0.3), 20_000.0, horizon_kind="time", reps=3))
    assert res.span == pytest.approx(3 * 0.9 * 20_000.0)
    assert res.busy_fraction == pytest.approx(0.6 / 1.6, abs=0.02)


def test_fcfs_overflow():
    with pytest.warns(RuntimeWarning):
        with pytest.raises(QueueOverflow):
            simulate(cfg("fcfs", (0.8, 0.8), 1e6, horizon_kind="time", queue_cap=2000))


def test_trapezoid():
    assert trapezoid_area(2.0, 3.0) == 8.0


def test_records_constant_sequence():
    recs = [DeliveryRecord(0, j, j + 0.5, 1.0, 0.5) for j in range(10)]
    area, ratio = age_from_records(recs)
    assert ratio == pytest.approx(1.0)
    assert area == pytest.approx(1.0)


def test_records_too_few():
    with pytest.raises(InsufficientData):
        age_from_records([DeliveryRecord(0, 0.0, 1.0, 1.0, 1.0)])


def test_records_match_run():
    res = simulate(cfg("lcfs-w", (0.4,), 100_000, record_limit=200_000))
    recs = [r for r in res.records if r.source == 0]
    area, ratio = age_from_records(recs)
    assert area == pytest.approx(ratio, rel=0.01)
    y = np.array([r.interarrival for r in recs])
    t = np.array([r.system_time for r in recs])
    assert np.mean(y * t + 0.5 * y * y) / np.mean(y) == pytest.approx(res.sources[0].age_ratio, rel=1e-9)
    assert ratio == pytest.approx(res.sources[0].age_ratio, rel=1e-3)


@FCFS_MULTI
def test_eyw_two_sources():
    loads = SourceLoads(1.0, (0.3, 0.3))
    (est, se), _ = estimate_eyw(cfg("fcfs", loads.rhos, LONG))[0][0], None
    assert abs(est - cf.fcfs_eyw(loads, 0)) <= 3 * se


def test_eyw_single_source_and_correlation():
    stats, res = estimate_eyw(cfg("fcfs", (0.5,), 4_000_000, seed=2))
    est, se = stats[0]
    assert abs(est - 1.0) <= 3 * se
    assert res.sources[0].corr_yw < 0


def test_eyw_requires_fcfs():
    with pytest.raises(ValueError):
        estimate_eyw(cfg("lcfs-s", (0.3,), 100))


def test_rng_streams():
    k0, k1 = stream_key(0, 0, 0), stream_key(0, 0, 1)
    assert k0 != k1 and stream_key(0, 0, 0) == k0
    u = np.array([uniform(k0, i) for i in range(100_000)])
    assert 0 < u.min() and u.max() < 1
    assert abs(u.mean() - 0.5) < 0.005
    e = np.array([exponential(k1, i, 2.0) for i in range(100_000)])
    assert abs(e.mean() - 0.5) < 0.01


def _lindley_fcfs(rhos, n_arrivals, seed):
    """Independent two-source FCFS oracle: Lindley recursion on the merged arrival stream."""
    rng = np.random.default_rng(seed)
    lam = np.array(rhos)
    gaps = rng.exponential(1.0 / lam.sum(), n_arrivals)
    src = rng.choice(len(lam), n_arrivals, p=lam / lam.sum())
    svc = rng.exponential(1.0, n_arrivals)
    arr = np.cumsum(gaps)
    w = np.zeros(n_arrivals)
    for k in range(1, n_arrivals):
        w[k] = max(0.0, w[k - 1] + svc[k - 1] - gaps[k])
    mine = src == 0
    a, wt, t = arr[mine], w[mine], w[mine] + svc[mine]
    y = np.diff(a)
    cut = len(y) // 10
    y, wt, t = y[cut:], wt[1:][cut:], t[1:][cut:]
    return (np.mean(y * t) + 0.5 * np.mean(y * y)) / np.mean(y), np.mean(y * wt)


def test_fcfs_matches_lindley_oracle():
    age_l, eyw_l = _lindley_fcfs((0.3, 0.3), 1_000_000, 11)
    s = simulate(cfg("fcfs", (0.3, 0.3), 3_000_000, seed=12)).sources[0]
    assert age_l == pytest.approx(s.age_ratio, rel=0.01)
    assert eyw_l == pytest.approx(s.mean_yw, rel=0.02)
    # both sit above the closed form by more than their noise
    assert age_l - cf.fcfs_age(SourceLoads(1.0, (0.3, 0.3)), 0) > 0.02
