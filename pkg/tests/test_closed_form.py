import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from aoikit import closed_form as cf
from aoikit.core import SourceLoads
from aoikit.errors import UnstableLoad


def L(*rhos, mu=1.0):
    return SourceLoads(mu, rhos)


@pytest.mark.parametrize("loads, expected, tol", [
    (L(0.306, 0.306), 5.30, 0.01),
    (L(0.306, 0.306, mu=2.0), 2.65, 0.01),
    (L(0.342, 0.342), 5.4390, 0.001),
])
def test_fcfs_age_reported_values(loads, expected, tol):
    assert abs(cf.fcfs_age(loads, 0) - expected) <= tol


def test_fcfs_single_source_reduction():
    assert cf.fcfs_age(L(0.531), 0) == cf.fcfs_single_age(0.531, 1.0)
    assert abs(cf.fcfs_single_age(0.531, 1.0) - 3.48) <= 0.01


def test_fcfs_single_optimum():
    assert 0.52 <= cf.fcfs_single_optimal_load() <= 0.54


@pytest.mark.parametrize("rho", [0.1, 0.4, 0.8])
def test_fcfs_single_mu_scaling(rho):
    assert cf.fcfs_single_age(rho, 2.0) == pytest.approx(cf.fcfs_single_age(rho, 1.0) / 2)


@pytest.mark.parametrize("fn", [cf.fcfs_age, cf.fcfs_eyw])
def test_fcfs_unstable(fn):
    with pytest.raises(UnstableLoad, match="unstable"):
        fn(L(0.6, 0.6), 0)


def test_lcfs_s_values(sym05):
    assert cf.lcfs_s_age(sym05, 0) == 4.0
    assert cf.lcfs_s_age(L(1e6), 0) == pytest.approx(1 + 1e-6, rel=1e-12)
    assert cf.lcfs_s_age(L(1.0, 1.0, mu=2.0), 0) == cf.lcfs_s_age(L(1.0, 1.0), 0) / 2


def test_alpha_w_values():
    assert cf.alpha_w(0.0) == 1.0
    assert cf.alpha_w(1.0) == pytest.approx(float(Fraction(11, 12)), abs=1e-15)


def test_alpha_w_bounds_sampled():
    rho = np.random.default_rng(5).uniform(0, 100, 10_000)
    vals = np.array([cf.alpha_w(r) for r in rho])
    assert np.all((vals > 0.837) & (vals < 1.09))


@given(st.lists(st.floats(0.01, 5.0), min_size=1, max_size=5), st.floats(0.2, 5.0))
def test_lcfs_w_mu_scaling(rhos, mu):
    a1 = cf.lcfs_w_age(SourceLoads(1.0, tuple(rhos)), 0)
    a3 = cf.lcfs_w_age(SourceLoads(3.0 * mu, tuple(rhos)), 0)
    assert a3 * 3.0 * mu == pytest.approx(a1, rel=1e-12)


def test_eyw_single_source():
    rho = 0.37
    assert cf.fcfs_eyw(L(rho, mu=2.0), 0) == pytest.approx(rho / (1 - rho) / 4.0, rel=1e-14)


@given(st.lists(st.floats(0.01, 0.3), min_size=1, max_size=3), st.floats(0.2, 4.0))
def test_eyw_age_consistency(rhos, mu):
    loads = SourceLoads(mu, tuple(rhos))
    for i in range(loads.n):
        lam_i = loads.rhos[i] * mu
        lhs = lam_i * cf.fcfs_eyw(loads, i) + 1 / mu + 1 / lam_i
        assert lhs == pytest.approx(cf.fcfs_age(loads, i), rel=1e-12)


def test_lcfs_s_moments(sym05):
    m = cf.lcfs_s_moments(sym05, 0)
    assert (m.expected_t, m.expected_d, m.expected_d2) == pytest.approx((0.5, 4.0, 28.0))
    assert m.age == m.expected_t + m.expected_d2 / (2 * m.expected_d)
    assert m.age == pytest.approx(cf.lcfs_s_age(sym05, 0), rel=1e-12)
    assert cf.lcfs_s_moments(L(1.0), 0).age == pytest.approx(2.0)


def test_large_n():
    lim = cf.large_n_ages(1.0, 10, 1.0)
    assert lim.lcfs_s == 20.0
    assert lim.fcfs is None
    half = cf.large_n_ages(0.7, 10, 2.0)
    full = cf.large_n_ages(0.7, 10, 1.0)
    for a, b in ((half.fcfs, full.fcfs), (half.lcfs_s, full.lcfs_s), (half.lcfs_w, full.lcfs_w)):
        assert a == pytest.approx(b / 2)


def test_large_n_ratios():
    n = 10_000
    lim = cf.large_n_ages(cf.fcfs_optimal_symmetric_load(n), n)
    assert lim.lcfs_w / lim.fcfs == pytest.approx(1.5, rel=0.05)
    assert lim.lcfs_s / lim.fcfs == pytest.approx(2.0, rel=0.05)


@pytest.mark.parametrize("n, expected", [(1, 0.5), (4, 2 / 3)])
def test_optimal_symmetric_load(n, expected):
    assert cf.fcfs_optimal_symmetric_load(n) == pytest.approx(expected, abs=1e-15)


def test_optimal_symmetric_load_tends_to_one():
    vals = [cf.fcfs_optimal_symmetric_load(n) for n in (10, 1000, 10 ** 8)]
    assert vals == sorted(vals) and all(v < 1 for v in vals) and vals[-1] > 0.9999


def test_dispatch_matches_direct(sym05):
    assert cf.ages(sym05, "lcfs-w").ages == (cf.lcfs_w_age(sym05, 0),) * 2
    assert cf.sum_age(sym05, "lcfs-s") == 8.0
    assert math.isclose(cf.age(sym05, 1, "lcfs_s"), 4.0)
