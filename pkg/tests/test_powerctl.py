import numpy as np
import pytest
from scipy.optimize import linprog

from mamimo.powerctl import (
    STATUS_INFEASIBLE,
    UserLink,
    achieved_rates,
    feasibility_at_rate,
    maxmin_power_control,
)


def _random_links(rng, k):
    return [
        UserLink(float(rng.uniform(0.3, 1.0)), float(10 ** rng.uniform(-2.0, 0.5)))
        for _ in range(k)
    ]


def _linprog_feasible(links, m, rate):
    """Generic linear-feasibility oracle for the epigraph constraints."""
    k = len(links)
    g = 2.0**rate - 1.0
    c_arr = np.array([l.csi_quality for l in links])
    s_arr = np.array([l.snr_d for l in links])
    # -(c M S_k) eta_k + g S_k sum(eta) <= -g, sum(eta) <= K, 0 <= eta <= K
    a_ub = np.zeros((k + 1, k))
    b_ub = np.zeros(k + 1)
    for i in range(k):
        a_ub[i] = g * s_arr[i]
        a_ub[i, i] -= c_arr[i] * m * s_arr[i]
        b_ub[i] = -g
    a_ub[k] = 1.0
    b_ub[k] = k
    res = linprog(np.zeros(k), A_ub=a_ub, b_ub=b_ub, bounds=[(0, k)] * k, method="highs")
    return res.status == 0, res.x


def test_single_user_closed_form():
    link = UserLink(0.8, 0.5)
    sol = maxmin_power_control([link], 100, tol=1e-12)
    expected = np.log2(1 + 0.8 * 100 * 0.5 / (0.5 + 1))
    assert sol.rate == pytest.approx(expected, rel=1e-9)
    assert sol.allocation.eta[0] == pytest.approx(1.0, abs=1e-6)


def test_symmetric_users_closed_form():
    k, m, c, s = 4, 100, 0.9, 0.25
    sol = maxmin_power_control([UserLink(c, s)] * k, m, tol=1e-12)
    expected = np.log2(1 + c * m * s / (k * s + 1))
    assert sol.rate == pytest.approx(expected, rel=1e-9)
    assert np.allclose(sol.allocation.eta, 1.0, atol=1e-6)


def test_two_user_grid_search_oracle():
    # brute force over (eta1, eta2) at 1e-3 resolution
    links = [UserLink(0.8, 0.316), UserLink(0.8, 0.0316)]
    m = 100
    sol = maxmin_power_control(links, m, tol=1e-12)
    eta = np.arange(0.0, 2.0 + 1e-9, 1e-3)
    e1, e2 = np.meshgrid(eta, eta, indexing="ij")
    total = e1 + e2
    ok = total <= 2.0
    r1 = np.log2(1 + 0.8 * m * 0.316 * e1 / (0.316 * total + 1))
    r2 = np.log2(1 + 0.8 * m * 0.0316 * e2 / (0.0316 * total + 1))
    min_rate = np.where(ok, np.minimum(r1, r2), -np.inf)
    assert sol.rate == pytest.approx(min_rate.max(), abs=1e-2)


def test_rate_zero_always_feasible():
    links = _random_links(np.random.default_rng(0), 5)
    ok, eta = feasibility_at_rate(links, 50, 0.0)
    assert ok
    assert np.all(eta == 0.0)


def test_symmetric_feasibility_boundary():
    k, m, c, s = 4, 64, 0.7, 0.2
    r_star = np.log2(1 + c * m * s / (k * s + 1))
    ok, eta = feasibility_at_rate([UserLink(c, s)] * k, m, r_star - 1e-9)
    assert ok and np.allclose(eta, 1.0, atol=1e-6)
    ok, _ = feasibility_at_rate([UserLink(c, s)] * k, m, r_star + 1e-6)
    assert not ok


def test_fixed_point_agrees_with_linprog_oracle():
    rng = np.random.default_rng(1)
    agree = 0
    total = 1000
    for _ in range(total):
        links = _random_links(rng, 3)
        m = int(rng.integers(10, 200))
        rate = float(rng.uniform(0.0, 6.0))
        verdict, _ = feasibility_at_rate(links, m, rate)
        oracle, _ = _linprog_feasible(links, m, rate)
        agree += verdict == oracle
    assert agree == total


def test_feasibility_monotone_in_rate():
    rng = np.random.default_rng(2)
    for _ in range(50):
        links = _random_links(rng, 4)
        sol = maxmin_power_control(links, 80)
        for frac in (0.1, 0.5, 0.9):
            ok, _ = feasibility_at_rate(links, 80, frac * sol.rate)
            assert ok


def test_rates_equalized_at_solution():
    rng = np.random.default_rng(3)
    for _ in range(20):
        links = _random_links(rng, 6)
        sol = maxmin_power_control(links, 120, tol=1e-12)
        rates = achieved_rates(links, 120, sol.allocation.eta)
        assert np.max(rates) - np.min(rates) <= 1e-6 * max(1.0, np.max(rates))


def test_optimum_monotone_in_parameters():
    rng = np.random.default_rng(4)
    links = _random_links(rng, 4)
    base = maxmin_power_control(links, 64).rate
    assert maxmin_power_control(links, 80).rate >= base - 1e-9
    bumped_c = [UserLink(min(1.0, l.csi_quality * 1.1), l.snr_d) for l in links]
    assert maxmin_power_control(bumped_c, 64).rate >= base - 1e-9
    bumped_s = [UserLink(l.csi_quality, l.snr_d * 1.2) for l in links]
    assert maxmin_power_control(bumped_s, 64).rate >= base - 1e-9


def test_dead_user_caps_rate_at_zero():
    links = [UserLink(0.9, 1.0), UserLink(0.9, 0.0)]
    sol = maxmin_power_control(links, 100)
    assert sol.rate == 0.0
    assert sol.status == STATUS_INFEASIBLE
    assert sol.limiting_user == 1
    ok, reason = feasibility_at_rate(links, 100, 0.5)
    assert not ok and "user 1" in reason


def test_budget_and_caps_respected():
    rng = np.random.default_rng(5)
    for _ in range(20):
        links = _random_links(rng, 5)
        sol = maxmin_power_control(links, 100)
        eta = sol.allocation.eta
        assert np.all(eta >= 0.0) and np.all(eta <= 5 + 1e-9)
        assert eta.sum() <= 5 * (1 + 1e-9)
